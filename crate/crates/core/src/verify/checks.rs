use serde::{Deserialize, Serialize};

use crate::bounds::{about_lhs, interpolation_exponent, u_reference};
use crate::error::{Error, Result};
use crate::lab::SpectralData;
use crate::problem::Hypothesis;
use crate::quadrature::{integrate_to_infinity, Tolerance};

/// Relative slack allowed in the interpolation inequality.
pub const INTERPOLATION_SLACK: f64 = 1e-10;

/// Points of the envelope-history grid on [t·10⁻⁴, t].
pub const HISTORY_POINTS: usize = 32;
pub const HISTORY_DEPTH: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterpolationCheck {
    pub alpha: f64,
    pub s: f64,
    pub p: f64,
    /// k(ts)
    pub lhs: f64,
    /// k(αts)^{1−p}·k(t)^p
    pub rhs: f64,
    /// (rhs − lhs)/rhs; negative values are violations.
    pub slack: f64,
    pub holds: bool,
}

/// k(ts) ≤ k(αts)^{1−p}k(t)^p at one node.
pub fn check_interpolation(sd: &SpectralData, node: usize, t: f64, alpha: f64, s: f64) -> Result<InterpolationCheck> {
    if !(t > 0.0) {
        return Err(Error::param("t", format!("time must be positive, got {t}")));
    }
    let p = interpolation_exponent(alpha, s)?;
    // Compared in logs: for fast-decaying measures k(t) underflows long
    // before the inequality becomes delicate.
    let log_k = |tau: f64| sd.log_heat_kernel_diag(tau, node);
    let log_lhs = log_k(t * s);
    let log_rhs = if p == 1.0 {
        log_k(t)
    } else {
        (1.0 - p) * log_k(alpha * t * s) + p * log_k(t)
    };
    let gap = if log_lhs == f64::NEG_INFINITY { f64::NEG_INFINITY } else { log_lhs - log_rhs };
    let slack = -gap.exp_m1();
    Ok(InterpolationCheck {
        alpha,
        s,
        p,
        lhs: log_lhs.exp(),
        rhs: log_rhs.exp(),
        slack,
        holds: gap <= INTERPOLATION_SLACK.ln_1p(),
    })
}

/// Log-spaced τ-grid on [t·10⁻⁴, t], ending exactly at t.
pub fn history_grid(t: f64) -> Vec<f64> {
    let lo = (t * HISTORY_DEPTH).ln();
    let hi = t.ln();
    (0..HISTORY_POINTS)
        .map(|i| {
            if i + 1 == HISTORY_POINTS {
                t
            } else {
                (lo + (hi - lo) * i as f64 / (HISTORY_POINTS - 1) as f64).exp()
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeHistory {
    /// Number of τ-grid points with k(τ) > u(τ).
    pub violations: usize,
    /// max over the grid of k(τ)/u(τ).
    pub worst_ratio: f64,
}

impl EnvelopeHistory {
    pub fn valid(&self) -> bool {
        self.violations == 0
    }
}

/// Compares k(τ, x, x) with u(τ, x) on [`history_grid`].
pub fn envelope_history(sd: &SpectralData, node: usize, x: f64, t: f64, hyp: &Hypothesis, rho: f64) -> EnvelopeHistory {
    let mut violations = 0;
    let mut worst_ratio = 0.0f64;
    for tau in history_grid(t) {
        let ratio = sd.heat_kernel_diag(tau, node) / u_reference(tau, x, hyp, rho);
        if ratio > 1.0 {
            violations += 1;
        }
        worst_ratio = worst_ratio.max(ratio);
    }
    EnvelopeHistory {
        violations,
        worst_ratio,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dav2Check {
    pub history: EnvelopeHistory,
    /// δ(t, x) = k(t, x, x)/u(t, x)
    pub delta: f64,
    /// G_t(x, x)/u(t, x); `None` when skipped.
    pub lhs: Option<f64>,
    /// ∫₀¹ (αs)^{−λ}δ^{p(s)} ds + e^{−1}δ; `None` when skipped.
    pub rhs: Option<f64>,
    pub skipped: bool,
    pub holds: Option<bool>,
}

/// G_t(x,x)/u(t,x) < ∫₀¹ (αs)^{−λ}δ^{p(s)} ds + e^{−1}δ, checked only where
/// the envelope majorizes the kernel on the whole τ-grid.
pub fn check_dav2_chain(
    sd: &SpectralData,
    node: usize,
    x: f64,
    t: f64,
    hyp: &Hypothesis,
    alpha: f64,
    rho: f64,
) -> Result<Dav2Check> {
    if !(t > 0.0) {
        return Err(Error::param("t", format!("time must be positive, got {t}")));
    }
    let history = envelope_history(sd, node, x, t, hyp, rho);
    let u = u_reference(t, x, hyp, rho);
    let delta = sd.heat_kernel_diag(t, node) / u;
    if !history.valid() {
        return Ok(Dav2Check {
            history,
            delta,
            lhs: None,
            rhs: None,
            skipped: true,
            holds: None,
        });
    }
    let lhs = sd.greens_diag(t, node) / u;
    let rhs = about_lhs(alpha, hyp.lambda, delta)?;
    Ok(Dav2Check {
        history,
        delta,
        lhs: Some(lhs),
        rhs: Some(rhs),
        skipped: false,
        holds: Some(lhs < rhs),
    })
}

/// ∫₀^∞ e^{−s} k(ts, x, x) ds by quadrature, the Laplace form of G_t(x, x).
pub fn greens_by_laplace(sd: &SpectralData, node: usize, t: f64, rel_tol: f64) -> Result<f64> {
    let est = integrate_to_infinity(
        |s| (-s).exp() * sd.heat_kernel_diag(t * s, node),
        0.0,
        Tolerance::relative(rel_tol),
    )?;
    Ok(est.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(weights: &[f64], rates: &[f64]) -> SpectralData {
        let vectors: Vec<Vec<f64>> = weights.iter().map(|w| vec![w.sqrt()]).collect();
        SpectralData::from_parts(1.0, rates.to_vec(), &vectors).unwrap()
    }

    #[test]
    fn interpolation_equality_cases() {
        let sd = scalar(&[0.8, 0.3], &[0.5, 4.0]);
        let c = check_interpolation(&sd, 0, 0.7, 0.3, 1.0).unwrap();
        assert_eq!(c.p, 1.0);
        assert_eq!(c.lhs, c.rhs);

        let single = scalar(&[1.7], &[2.5]);
        for &(alpha, s) in &[(0.1, 0.2), (0.5, 0.5), (0.9, 0.95)] {
            let c = check_interpolation(&single, 0, 1.3, alpha, s).unwrap();
            assert!(c.holds);
            assert!(c.slack.abs() < 1e-13, "{c:?}");
        }
    }

    #[test]
    fn interpolation_survives_underflow() {
        // e^{-1000·10} underflows; the log-domain comparison does not.
        let sd = scalar(&[0.4, 0.6], &[1000.0, 1500.0]);
        let c = check_interpolation(&sd, 0, 10.0, 0.2, 0.4).unwrap();
        assert!(c.holds, "{c:?}");
        assert!(c.slack.is_finite());
    }

    #[test]
    fn history_grid_shape() {
        let g = history_grid(0.5);
        assert_eq!(g.len(), HISTORY_POINTS);
        assert!((g[0] - 0.5e-4).abs() < 1e-18);
        assert_eq!(*g.last().unwrap(), 0.5);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn dav2_single_mode() {
        // k(t) = e^{−t}; u = 1.2·t^{−1/2} majorizes it everywhere on (0, 1].
        let sd = scalar(&[1.0], &[1.0]);
        let hyp = Hypothesis::new(1.2, 1.0, 0.5).unwrap();
        let c = check_dav2_chain(&sd, 0, 0.0, 1.0, &hyp, 0.25, 1.0).unwrap();
        assert!(!c.skipped);
        assert_eq!(c.holds, Some(true));
        assert!((c.lhs.unwrap() - 0.5 / 1.2).abs() < 1e-14);

        let weak = Hypothesis::new(0.3, 1.0, 0.5).unwrap();
        let c = check_dav2_chain(&sd, 0, 0.0, 1.0, &weak, 0.25, 1.0).unwrap();
        assert!(c.skipped && c.history.violations > 0 && c.holds.is_none());
    }

    #[test]
    fn laplace_matches_resolvent() {
        let sd = scalar(&[0.2, 0.5, 1.0], &[0.0, 3.0, 40.0]);
        for t in [0.1, 1.0, 7.0] {
            let quad = greens_by_laplace(&sd, 0, t, 1e-12).unwrap();
            let exact = sd.greens_diag(t, 0);
            assert!(((quad - exact) / exact).abs() < 1e-10);
        }
    }
}
