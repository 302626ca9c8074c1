//! Closed-form side of the lower-bound argument.
//!
//! Every inequality in the chain is a pure function here. No unnamed
//! constants are introduced: [`green_form_value`] is constant-free, the
//! certificate path ([`certified_delta`]) computes every constant it uses, and
//! [`theorem_bound`] takes its constant `c` from the caller.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{bracket, Hypothesis, ProblemSpec, Regime};
use crate::quadrature::{integrate, Tolerance};
use crate::special::{gamma, golden_section};

/// Upper clamp for test-function width exponents.
pub const BETA_MAX: f64 = 1.0 - 1e-9;

/// Absolute tolerance of the integral in [`about_lhs`].
pub const ABOUT_QUADRATURE_TOL: f64 = 1e-10;

/// Search interval and tolerance for [`optimal_alpha`].
pub const ALPHA_SEARCH: (f64, f64) = (0.01, 0.49);
pub const ALPHA_TOL: f64 = 1e-6;

fn open_unit(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must lie in (0, 1), got {v}")))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 0.5 {
        Ok(())
    } else {
        Err(Error::param("alpha", format!("must lie in (0, 1/2), got {alpha}")))
    }
}

/// Solves p + (1 − p)αs = s, i.e. p = s(1 − α)/(1 − αs).
pub fn interpolation_exponent(alpha: f64, s: f64) -> Result<f64> {
    open_unit("alpha", alpha)?;
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::param("s", format!("must lie in (0, 1], got {s}")));
    }
    if s == 1.0 {
        return Ok(1.0);
    }
    Ok(s * (1.0 - alpha) / (1.0 - alpha * s))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaLemmaPair {
    pub lhs: f64,
    pub rhs: f64,
}

impl GammaLemmaPair {
    pub fn holds(&self) -> bool {
        self.lhs > self.rhs
    }
}

/// lhs = (1−λ)^{1−λ} e^{λ−1} (ln δ⁻¹)^{λ−1}, rhs = δ; lhs > rhs on (0,1)².
pub fn gamma_lemma_pair(lambda: f64, delta: f64) -> Result<GammaLemmaPair> {
    open_unit("lambda", lambda)?;
    open_unit("delta", delta)?;
    let log_inv = -delta.ln();
    let lhs = (1.0 - lambda).powf(1.0 - lambda) * (lambda - 1.0).exp() * log_inv.powf(lambda - 1.0);
    Ok(GammaLemmaPair { lhs, rhs: delta })
}

/// C(α, λ) = Γ(1−λ)/α + (1−λ)^{1−λ} e^{λ−2}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AboutConstant {
    pub value: f64,
}

pub fn about_constant(alpha: f64, lambda: f64) -> Result<AboutConstant> {
    check_alpha(alpha)?;
    open_unit("lambda", lambda)?;
    let value = gamma(1.0 - lambda) / alpha + (1.0 - lambda).powf(1.0 - lambda) * (lambda - 2.0).exp();
    Ok(AboutConstant { value })
}

/// ∫₀¹ (αs)^{−λ} δ^{p(s)} ds + e^{−1}δ.
///
/// The s^{−λ} singularity is removed with s = τ^{1/(1−λ)}, which turns the
/// integrand into α^{−λ}/(1−λ)·δ^{p(s(τ))}, bounded and smooth on [0, 1].
pub fn about_lhs(alpha: f64, lambda: f64, delta: f64) -> Result<f64> {
    check_alpha(alpha)?;
    open_unit("lambda", lambda)?;
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::param("delta", format!("must lie in (0, 1], got {delta}")));
    }
    let ln_delta = delta.ln();
    let power = 1.0 / (1.0 - lambda);
    let scale = alpha.powf(-lambda) / (1.0 - lambda);
    let integrand = |tau: f64| {
        let s = tau.powf(power);
        let p = s * (1.0 - alpha) / (1.0 - alpha * s);
        scale * (p * ln_delta).exp()
    };
    let est = integrate(integrand, 0.0, 1.0, Tolerance::absolute(ABOUT_QUADRATURE_TOL))?;
    Ok(est.value + (-1f64).exp() * delta)
}

/// C(α, λ)·(ln δ⁻¹)^{λ−1}, the right-hand side that [`about_lhs`] stays below.
pub fn about_rhs(alpha: f64, lambda: f64, delta: f64) -> Result<f64> {
    open_unit("delta", delta)?;
    Ok(about_constant(alpha, lambda)?.value * (-delta.ln()).powf(lambda - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaChoice {
    pub alpha: f64,
    pub constant: f64,
}

/// Minimizes C(α, λ) over α ∈ [0.01, 0.49] by golden-section search.
pub fn optimal_alpha(lambda: f64) -> Result<AlphaChoice> {
    open_unit("lambda", lambda)?;
    let g = gamma(1.0 - lambda);
    let tail = (1.0 - lambda).powf(1.0 - lambda) * (lambda - 2.0).exp();
    let min = golden_section(|a| g / a + tail, ALPHA_SEARCH.0, ALPHA_SEARCH.1, ALPHA_TOL);
    Ok(AlphaChoice {
        alpha: min.x,
        constant: about_constant(min.x, lambda)?.value,
    })
}

/// ⟨x⟩^{βN}(t⟨x⟩^{−2mβ} + t⟨x⟩^γ + 1): the structural bound on tQ(g_x) + ‖g_x‖².
pub fn green_form_value(t: f64, x: f64, beta: f64, spec: &ProblemSpec) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::param("t", format!("time must be positive, got {t}")));
    }
    let b = spec.bracket(x)?;
    let n = spec.dim as f64;
    let two_m = 2.0 * spec.m as f64;
    Ok(b.powf(beta * n) * (t * b.powf(-two_m * beta) + t * b.powf(spec.gamma) + 1.0))
}

/// Late-regime reduced objective ⟨x⟩^{βN}·t·(⟨x⟩^{−2mβ} + ⟨x⟩^γ).
pub fn late_objective(t: f64, x: f64, beta: f64, spec: &ProblemSpec) -> Result<f64> {
    let b = spec.bracket(x)?;
    let n = spec.dim as f64;
    let two_m = 2.0 * spec.m as f64;
    Ok(b.powf(beta * n) * t * (b.powf(-two_m * beta) + b.powf(spec.gamma)))
}

/// Early-regime reduced objective ⟨x⟩^{βN}·(t⟨x⟩^{−2mβ} + 1).
pub fn early_objective(t: f64, x: f64, beta: f64, spec: &ProblemSpec) -> Result<f64> {
    let b = spec.bracket(x)?;
    let n = spec.dim as f64;
    let two_m = 2.0 * spec.m as f64;
    Ok(b.powf(beta * n) * (t * b.powf(-two_m * beta) + 1.0))
}

/// A test-function width exponent: g_x has plateau radius ⟨x⟩^β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaChoice {
    pub value: f64,
    /// Unclamped optimizer output.
    pub raw: f64,
    pub clamped: bool,
    /// ⟨x⟩ = 1, where every β gives the same width; `value` is then 0.
    pub degenerate: bool,
}

impl BetaChoice {
    fn from_raw(raw: f64) -> Self {
        let clamped = raw > BETA_MAX;
        BetaChoice {
            value: raw.min(BETA_MAX),
            raw,
            clamped,
            degenerate: false,
        }
    }

    fn degenerate() -> Self {
        BetaChoice {
            value: 0.0,
            raw: 0.0,
            clamped: false,
            degenerate: true,
        }
    }

    /// Raises the exponent to `floor`, marking the choice clamped when it moves.
    pub fn with_floor(self, floor: f64) -> Self {
        if self.value < floor {
            BetaChoice {
                value: floor.min(BETA_MAX),
                clamped: true,
                ..self
            }
        } else {
            self
        }
    }
}

/// Minimizer of the Late-regime reduced objective:
/// β = (ln(2m/N − 1)/ln⟨x⟩ − γ)/(2m).
///
/// The potential term wants narrow bumps, so the width ⟨x⟩^β shrinks like
/// ⟨x⟩^{−γ/2m} and the objective collapses to ~t⟨x⟩^{(1−N/2m)γ}.
pub fn beta_late(x: f64, spec: &ProblemSpec) -> Result<BetaChoice> {
    spec.validate()?;
    let log_b = spec.bracket(x)?.ln();
    if log_b == 0.0 {
        return Ok(BetaChoice::degenerate());
    }
    let two_m = 2.0 * spec.m as f64;
    let raw = (spec.order_ratio().ln() / log_b - spec.gamma) / two_m;
    Ok(BetaChoice::from_raw(raw))
}

/// Minimizer of the Early-regime reduced objective:
/// β = (ln(2m/N − 1) + ln t)/(2m·ln⟨x⟩), giving the parabolic width
/// ⟨x⟩^β = ((2m/N − 1)t)^{1/2m}.
pub fn beta_early(t: f64, x: f64, spec: &ProblemSpec) -> Result<BetaChoice> {
    spec.validate()?;
    if !(t > 0.0) {
        return Err(Error::param("t", format!("time must be positive, got {t}")));
    }
    let log_b = spec.bracket(x)?.ln();
    if log_b == 0.0 {
        return Ok(BetaChoice::degenerate());
    }
    let two_m = 2.0 * spec.m as f64;
    let raw = (spec.order_ratio().ln() + t.ln()) / (two_m * log_b);
    Ok(BetaChoice::from_raw(raw))
}

pub fn beta_for(regime: Regime, t: f64, x: f64, spec: &ProblemSpec) -> Result<BetaChoice> {
    match regime {
        Regime::Late => beta_late(x, spec),
        Regime::Early => beta_early(t, x, spec),
    }
}

/// u(t, x) = σ⟨x⟩^{−μ}t^{−λ}.
pub fn u_reference(t: f64, x: f64, hyp: &Hypothesis, rho: f64) -> f64 {
    hyp.sigma * bracket(x, rho).powf(-hyp.mu) * t.powf(-hyp.lambda)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifiedDelta {
    pub delta_min: f64,
    /// (C·u/V*)^{1/(1−λ)}; `delta_min = exp(−exponent_arg)`.
    pub exponent_arg: f64,
    pub constant: f64,
}

/// Inverts V*/u < C(ln δ⁻¹)^{λ−1} into δ > exp(−(C·u/V*)^{1/(1−λ)}).
pub fn certified_delta(v_star: f64, u_val: f64, alpha: f64, lambda: f64) -> Result<CertifiedDelta> {
    if !(v_star > 0.0) {
        return Err(Error::DegenerateTestFunction);
    }
    if !(u_val > 0.0) {
        return Err(Error::param("u", format!("envelope value must be positive, got {u_val}")));
    }
    let constant = about_constant(alpha, lambda)?.value;
    let exponent_arg = (constant * u_val / v_star).powf(1.0 / (1.0 - lambda));
    Ok(CertifiedDelta {
        delta_min: (-exponent_arg).exp(),
        exponent_arg,
        constant,
    })
}

/// The exponent shape multiplying `c` in the theorem's bound:
/// Late: ⟨x⟩^{((1−N/2m)γ−μ)/(1−λ)}·t; Early: ⟨x⟩^{−μ/(1−λ)}·t^{(N/2m−λ)/(1−λ)}.
pub fn theorem_exponent(t: f64, x: f64, hyp: &Hypothesis, spec: &ProblemSpec) -> Result<(Regime, f64)> {
    let regime = crate::problem::classify_regime(t, x, spec)?;
    if !(hyp.lambda < 1.0) {
        return Err(Error::param("lambda", format!("must be < 1, got {}", hyp.lambda)));
    }
    let b = spec.bracket(x)?;
    let k = spec.scaling_exponent();
    let denom = 1.0 - hyp.lambda;
    let shape = match regime {
        Regime::Late => b.powf(((1.0 - k) * spec.gamma - hyp.mu) / denom) * t,
        Regime::Early => b.powf(-hyp.mu / denom) * t.powf((k - hyp.lambda) / denom),
    };
    Ok((regime, shape))
}

/// u(t,x)·exp(−c·shape) with the regime-appropriate shape.
pub fn theorem_bound(t: f64, x: f64, hyp: &Hypothesis, spec: &ProblemSpec, c: f64) -> Result<f64> {
    if !(c >= 0.0) {
        return Err(Error::param("c", format!("must be non-negative, got {c}")));
    }
    let (_, shape) = theorem_exponent(t, x, hyp, spec)?;
    Ok(u_reference(t, x, hyp, spec.rho()?) * (-c * shape).exp())
}
