//! Grid sweeps of the closed-form lemmas and randomized interpolation trials.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{about_lhs, about_rhs, gamma_lemma_pair, interpolation_exponent};
use crate::error::Result;
use crate::lab::SpectralData;

use super::checks::check_interpolation;

/// One evaluated point of a lemma grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaPoint {
    pub alpha: Option<f64>,
    pub lambda: f64,
    pub delta: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaSweep {
    pub name: String,
    pub points: Vec<LemmaPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub name: String,
    pub checked: usize,
    pub violations: usize,
    /// Largest violation measure seen (≤ 0 when everything holds); `None`
    /// when nothing was checked.
    pub worst: Option<f64>,
}

impl CheckSummary {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

impl LemmaSweep {
    pub fn violations(&self) -> usize {
        self.points.iter().filter(|p| !p.holds).count()
    }

    /// Largest ln(lhs/rhs) for the integral lemma (which wants lhs < rhs);
    /// largest ln(rhs/lhs) for the Gamma lemma (which wants lhs > rhs).
    pub fn summary(&self, lhs_below: bool) -> CheckSummary {
        let worst = self
            .points
            .iter()
            .map(|p| if lhs_below { (p.lhs / p.rhs).ln() } else { (p.rhs / p.lhs).ln() })
            .reduce(f64::max);
        CheckSummary {
            name: self.name.clone(),
            checked: self.points.len(),
            violations: self.violations(),
            worst,
        }
    }
}

fn linear(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()
}

fn logarithmic(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    linear(lo.ln(), hi.ln(), count).into_iter().map(f64::exp).collect()
}

/// λ ∈ {0.05, …, 0.95} (19 values) × δ log-spaced over [1e−6, 0.99] (100 values).
pub fn gamma_lemma_grid() -> (Vec<f64>, Vec<f64>) {
    (linear(0.05, 0.95, 19), logarithmic(1e-6, 0.99, 100))
}

/// α ∈ {0.05, …, 0.45} × λ ∈ {0.1, …, 0.9} × δ log-spaced over [1e−4, 0.9].
pub fn about_lemma_grid() -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    (linear(0.05, 0.45, 9), linear(0.1, 0.9, 9), logarithmic(1e-4, 0.9, 12))
}

pub fn sweep_gamma_lemma() -> Result<LemmaSweep> {
    let (lambdas, deltas) = gamma_lemma_grid();
    let mut points = Vec::with_capacity(lambdas.len() * deltas.len());
    for &lambda in &lambdas {
        for &delta in &deltas {
            let pair = gamma_lemma_pair(lambda, delta)?;
            points.push(LemmaPoint {
                alpha: None,
                lambda,
                delta,
                lhs: pair.lhs,
                rhs: pair.rhs,
                holds: pair.holds(),
            });
        }
    }
    Ok(LemmaSweep {
        name: "gamma-lemma".into(),
        points,
    })
}

pub fn sweep_about_lemma() -> Result<LemmaSweep> {
    let (alphas, lambdas, deltas) = about_lemma_grid();
    let mut params = Vec::new();
    for &alpha in &alphas {
        for &lambda in &lambdas {
            for &delta in &deltas {
                params.push((alpha, lambda, delta));
            }
        }
    }
    let points = params
        .par_iter()
        .map(|&(alpha, lambda, delta)| {
            let lhs = about_lhs(alpha, lambda, delta)?;
            let rhs = about_rhs(alpha, lambda, delta)?;
            Ok(LemmaPoint {
                alpha: Some(alpha),
                lambda,
                delta,
                lhs,
                rhs,
                holds: lhs < rhs,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LemmaSweep {
        name: "integral-lemma".into(),
        points,
    })
}

/// (α, s) pairs on an n×n interior grid of (0, 1)², for the interpolation checks.
pub fn interpolation_grid(n: usize) -> Vec<(f64, f64)> {
    let step = 1.0 / (n + 1) as f64;
    let mut out = Vec::with_capacity(n * n);
    for i in 1..=n {
        for j in 1..=n {
            out.push((i as f64 * step, j as f64 * step));
        }
    }
    out
}

/// Grid points with α < 1/2 where p(s) ≤ αs. Expected empty.
pub fn exponent_below_alpha_s(n: usize) -> Vec<(f64, f64)> {
    interpolation_grid(n)
        .into_iter()
        .filter(|&(alpha, s)| alpha < 0.5 && interpolation_exponent(alpha, s).is_ok_and(|p| p <= alpha * s))
        .collect()
}

/// Random nonnegative spectral measure with up to `max_atoms` atoms.
pub fn random_measure<R: Rng>(rng: &mut R, max_atoms: usize) -> SpectralData {
    let atoms = rng.random_range(1..=max_atoms);
    let mut rates = Vec::with_capacity(atoms);
    let mut vectors = Vec::with_capacity(atoms);
    for _ in 0..atoms {
        // Rates spread over several decades, including a zero mode now and then.
        let rate = if rng.random_bool(0.05) {
            0.0
        } else {
            10f64.powf(rng.random_range(-2.0..3.0))
        };
        let weight: f64 = rng.random_range(0.0..1.0);
        rates.push(rate);
        vectors.push(vec![weight.sqrt()]);
    }
    SpectralData::from_parts(1.0, rates, &vectors).expect("well-formed measure")
}

/// Interpolation inequality on `measures` random spectral measures, each over
/// an n×n (α, s) grid at a random t.
pub fn random_interpolation_trials(seed: u64, measures: usize, max_atoms: usize, n: usize) -> Result<CheckSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = interpolation_grid(n);
    let mut checked = 0;
    let mut violations = 0;
    let mut worst: Option<f64> = None;
    for _ in 0..measures {
        let sd = random_measure(&mut rng, max_atoms);
        let t = 10f64.powf(rng.random_range(-2.0..1.0));
        for &(alpha, s) in &grid {
            let c = check_interpolation(&sd, 0, t, alpha, s)?;
            checked += 1;
            if !c.holds {
                violations += 1;
            }
            worst = Some(worst.map_or(-c.slack, |w| w.max(-c.slack)));
        }
    }
    Ok(CheckSummary {
        name: "interpolation-random".into(),
        checked,
        violations,
        worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_sizes() {
        let (l, d) = gamma_lemma_grid();
        assert!(l.len() * d.len() >= 1800);
        assert!((l[0] - 0.05).abs() < 1e-15 && (l[18] - 0.95).abs() < 1e-15);
        assert!((d[0] - 1e-6).abs() < 1e-18 && (d[99] - 0.99).abs() < 1e-14);
        let (a, l, d) = about_lemma_grid();
        assert_eq!((a.len(), l.len(), d.len()), (9, 9, 12));
        assert_eq!(interpolation_grid(20).len(), 400);
    }

    #[test]
    fn no_exponent_below_alpha_s() {
        assert!(exponent_below_alpha_s(100).is_empty());
    }

    #[test]
    fn gamma_sweep_holds() {
        let sweep = sweep_gamma_lemma().unwrap();
        assert_eq!(sweep.violations(), 0);
        assert!(sweep.summary(false).worst.unwrap() < 0.0);
    }

    #[test]
    fn random_trials_are_reproducible() {
        let a = random_interpolation_trials(7, 5, 10, 5).unwrap();
        let b = random_interpolation_trials(7, 5, 10, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.checked, 125);
        assert!(a.passed());
    }
}
