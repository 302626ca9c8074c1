use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{bracket, Hypothesis};

/// A kernel sample k(t, x, x).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeSample {
    pub t: f64,
    pub x: f64,
    pub k: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Upper clip for λ.
    pub lambda_max: f64,
    /// Lower clip for λ.
    pub lambda_min: f64,
    /// Lower clip for μ.
    pub mu_min: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            lambda_max: 1.0 - 1e-6,
            lambda_min: 1e-6,
            mu_min: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeFit {
    pub hypothesis: Hypothesis,
    /// Unconstrained least-squares estimates (σ before inflation).
    pub ls_sigma: f64,
    pub ls_mu: f64,
    pub ls_lambda: f64,
    pub lambda_clipped: bool,
    pub mu_clipped: bool,
    /// Factor applied to σ so the envelope majorizes every sample.
    pub inflation: f64,
    pub samples: usize,
}

/// Least squares via modified Gram–Schmidt. `None` when the design is
/// numerically rank deficient.
fn least_squares(columns: &[Vec<f64>], y: &[f64]) -> Option<Vec<f64>> {
    let k = columns.len();
    let mut q: Vec<Vec<f64>> = columns.to_vec();
    let mut r = vec![vec![0.0; k]; k];
    for j in 0..k {
        let original = q[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        for i in 0..j {
            let dot: f64 = q[i].iter().zip(&q[j]).map(|(a, b)| a * b).sum();
            r[i][j] = dot;
            let qi = q[i].clone();
            for (v, a) in q[j].iter_mut().zip(&qi) {
                *v -= dot * a;
            }
        }
        let norm = q[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 1e-10 * original.max(f64::MIN_POSITIVE)) {
            return None;
        }
        r[j][j] = norm;
        for v in q[j].iter_mut() {
            *v /= norm;
        }
    }
    let qty: Vec<f64> = q.iter().map(|col| col.iter().zip(y).map(|(a, b)| a * b).sum()).collect();
    let mut coef = vec![0.0; k];
    for j in (0..k).rev() {
        let tail: f64 = ((j + 1)..k).map(|i| r[j][i] * coef[i]).sum();
        coef[j] = (qty[j] - tail) / r[j][j];
    }
    Some(coef)
}

/// Fits ln k ≈ ln σ − μ ln⟨x⟩ − λ ln t, holding clipped exponents fixed, then
/// raises σ until σ⟨x⟩^{−μ}t^{−λ} ≥ k on every sample.
pub fn fit_envelope(samples: &[EnvelopeSample], rho: f64, opts: &FitOptions) -> Result<EnvelopeFit> {
    if samples.len() < 10 {
        return Err(Error::DegenerateSamples(format!("need at least 10 samples, got {}", samples.len())));
    }
    if let Some(s) = samples.iter().find(|s| !(s.k > 0.0 && s.k.is_finite() && s.t > 0.0)) {
        return Err(Error::DegenerateSamples(format!(
            "samples need t > 0 and finite k > 0, got t = {}, k = {}",
            s.t, s.k
        )));
    }
    let log_b: Vec<f64> = samples.iter().map(|s| bracket(s.x, rho).ln()).collect();
    let log_t: Vec<f64> = samples.iter().map(|s| s.t.ln()).collect();
    let log_k: Vec<f64> = samples.iter().map(|s| s.k.ln()).collect();

    let ones = vec![1.0; samples.len()];
    let neg_b: Vec<f64> = log_b.iter().map(|v| -v).collect();
    let neg_t: Vec<f64> = log_t.iter().map(|v| -v).collect();

    let rank_err = || Error::DegenerateSamples("rank-deficient design (need distinct ⟨x⟩ and t values)".into());
    let full = least_squares(&[ones.clone(), neg_b.clone(), neg_t.clone()], &log_k).ok_or_else(rank_err)?;
    let (ls_log_sigma, ls_mu, ls_lambda) = (full[0], full[1], full[2]);

    let mut mu: Option<f64> = None;
    let mut lambda: Option<f64> = None;
    let mut estimate = (ls_log_sigma, ls_mu, ls_lambda);
    // At most one pass per clipped parameter plus a final fit.
    for _ in 0..3 {
        let (_, m_hat, l_hat) = estimate;
        let mut changed = false;
        if lambda.is_none() && !(opts.lambda_min..=opts.lambda_max).contains(&l_hat) {
            lambda = Some(l_hat.clamp(opts.lambda_min, opts.lambda_max));
            changed = true;
        }
        if mu.is_none() && m_hat < opts.mu_min {
            mu = Some(opts.mu_min);
            changed = true;
        }
        if !changed {
            break;
        }
        let mut columns = vec![ones.clone()];
        if mu.is_none() {
            columns.push(neg_b.clone());
        }
        if lambda.is_none() {
            columns.push(neg_t.clone());
        }
        let target: Vec<f64> = (0..samples.len())
            .map(|i| log_k[i] + mu.unwrap_or(0.0) * log_b[i] + lambda.unwrap_or(0.0) * log_t[i])
            .collect();
        let coef = least_squares(&columns, &target).ok_or_else(rank_err)?;
        let mut it = coef.into_iter();
        let log_sigma = it.next().expect("intercept");
        let m_new = mu.unwrap_or_else(|| it.next().expect("mu column"));
        let l_new = lambda.unwrap_or_else(|| it.next().expect("lambda column"));
        estimate = (log_sigma, m_new, l_new);
    }
    let (log_sigma, mu_fit, lambda_fit) = estimate;

    let max_residual = (0..samples.len())
        .map(|i| log_k[i] - (log_sigma - mu_fit * log_b[i] - lambda_fit * log_t[i]))
        .fold(f64::NEG_INFINITY, f64::max);
    let mut sigma = (log_sigma + max_residual).exp();
    // Round-off in exp/powf can leave a sample a few ulps above the envelope.
    for _ in 0..64 {
        let below = samples
            .iter()
            .any(|s| sigma * bracket(s.x, rho).powf(-mu_fit) * s.t.powf(-lambda_fit) < s.k);
        if !below {
            break;
        }
        sigma *= 1.0 + 4.0 * f64::EPSILON;
    }
    let hypothesis = Hypothesis::new(sigma, mu_fit, lambda_fit)?;
    Ok(EnvelopeFit {
        hypothesis,
        ls_sigma: ls_log_sigma.exp(),
        ls_mu,
        ls_lambda,
        lambda_clipped: lambda.is_some(),
        mu_clipped: mu.is_some(),
        inflation: sigma / log_sigma.exp(),
        samples: samples.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(noise: impl Fn(usize) -> f64) -> Vec<EnvelopeSample> {
        let mut out = Vec::new();
        let mut i = 0;
        for tj in 0..8 {
            let t = 0.05 * 2f64.powi(tj);
            for x in [0.0, 1.0, 3.0, 10.0] {
                let b = bracket(x, 1.0);
                out.push(EnvelopeSample {
                    t,
                    x,
                    k: 2.0 / b / t.sqrt() * noise(i),
                });
                i += 1;
            }
        }
        out
    }

    #[test]
    fn exact_power_law() {
        let fit = fit_envelope(&synthetic(|_| 1.0), 1.0, &FitOptions::default()).unwrap();
        let h = fit.hypothesis;
        assert!((h.sigma - 2.0).abs() < 1e-10);
        assert!((h.mu - 1.0).abs() < 1e-10);
        assert!((h.lambda - 0.5).abs() < 1e-10);
        assert!(!fit.lambda_clipped && !fit.mu_clipped);
    }

    #[test]
    fn noisy_data_is_majorized() {
        // Checkerboard over the (t, x) design: orthogonal to both regressors.
        let noise = |i: usize| if (i / 4 + i % 4) % 2 == 0 { 1.1 } else { 1.0 };
        let samples = synthetic(noise);
        let fit = fit_envelope(&samples, 1.0, &FitOptions::default()).unwrap();
        let h = fit.hypothesis;
        for s in &samples {
            assert!(h.sigma * bracket(s.x, 1.0).powf(-h.mu) * s.t.powf(-h.lambda) >= s.k);
        }
        assert!(h.sigma >= 2.0 * 0.999 && h.sigma <= 2.2 * 1.001, "sigma = {}", h.sigma);
    }

    #[test]
    fn steep_decay_is_clipped() {
        // λ = 1.5 data with a cap at 0.25.
        let samples: Vec<EnvelopeSample> = synthetic(|_| 1.0)
            .into_iter()
            .map(|s| EnvelopeSample { k: s.k / s.t, ..s })
            .collect();
        let opts = FitOptions {
            lambda_max: 0.25,
            ..FitOptions::default()
        };
        let fit = fit_envelope(&samples, 1.0, &opts).unwrap();
        assert!(fit.lambda_clipped);
        assert_eq!(fit.hypothesis.lambda, 0.25);
        assert!((fit.ls_lambda - 1.5).abs() < 1e-10);
        let h = fit.hypothesis;
        for s in &samples {
            assert!(h.sigma * bracket(s.x, 1.0).powf(-h.mu) * s.t.powf(-h.lambda) >= s.k);
        }
    }

    #[test]
    fn growing_in_x_clips_mu() {
        let samples: Vec<EnvelopeSample> = synthetic(|_| 1.0)
            .into_iter()
            .map(|s| EnvelopeSample {
                k: s.k * bracket(s.x, 1.0).powi(2),
                ..s
            })
            .collect();
        let fit = fit_envelope(&samples, 1.0, &FitOptions::default()).unwrap();
        assert!(fit.mu_clipped);
        assert_eq!(fit.hypothesis.mu, 1e-9);
        assert!((fit.hypothesis.lambda - 0.5).abs() < 1e-10);
    }

    #[test]
    fn rejects_degenerate_designs() {
        let few = &synthetic(|_| 1.0)[..5];
        assert!(fit_envelope(few, 1.0, &FitOptions::default()).is_err());
        let same_x: Vec<EnvelopeSample> = synthetic(|_| 1.0).into_iter().filter(|s| s.x == 1.0).collect();
        let mut padded = same_x.clone();
        padded.extend(same_x);
        assert!(matches!(
            fit_envelope(&padded, 1.0, &FitOptions::default()),
            Err(Error::DegenerateSamples(_))
        ));
        let one_time: Vec<EnvelopeSample> = (0..12)
            .map(|i| EnvelopeSample { t: 0.5, x: i as f64, k: 1.0 / (1.0 + i as f64) })
            .collect();
        assert!(fit_envelope(&one_time, 1.0, &FitOptions::default()).is_err());
        // A narrow but non-degenerate time window is accepted.
        let short: Vec<EnvelopeSample> = synthetic(|_| 1.0).into_iter().filter(|s| s.t < 0.3).collect();
        let fit = fit_envelope(&short, 1.0, &FitOptions::default()).unwrap();
        assert!((fit.hypothesis.lambda - 0.5).abs() < 1e-10);
    }
}
