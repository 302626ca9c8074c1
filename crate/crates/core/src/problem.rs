//! Operator and potential parameters, the regularized bracket ⟨x⟩ and the
//! time/space regime split.
//!
//! Positions are scalars: for `N > 1` callers pass |x|. Everything here is a
//! pure function of its arguments.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Potential V(x) added to (−Δ)^m.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Potential {
    /// V(x) = c₂·⟨x⟩^γ, the extremal member of the admissible family.
    Canonical,
    /// V(x) = x².
    Harmonic,
    /// V ≡ 0.
    Zero,
}

impl Potential {
    pub fn name(self) -> &'static str {
        match self {
            Potential::Canonical => "canonical",
            Potential::Harmonic => "harmonic",
            Potential::Zero => "zero",
        }
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Potential {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "canonical" => Ok(Potential::Canonical),
            "harmonic" => Ok(Potential::Harmonic),
            "zero" => Ok(Potential::Zero),
            other => Err(Error::param(
                "potential",
                format!("unknown potential `{other}` (expected canonical, harmonic or zero)"),
            )),
        }
    }
}

/// H = H₀ + V with H₀ of order 2m in N dimensions and V ≤ c₂⟨x⟩^γ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub dim: u32,
    pub m: u32,
    /// Ellipticity constant of H₀. Carried for the analytic side only; the
    /// grid lab uses (−Δ)^m for which c₁ = 1.
    pub c1: f64,
    pub c2: f64,
    pub gamma: f64,
    pub potential: Potential,
}

impl ProblemSpec {
    pub fn new(dim: u32, m: u32, c1: f64, c2: f64, gamma: f64, potential: Potential) -> Result<Self> {
        let spec = ProblemSpec {
            dim,
            m,
            c1,
            c2,
            gamma,
            potential,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// One-dimensional (N = 1) problem with the canonical potential and c₁ = c₂ = 1.
    pub fn canonical(m: u32, gamma: f64) -> Result<Self> {
        Self::new(1, m, 1.0, 1.0, gamma, Potential::Canonical)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::param("N", "dimension must be positive"));
        }
        if self.m == 0 {
            return Err(Error::param("m", "half-order must be positive"));
        }
        if 2 * self.m <= self.dim {
            return Err(Error::OrderTooLow {
                order: 2 * self.m,
                dim: self.dim,
            });
        }
        if !(self.c1 >= 1.0) || !self.c1.is_finite() {
            return Err(Error::param("c1", format!("must be finite and >= 1, got {}", self.c1)));
        }
        if !(self.c2 > 0.0) || !self.c2.is_finite() {
            return Err(Error::param("c2", format!("must be finite and > 0, got {}", self.c2)));
        }
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(Error::param("gamma", format!("must be finite and > 0, got {}", self.gamma)));
        }
        Ok(())
    }

    /// 2m/N − 1, positive for every valid spec.
    pub fn order_ratio(&self) -> f64 {
        2.0 * self.m as f64 / self.dim as f64 - 1.0
    }

    /// N/(2m), the small-time scaling exponent of the diagonal kernel.
    pub fn scaling_exponent(&self) -> f64 {
        self.dim as f64 / (2.0 * self.m as f64)
    }

    pub fn rho(&self) -> Result<f64> {
        rho(self.dim, self.m)
    }

    pub fn bracket(&self, x: f64) -> Result<f64> {
        Ok(bracket(x, self.rho()?))
    }

    /// V(x) for this spec's potential.
    pub fn potential_at(&self, x: f64) -> Result<f64> {
        Ok(match self.potential {
            Potential::Canonical => self.potential_bound(x)?,
            Potential::Harmonic => x * x,
            Potential::Zero => 0.0,
        })
    }

    /// c₂⟨x⟩^γ.
    pub fn potential_bound(&self, x: f64) -> Result<f64> {
        Ok(self.c2 * self.bracket(x)?.powf(self.gamma))
    }
}

/// ρ = max{1, (2m/N − 1)^{1/m}}.
pub fn rho(dim: u32, m: u32) -> Result<f64> {
    if dim == 0 || m == 0 {
        return Err(Error::param("N, m", "dimension and half-order must be positive"));
    }
    if 2 * m <= dim {
        return Err(Error::OrderTooLow { order: 2 * m, dim });
    }
    let ratio = 2.0 * m as f64 / dim as f64 - 1.0;
    Ok(ratio.powf(1.0 / m as f64).max(1.0))
}

/// ⟨x⟩ = sqrt(|x|² + ρ).
pub fn bracket(x: f64, rho: f64) -> f64 {
    (x * x + rho).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// ⟨x⟩^γ·t ≥ 1 (the boundary belongs here).
    Late,
    /// ⟨x⟩^γ·t < 1.
    Early,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Late => "Late",
            Regime::Early => "Early",
        })
    }
}

pub fn classify_regime(t: f64, x: f64, spec: &ProblemSpec) -> Result<Regime> {
    if !(t > 0.0) {
        return Err(Error::param("t", format!("time must be positive, got {t}")));
    }
    let product = spec.bracket(x)?.powf(spec.gamma) * t;
    Ok(if product >= 1.0 { Regime::Late } else { Regime::Early })
}

/// Parameters (σ, μ, λ) of the power-law envelope u(t,x) = σ⟨x⟩^{−μ}t^{−λ}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub sigma: f64,
    pub mu: f64,
    pub lambda: f64,
}

impl Hypothesis {
    pub fn new(sigma: f64, mu: f64, lambda: f64) -> Result<Self> {
        let hyp = Hypothesis { sigma, mu, lambda };
        hyp.validate()?;
        Ok(hyp)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(Error::param("sigma", format!("must be finite and > 0, got {}", self.sigma)));
        }
        if !(self.mu > 0.0) || !self.mu.is_finite() {
            return Err(Error::param("mu", format!("must be finite and > 0, got {}", self.mu)));
        }
        // The Gamma-function lemma needs λ strictly inside (0, 1).
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(Error::param("lambda", format!("must lie in (0, 1), got {}", self.lambda)));
        }
        Ok(())
    }
}
