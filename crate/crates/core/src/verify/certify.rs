use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bounds::{beta_for, certified_delta, optimal_alpha, u_reference};
use crate::error::{Error, Result};
use crate::lab::{
    assemble_operator, beta_resolution_floor, build_test_function, norm_sq, spectral_decompose, variational_green,
    DiscreteOperator, Grid1D, SpectralData,
};
use crate::problem::{classify_regime, Hypothesis, ProblemSpec, Regime};

use super::checks::envelope_history;

/// Slack allowed when comparing V* with the resolvent diagonal.
pub const DOMINATION_SLACK: f64 = 1e-10;

/// An assembled and decomposed operator on one grid.
#[derive(Debug, Clone)]
pub struct Lab {
    spec: ProblemSpec,
    rho: f64,
    operator: DiscreteOperator,
    spectral: SpectralData,
}

impl Lab {
    pub fn build(spec: &ProblemSpec, grid: &Grid1D) -> Result<Self> {
        let operator = assemble_operator(grid, spec)?;
        let spectral = spectral_decompose(&operator.matrix(), grid.spacing())?;
        Ok(Lab {
            spec: *spec,
            rho: spec.rho()?,
            operator,
            spectral,
        })
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn grid(&self) -> &Grid1D {
        self.operator.grid()
    }

    pub fn operator(&self) -> &DiscreteOperator {
        &self.operator
    }

    pub fn spectral(&self) -> &SpectralData {
        &self.spectral
    }

    pub fn kernel(&self, t: f64, node: usize) -> f64 {
        self.spectral.heat_kernel_diag(t, node)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tag {
    /// The test function would reach the box edge.
    Support,
    /// Too few nodes in the test function's transition band.
    Unresolved,
    /// V* could not be formed.
    DegenerateTestFunction,
    /// A numerical stage (assembly, decomposition, quadrature) failed.
    Numerical,
    /// No envelope hypothesis was available.
    NoEnvelope,
    /// The envelope is exceeded somewhere on the τ-grid of (0, t].
    EnvelopeHistory,
    /// The kernel moves by more than the boundary threshold when L doubles.
    BoundarySuspect,
}

impl Tag {
    pub fn name(self) -> &'static str {
        match self {
            Tag::Support => "support",
            Tag::Unresolved => "unresolved",
            Tag::DegenerateTestFunction => "degenerate-test-function",
            Tag::Numerical => "numerical",
            Tag::NoEnvelope => "no-envelope",
            Tag::EnvelopeHistory => "envelope-history",
            Tag::BoundarySuspect => "boundary-suspect",
        }
    }

    /// Tags that mean no certificate was produced.
    pub fn is_failure(self) -> bool {
        matches!(
            self,
            Tag::Support | Tag::Unresolved | Tag::DegenerateTestFunction | Tag::Numerical | Tag::NoEnvelope
        )
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One (t, x) row of the certification pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub t: f64,
    pub x: f64,
    pub node: usize,
    pub regime: Regime,
    pub beta: Option<f64>,
    pub beta_raw: Option<f64>,
    pub clamped: bool,
    pub alpha: Option<f64>,
    pub v_star: Option<f64>,
    pub greens: Option<f64>,
    pub u: Option<f64>,
    #[serde(rename = "C")]
    pub c_const: Option<f64>,
    pub exponent_arg: Option<f64>,
    pub delta_min: Option<f64>,
    pub k_lower: Option<f64>,
    pub k_numeric: Option<f64>,
    pub satisfied: bool,
    pub envelope_valid: bool,
    pub tags: Vec<Tag>,
}

impl BoundCertificate {
    /// A row for a point where no lab or envelope is available.
    pub fn failed(t: f64, x: f64, node: usize, spec: &ProblemSpec, tag: Tag) -> Self {
        let regime = classify_regime(t, x, spec).unwrap_or(Regime::Late);
        BoundCertificate {
            t,
            x,
            node,
            regime,
            beta: None,
            beta_raw: None,
            clamped: false,
            alpha: None,
            v_star: None,
            greens: None,
            u: None,
            c_const: None,
            exponent_arg: None,
            delta_min: None,
            k_lower: None,
            k_numeric: None,
            satisfied: false,
            envelope_valid: false,
            tags: vec![tag],
        }
    }

    pub fn has_failure(&self) -> bool {
        self.tags.iter().any(|t| t.is_failure())
    }

    pub fn has_tag(&self, tag: Tag) -> bool {
        self.tags.contains(&tag)
    }

    pub fn add_tag(&mut self, tag: Tag) {
        if !self.tags.contains(&tag) {
            self.tags.push(tag);
            self.tags.sort();
        }
    }

    /// The theorem's premise holds at this row (envelope valid at t) and a
    /// certificate was produced.
    pub fn is_checked(&self) -> bool {
        self.envelope_valid && !self.has_failure()
    }

    /// A produced certificate that the computed kernel contradicts.
    pub fn is_failed(&self) -> bool {
        self.has_failure() || (self.envelope_valid && !self.satisfied)
    }
}

/// α from a policy: `None` minimizes C(α, λ).
pub fn resolve_alpha(fixed: Option<f64>, lambda: f64) -> Result<f64> {
    match fixed {
        Some(a) if a > 0.0 && a < 0.5 => Ok(a),
        Some(a) => Err(Error::param("alpha", format!("must lie in (0, 1/2), got {a}"))),
        None => Ok(optimal_alpha(lambda)?.alpha),
    }
}

/// Runs the certification chain at (t, node): regime, β, bump, V*, δ_min.
pub fn certify_point(lab: &Lab, hyp: &Hypothesis, alpha: f64, t: f64, node: usize) -> BoundCertificate {
    let grid = lab.grid();
    let spec = lab.spec();
    let x = grid.node(node);
    let rho = lab.rho();
    let mut row = BoundCertificate::failed(t, x, node, spec, Tag::Numerical);
    row.tags.clear();

    let regime = match classify_regime(t, x, spec) {
        Ok(r) => r,
        Err(_) => {
            row.add_tag(Tag::Numerical);
            return row;
        }
    };
    row.regime = regime;
    let k_numeric = lab.kernel(t, node);
    let u = u_reference(t, x, hyp, rho);
    let greens = lab.spectral().greens_diag(t, node);
    row.k_numeric = Some(k_numeric);
    row.u = Some(u);
    row.greens = Some(greens);
    row.alpha = Some(alpha);
    row.envelope_valid = k_numeric <= u;
    if !envelope_history(lab.spectral(), node, x, t, hyp, rho).valid() {
        row.add_tag(Tag::EnvelopeHistory);
    }

    let mut beta = match beta_for(regime, t, x, spec) {
        Ok(b) => b,
        Err(_) => {
            row.add_tag(Tag::Numerical);
            return row;
        }
    };
    if let Some(floor) = beta_resolution_floor(x, grid, rho) {
        beta = beta.with_floor(floor);
    }
    row.beta = Some(beta.value);
    row.beta_raw = Some(beta.raw);
    row.clamped = beta.clamped;

    let g = match build_test_function(node, beta.value, grid, rho) {
        Ok(g) => g,
        Err(Error::SupportLeak { .. }) => {
            row.add_tag(Tag::Support);
            return row;
        }
        Err(Error::Unresolved { .. }) => {
            row.add_tag(Tag::Unresolved);
            return row;
        }
        Err(_) => {
            row.add_tag(Tag::Numerical);
            return row;
        }
    };
    let q = lab.operator().quadratic_form(&g.values).total();
    let v_star = match variational_green(t, g.value_at_center, q, norm_sq(&g.values, grid.spacing())) {
        Ok(v) if v > 0.0 => v,
        _ => {
            row.add_tag(Tag::DegenerateTestFunction);
            return row;
        }
    };
    row.v_star = Some(v_star);
    match certified_delta(v_star, u, alpha, hyp.lambda) {
        Ok(cd) => {
            let k_lower = u * cd.delta_min;
            row.c_const = Some(cd.constant);
            row.exponent_arg = Some(cd.exponent_arg);
            row.delta_min = Some(cd.delta_min);
            row.k_lower = Some(k_lower);
            row.satisfied = k_lower <= k_numeric;
        }
        Err(Error::DegenerateTestFunction) => row.add_tag(Tag::DegenerateTestFunction),
        Err(_) => row.add_tag(Tag::Numerical),
    }
    row
}
