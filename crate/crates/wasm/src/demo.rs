//! Browser-sized computations. Everything here is plain Rust so it can be
//! tested natively; `lib.rs` only serializes.

use serde::Serialize;

use heatbound::bounds::{about_lhs, about_rhs, gamma_lemma_pair, interpolation_exponent};
use heatbound::lab::{build_test_function, norm_sq, variational_green, Grid1D};
use heatbound::verify::campaign::closed_form_kernel;
use heatbound::verify::{certify_point, fit_envelope, resolve_alpha, EnvelopeSample, FitOptions, Lab};
use heatbound::{Hypothesis, Potential, ProblemSpec};

/// Dense eigendecomposition is cubic; keep the page responsive.
pub const MAX_DEMO_NODES: usize = 400;
pub const MAX_CURVE_POINTS: usize = 200;

const FIT_POSITIONS: [f64; 5] = [-2.0, -1.0, 0.0, 1.0, 2.0];

pub type DemoResult<T> = Result<T, String>;

#[derive(Debug, Clone, Copy)]
pub struct Problem {
    pub m: u32,
    pub potential: Potential,
    pub gamma: f64,
    pub half_width: f64,
    pub nodes: usize,
}

impl Problem {
    pub fn new(m: u32, potential: &str, gamma: f64, half_width: f64, nodes: usize) -> DemoResult<Self> {
        if nodes > MAX_DEMO_NODES {
            return Err(format!("at most {MAX_DEMO_NODES} nodes in the browser, got {nodes}"));
        }
        let potential = potential.parse::<Potential>().map_err(|e| e.to_string())?;
        Ok(Problem { m, potential, gamma, half_width, nodes })
    }

    fn spec(&self) -> DemoResult<ProblemSpec> {
        ProblemSpec::new(1, self.m, 1.0, 1.0, self.gamma, self.potential).map_err(|e| e.to_string())
    }

    fn grid(&self) -> DemoResult<Grid1D> {
        Grid1D::new(self.half_width, self.nodes).map_err(|e| e.to_string())
    }
}

fn log_space(lo: f64, hi: f64, count: usize) -> DemoResult<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(format!("need 0 < lo < hi, got [{lo}, {hi}]"));
    }
    if !(2..=MAX_CURVE_POINTS).contains(&count) {
        return Err(format!("point count must lie in 2..={MAX_CURVE_POINTS}, got {count}"));
    }
    let step = (hi / lo).ln() / (count - 1) as f64;
    Ok((0..count).map(|i| lo * (step * i as f64).exp()).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelCurves {
    /// Node position actually evaluated.
    pub x: f64,
    pub t: Vec<f64>,
    pub k_numeric: Vec<f64>,
    pub k_lower: Vec<Option<f64>>,
    pub u: Vec<Option<f64>>,
    pub reference: Option<Vec<f64>>,
    pub tags: Vec<Vec<&'static str>>,
    pub hypothesis: Hypothesis,
    pub alpha: f64,
}

/// Numeric diagonal, fitted envelope and certified lower bound at one
/// position over a log-spaced time window.
pub fn kernel_curves(problem: &Problem, x: f64, t_min: f64, t_max: f64, count: usize) -> DemoResult<KernelCurves> {
    let spec = problem.spec()?;
    let grid = problem.grid()?;
    if x.abs() >= grid.half_width() {
        return Err(format!("x = {x} lies outside the box"));
    }
    let times = log_space(t_min, t_max, count)?;
    let lab = Lab::build(&spec, &grid).map_err(|e| e.to_string())?;
    let node = grid.nearest_node(x);

    let mut fit_nodes: Vec<usize> = FIT_POSITIONS
        .iter()
        .filter(|p| p.abs() <= grid.half_width() / 2.0)
        .map(|&p| grid.nearest_node(p))
        .collect();
    fit_nodes.push(node);
    fit_nodes.sort_unstable();
    fit_nodes.dedup();
    let samples: Vec<EnvelopeSample> = times
        .iter()
        .flat_map(|&t| fit_nodes.iter().map(move |&i| (t, i)))
        .map(|(t, i)| EnvelopeSample { t, x: grid.node(i), k: lab.kernel(t, i) })
        .collect();
    let opts = FitOptions { lambda_max: (0.5 / problem.m as f64).min(1.0 - 1e-6), ..FitOptions::default() };
    let hypothesis = fit_envelope(&samples, lab.rho(), &opts).map_err(|e| e.to_string())?.hypothesis;
    let alpha = resolve_alpha(None, hypothesis.lambda).map_err(|e| e.to_string())?;

    let xn = grid.node(node);
    let rows: Vec<_> = times.iter().map(|&t| certify_point(&lab, &hypothesis, alpha, t, node)).collect();
    let reference = times
        .iter()
        .map(|&t| closed_form_kernel(&spec, t, xn).map(|(_, k, _)| k))
        .collect::<Option<Vec<f64>>>();
    Ok(KernelCurves {
        x: xn,
        k_numeric: times.iter().map(|&t| lab.kernel(t, node)).collect(),
        k_lower: rows.iter().map(|r| r.k_lower).collect(),
        u: rows.iter().map(|r| r.u).collect(),
        tags: rows.iter().map(|r| r.tags.iter().map(|t| t.name()).collect()).collect(),
        t: times,
        reference,
        hypothesis,
        alpha,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BumpProfile {
    pub center: f64,
    pub width: f64,
    pub y: Vec<f64>,
    pub g: Vec<f64>,
    pub t: Vec<f64>,
    /// V*(t) = g(x)²/(tQ(g) + ‖g‖²) for this bump.
    pub v_star: Vec<f64>,
}

/// Test function centred near `x` with plateau ⟨x⟩^β, and its variational
/// Green's estimate over time. Needs no eigensolve.
pub fn bump_profile(problem: &Problem, x: f64, beta: f64, t_min: f64, t_max: f64, count: usize) -> DemoResult<BumpProfile> {
    let spec = problem.spec()?;
    let grid = problem.grid()?;
    let rho = spec.rho().map_err(|e| e.to_string())?;
    let tf = build_test_function(grid.nearest_node(x), beta, &grid, rho).map_err(|e| e.to_string())?;
    let op = heatbound::lab::assemble_operator(&grid, &spec).map_err(|e| e.to_string())?;
    let q = op.quadratic_form(&tf.values).total();
    let n2 = norm_sq(&tf.values, grid.spacing());
    let t = log_space(t_min, t_max, count)?;
    let v_star = t
        .iter()
        .map(|&s| variational_green(s, tf.value_at_center, q, n2))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    Ok(BumpProfile { center: tf.center, width: tf.width, y: grid.nodes().to_vec(), g: tf.values, t, v_star })
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaCurves {
    pub delta: Vec<f64>,
    pub integral_lhs: Vec<f64>,
    pub integral_rhs: Vec<f64>,
    pub gamma_lhs: Vec<f64>,
    pub gamma_rhs: Vec<f64>,
    /// p(s) = s(1−α)/(1−αs) on a uniform s grid.
    pub s: Vec<f64>,
    pub p: Vec<f64>,
}

/// Both scalar lemmas as functions of δ for one (α, λ).
pub fn lemma_curves(alpha: f64, lambda: f64, count: usize) -> DemoResult<LemmaCurves> {
    let delta = log_space(1e-12, 0.95, count)?;
    let mut out = LemmaCurves {
        delta: Vec::with_capacity(count),
        integral_lhs: Vec::with_capacity(count),
        integral_rhs: Vec::with_capacity(count),
        gamma_lhs: Vec::with_capacity(count),
        gamma_rhs: Vec::with_capacity(count),
        s: Vec::with_capacity(count),
        p: Vec::with_capacity(count),
    };
    for (i, d) in delta.into_iter().enumerate() {
        let pair = gamma_lemma_pair(lambda, d).map_err(|e| e.to_string())?;
        out.integral_lhs.push(about_lhs(alpha, lambda, d).map_err(|e| e.to_string())?);
        out.integral_rhs.push(about_rhs(alpha, lambda, d).map_err(|e| e.to_string())?);
        out.gamma_lhs.push(pair.lhs);
        out.gamma_rhs.push(pair.rhs);
        out.delta.push(d);
        let s = (i + 1) as f64 / count as f64;
        out.p.push(interpolation_exponent(alpha, s).map_err(|e| e.to_string())?);
        out.s.push(s);
    }
    Ok(out)
}
