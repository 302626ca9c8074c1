use serde::{Deserialize, Serialize};

use super::grid::Grid1D;
use crate::error::{Error, Result};
use crate::problem::bracket;

/// Minimum number of nodes on each side of the bump's transition band.
pub const MIN_TRANSITION_NODES: usize = 8;

fn glue(tau: f64) -> f64 {
    if tau > 0.0 {
        (-1.0 / tau).exp()
    } else {
        0.0
    }
}

/// Smooth step: 0 for τ ≤ 0, 1 for τ ≥ 1.
fn smooth_step(tau: f64) -> f64 {
    let a = glue(tau);
    let b = glue(1.0 - tau);
    a / (a + b)
}

/// Even C^∞ cutoff, 1 on [−1, 1] and 0 outside (−2, 2).
pub fn bump_psi(s: f64) -> f64 {
    let r = s.abs();
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        1.0 - smooth_step(r - 1.0)
    }
}

/// g_x(y) = ψ((x − y)/⟨x⟩^β) sampled on the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub center: f64,
    pub center_index: usize,
    pub beta: f64,
    /// Plateau radius ⟨x⟩^β.
    pub width: f64,
    pub values: Vec<f64>,
    pub value_at_center: f64,
}

/// Bump centred on node `center_index`. Fails if the support reaches the box
/// edge or if the transition band is too coarsely sampled.
pub fn build_test_function(center_index: usize, beta: f64, grid: &Grid1D, rho: f64) -> Result<TestFunction> {
    if center_index >= grid.len() {
        return Err(Error::param("node", format!("index {center_index} outside a {}-node grid", grid.len())));
    }
    if !(beta < 1.0) || !beta.is_finite() {
        return Err(Error::param("beta", format!("must be finite and below 1, got {beta}")));
    }
    let x = grid.node(center_index);
    let width = bracket(x, rho).powf(beta);
    let (lo, hi) = (x - 2.0 * width, x + 2.0 * width);
    let l = grid.half_width();
    // The outermost nodes carry the Dirichlet condition, so the support must
    // stay strictly inside them.
    if lo <= -l || hi >= l {
        return Err(Error::SupportLeak { lo, hi, half_width: l });
    }
    let band = grid
        .nodes()
        .iter()
        .filter(|&&y| {
            let d = y - x;
            d > width && d < 2.0 * width
        })
        .count();
    if band < MIN_TRANSITION_NODES {
        return Err(Error::Unresolved {
            nodes: band,
            required: MIN_TRANSITION_NODES,
        });
    }
    let values: Vec<f64> = grid.nodes().iter().map(|&y| bump_psi((x - y) / width)).collect();
    let value_at_center = values[center_index];
    Ok(TestFunction {
        center: x,
        center_index,
        beta,
        width,
        values,
        value_at_center,
    })
}

/// Smallest β for which a bump at `x` is resolved on `grid`: the transition
/// band must span at least `MIN_TRANSITION_NODES` spacings.
pub fn beta_resolution_floor(x: f64, grid: &Grid1D, rho: f64) -> Option<f64> {
    let log_b = bracket(x, rho).ln();
    if log_b == 0.0 {
        return None;
    }
    let needed = (MIN_TRANSITION_NODES + 1) as f64 * grid.spacing();
    Some(needed.ln() / log_b)
}

/// V* = g(x)²/(t·Q(g) + ‖g‖²), a lower bound for G_t(x, x).
pub fn variational_green(t: f64, center_value: f64, q: f64, norm_sq: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::param("t", format!("time must be non-negative, got {t}")));
    }
    if center_value == 0.0 || !(norm_sq > 0.0) {
        return Err(Error::DegenerateTestFunction);
    }
    Ok(center_value * center_value / (t * q + norm_sq))
}
