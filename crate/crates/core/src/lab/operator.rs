use faer::Mat;
use serde::{Deserialize, Serialize};

use super::grid::Grid1D;
use crate::error::{Error, Result};
use crate::problem::ProblemSpec;

/// Discrete H = D^m + diag(V) on a Dirichlet box, D the second-difference
/// matrix scaled by h⁻².
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    grid: Grid1D,
    m: u32,
    potential: Vec<f64>,
}

/// (Dg)ᵢ = (2gᵢ − gᵢ₋₁ − gᵢ₊₁)/h² with zero extension past both ends.
fn second_difference(g: &[f64], h: f64, out: &mut [f64]) {
    let n = g.len();
    let inv_h2 = 1.0 / (h * h);
    for i in 0..n {
        let left = if i > 0 { g[i - 1] } else { 0.0 };
        let right = if i + 1 < n { g[i + 1] } else { 0.0 };
        out[i] = (2.0 * g[i] - left - right) * inv_h2;
    }
}

/// D^m g.
pub fn apply_kinetic(g: &[f64], h: f64, m: u32) -> Vec<f64> {
    let mut cur = g.to_vec();
    let mut next = vec![0.0; g.len()];
    for _ in 0..m {
        second_difference(&cur, h, &mut next);
        std::mem::swap(&mut cur, &mut next);
    }
    cur
}

/// Dense D^m on `n` nodes with spacing `h`.
pub fn kinetic_matrix(n: usize, h: f64, m: u32) -> Mat<f64> {
    let mut mat = Mat::<f64>::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        let col = apply_kinetic(&e, h, m);
        e[j] = 0.0;
        // D^m is banded with half-bandwidth m.
        let lo = j.saturating_sub(m as usize);
        let hi = (j + m as usize).min(n - 1);
        for i in lo..=hi {
            mat[(i, j)] = col[i];
        }
    }
    mat
}

/// Discrete energy split: Q(g) = q0 + qv.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticForm {
    /// h·⟨D^m g, g⟩
    pub q0: f64,
    /// h·Σ V(xᵢ) gᵢ²
    pub qv: f64,
}

impl QuadraticForm {
    pub fn total(&self) -> f64 {
        self.q0 + self.qv
    }
}

/// Builds H for a one-dimensional spec on `grid`, checking V ≤ c₂⟨x⟩^γ at
/// every node.
pub fn assemble_operator(grid: &Grid1D, spec: &ProblemSpec) -> Result<DiscreteOperator> {
    spec.validate()?;
    if spec.dim != 1 {
        return Err(Error::param("N", format!("the grid lab is one-dimensional, got N = {}", spec.dim)));
    }
    let mut potential = Vec::with_capacity(grid.len());
    for &x in grid.nodes() {
        let value = spec.potential_at(x)?;
        let bound = spec.potential_bound(x)?;
        if value > bound * (1.0 + 1e-12) {
            return Err(Error::PotentialBound { x, value, bound });
        }
        potential.push(value);
    }
    Ok(DiscreteOperator {
        grid: grid.clone(),
        m: spec.m,
        potential,
    })
}

impl DiscreteOperator {
    /// An operator with an arbitrary nonnegative potential, bypassing the
    /// growth-bound check (used for synthetic operators in tests).
    pub fn with_potential(grid: &Grid1D, m: u32, potential: Vec<f64>) -> Result<Self> {
        if potential.len() != grid.len() {
            return Err(Error::param("potential", "length must match the grid"));
        }
        if m == 0 {
            return Err(Error::param("m", "half-order must be positive"));
        }
        Ok(DiscreteOperator {
            grid: grid.clone(),
            m,
            potential,
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn matrix(&self) -> Mat<f64> {
        let mut mat = kinetic_matrix(self.grid.len(), self.grid.spacing(), self.m);
        for (i, &v) in self.potential.iter().enumerate() {
            mat[(i, i)] += v;
        }
        mat
    }

    pub fn apply_kinetic(&self, g: &[f64]) -> Vec<f64> {
        apply_kinetic(g, self.grid.spacing(), self.m)
    }

    /// H g.
    pub fn apply(&self, g: &[f64]) -> Vec<f64> {
        let mut out = self.apply_kinetic(g);
        for ((o, &v), &gi) in out.iter_mut().zip(&self.potential).zip(g) {
            *o += v * gi;
        }
        out
    }

    pub fn quadratic_form(&self, g: &[f64]) -> QuadraticForm {
        let h = self.grid.spacing();
        let dg = self.apply_kinetic(g);
        let q0 = h * dg.iter().zip(g).map(|(a, b)| a * b).sum::<f64>();
        let qv = h * self.potential.iter().zip(g).map(|(v, gi)| v * gi * gi).sum::<f64>();
        QuadraticForm { q0, qv }
    }
}

/// h·Σ gᵢ².
pub fn norm_sq(g: &[f64], h: f64) -> f64 {
    h * g.iter().map(|v| v * v).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{Potential, ProblemSpec};

    #[test]
    fn laplacian_stencil() {
        let d = kinetic_matrix(3, 1.0, 1);
        let expect = [[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(d[(i, j)], expect[i][j]);
            }
        }
    }

    #[test]
    fn bilaplacian_stencil() {
        // Squaring (−1, 2, −1) gives (1, −4, 6, −4, 1) in the interior.
        let h = 0.5;
        let d2 = kinetic_matrix(9, h, 2);
        let s = h.powi(-4);
        let row = [1.0, -4.0, 6.0, -4.0, 1.0];
        for (k, &w) in row.iter().enumerate() {
            assert!((d2[(4, 2 + k)] - w * s).abs() < 1e-12);
        }
        assert_eq!(d2[(4, 0)], 0.0);
        // First row loses the ghost contribution: 4 + 1 = 5.
        assert!((d2[(0, 0)] - 5.0 * s).abs() < 1e-12);
        for i in 0..9 {
            for j in 0..9 {
                assert_eq!(d2[(i, j)], d2[(j, i)]);
            }
        }
    }

    #[test]
    fn harmonic_potential_on_diagonal() {
        // x = 2 is a node of the 17-node grid on [-4, 4] (h = 0.5).
        let grid = Grid1D::new(4.0, 17).unwrap();
        let spec = ProblemSpec::new(1, 1, 1.0, 1.0, 2.0, Potential::Harmonic).unwrap();
        let op = assemble_operator(&grid, &spec).unwrap();
        let mat = op.matrix();
        let i = grid.nearest_node(2.0);
        assert_eq!(grid.node(i), 2.0);
        let h = grid.spacing();
        assert!((mat[(i, i)] - (2.0 / (h * h) + 4.0)).abs() < 1e-12);
    }

    #[test]
    fn rejects_potential_above_bound() {
        // x² ≤ c₂(x² + 1)^{γ/2} fails for small γ at large |x|.
        let grid = Grid1D::new(10.0, 33).unwrap();
        let spec = ProblemSpec::new(1, 1, 1.0, 1.0, 1.0, Potential::Harmonic).unwrap();
        assert!(matches!(assemble_operator(&grid, &spec), Err(Error::PotentialBound { .. })));
        let wide = ProblemSpec::new(2, 2, 1.0, 1.0, 2.0, Potential::Canonical).unwrap();
        assert!(assemble_operator(&grid, &wide).is_err());
    }

    #[test]
    fn basis_vector_energy() {
        let grid = Grid1D::new(1.0, 21).unwrap();
        let spec = ProblemSpec::new(1, 1, 1.0, 1.0, 2.0, Potential::Zero).unwrap();
        let op = assemble_operator(&grid, &spec).unwrap();
        let mut e = vec![0.0; grid.len()];
        e[10] = 1.0;
        let q = op.quadratic_form(&e);
        let h = grid.spacing();
        assert!((q.q0 - 2.0 / h).abs() < 1e-10);
        assert_eq!(q.qv, 0.0);
    }

    #[test]
    fn matrix_matches_apply() {
        let grid = Grid1D::new(3.0, 24).unwrap();
        let spec = ProblemSpec::canonical(2, 1.5).unwrap();
        let op = assemble_operator(&grid, &spec).unwrap();
        let mat = op.matrix();
        let g: Vec<f64> = (0..grid.len()).map(|i| ((i * 7) % 5) as f64 - 2.0).collect();
        let hg = op.apply(&g);
        for i in 0..grid.len() {
            let dense: f64 = (0..grid.len()).map(|j| mat[(i, j)] * g[j]).sum();
            assert!((dense - hg[i]).abs() < 1e-9 * dense.abs().max(1.0));
        }
    }
}
