use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_NODES: usize = 16;
/// Dense decomposition is O(n³); larger grids are refused.
pub const MAX_NODES: usize = 4096;

/// Uniform nodes −L = x₀ < … < x_{n−1} = L with Dirichlet truncation outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    half_width: f64,
    h: f64,
    nodes: Vec<f64>,
}

impl Grid1D {
    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::param("L", format!("half-width must be positive, got {half_width}")));
        }
        if n < MIN_NODES {
            return Err(Error::param("n", format!("need at least {MIN_NODES} nodes, got {n}")));
        }
        if n > MAX_NODES {
            return Err(Error::param("n", format!("at most {MAX_NODES} nodes, got {n}")));
        }
        let h = 2.0 * half_width / (n - 1) as f64;
        // Fill symmetrically so that nodes[i] == -nodes[n-1-i] exactly.
        let mut nodes = vec![0.0; n];
        for i in 0..n {
            let j = n - 1 - i;
            if i > j {
                break;
            }
            let x = -half_width + i as f64 * h;
            let x = if i == j { 0.0 } else { x };
            nodes[i] = x;
            nodes[j] = -x;
        }
        Ok(Grid1D { half_width, h, nodes })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> f64 {
        self.nodes[i]
    }

    /// Index of the node closest to `x` (ties go to the lower index).
    pub fn nearest_node(&self, x: f64) -> usize {
        let pos = ((x + self.half_width) / self.h).round();
        let i = pos.clamp(0.0, (self.len() - 1) as f64) as usize;
        // Rounding of the affine map can be off by one at exact midpoints.
        let mut best = i;
        for j in i.saturating_sub(1)..=(i + 1).min(self.len() - 1) {
            if (self.nodes[j] - x).abs() < (self.nodes[best] - x).abs() {
                best = j;
            }
        }
        best
    }

    /// A box roughly twice as wide with the same spacing and the same nodes
    /// in its interior, plus the index offset mapping old nodes into it.
    /// `None` if the enlarged grid would exceed [`MAX_NODES`].
    pub fn doubled(&self) -> Option<(Grid1D, usize)> {
        let pad = (self.len() - 1).div_ceil(2);
        let n = self.len() + 2 * pad;
        if n > MAX_NODES {
            return None;
        }
        let half_width = self.half_width + pad as f64 * self.h;
        let grid = Grid1D::new(half_width, n).ok()?;
        Some((grid, pad))
    }
}
