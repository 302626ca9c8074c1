use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd;
use faer::{diag::Diag, Mat, Par};

use crate::error::{Error, Result};

/// Eigenpairs of a discretized operator with eigenvectors normalized in the
/// h-weighted inner product h·Σ fᵢgᵢ, so that Σⱼ e^{−λⱼt}φⱼ(x)² approximates
/// the continuum kernel density rather than a matrix entry.
#[derive(Debug, Clone)]
pub struct SpectralData {
    h: f64,
    eigenvalues: Vec<f64>,
    /// Node-major: `modes[node * len + j]` = φⱼ(node).
    modes: Vec<f64>,
}

/// Full dense eigendecomposition, ascending eigenvalues, each eigenvector
/// signed so its largest-magnitude entry is positive. Runs sequentially so
/// results do not depend on the thread count.
pub fn spectral_decompose(mat: &Mat<f64>, h: f64) -> Result<SpectralData> {
    let n = mat.nrows();
    if n == 0 || mat.ncols() != n {
        return Err(Error::param("matrix", format!("expected a non-empty square matrix, got {}x{}", n, mat.ncols())));
    }
    if !(h > 0.0) {
        return Err(Error::param("h", format!("spacing must be positive, got {h}")));
    }
    let mut scale = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            scale = scale.max(mat[(i, j)].abs());
        }
    }
    for j in 0..n {
        for i in (j + 1)..n {
            if (mat[(i, j)] - mat[(j, i)]).abs() > 1e-12 * scale {
                return Err(Error::param("matrix", format!("not symmetric at ({i}, {j})")));
            }
        }
    }

    let par = Par::Seq;
    let mut u = Mat::<f64>::zeros(n, n);
    let mut s = Diag::<f64>::zeros(n);
    let mut mem = MemBuffer::new(evd::self_adjoint_evd_scratch::<f64>(
        n,
        evd::ComputeEigenvectors::Yes,
        par,
        Default::default(),
    ));
    evd::self_adjoint_evd(
        mat.as_ref(),
        s.as_mut(),
        Some(u.as_mut()),
        par,
        MemStack::new(&mut mem),
        Default::default(),
    )
    .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;

    let eigenvalues: Vec<f64> = (0..n).map(|j| s[j]).collect();
    if eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigensolver("non-finite eigenvalue".into()));
    }
    let norm = 1.0 / h.sqrt();
    let mut modes = vec![0.0; n * n];
    for j in 0..n {
        let mut pivot = 0;
        for i in 1..n {
            if u[(i, j)].abs() > u[(pivot, j)].abs() {
                pivot = i;
            }
        }
        let sign = if u[(pivot, j)] < 0.0 { -norm } else { norm };
        for i in 0..n {
            modes[i * n + j] = sign * u[(i, j)];
        }
    }
    Ok(SpectralData { h, eigenvalues, modes })
}

impl SpectralData {
    /// Builds spectral data directly from eigenpairs, e.g. synthetic spectral
    /// measures. `vectors[j]` must already be h-orthonormal.
    pub fn from_parts(h: f64, eigenvalues: Vec<f64>, vectors: &[Vec<f64>]) -> Result<Self> {
        let k = eigenvalues.len();
        if vectors.len() != k || k == 0 {
            return Err(Error::param("vectors", "need one vector per eigenvalue"));
        }
        let nodes = vectors[0].len();
        if vectors.iter().any(|v| v.len() != nodes) {
            return Err(Error::param("vectors", "vectors must share a length"));
        }
        // Stored node-major with `k` modes per node.
        let mut modes = vec![0.0; nodes * k];
        for (j, v) in vectors.iter().enumerate() {
            for (i, &val) in v.iter().enumerate() {
                modes[i * k + j] = val;
            }
        }
        Ok(SpectralData { h, eigenvalues, modes })
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn mode_count(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn node_count(&self) -> usize {
        self.modes.len() / self.mode_count()
    }

    /// φⱼ(node) for all j.
    pub fn node_row(&self, node: usize) -> &[f64] {
        let k = self.mode_count();
        &self.modes[node * k..(node + 1) * k]
    }

    /// Samples of φⱼ at every node.
    pub fn mode(&self, j: usize) -> Vec<f64> {
        (0..self.node_count()).map(|i| self.node_row(i)[j]).collect()
    }

    /// k(t, x, x) ≈ Σⱼ e^{−λⱼt}φⱼ(x)², summed in ascending j.
    pub fn heat_kernel_diag(&self, t: f64, node: usize) -> f64 {
        self.eigenvalues
            .iter()
            .zip(self.node_row(node))
            .fold(0.0, |acc, (&lam, &phi)| acc + (-lam * t).exp() * phi * phi)
    }

    /// ln k(t, x, x) by log-sum-exp, finite where the direct sum underflows.
    /// −∞ only if every mode vanishes at the node.
    pub fn log_heat_kernel_diag(&self, t: f64, node: usize) -> f64 {
        let terms: Vec<f64> = self
            .eigenvalues
            .iter()
            .zip(self.node_row(node))
            .filter(|(_, &phi)| phi != 0.0)
            .map(|(&lam, &phi)| 2.0 * phi.abs().ln() - lam * t)
            .collect();
        let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return top;
        }
        top + terms.iter().map(|v| (v - top).exp()).sum::<f64>().ln()
    }

    /// k(t, x, y) ≈ Σⱼ e^{−λⱼt}φⱼ(x)φⱼ(y).
    pub fn heat_kernel(&self, t: f64, x: usize, y: usize) -> f64 {
        self.eigenvalues
            .iter()
            .zip(self.node_row(x).iter().zip(self.node_row(y)))
            .fold(0.0, |acc, (&lam, (&a, &b))| acc + (-lam * t).exp() * a * b)
    }

    /// G_t(x, x) ≈ Σⱼ φⱼ(x)²/(tλⱼ + 1), the resolvent diagonal density.
    pub fn greens_diag(&self, t: f64, node: usize) -> f64 {
        self.eigenvalues
            .iter()
            .zip(self.node_row(node))
            .fold(0.0, |acc, (&lam, &phi)| acc + phi * phi / (t * lam + 1.0))
    }

    /// f(H) as a dense matrix in the plain (unweighted) basis.
    pub fn matrix_function<F: Fn(f64) -> f64>(&self, f: F) -> Mat<f64> {
        let n = self.node_count();
        let weights: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        Mat::from_fn(n, n, |a, b| {
            let ra = self.node_row(a);
            let rb = self.node_row(b);
            self.h * weights.iter().zip(ra.iter().zip(rb)).map(|(w, (x, y))| w * x * y).sum::<f64>()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix() {
        let h = 0.25;
        let mat = Mat::from_fn(3, 3, |i, j| if i == j { (i + 1) as f64 } else { 0.0 });
        let sd = spectral_decompose(&mat, h).unwrap();
        assert_eq!(sd.eigenvalues().len(), 3);
        for (j, &l) in sd.eigenvalues().iter().enumerate() {
            assert!((l - (j + 1) as f64).abs() < 1e-14);
            let v = sd.mode(j);
            assert!((v[j] - h.powf(-0.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn two_by_two() {
        let mat = Mat::from_fn(2, 2, |i, j| if i == j { 2.0 } else { -1.0 });
        let sd = spectral_decompose(&mat, 1.0).unwrap();
        assert!((sd.eigenvalues()[0] - 1.0).abs() < 1e-14);
        assert!((sd.eigenvalues()[1] - 3.0).abs() < 1e-14);
        // Sign convention: largest-magnitude entry positive.
        for j in 0..2 {
            let v = sd.mode(j);
            let pivot = if v[0].abs() >= v[1].abs() { v[0] } else { v[1] };
            assert!(pivot > 0.0);
        }
    }

    #[test]
    fn rejects_asymmetric_input() {
        let mat = Mat::from_fn(3, 3, |i, j| (i * 3 + j) as f64);
        assert!(spectral_decompose(&mat, 1.0).is_err());
    }

    #[test]
    fn greens_scalar_cases() {
        let sd = SpectralData::from_parts(1.0, vec![0.0], &[vec![0.7]]).unwrap();
        assert!((sd.greens_diag(3.0, 0) - 0.49).abs() < 1e-15);
        let sd = SpectralData::from_parts(1.0, vec![2.0], &[vec![0.7]]).unwrap();
        assert!((sd.greens_diag(1.0, 0) - 0.49 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn log_kernel_matches_and_extends() {
        let sd = SpectralData::from_parts(1.0, vec![0.5, 3.0], &[vec![0.8], vec![0.6]]).unwrap();
        let direct = sd.heat_kernel_diag(0.7, 0);
        assert!((sd.log_heat_kernel_diag(0.7, 0) - direct.ln()).abs() < 1e-14);
        // e^{-4000} underflows, its logarithm does not.
        let lk = sd.log_heat_kernel_diag(8000.0, 0);
        assert!((lk - (0.64f64.ln() - 4000.0)).abs() < 1e-9);
        let zero = SpectralData::from_parts(1.0, vec![1.0], &[vec![0.0]]).unwrap();
        assert_eq!(zero.log_heat_kernel_diag(1.0, 0), f64::NEG_INFINITY);
    }
}
