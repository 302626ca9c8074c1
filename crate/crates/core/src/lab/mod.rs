//! One-dimensional grid lab: discretized operator, spectral kernel, bumps.

pub mod grid;
pub mod operator;
pub mod spectral;
pub mod test_function;

pub use grid::{Grid1D, MAX_NODES, MIN_NODES};
pub use operator::{apply_kinetic, assemble_operator, kinetic_matrix, norm_sq, DiscreteOperator, QuadraticForm};
pub use spectral::{spectral_decompose, SpectralData};
pub use test_function::{
    beta_resolution_floor, build_test_function, bump_psi, variational_green, TestFunction, MIN_TRANSITION_NODES,
};
