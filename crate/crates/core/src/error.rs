use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside the range an operation is defined on.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("operator order 2m = {order} must exceed the dimension N = {dim} (2m > N)")]
    OrderTooLow { order: u32, dim: u32 },

    #[error("potential exceeds its growth bound at x = {x}: V = {value} > {bound}")]
    PotentialBound { x: f64, value: f64, bound: f64 },

    #[error("adaptive quadrature did not converge: estimated error {error:e} after {evaluations} evaluations")]
    Quadrature { error: f64, evaluations: usize },

    #[error("eigendecomposition failed: {0}")]
    Eigensolver(String),

    #[error("test function support [{lo}, {hi}] leaks past the box [-{half_width}, {half_width}]; shrink beta or enlarge L")]
    SupportLeak { lo: f64, hi: f64, half_width: f64 },

    #[error("test function transition band holds {nodes} nodes, need at least {required}")]
    Unresolved { nodes: usize, required: usize },

    #[error("test function vanishes at its centre")]
    DegenerateTestFunction,

    #[error("envelope fit rejected: {0}")]
    DegenerateSamples(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
