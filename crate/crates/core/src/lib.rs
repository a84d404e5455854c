//! Exact symbolic engine for the classical and pre-Lie Magnus expansions.
//!
//! The expansion is computed three independent ways over rooted trees
//! (closed tree formula, Bernoulli recursion, Grossman-Larson logarithm),
//! projected into the free Lie algebra over a graded alphabet, and finally
//! turned into a numeric Magnus integrator for linear matrix ODEs.

pub mod exact;
pub mod freelie;
pub mod gl;
pub mod lincomb;
pub mod magnus;
pub mod numeric;
pub mod prelie;
pub mod trees;

pub use exact::{bernoulli, Rational};

pub use gl::{Forest, GlElement};
pub use lincomb::LinComb;
pub use prelie::PreLieElement;
pub use trees::{PlanarTree, Tree};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid order {order}: {reason}")]
    InvalidOrder { order: usize, reason: String },
    #[error("no removal count known for order {order} (table ends at {max})")]
    TableExhausted { order: usize, max: usize },
    #[error("left operand is not homogeneous (degrees {0:?})")]
    NotHomogeneous(Vec<usize>),
    #[error("matrix dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
}
