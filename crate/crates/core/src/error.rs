//! Error type shared by every module of the crate.

use alloc::string::String;
use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong when constructing states, gates and maps.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Matrix or vector dimensions do not line up for the requested operation.
    DimensionMismatch(String),
    /// A Hermitian input was required; `deviation` is the relative asymmetry found.
    NotHermitian { deviation: f64 },
    /// A unitary input was required; `deviation` is ‖u†u − 1‖_F.
    NotUnitary { deviation: f64 },
    /// A normalized state vector was required; `norm` is what was found.
    NotNormalized { norm: f64 },
    /// A Kraus set failed the completeness sum Σ K†K = 1.
    IncompleteKraus { deviation: f64 },
    /// Map inversion refused: condition number beyond the caller's limit.
    /// This is the maximal-entanglement obstruction surfacing numerically.
    SingularMap { condition: f64 },
    /// The requested construction excludes maximally entangled inputs.
    MaximallyEntangled,
    /// A local (tensor-product) unitary was required.
    NotLocalUnitary,
    /// A density matrix exposed an eigenvalue below the physical tolerance.
    NegativeEigenvalue { value: f64 },
    /// No enumerated gate/state convention reproduces the reference quantities.
    NoConventionFits { best_residual: f64 },
    /// A scalar argument was outside its documented domain.
    InvalidParameter(String),
    /// An iterative kernel failed to reach its stopping threshold.
    ConvergenceFailure(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch(what) => write!(f, "dimension mismatch: {what}"),
            Error::NotHermitian { deviation } => {
                write!(f, "matrix is not Hermitian (relative asymmetry {deviation:.3e})")
            }
            Error::NotUnitary { deviation } => {
                write!(f, "matrix is not unitary (deviation {deviation:.3e})")
            }
            Error::NotNormalized { norm } => {
                write!(f, "state vector is not normalized (norm {norm:.17})")
            }
            Error::IncompleteKraus { deviation } => {
                write!(f, "Kraus set violates completeness by {deviation:.3e}")
            }
            Error::SingularMap { condition } => write!(
                f,
                "dynamical map is singular or near-singular (condition number {condition:.3e}); \
                 this is the maximal-entanglement obstruction"
            ),
            Error::MaximallyEntangled => {
                write!(f, "input state is maximally entangled; construction undefined")
            }
            Error::NotLocalUnitary => write!(f, "operator is not a local (tensor-product) unitary"),
            Error::NegativeEigenvalue { value } => {
                write!(f, "density matrix has eigenvalue {value:.3e} below -1e-10")
            }
            Error::NoConventionFits { best_residual } => write!(
                f,
                "no gate/state convention reproduces the reference matrices \
                 (best residual {best_residual:.3e})"
            ),
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::ConvergenceFailure(what) => write!(f, "iteration failed to converge: {what}"),
        }
    }
}

impl core::error::Error for Error {}
