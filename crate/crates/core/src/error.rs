use thiserror::Error;

use crate::hermitian::HermitianMatrix;

/// Errors raised by construction, verification and I/O routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("dimension {dim} does not factor as {da}x{db}")]
    Factorization { dim: usize, da: usize, db: usize },

    #[error("not a density matrix: {0}")]
    NotDensity(String),

    #[error("{what} is not positive semi-definite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { what: String, min_eigenvalue: f64 },

    #[error("effects do not sum to the identity (max entry residual {max_residual:.3e})")]
    SumNotIdentity {
        max_residual: f64,
        residual: Box<HermitianMatrix>,
    },

    #[error("unknown outcome label {0:?}")]
    UnknownLabel(String),

    #[error("duplicate outcome label {0:?}")]
    DuplicateLabel(String),

    #[error("outcome labels do not match: {0}")]
    LabelMismatch(String),

    #[error("negative probability {value:.3e} for outcome {label:?}: state lies outside the quantum domain")]
    NegativeProbability { label: String, value: f64 },

    #[error("maximally mixed state is not in the subspace (residual {residual:.3e})")]
    AnchorOutsideSubspace { residual: f64 },

    #[error("rejection budget exceeded while sampling domain states (last jitter {jitter:.3e})")]
    RejectionBudgetExceeded { jitter: f64 },

    #[error("measurement is not a POVM: effect {label:?} has min eigenvalue {min_eigenvalue:.3e}")]
    NotPovm { label: String, min_eigenvalue: f64 },

    #[error("every shot was rejected (or no shots were taken)")]
    AllShotsRejected,

    #[error("accepted probability mass {accepted_mass:.3e} vanishes on a domain state")]
    AllOutcomesRejected { accepted_mass: f64 },

    #[error("degenerate decomposition: largest eigenvalue of the summed positive parts is {c:.3e}")]
    DegenerateDecomposition { c: f64 },

    #[error("effect {label:?} violates the diagonal condition in the chosen frame: {detail}")]
    DiagonalCondition { label: String, detail: String },

    #[error("no admissible traceless completion for effect {label:?}")]
    CompletionInfeasible { label: String },

    #[error("domain conditions not met: {0}")]
    DomainConditionsNotMet(String),

    #[error("rejection condition fails: projection norm {projection_norm:.3e} exceeds tolerance")]
    RejectionConditionFailed { projection_norm: f64 },

    #[error("degenerate rejection constant: {0}")]
    DegenerateC0(String),

    #[error("pure-state family is nearly linearly dependent (min singular value {min_singular_value:.3e})")]
    NearSingularFamily { min_singular_value: f64 },

    #[error("operator inequality violated: inconclusive effect has min eigenvalue {min_eigenvalue:.3e}")]
    OperatorInequalityViolated { min_eigenvalue: f64 },

    #[error("multiplicity block {block} is singular (min singular value {min_singular_value:.3e})")]
    SingularMultiplicityBlock { block: usize, min_singular_value: f64 },

    #[error("invalid group representation: {0}")]
    InvalidRepresentation(String),

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
