use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit label {label} outside register of {total} qubits")]
    LabelOutOfRange { label: usize, total: usize },

    #[error("empty set of retained qubits")]
    EmptyKeepSet,

    #[error("duplicate qubit label {0}")]
    DuplicateLabel(usize),

    #[error("register too large: {0} qubits")]
    RegisterTooLarge(usize),

    #[error("amplitude vector has length {got}, register needs {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("state is not normalized (norm = {0})")]
    NotNormalized(f64),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("operation requires the system qubit in the register")]
    MissingSystem,

    #[error("fragment contains the system qubit")]
    FragmentContainsSystem,

    #[error("bath size {0} too small for a ring (need N >= 3)")]
    RingTooSmall(usize),

    #[error("excitation number {n} out of range 0..={n_bath}")]
    SectorOutOfRange { n: usize, n_bath: usize },

    #[error("invalid evolution parameters: {0}")]
    InvalidEvolution(String),

    #[error("branch states live on different registers")]
    RegisterMismatch,

    #[error("coefficient vector length {got} does not match N + 1 = {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("Dicke split index i = {i} outside [{min}, {max}]")]
    SplitIndexOutOfRange { i: usize, min: usize, max: usize },

    #[error("fragment size {k} out of range 0..={n_bath}")]
    FragmentOutOfRange { k: usize, n_bath: usize },

    #[error("closed-form path needs real initial magnon coefficients")]
    ComplexInitialState,

    #[error("closed-form path supports only the swap-invariant sectors n = 0, 1 (got {0})")]
    UnsupportedSector(usize),

    #[error(
        "BLP measure not converged: grid of {points} points changes by {estimate:e} on halving; try {suggested} points"
    )]
    NotConverged {
        points: usize,
        estimate: f64,
        suggested: usize,
    },

    #[error("subset averaging limited to N <= {max} (got {n_bath})")]
    TooManySubsets { n_bath: usize, max: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
