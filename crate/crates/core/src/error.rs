use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("state space needs at least two states, got {0}")]
    StateSpaceTooSmall(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite or negative entry {value} at ({row}, {col})")]
    InvalidEntry { row: usize, col: usize, value: f64 },
    #[error("row {row} sums to {sum}")]
    NotStochastic { row: usize, sum: f64 },
    #[error("entries sum to {sum}, expected a probability vector")]
    NotNormalized { sum: f64 },
    #[error("proposal puts mass {value} on the diagonal at ({state}, {state})")]
    NonzeroDiagonal { state: usize, value: f64 },
    #[error("proposal support is asymmetric: T({x},{y}) > 0 but T({y},{x}) = 0")]
    AsymmetricSupport { x: usize, y: usize },
    #[error("target has zero mass at state {0}")]
    ZeroTargetMass(usize),
    #[error("acceptance A({x},{y}) = {value} is outside [0, 1] or on the diagonal")]
    InvalidAcceptance { x: usize, y: usize, value: f64 },
    #[error("holding probability P({state},{state}) = {value} is negative")]
    NegativeDiagonal { state: usize, value: f64 },
    #[error("kernel is not ergodic: {unit_modulus} eigenvalues on the unit circle")]
    NotErgodic { unit_modulus: usize },
    #[error("detailed balance fails at ({x}, {y}) by {violation:e}")]
    NotReversible { x: usize, y: usize, violation: f64 },
    #[error("mixing time exceeds the cap of {cap} steps")]
    CapExceeded { cap: usize },
    #[error("epsilon must lie in (0, 1), got {0}")]
    InvalidEpsilon(f64),
    #[error("P P* is not ergodic: second eigenvalue {second}")]
    NotErgodicProduct { second: f64 },
    #[error("gap check failed: {what} ({lhs} vs {rhs})")]
    GapCheckFailed { what: &'static str, lhs: f64, rhs: f64 },
    #[error("({x}, {y}) is not an edge of the proposal")]
    InputOffEdgeSet { x: usize, y: usize },
    #[error("input deviates from the stationary generator by {deviation:e}")]
    NotStationaryInput { deviation: f64 },
    #[error("initial state has overlap {overlap:e} with the stationary generator")]
    ZeroOverlap { overlap: f64 },
    #[error("register layout mismatch: {0}")]
    LayoutMismatch(String),
    #[error("shift {value} at grid index {index} is not a multiple of the grid step")]
    NonIntegerShift { index: usize, value: f64 },
    #[error("proposal row {0} has no off-diagonal mass")]
    DegenerateRow(usize),
    #[error("eigen and power-iteration stationary laws disagree (tv {tv:e})")]
    StationaryMismatch { tv: f64 },
    #[error("{n} states is beyond the {max} the dense walk simulation supports")]
    TooManyStates { n: usize, max: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("eigensolver failed: {0}")]
    Solver(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
