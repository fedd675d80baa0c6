use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("symbol is not finite at frequency {frequency:?}")]
    NonFiniteSymbol { frequency: Vec<f64> },

    #[error("box {k:?} lies outside the resolved box range [{min}, {max}]")]
    BoxOutOfRange { k: Vec<i64>, min: i64, max: i64 },

    #[error("invalid norm exponent: {0}")]
    InvalidExponent(String),

    #[error("undefined: {0}")]
    Undefined(&'static str),

    #[error("pair (q, r) = ({q}, {r}) is not admissible in dimension {d}")]
    NotAdmissible { q: f64, r: f64, d: usize },

    #[error("field magnitude exceeded the blowup guard at t = {time}")]
    Overflow { time: f64 },

    #[error("Picard iteration did not contract (last ratio {ratio:.4}, {iterations} iterations)")]
    NoContraction { ratio: f64, iterations: usize },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("gap condition has no solution with q >= 0: 1/q = {reciprocal}")]
    NegativeReciprocal { reciprocal: f64 },

    #[error("cutoff N = {cutoff} is outside the resolved band [0, {band}]")]
    CutoffOutOfBand { cutoff: f64, band: f64 },

    #[error("empty cutoff set")]
    EmptyCutoffSet,

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("condition violated: {0}")]
    ConditionViolated(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("field is not real: imaginary residue {residue:e}")]
    NotReal { residue: f64 },

    #[error("malformed field data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
