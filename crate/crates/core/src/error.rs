use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the bound evaluators, the distribution kernels and the
/// simulator.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A scalar argument outside its mathematical domain.
    Domain {
        what: &'static str,
        value: f64,
    },
    UnknownAxis(String),
    DuplicateAxis(String),
    OverlappingAxes(String),
    NegativeEntry {
        index: usize,
        value: f64,
    },
    NotNormalized {
        sum: f64,
    },
    NotStochastic {
        row: usize,
        sum: f64,
    },
    ShapeMismatch {
        expected: usize,
        got: usize,
    },
    /// A search box that cannot be scanned.
    InvalidBox(&'static str),
    NonFiniteObjective,
    /// `quad_roots` requires a strictly negative leading coefficient.
    NotDownwardParabola {
        a: f64,
    },
    /// The Gaussian bounds assume Bob's noise does not exceed Eve's.
    NoiseOrder {
        n1: f64,
        n2: f64,
    },
    CardinalityCap {
        aux: &'static str,
        got: usize,
        cap: usize,
    },
    /// The evaluator does not apply when the sources drive the channel.
    StateCoupled(&'static str),
    /// The joint-scheme expressions are stated for one channel use per
    /// source symbol.
    EtaNotOne {
        eta: f64,
    },
    EmptyGrid,
    GridNotSorted,
    RateConsistency(String),
    MemoryBound {
        bits: u32,
        max: u32,
    },
    EmptyTypicalSet(&'static str),
    LeakageBudget {
        cells: f64,
        max: f64,
    },
    InvalidConfig(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => write!(f, "{what} out of domain: {value}"),
            Error::UnknownAxis(name) => write!(f, "unknown axis `{name}`"),
            Error::DuplicateAxis(name) => write!(f, "duplicate axis `{name}`"),
            Error::OverlappingAxes(name) => write!(f, "axis `{name}` appears in more than one group"),
            Error::NegativeEntry { index, value } => {
                write!(f, "negative probability {value} at entry {index}")
            }
            Error::NotNormalized { sum } => write!(f, "probabilities sum to {sum}, expected 1"),
            Error::NotStochastic { row, sum } => {
                write!(f, "conditional row {row} sums to {sum}, expected 1")
            }
            Error::ShapeMismatch { expected, got } => {
                write!(f, "table has {got} entries, expected {expected}")
            }
            Error::InvalidBox(msg) => write!(f, "invalid search box: {msg}"),
            Error::NonFiniteObjective => f.write_str("objective is not finite at a feasible point"),
            Error::NotDownwardParabola { a } => {
                write!(f, "leading coefficient must be negative, got {a}")
            }
            Error::NoiseOrder { n1, n2 } => {
                write!(f, "requires N1 <= N2, got N1 = {n1}, N2 = {n2}")
            }
            Error::CardinalityCap { aux, got, cap } => {
                write!(f, "|{aux}| = {got} exceeds the cardinality cap {cap}")
            }
            Error::StateCoupled(what) => {
                write!(f, "{what} requires a channel independent of the sources")
            }
            Error::EtaNotOne { eta } => write!(f, "joint scheme requires eta = 1, got {eta}"),
            Error::EmptyGrid => f.write_str("empty parameter grid"),
            Error::GridNotSorted => f.write_str("parameter grid must be sorted ascending"),
            Error::RateConsistency(msg) => write!(f, "inconsistent rates: {msg}"),
            Error::MemoryBound { bits, max } => {
                write!(f, "codebook needs 2^{bits} codewords, limit is 2^{max}")
            }
            Error::EmptyTypicalSet(what) => write!(f, "no typical sequence found for {what}"),
            Error::LeakageBudget { cells, max } => {
                write!(f, "exact leakage needs {cells} cells, budget is {max}")
            }
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
