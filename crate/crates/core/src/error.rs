use thiserror::Error;

/// Errors produced anywhere in the statistic, table and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge on [{lo}, {hi}]: estimate {estimate}, error bound {error_bound}")]
    Convergence {
        lo: f64,
        hi: f64,
        estimate: f64,
        error_bound: f64,
    },

    #[error("sample needs at least {required} observations, got {got}")]
    TooFewObservations { required: usize, got: usize },

    #[error("observation {index} is not finite")]
    NonFinite { index: usize },

    #[error("degenerate sample: standard deviation is zero")]
    DegenerateSample,

    #[error("sample size {n} is outside the critical-value table (rows {min}..={max})")]
    TableCoverage { n: usize, min: usize, max: usize },

    #[error("significance level {0} is not a column of the critical-value table")]
    UnsupportedAlpha(f64),

    #[error("no critical value available for {0}")]
    MissingCriticalValue(String),

    #[error(transparent)]
    Spec(#[from] SpecError),

    #[error("table parse error on line {line}: {message}")]
    TableParse { line: usize, message: String },
}

/// Failures of the alternative-distribution grammar and samplers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("malformed distribution spec `{0}`: expected Family(p1,p2,...)")]
    Syntax(String),

    #[error("unknown distribution family `{0}`")]
    UnknownFamily(String),

    #[error("{family} takes {expected} parameter(s), got {got}")]
    Arity {
        family: &'static str,
        expected: &'static str,
        got: usize,
    },

    #[error("invalid parameter for {family}: {message}")]
    ParamDomain {
        family: &'static str,
        message: String,
    },

    #[error("{0} has no closed-form quantile function")]
    NoQuantile(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
