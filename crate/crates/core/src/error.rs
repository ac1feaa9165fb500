use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while evaluating, inverting or conjugating
/// functions, or while computing norms.
#[derive(Debug, Error)]
pub enum Error {
    #[error("x = {x} lies outside the domain [{lo}, {hi}]")]
    Domain { x: f64, lo: f64, hi: f64 },

    #[error("function is not strictly monotone: worst step {worst_margin:e} at x = {worst_at}, first violation at x = {first_at}")]
    NotMonotone {
        worst_margin: f64,
        worst_at: f64,
        first_at: f64,
    },

    #[error("value {z} is outside the attained range [{lo}, {hi}]")]
    OutOfRange { z: f64, lo: f64, hi: f64 },

    #[error("supremum not attained before the truncation point; best lower bound {lower_bound}")]
    TruncationUncertain { lower_bound: f64 },

    #[error("tail of the supremum over p is not certified: tail bound {tail_bound} exceeds attained {attained}")]
    TailUncertain { tail_bound: f64, attained: f64 },

    #[error("p/psi(p) is not strictly increasing (worst step {worst_margin:e} at p = {worst_at}, first violation at p = {first_at})")]
    NotIncreasing {
        worst_margin: f64,
        worst_at: f64,
        first_at: f64,
    },

    #[error("not a Young function: {reason}")]
    NonYoung { reason: String },

    #[error("convexity check failed: defect {defect:e} exceeds tolerance {tolerance:e}")]
    NonConvex { defect: f64, tolerance: f64 },

    #[error(
        "no scanned C makes ln(C + N(z)) convex (best defect {best_defect:e} at C = {best_c})"
    )]
    AllNonConvex { best_c: f64, best_defect: f64 },

    #[error("fundamental function does not vanish at 0+: {reason}")]
    NotVanishingAtZero { reason: String },

    #[error("no interior minimum of the Amemiya functional in v in [1e-12, 1e12]; best endpoint value {best}")]
    BracketFailure { best: f64 },

    #[error("power extension below e^2 would not be convex: kappa = {kappa} < 1")]
    ExtensionNotConvex { kappa: f64 },

    #[error("no patch point C5 <= e^2 with elasticity below alpha = {alpha} (minimum elasticity {min_elasticity} on the scan)")]
    NoValidC5 { alpha: f64, min_elasticity: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("cannot read or write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed CSV in {path}: {message}")]
    Csv { path: PathBuf, message: String },
}

impl Error {
    /// True for filesystem and CSV parsing problems (exit status 2 in the CLI).
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. } | Error::Csv { .. })
    }

    /// Plain-language statement of the mathematical hypothesis that the
    /// failure violates, used by the command line front-end.
    pub fn hypothesis(&self) -> &'static str {
        match self {
            Error::NotIncreasing { .. } => {
                "nu is defined as the inverse of p -> p/psi(p), which must be strictly increasing on the support of psi"
            }
            Error::NotMonotone { .. } => "the function must be strictly monotone to be inverted",
            Error::OutOfRange { .. } => "the requested value lies outside the range covered by the data",
            Error::Domain { .. } => "the argument must lie in the declared domain",
            Error::TruncationUncertain { .. } | Error::TailUncertain { .. } => {
                "the supremum must be attained (or certified) below the truncation point P_max"
            }
            Error::NonYoung { .. } => {
                "a Young function must vanish only at 0 and be convex and increasing on the right semi-axis"
            }
            Error::NonConvex { .. } => {
                "the function must be convex (ln(C + N(z)) for the inverse problem, p ln psi(p) for the exponential class)"
            }
            Error::AllNonConvex { .. } => {
                "ln(C + N(z)) must be continuous and convex for some constant C > 0"
            }
            Error::NotVanishingAtZero { .. } => {
                "a fundamental function must be strictly increasing and continuous with phi(0+) = 0"
            }
            Error::BracketFailure { .. } => "the Amemiya functional must have an interior minimum",
            Error::ExtensionNotConvex { .. } => {
                "the exponential Orlicz function must be extended below e^2 as a convex function"
            }
            Error::NoValidC5 { .. } => {
                "the patched Young function needs a point where the elasticity u N'(u)/N(u) does not exceed alpha"
            }
            Error::InvalidInput(_) => "inputs must satisfy the documented preconditions",
            Error::Io { .. } | Error::Csv { .. } => "input files must exist and be well formed",
        }
    }
}
