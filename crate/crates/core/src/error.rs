use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A domain type was constructed with a value that breaks one of its invariants.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("inertia required: irregular shapes need an explicit inertia")]
    InertiaRequired,

    #[error("outside characterized region: {quantity} = {value} not in [{min}, {max}]")]
    OutsideCharacterizedRegion {
        quantity: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("beyond characterized compression depth: {penetration_mm} mm > {limit_mm} mm")]
    BeyondCompressionDepth { penetration_mm: f64, limit_mm: f64 },

    #[error("contact outside characterized finger region: x = {x} m not in [{min}, {max}]")]
    ContactOutsideFinger { x: f64, min: f64, max: f64 },

    #[error("integration diverged: {quantity} is not finite at t = {t} s")]
    Diverged { quantity: &'static str, t: f64 },

    #[error("undefined: zero displacement {0}")]
    ZeroDisplacement(&'static str),

    #[error("infeasible: required friction force {required} N exceeds available {available} N")]
    Infeasible { required: f64, available: f64 },

    #[error("reorientation requires cross-section radius")]
    RadiusRequired,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("scenario parse error: {0}")]
    Parse(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Short machine-readable tag, used by the CLI's one-line error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Invariant(_) => "invariant",
            Error::InertiaRequired => "inertia_required",
            Error::OutsideCharacterizedRegion { .. } => "outside_region",
            Error::BeyondCompressionDepth { .. } => "compression_depth",
            Error::ContactOutsideFinger { .. } => "contact_outside_finger",
            Error::Diverged { .. } => "diverged",
            Error::ZeroDisplacement(_) => "zero_displacement",
            Error::Infeasible { .. } => "infeasible",
            Error::RadiusRequired => "radius_required",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Parse(_) => "parse",
            Error::Io { .. } => "io",
        }
    }
}

pub(crate) fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Invariant(what()))
    }
}
