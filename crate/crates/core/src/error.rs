use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A value cannot be expressed in the requested domain (e.g. dB of zero).
    #[error("domain error: {0}")]
    Domain(String),

    /// A constructed value violates one of its invariants.
    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },

    /// Configuration error; `path` is the offending field path.
    #[error("config error at `{path}`: {reason}")]
    Config { path: String, reason: String },

    /// Observation point too close to a current filament.
    #[error("field singularity: point {point:?} is {distance:.3e} m from the line of segment {segment}{}", .image.then_some(" (image)").unwrap_or(""))]
    Singularity {
        segment: usize,
        image: bool,
        point: [f64; 3],
        distance: f64,
    },

    /// Singularity raised while evaluating a scan point.
    #[error("scan point (ix={ix}, iy={iy}) at {freq_hz} Hz: {source}")]
    ScanPoint {
        ix: usize,
        iy: usize,
        freq_hz: f64,
        #[source]
        source: Box<Error>,
    },

    /// Error raised while integrating the field over a probe loop.
    #[error("probe centered at {center:?}: {source}")]
    Probe {
        center: [f64; 3],
        #[source]
        source: Box<Error>,
    },

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("format error: {0}")]
    Format(String),

    #[error("out of range: {0}")]
    Range(String),

    #[error("type error: {0}")]
    Type(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            reason: reason.into(),
        }
    }

    pub(crate) fn parse(line: usize, reason: impl Into<String>) -> Self {
        Error::Parse {
            line,
            reason: reason.into(),
        }
    }

    /// True for errors caused by numerical evaluation rather than bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Singularity { .. } | Error::Domain(_) => true,
            Error::ScanPoint { source, .. } | Error::Probe { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
