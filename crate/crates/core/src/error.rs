use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-convergent evaluation of {what} at z = {z}: {detail}")]
    NonConvergent { what: String, z: String, detail: String },

    #[error("zero finding failed: {0}")]
    ZeroFindingFailed(String),

    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),

    #[error("truncation: last band carries {ratio:.3e} of the field norm")]
    TruncationWarning { ratio: f64 },

    #[error("singular system: {0}")]
    SingularSystem(String),

    #[error("ill-conditioned system (condition estimate {cond:.3e})")]
    IllConditioned { cond: f64 },

    #[error("regularization parameter selection failed: {0}")]
    SelectionFailed(String),

    #[error("singular intensity: lambda(0) = {0:e}")]
    SingularIntensity(f64),

    #[error("order mismatch: spectral reconstruction needs alpha == beta (alpha = {alpha}, beta = {beta})")]
    OrderMismatch { alpha: f64, beta: f64 },

    #[error("inverse crime: fine and coarse grids coincide (set allow_inverse_crime to override)")]
    InverseCrime,

    #[error("parse error at line {line}, column {column}: {msg}")]
    ParseError { line: usize, column: usize, msg: String },

    #[error("validation failed: {}", .0.join("; "))]
    ValidationError(Vec<String>),

    #[error("io error on {path}: {source}")]
    IOError {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code; stable per error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) => 2,
            Error::ParseError { .. } => 3,
            Error::ValidationError(_) => 4,
            Error::IOError { .. } => 5,
            Error::NonConvergent { .. } => 10,
            Error::ZeroFindingFailed(_) => 11,
            Error::QuadratureFailure(_) => 12,
            Error::TruncationWarning { .. } => 13,
            Error::SingularSystem(_) => 14,
            Error::IllConditioned { .. } => 15,
            Error::SelectionFailed(_) => 16,
            Error::SingularIntensity(_) => 17,
            Error::OrderMismatch { .. } => 18,
            Error::InverseCrime => 19,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "InvalidInput",
            Error::NonConvergent { .. } => "NonConvergent",
            Error::ZeroFindingFailed(_) => "ZeroFindingFailed",
            Error::QuadratureFailure(_) => "QuadratureFailure",
            Error::TruncationWarning { .. } => "TruncationWarning",
            Error::SingularSystem(_) => "SingularSystem",
            Error::IllConditioned { .. } => "IllConditioned",
            Error::SelectionFailed(_) => "SelectionFailed",
            Error::SingularIntensity(_) => "SingularIntensity",
            Error::OrderMismatch { .. } => "OrderMismatch",
            Error::InverseCrime => "InverseCrime",
            Error::ParseError { .. } => "ParseError",
            Error::ValidationError(_) => "ValidationError",
            Error::IOError { .. } => "IOError",
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::IOError { path: path.as_ref().display().to_string(), source }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_are_distinct() {
        let errs = [
            Error::InvalidInput(String::new()),
            Error::ParseError { line: 1, column: 1, msg: String::new() },
            Error::ValidationError(vec![]),
            Error::io("x", std::io::Error::other("x")),
            Error::NonConvergent { what: String::new(), z: String::new(), detail: String::new() },
            Error::ZeroFindingFailed(String::new()),
            Error::QuadratureFailure(String::new()),
            Error::TruncationWarning { ratio: 0.0 },
            Error::SingularSystem(String::new()),
            Error::IllConditioned { cond: 0.0 },
            Error::SelectionFailed(String::new()),
            Error::SingularIntensity(0.0),
            Error::OrderMismatch { alpha: 1.0, beta: 2.0 },
            Error::InverseCrime,
        ];
        let mut codes: Vec<i32> = errs.iter().map(Error::exit_code).collect();
        codes.sort();
        codes.dedup();
        assert_eq!(codes.len(), errs.len());
        assert!(codes.iter().all(|&c| c > 1));
    }
}
