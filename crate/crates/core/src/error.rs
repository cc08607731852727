use thiserror::Error;

/// Crate-wide error type. Variants separate caller mistakes (`Domain`,
/// `Config`) from numerical outcomes (`Tolerance`, `Inversion`) and from
/// simulation dead ends (`AllCensored`), because the CLI maps them to
/// different exit codes.
#[derive(Error, Debug)]
pub enum Error {
    #[error("{0}")]
    Domain(String),

    #[error("{0}")]
    Config(String),

    #[error("tolerance not reached within {max_refinements} refinements: value {value:.6e}, achieved error {achieved:.3e}, requested {requested:.3e}")]
    Tolerance {
        value: f64,
        achieved: f64,
        requested: f64,
        max_refinements: u32,
    },

    #[error("transform inversion failed at {at:.6e}: residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    Inversion {
        at: f64,
        residual: f64,
        tolerance: f64,
    },

    #[error("quantitative check failed: {0}")]
    Quantitative(String),

    #[error("all {n_paths} paths censored at max_time={max_time}: {detail}")]
    AllCensored {
        n_paths: u64,
        max_time: f64,
        detail: String,
    },

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
