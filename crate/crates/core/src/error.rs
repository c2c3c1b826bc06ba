use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("order {0} exceeds the supported maximum of 200")]
    OrderOverflow(u32),
    #[error("kernel singularity: {0}")]
    Singularity(String),
    #[error("quadrature did not converge (achieved {achieved:.3e}, target {target:.3e})")]
    Quadrature { achieved: f64, target: f64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("iteration did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    Solver { iterations: usize, residual: f64 },
    #[error("resolution too coarse: kappa*h = {kappa_h:.4} exceeds {limit:.4}")]
    Resolution { kappa_h: f64, limit: f64 },
    #[error("coverage: {0}")]
    Coverage(String),
    #[error("missing record: {0}")]
    Lookup(String),
    #[error("datasets not aligned: {0}")]
    Alignment(String),
    #[error("ill-conditioned system: {0}")]
    Conditioning(String),
    #[error("near pole at lambda = {re} + {im}i (smallest singular value {sigma_min:.3e})")]
    Pole { re: f64, im: f64, sigma_min: f64 },
    #[error("at K = {k}: {source}")]
    AtBand { k: f64, source: Box<Error> },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
