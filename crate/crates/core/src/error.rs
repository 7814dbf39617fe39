use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The spectrum denominator |A(w)A*(-w) - |zeta|^2| vanished.
    #[error("singular spectrum at omega = {omega} (stability boundary)")]
    SingularSpectrum { omega: f64 },

    #[error("no net cooling: 2*gamma_b + Gamma_b = {total} <= 0, the rate formula does not apply")]
    Heating { total: f64 },

    #[error("unstable dynamics: spectral abscissa = {abscissa}")]
    Unstable { abscissa: f64 },

    #[error(
        "steady state did not converge after {iterations} iterations (last residual {residual:e})"
    )]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("unphysical covariance: min eigenvalue of V + i/2 Omega is {min_eigenvalue:e}")]
    UnphysicalCovariance { min_eigenvalue: f64 },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("no stable cooling point in the search box")]
    NoFeasiblePoint,
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
