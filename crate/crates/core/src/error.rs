use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid spin size 2J = {two_j}: need 2J >= 1")]
    InvalidSpin { two_j: u32 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian (max residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("state is not normalized (|psi|^2 = {norm_sq})")]
    NotNormalized { norm_sq: f64 },

    #[error("real coordinates have sum(x^2 + y^2) = {sum}, expected 2")]
    RealCoordsNorm { sum: f64 },

    #[error("point (q, p) = ({q}, {p}) lies off the disk q^2 + p^2 <= 4J = {bound}")]
    OffDisk { q: f64, p: f64, bound: f64 },

    #[error("point (q, p) = ({q}, {p}) is within {margin:e} of the disk boundary")]
    NearBoundary { q: f64, p: f64, margin: f64 },

    #[error("stereographic chart is undefined at theta = pi")]
    StereographicPole,

    #[error("expectation vector <J> has magnitude {magnitude:e}; the equivalence class has no representative")]
    ZeroExpectation { magnitude: f64 },

    #[error("energy drift {drift:e} at t = {t} exceeds tolerance {tolerance:e}")]
    EnergyDrift { t: f64, drift: f64, tolerance: f64 },

    #[error("trajectory left the disk at t = {t}: (q, p) = ({q}, {p})")]
    OffDiskExcursion { t: f64, q: f64, p: f64 },

    #[error("implicit midpoint iteration did not converge at t = {t}; reduce the step")]
    StepTooLarge { t: f64 },

    #[error("hermitian eigendecomposition failed to converge")]
    Eigendecomposition,

    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::EnergyDrift { .. }
                | Error::OffDiskExcursion { .. }
                | Error::StepTooLarge { .. }
                | Error::Eigendecomposition
                | Error::NearBoundary { .. }
        )
    }
}
