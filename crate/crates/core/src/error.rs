use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("chart differential is rank deficient at {at:?} (singular value ratio {ratio:e})")]
    RankDeficient { at: Vec<f64>, ratio: f64 },

    #[error("evaluation point coincides with the base point (r = {r:e})")]
    BaseCoincides { r: f64 },

    #[error("unsupported surface kind: {0}")]
    UnsupportedKind(String),

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("operation supports intrinsic dimension {expected} only, got {got}")]
    UnsupportedDimension { expected: usize, got: usize },

    #[error("degenerate chart: {0}")]
    DegenerateChart(String),

    #[error("degenerate triangle {index} (area {area:e})")]
    DegenerateTriangle { index: usize, area: f64 },

    #[error("extrinsic ball of radius {radius} exits the chart truncation")]
    TruncationTooSmall { radius: f64 },

    #[error("eigensolver did not converge within {max_iters} iterations")]
    NoConvergence { max_iters: usize },

    #[error("mass matrix is singular or indefinite")]
    SingularMass,

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("invalid volume ratio: C_n = {c_n} must be >= F_n = {f_n} > 0")]
    InvalidRatio { c_n: f64, f_n: f64 },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("sampled function is not integrable over the window (integral {integral:e})")]
    NotIntegrable { integral: f64 },

    #[error("Ricci-limit constant must be nonnegative, got {0}")]
    NegativeC(f64),

    #[error("invalid BdGG parameters for m = {m}")]
    InvalidParams { m: usize },

    #[error("adaptive quadrature failed to reach tolerance {tol:e} (estimate {estimate:e})")]
    QuadratureFailure { tol: f64, estimate: f64 },

    #[error("damped Newton diverged after {iterations} iterations (residual {residual:e})")]
    NewtonDiverged { iterations: usize, residual: f64 },
}
