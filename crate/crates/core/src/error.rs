use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("parameters are not subextremal: found {found} real horizon roots, expected {expected}")]
    NotSubextremal { found: usize, expected: usize },
    #[error("horizon roots are degenerate (separation {separation:.3e})")]
    DegenerateRoots { separation: f64 },
    #[error("point lies outside the chart {chart}: {reason}")]
    OutOfChart { chart: String, reason: String },
    #[error("quadrature did not converge: {0}")]
    QuadratureFailure(String),
    #[error("finite-difference step {step:.3e} is below the floor {floor:.3e}")]
    StepUnderflow { step: f64, floor: f64 },
    #[error("acceleration of the horizon generator is not parallel to it (deviation {deviation:.3e})")]
    NotParallel { deviation: f64 },
    #[error("normal form violated: {0}")]
    BlockFormViolation(String),
    #[error("ODE integration failed: {0}")]
    IntegrationFailure(String),
    #[error("trajectory left the chart domain at parameter {at:.6}")]
    ChartExit { at: f64 },
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("differentiation matrix too ill-conditioned (estimate {estimate:.3e})")]
    IllConditioned { estimate: f64 },
    #[error("point is not characteristic: |p| = {value:.3e}")]
    CharSetViolation { value: f64 },
    #[error("Hamiltonian field is not radial at the conormal point (deviation {deviation:.3e})")]
    NotRadial { deviation: f64 },
    #[error("bicharacteristic left the chart at t = {at:.6}")]
    LeftChart { at: f64 },
    #[error("operation needs a positive cosmological constant")]
    LambdaZeroUnsupported,
    #[error("eigensolver failed: {0}")]
    EigensolverFailure(String),
    #[error("zero vector supplied")]
    ZeroVector,
    #[error("interval [{lo}, {hi}] is outside the solution domain [{dom_lo}, {dom_hi}]")]
    IntervalOutOfDomain { lo: f64, hi: f64, dom_lo: f64, dom_hi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
