use num_complex::Complex64;
use thiserror::Error;

/// Unified error type for every numerical and configuration failure.
#[derive(Debug, Error)]
pub enum Error {
    #[error("elliptic modulus must lie strictly inside (0, 1), got {0}")]
    ModulusOutOfRange(f64),
    #[error("non-finite input in {0}")]
    NonFinite(&'static str),
    #[error("argument {arg} lies within {guard:e} of the elliptic pole at {pole}")]
    NearPole {
        arg: Complex64,
        pole: Complex64,
        guard: f64,
    },
    #[error("empty window")]
    EmptyWindow,
    #[error("evaluation failed at contour sample {at}: {source}")]
    ContourSample {
        at: Complex64,
        #[source]
        source: Box<Error>,
    },
    #[error("contour did not converge within {max_samples} samples (last doubling error {est_error:e})")]
    ContourNotConverged { max_samples: usize, est_error: f64 },
    #[error("contour center {center} violates the forbidden lines Re = 0 / Re = {t_star}")]
    ForbiddenLine { center: Complex64, t_star: f64 },
    #[error("contour radius floor 1e-6 unreachable (computed {0:e})")]
    RadiusFloor(f64),
    #[error("parameter {0} outside admissible interval [{1}, {2}]")]
    ParamOutOfRange(f64, f64, f64),
    #[error("l and n must be coprime positive integers, got l = {0}, n = {1}")]
    NotCoprime(u32, u32),
    #[error("no resonance bracket: n*T(param) - 2*pi*l/nu has no sign change on [{0}, {1}]")]
    NoBracket(f64, f64),
    #[error("period map is not strictly monotone on the scanned bracket")]
    NonMonotonePeriod,
    #[error("quadrature did not converge (last doubling error {0:e})")]
    QuadratureNotConverged(f64),
    #[error("frequency ratios not rational within denominator bound {bound} (residual {residual:e})")]
    NotResonant { bound: u64, residual: f64 },
    #[error("commensurability check failed: omega_j*T/(2*pi) = {0} is not an integer")]
    NotCommensurate(f64),
    #[error("no closed-form Melnikov coefficients for {0}")]
    NoClosedForm(String),
    #[error("Melnikov function has no simple zero near phi = {phi}: |delta*J1| = {dj1:e} >= |beta*J2| = {bj2:e}")]
    NoSimpleZero { phi: f64, dj1: f64, bj2: f64 },
    #[error("Newton iteration diverged after {iters} steps (residual {residual:e}, last iterate [{:?}, {:?}])", x[0], x[1])]
    NewtonDiverged {
        iters: usize,
        residual: f64,
        x: [f64; 2],
    },
    #[error("integrator step size underflow at t = {0}")]
    StepUnderflow(f64),
    #[error("solution escaped radius 1e6 at t = {0}")]
    Blowup(f64),
    #[error("chart inversion failed: action {0} outside sampled range")]
    ChartInversion(f64),
    #[error("action map is not monotone on the sampled grid")]
    NonMonotoneAction,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
