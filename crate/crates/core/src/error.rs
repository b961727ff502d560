use num_complex::Complex64;
use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("chain dimension must be at least 1, got {0}")]
    DimensionTooSmall(usize),

    #[error("Fock cutoff must be at least 1, got {0}")]
    CutoffTooSmall(usize),

    #[error("level index {level} out of range for dimension {dim}")]
    LevelOutOfRange { level: usize, dim: usize },

    #[error("operation requires {required} boundary condition")]
    WrongBoundary { required: &'static str },

    #[error("eigensolver failed to converge on a {size}x{size} matrix")]
    EigensolverFailed { size: usize },

    #[error(
        "coupling of magnitude {magnitude:.3e} between blocks nu={nu_row} and nu={nu_col}; \
         expected exact decoupling"
    )]
    BlockCoupling { nu_row: i64, nu_col: i64, magnitude: f64 },

    #[error("scaled energy {0} lies on a logarithmic singularity (Etilde/D in {{0, -1}})")]
    ScaledLogSingularity(Complex64),

    #[error(
        "reference energy sits within the |log|R|| < {band:.1e} band of the spectral loop \
         (got {value:.3e}); winding is ambiguous there"
    )]
    OnLoopBand { value: f64, band: f64 },

    #[error("need at least {min} grid angles, got {got}")]
    TooFewAngles { min: usize, got: usize },

    #[error("frame must span at least {needed} sites, got {got}")]
    FrameTooShort { needed: usize, got: usize },

    #[error("fit window [{t0}, {t1}] holds {got} samples; at least 4 required")]
    DegenerateFit { t0: f64, t1: f64, got: usize },

    #[error("edge average vanishes inside the fit window; log-slope is undefined")]
    VanishingSignal,

    #[error("time grid needs t_max > 0 and dt_out > 0, got t_max = {t_max}, dt_out = {dt_out}")]
    BadTimeGrid { t_max: f64, dt_out: f64 },

    #[error("adaptive step control stalled at t = {t:.6e} (step {step:.3e})")]
    IntegrationStalled { t: f64, step: f64 },

    #[error(
        "integrator and spectral propagator disagree: max frame deviation {deviation:.3e} \
         exceeds {tolerance:.1e}"
    )]
    CrossCheckMismatch { deviation: f64, tolerance: f64 },

    #[error(
        "truncation length {len} leaves a coherent-state tail of {tail:.3e} at |alpha| = \
         {alpha_abs}; extend the truncation"
    )]
    TruncationTooSmall { len: usize, alpha_abs: f64, tail: f64 },

    #[error("degenerate coherent modes are undefined at E = 0")]
    DegenerateEnergy,

    #[error("power must be at least 1")]
    PowerTooSmall,
}

pub type Result<T> = std::result::Result<T, Error>;
