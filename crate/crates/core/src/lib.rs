//! Spectra, point-gap winding and skin-mode dynamics of damped-oscillator
//! Fock-space lattices.
//!
//! A linearly damped bosonic mode, once its master equation is vectorized,
//! becomes a family of decoupled one-dimensional non-Hermitian chains on
//! the Fock lattice — semi-infinite by construction, since occupation
//! numbers are bounded from below. This crate builds those chains and the
//! full vectorized generator ([`lattice`]), analyses their spectra under
//! open, periodic, twisted and semi-infinite boundary conditions along
//! with the associated winding numbers and skin modes ([`spectral`]),
//! integrates their time evolution with conserved-quantity and
//! amplification diagnostics ([`dynamics`]), and runs the same program on
//! the bare annihilation operator, whose edge modes are coherent states
//! ([`annihilation`]).
//!
//! All heavy products are carried in the log domain ([`log_complex`]); all
//! operations are pure and safe to call concurrently.

pub mod annihilation;
pub mod dynamics;
pub mod error;
pub mod lattice;
pub mod log_complex;
pub mod numeric;
pub mod spectral;

pub use annihilation::{
    annihilation_spectrum_numeric, build_annihilation, coherent_mode, degenerate_modes,
    pbc_loop_radius, pbc_roots_analytic, winding_power, AnnihilationSpec, CoherentMode,
    DegenerateModeSet,
};
pub use dynamics::{
    build_initial, edge_average, envelope_decay_rate, evolve, growth_rate_fit, particle_number,
    propagate_spectral, short_time_predict, EvolutionTrace, InitialState, CROSS_CHECK_TOL,
    INTEGRATOR_RTOL, TAIL_MASS_THRESHOLD,
};
pub use error::{Error, Result};
pub use lattice::{
    block_decompose, build_liouvillian, hopping, onsite, BoundaryCondition, ChainSpec,
    OscillatorParams,
};
pub use log_complex::LogComplex;
pub use spectral::{
    loop_trace, obc_centroid, obc_eigenstate, obc_spectrum_analytic, pbc_spectrum_numeric,
    r_product, ridge_divergence_sum, scaled_energy, scaled_log_r, sibc_mode, skin_effect_density,
    winding_number, ComplexSpectrum, LoopTrace, ModeKind, ModeVector, Normalization, SibcMode,
    SpectrumMethod, SpectrumOrigin, WindingResult, WINDING_GUARD_BAND,
};

/// Crate version, recorded in experiment manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
