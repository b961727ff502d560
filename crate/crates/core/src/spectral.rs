//! Characteristic products, spectra, winding numbers, loop tracing and mode
//! construction for the truncated chains.
//!
//! Everything here revolves around the characteristic product
//!
//! ```text
//!   R_nu^(D)(E) = prod_{j=0}^{D} (E - h_j) / t_j
//! ```
//!
//! whose level set |R| = 1 is the periodic-boundary spectral loop, whose
//! interior |R| < 1 carries the decaying semi-infinite modes, and whose
//! exact zeros are the open-boundary eigenvalues. Products are accumulated
//! in the log domain ([`LogComplex`]); at D of a few hundred the factor
//! magnitudes span far more than f64 range.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{onsite, BoundaryCondition, ChainSpec, OscillatorParams};
use crate::log_complex::LogComplex;
use crate::numeric::{sort_canonical, unwrap_phases, x_ln_x};

/// How a spectrum was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectrumMethod {
    NumericEigensolver,
    AnalyticObc,
    AnalyticRoots,
}

/// What operator a spectrum belongs to.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpectrumOrigin {
    Chain(ChainSpec),
    Annihilation { dim: usize },
}

/// Ordered complex eigenvalues with provenance.
#[derive(Clone, Debug)]
pub struct ComplexSpectrum {
    /// Eigenvalues sorted by real part, then imaginary part.
    pub values: Vec<Complex64>,
    pub method: SpectrumMethod,
    pub origin: SpectrumOrigin,
}

/// Construction kind of a mode vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeKind {
    ObcEigenstate,
    SibcSkinMode,
    Coherent,
    Custom,
}

/// Normalization convention recorded on a mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    /// Unit Euclidean norm.
    UnitEuclidean,
    /// First amplitude fixed to 1; the mode may not be normalizable.
    FirstSiteOne,
}

/// Complex amplitudes over chain sites with an energy label.
#[derive(Clone, Debug)]
pub struct ModeVector {
    pub amplitudes: Vec<Complex64>,
    pub energy: Complex64,
    pub kind: ModeKind,
    /// Chain index for chain modes; 0 for single-mode (coherent) vectors.
    pub nu: i64,
    pub normalization: Normalization,
}

impl ModeVector {
    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// A semi-infinite-boundary mode together with its decay diagnosis.
#[derive(Clone, Debug)]
pub struct SibcMode {
    pub mode: ModeVector,
    /// True when the running log-magnitude of the amplitude profile is
    /// negative and still falling at the truncation edge, i.e. the profile
    /// decays toward large site index.
    pub admissible: bool,
}

/// Outcome of a spectral winding computation.
#[derive(Clone, Copy, Debug)]
pub struct WindingResult {
    /// Reference energy the spectrum is wound around.
    pub omega: Complex64,
    /// Integer winding number from the unwrapped determinant phase.
    pub w: i64,
    /// |R(omega)| < 1, the convention-free interior test.
    pub magnitude_test: bool,
    /// Number of twist-angle samples used.
    pub n_theta: usize,
}

/// A traced spectral loop: points ordered by ray angle around the anchor.
#[derive(Clone, Debug)]
pub struct LoopTrace {
    /// Loop points for the successful rays, in increasing ray angle.
    pub points: Vec<Complex64>,
    /// Indices of rays whose bracket or bisection failed.
    pub failed_rays: Vec<usize>,
    /// Interior anchor the rays were cast from.
    pub anchor: Complex64,
}

impl LoopTrace {
    /// Largest distance of a traced point from the anchor.
    pub fn max_radius(&self) -> f64 {
        self.points
            .iter()
            .map(|p| (p - self.anchor).norm())
            .fold(0.0, f64::max)
    }
}

/// The characteristic product R over sites 0..=d, in log representation.
///
/// Returns an exact zero when `energy` coincides with one of the onsite
/// energies, which happens precisely on the analytic open-boundary spectrum.
pub fn r_product(params: &OscillatorParams, nu: i64, d: usize, energy: Complex64) -> LogComplex {
    let mut acc = LogComplex::one();
    for j in 0..=d {
        let num = energy - onsite(params, nu, j);
        if num == Complex64::ZERO {
            return LogComplex::zero();
        }
        acc *= LogComplex::from_complex(num / crate::lattice::hopping(params, nu, j));
    }
    acc
}

/// Scaled energy (E + (i|nu|kappa - nu*omega)) / (i*kappa) entering the
/// continuum approximation of the characteristic product.
pub fn scaled_energy(params: &OscillatorParams, nu: i64, energy: Complex64) -> Complex64 {
    let shift = Complex64::new(-(nu as f64) * params.omega, nu.unsigned_abs() as f64 * params.kappa);
    (energy + shift) / Complex64::new(0.0, params.kappa)
}

fn loop_potential(a: Complex64, lo: f64, hi: f64) -> f64 {
    a.re * a.norm().ln() - a.im * a.arg() - (x_ln_x(lo) + x_ln_x(hi)) / 2.0
}

/// Continuum approximation of `ln|R| / D`.
///
/// Replacing the site sum by an integral gives
///
/// ```text
///   D^-1 ln|R| ~ f(1 + Et/D, 1 + |nu|/D, 1 + 1/D) - f(Et/D, |nu|/D, 1/D)
///   f(A, a, b) = Re(A) ln|A| - Im(A) arg(A) - (a ln a + b ln b)/2
/// ```
///
/// with the scaled energy Et of [`scaled_energy`]. The error against the
/// direct product falls off like 1/D. Evaluation exactly at Et/D = 0 or -1
/// hits the logarithm's branch point and is reported as out of domain.
pub fn scaled_log_r(
    params: &OscillatorParams,
    nu: i64,
    d: usize,
    energy: Complex64,
) -> Result<f64> {
    if d < 2 {
        return Err(Error::DimensionTooSmall(d));
    }
    let df = d as f64;
    let nf = nu.unsigned_abs() as f64;
    let a_low = scaled_energy(params, nu, energy) / df;
    let a_high = a_low + Complex64::ONE;
    // exact hits land within rounding error of the branch points
    if a_low.norm() < 1e-12 || a_high.norm() < 1e-12 {
        return Err(Error::ScaledLogSingularity(a_low));
    }
    Ok(loop_potential(a_high, 1.0 + nf / df, 1.0 + 1.0 / df)
        - loop_potential(a_low, nf / df, 1.0 / df))
}

/// Analytic open-boundary spectrum {nu*omega - i*(2l + |nu|)*kappa/2}.
pub fn obc_spectrum_analytic(spec: &ChainSpec) -> ComplexSpectrum {
    let mut values: Vec<Complex64> = (0..=spec.dim).map(|l| spec.onsite(l)).collect();
    sort_canonical(&mut values);
    ComplexSpectrum { values, method: SpectrumMethod::AnalyticObc, origin: SpectrumOrigin::Chain(*spec) }
}

/// Centroid of the analytic open-boundary spectrum; always strictly inside
/// the periodic-boundary loop.
pub fn obc_centroid(params: &OscillatorParams, nu: i64, d: usize) -> Complex64 {
    let c = d as f64 + nu.unsigned_abs() as f64;
    Complex64::new(nu as f64 * params.omega, -params.kappa * c / 2.0)
}

pub(crate) fn complex_eigenvalues(matrix: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    matrix
        .eigenvalues()
        .map(|v| v.iter().copied().collect())
        .ok_or(Error::EigensolverFailed { size: matrix.nrows() })
}

/// One Newton update target for the periodic/twisted characteristic
/// equation R(E) = exp(-i*theta): residual of log R against the nearest
/// branch, and the logarithmic derivative sum 1/(E - h_j).
fn characteristic_residual(
    params: &OscillatorParams,
    nu: i64,
    d: usize,
    theta: f64,
    energy: Complex64,
) -> Option<(Complex64, Complex64)> {
    let r = r_product(params, nu, d, energy);
    if r.is_zero() {
        return None;
    }
    let mut wrapped = (r.phase + theta).rem_euclid(2.0 * PI);
    if wrapped > PI {
        wrapped -= 2.0 * PI;
    }
    let residual = Complex64::new(r.log_mag, wrapped);
    let mut slope = Complex64::ZERO;
    for j in 0..=d {
        slope += (energy - onsite(params, nu, j)).inv();
    }
    Some((residual, slope))
}

/// Polish a raw eigenvalue onto the characteristic equation, staying within
/// half the local root spacing. Returns the raw value unchanged when the
/// iteration would leave that trust region or fails to converge.
fn polish_eigenvalue(
    params: &OscillatorParams,
    nu: i64,
    d: usize,
    theta: f64,
    raw: Complex64,
) -> Complex64 {
    let Some((res0, slope0)) = characteristic_residual(params, nu, d, theta, raw) else {
        return raw;
    };
    if slope0 == Complex64::ZERO {
        return raw;
    }
    // Adjacent roots differ by 2*pi in arg R, so their spacing is roughly
    // 2*pi/|d log R / dE|.
    let trust = PI / slope0.norm();
    let mut e = raw;
    let mut res = res0;
    let mut slope = slope0;
    for _ in 0..16 {
        if res.norm() < 1e-13 {
            break;
        }
        let next = e - res / slope;
        if !next.re.is_finite() || !next.im.is_finite() || (next - raw).norm() > trust {
            return raw;
        }
        e = next;
        match characteristic_residual(params, nu, d, theta, e) {
            Some((r, s)) if s != Complex64::ZERO => {
                res = r;
                slope = s;
            }
            _ => return raw,
        }
    }
    if res.norm() <= res0.norm() {
        e
    } else {
        raw
    }
}

/// Numeric spectrum of a periodic or twisted chain.
///
/// The dense eigensolver's output is polished by Newton iteration on the
/// characteristic product: the chain matrix is strongly non-normal, so raw
/// backward-stable eigenvalues can sit ~1e-3 off the true roots even at
/// D = 50. Polishing is trust-region limited to half the local root
/// spacing, so a raw value is never pulled across to a neighbouring root;
/// where the raw error already exceeds that spacing (deep interior modes at
/// D of several hundred) the raw value is kept as-is.
pub fn pbc_spectrum_numeric(spec: &ChainSpec) -> Result<ComplexSpectrum> {
    let theta = match spec.bc {
        BoundaryCondition::Periodic => 0.0,
        BoundaryCondition::Twisted { theta } => theta,
        BoundaryCondition::Open => {
            return Err(Error::WrongBoundary { required: "periodic or twisted" })
        }
    };
    let matrix = spec.build_matrix()?;
    let mut values = complex_eigenvalues(&matrix)?;
    for v in values.iter_mut() {
        *v = polish_eigenvalue(&spec.params, spec.nu, spec.dim, theta, *v);
    }
    sort_canonical(&mut values);
    Ok(ComplexSpectrum {
        values,
        method: SpectrumMethod::NumericEigensolver,
        origin: SpectrumOrigin::Chain(*spec),
    })
}

/// Open-boundary eigenstate for level l, from the exact bidiagonal
/// recurrence rho_{j+1} = (E_l - h_j) rho_j / t_j with rho_0 = 1, then
/// unit-normalized.
///
/// The recurrence terminates exactly at site l (the factor vanishes), so
/// the state is supported on sites 0..=l. For nu = 0 the amplitudes are
/// proportional to (-1)^j C(l, j). Printed closed forms for these states
/// are easy to get wrong; the recurrence is exact for a bidiagonal matrix
/// and is what everything downstream uses.
pub fn obc_eigenstate(spec: &ChainSpec, level: usize) -> Result<ModeVector> {
    if level > spec.dim {
        return Err(Error::LevelOutOfRange { level, dim: spec.dim });
    }
    let energy = spec.onsite(level);
    let mut amplitudes = vec![Complex64::ZERO; spec.sites()];
    amplitudes[0] = Complex64::ONE;
    let mut scale_guard = 1.0;
    for j in 0..level {
        let next = (energy - spec.onsite(j)) * amplitudes[j] / spec.hopping(j);
        amplitudes[j + 1] = next;
        // binomial growth can overflow far beyond desk scale; renormalize early
        if next.norm() > 1e150 {
            let s = next.norm();
            for a in amplitudes.iter_mut().take(j + 2) {
                *a /= s;
            }
            scale_guard *= s;
        }
    }
    let _ = scale_guard;
    let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in amplitudes.iter_mut() {
        *a /= norm;
    }
    Ok(ModeVector {
        amplitudes,
        energy,
        kind: ModeKind::ObcEigenstate,
        nu: spec.nu,
        normalization: Normalization::UnitEuclidean,
    })
}

/// Semi-infinite-boundary mode at a given energy, truncated at site `len`.
///
/// Amplitudes follow rho_0 = 1, rho_{j+1} = (E - h_j)/t_j * rho_j over
/// sites 0..=len. The admissibility flag reports whether the running
/// magnitude profile decays: the cumulative ln|R| at the truncation edge is
/// negative and below its midpoint value (or the profile terminated on an
/// exact zero). Energies outside the spectral loop produce a divergent
/// profile and a false flag.
pub fn sibc_mode(
    params: &OscillatorParams,
    nu: i64,
    energy: Complex64,
    len: usize,
) -> Result<SibcMode> {
    if len < 1 {
        return Err(Error::DimensionTooSmall(len));
    }
    let mut amplitudes = vec![Complex64::ZERO; len + 1];
    amplitudes[0] = Complex64::ONE;
    let mut cumulative = Vec::with_capacity(len);
    let mut running = 0.0_f64;
    let mut terminated = false;
    for j in 0..len {
        let gamma = (energy - onsite(params, nu, j)) / crate::lattice::hopping(params, nu, j);
        amplitudes[j + 1] = gamma * amplitudes[j];
        if amplitudes[j + 1] == Complex64::ZERO {
            terminated = true;
            break;
        }
        running += gamma.norm().ln();
        cumulative.push(running);
    }
    let admissible = if terminated {
        true
    } else {
        let last = *cumulative.last().expect("len >= 1");
        let mid = cumulative[(cumulative.len() - 1) / 2];
        last < 0.0 && last < mid
    };
    Ok(SibcMode {
        mode: ModeVector {
            amplitudes,
            energy,
            kind: ModeKind::SibcSkinMode,
            nu,
            normalization: Normalization::FirstSiteOne,
        },
        admissible,
    })
}

/// Trace the |R| = 1 spectral loop by radial bisection from the
/// open-boundary centroid.
///
/// Casts `n_angles` rays from the anchor, brackets the sign change of
/// ln|R| by doubling the radius, then bisects until the residual drops
/// below 1e-8. Rays that fail to bracket are reported in `failed_rays`
/// rather than silently dropped.
pub fn loop_trace(
    params: &OscillatorParams,
    nu: i64,
    d: usize,
    n_angles: usize,
) -> Result<LoopTrace> {
    const MIN_ANGLES: usize = 16;
    const RESIDUAL_TOL: f64 = 1e-8;
    if n_angles < MIN_ANGLES {
        return Err(Error::TooFewAngles { min: MIN_ANGLES, got: n_angles });
    }
    let anchor = obc_centroid(params, nu, d);
    let log_r = |e: Complex64| -> f64 {
        let r = r_product(params, nu, d, e);
        if r.is_zero() {
            f64::NEG_INFINITY
        } else {
            r.log_mag
        }
    };
    let mut points = Vec::with_capacity(n_angles);
    let mut failed_rays = Vec::new();
    for k in 0..n_angles {
        let phi = 2.0 * PI * k as f64 / n_angles as f64;
        let dir = Complex64::from_polar(1.0, phi);
        let mut lo = 0.0_f64;
        let mut hi = params.kappa * (d as f64 + 1.0) * 0.1;
        let mut bracketed = false;
        for _ in 0..64 {
            if log_r(anchor + hi * dir) > 0.0 {
                bracketed = true;
                break;
            }
            lo = hi;
            hi *= 2.0;
        }
        if !bracketed {
            failed_rays.push(k);
            continue;
        }
        let mut found = None;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let g = log_r(anchor + mid * dir);
            if g.abs() < RESIDUAL_TOL {
                found = Some(anchor + mid * dir);
                break;
            }
            if g < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= f64::EPSILON * hi.abs() {
                break;
            }
        }
        match found {
            Some(p) => points.push(p),
            None => failed_rays.push(k),
        }
    }
    Ok(LoopTrace { points, failed_rays, anchor })
}

/// Band half-width on |ln|R|| inside which winding queries are refused.
pub const WINDING_GUARD_BAND: f64 = 1e-3;

/// Spectral winding number of the twisted chain family around a reference
/// energy.
///
/// The twisted determinant has a two-term closed form. Expanding
/// det(H(theta) - Omega) down the first column: the (0,0) entry multiplies
/// the upper-bidiagonal minor, giving prod_j (h_j - Omega); the wrap entry
/// e^{-i theta} t_D in row D carries sign (-1)^D and multiplies a lower
/// triangular minor whose diagonal is t_0..t_{D-1}. Hence
///
/// ```text
///   det(H(theta) - Omega) = prod_j (h_j - Omega)
///                         + (-1)^D e^{-i theta} prod_j t_j
/// ```
///
/// a circle a + b e^{-i theta} in the complex plane, which winds around the
/// origin exactly -1 times when |b| > |a| and 0 times otherwise. Since
/// |R(Omega)| = |a| / |b|, the winding is -1 iff |R(Omega)| < 1; both the
/// unwrapped phase count and that magnitude test are returned. Reference
/// energies within [`WINDING_GUARD_BAND`] of the loop are rejected as
/// ambiguous.
pub fn winding_number(
    params: &OscillatorParams,
    nu: i64,
    d: usize,
    omega: Complex64,
    n_theta: usize,
) -> Result<WindingResult> {
    const MIN_THETA: usize = 64;
    if n_theta < MIN_THETA {
        return Err(Error::TooFewAngles { min: MIN_THETA, got: n_theta });
    }

    // log-domain a = prod (h_j - Omega) and b = (-1)^D prod t_j
    let mut a = LogComplex::one();
    for j in 0..=d {
        a *= LogComplex::from_complex(onsite(params, nu, j) - omega);
    }
    let mut b = LogComplex::one();
    for j in 0..=d {
        b *= LogComplex::from_complex(crate::lattice::hopping(params, nu, j));
    }
    if d % 2 == 1 {
        b = b * LogComplex::from_complex(-Complex64::ONE);
    }

    if a.is_zero() {
        // Omega is an open-boundary eigenvalue: det = b e^{-i theta} winds -1.
        return Ok(WindingResult { omega, w: -1, magnitude_test: true, n_theta });
    }

    let log_abs_r = a.log_mag - b.log_mag;
    if log_abs_r.abs() < WINDING_GUARD_BAND {
        return Err(Error::OnLoopBand { value: log_abs_r, band: WINDING_GUARD_BAND });
    }

    // Rescale by the larger magnitude; the winding is scale-invariant.
    let m = a.log_mag.max(b.log_mag);
    let za = Complex64::from_polar((a.log_mag - m).exp(), a.phase);
    let zb = Complex64::from_polar((b.log_mag - m).exp(), b.phase);
    let mut phases: Vec<f64> = (0..=n_theta)
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / n_theta as f64;
            (za + zb * Complex64::from_polar(1.0, -theta)).arg()
        })
        .collect();
    unwrap_phases(&mut phases);
    let w = ((phases[n_theta] - phases[0]) / (2.0 * PI)).round() as i64;
    Ok(WindingResult { omega, w, magnitude_test: log_abs_r < 0.0, n_theta })
}

/// Partial sum of the loop-boundary derivative kernel,
/// sum_j (j + |nu|/2 + Ey) / ((j + |nu|/2 + Ey)^2 + (Ex - nu*omega/kappa)^2)
/// with E scaled by kappa. Diverges logarithmically with the truncation,
/// which is the point: the increment from D to 2D tends to ln 2.
pub fn ridge_divergence_sum(
    params: &OscillatorParams,
    nu: i64,
    d: usize,
    energy: Complex64,
) -> f64 {
    let scaled = energy / params.kappa;
    let half_nu = nu.unsigned_abs() as f64 / 2.0;
    let offset = scaled.re - nu as f64 * params.omega / params.kappa;
    let mut sum = 0.0;
    for j in 0..=d {
        let y = j as f64 + half_nu + scaled.im;
        sum += y / (y * y + offset * offset);
    }
    sum
}

/// Total probability density of all unit-normalized open-boundary
/// eigenstates, per site.
pub fn skin_effect_density(spec: &ChainSpec) -> Result<Vec<f64>> {
    if !spec.bc.is_open() {
        return Err(Error::WrongBoundary { required: "open" });
    }
    let mut density = vec![0.0; spec.sites()];
    for level in 0..=spec.dim {
        let state = obc_eigenstate(spec, level)?;
        for (d, a) in density.iter_mut().zip(&state.amplitudes) {
            *d += a.norm_sqr();
        }
    }
    Ok(density)
}
