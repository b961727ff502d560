//! Point-gap topology of the bare annihilation operator.
//!
//! On the Fock lattice the annihilation operator is a one-way hopping model
//! with site-dependent strength t_j = sqrt(j+1). Truncated periodically it
//! carries a spectral loop whose radius grows like sqrt(D/e); its
//! semi-infinite edge modes are exactly the coherent states, and the p-th
//! operator power winds -p with a p-fold degenerate mode set.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::BoundaryCondition;
use crate::log_complex::LogComplex;
use crate::numeric::{ln_gamma, log_det, sort_canonical, unwrap_phases};
use crate::spectral::{
    ComplexSpectrum, ModeKind, ModeVector, Normalization, SpectrumMethod, SpectrumOrigin,
    WindingResult,
};

/// Truncated annihilation-operator lattice: sites 0..=dim, a boundary
/// closure, and the operator power under study.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnihilationSpec {
    pub dim: usize,
    pub bc: BoundaryCondition,
    /// Operator power p >= 1.
    pub power: u32,
}

impl AnnihilationSpec {
    pub fn new(dim: usize, bc: BoundaryCondition, power: u32) -> Self {
        Self { dim, bc, power }
    }
}

/// A coherent state along with its measured eigen-residual.
#[derive(Clone, Debug)]
pub struct CoherentMode {
    pub mode: ModeVector,
    /// ||a v - alpha v|| / ||v|| on the truncated lattice.
    pub residual: f64,
}

/// The p-fold degenerate coherent set of the p-th operator power.
#[derive(Clone, Debug)]
pub struct DegenerateModeSet {
    pub modes: Vec<ModeVector>,
    /// ||a^p v - E v|| / ||v|| per mode.
    pub residuals: Vec<f64>,
    /// Smallest singular value of the stacked mode matrix; strictly
    /// positive means the set is linearly independent.
    pub min_singular_value: f64,
}

/// The truncated annihilation matrix.
///
/// Upper shift with t_j = sqrt(j+1); periodic closure puts t_D = sqrt(D+1)
/// at entry (D, 0). The twisted variant distributes the twist over the
/// whole ring: every link, wrap included, picks up exp(-i*theta/(D+1)),
/// so one full period rotates the spectrum onto itself.
pub fn build_annihilation(spec: &AnnihilationSpec) -> Result<DMatrix<Complex64>> {
    if spec.dim < 1 {
        return Err(Error::DimensionTooSmall(spec.dim));
    }
    if spec.power < 1 {
        return Err(Error::PowerTooSmall);
    }
    let n = spec.dim + 1;
    let link_phase = match spec.bc {
        BoundaryCondition::Open | BoundaryCondition::Periodic => Complex64::ONE,
        BoundaryCondition::Twisted { theta } => Complex64::from_polar(1.0, -theta / n as f64),
    };
    let mut m = DMatrix::zeros(n, n);
    for j in 0..spec.dim {
        m[(j, j + 1)] = link_phase * ((j + 1) as f64).sqrt();
    }
    if !spec.bc.is_open() {
        m[(spec.dim, 0)] = link_phase * (n as f64).sqrt();
    }
    Ok(m)
}

/// Loop radius of the periodically closed operator,
/// ((D+1)!)^(1/(2(D+1))), evaluated through the log-gamma function.
pub fn pbc_loop_radius(dim: usize) -> f64 {
    (ln_gamma(dim as f64 + 2.0) / (2.0 * (dim as f64 + 1.0))).exp()
}

/// Roots of the periodic characteristic equation.
///
/// Cofactor expansion of det(a_PBC - E) gives E^(D+1) = sqrt((D+1)!), so
/// the D+1 roots sit on the circle of radius [`pbc_loop_radius`] at angles
/// 2*pi*l/(D+1), including the positive real axis. (Printed forms of this
/// equation differ by an overall sign, which rotates the root set by
/// pi/(D+1); the convention here is fixed by matching the numeric
/// eigensolver.)
pub fn pbc_roots_analytic(dim: usize) -> Result<ComplexSpectrum> {
    if dim < 1 {
        return Err(Error::DimensionTooSmall(dim));
    }
    let radius = pbc_loop_radius(dim);
    let n = dim + 1;
    let mut values: Vec<Complex64> = (0..n)
        .map(|l| Complex64::from_polar(radius, 2.0 * PI * l as f64 / n as f64))
        .collect();
    sort_canonical(&mut values);
    Ok(ComplexSpectrum {
        values,
        method: SpectrumMethod::AnalyticRoots,
        origin: SpectrumOrigin::Annihilation { dim },
    })
}

/// Numeric spectrum of a truncated annihilation lattice.
pub fn annihilation_spectrum_numeric(spec: &AnnihilationSpec) -> Result<ComplexSpectrum> {
    let matrix = build_annihilation(spec)?;
    let mut values = crate::spectral::complex_eigenvalues(&matrix)?;
    sort_canonical(&mut values);
    Ok(ComplexSpectrum {
        values,
        method: SpectrumMethod::NumericEigensolver,
        origin: SpectrumOrigin::Annihilation { dim: spec.dim },
    })
}

/// Poisson tail e^{-|a|^2} sum_{j>len} |a|^{2j}/j! left outside the
/// truncation.
fn coherent_tail(alpha_sq: f64, len: usize) -> f64 {
    let mut ln_term = -alpha_sq + (len as f64 + 1.0) * alpha_sq.ln() - ln_gamma(len as f64 + 2.0);
    let mut term = ln_term.exp();
    let mut sum = 0.0;
    for j in (len + 1).. {
        sum += term;
        if term < 1e-250 || j > len + 2_000_000 {
            break;
        }
        ln_term += alpha_sq.ln() - ((j + 1) as f64).ln();
        term = ln_term.exp();
    }
    sum
}

/// Truncated coherent state |alpha> with amplitudes alpha^j / sqrt(j!),
/// evaluated in the log domain, plus its eigen-residual under the open
/// annihilation matrix.
///
/// Errors when the truncation leaves more than 1e-12 of probability
/// outside the kept sites.
pub fn coherent_mode(alpha: Complex64, len: usize) -> Result<CoherentMode> {
    const TAIL_BOUND: f64 = 1e-12;
    if len < 1 {
        return Err(Error::DimensionTooSmall(len));
    }
    let alpha_sq = alpha.norm_sqr();
    let mut amplitudes = vec![Complex64::ZERO; len + 1];
    if alpha == Complex64::ZERO {
        amplitudes[0] = Complex64::ONE;
        return Ok(CoherentMode {
            mode: ModeVector {
                amplitudes,
                energy: alpha,
                kind: ModeKind::Coherent,
                nu: 0,
                normalization: Normalization::UnitEuclidean,
            },
            residual: 0.0,
        });
    }
    let tail = coherent_tail(alpha_sq, len);
    if !(tail < TAIL_BOUND) {
        return Err(Error::TruncationTooSmall { len, alpha_abs: alpha.norm(), tail });
    }
    let ln_mag = alpha.norm().ln();
    let phase = alpha.arg();
    for (j, a) in amplitudes.iter_mut().enumerate() {
        let lm = -alpha_sq / 2.0 + j as f64 * ln_mag - ln_gamma(j as f64 + 1.0) / 2.0;
        *a = Complex64::from_polar(lm.exp(), phase * j as f64);
    }
    let residual = shift_residual(&amplitudes, 1, alpha);
    Ok(CoherentMode {
        mode: ModeVector {
            amplitudes,
            energy: alpha,
            kind: ModeKind::Coherent,
            nu: 0,
            normalization: Normalization::UnitEuclidean,
        },
        residual,
    })
}

/// ||a^p v - E v|| / ||v|| with the open truncated annihilation operator
/// applied p times.
fn shift_residual(v: &[Complex64], p: u32, eigenvalue: Complex64) -> f64 {
    let mut w = v.to_vec();
    for _ in 0..p {
        let n = w.len();
        for j in 0..n {
            w[j] = if j + 1 < n {
                ((j + 1) as f64).sqrt() * w[j + 1]
            } else {
                Complex64::ZERO
            };
        }
    }
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let mut dev = 0.0;
    for (wj, vj) in w.iter().zip(v) {
        dev += (wj - vj * eigenvalue).norm_sqr();
    }
    dev.sqrt() / norm
}

/// Spectral winding of the twisted family (a(theta))^p around a reference
/// energy, from the unwrapped phase of det((a(theta))^p - Omega) on an
/// n_theta grid.
///
/// The locus of the power family is the circle of radius r^p with
/// r = [`pbc_loop_radius`]; references within a relative 1e-3 band of that
/// circle are rejected as ambiguous. The magnitude test reports |Omega| <
/// r^p, the interior condition playing the role |R| < 1 plays for chains.
pub fn winding_power(
    p: u32,
    dim: usize,
    omega: Complex64,
    n_theta: usize,
) -> Result<WindingResult> {
    const MIN_THETA: usize = 64;
    const GUARD: f64 = 1e-3;
    if p < 1 {
        return Err(Error::PowerTooSmall);
    }
    if n_theta < MIN_THETA {
        return Err(Error::TooFewAngles { min: MIN_THETA, got: n_theta });
    }
    let radius_p = pbc_loop_radius(dim).powi(p as i32);
    let gap = (omega.norm() - radius_p) / radius_p;
    if gap.abs() < GUARD {
        return Err(Error::OnLoopBand { value: gap, band: GUARD });
    }

    let base = build_annihilation(&AnnihilationSpec::new(dim, BoundaryCondition::Periodic, p))?;
    let mut base_p = base.clone();
    for _ in 1..p {
        base_p = &base_p * &base;
    }
    let n = dim + 1;
    let identity = DMatrix::<Complex64>::identity(n, n);
    // (a(theta))^p = e^{-i p theta/(D+1)} a_PBC^p: the twist is a scalar
    // phase on every link, so the power family only rotates.
    let mut phases: Vec<f64> = (0..=n_theta)
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / n_theta as f64;
            let rot = Complex64::from_polar(1.0, -(p as f64) * theta / n as f64);
            let m = base_p.map(|x| x * rot) - &identity * omega;
            let det: LogComplex = log_det(&m);
            det.principal_phase()
        })
        .collect();
    unwrap_phases(&mut phases);
    let w = ((phases[n_theta] - phases[0]) / (2.0 * PI)).round() as i64;
    Ok(WindingResult { omega, w, magnitude_test: omega.norm() < radius_p, n_theta })
}

/// The p coherent states degenerate at eigenvalue E of the p-th power:
/// alpha_q = |E|^(1/p) e^{i(arg E + 2 pi q)/p}.
///
/// Residuals under a^p and the smallest singular value of the stacked mode
/// matrix are returned as evidence of degeneracy and linear independence.
pub fn degenerate_modes(p: u32, energy: Complex64, len: usize) -> Result<DegenerateModeSet> {
    if p < 1 {
        return Err(Error::PowerTooSmall);
    }
    if energy == Complex64::ZERO {
        return Err(Error::DegenerateEnergy);
    }
    let root_mag = energy.norm().powf(1.0 / p as f64);
    let base_arg = energy.arg() / p as f64;
    let mut modes = Vec::with_capacity(p as usize);
    let mut residuals = Vec::with_capacity(p as usize);
    for q in 0..p {
        let alpha = Complex64::from_polar(root_mag, base_arg + 2.0 * PI * q as f64 / p as f64);
        let coherent = coherent_mode(alpha, len)?;
        residuals.push(shift_residual(&coherent.mode.amplitudes, p, energy));
        modes.push(coherent.mode);
    }
    let mut stacked = DMatrix::<Complex64>::zeros(len + 1, p as usize);
    for (q, mode) in modes.iter().enumerate() {
        for (j, a) in mode.amplitudes.iter().enumerate() {
            stacked[(j, q)] = *a;
        }
    }
    let min_singular_value = stacked
        .singular_values()
        .iter()
        .fold(f64::INFINITY, |acc, s| acc.min(*s));
    Ok(DegenerateModeSet { modes, residuals, min_singular_value })
}
