//! Small numeric helpers shared across modules.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::log_complex::LogComplex;

/// Natural log of the gamma function.
pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// ln n! evaluated through the gamma function.
pub fn ln_factorial(n: usize) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// ln C(n, k) for 0 <= k <= n.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    debug_assert!(k <= n);
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// x ln x extended by continuity to 0 at x = 0.
pub fn x_ln_x(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Sort complex values canonically: by real part, then imaginary part.
pub fn sort_canonical(values: &mut [Complex64]) {
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Determinant of a dense complex matrix in log representation.
///
/// Plain LU with partial pivoting; the diagonal of U is accumulated as a
/// [`LogComplex`] so determinants far outside f64 range keep a usable
/// magnitude and phase.
pub fn log_det(matrix: &DMatrix<Complex64>) -> LogComplex {
    let n = matrix.nrows();
    assert_eq!(n, matrix.ncols(), "log_det requires a square matrix");
    let mut a = matrix.clone();
    let mut det = LogComplex::one();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[(i, col)].norm_sqr().total_cmp(&a[(j, col)].norm_sqr()))
            .unwrap();
        if a[(pivot_row, col)] == Complex64::ZERO {
            return LogComplex::zero();
        }
        if pivot_row != col {
            a.swap_rows(pivot_row, col);
            det = det * LogComplex::from_complex(Complex64::new(-1.0, 0.0));
        }
        let pivot = a[(col, col)];
        det = det * LogComplex::from_complex(pivot);
        for row in col + 1..n {
            let factor = a[(row, col)] / pivot;
            if factor != Complex64::ZERO {
                for k in col..n {
                    let sub = factor * a[(col, k)];
                    a[(row, k)] -= sub;
                }
            }
        }
    }
    det
}

/// Unwrap a sequence of phases in place, removing 2*pi jumps between
/// consecutive samples.
pub fn unwrap_phases(phases: &mut [f64]) {
    use std::f64::consts::PI;
    let mut correction = 0.0;
    for i in 1..phases.len() {
        let raw = phases[i] + correction;
        let diff = raw - phases[i - 1];
        if diff > PI {
            correction -= 2.0 * PI * ((diff + PI) / (2.0 * PI)).floor();
        } else if diff < -PI {
            correction += 2.0 * PI * ((-diff + PI) / (2.0 * PI)).floor();
        }
        phases[i] += correction;
    }
}

/// Least-squares slope of y against x.
///
/// Returns `None` when fewer than two samples are given or x is degenerate.
pub fn linear_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    debug_assert_eq!(x.len(), y.len());
    let n = x.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
    }
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}
