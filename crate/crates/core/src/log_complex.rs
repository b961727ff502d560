//! Log-domain complex numbers for products with huge dynamic range.
//!
//! A nonzero value is stored as `exp(log_mag + i*phase)`. Multiplication adds
//! the two fields componentwise, so products of thousands of factors neither
//! overflow nor lose their accumulated argument. The phase is deliberately
//! *not* reduced modulo 2*pi: winding counts need the total argument.

use std::ops::{Mul, MulAssign};

use num_complex::Complex64;

/// A complex number kept as natural log of magnitude plus accumulated phase.
///
/// Exact zeros are tracked by a separate flag; `log_mag` and `phase` are
/// meaningless while `zero` is set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogComplex {
    /// ln |z| of the represented value.
    pub log_mag: f64,
    /// Accumulated argument in radians, not reduced mod 2*pi.
    pub phase: f64,
    /// Marks an exact zero.
    pub zero: bool,
}

impl LogComplex {
    /// The multiplicative identity.
    pub fn one() -> Self {
        Self { log_mag: 0.0, phase: 0.0, zero: false }
    }

    /// An exact zero.
    pub fn zero() -> Self {
        Self { log_mag: f64::NEG_INFINITY, phase: 0.0, zero: true }
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    /// Lift an ordinary complex number; the phase starts at its principal
    /// argument.
    pub fn from_complex(z: Complex64) -> Self {
        if z == Complex64::ZERO {
            Self::zero()
        } else {
            Self { log_mag: z.norm().ln(), phase: z.arg(), zero: false }
        }
    }

    /// Collapse back to a complex number. Magnitudes outside f64 range
    /// saturate to 0 or infinity.
    pub fn to_complex(&self) -> Complex64 {
        if self.zero {
            Complex64::ZERO
        } else {
            Complex64::from_polar(self.log_mag.exp(), self.phase)
        }
    }

    /// Phase folded back to (-pi, pi].
    pub fn principal_phase(&self) -> f64 {
        use std::f64::consts::PI;
        let p = self.phase.rem_euclid(2.0 * PI);
        if p > PI {
            p - 2.0 * PI
        } else {
            p
        }
    }
}

impl Mul for LogComplex {
    type Output = LogComplex;

    fn mul(self, rhs: LogComplex) -> LogComplex {
        if self.zero || rhs.zero {
            LogComplex::zero()
        } else {
            LogComplex {
                log_mag: self.log_mag + rhs.log_mag,
                phase: self.phase + rhs.phase,
                zero: false,
            }
        }
    }
}

impl MulAssign for LogComplex {
    fn mul_assign(&mut self, rhs: LogComplex) {
        *self = *self * rhs;
    }
}

impl std::iter::Product for LogComplex {
    fn product<I: Iterator<Item = LogComplex>>(iter: I) -> Self {
        iter.fold(LogComplex::one(), |acc, x| acc * x)
    }
}
