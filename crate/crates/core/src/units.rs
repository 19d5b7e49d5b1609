//! Frequency unit convention.
//!
//! Every user-facing frequency is a linear frequency in MHz: a coupling written
//! as "25 MHz x 2pi" is stored as `25.0`. Hamiltonians are assembled in angular
//! units (rad/us) by multiplying with 2pi, and all times are in microseconds.

use core::f64::consts::TAU;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Result, WeaveError};

/// A linear frequency in MHz.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd)]
pub struct Frequency(f64);

impl Frequency {
    pub const ZERO: Frequency = Frequency(0.0);

    pub const fn mhz(value: f64) -> Self {
        Frequency(value)
    }

    pub fn try_mhz(value: f64, field: &str) -> Result<Self> {
        if value.is_finite() {
            Ok(Frequency(value))
        } else {
            Err(WeaveError::invalid(field, "frequency must be finite"))
        }
    }

    pub fn from_ghz(value: f64) -> Self {
        Frequency(value * 1e3)
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// Angular frequency in rad/us.
    #[inline]
    pub fn angular(self) -> f64 {
        self.0 * TAU
    }

    pub fn from_angular(rad_per_us: f64) -> Self {
        Frequency(rad_per_us / TAU)
    }

    pub fn abs(self) -> Self {
        Frequency(if self.0 < 0.0 { -self.0 } else { self.0 })
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0.0
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} MHz", self.0)
    }
}

impl Add for Frequency {
    type Output = Frequency;
    fn add(self, rhs: Frequency) -> Frequency {
        Frequency(self.0 + rhs.0)
    }
}

impl Sub for Frequency {
    type Output = Frequency;
    fn sub(self, rhs: Frequency) -> Frequency {
        Frequency(self.0 - rhs.0)
    }
}

impl Neg for Frequency {
    type Output = Frequency;
    fn neg(self) -> Frequency {
        Frequency(-self.0)
    }
}

impl Mul<f64> for Frequency {
    type Output = Frequency;
    fn mul(self, rhs: f64) -> Frequency {
        Frequency(self.0 * rhs)
    }
}

impl Div<f64> for Frequency {
    type Output = Frequency;
    fn div(self, rhs: f64) -> Frequency {
        Frequency(self.0 / rhs)
    }
}

/// The duration of a quarter Rabi period of a resonant pair coupled at `g`:
/// `pi / (2 * 2pi g) = 1 / (4 g)` microseconds.
pub fn quarter_swap_time(g: Frequency) -> f64 {
    1.0 / (4.0 * g.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angular_conversion_round_trips() {
        let g = Frequency::mhz(25.0);
        assert!((g.angular() - 25.0 * TAU).abs() < 1e-12);
        assert_eq!(Frequency::from_angular(g.angular()), g);
        assert_eq!(Frequency::from_ghz(4.5), Frequency::mhz(4500.0));
    }

    #[test]
    fn quarter_swap_of_25_mhz_is_ten_nanoseconds() {
        assert!((quarter_swap_time(Frequency::mhz(25.0)) - 0.01).abs() < 1e-15);
    }

    #[test]
    fn non_finite_rejected() {
        assert!(Frequency::try_mhz(f64::NAN, "omega").is_err());
        assert!(Frequency::try_mhz(f64::INFINITY, "omega").is_err());
    }
}
