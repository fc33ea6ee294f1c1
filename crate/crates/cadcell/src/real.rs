//! Scalar abstraction for the numeric kernel.
//!
//! Everything in [`crate::interval`] and the expression evaluators is generic
//! over a [`Real`] scalar so the same code runs at `f32` or `f64`. The
//! oracles and the catalog pin `f64` through the aliases at the crate root.

use std::fmt::{Debug, Display};

use num_rational::Rational64;
use num_traits::{Float, FromPrimitive};

/// Floating-point scalar with directed-rounding steps.
///
/// `next_up`/`next_down` move one representable value outward; the interval
/// kernel uses them to keep enclosures sound without access to the FPU
/// rounding mode.
pub trait Real:
    Float + FromPrimitive + Debug + Display + Send + Sync + 'static
{
    fn next_up(self) -> Self;
    fn next_down(self) -> Self;

    /// Nearest representable value of an exact rational.
    fn from_rational(r: Rational64) -> Self;

    /// `true` when the rational converts without rounding error.
    fn rational_is_exact(r: Rational64) -> bool;
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            #[inline]
            fn next_up(self) -> Self {
                <$t>::next_up(self)
            }

            #[inline]
            fn next_down(self) -> Self {
                <$t>::next_down(self)
            }

            fn from_rational(r: Rational64) -> Self {
                *r.numer() as $t / *r.denom() as $t
            }

            fn rational_is_exact(r: Rational64) -> bool {
                // Integers of small magnitude and dyadic denominators convert
                // exactly; everything else gets the one-ulp widening.
                let n = *r.numer();
                let d = *r.denom();
                let mantissa_exact = n.unsigned_abs() < (1 << 53);
                mantissa_exact && d > 0 && (d as u64).is_power_of_two()
            }
        }
    };
}

impl_real!(f64);
impl_real!(f32);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_conversion() {
        let half = Rational64::new(1, 2);
        assert_eq!(f64::from_rational(half), 0.5);
        assert!(f64::rational_is_exact(half));
        assert!(!f64::rational_is_exact(Rational64::new(1, 3)));
        assert_eq!(f32::from_rational(Rational64::new(-3, 4)), -0.75);
    }

    #[test]
    fn directed_steps_straddle() {
        let x = 1.0f64;
        assert!(Real::next_up(x) > x);
        assert!(Real::next_down(x) < x);
    }
}
