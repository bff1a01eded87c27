//! Exact rational scalars used for breakpoints and probe values.

use num_rational::Ratio;

/// Exact rational number. All breakpoints, probes, and grid values are
/// `Rational`; no floating point appears anywhere in the calculus.
pub type Rational = Ratio<i64>;

/// Build a rational from a numerator/denominator pair.
///
/// # Panics
/// Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Ratio::new(num, den)
}

/// Build a rational from an integer.
pub fn rat_int(num: i64) -> Rational {
    Ratio::from_integer(num)
}
