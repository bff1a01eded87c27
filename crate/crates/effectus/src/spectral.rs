//! Spectral resolutions: exact left-continuous step functions from the
//! rationals into an effect algebra, and their bijection with discrete
//! bounded observables.
//!
//! A resolution `B` is stored as a jump list: breakpoints `t_1 < … < t_n`
//! with post-jump cumulative values `c_1 ≤ … ≤ c_n`, meaning
//!
//! ```text
//! B(t) = 0    for t ≤ t_1
//! B(t) = c_j  for t_j < t ≤ t_{j+1}
//! B(t) = 1    for t > t_n   (c_n = 1)
//! ```
//!
//! Left-continuity is thus true by representation: the value on a
//! half-open interval `(t_j, t_{j+1}]` is constant, and evaluation at a
//! breakpoint returns the value *before* the jump. Validity checks reduce
//! to monotonicity of the values and normalization of the top value.

use std::sync::Arc;

use thiserror::Error;

use crate::algebra::{EffectAlgebra, Element};
use crate::observable::Observable;
use crate::rational::Rational;

/// Errors raised while constructing a spectral resolution.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpectralError {
    #[error("breakpoints and values must have equal, nonzero length (got {breakpoints} and {values})")]
    LengthMismatch { breakpoints: usize, values: usize },
    #[error("breakpoints must be strictly increasing (violated at position {position})")]
    UnsortedBreakpoints { position: usize },
    #[error("values must be nondecreasing in the algebra order (violated at position {position})")]
    NonMonotone { position: usize },
    #[error("the final value must be 1 (a resolution must be normalized)")]
    NotNormalized,
    #[error("value at position {position} does not belong to the algebra")]
    ForeignValue { position: usize },
}

/// A left-continuous nondecreasing step function with values in a finite
/// effect algebra, normalized from 0 to 1. Canonical: no two adjacent
/// stored values are equal (and the implicit leading 0 is not repeated).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralResolution {
    algebra: Arc<EffectAlgebra>,
    breakpoints: Vec<Rational>,
    values: Vec<Element>,
}

impl SpectralResolution {
    /// Validate and canonicalize a jump list into a resolution.
    ///
    /// `values[j]` is the value of `B` just after `breakpoints[j]`; the
    /// last value must be 1. Adjacent equal values (including a leading 0)
    /// are merged away.
    pub fn new(
        algebra: Arc<EffectAlgebra>,
        breakpoints: Vec<Rational>,
        values: Vec<Element>,
    ) -> Result<Self, SpectralError> {
        if breakpoints.is_empty() || breakpoints.len() != values.len() {
            return Err(SpectralError::LengthMismatch {
                breakpoints: breakpoints.len(),
                values: values.len(),
            });
        }
        for (i, w) in breakpoints.windows(2).enumerate() {
            if w[0] >= w[1] {
                return Err(SpectralError::UnsortedBreakpoints { position: i + 1 });
            }
        }
        for (i, v) in values.iter().enumerate() {
            if !algebra.contains(v) {
                return Err(SpectralError::ForeignValue { position: i });
            }
        }
        let mut prev = algebra.zero();
        for (i, v) in values.iter().enumerate() {
            if !algebra.leq(&prev, v) {
                return Err(SpectralError::NonMonotone { position: i });
            }
            prev = v.clone();
        }
        if *values.last().unwrap() != algebra.one() {
            return Err(SpectralError::NotNormalized);
        }

        let mut bp = Vec::with_capacity(breakpoints.len());
        let mut vs: Vec<Element> = Vec::with_capacity(values.len());
        for (t, v) in breakpoints.into_iter().zip(values) {
            let prev = vs.last().cloned().unwrap_or_else(|| algebra.zero());
            if v != prev {
                bp.push(t);
                vs.push(v);
            }
        }
        Ok(SpectralResolution {
            algebra,
            breakpoints: bp,
            values: vs,
        })
    }

    pub fn algebra(&self) -> &Arc<EffectAlgebra> {
        &self.algebra
    }

    /// Jump positions, strictly increasing.
    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    /// Post-jump cumulative values; same length as `breakpoints`, strictly
    /// increasing in the algebra order, ending at 1.
    pub fn values(&self) -> &[Element] {
        &self.values
    }

    /// Evaluate `B(t)`. At a breakpoint this returns the pre-jump value
    /// (the function is left-continuous with value `x((−∞, t))`).
    pub fn eval(&self, t: Rational) -> Element {
        // Number of breakpoints strictly below t.
        let k = self.breakpoints.partition_point(|&bp| bp < t);
        if k == 0 {
            self.algebra.zero()
        } else {
            self.values[k - 1].clone()
        }
    }

    /// The unique discrete observable with this resolution: support at the
    /// breakpoints, mass `c_j − c_{j−1}` at the j-th breakpoint.
    pub fn to_observable(&self) -> Observable {
        let mut points = Vec::with_capacity(self.breakpoints.len());
        let mut prev = self.algebra.zero();
        for (t, v) in self.breakpoints.iter().zip(self.values.iter()) {
            let mass = self
                .algebra
                .diff(&prev, v)
                .expect("resolution values are nondecreasing");
            points.push((*t, mass));
            prev = v.clone();
        }
        Observable::discrete(Arc::clone(&self.algebra), points)
            .expect("a valid resolution always converts to an observable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn c2() -> Arc<EffectAlgebra> {
        Arc::new(EffectAlgebra::chain(2).unwrap())
    }

    fn el(c: u32) -> Element {
        Element::Product(vec![c])
    }

    fn res(alg: &Arc<EffectAlgebra>, bp: &[i64], vals: &[u32]) -> SpectralResolution {
        SpectralResolution::new(
            Arc::clone(alg),
            bp.iter().map(|&t| rat_int(t)).collect(),
            vals.iter().map(|&v| el(v)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn question_resolution_evaluates_piecewise() {
        let alg = c2();
        let b = res(&alg, &[0, 1], &[1, 2]);
        assert_eq!(b.eval(rat_int(-100)), el(0));
        assert_eq!(b.eval(rat_int(0)), el(0), "pre-jump at the breakpoint");
        assert_eq!(b.eval(rat(1, 2)), el(1));
        assert_eq!(b.eval(rat_int(1)), el(1), "pre-jump at the breakpoint");
        assert_eq!(b.eval(rat(3, 2)), el(2));
        assert_eq!(b.eval(rat_int(100)), el(2));
    }

    #[test]
    fn point_mass_resolution() {
        let alg = c2();
        let b = res(&alg, &[0], &[2]);
        assert_eq!(b.eval(rat_int(0)), el(0));
        assert_eq!(b.eval(rat(1, 1000)), el(2));
    }

    #[test]
    fn invalid_resolutions_rejected() {
        let alg = c2();
        let err = SpectralResolution::new(
            Arc::clone(&alg),
            vec![rat_int(0), rat_int(1)],
            vec![el(2), el(1)],
        )
        .unwrap_err();
        assert_eq!(err, SpectralError::NonMonotone { position: 1 });

        let err = SpectralResolution::new(
            Arc::clone(&alg),
            vec![rat_int(0), rat_int(1)],
            vec![el(1), el(1)],
        )
        .unwrap_err();
        assert_eq!(err, SpectralError::NotNormalized);

        let err = SpectralResolution::new(
            Arc::clone(&alg),
            vec![rat_int(1), rat_int(0)],
            vec![el(1), el(2)],
        )
        .unwrap_err();
        assert_eq!(err, SpectralError::UnsortedBreakpoints { position: 1 });

        let err =
            SpectralResolution::new(Arc::clone(&alg), vec![], vec![]).unwrap_err();
        assert!(matches!(err, SpectralError::LengthMismatch { .. }));

        let err = SpectralResolution::new(
            Arc::clone(&alg),
            vec![rat_int(0)],
            vec![Element::Product(vec![7])],
        )
        .unwrap_err();
        assert_eq!(err, SpectralError::ForeignValue { position: 0 });
    }

    #[test]
    fn canonicalization_merges_trivial_breakpoints() {
        let alg = c2();
        let b = SpectralResolution::new(
            Arc::clone(&alg),
            vec![rat_int(0), rat_int(1), rat_int(2)],
            vec![el(1), el(1), el(2)],
        )
        .unwrap();
        assert_eq!(b, res(&alg, &[0, 2], &[1, 2]));

        // A leading zero value contributes no jump.
        let b = SpectralResolution::new(
            Arc::clone(&alg),
            vec![rat_int(-1), rat_int(0), rat_int(1)],
            vec![el(0), el(1), el(2)],
        )
        .unwrap();
        assert_eq!(b, res(&alg, &[0, 1], &[1, 2]));

        // Canonicalization is idempotent.
        let again = SpectralResolution::new(
            Arc::clone(&alg),
            b.breakpoints().to_vec(),
            b.values().to_vec(),
        )
        .unwrap();
        assert_eq!(again, b);
    }

    #[test]
    fn observable_resolution_round_trip() {
        let alg = c2();
        let q1 = Observable::question(Arc::clone(&alg), &el(1)).unwrap();
        let b = q1.resolution();
        assert_eq!(b.breakpoints(), &[rat_int(0), rat_int(1)]);
        assert_eq!(b.values(), &[el(1), el(2)]);
        assert_eq!(b.to_observable(), q1);

        let o = Observable::neutral(Arc::clone(&alg));
        let b = o.resolution();
        assert_eq!(b.breakpoints(), &[rat_int(0)]);
        assert_eq!(b.values(), &[el(2)]);
        assert_eq!(b.to_observable(), o);

        let x = Observable::discrete(
            Arc::clone(&alg),
            vec![(rat_int(-1), el(1)), (rat_int(1), el(1))],
        )
        .unwrap();
        let b = x.resolution();
        assert_eq!(b.breakpoints(), &[rat_int(-1), rat_int(1)]);
        assert_eq!(b.values(), &[el(1), el(2)]);
        assert_eq!(b.to_observable(), x);

        // The other direction: resolution → observable → resolution.
        let b = res(&alg, &[0, 1], &[1, 2]);
        assert_eq!(b.to_observable().resolution(), b);

        let c1 = Arc::new(EffectAlgebra::chain(1).unwrap());
        let b = SpectralResolution::new(
            Arc::clone(&c1),
            vec![rat_int(5)],
            vec![Element::Product(vec![1])],
        )
        .unwrap();
        let pm = b.to_observable();
        assert_eq!(pm.support(), &[(rat_int(5), Element::Product(vec![1]))]);
    }

    #[test]
    fn eval_is_monotone_and_left_continuous() {
        let alg = c2();
        let b = res(&alg, &[0, 1], &[1, 2]);
        let probes: Vec<Rational> = (-6..=6).map(|k| rat(k, 2)).collect();
        for w in probes.windows(2) {
            assert!(alg.leq(&b.eval(w[0]), &b.eval(w[1])));
        }
        // Left-continuity: just below each breakpoint the value agrees with
        // the value at the breakpoint.
        for &s in b.breakpoints() {
            assert_eq!(b.eval(s), b.eval(s - rat(1, 1000)));
        }
        assert_eq!(b.eval(rat_int(-10)), alg.zero());
        assert_eq!(b.eval(rat_int(10)), alg.one());
    }
}
