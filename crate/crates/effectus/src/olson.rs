//! The Olson (spectral) order on observables, its lattice operations, and
//! the group structure on sharp observables.
//!
//! `x ⪯ y` holds when `B_y(t) ≤ B_x(t)` for every `t` — note the reversal:
//! larger observables have smaller resolutions, since their mass sits
//! further right. For step resolutions the universal quantifier reduces to
//! the merged breakpoint set (plus one point beyond its maximum, where both
//! functions are already 1).
//!
//! Meets and joins under this order are computed pointwise on resolutions:
//! the *meet* of observables is the pointwise *join* of their resolutions,
//! and the *join* of observables the pointwise *meet* — the same reversal
//! again.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::algebra::{EffectAlgebra, Element};
use crate::observable::{ObsError, Observable};
use crate::rational::{rat_int, Rational};
use crate::spectral::SpectralResolution;
use crate::sum::{check_same_algebra, obs_sum};

/// Outcome of comparing two observables in the Olson order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderRelation {
    Less,
    Greater,
    Equal,
    Incomparable,
}

impl fmt::Display for OrderRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            OrderRelation::Less => "LESS",
            OrderRelation::Greater => "GREATER",
            OrderRelation::Equal => "EQUAL",
            OrderRelation::Incomparable => "INCOMPARABLE",
        };
        f.write_str(s)
    }
}

/// Test points sufficient to compare step resolutions pointwise: the merged
/// breakpoints and one probe past the maximum.
fn test_points(resolutions: &[SpectralResolution]) -> Vec<Rational> {
    let mut points: BTreeSet<Rational> = BTreeSet::new();
    for b in resolutions {
        points.extend(b.breakpoints().iter().copied());
    }
    let max = *points.iter().next_back().expect("resolutions are nonempty");
    points.insert(max + rat_int(1));
    points.into_iter().collect()
}

/// Compare two observables in the Olson order.
pub fn olson_compare(x: &Observable, y: &Observable) -> Result<OrderRelation, ObsError> {
    check_same_algebra(x, y)?;
    let alg = x.algebra();
    let bx = x.resolution();
    let by = y.resolution();
    let mut x_below = true; // x ⪯ y, i.e. B_y ≤ B_x everywhere
    let mut y_below = true;
    for t in test_points(&[bx.clone(), by.clone()]) {
        let vx = bx.eval(t);
        let vy = by.eval(t);
        x_below &= alg.leq(&vy, &vx);
        y_below &= alg.leq(&vx, &vy);
        if !x_below && !y_below {
            return Ok(OrderRelation::Incomparable);
        }
    }
    Ok(match (x_below, y_below) {
        (true, true) => OrderRelation::Equal,
        (true, false) => OrderRelation::Less,
        (false, true) => OrderRelation::Greater,
        (false, false) => OrderRelation::Incomparable,
    })
}

/// `x ⪯ y` in the Olson order.
pub fn olson_leq(x: &Observable, y: &Observable) -> Result<bool, ObsError> {
    Ok(matches!(
        olson_compare(x, y)?,
        OrderRelation::Less | OrderRelation::Equal
    ))
}

enum PointwiseOp {
    /// Pointwise join of resolutions — the *meet* of the observables.
    Join,
    /// Pointwise meet of resolutions — the *join* of the observables.
    Meet,
}

fn pointwise(xs: &[Observable], op: PointwiseOp) -> Result<Observable, ObsError> {
    let first = xs.first().ok_or(ObsError::EmptySupport)?;
    for x in &xs[1..] {
        check_same_algebra(first, x)?;
    }
    let alg = first.algebra();
    if !alg.properties().is_lattice {
        return Err(ObsError::RequiresLattice);
    }
    let resolutions: Vec<SpectralResolution> = xs.iter().map(|x| x.resolution()).collect();
    let points = test_points(&resolutions);

    // Value of the combined resolution just after breakpoint points[k] is
    // its value on (points[k], points[k+1]], i.e. the pointwise op of the
    // operands evaluated at the *next* test point (pre-jump); past the last
    // test point everything is 1 already.
    let mut breakpoints = Vec::with_capacity(points.len());
    let mut values = Vec::with_capacity(points.len());
    for k in 0..points.len() {
        let sample = match points.get(k + 1) {
            Some(&next) => next,
            None => points[k] + rat_int(1),
        };
        let mut acc: Option<Element> = None;
        for b in &resolutions {
            let v = b.eval(sample);
            acc = Some(match acc {
                None => v,
                Some(prev) => match op {
                    PointwiseOp::Join => {
                        alg.join(&prev, &v).expect("lattice algebra has joins")
                    }
                    PointwiseOp::Meet => {
                        alg.meet(&prev, &v).expect("lattice algebra has meets")
                    }
                },
            });
        }
        breakpoints.push(points[k]);
        values.push(acc.expect("at least one operand"));
    }
    let resolution = SpectralResolution::new(Arc::clone(alg), breakpoints, values)?;
    Ok(resolution.to_observable())
}

/// Greatest lower bound of finitely many observables in the Olson order
/// (pointwise join of their resolutions). Requires a lattice algebra.
pub fn obs_meet(xs: &[Observable]) -> Result<Observable, ObsError> {
    pointwise(xs, PointwiseOp::Join)
}

/// Least upper bound of finitely many observables in the Olson order
/// (pointwise meet of their resolutions). Requires a lattice algebra.
pub fn obs_join(xs: &[Observable]) -> Result<Observable, ObsError> {
    pointwise(xs, PointwiseOp::Meet)
}

/// The three sharpness characterizations of a discrete observable, checked
/// independently: all masses sharp, all resolution values (cumulative
/// sums) sharp, and all finite unions (subset sums of masses) sharp.
///
/// On RDP algebras the three provably agree; outside RDP they are reported
/// as-is so that disagreement is visible data rather than a hidden choice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SharpnessReport {
    pub masses_sharp: bool,
    pub cumulatives_sharp: bool,
    pub unions_sharp: bool,
}

impl SharpnessReport {
    pub fn all_agree(&self) -> bool {
        self.masses_sharp == self.cumulatives_sharp && self.cumulatives_sharp == self.unions_sharp
    }
}

/// Compute the three-way sharpness report for `x`.
pub fn sharpness_report(x: &Observable) -> SharpnessReport {
    let alg = x.algebra();
    let masses_sharp = x.has_sharp_masses();
    let cumulatives_sharp = x
        .resolution()
        .values()
        .iter()
        .all(|v| alg.is_sharp(v));

    // Subset sums: every finite union A of support points has x(A) sharp.
    // Subsums of a summable family are always defined.
    let masses: Vec<Element> = x.support().iter().map(|(_, m)| m.clone()).collect();
    let n = masses.len();
    let mut unions_sharp = true;
    'subsets: for mask in 0u64..(1u64 << n) {
        let mut acc = alg.zero();
        for (i, m) in masses.iter().enumerate() {
            if mask >> i & 1 == 1 {
                acc = alg
                    .sum(&acc, m)
                    .expect("subsums of a summable family are summable");
            }
        }
        if !alg.is_sharp(&acc) {
            unions_sharp = false;
            break 'subsets;
        }
    }

    SharpnessReport {
        masses_sharp,
        cumulatives_sharp,
        unions_sharp,
    }
}

/// Sharp observable test: every value `x(A)` over finite unions is sharp.
pub fn is_sharp_observable(x: &Observable) -> bool {
    sharpness_report(x).unions_sharp
}

/// Group inverse of a sharp observable: `−x` (composition with `t ↦ −t`).
/// Contract: `x + (−x) = o`. Rejected for unsharp `x`, where the contract
/// fails.
pub fn sharp_inverse(x: &Observable) -> Result<Observable, ObsError> {
    if !is_sharp_observable(x) {
        return Err(ObsError::NotSharp);
    }
    Ok(x.negate())
}

/// Strong-unit bound for a sharp observable: the least integer `n ≥ 1`
/// exceeding the largest support point `β`, so that `x ⪯ n·q_1`.
pub fn strong_unit_bound(x: &Observable) -> u64 {
    let beta = x.max_point();
    let mut n: i64 = 1;
    while rat_int(n) <= beta {
        n += 1;
    }
    n as u64
}

/// `n·q_1`: the point mass at the integer `n`.
pub fn scaled_unit(alg: &Arc<EffectAlgebra>, n: u64) -> Observable {
    Observable::question(Arc::clone(alg), &alg.one())
        .expect("q_1 is always valid")
        .scale(n as i64)
}

/// Checked saturating comparison used by laws: `x + z ⪯ y + z` whenever
/// `x ⪯ y` (translation monotonicity), exposed here as a convenience for
/// callers verifying ordered-semigroup behavior.
pub fn translate_then_compare(
    x: &Observable,
    y: &Observable,
    z: &Observable,
) -> Result<OrderRelation, ObsError> {
    let xz = obs_sum(x, z)?;
    let yz = obs_sum(y, z)?;
    olson_compare(&xz, &yz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::EffectAlgebra;
    use crate::rational::rat;
    use crate::sum::obs_sum;

    fn arc(a: EffectAlgebra) -> Arc<EffectAlgebra> {
        Arc::new(a)
    }

    fn el(coords: &[u32]) -> Element {
        Element::Product(coords.to_vec())
    }

    fn obs(alg: &Arc<EffectAlgebra>, pts: &[(i64, &[u32])]) -> Observable {
        Observable::discrete(
            Arc::clone(alg),
            pts.iter().map(|&(t, m)| (rat_int(t), el(m))).collect(),
        )
        .unwrap()
    }

    #[test]
    fn compare_examples() {
        let alg = arc(EffectAlgebra::chain(2).unwrap());
        let o = Observable::neutral(Arc::clone(&alg));
        // Point mass at 1: the question of the top element.
        let q2 = Observable::question(Arc::clone(&alg), &el(&[2])).unwrap();
        assert_eq!(olson_compare(&o, &q2).unwrap(), OrderRelation::Less);
        assert_eq!(olson_compare(&q2, &o).unwrap(), OrderRelation::Greater);
        assert_eq!(olson_compare(&o, &o).unwrap(), OrderRelation::Equal);

        let square = arc(EffectAlgebra::product_of_chains(&[1, 1]).unwrap());
        let qa = Observable::question(Arc::clone(&square), &el(&[1, 0])).unwrap();
        let qb = Observable::question(Arc::clone(&square), &el(&[0, 1])).unwrap();
        assert_eq!(
            olson_compare(&qa, &qb).unwrap(),
            OrderRelation::Incomparable,
            "mid-interval values (0,1) and (1,0) are incomparable"
        );
    }

    #[test]
    fn meet_join_of_incomparable_questions() {
        let square = arc(EffectAlgebra::product_of_chains(&[1, 1]).unwrap());
        let qa = Observable::question(Arc::clone(&square), &el(&[1, 0])).unwrap();
        let qb = Observable::question(Arc::clone(&square), &el(&[0, 1])).unwrap();
        let o = Observable::neutral(Arc::clone(&square));
        let q_top = Observable::question(Arc::clone(&square), &el(&[1, 1])).unwrap();

        assert_eq!(obs_meet(&[qa.clone(), qb.clone()]).unwrap(), o);
        assert_eq!(obs_join(&[qa.clone(), qb.clone()]).unwrap(), q_top);
        assert_eq!(obs_meet(&[qa.clone(), qa.clone()]).unwrap(), qa);
        assert_eq!(obs_join(&[qb.clone(), qb.clone()]).unwrap(), qb);
    }

    #[test]
    fn meet_join_are_bounds() {
        let alg = arc(EffectAlgebra::chain(3).unwrap());
        let x = obs(&alg, &[(-1, &[1]), (0, &[1]), (2, &[1])]);
        let y = obs(&alg, &[(0, &[2]), (1, &[1])]);
        let m = obs_meet(&[x.clone(), y.clone()]).unwrap();
        let j = obs_join(&[x.clone(), y.clone()]).unwrap();
        for v in [&x, &y] {
            assert!(olson_leq(&m, v).unwrap());
            assert!(olson_leq(v, &j).unwrap());
        }
    }

    #[test]
    fn requires_lattice_membership() {
        let a = arc(EffectAlgebra::chain(2).unwrap());
        let b = arc(EffectAlgebra::chain(3).unwrap());
        let x = Observable::neutral(Arc::clone(&a));
        let y = Observable::neutral(Arc::clone(&b));
        assert_eq!(olson_compare(&x, &y), Err(ObsError::AlgebraMismatch));
        assert_eq!(
            obs_meet(&[x.clone(), y.clone()]),
            Err(ObsError::AlgebraMismatch)
        );
        assert_eq!(obs_meet(&[]), Err(ObsError::EmptySupport));
    }

    #[test]
    fn sharpness_reports() {
        let alg = arc(EffectAlgebra::chain(2).unwrap());
        let q1 = Observable::question(Arc::clone(&alg), &el(&[1])).unwrap();
        let r = sharpness_report(&q1);
        assert!(!r.masses_sharp && !r.cumulatives_sharp && !r.unions_sharp);
        assert!(!is_sharp_observable(&q1));

        let square = arc(EffectAlgebra::product_of_chains(&[1, 1]).unwrap());
        let qa = Observable::question(Arc::clone(&square), &el(&[1, 0])).unwrap();
        let r = sharpness_report(&qa);
        assert!(r.masses_sharp && r.cumulatives_sharp && r.unions_sharp);
        assert!(is_sharp_observable(&qa));

        let o = Observable::neutral(Arc::clone(&alg));
        assert!(is_sharp_observable(&o));
    }

    #[test]
    fn sharp_inverse_contract() {
        let square = arc(EffectAlgebra::product_of_chains(&[1, 1]).unwrap());
        let qa = Observable::question(Arc::clone(&square), &el(&[1, 0])).unwrap();
        let inv = sharp_inverse(&qa).unwrap();
        assert_eq!(
            obs_sum(&qa, &inv).unwrap(),
            Observable::neutral(Arc::clone(&square))
        );

        let o = Observable::neutral(Arc::clone(&square));
        assert_eq!(sharp_inverse(&o).unwrap(), o);

        let alg = arc(EffectAlgebra::chain(2).unwrap());
        let q1 = Observable::question(Arc::clone(&alg), &el(&[1])).unwrap();
        assert_eq!(sharp_inverse(&q1), Err(ObsError::NotSharp));
    }

    #[test]
    fn strong_unit_bounds() {
        let square = arc(EffectAlgebra::product_of_chains(&[1, 1]).unwrap());
        let o = Observable::neutral(Arc::clone(&square));
        assert_eq!(strong_unit_bound(&o), 1);

        let qa = Observable::question(Arc::clone(&square), &el(&[1, 0])).unwrap();
        assert_eq!(strong_unit_bound(&qa), 2);

        let x = Observable::discrete(
            Arc::clone(&square),
            vec![(rat(-1, 2), el(&[1, 0])), (rat(7, 2), el(&[0, 1]))],
        )
        .unwrap();
        assert_eq!(strong_unit_bound(&x), 4);

        // The bound is an upper bound in the Olson order.
        for v in [&o, &qa, &x] {
            let n = strong_unit_bound(v);
            let nu = scaled_unit(&square, n);
            assert!(olson_leq(v, &nu).unwrap());
        }
    }
}
