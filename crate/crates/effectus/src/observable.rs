//! Discrete bounded observables and function composition.
//!
//! An observable assigns to each point of a finite rational support a
//! nonzero element mass, with the masses summing to 1 in the algebra. The
//! canonical form drops zero masses and merges duplicate points, so
//! structural equality coincides with equality of observables.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::{EffectAlgebra, Element};
use crate::rational::{rat_int, Rational};
use crate::spectral::{SpectralError, SpectralResolution};

/// Errors raised by observable construction and the observable calculus.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ObsError {
    #[error("observable needs at least one support point with nonzero mass")]
    EmptySupport,
    #[error("mass at position {position} does not belong to the algebra")]
    ForeignMass { position: usize },
    #[error("masses are not summable: the partial sum over the first {prefix_len} points ({prefix}) is undefined")]
    UnsummableMasses { prefix_len: usize, prefix: String },
    #[error("total mass is {total}, not 1")]
    TotalNotOne { total: String },
    #[error("observables live over different algebras")]
    AlgebraMismatch,
    #[error("composition map is undefined at support point {point}")]
    MapUndefined { point: Rational },
    #[error(
        "sum of observables requires a distributive lattice algebra; \
         this algebra does not satisfy the distributive laws (pass force to evaluate anyway)"
    )]
    RequiresDistributivity,
    #[error("algebra is not a lattice: {op} of resolution values does not exist at t = {t}")]
    LatticeOpUndefined { op: &'static str, t: Rational },
    #[error("operation requires a lattice algebra")]
    RequiresLattice,
    #[error("operation requires a sharp observable, but a mass is unsharp")]
    NotSharp,
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// A discrete bounded observable in canonical form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Observable {
    algebra: Arc<EffectAlgebra>,
    /// Strictly increasing points with nonzero masses summing to 1.
    support: Vec<(Rational, Element)>,
}

impl Observable {
    /// Build an observable from `(point, mass)` pairs.
    ///
    /// Duplicate points are merged by summing their masses, zero masses are
    /// dropped, and the total must come out to exactly 1; otherwise the
    /// failing prefix (or the wrong total) is reported.
    pub fn discrete(
        algebra: Arc<EffectAlgebra>,
        points: Vec<(Rational, Element)>,
    ) -> Result<Self, ObsError> {
        for (i, (_, m)) in points.iter().enumerate() {
            if !algebra.contains(m) {
                return Err(ObsError::ForeignMass { position: i });
            }
        }
        let zero = algebra.zero();
        let mut merged: BTreeMap<Rational, Element> = BTreeMap::new();
        for (i, (t, m)) in points.iter().enumerate() {
            match merged.remove(t) {
                None => {
                    merged.insert(*t, m.clone());
                }
                Some(prev) => match algebra.sum(&prev, m) {
                    Some(s) => {
                        merged.insert(*t, s);
                    }
                    None => {
                        return Err(ObsError::UnsummableMasses {
                            prefix_len: i + 1,
                            prefix: format_prefix(&algebra, &points[..=i]),
                        });
                    }
                },
            }
        }
        let support: Vec<(Rational, Element)> =
            merged.into_iter().filter(|(_, m)| *m != zero).collect();
        if support.is_empty() {
            return Err(ObsError::EmptySupport);
        }

        let mut total = zero;
        for (i, (_, m)) in support.iter().enumerate() {
            total = match algebra.sum(&total, m) {
                Some(s) => s,
                None => {
                    return Err(ObsError::UnsummableMasses {
                        prefix_len: i + 1,
                        prefix: format_prefix(&algebra, &support[..=i]),
                    });
                }
            };
        }
        if total != algebra.one() {
            return Err(ObsError::TotalNotOne {
                total: algebra.format_element(&total),
            });
        }
        Ok(Observable { algebra, support })
    }

    /// The question `q_a`: mass `a'` at 0 and mass `a` at 1 (canonicalized,
    /// so `q_0` is the point mass at 0 and `q_1` the point mass at 1).
    pub fn question(algebra: Arc<EffectAlgebra>, a: &Element) -> Result<Self, ObsError> {
        let ac = algebra.complement(a);
        Self::discrete(
            algebra,
            vec![(rat_int(0), ac), (rat_int(1), a.clone())],
        )
    }

    /// The neutral observable `o = q_0`: point mass 1 at 0.
    pub fn neutral(algebra: Arc<EffectAlgebra>) -> Self {
        let one = algebra.one();
        Self::discrete(algebra, vec![(rat_int(0), one)])
            .expect("the point mass at 0 is always a valid observable")
    }

    pub fn algebra(&self) -> &Arc<EffectAlgebra> {
        &self.algebra
    }

    /// Canonical support: strictly increasing points with nonzero masses.
    pub fn support(&self) -> &[(Rational, Element)] {
        &self.support
    }

    /// Smallest support point.
    pub fn min_point(&self) -> Rational {
        self.support[0].0
    }

    /// Largest support point.
    pub fn max_point(&self) -> Rational {
        self.support[self.support.len() - 1].0
    }

    /// The mass at `t` (zero off the support).
    pub fn mass_at(&self, t: Rational) -> Element {
        self.support
            .iter()
            .find(|(p, _)| *p == t)
            .map(|(_, m)| m.clone())
            .unwrap_or_else(|| self.algebra.zero())
    }

    /// The spectral resolution `B_x`: breakpoints at the support points,
    /// cumulative values the partial sums of the masses.
    pub fn resolution(&self) -> SpectralResolution {
        let mut cums = Vec::with_capacity(self.support.len());
        let mut acc = self.algebra.zero();
        for (_, m) in &self.support {
            acc = self
                .algebra
                .sum(&acc, m)
                .expect("masses of a valid observable are summable");
            cums.push(acc.clone());
        }
        let bps: Vec<Rational> = self.support.iter().map(|(t, _)| *t).collect();
        SpectralResolution::new(Arc::clone(&self.algebra), bps, cums)
            .expect("partial sums of a valid observable form a resolution")
    }

    /// Compose with a finite map `f`, producing `f∘x`: the mass at `v` is
    /// the sum of the masses of the preimage `f⁻¹(v)`.
    pub fn compose(&self, f: &FiniteMap) -> Result<Self, ObsError> {
        let mut images: BTreeMap<Rational, Vec<&Element>> = BTreeMap::new();
        for (t, m) in &self.support {
            let v = f.apply(*t).ok_or(ObsError::MapUndefined { point: *t })?;
            images.entry(v).or_default().push(m);
        }
        let mut points = Vec::with_capacity(images.len());
        for (v, masses) in images {
            let mut acc = self.algebra.zero();
            for m in masses {
                acc = self
                    .algebra
                    .sum(&acc, m)
                    .expect("subsums of a summable family are summable");
            }
            points.push((v, acc));
        }
        Self::discrete(Arc::clone(&self.algebra), points)
    }

    /// `−x`, i.e. composition with `t ↦ −t`.
    pub fn negate(&self) -> Self {
        self.compose(&FiniteMap::negate(self))
            .expect("negation is total on the support")
    }

    /// `n·x`, i.e. composition with `t ↦ n·t`.
    pub fn scale(&self, n: i64) -> Self {
        self.compose(&FiniteMap::tabulate(self, |t| t * rat_int(n)))
            .expect("scaling is total on the support")
    }

    /// Composition with `t ↦ 1 − t`.
    pub fn one_minus(&self) -> Self {
        self.compose(&FiniteMap::tabulate(self, |t| rat_int(1) - t))
            .expect("1−t is total on the support")
    }

    /// Composition with the affine map `t ↦ p·t + q`.
    pub fn affine(&self, p: Rational, q: Rational) -> Self {
        self.compose(&FiniteMap::tabulate(self, |t| p * t + q))
            .expect("affine maps are total on the support")
    }

    /// True when all masses are sharp. On RDP algebras this coincides with
    /// sharpness of all resolution values and of all finite unions; see
    /// [`crate::olson::sharpness_report`] for the three-way check.
    pub fn has_sharp_masses(&self) -> bool {
        self.support.iter().all(|(_, m)| self.algebra.is_sharp(m))
    }
}

fn format_prefix(algebra: &EffectAlgebra, points: &[(Rational, Element)]) -> String {
    let parts: Vec<String> = points
        .iter()
        .map(|(t, m)| format!("{t}: {}", algebra.format_element(m)))
        .collect();
    format!("{{{}}}", parts.join(", "))
}

/// A finite partial map on the rationals, used for Borel-function
/// composition: only the values on an observable's support matter.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FiniteMap {
    entries: BTreeMap<Rational, Rational>,
}

impl FiniteMap {
    /// Build from explicit `(t, f(t))` pairs. Later duplicates overwrite
    /// earlier ones.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Rational, Rational)>) -> Self {
        FiniteMap {
            entries: pairs.into_iter().collect(),
        }
    }

    /// Tabulate a total function on the support of `x`.
    pub fn tabulate(x: &Observable, f: impl Fn(Rational) -> Rational) -> Self {
        FiniteMap {
            entries: x.support().iter().map(|(t, _)| (*t, f(*t))).collect(),
        }
    }

    /// The map `t ↦ −t` on the support of `x`.
    pub fn negate(x: &Observable) -> Self {
        Self::tabulate(x, |t| -t)
    }

    pub fn apply(&self, t: Rational) -> Option<Rational> {
        self.entries.get(&t).copied()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Rational> {
        self.entries.keys()
    }

    pub fn entries(&self) -> &BTreeMap<Rational, Rational> {
        &self.entries
    }

    /// Pointwise sum `(f+g)(t) = f(t) + g(t)` on the common domain.
    pub fn pointwise_add(&self, other: &FiniteMap) -> FiniteMap {
        FiniteMap {
            entries: self
                .entries
                .iter()
                .filter_map(|(t, v)| other.apply(*t).map(|w| (*t, *v + w)))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn c2() -> Arc<EffectAlgebra> {
        Arc::new(EffectAlgebra::chain(2).unwrap())
    }

    fn el(c: u32) -> Element {
        Element::Product(vec![c])
    }

    fn obs(alg: &Arc<EffectAlgebra>, pts: &[(i64, u32)]) -> Observable {
        Observable::discrete(
            Arc::clone(alg),
            pts.iter().map(|&(t, m)| (rat_int(t), el(m))).collect(),
        )
        .unwrap()
    }

    #[test]
    fn discrete_construction_and_canonical_form() {
        let alg = c2();
        let q1 = obs(&alg, &[(0, 1), (1, 1)]);
        assert_eq!(
            q1,
            Observable::question(Arc::clone(&alg), &el(1)).unwrap()
        );

        // Zero masses are dropped.
        let x = obs(&alg, &[(0, 1), (1, 0), (2, 1)]);
        assert_eq!(x.support(), &[(rat_int(0), el(1)), (rat_int(2), el(1))]);

        // Duplicate points are merged by summing masses.
        let pm = obs(&alg, &[(0, 1), (0, 1)]);
        assert_eq!(pm.support(), &[(rat_int(0), el(2))]);
        assert_eq!(pm, Observable::neutral(Arc::clone(&alg)));
    }

    #[test]
    fn discrete_rejections() {
        let alg = c2();
        let err = Observable::discrete(
            Arc::clone(&alg),
            vec![(rat_int(0), el(2)), (rat_int(1), el(1))],
        )
        .unwrap_err();
        assert!(
            matches!(err, ObsError::UnsummableMasses { prefix_len: 2, .. }),
            "2 + 1 is undefined in C(2): got {err:?}"
        );

        let err =
            Observable::discrete(Arc::clone(&alg), vec![(rat_int(0), el(1))]).unwrap_err();
        assert!(matches!(err, ObsError::TotalNotOne { ref total } if total == "(1)"));

        let err = Observable::discrete(Arc::clone(&alg), vec![]).unwrap_err();
        assert_eq!(err, ObsError::EmptySupport);

        let err = Observable::discrete(
            Arc::clone(&alg),
            vec![(rat_int(0), Element::Product(vec![9]))],
        )
        .unwrap_err();
        assert_eq!(err, ObsError::ForeignMass { position: 0 });
    }

    #[test]
    fn questions() {
        let alg = c2();
        let q0 = Observable::question(Arc::clone(&alg), &el(0)).unwrap();
        assert_eq!(q0, Observable::neutral(Arc::clone(&alg)));
        let q_top = Observable::question(Arc::clone(&alg), &el(2)).unwrap();
        assert_eq!(q_top.support(), &[(rat_int(1), el(2))]);
        let q1 = Observable::question(Arc::clone(&alg), &el(1)).unwrap();
        assert_eq!(q1.support(), &[(rat_int(0), el(1)), (rat_int(1), el(1))]);
        assert_eq!(q1.mass_at(rat_int(1)), el(1));
        assert_eq!(q1.mass_at(rat(1, 2)), el(0));
    }

    #[test]
    fn composition() {
        let alg = c2();
        let x = obs(&alg, &[(0, 1), (2, 1)]);
        assert_eq!(
            x.negate().support(),
            &[(rat_int(-2), el(1)), (rat_int(0), el(1))]
        );
        assert_eq!(x.negate().negate(), x);

        let q1 = obs(&alg, &[(0, 1), (1, 1)]);
        let doubled = q1.scale(2);
        assert_eq!(doubled.support(), &[(rat_int(0), el(1)), (rat_int(2), el(1))]);

        // t ↦ t² merges the two support points of {−1: a, 1: a'}.
        let y = obs(&alg, &[(-1, 1), (1, 1)]);
        let sq = y
            .compose(&FiniteMap::tabulate(&y, |t| t * t))
            .unwrap();
        assert_eq!(sq.support(), &[(rat_int(1), el(2))]);

        // one_minus swaps a question's masses: 1−q_a = q_{a'}.
        assert_eq!(
            q1.one_minus(),
            Observable::question(Arc::clone(&alg), &el(1)).unwrap()
        );
        let q_top = Observable::question(Arc::clone(&alg), &el(2)).unwrap();
        assert_eq!(
            q_top.one_minus(),
            Observable::question(Arc::clone(&alg), &el(0)).unwrap()
        );

        assert_eq!(q1.affine(rat_int(3), rat(1, 2)).support(), &[
            (rat(1, 2), el(1)),
            (rat(7, 2), el(1)),
        ]);

        let err = q1
            .compose(&FiniteMap::from_pairs([(rat_int(0), rat_int(5))]))
            .unwrap_err();
        assert_eq!(err, ObsError::MapUndefined { point: rat_int(1) });
    }

    #[test]
    fn finite_map_pointwise_sum() {
        let f = FiniteMap::from_pairs([(rat_int(0), rat_int(1)), (rat_int(1), rat(1, 2))]);
        let g = FiniteMap::from_pairs([(rat_int(0), rat_int(-1)), (rat_int(1), rat(1, 2))]);
        let h = f.pointwise_add(&g);
        assert_eq!(h.apply(rat_int(0)), Some(rat_int(0)));
        assert_eq!(h.apply(rat_int(1)), Some(rat_int(1)));
        assert_eq!(h.apply(rat_int(2)), None);
    }

    #[test]
    fn sharp_mass_flag() {
        let alg = c2();
        assert!(!obs(&alg, &[(0, 1), (1, 1)]).has_sharp_masses());
        assert!(obs(&alg, &[(1, 2)]).has_sharp_masses());
        assert!(Observable::neutral(Arc::clone(&alg)).has_sharp_masses());
    }
}
