//! Deterministic case generation: rational support grids, exhaustive
//! enumeration of observables on a grid, and seeded random sampling.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{EffectAlgebra, Element};
use crate::lawcheck::laws::{Case, CaseKind};
use crate::lawcheck::LawError;
use crate::observable::Observable;
use crate::olson::is_sharp_observable;
use crate::rational::{rat, rat_int, Rational};

/// Where generated observables may place their support: every rational
/// `p/q` with `1 ≤ q ≤ denom` inside `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GridRepr", into = "GridRepr")]
pub struct SupportGrid {
    pub denom: u32,
    pub lo: Rational,
    pub hi: Rational,
}

#[derive(Serialize, Deserialize)]
struct GridRepr {
    denom: u32,
    lo: String,
    hi: String,
}

impl From<SupportGrid> for GridRepr {
    fn from(g: SupportGrid) -> GridRepr {
        GridRepr {
            denom: g.denom,
            lo: g.lo.to_string(),
            hi: g.hi.to_string(),
        }
    }
}

impl TryFrom<GridRepr> for SupportGrid {
    type Error = String;
    fn try_from(r: GridRepr) -> Result<SupportGrid, String> {
        let lo = crate::io::parse_rational(&r.lo).map_err(|e| e.to_string())?;
        let hi = crate::io::parse_rational(&r.hi).map_err(|e| e.to_string())?;
        let grid = SupportGrid {
            denom: r.denom,
            lo,
            hi,
        };
        grid.validate().map_err(|e| e.to_string())?;
        Ok(grid)
    }
}

impl SupportGrid {
    pub fn new(denom: u32, lo: Rational, hi: Rational) -> Result<SupportGrid, LawError> {
        let grid = SupportGrid { denom, lo, hi };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<(), LawError> {
        if self.denom < 1 {
            return Err(LawError::InvalidConfig(
                "grid denominator bound must be at least 1".to_string(),
            ));
        }
        if self.lo >= self.hi {
            return Err(LawError::InvalidConfig(format!(
                "grid range is empty: lo = {} must be below hi = {}",
                self.lo, self.hi
            )));
        }
        Ok(())
    }

    /// All admissible support points, sorted ascending.
    pub fn points(&self) -> Vec<Rational> {
        let mut set = BTreeSet::new();
        for q in 1..=i64::from(self.denom) {
            let pmin = (self.lo * rat_int(q)).ceil().to_integer();
            let pmax = (self.hi * rat_int(q)).floor().to_integer();
            for p in pmin..=pmax {
                set.insert(rat(p, q));
            }
        }
        set.into_iter().collect()
    }

    /// The points that also lie inside `[0, 1]`.
    pub fn unit_interval_points(&self) -> Vec<Rational> {
        self.points()
            .into_iter()
            .filter(|t| *t >= rat_int(0) && *t <= rat_int(1))
            .collect()
    }
}

const MAX_ENUMERATED: usize = 1 << 20;

/// Every canonical observable whose support lies on `points` with at most
/// `max_support` support points, by depth-first search over summable mass
/// assignments. Deterministic order.
pub fn enumerate_observables(
    alg: &Arc<EffectAlgebra>,
    points: &[Rational],
    max_support: usize,
) -> Result<Vec<Observable>, LawError> {
    let elems = alg.elements();
    let one = alg.one();
    let zero = alg.zero();
    let mut out = Vec::new();
    let mut stack: Vec<(Rational, Element)> = Vec::new();

    fn dfs(
        alg: &Arc<EffectAlgebra>,
        points: &[Rational],
        elems: &[Element],
        one: &Element,
        zero: &Element,
        max_support: usize,
        i: usize,
        partial: &Element,
        stack: &mut Vec<(Rational, Element)>,
        out: &mut Vec<Observable>,
    ) -> Result<(), LawError> {
        if partial == one {
            if out.len() >= MAX_ENUMERATED {
                return Err(LawError::ExhaustiveTooLarge {
                    cap: MAX_ENUMERATED as u64,
                });
            }
            out.push(
                Observable::discrete(Arc::clone(alg), stack.clone())
                    .expect("enumerated decompositions are valid observables"),
            );
            return Ok(());
        }
        if i == points.len() {
            return Ok(());
        }
        // Leave the point unused.
        dfs(alg, points, elems, one, zero, max_support, i + 1, partial, stack, out)?;
        if stack.len() == max_support {
            return Ok(());
        }
        for m in elems {
            if m == zero {
                continue;
            }
            if let Some(next) = alg.sum(partial, m) {
                stack.push((points[i], m.clone()));
                dfs(alg, points, elems, one, zero, max_support, i + 1, &next, stack, out)?;
                stack.pop();
            }
        }
        Ok(())
    }

    dfs(
        alg,
        points,
        &elems,
        &one,
        &zero,
        max_support,
        0,
        &zero,
        &mut stack,
        &mut out,
    )?;
    Ok(out)
}

/// Seeded stream of random canonical observables on a grid.
pub struct ObsSampler {
    alg: Arc<EffectAlgebra>,
    points: Vec<Rational>,
    max_support: usize,
    elements: Vec<Element>,
    rng: ChaCha8Rng,
}

impl ObsSampler {
    pub fn new(
        alg: &Arc<EffectAlgebra>,
        points: Vec<Rational>,
        max_support: usize,
        seed: u64,
    ) -> ObsSampler {
        assert!(!points.is_empty(), "sampler needs a nonempty grid");
        ObsSampler {
            alg: Arc::clone(alg),
            points,
            max_support: max_support.max(1),
            elements: alg.elements(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn try_draw(&mut self) -> Option<Observable> {
        let k = self
            .rng
            .gen_range(1..=self.max_support.min(self.points.len()));
        let mut idx = rand::seq::index::sample(&mut self.rng, self.points.len(), k).into_vec();
        idx.sort_unstable();
        let one = self.alg.one();
        let zero = self.alg.zero();
        let mut partial = zero.clone();
        let mut support = Vec::with_capacity(k);
        for (j, &pi) in idx.iter().enumerate() {
            let mass = if j + 1 == k {
                let m = self.alg.complement(&partial);
                if m == zero {
                    return None;
                }
                m
            } else {
                let cands: Vec<&Element> = self
                    .elements
                    .iter()
                    .filter(|m| {
                        **m != zero
                            && self
                                .alg
                                .sum(&partial, m)
                                .map_or(false, |s| s != one)
                    })
                    .collect();
                if cands.is_empty() {
                    return None;
                }
                cands[self.rng.gen_range(0..cands.len())].clone()
            };
            partial = self.alg.sum(&partial, &mass).expect("masses stay summable");
            support.push((self.points[pi], mass));
        }
        Some(Observable::discrete(Arc::clone(&self.alg), support).expect("draw is canonical"))
    }

    /// Next observable; falls back to a point mass when rejection sampling
    /// stalls, so the stream never ends.
    pub fn next_obs(&mut self) -> Observable {
        for _ in 0..100 {
            if let Some(x) = self.try_draw() {
                return x;
            }
        }
        let t = self.points[self.rng.gen_range(0..self.points.len())];
        Observable::discrete(Arc::clone(&self.alg), vec![(t, self.alg.one())])
            .expect("point mass is always valid")
    }

    /// Next observable satisfying `pred`; falls back to `fallback` if
    /// rejection stalls (the fallback must satisfy the predicate).
    pub fn next_obs_where(
        &mut self,
        pred: impl Fn(&Observable) -> bool,
        fallback: impl Fn(&Arc<EffectAlgebra>) -> Observable,
    ) -> Observable {
        for _ in 0..500 {
            let x = self.next_obs();
            if pred(&x) {
                return x;
            }
        }
        let fb = fallback(&self.alg);
        debug_assert!(pred(&fb), "fallback must satisfy the predicate");
        fb
    }
}

/// Fixed affine-map pairs used in exhaustive mode.
pub(crate) fn fixed_affine_pairs() -> Vec<((Rational, Rational), (Rational, Rational))> {
    vec![
        ((rat_int(1), rat_int(0)), (rat_int(-1), rat_int(0))),
        ((rat_int(1), rat_int(0)), (rat_int(1), rat_int(0))),
        ((rat_int(2), rat_int(0)), (rat_int(-1), rat_int(1))),
        ((rat_int(0), rat_int(1)), (rat_int(1), rat_int(-1))),
    ]
}

fn affine_pools() -> (Vec<Rational>, Vec<Rational>) {
    (
        vec![
            rat_int(-2),
            rat_int(-1),
            rat(-1, 2),
            rat_int(0),
            rat(1, 2),
            rat_int(1),
            rat_int(2),
        ],
        vec![
            rat_int(-1),
            rat(-1, 2),
            rat_int(0),
            rat(1, 2),
            rat_int(1),
            rat_int(2),
        ],
    )
}

fn sharp_point_mass(alg: &Arc<EffectAlgebra>, t: Rational) -> Observable {
    Observable::discrete(Arc::clone(alg), vec![(t, alg.one())])
        .expect("point mass is always valid")
}

/// A deterministic stream of cases for one law.
pub(crate) enum CaseGen {
    ObsExhaustive {
        base: Vec<Observable>,
        arity: usize,
        idx: u64,
        total: u64,
    },
    ObsRandom {
        sampler: ObsSampler,
        arity: usize,
        sharp: bool,
    },
    ElemExhaustive {
        pairs: Vec<(Element, Element)>,
        idx: usize,
    },
    ElemRandom {
        sharp: Vec<Element>,
        alg: Arc<EffectAlgebra>,
        summable_only: bool,
        rng: ChaCha8Rng,
    },
    AffineExhaustive {
        base: Vec<Observable>,
        pairs: Vec<((Rational, Rational), (Rational, Rational))>,
        idx: u64,
        total: u64,
    },
    AffineRandom {
        sampler: ObsSampler,
        slopes: Vec<Rational>,
        intercepts: Vec<Rational>,
    },
}

impl CaseGen {
    pub(crate) fn new(
        alg: &Arc<EffectAlgebra>,
        kind: CaseKind,
        grid: &SupportGrid,
        max_support: usize,
        seed: u64,
        exhaustive: bool,
    ) -> Result<CaseGen, LawError> {
        let points_for = |unit: bool| -> Result<Vec<Rational>, LawError> {
            let pts = if unit {
                grid.unit_interval_points()
            } else {
                grid.points()
            };
            if pts.is_empty() {
                return Err(LawError::InvalidConfig(if unit {
                    "support grid has no points inside [0, 1], which this law requires".to_string()
                } else {
                    "support grid is empty".to_string()
                }));
            }
            Ok(pts)
        };
        match kind {
            CaseKind::Obs {
                arity,
                sharp,
                unit_interval,
            } => {
                let points = points_for(unit_interval)?;
                if exhaustive {
                    let mut base = enumerate_observables(alg, &points, max_support)?;
                    if sharp {
                        base.retain(is_sharp_observable);
                    }
                    let total = (base.len() as u64)
                        .checked_pow(arity as u32)
                        .ok_or(LawError::ExhaustiveTooLarge {
                            cap: MAX_ENUMERATED as u64,
                        })?;
                    Ok(CaseGen::ObsExhaustive {
                        base,
                        arity,
                        idx: 0,
                        total,
                    })
                } else {
                    Ok(CaseGen::ObsRandom {
                        sampler: ObsSampler::new(alg, points, max_support, seed),
                        arity,
                        sharp,
                    })
                }
            }
            CaseKind::ElemPairs { summable_only } => {
                let sharp = alg.sharp_elements();
                if exhaustive {
                    let mut pairs = Vec::new();
                    for a in &sharp {
                        for b in &sharp {
                            if !summable_only || alg.sum(a, b).is_some() {
                                pairs.push((a.clone(), b.clone()));
                            }
                        }
                    }
                    Ok(CaseGen::ElemExhaustive { pairs, idx: 0 })
                } else {
                    Ok(CaseGen::ElemRandom {
                        sharp,
                        alg: Arc::clone(alg),
                        summable_only,
                        rng: ChaCha8Rng::seed_from_u64(seed),
                    })
                }
            }
            CaseKind::AffinePair => {
                let points = points_for(false)?;
                if exhaustive {
                    let mut base = enumerate_observables(alg, &points, max_support)?;
                    base.retain(is_sharp_observable);
                    let pairs = fixed_affine_pairs();
                    let total = (base.len() as u64) * (pairs.len() as u64);
                    Ok(CaseGen::AffineExhaustive {
                        base,
                        pairs,
                        idx: 0,
                        total,
                    })
                } else {
                    let (slopes, intercepts) = affine_pools();
                    Ok(CaseGen::AffineRandom {
                        sampler: ObsSampler::new(alg, points, max_support, seed),
                        slopes,
                        intercepts,
                    })
                }
            }
        }
    }

}

impl Iterator for CaseGen {
    type Item = Case;

    fn next(&mut self) -> Option<Case> {
        match self {
            CaseGen::ObsExhaustive {
                base,
                arity,
                idx,
                total,
            } => {
                if *idx >= *total || base.is_empty() {
                    return None;
                }
                let mut rem = *idx;
                *idx += 1;
                let n = base.len() as u64;
                let mut tuple = Vec::with_capacity(*arity);
                for _ in 0..*arity {
                    tuple.push(base[(rem % n) as usize].clone());
                    rem /= n;
                }
                tuple.reverse();
                Some(Case::Obs(tuple))
            }
            CaseGen::ObsRandom {
                sampler,
                arity,
                sharp,
            } => {
                let mut tuple = Vec::with_capacity(*arity);
                for _ in 0..*arity {
                    let x = if *sharp {
                        sampler.next_obs_where(is_sharp_observable, |alg| {
                            sharp_point_mass(alg, rat_int(0))
                        })
                    } else {
                        sampler.next_obs()
                    };
                    tuple.push(x);
                }
                Some(Case::Obs(tuple))
            }
            CaseGen::ElemExhaustive { pairs, idx } => {
                if *idx >= pairs.len() {
                    return None;
                }
                let (a, b) = pairs[*idx].clone();
                *idx += 1;
                Some(Case::Elems(a, b))
            }
            CaseGen::ElemRandom {
                sharp,
                alg,
                summable_only,
                rng,
            } => {
                if sharp.is_empty() {
                    return None;
                }
                for _ in 0..500 {
                    let a = sharp[rng.gen_range(0..sharp.len())].clone();
                    let b = sharp[rng.gen_range(0..sharp.len())].clone();
                    if !*summable_only || alg.sum(&a, &b).is_some() {
                        return Some(Case::Elems(a, b));
                    }
                }
                // Zero is sharp and summable with anything.
                Some(Case::Elems(alg.zero(), alg.zero()))
            }
            CaseGen::AffineExhaustive {
                base,
                pairs,
                idx,
                total,
            } => {
                if *idx >= *total || base.is_empty() {
                    return None;
                }
                let i = *idx;
                *idx += 1;
                let np = pairs.len() as u64;
                let x = base[(i / np) as usize].clone();
                let (f, g) = pairs[(i % np) as usize];
                Some(Case::Affine { x, f, g })
            }
            CaseGen::AffineRandom {
                sampler,
                slopes,
                intercepts,
            } => {
                let x = sampler.next_obs_where(is_sharp_observable, |alg| {
                    sharp_point_mass(alg, rat_int(0))
                });
                let rng = &mut sampler.rng;
                let f = (
                    slopes[rng.gen_range(0..slopes.len())],
                    intercepts[rng.gen_range(0..intercepts.len())],
                );
                let g = (
                    slopes[rng.gen_range(0..slopes.len())],
                    intercepts[rng.gen_range(0..intercepts.len())],
                );
                Some(Case::Affine { x, f, g })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(alg: EffectAlgebra) -> Arc<EffectAlgebra> {
        Arc::new(alg)
    }

    #[test]
    fn grid_points_respect_denominator_bound() {
        let g = SupportGrid::new(1, rat_int(-1), rat_int(2)).unwrap();
        assert_eq!(g.points(), vec![rat_int(-1), rat_int(0), rat_int(1), rat_int(2)]);

        let g = SupportGrid::new(2, rat_int(0), rat_int(1)).unwrap();
        assert_eq!(g.points(), vec![rat_int(0), rat(1, 2), rat_int(1)]);

        let g = SupportGrid::new(3, rat_int(0), rat_int(1)).unwrap();
        assert_eq!(
            g.points(),
            vec![rat_int(0), rat(1, 3), rat(1, 2), rat(2, 3), rat_int(1)]
        );

        assert!(SupportGrid::new(0, rat_int(0), rat_int(1)).is_err());
        assert!(SupportGrid::new(1, rat_int(1), rat_int(1)).is_err());
    }

    #[test]
    fn exhaustive_counts_on_small_chains() {
        let pts = [rat_int(0), rat_int(1)];

        let c1 = arc(EffectAlgebra::chain(1).unwrap());
        let got = enumerate_observables(&c1, &pts, 2).unwrap();
        assert_eq!(got.len(), 2);

        let c2 = arc(EffectAlgebra::chain(2).unwrap());
        let got = enumerate_observables(&c2, &pts, 2).unwrap();
        assert_eq!(got.len(), 3);

        // Max-support 1 keeps only the point masses.
        let got = enumerate_observables(&c2, &pts, 1).unwrap();
        assert_eq!(got.len(), 2);
    }

    #[test]
    fn sampler_is_deterministic_and_canonical() {
        let alg = arc(EffectAlgebra::product_of_chains(&[2, 3]).unwrap());
        let grid = SupportGrid::new(2, rat_int(-1), rat_int(2)).unwrap();
        let mut s1 = ObsSampler::new(&alg, grid.points(), 3, 42);
        let mut s2 = ObsSampler::new(&alg, grid.points(), 3, 42);
        for _ in 0..50 {
            let a = s1.next_obs();
            let b = s2.next_obs();
            assert_eq!(a, b);
            assert!(!a.support().is_empty() && a.support().len() <= 3);
        }
        let mut s3 = ObsSampler::new(&alg, grid.points(), 3, 43);
        let differs = (0..50).any(|_| s1.next_obs() != s3.next_obs());
        assert!(differs, "different seeds should give different streams");
    }

    #[test]
    fn sharp_filtered_stream_yields_sharp_observables() {
        let alg = arc(EffectAlgebra::chain(3).unwrap());
        let grid = SupportGrid::new(1, rat_int(-1), rat_int(2)).unwrap();
        let mut sampler = ObsSampler::new(&alg, grid.points(), 3, 7);
        for _ in 0..30 {
            let x = sampler.next_obs_where(is_sharp_observable, |a| {
                sharp_point_mass(a, rat_int(0))
            });
            assert!(is_sharp_observable(&x));
        }
    }
}
