//! The law catalog and per-law evaluators.
//!
//! Every law is evaluated exactly on one generated case (a tuple of
//! observables, a pair of algebra elements, or an observable plus two
//! affine maps). An evaluation either passes, fails with a replayable
//! witness, or errors when the algebra cannot support the operations the
//! law talks about (for example, lattice operations on a non-lattice).

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{EffectAlgebra, Element};
use crate::observable::{ObsError, Observable};
use crate::olson::{
    is_sharp_observable, obs_join, obs_meet, olson_leq, scaled_unit, sharpness_report,
    strong_unit_bound,
};
use crate::rational::{rat_int, Rational};
use crate::sum::{obs_sum, obs_sum_forced, sum_oracle_default};

/// Identifier of one checkable law.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LawId {
    SumComm,
    SumAssoc,
    SumNeutral,
    DenseInv,
    OlsonPo,
    LatticeDist,
    TranslateMono,
    Los,
    SharpChar,
    SharpGroup,
    StrongUnit,
    QAdd,
    QChar,
    SharpIso,
    DedekindFin,
    FcalcAdd,
    OracleEq,
}

impl LawId {
    /// The full catalog, in report order.
    pub const ALL: [LawId; 17] = [
        LawId::SumComm,
        LawId::SumAssoc,
        LawId::SumNeutral,
        LawId::DenseInv,
        LawId::OlsonPo,
        LawId::LatticeDist,
        LawId::TranslateMono,
        LawId::Los,
        LawId::SharpChar,
        LawId::SharpGroup,
        LawId::StrongUnit,
        LawId::QAdd,
        LawId::QChar,
        LawId::SharpIso,
        LawId::DedekindFin,
        LawId::FcalcAdd,
        LawId::OracleEq,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LawId::SumComm => "SUM-COMM",
            LawId::SumAssoc => "SUM-ASSOC",
            LawId::SumNeutral => "SUM-NEUTRAL",
            LawId::DenseInv => "DENSE-INV",
            LawId::OlsonPo => "OLSON-PO",
            LawId::LatticeDist => "LATTICE-DIST",
            LawId::TranslateMono => "TRANSLATE-MONO",
            LawId::Los => "LOS",
            LawId::SharpChar => "SHARP-CHAR",
            LawId::SharpGroup => "SHARP-GROUP",
            LawId::StrongUnit => "STRONG-UNIT",
            LawId::QAdd => "Q-ADD",
            LawId::QChar => "Q-CHAR",
            LawId::SharpIso => "SHARP-ISO",
            LawId::DedekindFin => "DEDEKIND-FIN",
            LawId::FcalcAdd => "FCALC-ADD",
            LawId::OracleEq => "ORACLE-EQ",
        }
    }

    pub fn from_name(s: &str) -> Option<LawId> {
        LawId::ALL.into_iter().find(|l| l.name() == s)
    }

    /// One-line statement of what the law asserts.
    pub fn describe(self) -> &'static str {
        match self {
            LawId::SumComm => "x + y = y + x",
            LawId::SumAssoc => "(x + y) + z = x + (y + z)",
            LawId::SumNeutral => "x + o = x = o + x",
            LawId::DenseInv => "the defining join gives the same sum over dense grids of different bases",
            LawId::OlsonPo => "the observable order is reflexive, antisymmetric, and transitive",
            LawId::LatticeDist => "(x ∨ y) ∧ z = (x ∧ z) ∨ (y ∧ z), and dually",
            LawId::TranslateMono => "x ⪯ y implies x + z ⪯ y + z",
            LawId::Los => "(x ∨ y) + z = (x + z) ∨ (y + z)",
            LawId::SharpChar => "mass, cumulative, and union views of sharpness coincide",
            LawId::SharpGroup => "for sharp x, y: x + (−x) = o, −x is sharp, and x + y is sharp",
            LawId::StrongUnit => "every observable lies below an integer multiple of q₁",
            LawId::QAdd => "q_a + q_b = q_{a+b} for sharp a, b with a + b defined",
            LawId::QChar => "x ∨ x′ = q₁ holds exactly for questions of sharp elements",
            LawId::SharpIso => "a ↦ q_a preserves order, complement, join, and sum on sharp elements",
            LawId::DedekindFin => "finite joins and meets are associative and bound their arguments",
            LawId::FcalcAdd => "f∘x + g∘x = (f + g)∘x for sharp x",
            LawId::OracleEq => "the computed sum matches the defining join at every probe",
        }
    }

    /// Laws whose statement involves the sum of observables. These are only
    /// guaranteed on MV algebras and are gated behind the force flag
    /// elsewhere.
    pub fn needs_sum(self) -> bool {
        matches!(
            self,
            LawId::SumComm
                | LawId::SumAssoc
                | LawId::SumNeutral
                | LawId::DenseInv
                | LawId::TranslateMono
                | LawId::Los
                | LawId::SharpGroup
                | LawId::QAdd
                | LawId::SharpIso
                | LawId::FcalcAdd
                | LawId::OracleEq
        )
    }

    /// Laws that cannot even be stated without lattice operations on
    /// observables or elements.
    pub fn needs_lattice(self) -> bool {
        !matches!(
            self,
            LawId::OlsonPo | LawId::SharpChar | LawId::StrongUnit | LawId::SumNeutral
        )
    }

    /// Shape of the cases the law consumes.
    pub(crate) fn kind(self) -> CaseKind {
        match self {
            LawId::SumComm | LawId::DenseInv | LawId::OracleEq => CaseKind::Obs {
                arity: 2,
                sharp: false,
                unit_interval: false,
            },
            LawId::SumAssoc
            | LawId::OlsonPo
            | LawId::LatticeDist
            | LawId::TranslateMono
            | LawId::Los
            | LawId::DedekindFin => CaseKind::Obs {
                arity: 3,
                sharp: false,
                unit_interval: false,
            },
            LawId::SumNeutral | LawId::SharpChar | LawId::StrongUnit => CaseKind::Obs {
                arity: 1,
                sharp: false,
                unit_interval: false,
            },
            LawId::SharpGroup => CaseKind::Obs {
                arity: 2,
                sharp: true,
                unit_interval: false,
            },
            LawId::QChar => CaseKind::Obs {
                arity: 1,
                sharp: false,
                unit_interval: true,
            },
            LawId::QAdd => CaseKind::ElemPairs { summable_only: true },
            LawId::SharpIso => CaseKind::ElemPairs {
                summable_only: false,
            },
            LawId::FcalcAdd => CaseKind::AffinePair,
        }
    }

    pub fn catalog_names() -> String {
        LawId::ALL
            .iter()
            .map(|l| l.name())
            .collect::<Vec<_>>()
            .join(", ")
    }
}

impl fmt::Display for LawId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for LawId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for LawId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        LawId::from_name(&s).ok_or_else(|| {
            serde::de::Error::custom(format!(
                "unknown law id `{s}`; catalog: {}",
                LawId::catalog_names()
            ))
        })
    }
}

/// Shape of the generated cases for a law.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum CaseKind {
    /// A tuple of observables, optionally restricted to sharp ones or to
    /// support inside [0, 1].
    Obs {
        arity: usize,
        sharp: bool,
        unit_interval: bool,
    },
    /// An ordered pair of sharp algebra elements, optionally restricted to
    /// pairs whose sum is defined.
    ElemPairs { summable_only: bool },
    /// A sharp observable together with two affine maps.
    AffinePair,
}

/// One concrete input tuple for a law.
#[derive(Clone, Debug)]
pub enum Case {
    Obs(Vec<Observable>),
    Elems(Element, Element),
    Affine {
        x: Observable,
        f: (Rational, Rational),
        g: (Rational, Rational),
    },
}

/// Result of evaluating a law on one case.
#[derive(Debug)]
pub(crate) enum Outcome {
    Pass,
    Fail(Failure),
}

/// What went wrong, with enough material to build a replayable witness.
#[derive(Debug)]
pub(crate) struct Failure {
    pub detail: String,
    pub lhs: Option<Observable>,
    pub rhs: Option<Observable>,
    pub probe: Option<Rational>,
    pub witnesses: Vec<Element>,
}

impl Failure {
    fn plain(detail: impl Into<String>) -> Failure {
        Failure {
            detail: detail.into(),
            lhs: None,
            rhs: None,
            probe: None,
            witnesses: Vec::new(),
        }
    }
}

/// First probe where the resolutions of `a` and `b` take different values,
/// with both values.
pub(crate) fn first_difference(
    a: &Observable,
    b: &Observable,
) -> Option<(Rational, Element, Element)> {
    let ra = a.resolution();
    let rb = b.resolution();
    let mut pts: std::collections::BTreeSet<Rational> = ra
        .breakpoints()
        .iter()
        .chain(rb.breakpoints())
        .copied()
        .collect();
    if let Some(&m) = pts.iter().next_back() {
        pts.insert(m + rat_int(1));
    }
    pts.into_iter().find_map(|t| {
        let va = ra.eval(t);
        let vb = rb.eval(t);
        (va != vb).then_some((t, va, vb))
    })
}

/// First probe witnessing that `x ⪯ y` fails, i.e. where the cumulative
/// value of `y` is not below that of `x`; returns `(t, B_x(t), B_y(t))`.
fn order_violation(x: &Observable, y: &Observable) -> Option<(Rational, Element, Element)> {
    let rx = x.resolution();
    let ry = y.resolution();
    let alg = x.algebra();
    let mut pts: std::collections::BTreeSet<Rational> = rx
        .breakpoints()
        .iter()
        .chain(ry.breakpoints())
        .copied()
        .collect();
    if let Some(&m) = pts.iter().next_back() {
        pts.insert(m + rat_int(1));
    }
    pts.into_iter().find_map(|t| {
        let vx = rx.eval(t);
        let vy = ry.eval(t);
        (!alg.leq(&vy, &vx)).then_some((t, vx, vy))
    })
}

fn equal_or_fail(
    lhs_desc: &str,
    rhs_desc: &str,
    lhs: Observable,
    rhs: Observable,
) -> Outcome {
    if lhs == rhs {
        return Outcome::Pass;
    }
    let (probe, witnesses) = match first_difference(&lhs, &rhs) {
        Some((t, va, vb)) => (Some(t), vec![va, vb]),
        None => (None, Vec::new()),
    };
    Outcome::Fail(Failure {
        detail: format!("{lhs_desc} ≠ {rhs_desc}"),
        lhs: Some(lhs),
        rhs: Some(rhs),
        probe,
        witnesses,
    })
}

fn leq_or_fail(detail: &str, lo: &Observable, hi: &Observable) -> Result<Outcome, ObsError> {
    if olson_leq(lo, hi)? {
        return Ok(Outcome::Pass);
    }
    let (probe, witnesses) = match order_violation(lo, hi) {
        Some((t, vl, vh)) => (Some(t), vec![vl, vh]),
        None => (None, Vec::new()),
    };
    Ok(Outcome::Fail(Failure {
        detail: detail.to_string(),
        lhs: Some(lo.clone()),
        rhs: Some(hi.clone()),
        probe,
        witnesses,
    }))
}

fn join2(a: &Observable, b: &Observable) -> Result<Observable, ObsError> {
    obs_join(&[a.clone(), b.clone()])
}

fn meet2(a: &Observable, b: &Observable) -> Result<Observable, ObsError> {
    obs_meet(&[a.clone(), b.clone()])
}

fn obs_case(case: &Case, arity: usize) -> &[Observable] {
    match case {
        Case::Obs(v) if v.len() == arity => v,
        _ => panic!("case shape does not match law arity"),
    }
}

/// Evaluate one law on one case. `force` selects the ungated sum.
pub(crate) fn evaluate(
    law: LawId,
    alg: &Arc<EffectAlgebra>,
    case: &Case,
    force: bool,
) -> Result<Outcome, ObsError> {
    let add = |a: &Observable, b: &Observable| {
        if force {
            obs_sum_forced(a, b)
        } else {
            obs_sum(a, b)
        }
    };
    match law {
        LawId::SumComm => {
            let [x, y] = obs_case(case, 2) else { unreachable!() };
            Ok(equal_or_fail("x + y", "y + x", add(x, y)?, add(y, x)?))
        }
        LawId::SumAssoc => {
            let [x, y, z] = obs_case(case, 3) else { unreachable!() };
            Ok(equal_or_fail(
                "(x + y) + z",
                "x + (y + z)",
                add(&add(x, y)?, z)?,
                add(x, &add(y, z)?)?,
            ))
        }
        LawId::SumNeutral => {
            let [x] = obs_case(case, 1) else { unreachable!() };
            let o = Observable::neutral(Arc::clone(alg));
            match equal_or_fail("x + o", "x", add(x, &o)?, x.clone()) {
                Outcome::Pass => Ok(equal_or_fail("o + x", "x", add(&o, x)?, x.clone())),
                fail => Ok(fail),
            }
        }
        LawId::DenseInv => {
            let [x, y] = obs_case(case, 2) else { unreachable!() };
            let a = sum_oracle_default(x, y, 2)?;
            let b = sum_oracle_default(x, y, 3)?;
            for ((t, va), (_, vb)) in a.into_iter().zip(b) {
                if va != vb {
                    return Ok(Outcome::Fail(Failure {
                        detail: "base-2 and base-3 grid oracles disagree".to_string(),
                        lhs: None,
                        rhs: None,
                        probe: Some(t),
                        witnesses: vec![va, vb],
                    }));
                }
            }
            Ok(Outcome::Pass)
        }
        LawId::OlsonPo => {
            let triple = obs_case(case, 3);
            for w in triple {
                if !olson_leq(w, w)? {
                    return Ok(Outcome::Fail(Failure::plain("x ⪯ x fails (reflexivity)")));
                }
            }
            for a in triple {
                for b in triple {
                    if olson_leq(a, b)? && olson_leq(b, a)? && a != b {
                        return Ok(Outcome::Fail(Failure {
                            detail: "x ⪯ y and y ⪯ x with x ≠ y (antisymmetry)".to_string(),
                            lhs: Some(a.clone()),
                            rhs: Some(b.clone()),
                            probe: None,
                            witnesses: Vec::new(),
                        }));
                    }
                    for c in triple {
                        if olson_leq(a, b)? && olson_leq(b, c)? && !olson_leq(a, c)? {
                            return Ok(Outcome::Fail(Failure {
                                detail: "x ⪯ y ⪯ z but x ⋠ z (transitivity)".to_string(),
                                lhs: Some(a.clone()),
                                rhs: Some(c.clone()),
                                probe: None,
                                witnesses: Vec::new(),
                            }));
                        }
                    }
                }
            }
            Ok(Outcome::Pass)
        }
        LawId::LatticeDist => {
            let [x, y, z] = obs_case(case, 3) else { unreachable!() };
            let first = equal_or_fail(
                "(x ∨ y) ∧ z",
                "(x ∧ z) ∨ (y ∧ z)",
                meet2(&join2(x, y)?, z)?,
                join2(&meet2(x, z)?, &meet2(y, z)?)?,
            );
            match first {
                Outcome::Pass => Ok(equal_or_fail(
                    "(x ∧ y) ∨ z",
                    "(x ∨ z) ∧ (y ∨ z)",
                    join2(&meet2(x, y)?, z)?,
                    meet2(&join2(x, z)?, &join2(y, z)?)?,
                )),
                fail => Ok(fail),
            }
        }
        LawId::TranslateMono => {
            let [x, y, z] = obs_case(case, 3) else { unreachable!() };
            // Replace x by x ∧ y so the premise x ⪯ y always holds.
            let xm = if olson_leq(x, y)? {
                x.clone()
            } else {
                meet2(x, y)?
            };
            leq_or_fail(
                "x ⪯ y but x + z ⋠ y + z",
                &add(&xm, z)?,
                &add(y, z)?,
            )
        }
        LawId::Los => {
            let [x, y, z] = obs_case(case, 3) else { unreachable!() };
            Ok(equal_or_fail(
                "(x ∨ y) + z",
                "(x + z) ∨ (y + z)",
                add(&join2(x, y)?, z)?,
                join2(&add(x, z)?, &add(y, z)?)?,
            ))
        }
        LawId::SharpChar => {
            let [x] = obs_case(case, 1) else { unreachable!() };
            let rep = sharpness_report(x);
            if rep.all_agree() {
                Ok(Outcome::Pass)
            } else {
                Ok(Outcome::Fail(Failure::plain(format!(
                    "sharpness views disagree: masses={}, cumulatives={}, range unions={}",
                    rep.masses_sharp, rep.cumulatives_sharp, rep.unions_sharp
                ))))
            }
        }
        LawId::SharpGroup => {
            let [x, y] = obs_case(case, 2) else { unreachable!() };
            let o = Observable::neutral(Arc::clone(alg));
            let nx = x.negate();
            if !is_sharp_observable(&nx) {
                return Ok(Outcome::Fail(Failure {
                    detail: "−x is not sharp for sharp x".to_string(),
                    lhs: Some(nx),
                    rhs: None,
                    probe: None,
                    witnesses: Vec::new(),
                }));
            }
            match equal_or_fail("x + (−x)", "o", add(x, &nx)?, o.clone()) {
                Outcome::Pass => {}
                fail => return Ok(fail),
            }
            match equal_or_fail("(−x) + x", "o", add(&nx, x)?, o) {
                Outcome::Pass => {}
                fail => return Ok(fail),
            }
            let s = add(x, y)?;
            if !is_sharp_observable(&s) {
                return Ok(Outcome::Fail(Failure {
                    detail: "x + y is not sharp for sharp x, y".to_string(),
                    lhs: Some(s),
                    rhs: None,
                    probe: None,
                    witnesses: Vec::new(),
                }));
            }
            Ok(Outcome::Pass)
        }
        LawId::StrongUnit => {
            let [x] = obs_case(case, 1) else { unreachable!() };
            let n = strong_unit_bound(x);
            let unit = scaled_unit(alg, n);
            leq_or_fail(
                "x ⋠ n·q₁ for the computed unit bound n",
                x,
                &unit,
            )
        }
        LawId::QAdd => {
            let Case::Elems(a, b) = case else {
                panic!("case shape does not match law");
            };
            let c = alg
                .sum(a, b)
                .expect("generator only emits summable sharp pairs");
            let qa = Observable::question(Arc::clone(alg), a)?;
            let qb = Observable::question(Arc::clone(alg), b)?;
            let qc = Observable::question(Arc::clone(alg), &c)?;
            Ok(equal_or_fail("q_a + q_b", "q_{a+b}", add(&qa, &qb)?, qc))
        }
        LawId::QChar => {
            let [x] = obs_case(case, 1) else { unreachable!() };
            let q_top = Observable::question(Arc::clone(alg), &alg.one())?;
            let lhs_holds = join2(x, &x.one_minus())? == q_top;
            let a = x.mass_at(rat_int(1));
            let is_sharp_question =
                *x == Observable::question(Arc::clone(alg), &a)? && alg.is_sharp(&a);
            if lhs_holds == is_sharp_question {
                Ok(Outcome::Pass)
            } else {
                Ok(Outcome::Fail(Failure {
                    detail: format!(
                        "x ∨ x′ = q₁ is {lhs_holds}, but x being a question of a sharp element is {is_sharp_question}"
                    ),
                    lhs: Some(x.clone()),
                    rhs: None,
                    probe: None,
                    witnesses: vec![a],
                }))
            }
        }
        LawId::SharpIso => {
            let Case::Elems(a, b) = case else {
                panic!("case shape does not match law");
            };
            let qa = Observable::question(Arc::clone(alg), a)?;
            let qb = Observable::question(Arc::clone(alg), b)?;
            if a != b && qa == qb {
                return Ok(Outcome::Fail(Failure {
                    detail: "a ≠ b but q_a = q_b (injectivity)".to_string(),
                    lhs: Some(qa),
                    rhs: Some(qb),
                    probe: None,
                    witnesses: vec![a.clone(), b.clone()],
                }));
            }
            let qac = Observable::question(Arc::clone(alg), &alg.complement(a))?;
            match equal_or_fail("(q_a)′", "q_{a′}", qa.one_minus(), qac) {
                Outcome::Pass => {}
                fail => return Ok(fail),
            }
            if alg.leq(a, b) != olson_leq(&qa, &qb)? {
                return Ok(Outcome::Fail(Failure {
                    detail: "a ≤ b and q_a ⪯ q_b disagree (order preservation)".to_string(),
                    lhs: Some(qa),
                    rhs: Some(qb),
                    probe: None,
                    witnesses: vec![a.clone(), b.clone()],
                }));
            }
            let ej = alg
                .join(a, b)
                .ok_or(ObsError::RequiresLattice)?;
            let qj = Observable::question(Arc::clone(alg), &ej)?;
            match equal_or_fail("q_a ∨ q_b", "q_{a∨b}", join2(&qa, &qb)?, qj) {
                Outcome::Pass => {}
                fail => return Ok(fail),
            }
            if let Some(c) = alg.sum(a, b) {
                let qc = Observable::question(Arc::clone(alg), &c)?;
                match equal_or_fail("q_a + q_b", "q_{a+b}", add(&qa, &qb)?, qc) {
                    Outcome::Pass => {}
                    fail => return Ok(fail),
                }
            }
            Ok(Outcome::Pass)
        }
        LawId::DedekindFin => {
            let [x, y, z] = obs_case(case, 3) else { unreachable!() };
            let j = join2(&join2(x, y)?, z)?;
            match equal_or_fail("(x ∨ y) ∨ z", "x ∨ (y ∨ z)", j.clone(), join2(x, &join2(y, z)?)?)
            {
                Outcome::Pass => {}
                fail => return Ok(fail),
            }
            let m = meet2(&meet2(x, y)?, z)?;
            match equal_or_fail("(x ∧ y) ∧ z", "x ∧ (y ∧ z)", m.clone(), meet2(x, &meet2(y, z)?)?)
            {
                Outcome::Pass => {}
                fail => return Ok(fail),
            }
            for w in [x, y, z] {
                match leq_or_fail("w ⋠ x ∨ y ∨ z for some argument w", w, &j)? {
                    Outcome::Pass => {}
                    fail => return Ok(fail),
                }
                match leq_or_fail("x ∧ y ∧ z ⋠ w for some argument w", &m, w)? {
                    Outcome::Pass => {}
                    fail => return Ok(fail),
                }
            }
            Ok(Outcome::Pass)
        }
        LawId::FcalcAdd => {
            let Case::Affine { x, f, g } = case else {
                panic!("case shape does not match law");
            };
            let fx = x.affine(f.0, f.1);
            let gx = x.affine(g.0, g.1);
            let lhs = add(&fx, &gx)?;
            let rhs = x.affine(f.0 + g.0, f.1 + g.1);
            Ok(equal_or_fail("f∘x + g∘x", "(f+g)∘x", lhs, rhs))
        }
        LawId::OracleEq => {
            let [x, y] = obs_case(case, 2) else { unreachable!() };
            let s = add(x, y)?;
            let res = s.resolution();
            for (t, v) in sum_oracle_default(x, y, 2)? {
                let computed = res.eval(t);
                if computed != v {
                    return Ok(Outcome::Fail(Failure {
                        detail: "computed sum disagrees with the defining-join oracle".to_string(),
                        lhs: Some(s),
                        rhs: None,
                        probe: Some(t),
                        witnesses: vec![computed, v],
                    }));
                }
            }
            Ok(Outcome::Pass)
        }
    }
}
