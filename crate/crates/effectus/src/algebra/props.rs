//! Exhaustive structural classification of finite effect algebras.

use std::collections::{BTreeMap, BTreeSet};

use super::{EffectAlgebra, Element};

/// Classification flags plus the sharp set.
///
/// Guaranteed relationships (and verified exhaustively in the test suite):
/// `is_mv ⟺ is_lattice ∧ has_rdp`; `is_boolean ⟹ is_mv`; every element of
/// a Boolean algebra is sharp.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraProperties {
    /// Every pair has a meet and a join.
    pub is_lattice: bool,
    /// Both lattice distributive laws hold for all triples (requires a
    /// lattice). This is the hypothesis under which the sum of observables
    /// is guaranteed to exist.
    pub is_distributive: bool,
    /// Riesz decomposition: every `a1+a2 = b1+b2` refines through a 2×2
    /// matrix of elements.
    pub has_rdp: bool,
    /// Lattice and `a∧b = 0 ⟹ a+b defined` (MV-effect algebra).
    pub is_mv: bool,
    /// `a+a defined ⟹ a = 0`.
    pub is_orthoalgebra: bool,
    /// `a+b defined ⟺ a∧b = 0`.
    pub is_boolean: bool,
    /// Elements `a` with `a∧a'` existing and equal to 0.
    pub sharp_set: BTreeSet<Element>,
}

/// Elements beyond which product-form classification switches from the
/// exhaustive checks to the (provably equivalent) closed-form answers.
const EXHAUSTIVE_LIMIT: u128 = 128;

pub(crate) fn compute(alg: &EffectAlgebra) -> AlgebraProperties {
    if alg.is_product_form() && alg.size() > EXHAUSTIVE_LIMIT {
        return product_closed_form(alg);
    }
    exhaustive(alg)
}

/// Products of chains are MV-effect algebras: lattice, distributive, RDP;
/// Boolean/orthoalgebra exactly when every chain has order 1; an element is
/// sharp iff each coordinate is 0 or maximal. Used only above
/// [`EXHAUSTIVE_LIMIT`]; agreement with the exhaustive path is pinned by
/// tests on smaller products.
fn product_closed_form(alg: &EffectAlgebra) -> AlgebraProperties {
    let orders = alg
        .chain_orders()
        .expect("closed form applies to product algebras only");
    let boolean = orders.iter().all(|&u| u == 1);
    let mut sharp_set = BTreeSet::new();
    // Sharp elements: every 0/max coordinate pattern.
    let k = orders.len();
    for mask in 0u64..(1u64 << k.min(20)) {
        if k > 20 {
            break; // enumerating 2^k sharp elements is pointless beyond this
        }
        let coords: Vec<u32> = (0..k)
            .map(|i| if mask >> i & 1 == 1 { orders[i] } else { 0 })
            .collect();
        sharp_set.insert(Element::Product(coords));
    }
    AlgebraProperties {
        is_lattice: true,
        is_distributive: true,
        has_rdp: true,
        is_mv: true,
        is_orthoalgebra: boolean,
        is_boolean: boolean,
        sharp_set,
    }
}

#[cfg(test)]
pub(crate) fn product_closed_form_for_tests(alg: &EffectAlgebra) -> AlgebraProperties {
    product_closed_form(alg)
}

fn exhaustive(alg: &EffectAlgebra) -> AlgebraProperties {
    let elems = alg.elements();
    let zero = alg.zero();

    let mut is_lattice = true;
    'lattice: for a in &elems {
        for b in &elems {
            if alg.meet(a, b).is_none() || alg.join(a, b).is_none() {
                is_lattice = false;
                break 'lattice;
            }
        }
    }

    let is_distributive = is_lattice && {
        let mut ok = true;
        'dist: for a in &elems {
            for b in &elems {
                for c in &elems {
                    let bc_join = alg.join(b, c).unwrap();
                    let lhs = alg.meet(a, &bc_join).unwrap();
                    let rhs = alg
                        .join(&alg.meet(a, b).unwrap(), &alg.meet(a, c).unwrap())
                        .unwrap();
                    if lhs != rhs {
                        ok = false;
                        break 'dist;
                    }
                    let bc_meet = alg.meet(b, c).unwrap();
                    let lhs2 = alg.join(a, &bc_meet).unwrap();
                    let rhs2 = alg
                        .meet(&alg.join(a, b).unwrap(), &alg.join(a, c).unwrap())
                        .unwrap();
                    if lhs2 != rhs2 {
                        ok = false;
                        break 'dist;
                    }
                }
            }
        }
        ok
    };

    let has_rdp = check_rdp(alg, &elems);

    let is_mv = is_lattice && {
        let mut ok = true;
        'mv: for a in &elems {
            for b in &elems {
                if alg.meet(a, b).as_ref() == Some(&zero) && alg.sum(a, b).is_none() {
                    ok = false;
                    break 'mv;
                }
            }
        }
        ok
    };

    let is_orthoalgebra = elems.iter().all(|a| alg.sum(a, a).is_none() || *a == zero);

    let is_boolean = {
        let mut ok = true;
        'boolean: for a in &elems {
            for b in &elems {
                let summable = alg.sum(a, b).is_some();
                let disjoint = alg.meet(a, b).as_ref() == Some(&zero);
                if summable != disjoint {
                    ok = false;
                    break 'boolean;
                }
            }
        }
        ok
    };

    let sharp_set: BTreeSet<Element> = elems
        .iter()
        .filter(|a| alg.is_sharp(a))
        .cloned()
        .collect();

    AlgebraProperties {
        is_lattice,
        is_distributive,
        has_rdp,
        is_mv,
        is_orthoalgebra,
        is_boolean,
        sharp_set,
    }
}

/// Riesz decomposition property, checked over every equality
/// `a1+a2 = b1+b2`: search for `c11` with `c11 ≤ a1`, `c11 ≤ b1` such that
/// the forced remainders `c12 = a1−c11`, `c21 = b1−c11`, `c22 = a2−c21`
/// close up with `c12+c22 = b2`.
fn check_rdp(alg: &EffectAlgebra, elems: &[Element]) -> bool {
    // Group summable pairs by their sum so only genuine equalities are
    // examined.
    let mut by_sum: BTreeMap<Element, Vec<(Element, Element)>> = BTreeMap::new();
    for a in elems {
        for b in elems {
            if let Some(s) = alg.sum(a, b) {
                by_sum.entry(s).or_default().push((a.clone(), b.clone()));
            }
        }
    }
    for pairs in by_sum.values() {
        for (a1, a2) in pairs {
            for (b1, b2) in pairs {
                let refinable = elems.iter().any(|c11| {
                    if !alg.leq(c11, a1) || !alg.leq(c11, b1) {
                        return false;
                    }
                    let c12 = alg.diff(c11, a1).expect("c11 ≤ a1");
                    let c21 = alg.diff(c11, b1).expect("c11 ≤ b1");
                    if !alg.leq(&c21, a2) {
                        return false;
                    }
                    let c22 = alg.diff(&c21, a2).expect("c21 ≤ a2");
                    alg.sum(&c12, &c22).as_ref() == Some(b2)
                });
                if !refinable {
                    return false;
                }
            }
        }
    }
    true
}
