//! Explicit sum-table effect algebras with exhaustive axiom validation.

use super::{AlgebraError, AxiomViolation};

/// A validated table algebra: element names, the partial sum matrix, and
/// derived structure (complements, order, meets/joins where they exist).
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct TableAlgebra {
    names: Vec<String>,
    zero: usize,
    one: usize,
    /// `n×n` partial sum matrix, row-major: `sum[i*n + j] = Some(k)` iff
    /// `names[i] + names[j] = names[k]`.
    sum: Vec<Option<usize>>,
    complement: Vec<usize>,
    leq: Vec<bool>,
    meet: Vec<Option<usize>>,
    join: Vec<Option<usize>>,
}

impl TableAlgebra {
    pub(crate) fn len(&self) -> usize {
        self.names.len()
    }

    pub(crate) fn names(&self) -> &[String] {
        &self.names
    }

    pub(crate) fn zero(&self) -> usize {
        self.zero
    }

    pub(crate) fn one(&self) -> usize {
        self.one
    }

    pub(crate) fn sum(&self, i: usize, j: usize) -> Option<usize> {
        self.sum[i * self.len() + j]
    }

    pub(crate) fn complement(&self, i: usize) -> usize {
        self.complement[i]
    }

    pub(crate) fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i * self.len() + j]
    }

    pub(crate) fn meet(&self, i: usize, j: usize) -> Option<usize> {
        self.meet[i * self.len() + j]
    }

    pub(crate) fn join(&self, i: usize, j: usize) -> Option<usize> {
        self.join[i * self.len() + j]
    }

    /// Build and exhaustively validate a table algebra.
    pub(crate) fn build(
        names: Vec<String>,
        zero: &str,
        one: &str,
        sums: &[(String, String, String)],
    ) -> Result<Self, AlgebraError> {
        if names.len() < 2 {
            return Err(AlgebraError::EmptyTable);
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(AlgebraError::DuplicateName(n.clone()));
            }
        }
        let index = |s: &str| -> Result<usize, AlgebraError> {
            names
                .iter()
                .position(|n| n == s)
                .ok_or_else(|| AlgebraError::UnknownName(s.to_string()))
        };
        let zero = index(zero)?;
        let one = index(one)?;
        if zero == one {
            return Err(AlgebraError::ZeroEqualsOne);
        }

        let n = names.len();
        let mut sum: Vec<Option<usize>> = vec![None; n * n];
        for (a, b, z) in sums {
            let (i, j, k) = (index(a)?, index(b)?, index(z)?);
            match sum[i * n + j] {
                None => sum[i * n + j] = Some(k),
                Some(prev) if prev == k => {}
                Some(prev) => {
                    return Err(AlgebraError::ConflictingTriple {
                        a: names[i].clone(),
                        b: names[j].clone(),
                        z1: names[prev].clone(),
                        z2: names[k].clone(),
                    });
                }
            }
        }

        let name = |i: usize| names[i].clone();

        // Axiom 1: commutativity (same definedness, same value).
        for i in 0..n {
            for j in 0..n {
                match (sum[i * n + j], sum[j * n + i]) {
                    (Some(x), Some(y)) if x != y => {
                        return Err(AxiomViolation::Commutativity {
                            a: name(i),
                            b: name(j),
                            detail: format!(
                                "{} + {} = {} but {} + {} = {}",
                                name(i),
                                name(j),
                                name(x),
                                name(j),
                                name(i),
                                name(y)
                            ),
                        }
                        .into());
                    }
                    (Some(_), None) => {
                        return Err(AxiomViolation::Commutativity {
                            a: name(i),
                            b: name(j),
                            detail: format!(
                                "{} + {} is defined but {} + {} is not",
                                name(i),
                                name(j),
                                name(j),
                                name(i)
                            ),
                        }
                        .into());
                    }
                    _ => {}
                }
            }
        }

        // Axiom 2: associativity. If a+b and (a+b)+c are defined then b+c
        // and a+(b+c) must be defined with the same total.
        for a in 0..n {
            for b in 0..n {
                let Some(ab) = sum[a * n + b] else { continue };
                for c in 0..n {
                    let Some(abc) = sum[ab * n + c] else {
                        continue;
                    };
                    let Some(bc) = sum[b * n + c] else {
                        return Err(AxiomViolation::Associativity {
                            a: name(a),
                            b: name(b),
                            c: name(c),
                            detail: format!(
                                "({} + {}) + {} is defined but {} + {} is not",
                                name(a),
                                name(b),
                                name(c),
                                name(b),
                                name(c)
                            ),
                        }
                        .into());
                    };
                    match sum[a * n + bc] {
                        Some(t) if t == abc => {}
                        Some(t) => {
                            return Err(AxiomViolation::Associativity {
                                a: name(a),
                                b: name(b),
                                c: name(c),
                                detail: format!(
                                    "({} + {}) + {} = {} but {} + ({} + {}) = {}",
                                    name(a),
                                    name(b),
                                    name(c),
                                    name(abc),
                                    name(a),
                                    name(b),
                                    name(c),
                                    name(t)
                                ),
                            }
                            .into());
                        }
                        None => {
                            return Err(AxiomViolation::Associativity {
                                a: name(a),
                                b: name(b),
                                c: name(c),
                                detail: format!(
                                    "({} + {}) + {} is defined but {} + ({} + {}) is not",
                                    name(a),
                                    name(b),
                                    name(c),
                                    name(a),
                                    name(b),
                                    name(c)
                                ),
                            }
                            .into());
                        }
                    }
                }
            }
        }

        // Axiom 3: unique complement.
        let mut complement = vec![usize::MAX; n];
        for a in 0..n {
            let mut found: Option<usize> = None;
            for x in 0..n {
                if sum[a * n + x] == Some(one) {
                    match found {
                        None => found = Some(x),
                        Some(prev) => {
                            return Err(AxiomViolation::AmbiguousComplement {
                                a: name(a),
                                x: name(prev),
                                y: name(x),
                            }
                            .into());
                        }
                    }
                }
            }
            match found {
                Some(x) => complement[a] = x,
                None => {
                    return Err(AxiomViolation::MissingComplement { a: name(a) }.into());
                }
            }
        }

        // Axiom 4: zero-one law.
        for a in 0..n {
            if sum[a * n + one].is_some() && a != zero {
                return Err(AxiomViolation::ZeroOneLaw { a: name(a) }.into());
            }
        }

        // Derived order: a ≤ b iff a+c = b for some c.
        let mut leq = vec![false; n * n];
        for a in 0..n {
            for b in 0..n {
                leq[a * n + b] = (0..n).any(|c| sum[a * n + c] == Some(b));
            }
        }

        // The axioms make ≤ a partial order and ' an involution; verify both
        // exhaustively so that a validator defect cannot slip through.
        for a in 0..n {
            if complement[complement[a]] != a {
                return Err(AxiomViolation::OrderDegenerate {
                    detail: format!("complement is not an involution at {}", name(a)),
                }
                .into());
            }
            if !leq[a * n + a] {
                return Err(AxiomViolation::OrderDegenerate {
                    detail: format!("{} ≤ {} fails (no zero row?)", name(a), name(a)),
                }
                .into());
            }
        }
        for a in 0..n {
            for b in 0..n {
                if a != b && leq[a * n + b] && leq[b * n + a] {
                    return Err(AxiomViolation::OrderDegenerate {
                        detail: format!("antisymmetry fails at ({}, {})", name(a), name(b)),
                    }
                    .into());
                }
                for c in 0..n {
                    if leq[a * n + b] && leq[b * n + c] && !leq[a * n + c] {
                        return Err(AxiomViolation::OrderDegenerate {
                            detail: format!(
                                "transitivity fails at ({}, {}, {})",
                                name(a),
                                name(b),
                                name(c)
                            ),
                        }
                        .into());
                    }
                }
            }
        }

        // Meets and joins by exhaustive bound search; `None` marks a pair
        // with no greatest lower / least upper bound.
        let mut meet = vec![None; n * n];
        let mut join = vec![None; n * n];
        for a in 0..n {
            for b in 0..n {
                let lower: Vec<usize> =
                    (0..n).filter(|&c| leq[c * n + a] && leq[c * n + b]).collect();
                meet[a * n + b] = lower
                    .iter()
                    .copied()
                    .find(|&c0| lower.iter().all(|&c| leq[c * n + c0]));
                let upper: Vec<usize> =
                    (0..n).filter(|&c| leq[a * n + c] && leq[b * n + c]).collect();
                join[a * n + b] = upper
                    .iter()
                    .copied()
                    .find(|&c0| upper.iter().all(|&c| leq[c0 * n + c]));
            }
        }

        Ok(TableAlgebra {
            names,
            zero,
            one,
            sum,
            complement,
            leq,
            meet,
            join,
        })
    }
}
