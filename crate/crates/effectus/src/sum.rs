//! The sum of observables.
//!
//! The sum of two bounded observables `x`, `y` over a distributive lattice
//! effect algebra is the unique observable whose resolution is
//!
//! ```text
//! B_{x+y}(t) = ⋁_{r∈ℚ} ( B_x(r) ∧ B_y(t−r) ).
//! ```
//!
//! For step resolutions the supremum collapses to a finite join. Writing
//! `s_1 < … < s_m` for the breakpoints of `B_x` and `c_1 ≤ … ≤ c_m` for its
//! post-jump cumulative values, left-continuity of `B_y` gives
//!
//! ```text
//! B_{x+y}(t) = ⋁_{i=1..m} ( c_i ∧ B_y(t − s_i) ),
//! ```
//!
//! because within the band `r ∈ (s_i, s_{i+1}]` the term `B_x(r) ∧ B_y(t−r)`
//! is maximized as `r ↓ s_i`, where it tends to `c_i ∧ B_y(t−s_i)`. The
//! candidate jump positions of the sum are the pairwise sums `s_i + u_j` of
//! breakpoints, so the whole resolution is reconstructed exactly from
//! finitely many evaluations.
//!
//! This reduction is validated against [`sum_oracle`], a direct evaluation
//! of the defining join over a fine grid, which is kept deliberately
//! independent of the reduction (it never looks at candidate structure —
//! only at grid points handed to it).

use std::collections::BTreeSet;

use num_traits::Signed;

use crate::algebra::Element;
use crate::observable::{ObsError, Observable};
use crate::rational::{rat_int, Rational};
use crate::spectral::SpectralResolution;

/// Sum of observables over a common distributive lattice algebra.
///
/// Rejected with [`ObsError::RequiresDistributivity`] when the algebra does
/// not satisfy both distributive laws; see [`obs_sum_forced`] for the
/// research-mode override.
pub fn obs_sum(x: &Observable, y: &Observable) -> Result<Observable, ObsError> {
    check_same_algebra(x, y)?;
    if !x.algebra().properties().is_distributive {
        return Err(ObsError::RequiresDistributivity);
    }
    sum_impl(x, y)
}

/// Sum of observables without the distributivity gate.
///
/// On algebras without the distributive laws the defining join still
/// evaluates (on any lattice algebra), but none of the sum laws are
/// guaranteed; results should be treated as experimental data.
pub fn obs_sum_forced(x: &Observable, y: &Observable) -> Result<Observable, ObsError> {
    check_same_algebra(x, y)?;
    sum_impl(x, y)
}

pub(crate) fn check_same_algebra(x: &Observable, y: &Observable) -> Result<(), ObsError> {
    if x.algebra().as_ref() != y.algebra().as_ref() {
        return Err(ObsError::AlgebraMismatch);
    }
    Ok(())
}

fn sum_impl(x: &Observable, y: &Observable) -> Result<Observable, ObsError> {
    let alg = x.algebra();
    let bx = x.resolution();
    let by = y.resolution();

    let candidates: BTreeSet<Rational> = bx
        .breakpoints()
        .iter()
        .flat_map(|&s| by.breakpoints().iter().map(move |&u| s + u))
        .collect();
    let candidates: Vec<Rational> = candidates.into_iter().collect();

    // Post-jump value at each candidate = the defining join evaluated
    // anywhere strictly inside the following interval.
    let mut values = Vec::with_capacity(candidates.len());
    for (k, &t) in candidates.iter().enumerate() {
        let sample = match candidates.get(k + 1) {
            Some(&next) => (t + next) / rat_int(2),
            None => t + rat_int(1),
        };
        let mut acc = alg.zero();
        for (s, c) in bx.breakpoints().iter().zip(bx.values().iter()) {
            let yv = by.eval(sample - s);
            let term = alg
                .meet(c, &yv)
                .ok_or(ObsError::LatticeOpUndefined { op: "meet", t: sample })?;
            acc = alg
                .join(&acc, &term)
                .ok_or(ObsError::LatticeOpUndefined { op: "join", t: sample })?;
        }
        values.push(acc);
    }

    let resolution =
        SpectralResolution::new(std::sync::Arc::clone(alg), candidates, values)?;
    Ok(resolution.to_observable())
}

/// Direct evaluation of the defining join over an explicit finite grid:
///
/// ```text
/// B^S(t) = ⋁_{s∈S} ( B_x(s) ∧ B_y(t−s) )
/// ```
///
/// at each probe `t`, returned as `(probe, value)` pairs. This is a test
/// oracle: on a sufficiently fine grid it reproduces the true resolution at
/// every probe, while an undersampled grid may fall strictly below it (so
/// the sampled pairs need not form a valid resolution themselves).
pub fn sum_oracle(
    x: &Observable,
    y: &Observable,
    grid: &[Rational],
    probes: &[Rational],
) -> Result<Vec<(Rational, Element)>, ObsError> {
    check_same_algebra(x, y)?;
    let alg = x.algebra();
    let bx = x.resolution();
    let by = y.resolution();
    let mut out = Vec::with_capacity(probes.len());
    for &t in probes {
        let mut acc = alg.zero();
        for &s in grid {
            let xv = bx.eval(s);
            let yv = by.eval(t - s);
            let term = alg
                .meet(&xv, &yv)
                .ok_or(ObsError::LatticeOpUndefined { op: "meet", t })?;
            acc = alg
                .join(&acc, &term)
                .ok_or(ObsError::LatticeOpUndefined { op: "join", t })?;
        }
        out.push((t, acc));
    }
    Ok(out)
}

/// The standard probe set for comparing a computed sum against the oracle:
/// every candidate jump position `s_i + u_j`, the midpoints between
/// consecutive candidates, and one point beyond each end.
pub fn oracle_probes(x: &Observable, y: &Observable) -> Vec<Rational> {
    let bx = x.resolution();
    let by = y.resolution();
    let candidates: BTreeSet<Rational> = bx
        .breakpoints()
        .iter()
        .flat_map(|&s| by.breakpoints().iter().map(move |&u| s + u))
        .collect();
    let candidates: Vec<Rational> = candidates.into_iter().collect();
    let mut probes = BTreeSet::new();
    for &t in &candidates {
        probes.insert(t);
    }
    for w in candidates.windows(2) {
        probes.insert((w[0] + w[1]) / rat_int(2));
    }
    probes.insert(candidates[0] - rat_int(1));
    probes.insert(candidates[candidates.len() - 1] + rat_int(1));
    probes.into_iter().collect()
}

/// An equally spaced rational grid with power-of-`base` mesh, fine enough
/// that the oracle matches the true sum at all standard probes.
///
/// The mesh is chosen strictly smaller than every positive gap among
/// `(t − s_i) − u_j` (probes against shifted breakpoints) and among
/// consecutive breakpoints of either operand; the span covers every band in
/// which a term of the join can be nonzero. Any `base ≥ 2` works — dense
/// subgrids of ℚ with different bases (dyadic, triadic, …) give identical
/// oracle answers.
pub fn oracle_grid(x: &Observable, y: &Observable, base: u32) -> Vec<Rational> {
    assert!(base >= 2, "grid base must be at least 2");
    let probes = oracle_probes(x, y);
    let bx = x.resolution();
    let by = y.resolution();

    let mut gaps: Vec<Rational> = Vec::new();
    for &t in &probes {
        for &s in bx.breakpoints() {
            for &u in by.breakpoints() {
                let g = ((t - s) - u).abs();
                if g != rat_int(0) {
                    gaps.push(g);
                }
            }
        }
    }
    for w in bx.breakpoints().windows(2) {
        gaps.push(w[1] - w[0]);
    }
    for w in by.breakpoints().windows(2) {
        gaps.push(w[1] - w[0]);
    }
    let min_gap = gaps.iter().min().copied().unwrap_or_else(|| rat_int(1));

    let mut mesh = rat_int(1);
    let b = rat_int(base as i64);
    while mesh >= min_gap {
        mesh = mesh / b;
    }

    let (min_x, max_x) = (x.min_point(), x.max_point());
    let (min_y, max_y) = (y.min_point(), y.max_point());
    let lo = min_x.min(min_y).min(min_x + min_y) - rat_int(1);
    let hi = max_x.max(max_y).max(max_x + max_y) + rat_int(1);

    let mut grid = Vec::new();
    let mut p = lo;
    while p <= hi {
        grid.push(p);
        p = p + mesh;
    }
    grid
}

/// Convenience wrapper: evaluate the oracle on the standard probes with the
/// default fine grid for the given base.
pub fn sum_oracle_default(
    x: &Observable,
    y: &Observable,
    base: u32,
) -> Result<Vec<(Rational, Element)>, ObsError> {
    let probes = oracle_probes(x, y);
    let grid = oracle_grid(x, y, base);
    sum_oracle(x, y, &grid, &probes)
}
