//! Counterexample search: exhaustive over small cases first, then seeded
//! random sampling from a widened space, within a fixed tuple budget.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::EffectAlgebra;
use crate::lawcheck::gen::{CaseGen, SupportGrid};
use crate::lawcheck::laws::{evaluate, LawId, Outcome};
use crate::lawcheck::{
    build_counterexample, AlgebraEcho, Counterexample, LawError, LawSuiteConfig,
};

/// What one search phase covered.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchPhase {
    pub grid_denom: u32,
    pub grid_lo: String,
    pub grid_hi: String,
    pub max_support: u64,
    /// Cases evaluated in this phase.
    pub examined: u64,
    /// For the exhaustive phase: whether the whole space fit in budget.
    pub exhausted: bool,
}

/// A bounded none-found claim: exactly what was searched.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchCertificate {
    /// Exhaustive phase over the configured grid, smallest supports first.
    pub exhaustive: SearchPhase,
    /// Seeded random phase over a widened grid, if budget remained.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<SearchPhase>,
    pub seed: u64,
}

/// Result of a counterexample search.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub law: LawId,
    pub algebra: AlgebraEcho,
    pub budget: u64,
    pub examined: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub found: Option<Counterexample>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<SearchCertificate>,
}

/// Search for a counterexample to one law within a budget of case tuples.
///
/// Phase 1 enumerates the full case space of the configured grid with the
/// base observables ordered by support size, so any witness found is small.
/// If that space is exhausted with budget to spare, phase 2 samples
/// seeded-random cases from a widened space (denominator doubled, support
/// one larger). Sum-gated laws still require force off MV algebras.
pub fn search_counterexample(
    alg: &Arc<EffectAlgebra>,
    law: LawId,
    config: &LawSuiteConfig,
    budget: u64,
) -> Result<SearchOutcome, LawError> {
    config.validate()?;
    if budget < 1 {
        return Err(LawError::InvalidConfig(
            "search budget must be at least 1".to_string(),
        ));
    }
    let props = alg.properties();
    if law.needs_sum() && !props.is_mv && !config.force {
        return Err(LawError::SumLawsNeedForce {
            laws: law.name().to_string(),
        });
    }
    if law.needs_lattice() && !props.is_lattice {
        return Err(LawError::InvalidConfig(
            "law needs lattice operations, but the algebra is not a lattice".to_string(),
        ));
    }

    let mut examined = 0u64;

    // Phase 1: exhaustive, minimal cases first.
    let mut cases = CaseGen::new(
        alg,
        law.kind(),
        &config.grid,
        config.max_support,
        config.seed,
        true,
    )?;
    sort_base_by_support(&mut cases);
    let mut exhausted = true;
    for case in &mut cases {
        if examined == budget {
            exhausted = false;
            break;
        }
        examined += 1;
        match evaluate(law, alg, &case, config.force)? {
            Outcome::Pass => {}
            Outcome::Fail(failure) => {
                return Ok(SearchOutcome {
                    law,
                    algebra: AlgebraEcho::of(alg),
                    budget,
                    examined,
                    found: Some(build_counterexample(law, alg, &case, failure)),
                    certificate: None,
                });
            }
        }
    }
    let exhaustive_phase = SearchPhase {
        grid_denom: config.grid.denom,
        grid_lo: config.grid.lo.to_string(),
        grid_hi: config.grid.hi.to_string(),
        max_support: config.max_support as u64,
        examined,
        exhausted,
    };

    // Phase 2: seeded random over a widened space, if budget remains.
    let mut random_phase = None;
    if exhausted && examined < budget {
        let wide = SupportGrid {
            denom: config.grid.denom.saturating_mul(2),
            lo: config.grid.lo,
            hi: config.grid.hi,
        };
        let mut cases = CaseGen::new(
            alg,
            law.kind(),
            &wide,
            config.max_support + 1,
            config.seed.wrapping_add(1),
            false,
        )?;
        let mut sampled = 0u64;
        while examined < budget {
            let Some(case) = cases.next() else { break };
            examined += 1;
            sampled += 1;
            match evaluate(law, alg, &case, config.force)? {
                Outcome::Pass => {}
                Outcome::Fail(failure) => {
                    return Ok(SearchOutcome {
                        law,
                        algebra: AlgebraEcho::of(alg),
                        budget,
                        examined,
                        found: Some(build_counterexample(law, alg, &case, failure)),
                        certificate: None,
                    });
                }
            }
        }
        random_phase = Some(SearchPhase {
            grid_denom: wide.denom,
            grid_lo: wide.lo.to_string(),
            grid_hi: wide.hi.to_string(),
            max_support: (config.max_support + 1) as u64,
            examined: sampled,
            exhausted: false,
        });
    }

    Ok(SearchOutcome {
        law,
        algebra: AlgebraEcho::of(alg),
        budget,
        examined,
        found: None,
        certificate: Some(SearchCertificate {
            exhaustive: exhaustive_phase,
            random: random_phase,
            seed: config.seed,
        }),
    })
}

/// Order the exhaustive base list by support size (stable), so tuples of
/// small observables come first and witnesses are minimal.
fn sort_base_by_support(cases: &mut CaseGen) {
    match cases {
        CaseGen::ObsExhaustive { base, .. } | CaseGen::AffineExhaustive { base, .. } => {
            base.sort_by_key(|x| x.support().len());
        }
        _ => {}
    }
}
