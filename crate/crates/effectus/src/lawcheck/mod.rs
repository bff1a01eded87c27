//! Law checking: deterministic generators, exact law suites, and
//! counterexample search.
//!
//! A suite run draws seeded (or exhaustive) case tuples per law and
//! evaluates each law exactly, reporting counts and the first failing case
//! in deterministic enumeration order as a replayable counterexample.
//! Laws that depend on the observable sum are only guaranteed on MV
//! algebras; on anything else they are refused unless forced, since the
//! sum itself is only a definable operation there, not a guaranteed one.

pub mod gen;
pub mod laws;
pub mod search;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::EffectAlgebra;
use crate::io::{format_rational, parse_rational, AlgebraFile, IoError, ObservableFile};
use crate::observable::{ObsError, Observable};
use crate::rational::{rat_int, Rational};

pub use gen::SupportGrid;
pub use laws::{Case, LawId};
pub use search::{search_counterexample, SearchCertificate, SearchOutcome};

use laws::{evaluate, Failure, Outcome};

/// Errors from configuring or running the law engine.
#[derive(Debug, Error)]
pub enum LawError {
    #[error("unknown law id `{id}`; catalog: {catalog}")]
    UnknownLaw { id: String, catalog: String },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(
        "laws [{laws}] depend on the sum of observables, which is only guaranteed on \
         MV algebras; this algebra is not MV — pass force to evaluate them anyway"
    )]
    SumLawsNeedForce { laws: String },
    #[error("exhaustive enumeration exceeds the cap of {cap} cases")]
    ExhaustiveTooLarge { cap: u64 },
    #[error(transparent)]
    Obs(#[from] ObsError),
    #[error(transparent)]
    Io(#[from] IoError),
}

/// Full configuration of a suite run.
#[derive(Clone, Debug)]
pub struct LawSuiteConfig {
    /// Laws to run; empty means the whole catalog.
    pub laws: Vec<LawId>,
    /// Random cases per law (ignored in exhaustive mode).
    pub sample_count: usize,
    pub seed: u64,
    pub grid: SupportGrid,
    /// Largest number of support points per generated observable.
    pub max_support: usize,
    /// Enumerate every case on the grid instead of sampling.
    pub exhaustive: bool,
    /// Evaluate sum-dependent laws even off MV algebras.
    pub force: bool,
}

impl Default for LawSuiteConfig {
    fn default() -> LawSuiteConfig {
        LawSuiteConfig {
            laws: Vec::new(),
            sample_count: 100,
            seed: 0,
            grid: SupportGrid {
                denom: 1,
                lo: rat_int(-1),
                hi: rat_int(2),
            },
            max_support: 3,
            exhaustive: false,
            force: false,
        }
    }
}

impl LawSuiteConfig {
    pub fn validate(&self) -> Result<(), LawError> {
        if self.sample_count < 1 {
            return Err(LawError::InvalidConfig(
                "sample count must be at least 1".to_string(),
            ));
        }
        if self.max_support < 1 {
            return Err(LawError::InvalidConfig(
                "max support size must be at least 1".to_string(),
            ));
        }
        self.grid.validate()
    }

    /// The selected laws in catalog order (empty selection = all).
    pub fn selected_laws(&self) -> Vec<LawId> {
        if self.laws.is_empty() {
            LawId::ALL.to_vec()
        } else {
            LawId::ALL
                .into_iter()
                .filter(|l| self.laws.contains(l))
                .collect()
        }
    }
}

/// An affine map `t ↦ slope·t + intercept` in file form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineMapFile {
    pub slope: String,
    pub intercept: String,
}

/// A serialized case: the inputs a law was evaluated on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct CaseFile {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub observables: Vec<ObservableFile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub elements: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub functions: Vec<AffineMapFile>,
}

/// A replayable law violation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Counterexample {
    pub law: LawId,
    pub algebra: AlgebraFile,
    pub case: CaseFile,
    /// Human-readable statement of the failed equation or property.
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lhs: Option<ObservableFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rhs: Option<ObservableFile>,
    /// Probe `t` at which the two sides differ, when pointwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<String>,
    /// Algebra elements witnessing the inequality at the probe.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<String>,
}

/// Outcome of one law inside a suite run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawStatus {
    Passed,
    Failed,
    Rejected,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LawResult {
    pub law: LawId,
    pub status: LawStatus,
    pub checked: u64,
    pub passed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

/// Classification echo of the algebra a suite ran on.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlgebraEcho {
    pub description: String,
    pub size: u64,
    pub is_lattice: bool,
    pub is_distributive: bool,
    pub has_rdp: bool,
    pub is_mv: bool,
    pub is_orthoalgebra: bool,
    pub is_boolean: bool,
    pub sharp_count: u64,
}

impl AlgebraEcho {
    pub fn of(alg: &EffectAlgebra) -> AlgebraEcho {
        let props = alg.properties();
        AlgebraEcho {
            description: alg.to_string(),
            size: alg.size().min(u128::from(u64::MAX)) as u64,
            is_lattice: props.is_lattice,
            is_distributive: props.is_distributive,
            has_rdp: props.has_rdp,
            is_mv: props.is_mv,
            is_orthoalgebra: props.is_orthoalgebra,
            is_boolean: props.is_boolean,
            sharp_count: props.sharp_set.len() as u64,
        }
    }
}

/// Configuration echo, in file-friendly form.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub laws: Vec<LawId>,
    pub samples: u64,
    pub seed: u64,
    pub grid_denom: u32,
    pub grid_lo: String,
    pub grid_hi: String,
    pub max_support: u64,
    pub exhaustive: bool,
    pub force: bool,
}

impl ConfigEcho {
    fn of(config: &LawSuiteConfig) -> ConfigEcho {
        ConfigEcho {
            laws: config.selected_laws(),
            samples: config.sample_count as u64,
            seed: config.seed,
            grid_denom: config.grid.denom,
            grid_lo: format_rational(config.grid.lo),
            grid_hi: format_rational(config.grid.hi),
            max_support: config.max_support as u64,
            exhaustive: config.exhaustive,
            force: config.force,
        }
    }
}

/// Outcome of a full suite run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LawReport {
    pub algebra: AlgebraEcho,
    pub config: ConfigEcho,
    pub results: Vec<LawResult>,
    /// True when no law failed (rejected laws do not count as failures).
    pub all_passed: bool,
}

impl LawReport {
    pub fn violations(&self) -> u64 {
        self.results
            .iter()
            .filter(|r| r.status == LawStatus::Failed)
            .count() as u64
    }

    /// Fixed-width human-readable rendering.
    pub fn render_table(&self) -> String {
        let a = &self.algebra;
        let c = &self.config;
        let mut out = String::new();
        out.push_str(&format!(
            "algebra {}  size={}  lattice={} distributive={} rdp={} mv={} ortho={} boolean={} sharp={}\n",
            a.description,
            a.size,
            a.is_lattice,
            a.is_distributive,
            a.has_rdp,
            a.is_mv,
            a.is_orthoalgebra,
            a.is_boolean,
            a.sharp_count,
        ));
        out.push_str(&format!(
            "config  samples={} seed={} grid={}:[{},{}] max_support={} exhaustive={} force={}\n",
            c.samples,
            c.seed,
            c.grid_denom,
            c.grid_lo,
            c.grid_hi,
            c.max_support,
            c.exhaustive,
            c.force,
        ));
        out.push_str(&format!(
            "{:<16} {:<8} {:>8} {:>8}  {}\n",
            "LAW", "STATUS", "CHECKED", "PASSED", "NOTE"
        ));
        for r in &self.results {
            let status = match r.status {
                LawStatus::Passed => "passed",
                LawStatus::Failed => "FAILED",
                LawStatus::Rejected => "rejected",
            };
            let note = match r.status {
                LawStatus::Failed => r
                    .counterexample
                    .as_ref()
                    .map(|ce| ce.detail.clone())
                    .unwrap_or_default(),
                LawStatus::Rejected => r.reason.clone().unwrap_or_default(),
                LawStatus::Passed => String::new(),
            };
            out.push_str(&format!(
                "{:<16} {:<8} {:>8} {:>8}  {}\n",
                r.law.name(),
                status,
                r.checked,
                r.passed,
                note
            ));
        }
        out.push_str(if self.all_passed {
            "result: all laws passed\n"
        } else {
            "result: VIOLATIONS FOUND\n"
        });
        out
    }
}

pub(crate) fn case_to_file(alg: &Arc<EffectAlgebra>, case: &Case) -> CaseFile {
    match case {
        Case::Obs(v) => CaseFile {
            observables: v
                .iter()
                .map(|x| ObservableFile::from_observable(x, false))
                .collect(),
            ..CaseFile::default()
        },
        Case::Elems(a, b) => CaseFile {
            elements: vec![alg.format_element(a), alg.format_element(b)],
            ..CaseFile::default()
        },
        Case::Affine { x, f, g } => CaseFile {
            observables: vec![ObservableFile::from_observable(x, false)],
            functions: vec![
                AffineMapFile {
                    slope: format_rational(f.0),
                    intercept: format_rational(f.1),
                },
                AffineMapFile {
                    slope: format_rational(g.0),
                    intercept: format_rational(g.1),
                },
            ],
            ..CaseFile::default()
        },
    }
}

fn rebind(alg: &Arc<EffectAlgebra>, x: &Observable) -> Result<Observable, LawError> {
    if x.algebra().as_ref() != alg.as_ref() {
        return Err(LawError::InvalidConfig(
            "case observable lives over a different algebra".to_string(),
        ));
    }
    Ok(Observable::discrete(Arc::clone(alg), x.support().to_vec()).map_err(LawError::Obs)?)
}

pub(crate) fn case_from_file(
    alg: &Arc<EffectAlgebra>,
    law: LawId,
    file: &CaseFile,
) -> Result<Case, LawError> {
    let parse_fn = |f: &AffineMapFile| -> Result<(Rational, Rational), LawError> {
        Ok((parse_rational(&f.slope)?, parse_rational(&f.intercept)?))
    };
    match law.kind() {
        laws::CaseKind::Obs { arity, .. } => {
            if file.observables.len() != arity {
                return Err(LawError::InvalidConfig(format!(
                    "law {} needs {arity} observables, case has {}",
                    law,
                    file.observables.len()
                )));
            }
            let mut v = Vec::with_capacity(arity);
            for f in &file.observables {
                let (x, _) = f.to_observable(None)?;
                v.push(rebind(alg, &x)?);
            }
            Ok(Case::Obs(v))
        }
        laws::CaseKind::ElemPairs { .. } => {
            if file.elements.len() != 2 {
                return Err(LawError::InvalidConfig(format!(
                    "law {} needs 2 elements, case has {}",
                    law,
                    file.elements.len()
                )));
            }
            let a = alg
                .parse_element(&file.elements[0])
                .map_err(|e| LawError::InvalidConfig(e.to_string()))?;
            let b = alg
                .parse_element(&file.elements[1])
                .map_err(|e| LawError::InvalidConfig(e.to_string()))?;
            Ok(Case::Elems(a, b))
        }
        laws::CaseKind::AffinePair => {
            if file.observables.len() != 1 || file.functions.len() != 2 {
                return Err(LawError::InvalidConfig(format!(
                    "law {} needs 1 observable and 2 affine maps",
                    law
                )));
            }
            let (x, _) = file.observables[0].to_observable(None)?;
            Ok(Case::Affine {
                x: rebind(alg, &x)?,
                f: parse_fn(&file.functions[0])?,
                g: parse_fn(&file.functions[1])?,
            })
        }
    }
}

pub(crate) fn build_counterexample(
    law: LawId,
    alg: &Arc<EffectAlgebra>,
    case: &Case,
    failure: Failure,
) -> Counterexample {
    Counterexample {
        law,
        algebra: AlgebraFile::from_algebra(alg),
        case: case_to_file(alg, case),
        detail: failure.detail,
        lhs: failure
            .lhs
            .map(|o| ObservableFile::from_observable(&o, false)),
        rhs: failure
            .rhs
            .map(|o| ObservableFile::from_observable(&o, false)),
        probe: failure.probe.map(format_rational),
        witnesses: failure
            .witnesses
            .iter()
            .map(|e| alg.format_element(e))
            .collect(),
    }
}

/// Derived per-law seed so each law gets an independent, selection-stable
/// stream.
fn law_seed(base: u64, law: LawId) -> u64 {
    let idx = LawId::ALL.iter().position(|l| *l == law).unwrap() as u64;
    base ^ (idx + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Run the selected laws on one algebra.
pub fn run_suite(
    alg: &Arc<EffectAlgebra>,
    config: &LawSuiteConfig,
) -> Result<LawReport, LawError> {
    config.validate()?;
    let laws = config.selected_laws();
    let props = alg.properties();

    if !props.is_mv && !config.force {
        let gated: Vec<&str> = laws
            .iter()
            .filter(|l| l.needs_sum())
            .map(|l| l.name())
            .collect();
        if !gated.is_empty() {
            return Err(LawError::SumLawsNeedForce {
                laws: gated.join(", "),
            });
        }
    }

    let mut results = Vec::with_capacity(laws.len());
    for law in laws {
        results.push(run_one_law(alg, config, law));
    }
    let all_passed = results.iter().all(|r| r.status != LawStatus::Failed);
    Ok(LawReport {
        algebra: AlgebraEcho::of(alg),
        config: ConfigEcho::of(config),
        results,
        all_passed,
    })
}

fn run_one_law(alg: &Arc<EffectAlgebra>, config: &LawSuiteConfig, law: LawId) -> LawResult {
    if law.needs_lattice() && !alg.properties().is_lattice {
        return LawResult {
            law,
            status: LawStatus::Rejected,
            checked: 0,
            passed: 0,
            reason: Some("law needs lattice operations, but the algebra is not a lattice".into()),
            counterexample: None,
        };
    }
    let cases = match gen::CaseGen::new(
        alg,
        law.kind(),
        &config.grid,
        config.max_support,
        law_seed(config.seed, law),
        config.exhaustive,
    ) {
        Ok(c) => c,
        Err(e) => {
            return LawResult {
                law,
                status: LawStatus::Rejected,
                checked: 0,
                passed: 0,
                reason: Some(e.to_string()),
                counterexample: None,
            }
        }
    };
    let limit = if config.exhaustive {
        usize::MAX
    } else {
        config.sample_count
    };

    let mut checked = 0u64;
    let mut passed = 0u64;
    for case in cases.take(limit) {
        checked += 1;
        match evaluate(law, alg, &case, config.force) {
            Ok(Outcome::Pass) => passed += 1,
            Ok(Outcome::Fail(failure)) => {
                return LawResult {
                    law,
                    status: LawStatus::Failed,
                    checked,
                    passed,
                    reason: None,
                    counterexample: Some(build_counterexample(law, alg, &case, failure)),
                };
            }
            Err(e) => {
                return LawResult {
                    law,
                    status: LawStatus::Rejected,
                    checked: checked - 1,
                    passed,
                    reason: Some(e.to_string()),
                    counterexample: None,
                };
            }
        }
    }
    LawResult {
        law,
        status: LawStatus::Passed,
        checked,
        passed,
        reason: None,
        counterexample: None,
    }
}

/// Re-evaluate a stored counterexample from its serialized form. Returns
/// true when the law still fails on it (the expected outcome for a
/// well-formed counterexample).
pub fn replay_counterexample(ce: &Counterexample) -> Result<bool, LawError> {
    let alg = Arc::new(
        ce.algebra
            .to_algebra()
            .map_err(|e| LawError::InvalidConfig(e.to_string()))?,
    );
    let case = case_from_file(&alg, ce.law, &ce.case)?;
    // Replay always evaluates ungated: stored cases may come from forced
    // runs on non-MV algebras.
    match evaluate(ce.law, &alg, &case, true)? {
        Outcome::Fail(_) => Ok(true),
        Outcome::Pass => Ok(false),
    }
}
