//! Command-line front end: validate algebras, build and combine
//! observables, and run the law engine.
//!
//! Exit codes: 0 success (valid input / all laws pass / none found),
//! 1 axiom or law violation (with a witness), 2 usage or parse errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use effectus::io::{
    parse_rational, read_algebra, read_observable, to_canonical_json, IoError, ObservableFile,
};
use effectus::lawcheck::{
    run_suite, search_counterexample, LawError, LawId, LawSuiteConfig, SupportGrid,
};
use effectus::observable::{FiniteMap, ObsError, Observable};
use effectus::olson::{obs_join, obs_meet, olson_compare};
use effectus::sum::{obs_sum, obs_sum_forced};
use effectus::EffectAlgebra;

#[derive(Parser)]
#[command(
    name = "effectus",
    version,
    about = "Finite effect algebras, spectral resolutions, and the observable calculus"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Inspect algebra files
    Alg {
        #[command(subcommand)]
        cmd: AlgCmd,
    },
    /// Build and combine observable files
    Obs {
        #[command(subcommand)]
        cmd: ObsCmd,
    },
    /// Run law suites and counterexample searches
    Laws {
        #[command(subcommand)]
        cmd: LawsCmd,
    },
}

#[derive(Subcommand)]
enum AlgCmd {
    /// Validate an algebra file and print its classification
    Check {
        /// Algebra file to validate
        path: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args)]
struct OutputArgs {
    /// Write the result here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum ObsCmd {
    /// The two-valued observable of an algebra element
    Question {
        /// Algebra file
        #[arg(long)]
        algebra: PathBuf,
        /// Element, e.g. "(1,0)" for products or a name for tables
        #[arg(long)]
        element: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Sum of two observables
    Sum {
        x: PathBuf,
        y: PathBuf,
        /// Compute even when the algebra lacks the distributive laws
        /// (the result then carries a forced marker)
        #[arg(long)]
        force: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Greatest lower bound of two or more observables
    Meet {
        #[arg(num_args = 2.., required = true)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Least upper bound of two or more observables
    Join {
        #[arg(num_args = 2.., required = true)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Compare two observables: LESS, GREATER, EQUAL, or INCOMPARABLE
    Order {
        x: PathBuf,
        y: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Apply a finite map to the support, e.g. [["0","1"],["1","0"]]
    Compose {
        x: PathBuf,
        /// JSON list of [point, image] rational-string pairs covering the support
        #[arg(long)]
        map: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// The observable mirrored at zero (t ↦ −t)
    Negate {
        x: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args)]
struct LawConfigArgs {
    /// Algebra file the laws run over
    #[arg(long)]
    algebra: PathBuf,
    /// Random seed; fully determines randomized runs
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Denominator bound for generated support points
    #[arg(long, default_value_t = 1)]
    grid_denom: u32,
    /// Lower end of the support range (rational, e.g. -1 or -3/2)
    #[arg(long, default_value = "-1", allow_hyphen_values = true)]
    grid_lo: String,
    /// Upper end of the support range
    #[arg(long, default_value = "2", allow_hyphen_values = true)]
    grid_hi: String,
    /// Largest number of support points per generated observable
    #[arg(long, default_value_t = 3)]
    max_support: usize,
    /// Evaluate sum-dependent laws even off MV algebras
    #[arg(long)]
    force: bool,
}

#[derive(Subcommand)]
enum LawsCmd {
    /// Evaluate laws on generated cases and report per-law results
    Run {
        #[command(flatten)]
        config: LawConfigArgs,
        /// Law ids to run (repeatable); default is the whole catalog
        #[arg(long = "law")]
        laws: Vec<String>,
        /// Named selection; only "all" is defined
        #[arg(long)]
        suite: Option<String>,
        /// Random cases per law
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Enumerate every case on the grid instead of sampling
        #[arg(long)]
        exhaustive: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Hunt for a counterexample to one law within a case budget
    Search {
        #[command(flatten)]
        config: LawConfigArgs,
        /// Law id to attack
        #[arg(long)]
        law: String,
        /// Maximum number of cases to examine
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

/// A failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn violation(message: impl Into<String>) -> Failure {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Failure {
        // Anything that names a well-formed file describing a non-algebra
        // (missing complements, conflicting triples, ...) is an axiom
        // failure; file-syntax problems are usage errors.
        if matches!(e, IoError::Algebra(_)) {
            Failure::violation(e.to_string())
        } else {
            Failure::usage(e.to_string())
        }
    }
}

impl From<ObsError> for Failure {
    fn from(e: ObsError) -> Failure {
        Failure::usage(e.to_string())
    }
}

impl From<LawError> for Failure {
    fn from(e: LawError) -> Failure {
        Failure::usage(e.to_string())
    }
}

fn emit(out: &OutputArgs, text: &str) -> Result<(), Failure> {
    match &out.out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, text).map_err(|e| {
            Failure::usage(format!("failed to write {}: {e}", path.display()))
        }),
    }
}

#[derive(Serialize)]
struct CheckReport {
    valid: bool,
    algebra: effectus::lawcheck::AlgebraEcho,
    sharp_elements: Vec<String>,
}

fn cmd_alg_check(path: &Path, out: &OutputArgs) -> Result<(), Failure> {
    let alg = read_algebra(path)?;
    let echo = effectus::lawcheck::AlgebraEcho::of(&alg);
    let sharp: Vec<String> = alg
        .sharp_elements()
        .iter()
        .map(|e| alg.format_element(e))
        .collect();
    let text = match out.format {
        Format::Json => to_canonical_json(&CheckReport {
            valid: true,
            algebra: echo,
            sharp_elements: sharp,
        }),
        Format::Table => format!(
            "valid effect algebra {}\nsize={} lattice={} distributive={} rdp={} mv={} \
             orthoalgebra={} boolean={}\nsharp elements: {}\n",
            echo.description,
            echo.size,
            echo.is_lattice,
            echo.is_distributive,
            echo.has_rdp,
            echo.is_mv,
            echo.is_orthoalgebra,
            echo.is_boolean,
            sharp.join(", "),
        ),
    };
    emit(out, &text)
}

fn load_obs(path: &Path) -> Result<Observable, Failure> {
    Ok(read_observable(path)?.0)
}

fn emit_observable(x: &Observable, forced: bool, out: &OutputArgs) -> Result<(), Failure> {
    let file = ObservableFile::from_observable(x, forced);
    let text = match out.format {
        Format::Json => to_canonical_json(&file),
        Format::Table => {
            let alg = x.algebra();
            let mut s = format!("observable over {}\n", alg);
            for (t, m) in x.support() {
                s.push_str(&format!("  t = {t}  mass = {}\n", alg.format_element(m)));
            }
            if forced {
                s.push_str("forced: laws are not guaranteed on this algebra\n");
            }
            s
        }
    };
    emit(out, &text)
}

fn cmd_obs(cmd: &ObsCmd) -> Result<(), Failure> {
    match cmd {
        ObsCmd::Question {
            algebra,
            element,
            out,
        } => {
            let alg = Arc::new(read_algebra(algebra)?);
            let e = alg
                .parse_element(element)
                .map_err(|err| Failure::usage(err.to_string()))?;
            let q = Observable::question(Arc::clone(&alg), &e)?;
            emit_observable(&q, false, out)
        }
        ObsCmd::Sum { x, y, force, out } => {
            let a = load_obs(x)?;
            let b = load_obs(y)?;
            let s = if *force {
                obs_sum_forced(&a, &b)?
            } else {
                obs_sum(&a, &b)?
            };
            emit_observable(&s, *force, out)
        }
        ObsCmd::Meet { inputs, out } | ObsCmd::Join { inputs, out } => {
            let xs: Vec<Observable> = inputs
                .iter()
                .map(|p| load_obs(p))
                .collect::<Result<_, _>>()?;
            let r = if matches!(cmd, ObsCmd::Meet { .. }) {
                obs_meet(&xs)?
            } else {
                obs_join(&xs)?
            };
            emit_observable(&r, false, out)
        }
        ObsCmd::Order { x, y, out } => {
            let a = load_obs(x)?;
            let b = load_obs(y)?;
            let rel = olson_compare(&a, &b)?;
            emit(out, &format!("{rel}\n"))
        }
        ObsCmd::Compose { x, map, out } => {
            let a = load_obs(x)?;
            let pairs: Vec<[String; 2]> = serde_json::from_str(map)
                .map_err(|e| Failure::usage(format!("bad --map value: {e}")))?;
            let mut entries = Vec::with_capacity(pairs.len());
            for [t, v] in &pairs {
                entries.push((parse_rational(t)?, parse_rational(v)?));
            }
            let composed = a.compose(&FiniteMap::from_pairs(entries))?;
            emit_observable(&composed, false, out)
        }
        ObsCmd::Negate { x, out } => {
            let a = load_obs(x)?;
            emit_observable(&a.negate(), false, out)
        }
    }
}

fn parse_laws(names: &[String]) -> Result<Vec<LawId>, Failure> {
    names
        .iter()
        .map(|n| {
            LawId::from_name(n).ok_or_else(|| {
                Failure::usage(format!(
                    "unknown law id `{n}`; catalog: {}",
                    LawId::catalog_names()
                ))
            })
        })
        .collect()
}

fn build_config(
    args: &LawConfigArgs,
    laws: Vec<LawId>,
    samples: usize,
    exhaustive: bool,
) -> Result<(Arc<EffectAlgebra>, LawSuiteConfig), Failure> {
    let alg = Arc::new(read_algebra(&args.algebra)?);
    let lo = parse_rational(&args.grid_lo)?;
    let hi = parse_rational(&args.grid_hi)?;
    let grid = SupportGrid::new(args.grid_denom, lo, hi)?;
    let config = LawSuiteConfig {
        laws,
        sample_count: samples,
        seed: args.seed,
        grid,
        max_support: args.max_support,
        exhaustive,
        force: args.force,
    };
    Ok((alg, config))
}

fn cmd_laws(cmd: &LawsCmd) -> Result<(), Failure> {
    match cmd {
        LawsCmd::Run {
            config,
            laws,
            suite,
            samples,
            exhaustive,
            out,
        } => {
            if let Some(name) = suite {
                if name != "all" {
                    return Err(Failure::usage(format!(
                        "unknown suite `{name}`; the only named suite is `all`"
                    )));
                }
            }
            let selected = parse_laws(laws)?;
            let (alg, config) = build_config(config, selected, *samples, *exhaustive)?;
            let report = run_suite(&alg, &config)?;
            let text = match out.format {
                Format::Json => to_canonical_json(&report),
                Format::Table => report.render_table(),
            };
            emit(out, &text)?;
            if report.all_passed {
                Ok(())
            } else {
                Err(Failure::violation(format!(
                    "{} law(s) violated; the report carries replayable counterexamples",
                    report.violations()
                )))
            }
        }
        LawsCmd::Search {
            config,
            law,
            budget,
            out,
        } => {
            let law = parse_laws(std::slice::from_ref(law))?[0];
            let (alg, config) = build_config(config, vec![law], 1, false)?;
            let outcome = search_counterexample(&alg, law, &config, *budget)?;
            let text = match out.format {
                Format::Json => to_canonical_json(&outcome),
                Format::Table => {
                    let mut s = format!(
                        "search {} on {}: examined {} of {} budget\n",
                        law.name(),
                        outcome.algebra.description,
                        outcome.examined,
                        outcome.budget
                    );
                    match &outcome.found {
                        Some(ce) => s.push_str(&format!("counterexample: {}\n", ce.detail)),
                        None => s.push_str("no counterexample found in the searched space\n"),
                    }
                    s
                }
            };
            emit(out, &text)?;
            if outcome.found.is_some() {
                Err(Failure::violation(format!(
                    "counterexample to {} found",
                    law.name()
                )))
            } else {
                Ok(())
            }
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.cmd {
        Cmd::Alg {
            cmd: AlgCmd::Check { path, out },
        } => cmd_alg_check(path, out),
        Cmd::Obs { cmd } => cmd_obs(cmd),
        Cmd::Laws { cmd } => cmd_laws(cmd),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
