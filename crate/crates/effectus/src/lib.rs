//! Finite effect algebras, spectral resolutions, and the observable calculus.

pub mod algebra;
pub mod io;
pub mod lawcheck;
pub mod observable;
pub mod olson;
pub mod rational;
pub mod spectral;
pub mod sum;

pub use algebra::{
    AlgebraError, AlgebraProperties, AxiomViolation, EffectAlgebra, Element, ElementComparison,
};
pub use io::{
    format_rational, parse_rational, read_algebra, read_observable, to_canonical_json,
    write_algebra, write_observable, AlgebraFile, AlgebraRef, IoError, MassFile, ObservableFile,
    PointFile,
};
pub use lawcheck::{
    replay_counterexample, run_suite, search_counterexample, Counterexample, LawError, LawId,
    LawReport, LawResult, LawStatus, LawSuiteConfig, SearchOutcome, SupportGrid,
};
pub use observable::{FiniteMap, ObsError, Observable};
pub use olson::{
    is_sharp_observable, obs_join, obs_meet, olson_compare, olson_leq, sharp_inverse,
    sharpness_report, strong_unit_bound, OrderRelation, SharpnessReport,
};
pub use rational::{rat, rat_int, Rational};
pub use spectral::{SpectralError, SpectralResolution};
pub use sum::{obs_sum, obs_sum_forced, sum_oracle};
