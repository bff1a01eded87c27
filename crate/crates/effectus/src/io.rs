//! File formats: algebras and observables as structured JSON text.
//!
//! Rationals are serialized as strings `"p/q"` (or a bare integer string),
//! never as floats, keeping files exact and diff-friendly. Writes are
//! canonical: pretty-printed with stable field and entry order and a
//! trailing newline, so byte-identical round-trips are part of the
//! contract.

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, EffectAlgebra, Element};
use crate::observable::{ObsError, Observable};
use crate::rational::Rational;

/// Errors from reading, writing, or interpreting files.
#[derive(Debug, Error)]
pub enum IoError {
    #[error("failed to read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("failed to write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: invalid JSON at line {line}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid rational `{0}` (expected `p/q` or an integer string)")]
    BadRational(String),
    #[error("mass `{mass}` does not match the algebra (coordinates for products, names for tables)")]
    MassForm { mass: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Observable(#[from] ObsError),
}

impl IoError {
    /// True when the error is a well-formed-input failure of the algebra
    /// axioms (as opposed to unreadable/unparseable input).
    pub fn is_axiom_violation(&self) -> bool {
        matches!(self, IoError::Algebra(AlgebraError::Axiom(_)))
    }
}

/// On-disk algebra description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgebraFile {
    ProductChains {
        orders: Vec<u32>,
    },
    Table {
        elements: Vec<String>,
        zero: String,
        one: String,
        sums: Vec<[String; 3]>,
    },
}

impl AlgebraFile {
    pub fn to_algebra(&self) -> Result<EffectAlgebra, AlgebraError> {
        match self {
            AlgebraFile::ProductChains { orders } => EffectAlgebra::product_of_chains(orders),
            AlgebraFile::Table {
                elements,
                zero,
                one,
                sums,
            } => {
                let triples: Vec<(String, String, String)> = sums
                    .iter()
                    .map(|[a, b, z]| (a.clone(), b.clone(), z.clone()))
                    .collect();
                EffectAlgebra::table(elements.clone(), zero, one, &triples)
            }
        }
    }

    pub fn from_algebra(alg: &EffectAlgebra) -> AlgebraFile {
        if let Some(orders) = alg.chain_orders() {
            return AlgebraFile::ProductChains {
                orders: orders.to_vec(),
            };
        }
        let names = alg
            .element_names()
            .expect("non-product algebras are tables")
            .to_vec();
        let elems = alg.elements();
        let mut sums = Vec::new();
        for a in &elems {
            for b in &elems {
                if let Some(z) = alg.sum(a, b) {
                    sums.push([
                        alg.format_element(a),
                        alg.format_element(b),
                        alg.format_element(&z),
                    ]);
                }
            }
        }
        AlgebraFile::Table {
            elements: names,
            zero: alg.format_element(&alg.zero()),
            one: alg.format_element(&alg.one()),
            sums,
        }
    }
}

/// Mass of a support point: coordinates for product algebras, an element
/// name for table algebras.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MassFile {
    Coords(Vec<u32>),
    Name(String),
}

/// One support point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointFile {
    pub t: String,
    pub mass: MassFile,
}

/// Inline algebra or a path to an algebra file (relative paths resolve
/// against the referring file's directory).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgebraRef {
    Inline(AlgebraFile),
    Path(String),
}

/// On-disk observable description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObservableFile {
    pub algebra: AlgebraRef,
    /// Present and true on outputs of a forced sum over an algebra without
    /// the distributive laws: the sum laws are not guaranteed there.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forced: Option<bool>,
    pub points: Vec<PointFile>,
}

/// Parse a rational from its file form.
pub fn parse_rational(s: &str) -> Result<Rational, IoError> {
    Rational::from_str(s.trim()).map_err(|_| IoError::BadRational(s.to_string()))
}

/// Format a rational for a file: `p/q`, or a bare integer when q = 1.
pub fn format_rational(r: Rational) -> String {
    r.to_string()
}

fn mass_to_element(alg: &EffectAlgebra, mass: &MassFile) -> Result<Element, IoError> {
    let element = match mass {
        MassFile::Coords(coords) => Element::Product(coords.clone()),
        MassFile::Name(name) => alg.parse_element(name)?,
    };
    alg.check_member(&element).map_err(|_| IoError::MassForm {
        mass: match mass {
            MassFile::Coords(c) => format!("{c:?}"),
            MassFile::Name(n) => n.clone(),
        },
    })?;
    Ok(element)
}

fn element_to_mass(alg: &EffectAlgebra, e: &Element) -> MassFile {
    match e {
        Element::Product(coords) => MassFile::Coords(coords.clone()),
        Element::Table(_) => MassFile::Name(alg.format_element(e)),
    }
}

impl ObservableFile {
    /// Interpret the file, resolving a path-form algebra reference against
    /// `base_dir`. Returns the observable plus its forced-sum marker.
    pub fn to_observable(&self, base_dir: Option<&Path>) -> Result<(Observable, bool), IoError> {
        let algebra = match &self.algebra {
            AlgebraRef::Inline(f) => Arc::new(f.to_algebra()?),
            AlgebraRef::Path(p) => {
                let mut path = PathBuf::from(p);
                if path.is_relative() {
                    if let Some(dir) = base_dir {
                        path = dir.join(path);
                    }
                }
                Arc::new(read_algebra(&path)?)
            }
        };
        let mut points = Vec::with_capacity(self.points.len());
        for p in &self.points {
            let t = parse_rational(&p.t)?;
            let mass = mass_to_element(&algebra, &p.mass)?;
            points.push((t, mass));
        }
        let obs = Observable::discrete(algebra, points)?;
        Ok((obs, self.forced.unwrap_or(false)))
    }

    /// Canonical file form of an observable (inline algebra, so the file is
    /// self-contained).
    pub fn from_observable(x: &Observable, forced: bool) -> ObservableFile {
        let alg = x.algebra();
        ObservableFile {
            algebra: AlgebraRef::Inline(AlgebraFile::from_algebra(alg)),
            forced: if forced { Some(true) } else { None },
            points: x
                .support()
                .iter()
                .map(|(t, m)| PointFile {
                    t: format_rational(*t),
                    mass: element_to_mass(alg, m),
                })
                .collect(),
        }
    }
}

/// Canonical JSON text: pretty-printed plus a trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialization cannot fail");
    s.push('\n');
    s
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T, IoError> {
    serde_json::from_str(text).map_err(|e| IoError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn read_text(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    std::fs::write(path, text).map_err(|source| IoError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// Read and validate an algebra file.
pub fn read_algebra(path: &Path) -> Result<EffectAlgebra, IoError> {
    let text = read_text(path)?;
    let file: AlgebraFile = parse_json(path, &text)?;
    Ok(file.to_algebra()?)
}

/// Write an algebra in canonical form.
pub fn write_algebra(path: &Path, alg: &EffectAlgebra) -> Result<(), IoError> {
    write_text(path, &to_canonical_json(&AlgebraFile::from_algebra(alg)))
}

/// Read and validate an observable file; returns the forced-sum marker too.
pub fn read_observable(path: &Path) -> Result<(Observable, bool), IoError> {
    let text = read_text(path)?;
    let file: ObservableFile = parse_json(path, &text)?;
    file.to_observable(path.parent())
}

/// Write an observable in canonical form.
pub fn write_observable(path: &Path, x: &Observable, forced: bool) -> Result<(), IoError> {
    write_text(
        path,
        &to_canonical_json(&ObservableFile::from_observable(x, forced)),
    )
}
