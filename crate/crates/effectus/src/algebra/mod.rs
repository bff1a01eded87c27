//! Finite effect algebras.
//!
//! An effect algebra is a set with a partially defined binary sum `+`,
//! distinguished elements `0` and `1`, satisfying:
//!
//! 1. commutativity: `a+b` is defined iff `b+a` is defined, and then they
//!    are equal;
//! 2. associativity: if `a+b` and `(a+b)+c` are defined, then `b+c` and
//!    `a+(b+c)` are defined and `(a+b)+c = a+(b+c)`;
//! 3. unique complement: for every `a` there is exactly one `a'` with
//!    `a+a' = 1`;
//! 4. zero-one law: if `a+1` is defined then `a = 0`.
//!
//! The derived order is `a ≤ b` iff `a+c = b` for some `c`; the difference
//! `b−a` is `(b'+a)'`.
//!
//! Two representations are provided: products of finite chains (which
//! realize every finite MV-effect algebra, with O(k) coordinatewise
//! operations) and explicit sum tables (validated exhaustively, so that
//! structures outside the MV class — such as the diamond or a horizontal
//! sum of Boolean blocks — can be studied).

mod props;
mod table;

pub use props::AlgebraProperties;
pub(crate) use table::TableAlgebra;

use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

/// A point of a finite effect algebra: either a coordinate vector over a
/// product of chains, or an index into a table algebra's element list.
///
/// The derived `Ord` is a structural (container) order used for
/// deterministic iteration and set storage; the *algebra* order is
/// [`EffectAlgebra::leq`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Element {
    /// Coordinate vector `(a_1, …, a_k)` with `0 ≤ a_i ≤ u_i`.
    Product(Vec<u32>),
    /// Index into the element list of a table algebra.
    Table(usize),
}

/// Errors raised while constructing or operating on effect algebras.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("a chain must have order at least 1 (the one-point algebra with 0 = 1 is excluded)")]
    DegenerateChain,
    #[error("a product needs at least one factor")]
    EmptyProduct,
    #[error("product factors must themselves be products of chains")]
    NonProductFactor,
    #[error("a table algebra needs at least two elements")]
    EmptyTable,
    #[error("duplicate element name `{0}`")]
    DuplicateName(String),
    #[error("unknown element name `{0}`")]
    UnknownName(String),
    #[error("zero and one must be distinct elements")]
    ZeroEqualsOne,
    #[error("conflicting sum entries: {a} + {b} is listed as both {z1} and {z2}")]
    ConflictingTriple {
        a: String,
        b: String,
        z1: String,
        z2: String,
    },
    #[error("effect-algebra axiom violated: {0}")]
    Axiom(#[from] AxiomViolation),
    #[error("element {element} does not belong to this algebra")]
    ForeignElement { element: String },
    #[error("operation requires an MV-effect algebra, but this algebra is not MV")]
    NotMv,
    #[error("difference b−a requires a ≤ b, but {a} ≰ {b}")]
    DiffOrder { a: String, b: String },
}

/// A named effect-algebra axiom violation carrying its witnessing elements.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AxiomViolation {
    #[error("commutativity fails at ({a}, {b}): {detail}")]
    Commutativity { a: String, b: String, detail: String },
    #[error("associativity fails at ({a}, {b}, {c}): {detail}")]
    Associativity {
        a: String,
        b: String,
        c: String,
        detail: String,
    },
    #[error("element {a} has no complement (no x with {a} + x = 1)")]
    MissingComplement { a: String },
    #[error("element {a} has two complements: {x} and {y}")]
    AmbiguousComplement { a: String, x: String, y: String },
    #[error("zero-one law fails: {a} + 1 is defined but {a} ≠ 0")]
    ZeroOneLaw { a: String },
    #[error("derived order is not a partial order: {detail}")]
    OrderDegenerate { detail: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    Product { orders: Vec<u32> },
    Table(Box<TableAlgebra>),
}

/// A finite effect algebra.
///
/// Algebras are immutable after construction; all operations are pure, so
/// values may be freely shared across threads (typically via `Arc`).
/// Classification ([`AlgebraProperties`]) is computed lazily and cached.
#[derive(Debug)]
pub struct EffectAlgebra {
    repr: Repr,
    props: OnceLock<AlgebraProperties>,
}

impl PartialEq for EffectAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.repr == other.repr
    }
}

impl Eq for EffectAlgebra {}

/// Result of [`EffectAlgebra::lattice_compare`]: order flags plus the meet
/// and join when they exist (they may not in a non-lattice algebra).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementComparison {
    pub leq: bool,
    pub geq: bool,
    pub meet: Option<Element>,
    pub join: Option<Element>,
}

impl EffectAlgebra {
    /// The chain `C(n) = {0, 1, …, n}` with `a+b` defined iff `a+b ≤ n`.
    pub fn chain(n: u32) -> Result<Self, AlgebraError> {
        if n == 0 {
            return Err(AlgebraError::DegenerateChain);
        }
        Ok(Self::from_orders(vec![n]))
    }

    /// Product of finitely many chains, `C(u_1) × ⋯ × C(u_k)`, with
    /// coordinatewise partial sum. Every finite MV-effect algebra has this
    /// form.
    pub fn product_of_chains(orders: &[u32]) -> Result<Self, AlgebraError> {
        if orders.is_empty() {
            return Err(AlgebraError::EmptyProduct);
        }
        if orders.contains(&0) {
            return Err(AlgebraError::DegenerateChain);
        }
        Ok(Self::from_orders(orders.to_vec()))
    }

    /// Coordinatewise product of existing product-of-chains algebras.
    pub fn product(factors: &[EffectAlgebra]) -> Result<Self, AlgebraError> {
        if factors.is_empty() {
            return Err(AlgebraError::EmptyProduct);
        }
        let mut orders = Vec::new();
        for f in factors {
            match &f.repr {
                Repr::Product { orders: o } => orders.extend_from_slice(o),
                Repr::Table(_) => return Err(AlgebraError::NonProductFactor),
            }
        }
        Ok(Self::from_orders(orders))
    }

    fn from_orders(orders: Vec<u32>) -> Self {
        EffectAlgebra {
            repr: Repr::Product { orders },
            props: OnceLock::new(),
        }
    }

    /// Build a table algebra from element names and explicit sum triples
    /// `(x, y, z)` meaning `x+y = z`. Omitted pairs are undefined sums.
    ///
    /// The axioms are validated exhaustively; any violation is reported with
    /// the witnessing elements.
    pub fn table(
        names: Vec<String>,
        zero: &str,
        one: &str,
        sums: &[(String, String, String)],
    ) -> Result<Self, AlgebraError> {
        let table = TableAlgebra::build(names, zero, one, sums)?;
        Ok(EffectAlgebra {
            repr: Repr::Table(Box::new(table)),
            props: OnceLock::new(),
        })
    }

    /// The diamond `{0, a, b, 1}` with `a+a = b+b = 1` and `a+b` undefined:
    /// a distributive lattice effect algebra that is neither MV nor RDP.
    pub fn diamond() -> Self {
        let names: Vec<String> = ["0", "a", "b", "1"].iter().map(|s| s.to_string()).collect();
        let mut sums = Vec::new();
        for x in &names {
            sums.push(("0".to_string(), x.clone(), x.clone()));
            if x != "0" {
                sums.push((x.clone(), "0".to_string(), x.clone()));
            }
        }
        sums.push(("a".to_string(), "a".to_string(), "1".to_string()));
        sums.push(("b".to_string(), "b".to_string(), "1".to_string()));
        Self::table(names, "0", "1", &sums).expect("diamond is a valid effect algebra")
    }

    /// The horizontal sum of two four-element Boolean blocks sharing 0 and 1
    /// (the orthomodular lattice MO2): a lattice orthoalgebra violating the
    /// distributive laws.
    pub fn mo2() -> Self {
        let names: Vec<String> = ["0", "a", "a'", "b", "b'", "1"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let mut sums = Vec::new();
        for x in &names {
            sums.push(("0".to_string(), x.clone(), x.clone()));
            if x != "0" {
                sums.push((x.clone(), "0".to_string(), x.clone()));
            }
        }
        for (p, q) in [("a", "a'"), ("a'", "a"), ("b", "b'"), ("b'", "b")] {
            sums.push((p.to_string(), q.to_string(), "1".to_string()));
        }
        Self::table(names, "0", "1", &sums).expect("MO2 is a valid effect algebra")
    }

    /// Number of elements.
    pub fn size(&self) -> u128 {
        match &self.repr {
            Repr::Product { orders } => orders.iter().map(|&u| u as u128 + 1).product(),
            Repr::Table(t) => t.len() as u128,
        }
    }

    /// True when this algebra is in product-of-chains form.
    pub fn is_product_form(&self) -> bool {
        matches!(self.repr, Repr::Product { .. })
    }

    /// Chain orders for product-form algebras.
    pub fn chain_orders(&self) -> Option<&[u32]> {
        match &self.repr {
            Repr::Product { orders } => Some(orders),
            Repr::Table(_) => None,
        }
    }

    /// Element names for table-form algebras.
    pub fn element_names(&self) -> Option<&[String]> {
        match &self.repr {
            Repr::Table(t) => Some(t.names()),
            Repr::Product { .. } => None,
        }
    }

    /// The bottom element 0.
    pub fn zero(&self) -> Element {
        match &self.repr {
            Repr::Product { orders } => Element::Product(vec![0; orders.len()]),
            Repr::Table(t) => Element::Table(t.zero()),
        }
    }

    /// The top element 1.
    pub fn one(&self) -> Element {
        match &self.repr {
            Repr::Product { orders } => Element::Product(orders.clone()),
            Repr::Table(t) => Element::Table(t.one()),
        }
    }

    /// Membership test (structural: matching form and in-range data).
    pub fn contains(&self, a: &Element) -> bool {
        match (&self.repr, a) {
            (Repr::Product { orders }, Element::Product(coords)) => {
                coords.len() == orders.len()
                    && coords.iter().zip(orders.iter()).all(|(&c, &u)| c <= u)
            }
            (Repr::Table(t), Element::Table(i)) => *i < t.len(),
            _ => false,
        }
    }

    /// Membership check returning a descriptive error.
    pub fn check_member(&self, a: &Element) -> Result<(), AlgebraError> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(AlgebraError::ForeignElement {
                element: format!("{a:?}"),
            })
        }
    }

    fn assert_member(&self, a: &Element) {
        assert!(
            self.contains(a),
            "element {a:?} does not belong to this algebra"
        );
    }

    /// All elements, in canonical (structural) order.
    pub fn elements(&self) -> Vec<Element> {
        match &self.repr {
            Repr::Product { orders } => {
                let size = self.size();
                assert!(
                    size <= 1 << 22,
                    "element enumeration over {size} elements is not supported"
                );
                let mut out = Vec::with_capacity(size as usize);
                let mut cur = vec![0u32; orders.len()];
                loop {
                    out.push(Element::Product(cur.clone()));
                    // Mixed-radix increment, last coordinate fastest.
                    let mut i = orders.len();
                    loop {
                        if i == 0 {
                            return out;
                        }
                        i -= 1;
                        if cur[i] < orders[i] {
                            cur[i] += 1;
                            break;
                        }
                        cur[i] = 0;
                    }
                }
            }
            Repr::Table(t) => (0..t.len()).map(Element::Table).collect(),
        }
    }

    /// Canonical index of an element, consistent with [`Self::elements`].
    pub fn element_index(&self, a: &Element) -> usize {
        self.assert_member(a);
        match (&self.repr, a) {
            (Repr::Product { orders }, Element::Product(coords)) => {
                let mut idx: usize = 0;
                for (&c, &u) in coords.iter().zip(orders.iter()) {
                    idx = idx * (u as usize + 1) + c as usize;
                }
                idx
            }
            (Repr::Table(_), Element::Table(i)) => *i,
            _ => unreachable!(),
        }
    }

    /// Partial sum `a+b`; `None` when undefined.
    ///
    /// # Panics
    /// Panics if either element does not belong to this algebra; use
    /// [`Self::try_sum`] at trust boundaries.
    pub fn sum(&self, a: &Element, b: &Element) -> Option<Element> {
        self.assert_member(a);
        self.assert_member(b);
        match (&self.repr, a, b) {
            (Repr::Product { orders }, Element::Product(x), Element::Product(y)) => {
                let mut out = Vec::with_capacity(orders.len());
                for i in 0..orders.len() {
                    let s = x[i] + y[i];
                    if s > orders[i] {
                        return None;
                    }
                    out.push(s);
                }
                Some(Element::Product(out))
            }
            (Repr::Table(t), Element::Table(i), Element::Table(j)) => {
                t.sum(*i, *j).map(Element::Table)
            }
            _ => unreachable!(),
        }
    }

    /// Checked variant of [`Self::sum`] for untrusted inputs.
    pub fn try_sum(&self, a: &Element, b: &Element) -> Result<Option<Element>, AlgebraError> {
        self.check_member(a)?;
        self.check_member(b)?;
        Ok(self.sum(a, b))
    }

    /// The unique complement `a'` with `a+a' = 1`.
    pub fn complement(&self, a: &Element) -> Element {
        self.assert_member(a);
        match (&self.repr, a) {
            (Repr::Product { orders }, Element::Product(x)) => Element::Product(
                x.iter()
                    .zip(orders.iter())
                    .map(|(&c, &u)| u - c)
                    .collect(),
            ),
            (Repr::Table(t), Element::Table(i)) => Element::Table(t.complement(*i)),
            _ => unreachable!(),
        }
    }

    /// Difference `b−a = (b'+a)'`, defined exactly when `a ≤ b`.
    pub fn diff(&self, a: &Element, b: &Element) -> Option<Element> {
        let bc = self.complement(b);
        self.sum(&bc, a).map(|s| self.complement(&s))
    }

    /// Derived order: `a ≤ b` iff `a+c = b` for some `c`.
    pub fn leq(&self, a: &Element, b: &Element) -> bool {
        self.assert_member(a);
        self.assert_member(b);
        match (&self.repr, a, b) {
            (Repr::Product { .. }, Element::Product(x), Element::Product(y)) => {
                x.iter().zip(y.iter()).all(|(&c, &d)| c <= d)
            }
            (Repr::Table(t), Element::Table(i), Element::Table(j)) => t.leq(*i, *j),
            _ => unreachable!(),
        }
    }

    /// Greatest lower bound, when it exists.
    pub fn meet(&self, a: &Element, b: &Element) -> Option<Element> {
        self.assert_member(a);
        self.assert_member(b);
        match (&self.repr, a, b) {
            (Repr::Product { .. }, Element::Product(x), Element::Product(y)) => Some(
                Element::Product(x.iter().zip(y.iter()).map(|(&c, &d)| c.min(d)).collect()),
            ),
            (Repr::Table(t), Element::Table(i), Element::Table(j)) => {
                t.meet(*i, *j).map(Element::Table)
            }
            _ => unreachable!(),
        }
    }

    /// Least upper bound, when it exists.
    pub fn join(&self, a: &Element, b: &Element) -> Option<Element> {
        self.assert_member(a);
        self.assert_member(b);
        match (&self.repr, a, b) {
            (Repr::Product { .. }, Element::Product(x), Element::Product(y)) => Some(
                Element::Product(x.iter().zip(y.iter()).map(|(&c, &d)| c.max(d)).collect()),
            ),
            (Repr::Table(t), Element::Table(i), Element::Table(j)) => {
                t.join(*i, *j).map(Element::Table)
            }
            _ => unreachable!(),
        }
    }

    /// Order flags together with meet and join (which may not exist in a
    /// non-lattice algebra).
    pub fn lattice_compare(&self, a: &Element, b: &Element) -> ElementComparison {
        ElementComparison {
            leq: self.leq(a, b),
            geq: self.leq(b, a),
            meet: self.meet(a, b),
            join: self.join(a, b),
        }
    }

    /// Total MV sum `a⊕b = a + (a'∧b)`; requires an MV algebra.
    pub fn mv_oplus(&self, a: &Element, b: &Element) -> Result<Element, AlgebraError> {
        if !self.properties().is_mv {
            return Err(AlgebraError::NotMv);
        }
        let ac = self.complement(a);
        let m = self.meet(&ac, b).expect("MV algebras are lattices");
        Ok(self
            .sum(a, &m)
            .expect("a + (a'∧b) is defined in an MV algebra"))
    }

    /// Total MV product `a⊙b = (a'⊕b')'`; requires an MV algebra.
    pub fn mv_odot(&self, a: &Element, b: &Element) -> Result<Element, AlgebraError> {
        let s = self.mv_oplus(&self.complement(a), &self.complement(b))?;
        Ok(self.complement(&s))
    }

    /// Both total MV operations `(a⊕b, a⊙b)` at once.
    pub fn mv_total_ops(
        &self,
        a: &Element,
        b: &Element,
    ) -> Result<(Element, Element), AlgebraError> {
        Ok((self.mv_oplus(a, b)?, self.mv_odot(a, b)?))
    }

    /// Sharpness: `a` is sharp when `a∧a'` exists and equals 0.
    pub fn is_sharp(&self, a: &Element) -> bool {
        let ac = self.complement(a);
        match self.meet(a, &ac) {
            Some(m) => m == self.zero(),
            None => false,
        }
    }

    /// The set of sharp elements, in canonical order.
    pub fn sharp_elements(&self) -> Vec<Element> {
        self.properties().sharp_set.iter().cloned().collect()
    }

    /// Exhaustive structural classification (lattice, distributivity, RDP,
    /// MV, orthoalgebra, Boolean, sharp set). Computed once and cached.
    pub fn properties(&self) -> &AlgebraProperties {
        self.props.get_or_init(|| props::compute(self))
    }

    /// Human-readable element rendering: `(1,0)` for products, the element
    /// name for tables.
    pub fn format_element(&self, a: &Element) -> String {
        match (&self.repr, a) {
            (Repr::Product { .. }, Element::Product(coords)) => {
                let inner: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
                format!("({})", inner.join(","))
            }
            (Repr::Table(t), Element::Table(i)) if *i < t.len() => t.names()[*i].clone(),
            _ => format!("{a:?}"),
        }
    }

    /// Parse an element from its textual form: a coordinate list like
    /// `1,0` or `(1,0)` or `[1,0]` for products, an element name for tables.
    pub fn parse_element(&self, s: &str) -> Result<Element, AlgebraError> {
        match &self.repr {
            Repr::Product { .. } => {
                let trimmed = s
                    .trim()
                    .trim_start_matches(['(', '['])
                    .trim_end_matches([')', ']']);
                let coords: Result<Vec<u32>, _> =
                    trimmed.split(',').map(|p| p.trim().parse::<u32>()).collect();
                let coords = coords.map_err(|_| AlgebraError::UnknownName(s.to_string()))?;
                let e = Element::Product(coords);
                self.check_member(&e)
                    .map_err(|_| AlgebraError::UnknownName(s.to_string()))?;
                Ok(e)
            }
            Repr::Table(t) => t
                .names()
                .iter()
                .position(|n| n == s)
                .map(Element::Table)
                .ok_or_else(|| AlgebraError::UnknownName(s.to_string())),
        }
    }
}

impl fmt::Display for EffectAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Product { orders } => {
                let parts: Vec<String> = orders.iter().map(|u| format!("C({u})")).collect();
                write!(f, "{}", parts.join("×"))
            }
            Repr::Table(t) => write!(f, "table[{}]", t.len()),
        }
    }
}
