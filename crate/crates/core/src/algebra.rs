//! Finite algebraic structures given as explicit operation tables, and
//! exhaustive axiom checks for monoids, idempotent semirings, Kleene
//! algebras and concurrent Kleene algebras.
//!
//! Every check is a brute-force sweep over the carrier. Carriers are small
//! (a few dozen elements at most), so an O(n^4) sweep is cheap and the
//! results need no symbolic reasoning to trust.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Index of an element inside its carrier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(pub usize);

impl Elem {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Problems with the shape of a structure, as opposed to axiom violations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("carrier must contain at least one element")]
    EmptyCarrier,
    #[error("duplicate element `{0}` in carrier")]
    DuplicateElement(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("element index {index} is outside a carrier of size {size}")]
    OutOfRange { index: usize, size: usize },
    #[error("table `{table}` has no entry for {position}")]
    MissingEntry { table: String, position: String },
    #[error("table `{table}` has {found} entries where {expected} were expected")]
    SizeMismatch {
        table: String,
        expected: usize,
        found: usize,
    },
}

/// An ordered finite set of named elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Carrier {
    names: Vec<String>,
    index: HashMap<String, Elem>,
}

impl Carrier {
    pub fn new<I, S>(names: I) -> Result<Self, StructureError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(StructureError::EmptyCarrier);
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), Elem(i)).is_some() {
                return Err(StructureError::DuplicateElement(name.clone()));
            }
        }
        Ok(Carrier { names, index })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    /// Always false; carriers are nonempty by construction.
    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn elements(&self) -> impl DoubleEndedIterator<Item = Elem> + ExactSizeIterator {
        (0..self.names.len()).map(Elem)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, e: Elem) -> &str {
        &self.names[e.0]
    }

    pub fn lookup(&self, name: &str) -> Result<Elem, StructureError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| StructureError::UnknownElement(name.to_string()))
    }

    pub fn contains(&self, e: Elem) -> bool {
        e.0 < self.names.len()
    }

    pub fn ensure(&self, e: Elem) -> Result<Elem, StructureError> {
        if self.contains(e) {
            Ok(e)
        } else {
            Err(StructureError::OutOfRange {
                index: e.0,
                size: self.len(),
            })
        }
    }
}

/// A total binary operation `rows x cols -> codomain`, stored row-major.
///
/// Square tables over one carrier are the common case; the action tables of
/// a C2KA reuse the same type with a stimulus row index and a behaviour
/// column index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinOpTable {
    rows: usize,
    cols: usize,
    codomain: usize,
    entries: Vec<Elem>,
}

impl BinOpTable {
    pub fn from_fn(size: usize, f: impl FnMut(Elem, Elem) -> Elem) -> Self {
        Self::rect_from_fn(size, size, size, f)
    }

    pub fn rect_from_fn(
        rows: usize,
        cols: usize,
        codomain: usize,
        mut f: impl FnMut(Elem, Elem) -> Elem,
    ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(Elem(r), Elem(c)));
            }
        }
        BinOpTable {
            rows,
            cols,
            codomain,
            entries,
        }
    }

    /// Builds a table from optional entries, failing on the first hole or
    /// on any value outside the codomain.
    pub fn from_partial(
        name: &str,
        rows: usize,
        cols: usize,
        codomain: usize,
        entries: &[Option<Elem>],
    ) -> Result<Self, StructureError> {
        if entries.len() != rows * cols {
            return Err(StructureError::SizeMismatch {
                table: name.to_string(),
                expected: rows * cols,
                found: entries.len(),
            });
        }
        let mut out = Vec::with_capacity(entries.len());
        for (i, e) in entries.iter().enumerate() {
            match e {
                Some(v) if v.0 < codomain => out.push(*v),
                Some(v) => {
                    return Err(StructureError::OutOfRange {
                        index: v.0,
                        size: codomain,
                    })
                }
                None => {
                    return Err(StructureError::MissingEntry {
                        table: name.to_string(),
                        position: format!("({}, {})", i / cols, i % cols),
                    })
                }
            }
        }
        Ok(BinOpTable {
            rows,
            cols,
            codomain,
            entries: out,
        })
    }

    pub fn from_rows(
        name: &str,
        codomain: usize,
        rows: Vec<Vec<Elem>>,
    ) -> Result<Self, StructureError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut flat = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(StructureError::SizeMismatch {
                    table: name.to_string(),
                    expected: c,
                    found: row.len(),
                });
            }
            flat.extend(row.into_iter().map(Some));
        }
        Self::from_partial(name, r, c, codomain, &flat)
    }

    #[inline]
    pub fn get(&self, a: Elem, b: Elem) -> Elem {
        debug_assert!(a.0 < self.rows && b.0 < self.cols);
        self.entries[a.0 * self.cols + b.0]
    }

    pub fn set(&mut self, a: Elem, b: Elem, v: Elem) {
        assert!(v.0 < self.codomain, "value outside codomain");
        self.entries[a.0 * self.cols + b.0] = v;
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn codomain(&self) -> usize {
        self.codomain
    }

    pub fn row(&self, a: Elem) -> &[Elem] {
        &self.entries[a.0 * self.cols..(a.0 + 1) * self.cols]
    }

    pub fn entries(&self) -> &[Elem] {
        &self.entries
    }

    pub fn is_square_over(&self, n: usize) -> bool {
        self.rows == n && self.cols == n && self.codomain == n
    }

    fn ensure_shape(
        &self,
        table: &str,
        rows: usize,
        cols: usize,
        codomain: usize,
    ) -> Result<(), StructureError> {
        if self.rows != rows || self.cols != cols || self.codomain != codomain {
            return Err(StructureError::SizeMismatch {
                table: table.to_string(),
                expected: rows * cols,
                found: self.rows * self.cols,
            });
        }
        Ok(())
    }
}

/// A total unary operation on a carrier.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UnaryOpTable {
    entries: Vec<Elem>,
}

impl UnaryOpTable {
    pub fn from_fn(size: usize, f: impl FnMut(Elem) -> Elem) -> Self {
        UnaryOpTable {
            entries: (0..size).map(Elem).map(f).collect(),
        }
    }

    pub fn from_partial(
        name: &str,
        size: usize,
        entries: &[Option<Elem>],
    ) -> Result<Self, StructureError> {
        if entries.len() != size {
            return Err(StructureError::SizeMismatch {
                table: name.to_string(),
                expected: size,
                found: entries.len(),
            });
        }
        let mut out = Vec::with_capacity(size);
        for (i, e) in entries.iter().enumerate() {
            match e {
                Some(v) if v.0 < size => out.push(*v),
                Some(v) => return Err(StructureError::OutOfRange { index: v.0, size }),
                None => {
                    return Err(StructureError::MissingEntry {
                        table: name.to_string(),
                        position: format!("({i})"),
                    })
                }
            }
        }
        Ok(UnaryOpTable { entries: out })
    }

    #[inline]
    pub fn get(&self, a: Elem) -> Elem {
        self.entries[a.0]
    }

    pub fn set(&mut self, a: Elem, v: Elem) {
        assert!(v.0 < self.entries.len(), "value outside carrier");
        self.entries[a.0] = v;
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Elem] {
        &self.entries
    }
}

/// One failed instance of a law.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Violation {
    pub law: String,
    /// Variable name and element name for each instantiated variable.
    pub bindings: Vec<(String, String)>,
    pub lhs: String,
    pub rhs: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.law)?;
        if !self.bindings.is_empty() {
            let vars: Vec<String> = self
                .bindings
                .iter()
                .map(|(v, e)| format!("{v}={e}"))
                .collect();
            write!(f, " at {}", vars.join(", "))?;
        }
        write!(f, ": lhs {} vs rhs {}", self.lhs, self.rhs)
    }
}

/// Outcome of an axiom sweep.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<String>,
    /// Side observations that are not laws, e.g. `commutative(+)`.
    pub properties: BTreeMap<String, bool>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violated(&self, law: &str) -> bool {
        self.violations.iter().any(|v| v.law == law)
    }

    /// Appends another report, dropping violations and warnings already present.
    pub fn merge(&mut self, other: AxiomReport) {
        let seen: HashSet<Violation> = self.violations.iter().cloned().collect();
        self.violations
            .extend(other.violations.into_iter().filter(|v| !seen.contains(v)));
        for w in other.warnings {
            if !self.warnings.contains(&w) {
                self.warnings.push(w);
            }
        }
        self.properties.extend(other.properties);
        self.sort();
    }

    fn sort(&mut self) {
        // stable: instances of one law keep carrier order
        self.violations.sort_by(|a, b| a.law.cmp(&b.law));
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CheckOptions {
    /// Report every failing instance instead of the first one per law.
    pub collect_all: bool,
    /// Demote a failure of `commutativity(*)` to a warning.
    pub par_commutativity_as_warning: bool,
    /// Demote a failure of the cascaded-output axiom of a C2KA to a warning.
    pub cascaded_output_as_warning: bool,
}

impl CheckOptions {
    pub fn relaxed() -> Self {
        CheckOptions {
            cascaded_output_as_warning: true,
            ..Default::default()
        }
    }
}

/// Accumulates violations while honouring the first-per-law default.
pub(crate) struct LawSink<'a> {
    opts: &'a CheckOptions,
    report: AxiomReport,
    violated: HashSet<String>,
    fail_fast: bool,
}

impl<'a> LawSink<'a> {
    pub(crate) fn new(opts: &'a CheckOptions) -> Self {
        LawSink {
            opts,
            report: AxiomReport::default(),
            violated: HashSet::new(),
            fail_fast: false,
        }
    }

    /// A sink that stops accepting anything after the first violation.
    pub(crate) fn fail_fast(opts: &'a CheckOptions) -> Self {
        LawSink {
            fail_fast: true,
            ..LawSink::new(opts)
        }
    }

    /// Whether further instances of `law` still need evaluating.
    pub(crate) fn wants(&self, law: &str) -> bool {
        if self.fail_fast {
            return self.violated.is_empty();
        }
        self.opts.collect_all || !self.violated.contains(law)
    }

    pub(crate) fn clean(&self) -> bool {
        self.violated.is_empty()
    }

    pub(crate) fn fail(
        &mut self,
        law: &str,
        bindings: Vec<(&str, &str)>,
        lhs: impl Into<String>,
        rhs: impl Into<String>,
    ) {
        if !self.wants(law) {
            return;
        }
        self.violated.insert(law.to_string());
        self.report.violations.push(Violation {
            law: law.to_string(),
            bindings: bindings
                .into_iter()
                .map(|(v, e)| (v.to_string(), e.to_string()))
                .collect(),
            lhs: lhs.into(),
            rhs: rhs.into(),
        });
    }

    pub(crate) fn warn(&mut self, msg: impl Into<String>) {
        let msg = msg.into();
        if !self.report.warnings.contains(&msg) {
            self.report.warnings.push(msg);
        }
    }

    pub(crate) fn property(&mut self, name: impl Into<String>, value: bool) {
        self.report.properties.insert(name.into(), value);
    }

    pub(crate) fn absorb(&mut self, other: AxiomReport) {
        for v in &other.violations {
            self.violated.insert(v.law.clone());
        }
        self.report.merge(other);
    }

    pub(crate) fn finish(mut self) -> AxiomReport {
        self.report.sort();
        self.report
    }
}

fn square(table: &BinOpTable, name: &str, carrier: &Carrier) -> Result<(), StructureError> {
    let n = carrier.len();
    table.ensure_shape(name, n, n, n)
}

/// `a <= b` in the natural order of an idempotent `+`, i.e. `a + b = b`.
pub fn natural_leq(plus: &BinOpTable, a: Elem, b: Elem) -> Result<bool, StructureError> {
    for e in [a, b] {
        if e.0 >= plus.rows() {
            return Err(StructureError::OutOfRange {
                index: e.0,
                size: plus.rows(),
            });
        }
    }
    Ok(leq(plus, a, b))
}

#[inline]
pub(crate) fn leq(plus: &BinOpTable, a: Elem, b: Elem) -> bool {
    plus.get(a, b) == b
}

pub fn check_monoid(
    carrier: &Carrier,
    op: &BinOpTable,
    identity: Elem,
    opts: &CheckOptions,
) -> Result<AxiomReport, StructureError> {
    check_monoid_labelled(carrier, op, "op", identity, opts)
}

pub(crate) fn check_monoid_labelled(
    carrier: &Carrier,
    op: &BinOpTable,
    label: &str,
    identity: Elem,
    opts: &CheckOptions,
) -> Result<AxiomReport, StructureError> {
    square(op, label, carrier)?;
    carrier.ensure(identity)?;
    let mut sink = LawSink::new(opts);
    let nm = |e: Elem| carrier.name(e);

    let assoc = format!("associativity({label})");
    'assoc: for a in carrier.elements() {
        for b in carrier.elements() {
            for c in carrier.elements() {
                if !sink.wants(&assoc) {
                    break 'assoc;
                }
                let lhs = op.get(op.get(a, b), c);
                let rhs = op.get(a, op.get(b, c));
                if lhs != rhs {
                    sink.fail(
                        &assoc,
                        vec![("a", nm(a)), ("b", nm(b)), ("c", nm(c))],
                        nm(lhs),
                        nm(rhs),
                    );
                }
            }
        }
    }

    let left = format!("left-identity({label})");
    let right = format!("right-identity({label})");
    for a in carrier.elements() {
        let l = op.get(identity, a);
        if l != a {
            sink.fail(&left, vec![("e", nm(identity)), ("a", nm(a))], nm(l), nm(a));
        }
        let r = op.get(a, identity);
        if r != a {
            sink.fail(
                &right,
                vec![("e", nm(identity)), ("a", nm(a))],
                nm(r),
                nm(a),
            );
        }
    }

    let commutative = carrier
        .elements()
        .all(|a| carrier.elements().all(|b| op.get(a, b) == op.get(b, a)));
    let idempotent = carrier.elements().all(|a| op.get(a, a) == a);
    sink.property(format!("commutative({label})"), commutative);
    sink.property(format!("idempotent({label})"), idempotent);
    Ok(sink.finish())
}

/// Labels used in law names for one semiring.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SemiringLabels<'a> {
    pub plus: &'a str,
    pub times: &'a str,
}

pub fn check_idempotent_semiring(
    carrier: &Carrier,
    plus: &BinOpTable,
    times: &BinOpTable,
    zero: Elem,
    one: Elem,
    opts: &CheckOptions,
) -> Result<AxiomReport, StructureError> {
    check_semiring_labelled(
        carrier,
        plus,
        times,
        zero,
        one,
        SemiringLabels {
            plus: "+",
            times: ".",
        },
        opts,
    )
}

pub(crate) fn check_semiring_labelled(
    carrier: &Carrier,
    plus: &BinOpTable,
    times: &BinOpTable,
    zero: Elem,
    one: Elem,
    labels: SemiringLabels<'_>,
    opts: &CheckOptions,
) -> Result<AxiomReport, StructureError> {
    square(plus, labels.plus, carrier)?;
    square(times, labels.times, carrier)?;
    carrier.ensure(zero)?;
    carrier.ensure(one)?;
    let mut sink = LawSink::new(opts);
    let nm = |e: Elem| carrier.name(e);
    let (p, t) = (labels.plus, labels.times);

    sink.absorb(check_monoid_labelled(carrier, plus, p, zero, opts)?);
    sink.absorb(check_monoid_labelled(carrier, times, t, one, opts)?);

    let comm = format!("commutativity({p})");
    let idem = format!("idempotence({p})");
    for a in carrier.elements() {
        let aa = plus.get(a, a);
        if aa != a {
            sink.fail(&idem, vec![("a", nm(a))], nm(aa), nm(a));
        }
        for b in carrier.elements() {
            if !sink.wants(&comm) {
                break;
            }
            let (ab, ba) = (plus.get(a, b), plus.get(b, a));
            if ab != ba {
                sink.fail(&comm, vec![("a", nm(a)), ("b", nm(b))], nm(ab), nm(ba));
            }
        }
    }

    let ldist = format!("left-distributivity({t} over {p})");
    let rdist = format!("right-distributivity({t} over {p})");
    for a in carrier.elements() {
        for b in carrier.elements() {
            for c in carrier.elements() {
                if sink.wants(&ldist) {
                    let lhs = times.get(a, plus.get(b, c));
                    let rhs = plus.get(times.get(a, b), times.get(a, c));
                    if lhs != rhs {
                        sink.fail(
                            &ldist,
                            vec![("a", nm(a)), ("b", nm(b)), ("c", nm(c))],
                            nm(lhs),
                            nm(rhs),
                        );
                    }
                }
                if sink.wants(&rdist) {
                    let lhs = times.get(plus.get(a, b), c);
                    let rhs = plus.get(times.get(a, c), times.get(b, c));
                    if lhs != rhs {
                        sink.fail(
                            &rdist,
                            vec![("a", nm(a)), ("b", nm(b)), ("c", nm(c))],
                            nm(lhs),
                            nm(rhs),
                        );
                    }
                }
            }
        }
    }

    let lann = format!("left-annihilation({t})");
    let rann = format!("right-annihilation({t})");
    for a in carrier.elements() {
        let l = times.get(zero, a);
        if l != zero {
            sink.fail(&lann, vec![("a", nm(a))], nm(l), nm(zero));
        }
        let r = times.get(a, zero);
        if r != zero {
            sink.fail(&rann, vec![("a", nm(a))], nm(r), nm(zero));
        }
    }
    Ok(sink.finish())
}

pub fn check_kleene_algebra(
    carrier: &Carrier,
    plus: &BinOpTable,
    times: &BinOpTable,
    star: &UnaryOpTable,
    zero: Elem,
    one: Elem,
    opts: &CheckOptions,
) -> Result<AxiomReport, StructureError> {
    check_kleene_labelled(
        carrier,
        plus,
        times,
        star,
        zero,
        one,
        SemiringLabels {
            plus: "+",
            times: ".",
        },
        "star",
        opts,
    )
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn check_kleene_labelled(
    carrier: &Carrier,
    plus: &BinOpTable,
    times: &BinOpTable,
    star: &UnaryOpTable,
    zero: Elem,
    one: Elem,
    labels: SemiringLabels<'_>,
    star_label: &str,
    opts: &CheckOptions,
) -> Result<AxiomReport, StructureError> {
    if star.len() != carrier.len() {
        return Err(StructureError::SizeMismatch {
            table: star_label.to_string(),
            expected: carrier.len(),
            found: star.len(),
        });
    }
    let mut sink = LawSink::new(opts);
    sink.absorb(check_semiring_labelled(
        carrier, plus, times, zero, one, labels, opts,
    )?);
    let nm = |e: Elem| carrier.name(e);
    let le = |a: Elem, b: Elem| leq(plus, a, b);

    // 1 + a.a* <= a*  and  1 + a*.a <= a*
    let unfold_l = format!("star-unfold-left({star_label})");
    let unfold_r = format!("star-unfold-right({star_label})");
    for a in carrier.elements() {
        let s = star.get(a);
        let l = plus.get(one, times.get(a, s));
        if !le(l, s) {
            sink.fail(&unfold_l, vec![("a", nm(a))], nm(l), nm(s));
        }
        let r = plus.get(one, times.get(s, a));
        if !le(r, s) {
            sink.fail(&unfold_r, vec![("a", nm(a))], nm(r), nm(s));
        }
    }

    // b + a.x <= x  ==>  a*.b <= x ;  b + x.a <= x  ==>  b.a* <= x
    let ind_l = format!("star-induction-left({star_label})");
    let ind_r = format!("star-induction-right({star_label})");
    for a in carrier.elements() {
        let s = star.get(a);
        for b in carrier.elements() {
            for x in carrier.elements() {
                if sink.wants(&ind_l) && le(plus.get(b, times.get(a, x)), x) {
                    let concl = times.get(s, b);
                    if !le(concl, x) {
                        sink.fail(
                            &ind_l,
                            vec![("a", nm(a)), ("b", nm(b)), ("x", nm(x))],
                            nm(concl),
                            nm(x),
                        );
                    }
                }
                if sink.wants(&ind_r) && le(plus.get(b, times.get(x, a)), x) {
                    let concl = times.get(b, s);
                    if !le(concl, x) {
                        sink.fail(
                            &ind_r,
                            vec![("a", nm(a)), ("b", nm(b)), ("x", nm(x))],
                            nm(concl),
                            nm(x),
                        );
                    }
                }
            }
        }
    }
    Ok(sink.finish())
}

/// A finite concurrent Kleene algebra of agent behaviours.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CkaStructure {
    pub carrier: Carrier,
    /// Choice `+`.
    pub plus: BinOpTable,
    /// Sequential composition `;`.
    pub seq: BinOpTable,
    /// Parallel composition `*`.
    pub par: BinOpTable,
    pub seq_star: UnaryOpTable,
    pub par_star: UnaryOpTable,
    /// Inactive behaviour `0`.
    pub zero: Elem,
    /// Idle behaviour `1`.
    pub one: Elem,
}

impl CkaStructure {
    /// Checks table shapes and designations; laws are left to [`check_cka`].
    pub fn validate_shape(&self) -> Result<(), StructureError> {
        let n = self.carrier.len();
        self.plus.ensure_shape("+", n, n, n)?;
        self.seq.ensure_shape(";", n, n, n)?;
        self.par.ensure_shape("*", n, n, n)?;
        for (name, t) in [("seqstar", &self.seq_star), ("parstar", &self.par_star)] {
            if t.len() != n {
                return Err(StructureError::SizeMismatch {
                    table: name.to_string(),
                    expected: n,
                    found: t.len(),
                });
            }
        }
        self.carrier.ensure(self.zero)?;
        self.carrier.ensure(self.one)?;
        Ok(())
    }

    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        leq(&self.plus, a, b)
    }

    pub fn name(&self, a: Elem) -> &str {
        self.carrier.name(a)
    }
}

pub fn check_cka(cka: &CkaStructure, opts: &CheckOptions) -> Result<AxiomReport, StructureError> {
    cka.validate_shape()?;
    let k = &cka.carrier;
    let mut sink = LawSink::new(opts);
    sink.absorb(check_kleene_labelled(
        k,
        &cka.plus,
        &cka.seq,
        &cka.seq_star,
        cka.zero,
        cka.one,
        SemiringLabels {
            plus: "+",
            times: ";",
        },
        "seqstar",
        opts,
    )?);
    sink.absorb(check_kleene_labelled(
        k,
        &cka.plus,
        &cka.par,
        &cka.par_star,
        cka.zero,
        cka.one,
        SemiringLabels {
            plus: "+",
            times: "*",
        },
        "parstar",
        opts,
    )?);
    let nm = |e: Elem| k.name(e);

    let comm = "commutativity(*)";
    let mut comm_failure = None;
    'comm: for a in k.elements() {
        for b in k.elements() {
            let (ab, ba) = (cka.par.get(a, b), cka.par.get(b, a));
            if ab != ba {
                comm_failure = Some((a, b, ab, ba));
                break 'comm;
            }
        }
    }
    if let Some((a, b, ab, ba)) = comm_failure {
        if opts.par_commutativity_as_warning {
            sink.warn(format!(
                "{comm} fails at a={}, b={}: {} vs {}",
                nm(a),
                nm(b),
                nm(ab),
                nm(ba)
            ));
        } else if opts.collect_all {
            for a in k.elements() {
                for b in k.elements() {
                    let (ab, ba) = (cka.par.get(a, b), cka.par.get(b, a));
                    if ab != ba {
                        sink.fail(comm, vec![("a", nm(a)), ("b", nm(b))], nm(ab), nm(ba));
                    }
                }
            }
        } else {
            sink.fail(comm, vec![("a", nm(a)), ("b", nm(b))], nm(ab), nm(ba));
        }
    }

    // (a*b);(c*d) <= (b;c)*(a;d)
    let exch = "exchange";
    'exch: for a in k.elements() {
        for b in k.elements() {
            let ab = cka.par.get(a, b);
            for c in k.elements() {
                let bc = cka.seq.get(b, c);
                for d in k.elements() {
                    if !sink.wants(exch) {
                        break 'exch;
                    }
                    let lhs = cka.seq.get(ab, cka.par.get(c, d));
                    let rhs = cka.par.get(bc, cka.seq.get(a, d));
                    if !cka.leq(lhs, rhs) {
                        sink.fail(
                            exch,
                            vec![("a", nm(a)), ("b", nm(b)), ("c", nm(c)), ("d", nm(d))],
                            nm(lhs),
                            nm(rhs),
                        );
                    }
                }
            }
        }
    }

    if k.len() == 1 {
        sink.warn("degenerate behaviour carrier: |K| = 1 forces 0 = 1");
    }
    Ok(sink.finish())
}
