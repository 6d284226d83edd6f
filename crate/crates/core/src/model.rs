//! The full C2KA: a CKA of behaviours, a stimulus structure, and the two
//! mutual actions between them.
//!
//! `act(s, a)` is the next behaviour of an agent behaving as `a` after
//! stimulus `s`; `out(s, a)` is the stimulus that `a` emits in response to
//! `s`. Both tables are indexed stimulus-first.

use std::collections::BTreeSet;

use crate::algebra::{
    check_cka, AxiomReport, BinOpTable, CheckOptions, CkaStructure, Elem, LawSink, StructureError,
};
use crate::stimulus::StimulusStructure;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct C2kaModel {
    pub cka: CkaStructure,
    pub stim: StimulusStructure,
    /// Next behaviour mapping, `S x K -> K`.
    pub act: BinOpTable,
    /// Next stimulus mapping, `S x K -> S`.
    pub out: BinOpTable,
}

/// Read access to possibly incomplete action tables. Law instances that
/// touch a missing entry are skipped, which lets a search prune partial
/// models with the same law code used for full checks.
pub(crate) trait ActionLookup {
    fn act(&self, s: Elem, a: Elem) -> Option<Elem>;
    fn out(&self, s: Elem, a: Elem) -> Option<Elem>;
}

impl ActionLookup for C2kaModel {
    #[inline]
    fn act(&self, s: Elem, a: Elem) -> Option<Elem> {
        Some(self.act.get(s, a))
    }

    #[inline]
    fn out(&self, s: Elem, a: Elem) -> Option<Elem> {
        Some(self.out.get(s, a))
    }
}

pub(crate) fn left_semimodule_laws<T: ActionLookup>(
    stim: &StimulusStructure,
    cka: &CkaStructure,
    t: &T,
    sink: &mut LawSink<'_>,
) {
    let (sn, kn) = (|e: Elem| stim.name(e), |e: Elem| cka.name(e));
    let law = "act-unitary";
    for a in cka.carrier.elements() {
        let Some(v) = t.act(stim.neutral, a) else {
            continue;
        };
        if v != a {
            sink.fail(law, vec![("a", kn(a))], kn(v), kn(a));
        }
    }
    let law = "act-zero-preserving";
    for a in cka.carrier.elements() {
        let Some(v) = t.act(stim.deactivation, a) else {
            continue;
        };
        if v != cka.zero {
            sink.fail(law, vec![("a", kn(a))], kn(v), kn(cka.zero));
        }
    }
    let law = "act-distributes-over-+";
    'l: for s in stim.elements() {
        for a in cka.carrier.elements() {
            for b in cka.carrier.elements() {
                if !sink.wants(law) {
                    break 'l;
                }
                let (Some(lhs), Some(sa), Some(sb)) =
                    (t.act(s, cka.plus.get(a, b)), t.act(s, a), t.act(s, b))
                else {
                    continue;
                };
                let rhs = cka.plus.get(sa, sb);
                if lhs != rhs {
                    sink.fail(
                        law,
                        vec![("s", sn(s)), ("a", kn(a)), ("b", kn(b))],
                        kn(lhs),
                        kn(rhs),
                    );
                }
            }
        }
    }
    let law = "act-distributes-over-(+)";
    'l: for s in stim.elements() {
        for u in stim.elements() {
            for a in cka.carrier.elements() {
                if !sink.wants(law) {
                    break 'l;
                }
                let (Some(lhs), Some(sa), Some(ua)) =
                    (t.act(stim.oplus.get(s, u), a), t.act(s, a), t.act(u, a))
                else {
                    continue;
                };
                let rhs = cka.plus.get(sa, ua);
                if lhs != rhs {
                    sink.fail(
                        law,
                        vec![("s", sn(s)), ("t", sn(u)), ("a", kn(a))],
                        kn(lhs),
                        kn(rhs),
                    );
                }
            }
        }
    }
    let law = "act-compatible-with-(.)";
    'l: for s in stim.elements() {
        for u in stim.elements() {
            for a in cka.carrier.elements() {
                if !sink.wants(law) {
                    break 'l;
                }
                let Some(lhs) = t.act(stim.odot.get(s, u), a) else {
                    continue;
                };
                let Some(rhs) = t.act(u, a).and_then(|ua| t.act(s, ua)) else {
                    continue;
                };
                if lhs != rhs {
                    sink.fail(
                        law,
                        vec![("s", sn(s)), ("t", sn(u)), ("a", kn(a))],
                        kn(lhs),
                        kn(rhs),
                    );
                }
            }
        }
    }
}

pub(crate) fn right_semimodule_laws<T: ActionLookup>(
    stim: &StimulusStructure,
    cka: &CkaStructure,
    t: &T,
    sink: &mut LawSink<'_>,
) {
    let (sn, kn) = (|e: Elem| stim.name(e), |e: Elem| cka.name(e));
    let law = "out-unitary";
    for s in stim.elements() {
        let Some(v) = t.out(s, cka.one) else { continue };
        if v != s {
            sink.fail(law, vec![("s", sn(s))], sn(v), sn(s));
        }
    }
    let law = "out-zero-preserving";
    for s in stim.elements() {
        let Some(v) = t.out(s, cka.zero) else {
            continue;
        };
        if v != stim.deactivation {
            sink.fail(law, vec![("s", sn(s))], sn(v), sn(stim.deactivation));
        }
    }
    let law = "out-distributes-over-+";
    'l: for s in stim.elements() {
        for a in cka.carrier.elements() {
            for b in cka.carrier.elements() {
                if !sink.wants(law) {
                    break 'l;
                }
                let (Some(lhs), Some(sa), Some(sb)) =
                    (t.out(s, cka.plus.get(a, b)), t.out(s, a), t.out(s, b))
                else {
                    continue;
                };
                let rhs = stim.oplus.get(sa, sb);
                if lhs != rhs {
                    sink.fail(
                        law,
                        vec![("s", sn(s)), ("a", kn(a)), ("b", kn(b))],
                        sn(lhs),
                        sn(rhs),
                    );
                }
            }
        }
    }
    let law = "out-distributes-over-(+)";
    'l: for s in stim.elements() {
        for u in stim.elements() {
            for a in cka.carrier.elements() {
                if !sink.wants(law) {
                    break 'l;
                }
                let (Some(lhs), Some(sa), Some(ua)) =
                    (t.out(stim.oplus.get(s, u), a), t.out(s, a), t.out(u, a))
                else {
                    continue;
                };
                let rhs = stim.oplus.get(sa, ua);
                if lhs != rhs {
                    sink.fail(
                        law,
                        vec![("s", sn(s)), ("t", sn(u)), ("a", kn(a))],
                        sn(lhs),
                        sn(rhs),
                    );
                }
            }
        }
    }
}

pub const CASCADED_OUTPUT: &str = "c2ka-(ii)-cascaded-output";

pub(crate) fn c2ka_axiom_laws<T: ActionLookup>(
    stim: &StimulusStructure,
    cka: &CkaStructure,
    t: &T,
    demote_cascaded: bool,
    sink: &mut LawSink<'_>,
) {
    let (sn, kn) = (|e: Elem| stim.name(e), |e: Elem| cka.name(e));

    // (i) act(s, a;b) = act(s, a) ; act(out(s, a), b)
    let law = "c2ka-(i)-cascade";
    'l: for s in stim.elements() {
        for a in cka.carrier.elements() {
            let (Some(sa), Some(emitted)) = (t.act(s, a), t.out(s, a)) else {
                continue;
            };
            for b in cka.carrier.elements() {
                if !sink.wants(law) {
                    break 'l;
                }
                let (Some(lhs), Some(eb)) = (t.act(s, cka.seq.get(a, b)), t.act(emitted, b)) else {
                    continue;
                };
                let rhs = cka.seq.get(sa, eb);
                if lhs != rhs {
                    sink.fail(
                        law,
                        vec![("s", sn(s)), ("a", kn(a)), ("b", kn(b))],
                        kn(lhs),
                        kn(rhs),
                    );
                }
            }
        }
    }

    // (ii) c <= a  or  act(s, a) ; act(out(s, c), b) = 0
    let law = CASCADED_OUTPUT;
    'l: for s in stim.elements() {
        for a in cka.carrier.elements() {
            let Some(sa) = t.act(s, a) else { continue };
            for c in cka.carrier.elements() {
                if cka.leq(c, a) {
                    continue;
                }
                let Some(emitted) = t.out(s, c) else { continue };
                for b in cka.carrier.elements() {
                    if !sink.wants(law) {
                        break 'l;
                    }
                    let Some(eb) = t.act(emitted, b) else {
                        continue;
                    };
                    let lhs = cka.seq.get(sa, eb);
                    if lhs != cka.zero {
                        let bindings = vec![("s", sn(s)), ("a", kn(a)), ("b", kn(b)), ("c", kn(c))];
                        if demote_cascaded {
                            sink.warn(format!(
                                "{law} fails at s={}, a={}, b={}, c={}: {} vs {}",
                                sn(s),
                                kn(a),
                                kn(b),
                                kn(c),
                                kn(lhs),
                                kn(cka.zero)
                            ));
                            break 'l;
                        }
                        sink.fail(law, bindings, kn(lhs), kn(cka.zero));
                    }
                }
            }
        }
    }

    // (iii) out(s (.) t, a) = out(s, act(t, a)) (.) out(t, a)
    let law = "c2ka-(iii)-sequential-output";
    'l: for s in stim.elements() {
        for u in stim.elements() {
            for a in cka.carrier.elements() {
                if !sink.wants(law) {
                    break 'l;
                }
                let Some(lhs) = t.out(stim.odot.get(s, u), a) else {
                    continue;
                };
                let (Some(ua), Some(ou)) = (t.act(u, a), t.out(u, a)) else {
                    continue;
                };
                let Some(first) = t.out(s, ua) else { continue };
                let rhs = stim.odot.get(first, ou);
                if lhs != rhs {
                    sink.fail(
                        law,
                        vec![("s", sn(s)), ("t", sn(u)), ("a", kn(a))],
                        sn(lhs),
                        sn(rhs),
                    );
                }
            }
        }
    }
}

impl C2kaModel {
    pub fn validate_shape(&self) -> Result<(), StructureError> {
        self.cka.validate_shape()?;
        let (ns, nk) = (self.stim.len(), self.cka.carrier.len());
        for (name, table, codomain) in [("act", &self.act, nk), ("out", &self.out, ns)] {
            if table.rows() != ns || table.cols() != nk || table.codomain() != codomain {
                return Err(StructureError::SizeMismatch {
                    table: name.to_string(),
                    expected: ns * nk,
                    found: table.rows() * table.cols(),
                });
            }
        }
        for (name, t) in [("(+)", &self.stim.oplus), ("(.)", &self.stim.odot)] {
            if !t.is_square_over(ns) {
                return Err(StructureError::SizeMismatch {
                    table: name.to_string(),
                    expected: ns * ns,
                    found: t.rows() * t.cols(),
                });
            }
        }
        self.stim.carrier.ensure(self.stim.deactivation)?;
        self.stim.carrier.ensure(self.stim.neutral)?;
        Ok(())
    }

    pub fn check_left_semimodule(
        &self,
        opts: &CheckOptions,
    ) -> Result<AxiomReport, StructureError> {
        self.validate_shape()?;
        let mut sink = LawSink::new(opts);
        left_semimodule_laws(&self.stim, &self.cka, self, &mut sink);
        Ok(sink.finish())
    }

    pub fn check_right_semimodule(
        &self,
        opts: &CheckOptions,
    ) -> Result<AxiomReport, StructureError> {
        self.validate_shape()?;
        let mut sink = LawSink::new(opts);
        right_semimodule_laws(&self.stim, &self.cka, self, &mut sink);
        Ok(sink.finish())
    }

    /// The three compatibility axioms linking the actions with `;` and `(.)`.
    pub fn check_c2ka(&self, opts: &CheckOptions) -> Result<AxiomReport, StructureError> {
        self.validate_shape()?;
        let mut sink = LawSink::new(opts);
        c2ka_axiom_laws(
            &self.stim,
            &self.cka,
            self,
            opts.cascaded_output_as_warning,
            &mut sink,
        );
        Ok(sink.finish())
    }

    /// Every law family: CKA, stimulus structure, both semimodules and the
    /// C2KA axioms.
    pub fn check_all(&self, opts: &CheckOptions) -> Result<AxiomReport, StructureError> {
        self.validate_shape()?;
        let mut report = check_cka(&self.cka, opts)?;
        report.merge(self.stim.check(opts)?);
        report.merge(self.check_left_semimodule(opts)?);
        report.merge(self.check_right_semimodule(opts)?);
        report.merge(self.check_c2ka(opts)?);
        Ok(report)
    }

    pub fn act(&self, s: Elem, a: Elem) -> Elem {
        self.act.get(s, a)
    }

    pub fn out(&self, s: Elem, a: Elem) -> Elem {
        self.out.get(s, a)
    }

    fn ensure_behaviour(&self, a: Elem) -> Result<Elem, StructureError> {
        self.cka.carrier.ensure(a)
    }

    pub fn orbit(&self, a: Elem) -> Result<BTreeSet<Elem>, StructureError> {
        self.ensure_behaviour(a)?;
        Ok(self.stim.elements().map(|s| self.act(s, a)).collect())
    }

    pub fn strong_orbit(&self, a: Elem) -> Result<BTreeSet<Elem>, StructureError> {
        let target = self.orbit(a)?;
        let mut class = BTreeSet::new();
        for b in self.cka.carrier.elements() {
            if self.orbit(b)? == target {
                class.insert(b);
            }
        }
        Ok(class)
    }

    /// The strong-orbit partition of the behaviours, in order of first member.
    pub fn strong_orbits(&self) -> Vec<BTreeSet<Elem>> {
        let orbits: Vec<BTreeSet<Elem>> = self
            .cka
            .carrier
            .elements()
            .map(|a| self.stim.elements().map(|s| self.act(s, a)).collect())
            .collect();
        let mut classes: Vec<BTreeSet<Elem>> = Vec::new();
        let mut seen = vec![false; orbits.len()];
        for i in 0..orbits.len() {
            if seen[i] {
                continue;
            }
            let class: BTreeSet<Elem> = (i..orbits.len())
                .filter(|&j| orbits[j] == orbits[i])
                .map(Elem)
                .collect();
            for e in &class {
                seen[e.0] = true;
            }
            classes.push(class);
        }
        classes
    }

    /// No stimulus other than deactivation changes `a`.
    pub fn is_fixed_point_behaviour(&self, a: Elem) -> Result<bool, StructureError> {
        self.ensure_behaviour(a)?;
        Ok(self.stim.active().all(|s| self.act(s, a) == a))
    }

    pub fn is_without_reactivation(&self) -> bool {
        let one = self.cka.one;
        self.stim.active().all(|s| self.act(s, one) == one)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factory::{catalogue, family_lattice_stimuli, fixture_stim4, lattice_model};

    fn trivial() -> C2kaModel {
        let cka = catalogue::ckas(3).remove(0);
        lattice_model(&family_lattice_stimuli(3), &cka)
    }

    #[test]
    fn trivial_actions_fix_everything_but_zero() {
        let m = trivial();
        for a in m.cka.carrier.elements() {
            assert!(m.is_fixed_point_behaviour(a).unwrap());
            assert!(m.orbit(a).unwrap().contains(&m.cka.zero));
        }
        assert!(m.is_without_reactivation());
    }

    #[test]
    fn strong_orbits_partition_the_carrier() {
        let m = fixture_stim4().document.model;
        let classes = m.strong_orbits();
        let total: usize = classes.iter().map(BTreeSet::len).sum();
        assert_eq!(total, m.cka.carrier.len());
        for class in &classes {
            for &a in class {
                assert_eq!(&m.strong_orbit(a).unwrap(), class);
            }
        }
    }

    #[test]
    fn broken_unit_is_reported_by_name() {
        let mut m = trivial();
        let (n, a) = (m.stim.neutral, Elem(2));
        m.act.set(n, a, m.cka.zero);
        let report = m.check_left_semimodule(&CheckOptions::default()).unwrap();
        assert!(report.violated("act-unitary"));
        let report = m.check_all(&CheckOptions::default()).unwrap();
        assert!(!report.passed());
    }

    #[test]
    fn out_of_zero_must_be_deactivation() {
        let mut m = trivial();
        m.out.set(m.stim.neutral, m.cka.zero, m.stim.neutral);
        let report = m.check_right_semimodule(&CheckOptions::default()).unwrap();
        assert!(report.violated("out-zero-preserving"));
    }

    #[test]
    fn mismatched_tables_are_structural_errors() {
        let mut m = trivial();
        m.act = BinOpTable::from_fn(2, |_, _| Elem(0));
        assert!(m.check_all(&CheckOptions::default()).is_err());
        assert!(m.orbit(Elem(9)).is_err());
    }
}
