use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::algebra::{AxiomReport, CheckOptions, CkaStructure, Elem, LawSink};

use super::AnalysisError;

/// A relation `R` over behaviours; `depends(b, a)` reads "b depends on a".
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DependenceRelation {
    n: usize,
    bits: Vec<bool>,
}

impl DependenceRelation {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            bits: vec![false; n * n],
        }
    }

    /// Relation from explicit `(b, a)` pairs, meaning `b R a`.
    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (Elem, Elem)>) -> Self {
        let mut r = Self::empty(n);
        for (b, a) in pairs {
            r.insert(b, a);
        }
        r
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn depends(&self, b: Elem, a: Elem) -> bool {
        self.bits[b.0 * self.n + a.0]
    }

    pub fn insert(&mut self, b: Elem, a: Elem) -> bool {
        let slot = &mut self.bits[b.0 * self.n + a.0];
        let fresh = !*slot;
        *slot = true;
        fresh
    }

    /// All `(b, a)` pairs with `b R a`, in carrier order.
    pub fn pairs(&self) -> Vec<(Elem, Elem)> {
        (0..self.n)
            .flat_map(|b| (0..self.n).map(move |a| (Elem(b), Elem(a))))
            .filter(|&(b, a)| self.depends(b, a))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `R+`, computed by Warshall's algorithm over the whole carrier.
    pub fn transitive_closure(&self) -> Self {
        let mut r = self.clone();
        let n = self.n;
        for k in 0..n {
            for i in 0..n {
                if r.bits[i * n + k] {
                    for j in 0..n {
                        if r.bits[k * n + j] {
                            r.bits[i * n + j] = true;
                        }
                    }
                }
            }
        }
        r
    }

    /// Bilinearity in both arguments and isolation of `0` and `1`.
    pub fn verify(
        &self,
        cka: &CkaStructure,
        opts: &CheckOptions,
    ) -> Result<AxiomReport, AnalysisError> {
        cka.validate_shape()?;
        let n = cka.carrier.len();
        if self.n != n {
            return Err(AnalysisError::DependenceSize {
                expected: n,
                found: self.n,
            });
        }
        let mut sink = LawSink::new(opts);
        let nm = |e: Elem| cka.name(e);
        let show = |v: bool| if v { "true" } else { "false" };
        let els = || cka.carrier.elements();

        let law = "dependence-isolation";
        for a in els() {
            for d in [cka.zero, cka.one] {
                if self.depends(d, a) {
                    sink.fail(
                        law,
                        vec![("b", nm(d)), ("a", nm(a))],
                        format!("{} R {}", nm(d), nm(a)),
                        "absent",
                    );
                }
                if self.depends(a, d) {
                    sink.fail(
                        law,
                        vec![("b", nm(a)), ("a", nm(d))],
                        format!("{} R {}", nm(a), nm(d)),
                        "absent",
                    );
                }
            }
        }

        let law = "dependence-left-bilinearity";
        for b in els() {
            for c in els() {
                for a in els() {
                    let lhs = self.depends(cka.plus.get(b, c), a);
                    let rhs = self.depends(b, a) || self.depends(c, a);
                    if lhs != rhs {
                        sink.fail(
                            law,
                            vec![("b", nm(b)), ("c", nm(c)), ("a", nm(a))],
                            show(lhs),
                            show(rhs),
                        );
                    }
                }
            }
        }

        let law = "dependence-right-bilinearity";
        for c in els() {
            for a in els() {
                for b in els() {
                    let lhs = self.depends(c, cka.plus.get(a, b));
                    let rhs = self.depends(c, a) || self.depends(c, b);
                    if lhs != rhs {
                        sink.fail(
                            law,
                            vec![("c", nm(c)), ("a", nm(a)), ("b", nm(b))],
                            show(lhs),
                            show(rhs),
                        );
                    }
                }
            }
        }
        Ok(sink.finish())
    }

    /// Least relation containing `generators` and closed under
    /// `b R a => (b + c) R a` and `b R a => b R (a + c)`.
    ///
    /// Fails if a generator touches `0` or `1`, or if the closure reaches a
    /// pair that does; the error then carries the derivation chain.
    pub fn bilinear_closure(
        cka: &CkaStructure,
        generators: impl IntoIterator<Item = (Elem, Elem)>,
    ) -> Result<Self, AnalysisError> {
        cka.validate_shape()?;
        let n = cka.carrier.len();
        let designated = |e: Elem| e == cka.zero || e == cka.one;
        let pair_names = |(b, a): (Elem, Elem)| (cka.name(b).to_string(), cka.name(a).to_string());

        let mut parent: BTreeMap<(Elem, Elem), Option<(Elem, Elem)>> = BTreeMap::new();
        let mut queue = VecDeque::new();
        let gens: BTreeSet<(Elem, Elem)> = generators.into_iter().collect();
        for &(b, a) in &gens {
            cka.carrier.ensure(b)?;
            cka.carrier.ensure(a)?;
            if designated(b) || designated(a) {
                let (b, a) = pair_names((b, a));
                return Err(AnalysisError::DesignatedDependence(b, a));
            }
            parent.insert((b, a), None);
            queue.push_back((b, a));
        }
        while let Some((b, a)) = queue.pop_front() {
            for c in cka.carrier.elements() {
                for next in [(cka.plus.get(b, c), a), (b, cka.plus.get(a, c))] {
                    if parent.contains_key(&next) {
                        continue;
                    }
                    parent.insert(next, Some((b, a)));
                    if designated(next.0) || designated(next.1) {
                        let mut chain = vec![pair_names(next)];
                        let mut at = Some((b, a));
                        while let Some(p) = at {
                            chain.push(pair_names(p));
                            at = parent[&p];
                        }
                        chain.reverse();
                        return Err(AnalysisError::ClosureConflict {
                            offending: pair_names(next),
                            chain,
                        });
                    }
                    queue.push_back(next);
                }
            }
        }
        Ok(Self::from_pairs(n, parent.into_keys()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{BinOpTable, Carrier, UnaryOpTable};

    /// {0, 1, p, q} with 0 < 1 < p < q, `;` = `*` = join off zero.
    fn chain4() -> CkaStructure {
        let n = 4;
        let plus = BinOpTable::from_fn(n, |a, b| a.max(b));
        let seq = BinOpTable::from_fn(n, |a, b| {
            if a.0 == 0 || b.0 == 0 {
                Elem(0)
            } else {
                a.max(b)
            }
        });
        let star = UnaryOpTable::from_fn(n, |a| if a.0 == 0 { Elem(1) } else { a });
        CkaStructure {
            carrier: Carrier::new(["0", "1", "p", "q"]).unwrap(),
            plus,
            seq: seq.clone(),
            par: seq,
            seq_star: star.clone(),
            par_star: star,
            zero: Elem(0),
            one: Elem(1),
        }
    }

    #[test]
    fn empty_relation_verifies_and_closes_to_itself() {
        let k = chain4();
        let r = DependenceRelation::empty(4);
        assert!(r.verify(&k, &CheckOptions::default()).unwrap().passed());
        assert_eq!(DependenceRelation::bilinear_closure(&k, []).unwrap(), r);
    }

    #[test]
    fn closure_of_single_generator() {
        // q R p: q + c = q for every c, and p + c ranges over {p, q}.
        let k = chain4();
        let r = DependenceRelation::bilinear_closure(&k, [(Elem(3), Elem(2))]).unwrap();
        assert_eq!(r.pairs(), vec![(Elem(3), Elem(2)), (Elem(3), Elem(3))]);
        assert!(r.verify(&k, &CheckOptions::default()).unwrap().passed());
        assert_eq!(
            DependenceRelation::bilinear_closure(&k, r.pairs()).unwrap(),
            r
        );
    }

    #[test]
    fn isolation_violation_is_named() {
        let k = chain4();
        let r = DependenceRelation::from_pairs(4, [(Elem(1), Elem(2))]);
        let rep = r.verify(&k, &CheckOptions::default()).unwrap();
        assert!(rep.violated("dependence-isolation"));
    }

    #[test]
    fn generator_on_designated_is_rejected() {
        let k = chain4();
        assert!(matches!(
            DependenceRelation::bilinear_closure(&k, [(Elem(1), Elem(2))]),
            Err(AnalysisError::DesignatedDependence(..))
        ));
    }

    #[test]
    fn transitive_closure_follows_chains() {
        let r = DependenceRelation::from_pairs(4, [(Elem(3), Elem(2)), (Elem(2), Elem(1))]);
        let plus = r.transitive_closure();
        assert!(plus.depends(Elem(3), Elem(1)));
        assert!(!plus.depends(Elem(1), Elem(3)));
    }
}
