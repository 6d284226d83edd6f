//! Stimulus structures: idempotent semirings of external stimuli with a
//! deactivation element (absorbing zero) and a neutral element (unit).

use crate::algebra::{
    check_semiring_labelled, leq, AxiomReport, BinOpTable, Carrier, CheckOptions, Elem, LawSink,
    SemiringLabels, StructureError,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StimulusStructure {
    pub carrier: Carrier,
    /// Choice between stimuli.
    pub oplus: BinOpTable,
    /// Sequential composition of stimuli.
    pub odot: BinOpTable,
    pub deactivation: Elem,
    pub neutral: Elem,
}

impl StimulusStructure {
    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn name(&self, s: Elem) -> &str {
        self.carrier.name(s)
    }

    pub fn elements(&self) -> impl DoubleEndedIterator<Item = Elem> + ExactSizeIterator {
        self.carrier.elements()
    }

    /// Every stimulus except deactivation, in carrier order.
    pub fn active(&self) -> impl Iterator<Item = Elem> + '_ {
        let d = self.deactivation;
        self.carrier.elements().filter(move |&s| s != d)
    }

    pub fn check(&self, opts: &CheckOptions) -> Result<AxiomReport, StructureError> {
        let mut sink = LawSink::new(opts);
        sink.absorb(check_semiring_labelled(
            &self.carrier,
            &self.oplus,
            &self.odot,
            self.deactivation,
            self.neutral,
            SemiringLabels {
                plus: "(+)",
                times: "(.)",
            },
            opts,
        )?);
        if self.deactivation == self.neutral {
            if self.len() == 1 {
                sink.warn("degenerate stimulus carrier: |S| = 1 forces deactivation = neutral");
            } else {
                let d = self.name(self.deactivation);
                sink.fail("distinct-designations", vec![("d", d), ("n", d)], d, d);
            }
        }
        Ok(sink.finish())
    }

    /// `x | y`: some `z` has `y = x (.) z`.
    pub fn divides(&self, x: Elem, y: Elem) -> Result<bool, StructureError> {
        self.carrier.ensure(x)?;
        self.carrier.ensure(y)?;
        Ok(self.divides_unchecked(x, y))
    }

    fn divides_unchecked(&self, x: Elem, y: Elem) -> bool {
        self.carrier.elements().any(|z| self.odot.get(x, z) == y)
    }

    /// Full divisibility relation, indexed `[x][y]`.
    pub fn divisibility(&self) -> Vec<Vec<bool>> {
        self.carrier
            .elements()
            .map(|x| {
                self.carrier
                    .elements()
                    .map(|y| self.divides_unchecked(x, y))
                    .collect()
            })
            .collect()
    }

    /// Indivisible stimuli, in carrier order. Deactivation is never basic.
    pub fn basic_stimuli(&self) -> Vec<Elem> {
        let div = self.divisibility();
        let d = |x: Elem, y: Elem| div[x.0][y.0];
        self.active()
            .filter(|&s| {
                let only_trivial_divisors = self
                    .carrier
                    .elements()
                    .all(|t| !d(t, s) || t == self.neutral || t == s);
                let prime = self.carrier.elements().all(|t| {
                    self.carrier
                        .elements()
                        .all(|r| !d(s, self.odot.get(t, r)) || d(s, t) || d(s, r))
                });
                only_trivial_divisors && prime
            })
            .collect()
    }

    /// `s <= t`, i.e. `s (+) t = t`.
    pub fn sub_stimulus(&self, s: Elem, t: Elem) -> Result<bool, StructureError> {
        self.carrier.ensure(s)?;
        self.carrier.ensure(t)?;
        Ok(leq(&self.oplus, s, t))
    }

    #[inline]
    pub(crate) fn leq(&self, s: Elem, t: Elem) -> bool {
        leq(&self.oplus, s, t)
    }
}
