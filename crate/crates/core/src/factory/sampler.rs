//! Seeded random search for C2KA models over small catalogue structures.
//!
//! Each attempt picks a stimulus structure and a CKA from the catalogues,
//! pre-fills the forced action entries, then fills the remaining cells by
//! depth-first search in random order, pruning with the same law code used
//! by the full checker. Completed tables are re-certified with
//! [`C2kaModel::check_all`] before they are yielded.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{BinOpTable, CheckOptions, CkaStructure, Elem, LawSink};
use crate::model::{
    c2ka_axiom_laws, left_semimodule_laws, right_semimodule_laws, ActionLookup, C2kaModel,
};
use crate::stimulus::StimulusStructure;

use super::catalogue;

#[derive(Debug, Clone, PartialEq)]
pub struct SampleBounds {
    pub min_stimuli: usize,
    pub max_stimuli: usize,
    pub min_behaviours: usize,
    pub max_behaviours: usize,
    /// Search nodes per attempt before giving up on it.
    pub node_budget: usize,
    /// Attempts before the sampler stops yielding.
    pub max_attempts: usize,
    pub options: CheckOptions,
}

impl Default for SampleBounds {
    fn default() -> Self {
        Self {
            min_stimuli: 2,
            max_stimuli: 4,
            min_behaviours: 2,
            max_behaviours: 4,
            node_budget: 20_000,
            max_attempts: 10_000,
            options: CheckOptions::default(),
        }
    }
}

struct Partial {
    nk: usize,
    act: Vec<Option<Elem>>,
    out: Vec<Option<Elem>>,
}

impl ActionLookup for Partial {
    fn act(&self, s: Elem, a: Elem) -> Option<Elem> {
        self.act[s.0 * self.nk + a.0]
    }

    fn out(&self, s: Elem, a: Elem) -> Option<Elem> {
        self.out[s.0 * self.nk + a.0]
    }
}

#[derive(Clone, Copy)]
enum Cell {
    Act(usize),
    Out(usize),
}

/// Iterator of certified models. Deterministic for a given seed and bounds.
pub struct ModelSampler {
    rng: ChaCha8Rng,
    stims: Vec<StimulusStructure>,
    ckas: Vec<CkaStructure>,
    bounds: SampleBounds,
    attempts: usize,
    accepted: usize,
}

impl ModelSampler {
    pub fn new(seed: u64, bounds: SampleBounds) -> Self {
        let stims = (bounds.min_stimuli.max(2)..=bounds.max_stimuli.min(4))
            .flat_map(catalogue::stimulus_structures)
            .collect();
        let ckas = (bounds.min_behaviours.max(2)..=bounds.max_behaviours.min(4))
            .flat_map(catalogue::ckas)
            .collect();
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            stims,
            ckas,
            bounds,
            attempts: 0,
            accepted: 0,
        }
    }

    pub fn attempts(&self) -> usize {
        self.attempts
    }

    pub fn accepted(&self) -> usize {
        self.accepted
    }

    /// Accepted models per attempt so far.
    pub fn acceptance_ratio(&self) -> f64 {
        if self.attempts == 0 {
            0.0
        } else {
            self.accepted as f64 / self.attempts as f64
        }
    }

    /// One attempt over an explicitly chosen pair of structures.
    pub fn search(&mut self, stim: &StimulusStructure, cka: &CkaStructure) -> Option<C2kaModel> {
        search_actions(&mut self.rng, stim, cka, &self.bounds)
    }
}

impl Iterator for ModelSampler {
    type Item = C2kaModel;

    fn next(&mut self) -> Option<C2kaModel> {
        if self.stims.is_empty() || self.ckas.is_empty() {
            return None;
        }
        while self.attempts < self.bounds.max_attempts {
            self.attempts += 1;
            let stim = self.stims[self.rng.gen_range(0..self.stims.len())].clone();
            let cka = self.ckas[self.rng.gen_range(0..self.ckas.len())].clone();
            if let Some(m) = search_actions(&mut self.rng, &stim, &cka, &self.bounds) {
                self.accepted += 1;
                return Some(m);
            }
        }
        None
    }
}

fn consistent(
    stim: &StimulusStructure,
    cka: &CkaStructure,
    p: &Partial,
    opts: &CheckOptions,
) -> bool {
    let mut sink = LawSink::fail_fast(opts);
    left_semimodule_laws(stim, cka, p, &mut sink);
    if sink.clean() {
        right_semimodule_laws(stim, cka, p, &mut sink);
    }
    if sink.clean() {
        c2ka_axiom_laws(stim, cka, p, opts.cascaded_output_as_warning, &mut sink);
    }
    sink.clean()
}

/// Randomised backtracking fill of the free `act`/`out` cells.
pub(crate) fn search_actions<R: Rng>(
    rng: &mut R,
    stim: &StimulusStructure,
    cka: &CkaStructure,
    bounds: &SampleBounds,
) -> Option<C2kaModel> {
    let (ns, nk) = (stim.len(), cka.carrier.len());
    let mut p = Partial {
        nk,
        act: vec![None; ns * nk],
        out: vec![None; ns * nk],
    };
    let forced_out = |s: Elem, a: Elem| -> Option<Elem> {
        if a == cka.zero {
            Some(stim.deactivation)
        } else if a == cka.one {
            Some(s)
        } else {
            None
        }
    };
    for s in stim.elements() {
        for a in cka.carrier.elements() {
            let i = s.0 * nk + a.0;
            p.act[i] = if s == stim.deactivation || a == cka.zero {
                Some(cka.zero)
            } else if s == stim.neutral {
                Some(a)
            } else {
                None
            };
            p.out[i] = forced_out(s, a);
        }
    }
    if !consistent(stim, cka, &p, &bounds.options) {
        return None;
    }

    let mut cells = Vec::new();
    for a in cka.carrier.elements() {
        for s in stim.elements() {
            let i = s.0 * nk + a.0;
            if p.act[i].is_none() {
                cells.push(Cell::Act(i));
            }
            if p.out[i].is_none() {
                cells.push(Cell::Out(i));
            }
        }
    }

    let mut budget = bounds.node_budget;
    if !fill(
        rng,
        stim,
        cka,
        &mut p,
        &cells,
        0,
        &mut budget,
        &bounds.options,
    ) {
        return None;
    }
    let unwrap = |v: &[Option<Elem>]| v.iter().map(|e| e.expect("filled")).collect::<Vec<_>>();
    let (act, out) = (unwrap(&p.act), unwrap(&p.out));
    let model = C2kaModel {
        cka: cka.clone(),
        stim: stim.clone(),
        act: BinOpTable::rect_from_fn(ns, nk, nk, |s, a| act[s.0 * nk + a.0]),
        out: BinOpTable::rect_from_fn(ns, nk, ns, |s, a| out[s.0 * nk + a.0]),
    };
    model
        .check_all(&bounds.options)
        .ok()
        .filter(|r| r.passed())
        .map(|_| model)
}

#[allow(clippy::too_many_arguments)]
fn fill<R: Rng>(
    rng: &mut R,
    stim: &StimulusStructure,
    cka: &CkaStructure,
    p: &mut Partial,
    cells: &[Cell],
    at: usize,
    budget: &mut usize,
    opts: &CheckOptions,
) -> bool {
    let Some(&cell) = cells.get(at) else {
        return true;
    };
    let range = match cell {
        Cell::Act(_) => cka.carrier.len(),
        Cell::Out(_) => stim.len(),
    };
    let mut values: Vec<usize> = (0..range).collect();
    values.shuffle(rng);
    for v in values {
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        match cell {
            Cell::Act(i) => p.act[i] = Some(Elem(v)),
            Cell::Out(i) => p.out[i] = Some(Elem(v)),
        }
        if consistent(stim, cka, p, opts) && fill(rng, stim, cka, p, cells, at + 1, budget, opts) {
            return true;
        }
    }
    match cell {
        Cell::Act(i) => p.act[i] = None,
        Cell::Out(i) => p.out[i] = None,
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_models() {
        let bounds = SampleBounds {
            max_stimuli: 3,
            max_behaviours: 3,
            ..SampleBounds::default()
        };
        let a: Vec<_> = ModelSampler::new(7, bounds.clone()).take(5).collect();
        let b: Vec<_> = ModelSampler::new(7, bounds).take(5).collect();
        assert_eq!(a.len(), 5);
        assert_eq!(a, b);
    }

    #[test]
    fn every_sample_is_certified() {
        let bounds = SampleBounds {
            max_stimuli: 3,
            max_behaviours: 3,
            options: CheckOptions::relaxed(),
            ..SampleBounds::default()
        };
        let opts = bounds.options;
        let mut sampler = ModelSampler::new(11, bounds);
        for m in sampler.by_ref().take(10) {
            assert!(m.check_all(&opts).unwrap().passed());
        }
        assert!(sampler.acceptance_ratio() > 0.0);
    }
}
