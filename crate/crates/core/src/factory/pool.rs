//! Agent systems for property suites: fixtures, lattice families and
//! sampled models, each populated with agents and a dependence relation.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{CheckOptions, Elem};
use crate::analysis::{AgentSystem, DependenceRelation};
use crate::model::C2kaModel;

use super::fixtures::{all_fixtures, family_lattice_models};
use super::sampler::{ModelSampler, SampleBounds};

const AGENT_NAMES: [&str; 6] = ["A", "B", "C", "D", "E", "F"];

/// A seeded stream of models passing every check under `bounds.options`.
pub fn sample_models(seed: u64, bounds: SampleBounds) -> ModelSampler {
    ModelSampler::new(seed, bounds)
}

/// Binds up to `max_agents` agents to random behaviours and closes a few
/// random dependence generators. Generators whose closure touches `0` or
/// `1` are dropped.
pub fn populate(model: &C2kaModel, rng: &mut impl Rng, max_agents: usize) -> AgentSystem {
    let k = model.cka.carrier.len();
    let count = rng.gen_range(1..=max_agents.clamp(1, AGENT_NAMES.len()));
    let agents: Vec<(&str, Elem)> = AGENT_NAMES[..count]
        .iter()
        .map(|&n| (n, Elem(rng.gen_range(0..k))))
        .collect();
    let candidates: Vec<Elem> = model
        .cka
        .carrier
        .elements()
        .filter(|&e| e != model.cka.zero && e != model.cka.one)
        .collect();
    let mut dep = DependenceRelation::empty(k);
    if !candidates.is_empty() {
        for _ in 0..rng.gen_range(0..=2) {
            let b = *candidates.choose(rng).unwrap();
            let a = *candidates.choose(rng).unwrap();
            let mut gens = dep.pairs();
            gens.push((b, a));
            if let Ok(closed) = DependenceRelation::bilinear_closure(&model.cka, gens) {
                dep = closed;
            }
        }
    }
    AgentSystem::new(model.clone(), agents, dep).expect("agents are drawn from the carrier")
}

/// Fixture systems followed by `count` generated systems with at most five
/// agents, drawn from lattice families and the relaxed sampler.
pub fn system_pool(seed: u64, count: usize) -> Vec<AgentSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<AgentSystem> = all_fixtures()
        .iter()
        .map(|f| f.system().expect("fixture systems are well formed"))
        .collect();
    let relaxed = CheckOptions::relaxed();
    let mut models: Vec<C2kaModel> = (2..=4)
        .flat_map(|k| family_lattice_models(k, 3, &relaxed))
        .collect();
    let bounds = SampleBounds {
        options: relaxed,
        ..SampleBounds::default()
    };
    models.extend(sample_models(seed, bounds).take(24));
    models.extend(all_fixtures().into_iter().map(|f| f.document.model));
    if models.is_empty() {
        return pool;
    }
    for _ in 0..count {
        let m = &models[rng.gen_range(0..models.len())];
        pool.push(populate(m, &mut rng, 5));
    }
    pool
}
