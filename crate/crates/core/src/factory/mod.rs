//! Model construction: exhaustive catalogues of small structures and a
//! seeded sampler of complete C2KA models.

pub mod catalogue;
pub mod sampler;

pub use sampler::{ModelSampler, SampleBounds};
pub mod fixtures;
pub mod oracle;

pub use fixtures::{
    all_fixtures, family_lattice_models, family_lattice_stimuli, fixture_cka_r3, fixture_relay,
    fixture_stim4, lattice_model, Annotation, Fixture, FixtureError,
};
pub mod pool;
pub mod product;

pub use pool::{populate, sample_models, system_pool};
pub use product::product_model;
