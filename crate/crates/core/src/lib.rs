pub mod algebra;
pub mod analysis;
pub mod dsl;
pub mod factory;
pub mod model;
pub mod report;
pub mod stimulus;
