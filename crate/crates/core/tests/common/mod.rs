#![allow(dead_code)]

use std::sync::OnceLock;

use c2ka::algebra::Elem;
use c2ka::analysis::AgentSystem;
use c2ka::factory::system_pool;

pub fn pool() -> &'static [AgentSystem] {
    static POOL: OnceLock<Vec<AgentSystem>> = OnceLock::new();
    POOL.get_or_init(|| system_pool(2024, 120))
}

pub fn names(sys: &AgentSystem) -> Vec<String> {
    sys.names().map(str::to_string).collect()
}

pub fn ordered_pairs(sys: &AgentSystem) -> Vec<(String, String)> {
    let names = names(sys);
    let mut out = Vec::new();
    for a in &names {
        for b in &names {
            if a != b {
                out.push((a.clone(), b.clone()));
            }
        }
    }
    out
}

/// The system extended with a fresh agent bound to `behaviour`.
pub fn with_fresh(sys: &AgentSystem, behaviour: Elem) -> (AgentSystem, String) {
    let mut name = String::from("X");
    while sys.index_of(&name).is_ok() {
        name.push('\'');
    }
    let ext = sys.with_agent(&name, behaviour).expect("fresh name");
    (ext, name)
}
