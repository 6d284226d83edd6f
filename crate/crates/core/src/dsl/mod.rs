//! The model specification language and its JSON mirror.
//!
//! A document has up to five sections, each opened by a keyword and a brace
//! and closed by a brace:
//!
//! ```text
//! stimuli {
//!   elements D N x
//!   deactivation = D
//!   neutral = N
//!   x (+) x = x
//!   x (.) x = x
//! }
//! behaviours {
//!   elements 0 1
//!   zero = 0
//!   one = 1
//!   1 + 1 = 1
//! }
//! actions {
//!   act x on 1 = 1
//!   out of 1 under x = x
//! }
//! agents {
//!   A = 1
//! }
//! dependence {
//!   closure
//! }
//! ```
//!
//! Rows for the designated elements may be omitted and are filled in: `D`
//! absorbs under `(.)` and is the unit of `(+)`, `N` is the unit of `(.)`,
//! `0` is the unit of `+` and annihilates `;` and `*`, `1` is the unit of
//! `;` and `*`, both stars send `0` and `1` to `1`, and the actions follow
//! `act(D, a) = 0`, `act(N, a) = a`, `act(s, 0) = 0`, `out(D, a) = D`,
//! `out(s, 0) = D`, `out(s, 1) = s`. Filled-in entries are ordinary table entries and are
//! re-checked by the axiom layer like any other.
//!
//! The full grammar is in `docs/grammar.md`.

mod json;
mod parse;
mod write;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::algebra::Elem;
use crate::analysis::{AgentSystem, AnalysisError, DependenceRelation};
use crate::model::C2kaModel;

pub use json::{export_json, import_json, JsonError};
pub use parse::parse_model;
pub use write::serialize_model;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub token: Option<String>,
    pub expected: Vec<String>,
}

/// A fully resolved document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelDocument {
    pub model: C2kaModel,
    pub agents: Vec<(String, Elem)>,
    /// Dependence pairs `(b, a)` as written, meaning `b` depends on `a`.
    pub dependence: BTreeSet<(Elem, Elem)>,
    /// Whether `dependence` lists generators to be closed bilinearly.
    pub closure: bool,
}

impl ModelDocument {
    /// The dependence relation the document denotes.
    pub fn dependence_relation(&self) -> Result<DependenceRelation, AnalysisError> {
        let n = self.model.cka.carrier.len();
        if self.closure {
            DependenceRelation::bilinear_closure(&self.model.cka, self.dependence.iter().copied())
        } else {
            Ok(DependenceRelation::from_pairs(
                n,
                self.dependence.iter().copied(),
            ))
        }
    }

    pub fn to_system(&self) -> Result<AgentSystem, AnalysisError> {
        AgentSystem::new(
            self.model.clone(),
            self.agents.iter().map(|(n, b)| (n.clone(), *b)),
            self.dependence_relation()?,
        )
    }
}
