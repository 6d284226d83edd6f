//! Potential-for-communication analysis over systems of agents.
//!
//! A system binds agent names to behaviours of a [`C2kaModel`] and carries a
//! dependence relation over the behaviours. The relations computed here are:
//!
//! | relation | meaning |
//! |---|---|
//! | [`direct_stimuli_comm`] | a stimulus generated by the source changes the sink |
//! | [`stimuli_comm`] | a chain of direct stimuli steps |
//! | [`direct_env_comm`] | the sink's behaviour depends on the source's |
//! | [`env_comm`] | the transitive closure of the dependence relation |
//! | [`pfc_direct`], [`pfc`] | either kind of step, and chains of them |
//!
//! Every positive verdict carries a witness that can be re-checked with
//! [`recheck`].

mod dependence;
mod relations;
mod whatif;

use thiserror::Error;

use crate::algebra::{Elem, StructureError};
use crate::model::C2kaModel;

pub use dependence::DependenceRelation;
pub use relations::{
    communication_fixed_points, direct_env_comm, direct_stimuli_comm, env_comm,
    is_stimuli_connected, pfc, pfc_allowing_self, pfc_direct, recheck, stimuli_comm,
    stimuli_comm_n, universally_influential, verify_dependence, CommVerdict, EdgeKind, PathWitness,
    Relation, Witness,
};
pub use whatif::{whatif_replace, Claim, Clause, ModificationReport, Replacement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("agent `{0}` declared twice")]
    DuplicateAgent(String),
    #[error("a system needs at least one agent")]
    NoAgents,
    #[error("source and sink are the same agent `{0}`")]
    SameAgent(String),
    #[error("step bound must be at least 1, got {0}")]
    InvalidBound(usize),
    #[error("dependence pair ({0}, {1}) touches the inactive or idle behaviour")]
    DesignatedDependence(String, String),
    #[error("dependence closure reaches ({}, {}) via {}", .offending.0, .offending.1, render_chain(.chain))]
    ClosureConflict {
        offending: (String, String),
        chain: Vec<(String, String)>,
    },
    #[error("dependence relation is over {found} behaviours, model has {expected}")]
    DependenceSize { expected: usize, found: usize },
    #[error("hypothesis not established: {0}")]
    HypothesisNotEstablished(String),
    #[error("precondition unmet: {0}")]
    PreconditionUnmet(String),
}

fn render_chain(chain: &[(String, String)]) -> String {
    chain
        .iter()
        .map(|(b, a)| format!("{b} R {a}"))
        .collect::<Vec<_>>()
        .join(" => ")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Agent {
    pub name: String,
    pub behaviour: Elem,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentSystem {
    pub model: C2kaModel,
    agents: Vec<Agent>,
    pub dep: DependenceRelation,
}

impl AgentSystem {
    pub fn new<S: Into<String>>(
        model: C2kaModel,
        agents: impl IntoIterator<Item = (S, Elem)>,
        dep: DependenceRelation,
    ) -> Result<Self, AnalysisError> {
        let mut list: Vec<Agent> = Vec::new();
        for (name, behaviour) in agents {
            let name = name.into();
            model.cka.carrier.ensure(behaviour)?;
            if list.iter().any(|a| a.name == name) {
                return Err(AnalysisError::DuplicateAgent(name));
            }
            list.push(Agent { name, behaviour });
        }
        if list.is_empty() {
            return Err(AnalysisError::NoAgents);
        }
        let n = model.cka.carrier.len();
        if dep.size() != n {
            return Err(AnalysisError::DependenceSize {
                expected: n,
                found: dep.size(),
            });
        }
        Ok(Self {
            model,
            agents: list,
            dep,
        })
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.agents.iter().map(|a| a.name.as_str())
    }

    pub fn index_of(&self, name: &str) -> Result<usize, AnalysisError> {
        self.agents
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| AnalysisError::UnknownAgent(name.to_string()))
    }

    pub fn behaviour_of(&self, name: &str) -> Result<Elem, AnalysisError> {
        Ok(self.agents[self.index_of(name)?].behaviour)
    }

    /// The same system with one agent rebound to another behaviour.
    pub fn with_behaviour(&self, name: &str, behaviour: Elem) -> Result<Self, AnalysisError> {
        self.model.cka.carrier.ensure(behaviour)?;
        let i = self.index_of(name)?;
        let mut next = self.clone();
        next.agents[i].behaviour = behaviour;
        Ok(next)
    }

    /// The same system with one extra agent.
    pub fn with_agent(&self, name: &str, behaviour: Elem) -> Result<Self, AnalysisError> {
        self.model.cka.carrier.ensure(behaviour)?;
        if self.index_of(name).is_ok() {
            return Err(AnalysisError::DuplicateAgent(name.to_string()));
        }
        let mut next = self.clone();
        next.agents.push(Agent {
            name: name.to_string(),
            behaviour,
        });
        Ok(next)
    }

    /// The same system without the named agent. Fails if it is the last one.
    pub fn without_agent(&self, name: &str) -> Result<Self, AnalysisError> {
        let i = self.index_of(name)?;
        if self.agents.len() == 1 {
            return Err(AnalysisError::NoAgents);
        }
        let mut next = self.clone();
        next.agents.remove(i);
        Ok(next)
    }

    fn pair(&self, a: &str, b: &str) -> Result<(usize, usize), AnalysisError> {
        let (i, j) = (self.index_of(a)?, self.index_of(b)?);
        if i == j {
            return Err(AnalysisError::SameAgent(a.to_string()));
        }
        Ok((i, j))
    }
}
