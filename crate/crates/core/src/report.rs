//! Full analysis reports with text, JSON and DOT renderings.
//!
//! All three renderings are produced from one [`ReportDocument`], so they
//! agree on every verdict.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::algebra::{AxiomReport, CheckOptions, Elem};
use crate::analysis::{
    communication_fixed_points, is_stimuli_connected, universally_influential, AgentSystem,
    AnalysisError, Claim, CommVerdict, EdgeKind, ModificationReport, Relation, Witness,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelSummary {
    pub stimuli: usize,
    pub behaviours: usize,
    pub agents: usize,
    pub dependence_pairs: usize,
    /// False when the report was produced for a model that failed its checks.
    pub verified: bool,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BehaviourClass {
    pub name: String,
    pub orbit: Vec<String>,
    pub strong_orbit: Vec<String>,
    pub fixed_point: bool,
}

/// A witness with every element rendered by name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessView {
    Stimuli {
        received: String,
        influencing: String,
    },
    Dependence {
        chain: Vec<String>,
    },
    Direct {
        stimuli: Option<(String, String)>,
        environment: bool,
    },
    Path {
        hops: Vec<String>,
        kinds: Vec<EdgeKind>,
    },
    Partition {
        left: Vec<String>,
        right: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerdictView {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessView>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Connectivity {
    pub connected: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partition: Option<(Vec<String>, Vec<String>)>,
}

/// `matrix[source][sink]`, keyed by agent name.
pub type Matrix = BTreeMap<String, BTreeMap<String, VerdictView>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportDocument {
    pub model: ModelSummary,
    pub axioms: AxiomReport,
    pub basic_stimuli: Vec<String>,
    pub behaviours: Vec<BehaviourClass>,
    pub without_reactivation: bool,
    pub agents: Vec<(String, String)>,
    pub relations: BTreeMap<String, Matrix>,
    pub connectivity: Connectivity,
    pub communication_fixed_points: Vec<String>,
    pub universally_influential: Vec<String>,
}

pub fn view_witness(sys: &AgentSystem, w: &Witness) -> WitnessView {
    let s = |e: Elem| sys.model.stim.carrier.name(e).to_string();
    let k = |e: Elem| sys.model.cka.carrier.name(e).to_string();
    match w {
        Witness::Stimuli {
            received,
            influencing,
        } => WitnessView::Stimuli {
            received: s(*received),
            influencing: s(*influencing),
        },
        Witness::Dependence { chain } => WitnessView::Dependence {
            chain: chain.iter().map(|&e| k(e)).collect(),
        },
        Witness::Direct {
            stimuli,
            environment,
        } => WitnessView::Direct {
            stimuli: stimuli.map(|(r, i)| (s(r), s(i))),
            environment: *environment,
        },
        Witness::Path(p) => WitnessView::Path {
            hops: p.hops.clone(),
            kinds: p.kinds.clone(),
        },
        Witness::Partition { left, right } => WitnessView::Partition {
            left: left.clone(),
            right: right.clone(),
        },
    }
}

pub fn view_verdict(sys: &AgentSystem, v: &CommVerdict) -> VerdictView {
    VerdictView {
        holds: v.holds,
        witness: v.witness.as_ref().map(|w| view_witness(sys, w)),
    }
}

fn names(sys: &AgentSystem, es: impl IntoIterator<Item = Elem>) -> Vec<String> {
    es.into_iter()
        .map(|e| sys.model.cka.carrier.name(e).to_string())
        .collect()
}

impl ReportDocument {
    /// Runs every check and analysis. `verified` records whether the caller
    /// established that the model passes its checks.
    pub fn build(
        sys: &AgentSystem,
        opts: &CheckOptions,
        verified: bool,
    ) -> Result<Self, AnalysisError> {
        let m = &sys.model;
        let mut axioms = m.check_all(opts)?;
        axioms.merge(sys.dep.verify(&m.cka, opts)?);

        let mut warnings = Vec::new();
        if m.cka.carrier.len() <= 2 {
            warnings
                .push("behaviour carrier has at most the inactive and idle behaviours".to_string());
        }
        if m.stim.len() <= 2 {
            warnings.push("stimulus carrier has at most deactivation and neutral".to_string());
        }
        if sys.len() < 2 {
            warnings.push("system has a single agent; no communication is possible".to_string());
        }
        if !axioms.warnings.is_empty() {
            warnings.push(format!(
                "{} law failure(s) reported as warnings",
                axioms.warnings.len()
            ));
        }

        let behaviours = m
            .cka
            .carrier
            .elements()
            .map(|a| {
                Ok(BehaviourClass {
                    name: m.cka.carrier.name(a).to_string(),
                    orbit: names(sys, m.orbit(a)?),
                    strong_orbit: names(sys, m.strong_orbit(a)?),
                    fixed_point: m.is_fixed_point_behaviour(a)?,
                })
            })
            .collect::<Result<Vec<_>, AnalysisError>>()?;

        let agent_names: Vec<String> = sys.names().map(str::to_string).collect();
        let mut relations = BTreeMap::new();
        for rel in Relation::ALL {
            let mut matrix = Matrix::new();
            for a in &agent_names {
                let row = matrix.entry(a.clone()).or_default();
                for b in &agent_names {
                    if a != b {
                        row.insert(b.clone(), view_verdict(sys, &rel.eval(sys, a, b)?));
                    }
                }
            }
            relations.insert(rel.key().to_string(), matrix);
        }

        let conn = is_stimuli_connected(sys);
        let partition = match conn.witness {
            Some(Witness::Partition { left, right }) => Some((left, right)),
            _ => None,
        };

        Ok(Self {
            model: ModelSummary {
                stimuli: m.stim.len(),
                behaviours: m.cka.carrier.len(),
                agents: sys.len(),
                dependence_pairs: sys.dep.len(),
                verified,
                warnings,
            },
            axioms,
            basic_stimuli: m
                .stim
                .basic_stimuli()
                .into_iter()
                .map(|s| m.stim.carrier.name(s).to_string())
                .collect(),
            behaviours,
            without_reactivation: m.is_without_reactivation(),
            agents: sys
                .agents()
                .iter()
                .map(|a| (a.name.clone(), m.cka.carrier.name(a.behaviour).to_string()))
                .collect(),
            relations,
            connectivity: Connectivity {
                connected: conn.holds,
                partition,
            },
            communication_fixed_points: communication_fixed_points(sys),
            universally_influential: universally_influential(sys),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialise")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let m = &self.model;
        if !m.verified {
            out.push_str("UNVERIFIED MODEL: checks failed, results below may be meaningless\n");
        }
        let _ = writeln!(
            out,
            "model: {} stimuli, {} behaviours, {} agents, {} dependence pairs",
            m.stimuli, m.behaviours, m.agents, m.dependence_pairs
        );
        for w in &m.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        let _ = writeln!(
            out,
            "axioms: {}",
            if self.axioms.passed() { "pass" } else { "FAIL" }
        );
        for v in &self.axioms.violations {
            let _ = writeln!(out, "  violated {v}");
        }
        for w in &self.axioms.warnings {
            let _ = writeln!(out, "  warning {w}");
        }
        let _ = writeln!(out, "basic stimuli: {}", self.basic_stimuli.join(", "));
        let _ = writeln!(out, "without reactivation: {}", self.without_reactivation);
        out.push_str("behaviours:\n");
        for b in &self.behaviours {
            let _ = writeln!(
                out,
                "  {}: orbit {{{}}}, strong orbit {{{}}}{}",
                b.name,
                b.orbit.join(", "),
                b.strong_orbit.join(", "),
                if b.fixed_point { ", fixed point" } else { "" }
            );
        }
        out.push_str("agents:\n");
        for (a, b) in &self.agents {
            let _ = writeln!(out, "  {a} = {b}");
        }
        for (key, matrix) in &self.relations {
            let _ = writeln!(out, "{key}:");
            for (a, row) in matrix {
                for (b, v) in row {
                    if v.holds {
                        let _ = writeln!(out, "  {a} -> {b}{}", render_witness(v.witness.as_ref()));
                    }
                }
            }
        }
        let _ = writeln!(
            out,
            "stimuli-connected: {}",
            if self.connectivity.connected {
                "yes"
            } else {
                "no"
            }
        );
        if let Some((l, r)) = &self.connectivity.partition {
            let _ = writeln!(out, "  partition [{}] | [{}]", l.join(", "), r.join(", "));
        }
        let _ = writeln!(
            out,
            "communication fixed points: [{}]",
            self.communication_fixed_points.join(", ")
        );
        let _ = writeln!(
            out,
            "universally influential: [{}]",
            self.universally_influential.join(", ")
        );
        out
    }

    /// The direct potential-for-communication digraph, one edge per pair,
    /// labelled with the kind of direct communication.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph pfc {\n  node [shape=box];\n");
        for (a, _) in &self.agents {
            let _ = writeln!(out, "  {};", quote(a));
        }
        if let Some(direct) = self.relations.get(Relation::PfcDirect.key()) {
            for (a, row) in direct {
                for (b, v) in row {
                    let Some(WitnessView::Direct {
                        stimuli,
                        environment,
                    }) = &v.witness
                    else {
                        continue;
                    };
                    let kind = match (stimuli.is_some(), *environment) {
                        (true, true) => EdgeKind::Both,
                        (true, false) => EdgeKind::Stimuli,
                        _ => EdgeKind::Environment,
                    };
                    let style = match kind {
                        EdgeKind::Stimuli => "solid",
                        EdgeKind::Environment => "dashed",
                        EdgeKind::Both => "bold",
                    };
                    let _ = writeln!(
                        out,
                        "  {} -> {} [label={}, style={style}];",
                        quote(a),
                        quote(b),
                        quote(kind.label())
                    );
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn render_witness(w: Option<&WitnessView>) -> String {
    match w {
        None => String::new(),
        Some(WitnessView::Stimuli {
            received,
            influencing,
        }) => {
            format!(" (on {received}, emits {influencing})")
        }
        Some(WitnessView::Dependence { chain }) => format!(" (dependence {})", chain.join(" ~> ")),
        Some(WitnessView::Direct {
            stimuli,
            environment,
        }) => {
            let mut parts = Vec::new();
            if let Some((r, i)) = stimuli {
                parts.push(format!("stimuli on {r}, emits {i}"));
            }
            if *environment {
                parts.push("environment".to_string());
            }
            format!(" ({})", parts.join("; "))
        }
        Some(WitnessView::Path { hops, kinds }) => {
            let labels: Vec<&str> = kinds.iter().map(|k| k.label()).collect();
            format!(" via [{}] ({})", hops.join(", "), labels.join(", "))
        }
        Some(WitnessView::Partition { left, right }) => {
            format!(
                " (partition [{}] | [{}])",
                left.join(", "),
                right.join(", ")
            )
        }
    }
}

/// A what-if result with elements rendered by name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WhatifView {
    pub source: String,
    pub relay: String,
    pub sink: String,
    pub clause: String,
    pub original: String,
    pub replaced_by: String,
    pub claim: String,
    pub condition: Option<bool>,
    pub recomputed: VerdictView,
    pub only_route: bool,
    pub consistent: bool,
    pub sufficient: Option<bool>,
}

impl WhatifView {
    pub fn new(sys: &AgentSystem, r: &ModificationReport) -> Self {
        let k = |e: Elem| sys.model.cka.carrier.name(e).to_string();
        Self {
            source: r.source.clone(),
            relay: r.relay.clone(),
            sink: r.sink.clone(),
            clause: r.clause.roman().to_string(),
            original: k(r.original),
            replaced_by: k(r.replaced_by),
            claim: match r.claim {
                Claim::OnlyIf => "only-if",
                Claim::Preserved => "preserved",
                Claim::Lost => "lost",
            }
            .to_string(),
            condition: r.condition,
            recomputed: view_verdict(sys, &r.recomputed),
            only_route: r.only_route,
            consistent: r.consistent,
            sufficient: r.sufficient,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "replace {} ({}) by {} on {} -> {} -> {}",
            self.relay, self.original, self.replaced_by, self.source, self.relay, self.sink
        );
        let _ = writeln!(out, "clause: ({}) claims {}", self.clause, self.claim);
        if let Some(c) = self.condition {
            let _ = writeln!(out, "condition: {c}");
        }
        let _ = writeln!(
            out,
            "recomputed pfc({}, {}): {}{}",
            self.source,
            self.sink,
            self.recomputed.holds,
            render_witness(self.recomputed.witness.as_ref())
        );
        let _ = writeln!(out, "only route through relay: {}", self.only_route);
        let _ = writeln!(out, "consistent with claim: {}", self.consistent);
        if let Some(s) = self.sufficient {
            let _ = writeln!(out, "condition sufficient here: {s}");
        }
        out
    }
}
