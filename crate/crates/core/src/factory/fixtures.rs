//! Handcrafted fixtures and valid-by-construction model families.
//!
//! Each fixture ships as a DSL file plus a sidecar JSON file of expected
//! verdicts. Every expected verdict names the oracle that established it and
//! is re-evaluated against that oracle when the fixture is verified.

use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::{check_cka, BinOpTable, Carrier, CheckOptions, CkaStructure, Elem};
use crate::analysis::{AgentSystem, AnalysisError};
use crate::dsl::{parse_model, ModelDocument, ParseError};
use crate::model::C2kaModel;
use crate::stimulus::StimulusStructure;

use super::catalogue;
use super::oracle::{
    oracle_basic_stimuli, oracle_direct_stimuli, oracle_env, oracle_fixed_point,
    oracle_partition_connected, oracle_pfc, oracle_stimuli, OracleError,
};

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("fixture {0}: parse error {1}")]
    Parse(String, ParseError),
    #[error("fixture {0}: bad sidecar: {1}")]
    Sidecar(String, String),
    #[error("fixture {0}: {1}")]
    Analysis(String, AnalysisError),
    #[error("fixture {0}: {1}")]
    Oracle(String, OracleError),
    #[error("fixture {name}: claim `{claim}` expected {expected}, found {found}")]
    Mismatch {
        name: String,
        claim: String,
        expected: Value,
        found: Value,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Annotation {
    pub claim: String,
    pub value: Value,
    pub oracle: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct Sidecar {
    name: String,
    relaxed: bool,
    annotations: Vec<Annotation>,
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    /// The file stem under `fixtures/`.
    pub file: &'static str,
    pub source: &'static str,
    pub document: ModelDocument,
    pub options: CheckOptions,
    pub annotations: Vec<Annotation>,
}

const RELAY_DSL: &str = include_str!("../../fixtures/relay.c2ka");
const RELAY_JSON: &str = include_str!("../../fixtures/relay.json");
const STIM4_DSL: &str = include_str!("../../fixtures/stim4.c2ka");
const STIM4_JSON: &str = include_str!("../../fixtures/stim4.json");
const CKA_R3_DSL: &str = include_str!("../../fixtures/cka-r3.c2ka");
const CKA_R3_JSON: &str = include_str!("../../fixtures/cka-r3.json");

impl Fixture {
    /// Parses a fixture and verifies every annotation.
    pub fn load(
        file: &'static str,
        dsl: &'static str,
        sidecar: &str,
    ) -> Result<Self, FixtureError> {
        let side: Sidecar = serde_json::from_str(sidecar)
            .map_err(|e| FixtureError::Sidecar(file.into(), e.to_string()))?;
        let document = parse_model(dsl).map_err(|e| FixtureError::Parse(side.name.clone(), e))?;
        let fixture = Fixture {
            name: side.name,
            file,
            source: dsl,
            document,
            options: if side.relaxed {
                CheckOptions::relaxed()
            } else {
                CheckOptions::default()
            },
            annotations: side.annotations,
        };
        fixture.verify()?;
        Ok(fixture)
    }

    pub fn system(&self) -> Result<AgentSystem, AnalysisError> {
        self.document.to_system()
    }

    /// Re-derives every claim and compares it with the recorded value.
    pub fn verify(&self) -> Result<(), FixtureError> {
        for ann in &self.annotations {
            let found = self.evaluate(&ann.claim)?;
            if found != ann.value {
                return Err(FixtureError::Mismatch {
                    name: self.name.clone(),
                    claim: ann.claim.clone(),
                    expected: ann.value.clone(),
                    found,
                });
            }
        }
        Ok(())
    }

    /// Evaluates one claim by the oracles.
    pub fn evaluate(&self, claim: &str) -> Result<Value, FixtureError> {
        let name = || self.name.clone();
        let m = &self.document.model;
        let an = |e| FixtureError::Analysis(name(), e);
        let or = |e| FixtureError::Oracle(name(), e);
        let structural = |e: crate::algebra::StructureError| an(AnalysisError::from(e));
        let sys = || self.system().map_err(an);
        let bnames = |es: &mut dyn Iterator<Item = Elem>| -> Value {
            json!(es
                .map(|e| m.cka.carrier.name(e).to_string())
                .collect::<Vec<_>>())
        };
        Ok(match claim {
            "cka_passes" => json!(check_cka(&m.cka, &CheckOptions::default())
                .map_err(structural)?
                .passed()),
            "c2ka_passes" => json!(m.check_all(&self.options).map_err(structural)?.passed()),
            "c2ka_passes_strict" => json!(m
                .check_all(&CheckOptions::default())
                .map_err(structural)?
                .passed()),
            "basic_stimuli" => json!(oracle_basic_stimuli(m)
                .into_iter()
                .map(|e| m.stim.carrier.name(e).to_string())
                .collect::<Vec<_>>()),
            "without_reactivation" => {
                let one = m.cka.one;
                json!((0..m.stim.carrier.len())
                    .map(Elem)
                    .filter(|&s| s != m.stim.deactivation)
                    .all(|s| m.act.get(s, one) == one))
            }
            "fixed_point_behaviours" => bnames(
                &mut (0..m.cka.carrier.len())
                    .map(Elem)
                    .filter(|&a| oracle_fixed_point(m, a)),
            ),
            "stimuli_connected" => json!(oracle_partition_connected(&sys()?).map_err(or)?),
            "communication_fixed_points" | "universally_influential" => {
                let sys = sys()?;
                let names: Vec<&str> = sys.names().collect();
                let mut out = Vec::new();
                for &a in &names {
                    let mut reach = 0;
                    for &b in &names {
                        if a != b && oracle_stimuli(&sys, a, b).map_err(or)? {
                            reach += 1;
                        }
                    }
                    let hit = if claim == "universally_influential" {
                        reach == names.len() - 1
                    } else {
                        reach == 0
                    };
                    if hit {
                        out.push(a.to_string());
                    }
                }
                json!(out)
            }
            rel if rel.starts_with("relation/") => {
                let sys = sys()?;
                let names: Vec<&str> = sys.names().collect();
                let mut pairs = Vec::new();
                for &a in &names {
                    for &b in &names {
                        if a == b {
                            continue;
                        }
                        let (ba, bb) = (
                            sys.behaviour_of(a).map_err(an)?,
                            sys.behaviour_of(b).map_err(an)?,
                        );
                        let holds = match &rel["relation/".len()..] {
                            "direct_stimuli" => oracle_direct_stimuli(m, ba, bb),
                            "stimuli" => oracle_stimuli(&sys, a, b).map_err(or)?,
                            "direct_env" => sys.dep.depends(bb, ba),
                            "env" => oracle_env(&sys, a, b).map_err(or)?,
                            "pfc_direct" => {
                                oracle_direct_stimuli(m, ba, bb) || sys.dep.depends(bb, ba)
                            }
                            "pfc" => oracle_pfc(&sys, a, b).map_err(or)?,
                            other => {
                                return Err(FixtureError::Sidecar(
                                    name(),
                                    format!("unknown relation `{other}`"),
                                ))
                            }
                        };
                        if holds {
                            pairs.push(json!([a, b]));
                        }
                    }
                }
                Value::Array(pairs)
            }
            other => {
                return Err(FixtureError::Sidecar(
                    name(),
                    format!("unknown claim `{other}`"),
                ))
            }
        })
    }
}

/// The three-agent relay system: `A` reaches `C` by stimuli and `C` reaches
/// `B` by stimuli and through the shared environment; `A` and `B` have no
/// direct edge.
pub fn fixture_relay() -> Fixture {
    Fixture::load("relay", RELAY_DSL, RELAY_JSON).expect("relay fixture verifies")
}

/// The four-element boolean stimulus structure over the two-element CKA.
pub fn fixture_stim4() -> Fixture {
    Fixture::load("stim4", STIM4_DSL, STIM4_JSON).expect("stim4 fixture verifies")
}

/// A three-element chain CKA over the two-element stimulus structure.
pub fn fixture_cka_r3() -> Fixture {
    Fixture::load("cka-r3", CKA_R3_DSL, CKA_R3_JSON).expect("cka-r3 fixture verifies")
}

pub fn all_fixtures() -> Vec<Fixture> {
    vec![fixture_relay(), fixture_stim4(), fixture_cka_r3()]
}

/// The `k`-element chain with join, meet, bottom `D` and top `N`.
pub fn family_lattice_stimuli(k: usize) -> StimulusStructure {
    assert!(k >= 1, "a chain needs at least one element");
    let names: Vec<String> = match k {
        1 => vec!["D".into()],
        _ => std::iter::once("D".to_string())
            .chain((1..k - 1).map(|i| format!("s{i}")))
            .chain(std::iter::once("N".to_string()))
            .collect(),
    };
    // Carrier order is D, s1, .., N, while the chain order is D < s1 < .. < N.
    StimulusStructure {
        carrier: Carrier::new(names).expect("distinct names"),
        oplus: BinOpTable::from_fn(k, |a, b| a.max(b)),
        odot: BinOpTable::from_fn(k, |a, b| a.min(b)),
        deactivation: Elem(0),
        neutral: Elem(k - 1),
    }
}

/// Stimuli act trivially: `D` sends everything to `0`, every other stimulus
/// leaves behaviours alone, and each behaviour outside `{0, 1}` emits the
/// top stimulus. The result is not certified here.
pub fn lattice_model(stim: &StimulusStructure, cka: &CkaStructure) -> C2kaModel {
    let (ns, nk) = (stim.len(), cka.carrier.len());
    let act = BinOpTable::rect_from_fn(ns, nk, nk, |s, a| {
        if s == stim.deactivation {
            cka.zero
        } else {
            a
        }
    });
    let out = BinOpTable::rect_from_fn(ns, nk, ns, |s, a| {
        if a == cka.zero || s == stim.deactivation {
            stim.deactivation
        } else if a == cka.one {
            s
        } else {
            stim.neutral
        }
    });
    C2kaModel {
        cka: cka.clone(),
        stim: stim.clone(),
        act,
        out,
    }
}

/// Lattice-stimulus models with trivial actions over every catalogued CKA of
/// up to `max_behaviours` elements, keeping those that pass under `opts`.
pub fn family_lattice_models(
    k: usize,
    max_behaviours: usize,
    opts: &CheckOptions,
) -> Vec<C2kaModel> {
    let stim = family_lattice_stimuli(k);
    (1..=max_behaviours)
        .flat_map(catalogue::ckas)
        .map(|cka| lattice_model(&stim, &cka))
        .filter(|m| m.check_all(opts).is_ok_and(|r| r.passed()))
        .collect()
}
