use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{BinOpTable, Carrier, CkaStructure, Elem, UnaryOpTable};
use crate::model::C2kaModel;
use crate::stimulus::StimulusStructure;

use super::ModelDocument;

/// A JSON import failure, located by a JSON pointer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pointer}: {message}")]
pub struct JsonError {
    pub pointer: String,
    pub message: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonStimuli {
    elements: Vec<String>,
    deactivation: String,
    neutral: String,
    oplus: Vec<Vec<String>>,
    odot: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonBehaviours {
    elements: Vec<String>,
    zero: String,
    one: String,
    plus: Vec<Vec<String>>,
    seq: Vec<Vec<String>>,
    par: Vec<Vec<String>>,
    seqstar: Vec<String>,
    parstar: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonActions {
    act: Vec<Vec<String>>,
    out: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonAgent {
    name: String,
    behaviour: String,
}

#[derive(Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct JsonDependence {
    #[serde(default)]
    pairs: Vec<(String, String)>,
    #[serde(default)]
    closure: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonDocument {
    stimuli: JsonStimuli,
    behaviours: JsonBehaviours,
    actions: JsonActions,
    #[serde(default)]
    agents: Vec<JsonAgent>,
    #[serde(default)]
    dependence: JsonDependence,
}

fn names(c: &Carrier, es: impl Iterator<Item = Elem>) -> Vec<String> {
    es.map(|e| c.name(e).to_string()).collect()
}

fn rows(c: &Carrier, t: &BinOpTable, row_count: usize) -> Vec<Vec<String>> {
    (0..row_count)
        .map(|r| names(c, t.row(Elem(r)).iter().copied()))
        .collect()
}

/// Serialises a document to pretty-printed JSON.
pub fn export_json(doc: &ModelDocument) -> String {
    let m = &doc.model;
    let (sc, kc) = (&m.stim.carrier, &m.cka.carrier);
    let j = JsonDocument {
        stimuli: JsonStimuli {
            elements: sc.names().to_vec(),
            deactivation: sc.name(m.stim.deactivation).into(),
            neutral: sc.name(m.stim.neutral).into(),
            oplus: rows(sc, &m.stim.oplus, sc.len()),
            odot: rows(sc, &m.stim.odot, sc.len()),
        },
        behaviours: JsonBehaviours {
            elements: kc.names().to_vec(),
            zero: kc.name(m.cka.zero).into(),
            one: kc.name(m.cka.one).into(),
            plus: rows(kc, &m.cka.plus, kc.len()),
            seq: rows(kc, &m.cka.seq, kc.len()),
            par: rows(kc, &m.cka.par, kc.len()),
            seqstar: names(kc, m.cka.seq_star.entries().iter().copied()),
            parstar: names(kc, m.cka.par_star.entries().iter().copied()),
        },
        actions: JsonActions {
            act: rows(kc, &m.act, sc.len()),
            out: rows(sc, &m.out, sc.len()),
        },
        agents: doc
            .agents
            .iter()
            .map(|(n, b)| JsonAgent {
                name: n.clone(),
                behaviour: kc.name(*b).into(),
            })
            .collect(),
        dependence: JsonDependence {
            pairs: doc
                .dependence
                .iter()
                .map(|&(b, a)| (kc.name(b).into(), kc.name(a).into()))
                .collect(),
            closure: doc.closure,
        },
    };
    serde_json::to_string_pretty(&j).expect("documents always serialise")
}

fn fail(pointer: String, message: impl Into<String>) -> JsonError {
    JsonError {
        pointer,
        message: message.into(),
    }
}

fn carrier(names: &[String], pointer: &str) -> Result<Carrier, JsonError> {
    if names.is_empty() {
        return Err(fail(pointer.into(), "carrier must be nonempty"));
    }
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(fail(
                format!("{pointer}/{i}"),
                format!("duplicate element `{n}`"),
            ));
        }
    }
    Carrier::new(names.iter().cloned()).map_err(|e| fail(pointer.into(), e.to_string()))
}

fn resolve(c: &Carrier, name: &str, pointer: String) -> Result<Elem, JsonError> {
    c.lookup(name)
        .map_err(|_| fail(pointer, format!("unknown element `{name}`")))
}

fn table(
    rows: &[Vec<String>],
    row_count: usize,
    domain_cols: &Carrier,
    codomain: &Carrier,
    pointer: &str,
) -> Result<BinOpTable, JsonError> {
    if rows.len() != row_count {
        return Err(fail(
            pointer.into(),
            format!("expected {row_count} rows, found {}", rows.len()),
        ));
    }
    let cols = domain_cols.len();
    let mut cells = Vec::with_capacity(row_count * cols);
    for (r, row) in rows.iter().enumerate() {
        if row.len() != cols {
            return Err(fail(
                format!("{pointer}/{r}"),
                format!("expected {cols} entries, found {}", row.len()),
            ));
        }
        for (c, v) in row.iter().enumerate() {
            cells.push(resolve(codomain, v, format!("{pointer}/{r}/{c}"))?);
        }
    }
    Ok(BinOpTable::rect_from_fn(
        row_count,
        cols,
        codomain.len(),
        |r, c| cells[r.0 * cols + c.0],
    ))
}

fn unary(values: &[String], c: &Carrier, pointer: &str) -> Result<UnaryOpTable, JsonError> {
    if values.len() != c.len() {
        return Err(fail(
            pointer.into(),
            format!("expected {} entries, found {}", c.len(), values.len()),
        ));
    }
    let es = values
        .iter()
        .enumerate()
        .map(|(i, v)| resolve(c, v, format!("{pointer}/{i}")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(UnaryOpTable::from_fn(c.len(), |a| es[a.0]))
}

/// Reads a document from its JSON mirror. Unknown fields are rejected.
pub fn import_json(text: &str) -> Result<ModelDocument, JsonError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let j: JsonDocument = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let pointer = if path == "." {
            String::new()
        } else {
            format!("/{}", path.replace(['.', '['], "/").replace(']', ""))
        };
        fail(pointer, e.inner().to_string())
    })?;

    let sc = carrier(&j.stimuli.elements, "/stimuli/elements")?;
    let kc = carrier(&j.behaviours.elements, "/behaviours/elements")?;
    let stim = StimulusStructure {
        deactivation: resolve(&sc, &j.stimuli.deactivation, "/stimuli/deactivation".into())?,
        neutral: resolve(&sc, &j.stimuli.neutral, "/stimuli/neutral".into())?,
        oplus: table(&j.stimuli.oplus, sc.len(), &sc, &sc, "/stimuli/oplus")?,
        odot: table(&j.stimuli.odot, sc.len(), &sc, &sc, "/stimuli/odot")?,
        carrier: sc.clone(),
    };
    let cka = CkaStructure {
        zero: resolve(&kc, &j.behaviours.zero, "/behaviours/zero".into())?,
        one: resolve(&kc, &j.behaviours.one, "/behaviours/one".into())?,
        plus: table(&j.behaviours.plus, kc.len(), &kc, &kc, "/behaviours/plus")?,
        seq: table(&j.behaviours.seq, kc.len(), &kc, &kc, "/behaviours/seq")?,
        par: table(&j.behaviours.par, kc.len(), &kc, &kc, "/behaviours/par")?,
        seq_star: unary(&j.behaviours.seqstar, &kc, "/behaviours/seqstar")?,
        par_star: unary(&j.behaviours.parstar, &kc, "/behaviours/parstar")?,
        carrier: kc.clone(),
    };
    let act = table(&j.actions.act, sc.len(), &kc, &kc, "/actions/act")?;
    let out = table(&j.actions.out, sc.len(), &kc, &sc, "/actions/out")?;

    let mut agents: Vec<(String, Elem)> = Vec::new();
    for (i, a) in j.agents.iter().enumerate() {
        if agents.iter().any(|(n, _)| *n == a.name) {
            return Err(fail(
                format!("/agents/{i}/name"),
                format!("duplicate agent `{}`", a.name),
            ));
        }
        agents.push((
            a.name.clone(),
            resolve(&kc, &a.behaviour, format!("/agents/{i}/behaviour"))?,
        ));
    }
    let mut dependence = BTreeSet::new();
    for (i, (b, a)) in j.dependence.pairs.iter().enumerate() {
        dependence.insert((
            resolve(&kc, b, format!("/dependence/pairs/{i}/0"))?,
            resolve(&kc, a, format!("/dependence/pairs/{i}/1"))?,
        ));
    }
    Ok(ModelDocument {
        model: C2kaModel {
            cka,
            stim,
            act,
            out,
        },
        agents,
        dependence,
        closure: j.dependence.closure,
    })
}
