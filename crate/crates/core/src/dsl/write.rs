use std::fmt::Write as _;

use crate::algebra::{BinOpTable, Carrier, UnaryOpTable};

use super::ModelDocument;

fn row_line(out: &mut String, op: &str, label: &str, values: impl Iterator<Item = String>) {
    let vals: Vec<String> = values.collect();
    let _ = writeln!(out, "  row {op} {label}: {}", vals.join(" "));
}

fn square(out: &mut String, op: &str, carrier: &Carrier, t: &BinOpTable) {
    for a in carrier.elements() {
        row_line(
            out,
            op,
            carrier.name(a),
            t.row(a).iter().map(|&v| carrier.name(v).to_string()),
        );
    }
}

fn star(out: &mut String, op: &str, carrier: &Carrier, t: &UnaryOpTable) {
    let vals: Vec<&str> = carrier.elements().map(|a| carrier.name(t.get(a))).collect();
    let _ = writeln!(out, "  row {op}: {}", vals.join(" "));
}

/// Writes a document in canonical form: every table as full rows, sections in
/// a fixed order. Parsing the result yields an equal document.
pub fn serialize_model(doc: &ModelDocument) -> String {
    let m = &doc.model;
    let (sc, kc) = (&m.stim.carrier, &m.cka.carrier);
    let mut out = String::new();

    out.push_str("stimuli {\n");
    let _ = writeln!(out, "  elements {}", sc.names().join(" "));
    let _ = writeln!(out, "  deactivation = {}", sc.name(m.stim.deactivation));
    let _ = writeln!(out, "  neutral = {}", sc.name(m.stim.neutral));
    square(&mut out, "(+)", sc, &m.stim.oplus);
    square(&mut out, "(.)", sc, &m.stim.odot);
    out.push_str("}\n\nbehaviours {\n");
    let _ = writeln!(out, "  elements {}", kc.names().join(" "));
    let _ = writeln!(out, "  zero = {}", kc.name(m.cka.zero));
    let _ = writeln!(out, "  one = {}", kc.name(m.cka.one));
    square(&mut out, "+", kc, &m.cka.plus);
    square(&mut out, ";", kc, &m.cka.seq);
    square(&mut out, "*", kc, &m.cka.par);
    star(&mut out, "seqstar", kc, &m.cka.seq_star);
    star(&mut out, "parstar", kc, &m.cka.par_star);
    out.push_str("}\n\nactions {\n");
    for s in sc.elements() {
        row_line(
            &mut out,
            "act",
            sc.name(s),
            kc.elements().map(|a| kc.name(m.act.get(s, a)).to_string()),
        );
    }
    for s in sc.elements() {
        row_line(
            &mut out,
            "out",
            sc.name(s),
            kc.elements().map(|a| sc.name(m.out.get(s, a)).to_string()),
        );
    }
    out.push_str("}\n");

    if !doc.agents.is_empty() {
        out.push_str("\nagents {\n");
        for (name, b) in &doc.agents {
            let _ = writeln!(out, "  {name} = {}", kc.name(*b));
        }
        out.push_str("}\n");
    }
    if !doc.dependence.is_empty() || doc.closure {
        out.push_str("\ndependence {\n");
        for &(b, a) in &doc.dependence {
            let _ = writeln!(out, "  {} depends on {}", kc.name(b), kc.name(a));
        }
        if doc.closure {
            out.push_str("  closure\n");
        }
        out.push_str("}\n");
    }
    out
}
