use c2ka::algebra::{BinOpTable, CheckOptions, Elem};
use c2ka::dsl::{export_json, import_json, parse_model, serialize_model};
use c2ka::factory::{all_fixtures, fixture_relay};
use proptest::prelude::*;

const MINIMAL: &str = "\
stimuli {
  elements D N
  deactivation = D
  neutral = N
  N (+) N = N
}
behaviours {
  elements 0
  zero = 0
  one = 0
}
";

#[test]
fn minimal_document_parses() {
    let doc = parse_model(MINIMAL).unwrap();
    assert_eq!(doc.model.stim.len(), 2);
    assert_eq!(doc.model.cka.carrier.len(), 1);
    assert!(doc.agents.is_empty());
    assert!(doc.dependence.is_empty());
}

#[test]
fn minimal_document_round_trips() {
    let doc = parse_model(MINIMAL).unwrap();
    let text = serialize_model(&doc);
    assert_eq!(parse_model(&text).unwrap(), doc);
    assert!(!text.contains("agents"));
    assert!(!text.contains("dependence"));
}

#[test]
fn relay_golden_file_matches_in_memory_tables() {
    let doc = fixture_relay().document;
    let m = &doc.model;
    let k = |s: &str| m.cka.carrier.lookup(s).unwrap();
    let s = |n: &str| m.stim.carrier.lookup(n).unwrap();
    // Chain D < x < N < y: join is the later element in that order.
    let rank = |e: Elem| {
        ["D", "x", "N", "y"]
            .iter()
            .position(|&n| n == m.stim.carrier.name(e))
            .unwrap()
    };
    for a in m.stim.elements() {
        for b in m.stim.elements() {
            let j = if rank(a) >= rank(b) { a } else { b };
            assert_eq!(m.stim.oplus.get(a, b), j);
        }
    }
    assert_eq!(m.stim.odot.get(s("x"), s("y")), s("x"));
    assert_eq!(m.stim.odot.get(s("y"), s("x")), s("y"));
    assert_eq!(m.act.get(s("x"), k("c")), k("b"));
    assert_eq!(m.act.get(s("y"), k("b")), k("c"));
    assert_eq!(m.out.get(s("N"), k("a")), s("x"));
    assert_eq!(m.out.get(s("y"), k("a")), s("x"));
    assert_eq!(m.cka.seq_star.get(k("b")), k("e"));
    assert_eq!(m.cka.plus.get(k("1"), k("b")), k("e"));
    let agents: Vec<(&str, &str)> = doc
        .agents
        .iter()
        .map(|(n, b)| (n.as_str(), m.cka.carrier.name(*b)))
        .collect();
    assert_eq!(agents, [("A", "a"), ("C", "c"), ("B", "b")]);
    assert!(doc.closure);
    let rel = doc.dependence_relation().unwrap();
    let upper = ["b", "c", "e"];
    for x in m.cka.carrier.elements() {
        for y in m.cka.carrier.elements() {
            let inside =
                upper.contains(&m.cka.carrier.name(x)) && upper.contains(&m.cka.carrier.name(y));
            assert_eq!(rel.depends(x, y), inside);
        }
    }
}

#[test]
fn round_trip_on_every_fixture() {
    for f in all_fixtures() {
        let text = serialize_model(&f.document);
        let back = parse_model(&text).unwrap();
        assert_eq!(back, f.document, "{}", f.name);
        assert_eq!(
            serialize_model(&back),
            text,
            "{}: canonical form is a fixed point",
            f.name
        );
    }
}

#[test]
fn serialization_is_byte_identical_across_runs() {
    let f = fixture_relay();
    let first = serialize_model(&f.document);
    let second = serialize_model(&parse_model(f.source).unwrap());
    assert_eq!(first.as_bytes(), second.as_bytes());
}

#[test]
fn json_mirror_is_lossless() {
    for f in all_fixtures() {
        let json = export_json(&f.document);
        let back = import_json(&json).unwrap();
        assert_eq!(back, f.document, "{}", f.name);
        assert_eq!(serialize_model(&back), serialize_model(&f.document));
        assert_eq!(export_json(&back), json);
    }
}

#[test]
fn json_with_empty_dependence_omitted_or_explicit() {
    let doc = parse_model(MINIMAL).unwrap();
    let json = export_json(&doc);
    assert!(json.contains("\"pairs\": []"));
    let mut v: serde_json::Value = serde_json::from_str(&json).unwrap();
    v.as_object_mut().unwrap().remove("dependence");
    v.as_object_mut().unwrap().remove("agents");
    assert_eq!(import_json(&v.to_string()).unwrap(), doc);
}

#[test]
fn json_rejects_unknown_keys_with_a_pointer() {
    let doc = parse_model(MINIMAL).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&export_json(&doc)).unwrap();
    v["behaviours"]["colour"] = serde_json::json!("red");
    let err = import_json(&v.to_string()).unwrap_err();
    assert_eq!(err.pointer, "/behaviours/colour");
    assert!(err.message.contains("colour"));
}

#[test]
fn json_reports_unknown_symbols_by_pointer() {
    let doc = fixture_relay().document;
    let mut v: serde_json::Value = serde_json::from_str(&export_json(&doc)).unwrap();
    v["actions"]["act"][2][3] = serde_json::json!("zz");
    let err = import_json(&v.to_string()).unwrap_err();
    assert_eq!(err.pointer, "/actions/act/2/3");
}

#[test]
fn parsing_does_not_validate_laws() {
    let text = MINIMAL.replace("N (+) N = N", "N (+) N = N\n  N (+) N = N\n  N (.) N = D");
    let doc = parse_model(&text).unwrap();
    let report = doc.model.stim.check(&CheckOptions::default()).unwrap();
    assert!(!report.passed());
}

#[test]
fn unicode_designation_names_are_accepted_and_written_as_ascii() {
    let text = MINIMAL
        .replace("elements D N", "elements \u{1D521} \u{1D52B}")
        .replace("= D\n", "= \u{1D521}\n")
        .replace("neutral = N", "neutral = \u{1D52B}")
        .replace("N (+) N = N", "\u{1D52B} (+) \u{1D52B} = \u{1D52B}");
    let doc = parse_model(&text).unwrap();
    assert_eq!(doc, parse_model(MINIMAL).unwrap());
    assert!(serialize_model(&doc).is_ascii());
}

fn err(text: &str) -> c2ka::dsl::ParseError {
    parse_model(text).unwrap_err()
}

#[test]
fn undefined_symbol_is_located() {
    let e = err(&MINIMAL.replace("N (+) N = N", "N (+) Q = N"));
    assert_eq!((e.line, e.column), (5, 9));
    assert_eq!(e.token.as_deref(), Some("Q"));
    assert!(e.expected.contains(&"N".to_string()));
}

#[test]
fn undefined_designation_is_located_at_its_value() {
    let e = err(&MINIMAL.replace("deactivation = D", "deactivation = Q"));
    assert_eq!((e.line, e.column), (3, 18));
    assert_eq!(e.token.as_deref(), Some("Q"));
}

#[test]
fn conflicting_entry_is_rejected() {
    let e = err(&MINIMAL.replace("N (+) N = N", "N (+) N = N\n  N (+) N = D"));
    assert_eq!(e.line, 6);
    assert!(e.message.contains("conflicting"));
}

#[test]
fn repeated_identical_entry_is_fine() {
    parse_model(&MINIMAL.replace("N (+) N = N", "N (+) N = N\n  N (+) N = N")).unwrap();
}

#[test]
fn missing_designation_is_reported_at_the_header() {
    let e = err(&MINIMAL.replace("  one = 0\n", ""));
    assert_eq!((e.line, e.column), (7, 1));
    assert!(e.message.contains("one"));
}

#[test]
fn non_total_table_is_reported() {
    let e = err(&MINIMAL.replace("  N (+) N = N\n", ""));
    assert_eq!(e.line, 1);
    assert!(e.message.contains("not total"), "{}", e.message);
}

#[test]
fn duplicate_section_is_rejected() {
    let e = err(&format!("{MINIMAL}behaviours {{\n  elements 0\n}}\n"));
    assert_eq!(e.line, 12);
    assert!(e.message.contains("duplicate section"));
}

#[test]
fn missing_section_is_reported_at_end_of_file() {
    let text: String = MINIMAL.lines().take(6).map(|l| format!("{l}\n")).collect();
    let e = err(&text);
    assert_eq!(e.line, 6);
    assert!(e.message.contains("behaviours"));
}

#[test]
fn error_display_is_line_and_column() {
    let e = err("bogus {\n}\n");
    assert_eq!(e.to_string(), format!("1:1: {}", e.message));
    assert!(!e.message.is_empty());
}

#[test]
fn defaults_are_ordinary_entries() {
    let doc = parse_model(MINIMAL).unwrap();
    let s = &doc.model.stim;
    let expected = BinOpTable::from_fn(2, |a, b| a.max(b));
    assert_eq!(s.oplus, expected);
}

/// Byte offsets, 1-based columns and text of every token that refers to
/// something, skipping `elements` lists and agent names, which declare.
fn corruptible_tokens(text: &str) -> Vec<(usize, usize, usize, String)> {
    let mut out = Vec::new();
    let mut in_agents = false;
    for (li, line) in text.lines().enumerate() {
        let code = line.split('#').next().unwrap();
        if code.trim_start().starts_with("elements") {
            continue;
        }
        if code.starts_with("agents") {
            in_agents = true;
        } else if code.starts_with('}') {
            in_agents = false;
        }
        let skip_first = in_agents && code.starts_with("  ");
        let line_start: usize = text.lines().take(li).map(|l| l.len() + 1).sum();
        let mut byte = 0;
        let mut first = true;
        for word in code.split(' ') {
            if !word.is_empty() && !std::mem::take(&mut first) | !skip_first {
                let col = code[..byte].chars().count() + 1;
                let bare = word
                    .strip_suffix(':')
                    .filter(|w| !w.is_empty())
                    .unwrap_or(word);
                out.push((line_start + byte, li + 1, col, bare.to_string()));
            }
            byte += word.len() + 1;
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn corruption_is_reported_at_or_before_the_token(pick in any::<prop::sample::Index>()) {
        let f = fixture_relay();
        let text = serialize_model(&f.document);
        let tokens = corruptible_tokens(&text);
        let (offset, line, col, word) = tokens[pick.index(tokens.len())].clone();
        let mut corrupted = text.clone();
        corrupted.replace_range(offset..offset + word.len(), "zz");
        let e = parse_model(&corrupted).unwrap_err();
        prop_assert!((e.line, e.column) <= (line, col), "{word} at {line}:{col} reported at {}:{}: {}", e.line, e.column, e.message);
    }

}

#[test]
fn round_trip_on_pool_systems() {
    for sys in c2ka::factory::system_pool(3, 40) {
        let doc = c2ka::dsl::ModelDocument {
            agents: sys
                .agents()
                .iter()
                .map(|a| (a.name.clone(), a.behaviour))
                .collect(),
            dependence: sys.dep.pairs().into_iter().collect(),
            closure: false,
            model: sys.model,
        };
        let text = serialize_model(&doc);
        assert_eq!(parse_model(&text).unwrap(), doc);
        assert_eq!(import_json(&export_json(&doc)).unwrap(), doc);
    }
}
