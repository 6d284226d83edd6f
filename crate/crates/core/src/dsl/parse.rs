use std::collections::BTreeSet;

use crate::algebra::{BinOpTable, Carrier, CkaStructure, Elem, UnaryOpTable};
use crate::model::C2kaModel;
use crate::stimulus::StimulusStructure;

use super::{ModelDocument, ParseError};

#[derive(Debug, Clone)]
struct Tok {
    text: String,
    line: usize,
    col: usize,
}

fn err_at(t: &Tok, message: impl Into<String>, expected: &[&str]) -> ParseError {
    ParseError {
        line: t.line,
        column: t.col,
        message: message.into(),
        token: Some(t.text.clone()),
        expected: expected.iter().map(|s| s.to_string()).collect(),
    }
}

fn err_pos(
    line: usize,
    column: usize,
    message: impl Into<String>,
    expected: Vec<String>,
) -> ParseError {
    ParseError {
        line,
        column,
        message: message.into(),
        token: None,
        expected,
    }
}

const PUNCT: &str = "{}=:+;*()#";

fn lex_line(text: &str, line: usize) -> Result<Vec<Tok>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' {
            break;
        }
        if c == '(' {
            let op: String = chars[i..chars.len().min(i + 3)].iter().collect();
            if op == "(+)" || op == "(.)" {
                toks.push(Tok {
                    text: op,
                    line,
                    col,
                });
                i += 3;
                continue;
            }
            return Err(err_pos(
                line,
                col,
                "unexpected `(`",
                vec!["(+)".into(), "(.)".into()],
            ));
        }
        if PUNCT.contains(c) {
            if c == ')' {
                return Err(err_pos(line, col, "unexpected `)`", Vec::new()));
            }
            toks.push(Tok {
                text: c.to_string(),
                line,
                col,
            });
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() && !chars[i].is_whitespace() && !PUNCT.contains(chars[i]) {
            i += 1;
        }
        let word: String = chars[start..i].iter().collect();
        let text = match word.as_str() {
            "\u{1D521}" => "D".to_string(),
            "\u{1D52B}" => "N".to_string(),
            _ => word,
        };
        toks.push(Tok { text, line, col });
    }
    Ok(toks)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Stimuli,
    Behaviours,
    Actions,
    Agents,
    Dependence,
}

const SECTION_NAMES: [&str; 5] = ["stimuli", "behaviours", "actions", "agents", "dependence"];

impl Section {
    fn from_keyword(s: &str) -> Option<Self> {
        Some(match s {
            "stimuli" => Self::Stimuli,
            "behaviours" => Self::Behaviours,
            "actions" => Self::Actions,
            "agents" => Self::Agents,
            "dependence" => Self::Dependence,
            _ => return None,
        })
    }

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone)]
enum Stmt {
    Elements(Vec<Tok>),
    Designate(Tok, Tok),
    Entry {
        op: Tok,
        x: Tok,
        y: Tok,
        z: Tok,
    },
    Row {
        op: Tok,
        x: Tok,
        values: Vec<Tok>,
        colon: Tok,
    },
    StarEntry {
        op: Tok,
        x: Tok,
        z: Tok,
    },
    StarRow {
        op: Tok,
        values: Vec<Tok>,
        colon: Tok,
    },
    Act {
        s: Tok,
        a: Tok,
        b: Tok,
    },
    Out {
        a: Tok,
        s: Tok,
        t: Tok,
    },
    ActRow {
        s: Tok,
        values: Vec<Tok>,
        colon: Tok,
    },
    OutRow {
        s: Tok,
        values: Vec<Tok>,
        colon: Tok,
    },
    Agent {
        name: Tok,
        behaviour: Tok,
    },
    Depends {
        b: Tok,
        a: Tok,
    },
    Closure,
}

struct Body {
    header: Tok,
    stmts: Vec<Stmt>,
}

enum P {
    Lit(&'static str),
    OneOf(&'static [&'static str]),
    Sym,
    Rest,
}

fn is_symbol(t: &Tok) -> bool {
    !t.text.chars().any(|c| PUNCT.contains(c)) && t.text != "(+)" && t.text != "(.)"
}

/// Matches a token line against a pattern and returns the captured tokens
/// (symbols, alternatives and the rest, in order).
fn shape(toks: &[Tok], pattern: &[P], eol: (usize, usize)) -> Result<Vec<Tok>, ParseError> {
    let mut caps = Vec::new();
    for (k, p) in pattern.iter().enumerate() {
        if let P::Rest = p {
            if toks.len() <= k {
                return Err(err_pos(
                    eol.0,
                    eol.1,
                    "expected at least one value",
                    vec!["<symbol>".into()],
                ));
            }
            for t in &toks[k..] {
                if !is_symbol(t) {
                    return Err(err_at(t, format!("unexpected `{}`", t.text), &["<symbol>"]));
                }
            }
            caps.extend(toks[k..].iter().cloned());
            return Ok(caps);
        }
        let expected: Vec<&str> = match p {
            P::Lit(s) => vec![*s],
            P::OneOf(alts) => alts.to_vec(),
            P::Sym => vec!["<symbol>"],
            P::Rest => unreachable!(),
        };
        let Some(t) = toks.get(k) else {
            return Err(err_pos(
                eol.0,
                eol.1,
                format!("unexpected end of line, expected {}", expected.join(" or ")),
                expected.iter().map(|s| s.to_string()).collect(),
            ));
        };
        let ok = match p {
            P::Lit(s) => t.text == *s,
            P::OneOf(alts) => alts.contains(&t.text.as_str()),
            P::Sym => is_symbol(t),
            P::Rest => unreachable!(),
        };
        if !ok {
            return Err(err_at(t, format!("unexpected `{}`", t.text), &expected));
        }
        if !matches!(p, P::Lit(_)) {
            caps.push(t.clone());
        }
    }
    if let Some(t) = toks.get(pattern.len()) {
        return Err(err_at(
            t,
            format!("unexpected `{}` after end of statement", t.text),
            &[],
        ));
    }
    Ok(caps)
}

fn parse_stmt(section: Section, toks: &[Tok]) -> Result<Stmt, ParseError> {
    let keyword_led = matches!(
        toks[0].text.as_str(),
        "elements"
            | "deactivation"
            | "neutral"
            | "zero"
            | "one"
            | "row"
            | "seqstar"
            | "parstar"
            | "act"
            | "out"
    );
    parse_stmt_inner(section, toks).map_err(|e| {
        let at_start = (e.line, e.column) == (toks[0].line, toks[0].col);
        if keyword_led || at_start {
            e
        } else {
            err_at(
                &toks[0],
                format!(
                    "malformed statement starting with `{}`: {}",
                    toks[0].text, e.message
                ),
                &[],
            )
        }
    })
}

fn parse_stmt_inner(section: Section, toks: &[Tok]) -> Result<Stmt, ParseError> {
    use P::*;
    let last = toks.last().unwrap();
    let eol = (last.line, last.col + last.text.chars().count());
    let first = toks[0].text.as_str();
    let m = |p: &[P]| shape(toks, p, eol);
    match section {
        Section::Stimuli => match first {
            "elements" => Ok(Stmt::Elements(m(&[Lit("elements"), Rest])?)),
            "deactivation" | "neutral" => {
                let c = m(&[Sym, Lit("="), Sym])?;
                Ok(Stmt::Designate(c[0].clone(), c[1].clone()))
            }
            "row" => {
                let mut c = m(&[Lit("row"), OneOf(&["(+)", "(.)"]), Sym, Lit(":"), Rest])?;
                let values = c.split_off(2);
                Ok(Stmt::Row {
                    op: c[0].clone(),
                    x: c[1].clone(),
                    values,
                    colon: toks[3].clone(),
                })
            }
            _ if is_symbol(&toks[0]) => {
                let c = m(&[Sym, OneOf(&["(+)", "(.)"]), Sym, Lit("="), Sym])?;
                Ok(Stmt::Entry {
                    x: c[0].clone(),
                    op: c[1].clone(),
                    y: c[2].clone(),
                    z: c[3].clone(),
                })
            }
            _ => Err(err_at(
                &toks[0],
                format!("unexpected `{first}`"),
                &[
                    "elements",
                    "deactivation",
                    "neutral",
                    "row",
                    "<symbol>",
                    "}",
                ],
            )),
        },
        Section::Behaviours => match first {
            "elements" => Ok(Stmt::Elements(m(&[Lit("elements"), Rest])?)),
            "zero" | "one" => {
                let c = m(&[Sym, Lit("="), Sym])?;
                Ok(Stmt::Designate(c[0].clone(), c[1].clone()))
            }
            "seqstar" | "parstar" => {
                let c = m(&[Sym, Sym, Lit("="), Sym])?;
                Ok(Stmt::StarEntry {
                    op: c[0].clone(),
                    x: c[1].clone(),
                    z: c[2].clone(),
                })
            }
            "row"
                if toks
                    .get(1)
                    .is_some_and(|t| t.text == "seqstar" || t.text == "parstar") =>
            {
                let mut c = m(&[Lit("row"), OneOf(&["seqstar", "parstar"]), Lit(":"), Rest])?;
                let values = c.split_off(1);
                Ok(Stmt::StarRow {
                    op: c[0].clone(),
                    values,
                    colon: toks[2].clone(),
                })
            }
            "row" => {
                let mut c = m(&[
                    Lit("row"),
                    OneOf(&["+", ";", "*", "seqstar", "parstar"]),
                    Sym,
                    Lit(":"),
                    Rest,
                ])?;
                let values = c.split_off(2);
                Ok(Stmt::Row {
                    op: c[0].clone(),
                    x: c[1].clone(),
                    values,
                    colon: toks[3].clone(),
                })
            }
            _ if is_symbol(&toks[0]) => {
                let c = m(&[Sym, OneOf(&["+", ";", "*"]), Sym, Lit("="), Sym])?;
                Ok(Stmt::Entry {
                    x: c[0].clone(),
                    op: c[1].clone(),
                    y: c[2].clone(),
                    z: c[3].clone(),
                })
            }
            _ => Err(err_at(
                &toks[0],
                format!("unexpected `{first}`"),
                &[
                    "elements", "zero", "one", "row", "seqstar", "parstar", "<symbol>", "}",
                ],
            )),
        },
        Section::Actions => match first {
            "act" => {
                let c = m(&[Lit("act"), Sym, Lit("on"), Sym, Lit("="), Sym])?;
                Ok(Stmt::Act {
                    s: c[0].clone(),
                    a: c[1].clone(),
                    b: c[2].clone(),
                })
            }
            "out" => {
                let c = m(&[Lit("out"), Lit("of"), Sym, Lit("under"), Sym, Lit("="), Sym])?;
                Ok(Stmt::Out {
                    a: c[0].clone(),
                    s: c[1].clone(),
                    t: c[2].clone(),
                })
            }
            "row" => {
                let mut c = m(&[Lit("row"), OneOf(&["act", "out"]), Sym, Lit(":"), Rest])?;
                let values = c.split_off(2);
                let (s, colon) = (c[1].clone(), toks[3].clone());
                Ok(if c[0].text == "act" {
                    Stmt::ActRow { s, values, colon }
                } else {
                    Stmt::OutRow { s, values, colon }
                })
            }
            _ => Err(err_at(
                &toks[0],
                format!("unexpected `{first}`"),
                &["act", "out", "row", "}"],
            )),
        },
        Section::Agents => {
            let c = m(&[Sym, Lit("="), Sym])?;
            Ok(Stmt::Agent {
                name: c[0].clone(),
                behaviour: c[1].clone(),
            })
        }
        Section::Dependence => match first {
            "closure" => {
                m(&[Lit("closure")])?;
                Ok(Stmt::Closure)
            }
            _ => {
                let c = m(&[Sym, Lit("depends"), Lit("on"), Sym])?;
                Ok(Stmt::Depends {
                    b: c[0].clone(),
                    a: c[1].clone(),
                })
            }
        },
    }
}

/// A partially filled table that remembers where each entry came from.
struct Table {
    name: &'static str,
    rows: usize,
    cols: usize,
    cells: Vec<Option<Elem>>,
    /// Some statement for this table failed to resolve, so gaps are expected.
    poisoned: bool,
}

impl Table {
    fn new(name: &'static str, rows: usize, cols: usize) -> Self {
        Self {
            name,
            rows,
            cols,
            cells: vec![None; rows * cols],
            poisoned: false,
        }
    }

    fn set(
        &mut self,
        r: Elem,
        c: Elem,
        v: Elem,
        at: &Tok,
        show: &dyn Fn(Elem) -> String,
    ) -> Result<(), ParseError> {
        let slot = &mut self.cells[r.0 * self.cols + c.0];
        match *slot {
            Some(old) if old != v => Err(err_at(
                at,
                format!(
                    "conflicting entry for `{}` at ({}, {}): {} already given, now {}",
                    self.name,
                    r.0,
                    c.0,
                    show(old),
                    show(v)
                ),
                &[],
            )),
            _ => {
                *slot = Some(v);
                Ok(())
            }
        }
    }

    fn default(&mut self, r: usize, c: usize, v: Elem) {
        let slot = &mut self.cells[r * self.cols + c];
        if slot.is_none() {
            *slot = Some(v);
        }
    }

    fn finish(
        self,
        codomain: usize,
        at: (usize, usize),
        row_name: &dyn Fn(usize) -> String,
        col_name: &dyn Fn(usize) -> String,
    ) -> Result<BinOpTable, ParseError> {
        if let Some(i) = self.cells.iter().position(Option::is_none) {
            if self.poisoned {
                return Err(err_pos(
                    usize::MAX,
                    usize::MAX,
                    "incomplete table",
                    Vec::new(),
                ));
            }
            return Err(err_pos(
                at.0,
                at.1,
                format!(
                    "table `{}` is not total: no entry for ({}, {})",
                    self.name,
                    row_name(i / self.cols),
                    col_name(i % self.cols)
                ),
                Vec::new(),
            ));
        }
        let cols = self.cols;
        let cells = self.cells;
        Ok(BinOpTable::rect_from_fn(
            self.rows,
            cols,
            codomain,
            |r, c| cells[r.0 * cols + c.0].unwrap(),
        ))
    }
}

struct Errors(Vec<ParseError>);

impl Errors {
    fn take<T>(&mut self, r: Result<T, ParseError>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.0.push(e);
                None
            }
        }
    }
}

fn carrier_of(body: &Body, errors: &mut Errors) -> Option<Carrier> {
    let mut decl: Option<&Vec<Tok>> = None;
    for st in &body.stmts {
        if let Stmt::Elements(toks) = st {
            if decl.is_some() {
                errors
                    .0
                    .push(err_at(&toks[0], "elements declared twice", &[]));
                continue;
            }
            decl = Some(toks);
        }
    }
    let Some(toks) = decl else {
        errors.0.push(err_at(
            &body.header,
            "section has no `elements` declaration",
            &["elements"],
        ));
        return None;
    };
    for (i, t) in toks.iter().enumerate() {
        if toks[..i].iter().any(|u| u.text == t.text) {
            errors.0.push(err_at(
                t,
                format!("element `{}` declared twice", t.text),
                &[],
            ));
            return None;
        }
    }
    Carrier::new(toks.iter().map(|t| t.text.clone())).ok()
}

fn sym(carrier: &Carrier, t: &Tok, what: &str) -> Result<Elem, ParseError> {
    carrier.lookup(&t.text).map_err(|_| {
        let expected: Vec<&str> = carrier.names().iter().map(String::as_str).collect();
        err_at(t, format!("undefined {what} `{}`", t.text), &expected)
    })
}

fn designations(
    body: &Body,
    carrier: &Carrier,
    keys: [&'static str; 2],
    what: &str,
    errors: &mut Errors,
) -> [Option<Elem>; 2] {
    let mut out = [None, None];
    let mut attempted = [false, false];
    for st in &body.stmts {
        if let Stmt::Designate(k, v) = st {
            let slot = if k.text == keys[0] { 0 } else { 1 };
            attempted[slot] = true;
            let Some(e) = errors.take(sym(carrier, v, what)) else {
                continue;
            };
            match out[slot] {
                Some(old) if old != e => errors.0.push(err_at(
                    v,
                    format!("conflicting designation for `{}`", keys[slot]),
                    &[],
                )),
                _ => out[slot] = Some(e),
            }
        }
    }
    for (i, k) in keys.iter().enumerate() {
        if out[i].is_none() && !attempted[i] {
            errors.0.push(err_at(
                &body.header,
                format!("missing designation `{k} = ...`"),
                &[k],
            ));
        }
    }
    out
}

fn fill_row(
    table: &mut Table,
    row: Elem,
    values: &[Tok],
    colon: &Tok,
    codomain: &Carrier,
    what: &str,
    errors: &mut Errors,
) {
    let cols = table.cols;
    if values.len() != cols {
        let at = values.get(cols).unwrap_or(colon);
        errors.0.push(err_at(
            at,
            format!("row has {} values, expected {}", values.len(), cols),
            &[],
        ));
        return;
    }
    for (c, t) in values.iter().enumerate() {
        if let Some(v) = errors.take(sym(codomain, t, what)) {
            let show = |e: Elem| codomain.name(e).to_string();
            let r = table.set(row, Elem(c), v, t, &show);
            errors.take(r);
        }
    }
}

fn resolve_stimuli(body: &Body, errors: &mut Errors) -> Option<StimulusStructure> {
    let carrier = carrier_of(body, errors)?;
    let [d, n] = designations(
        body,
        &carrier,
        ["deactivation", "neutral"],
        "stimulus",
        errors,
    );
    let len = carrier.len();
    let mut oplus = Table::new("(+)", len, len);
    let mut odot = Table::new("(.)", len, len);
    let show = |e: Elem| carrier.name(e).to_string();
    for st in &body.stmts {
        let before = errors.0.len();
        'stmt: {
            match st {
                Stmt::Entry { op, x, y, z } => {
                    let (Some(x), Some(y), Some(z)) = (
                        errors.take(sym(&carrier, x, "stimulus")),
                        errors.take(sym(&carrier, y, "stimulus")),
                        errors.take(sym(&carrier, z, "stimulus")),
                    ) else {
                        break 'stmt;
                    };
                    let t = if op.text == "(+)" {
                        &mut oplus
                    } else {
                        &mut odot
                    };
                    let r = t.set(x, y, z, op, &show);
                    errors.take(r);
                }
                Stmt::Row {
                    op,
                    x,
                    values,
                    colon,
                } => {
                    let Some(x) = errors.take(sym(&carrier, x, "stimulus")) else {
                        break 'stmt;
                    };
                    let t = if op.text == "(+)" {
                        &mut oplus
                    } else {
                        &mut odot
                    };
                    fill_row(t, x, values, colon, &carrier, "stimulus", errors);
                }
                _ => {}
            }
        }
        if errors.0.len() > before {
            if let Stmt::Entry { op, .. } | Stmt::Row { op, .. } = st {
                let t = if op.text == "(+)" {
                    &mut oplus
                } else {
                    &mut odot
                };
                t.poisoned = true;
            }
        }
    }
    let (d, n) = (d?, n?);
    for x in carrier.elements() {
        oplus.default(d.0, x.0, x);
        oplus.default(x.0, d.0, x);
        odot.default(d.0, x.0, d);
        odot.default(x.0, d.0, d);
        odot.default(n.0, x.0, x);
        odot.default(x.0, n.0, x);
    }
    let at = (body.header.line, body.header.col);
    let nm = |i: usize| carrier.names()[i].clone();
    let oplus = errors.take(oplus.finish(len, at, &nm, &nm));
    let odot = errors.take(odot.finish(len, at, &nm, &nm));
    Some(StimulusStructure {
        carrier: carrier.clone(),
        oplus: oplus?,
        odot: odot?,
        deactivation: d,
        neutral: n,
    })
}

fn resolve_behaviours(body: &Body, errors: &mut Errors) -> Option<CkaStructure> {
    let carrier = carrier_of(body, errors)?;
    let [zero, one] = designations(body, &carrier, ["zero", "one"], "behaviour", errors);
    let len = carrier.len();
    let mut plus = Table::new("+", len, len);
    let mut seq = Table::new(";", len, len);
    let mut par = Table::new("*", len, len);
    let mut seq_star = Table::new("seqstar", 1, len);
    let mut par_star = Table::new("parstar", 1, len);
    let show = |e: Elem| carrier.name(e).to_string();
    for st in &body.stmts {
        let before = errors.0.len();
        'stmt: {
            match st {
                Stmt::Entry { op, x, y, z } => {
                    let (Some(x), Some(y), Some(z)) = (
                        errors.take(sym(&carrier, x, "behaviour")),
                        errors.take(sym(&carrier, y, "behaviour")),
                        errors.take(sym(&carrier, z, "behaviour")),
                    ) else {
                        break 'stmt;
                    };
                    let t = match op.text.as_str() {
                        "+" => &mut plus,
                        ";" => &mut seq,
                        _ => &mut par,
                    };
                    let r = t.set(x, y, z, op, &show);
                    errors.take(r);
                }
                Stmt::Row {
                    op,
                    x,
                    values,
                    colon,
                } => {
                    let Some(x) = errors.take(sym(&carrier, x, "behaviour")) else {
                        break 'stmt;
                    };
                    let t = match op.text.as_str() {
                        "+" => &mut plus,
                        ";" => &mut seq,
                        _ => &mut par,
                    };
                    fill_row(t, x, values, colon, &carrier, "behaviour", errors);
                }
                Stmt::StarEntry { op, x, z } => {
                    let (Some(x), Some(z)) = (
                        errors.take(sym(&carrier, x, "behaviour")),
                        errors.take(sym(&carrier, z, "behaviour")),
                    ) else {
                        break 'stmt;
                    };
                    let t = if op.text == "seqstar" {
                        &mut seq_star
                    } else {
                        &mut par_star
                    };
                    let r = t.set(Elem(0), x, z, op, &show);
                    errors.take(r);
                }
                Stmt::StarRow { op, values, colon } => {
                    let t = if op.text == "seqstar" {
                        &mut seq_star
                    } else {
                        &mut par_star
                    };
                    fill_row(t, Elem(0), values, colon, &carrier, "behaviour", errors);
                }
                _ => {}
            }
        }
        if errors.0.len() > before {
            let t = match st {
                Stmt::Entry { op, .. }
                | Stmt::Row { op, .. }
                | Stmt::StarEntry { op, .. }
                | Stmt::StarRow { op, .. } => match op.text.as_str() {
                    "+" => &mut plus,
                    ";" => &mut seq,
                    "*" => &mut par,
                    "seqstar" => &mut seq_star,
                    _ => &mut par_star,
                },
                _ => continue,
            };
            t.poisoned = true;
        }
    }
    let (zero, one) = (zero?, one?);
    for x in carrier.elements() {
        plus.default(zero.0, x.0, x);
        plus.default(x.0, zero.0, x);
        for t in [&mut seq, &mut par] {
            t.default(zero.0, x.0, zero);
            t.default(x.0, zero.0, zero);
            t.default(one.0, x.0, x);
            t.default(x.0, one.0, x);
        }
    }
    for t in [&mut seq_star, &mut par_star] {
        t.default(0, zero.0, one);
        t.default(0, one.0, one);
    }
    let at = (body.header.line, body.header.col);
    let nm = |i: usize| carrier.names()[i].clone();
    let star_row = |_: usize| "star".to_string();
    let plus = errors.take(plus.finish(len, at, &nm, &nm));
    let seq = errors.take(seq.finish(len, at, &nm, &nm));
    let par = errors.take(par.finish(len, at, &nm, &nm));
    let seq_star = errors.take(seq_star.finish(len, at, &star_row, &nm));
    let par_star = errors.take(par_star.finish(len, at, &star_row, &nm));
    let unary = |t: BinOpTable| UnaryOpTable::from_fn(len, |a| t.get(Elem(0), a));
    Some(CkaStructure {
        carrier: carrier.clone(),
        plus: plus?,
        seq: seq?,
        par: par?,
        seq_star: unary(seq_star?),
        par_star: unary(par_star?),
        zero,
        one,
    })
}

fn resolve_actions(
    body: Option<&Body>,
    stim: &StimulusStructure,
    cka: &CkaStructure,
    eof: (usize, usize),
    errors: &mut Errors,
) -> Option<(BinOpTable, BinOpTable)> {
    let (ns, nk) = (stim.len(), cka.carrier.len());
    let mut act = Table::new("act", ns, nk);
    let mut out = Table::new("out", ns, nk);
    let (sc, kc) = (&stim.carrier, &cka.carrier);
    let show_k = |e: Elem| kc.name(e).to_string();
    let show_s = |e: Elem| sc.name(e).to_string();
    for st in body.map(|b| b.stmts.as_slice()).unwrap_or(&[]) {
        let before = errors.0.len();
        'stmt: {
            match st {
                Stmt::Act { s, a, b } => {
                    let at = b.clone();
                    let (Some(s), Some(a), Some(b)) = (
                        errors.take(sym(sc, s, "stimulus")),
                        errors.take(sym(kc, a, "behaviour")),
                        errors.take(sym(kc, b, "behaviour")),
                    ) else {
                        break 'stmt;
                    };
                    let r = act.set(s, a, b, &at, &show_k);
                    errors.take(r);
                }
                Stmt::Out { a, s, t } => {
                    let (Some(a), Some(s), Some(tt)) = (
                        errors.take(sym(kc, a, "behaviour")),
                        errors.take(sym(sc, s, "stimulus")),
                        errors.take(sym(sc, t, "stimulus")),
                    ) else {
                        break 'stmt;
                    };
                    let r = out.set(s, a, tt, t, &show_s);
                    errors.take(r);
                }
                Stmt::ActRow { s, values, colon } => {
                    let Some(s) = errors.take(sym(sc, s, "stimulus")) else {
                        break 'stmt;
                    };
                    fill_row(&mut act, s, values, colon, kc, "behaviour", errors);
                }
                Stmt::OutRow { s, values, colon } => {
                    let Some(s) = errors.take(sym(sc, s, "stimulus")) else {
                        break 'stmt;
                    };
                    fill_row(&mut out, s, values, colon, sc, "stimulus", errors);
                }
                _ => {}
            }
        }
        if errors.0.len() > before {
            match st {
                Stmt::Act { .. } | Stmt::ActRow { .. } => act.poisoned = true,
                Stmt::Out { .. } | Stmt::OutRow { .. } => out.poisoned = true,
                _ => {}
            }
        }
    }
    for s in sc.elements() {
        for a in kc.elements() {
            if s == stim.deactivation || a == cka.zero {
                act.default(s.0, a.0, cka.zero);
            }
            if s == stim.neutral {
                act.default(s.0, a.0, a);
            }
            if a == cka.zero || s == stim.deactivation {
                out.default(s.0, a.0, stim.deactivation);
            }
            if a == cka.one {
                out.default(s.0, a.0, s);
            }
        }
    }
    let at = body.map(|b| (b.header.line, b.header.col)).unwrap_or(eof);
    let sn = |i: usize| sc.names()[i].clone();
    let kn = |i: usize| kc.names()[i].clone();
    let act = errors.take(act.finish(nk, at, &sn, &kn));
    let out = errors.take(out.finish(ns, at, &sn, &kn));
    Some((act?, out?))
}

/// Parses and resolves a document; on failure returns the error with the
/// earliest position.
pub fn parse_model(text: &str) -> Result<ModelDocument, ParseError> {
    let mut errors = Errors(Vec::new());
    let mut bodies: [Option<Body>; 5] = Default::default();
    let mut open: Option<(Section, Body)> = None;
    let mut last_line = 1;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let toks = match lex_line(raw, line) {
            Ok(t) => t,
            Err(e) => {
                errors.0.push(e);
                continue;
            }
        };
        if toks.is_empty() {
            continue;
        }
        match open.take() {
            None => {
                let Some(section) = Section::from_keyword(&toks[0].text) else {
                    errors.0.push(err_at(
                        &toks[0],
                        format!("unexpected `{}`", toks[0].text),
                        &SECTION_NAMES,
                    ));
                    continue;
                };
                let eol = (line, raw.chars().count() + 1);
                if let Err(e) = shape(&toks, &[P::Sym, P::Lit("{")], eol) {
                    errors.0.push(e);
                    continue;
                }
                if bodies[section.index()].is_some() {
                    errors.0.push(err_at(
                        &toks[0],
                        format!("duplicate section `{}`", toks[0].text),
                        &[],
                    ));
                }
                open = Some((
                    section,
                    Body {
                        header: toks[0].clone(),
                        stmts: Vec::new(),
                    },
                ));
            }
            Some((section, mut body)) => {
                if toks.len() == 1 && toks[0].text == "}" {
                    if bodies[section.index()].is_none() {
                        bodies[section.index()] = Some(body);
                    }
                    continue;
                }
                match parse_stmt(section, &toks) {
                    Ok(st) => body.stmts.push(st),
                    Err(e) => errors.0.push(e),
                }
                open = Some((section, body));
            }
        }
    }
    if let Some((_, body)) = open {
        errors
            .0
            .push(err_at(&body.header, "section is never closed", &["}"]));
    }

    let eof = (last_line, 1);
    let [stimuli, behaviours, actions, agents, dependence] = &bodies;
    let missing = |name: &str| {
        err_pos(
            eof.0,
            eof.1,
            format!("missing section `{name}`"),
            vec![name.to_string()],
        )
    };
    let stim = match stimuli {
        Some(b) => resolve_stimuli(b, &mut errors),
        None => {
            errors.0.push(missing("stimuli"));
            None
        }
    };
    let cka = match behaviours {
        Some(b) => resolve_behaviours(b, &mut errors),
        None => {
            errors.0.push(missing("behaviours"));
            None
        }
    };

    let mut agent_list: Vec<(String, Elem)> = Vec::new();
    let mut pairs = BTreeSet::new();
    let mut closure = false;
    if let Some(cka) = &cka {
        for st in agents.iter().flat_map(|b| &b.stmts) {
            if let Stmt::Agent { name, behaviour } = st {
                let Some(b) = errors.take(sym(&cka.carrier, behaviour, "behaviour")) else {
                    continue;
                };
                if agent_list.iter().any(|(n, _)| *n == name.text) {
                    errors.0.push(err_at(
                        name,
                        format!("agent `{}` declared twice", name.text),
                        &[],
                    ));
                    continue;
                }
                agent_list.push((name.text.clone(), b));
            }
        }
        for st in dependence.iter().flat_map(|b| &b.stmts) {
            match st {
                Stmt::Depends { b, a } => {
                    let (Some(b), Some(a)) = (
                        errors.take(sym(&cka.carrier, b, "behaviour")),
                        errors.take(sym(&cka.carrier, a, "behaviour")),
                    ) else {
                        continue;
                    };
                    pairs.insert((b, a));
                }
                Stmt::Closure => closure = true,
                _ => {}
            }
        }
    }

    let tables = match (&stim, &cka) {
        (Some(s), Some(k)) => resolve_actions(actions.as_ref(), s, k, eof, &mut errors),
        _ => None,
    };

    if let Some(first) = errors.0.into_iter().min_by_key(|e| (e.line, e.column)) {
        return Err(first);
    }
    let (stim, cka, (act, out)) = (stim.unwrap(), cka.unwrap(), tables.unwrap());
    Ok(ModelDocument {
        model: C2kaModel {
            cka,
            stim,
            act,
            out,
        },
        agents: agent_list,
        dependence: pairs,
        closure,
    })
}
