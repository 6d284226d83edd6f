//! Exhaustive enumeration of small stimulus structures and CKAs.
//!
//! Designated elements sit at fixed indices (`D`, `N` first for stimuli;
//! `0`, `1` first for behaviours) and the forced rows are pre-filled, so
//! only the free cells are enumerated. Results are labelled, not reduced up
//! to isomorphism.

use crate::algebra::{
    check_cka, check_kleene_labelled, check_monoid_labelled, leq, BinOpTable, Carrier,
    CheckOptions, CkaStructure, Elem, SemiringLabels, UnaryOpTable,
};
use crate::stimulus::StimulusStructure;

const STIM_NAMES: [&str; 6] = ["D", "N", "x", "y", "z", "w"];
const BEHAVIOUR_NAMES: [&str; 6] = ["0", "1", "a", "b", "c", "d"];

/// Calls `f` with every assignment of `values` to `cells` slots.
fn for_each_assignment(cells: usize, values: usize, mut f: impl FnMut(&[usize])) {
    let mut digits = vec![0usize; cells];
    loop {
        f(&digits);
        let mut i = 0;
        loop {
            if i == cells {
                return;
            }
            digits[i] += 1;
            if digits[i] < values {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// Commutative idempotent tables on `n` elements with `identity` as unit.
fn semilattices(n: usize, identity: usize) -> Vec<BinOpTable> {
    let free: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i != identity && j != identity)
        .collect();
    let carrier = Carrier::new((0..n).map(|i| i.to_string())).unwrap();
    let opts = CheckOptions::default();
    let mut out = Vec::new();
    for_each_assignment(free.len(), n, |digits| {
        let mut t = BinOpTable::from_fn(n, |a, b| {
            if a.0 == identity {
                b
            } else if b.0 == identity || a == b {
                a
            } else {
                Elem(0)
            }
        });
        for (&(i, j), &v) in free.iter().zip(digits) {
            t.set(Elem(i), Elem(j), Elem(v));
            t.set(Elem(j), Elem(i), Elem(v));
        }
        if check_monoid_labelled(&carrier, &t, "+", Elem(identity), &opts)
            .map(|r| r.passed())
            .unwrap_or(false)
        {
            out.push(t);
        }
    });
    out
}

/// Every stimulus structure on `n` elements with `D` at index 0 and `N` at 1.
pub fn stimulus_structures(n: usize) -> Vec<StimulusStructure> {
    assert!((2..=STIM_NAMES.len()).contains(&n));
    let carrier = Carrier::new(STIM_NAMES[..n].iter().copied()).unwrap();
    let (d, nn) = (0, 1);
    let free: Vec<(usize, usize)> = (2..n).flat_map(|i| (2..n).map(move |j| (i, j))).collect();
    let opts = CheckOptions::default();
    let mut out = Vec::new();
    for oplus in semilattices(n, d) {
        for_each_assignment(free.len(), n, |digits| {
            let mut odot = BinOpTable::from_fn(n, |a, b| {
                if a.0 == d || b.0 == d {
                    Elem(d)
                } else if a.0 == nn {
                    b
                } else if b.0 == nn {
                    a
                } else {
                    Elem(d)
                }
            });
            for (&(i, j), &v) in free.iter().zip(digits) {
                odot.set(Elem(i), Elem(j), Elem(v));
            }
            let s = StimulusStructure {
                carrier: carrier.clone(),
                oplus: oplus.clone(),
                odot,
                deactivation: Elem(d),
                neutral: Elem(nn),
            };
            if s.check(&opts).map(|r| r.passed()).unwrap_or(false) {
                out.push(s);
            }
        });
    }
    out
}

/// The unique star making `(plus, times)` a Kleene algebra, if any.
fn kleene_star(
    carrier: &Carrier,
    plus: &BinOpTable,
    times: &BinOpTable,
    one: Elem,
) -> Option<UnaryOpTable> {
    let n = carrier.len();
    let le = |a: Elem, b: Elem| leq(plus, a, b);
    let mut star = Vec::with_capacity(n);
    for a in carrier.elements() {
        let ok = carrier.elements().find(|&s| {
            le(plus.get(one, times.get(a, s)), s)
                && le(plus.get(one, times.get(s, a)), s)
                && carrier.elements().all(|b| {
                    carrier.elements().all(|x| {
                        (!le(plus.get(b, times.get(a, x)), x) || le(times.get(s, b), x))
                            && (!le(plus.get(b, times.get(x, a)), x) || le(times.get(b, s), x))
                    })
                })
        })?;
        star.push(ok);
    }
    Some(UnaryOpTable::from_fn(n, |a| star[a.0]))
}

fn kleene_algebras(
    carrier: &Carrier,
    plus: &BinOpTable,
    commutative: bool,
) -> Vec<(BinOpTable, UnaryOpTable)> {
    let n = carrier.len();
    let (zero, one) = (0, 1.min(n - 1));
    let free: Vec<(usize, usize)> = if n < 3 {
        Vec::new()
    } else if commutative {
        (2..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect()
    } else {
        (2..n).flat_map(|i| (2..n).map(move |j| (i, j))).collect()
    };
    let opts = CheckOptions::default();
    let mut out = Vec::new();
    for_each_assignment(free.len(), n, |digits| {
        let mut t = BinOpTable::from_fn(n, |a, b| {
            if a.0 == zero || b.0 == zero {
                Elem(zero)
            } else if a.0 == one {
                b
            } else if b.0 == one {
                a
            } else {
                Elem(zero)
            }
        });
        for (&(i, j), &v) in free.iter().zip(digits) {
            t.set(Elem(i), Elem(j), Elem(v));
            if commutative {
                t.set(Elem(j), Elem(i), Elem(v));
            }
        }
        let Some(star) = kleene_star(carrier, plus, &t, Elem(one)) else {
            return;
        };
        let labels = SemiringLabels {
            plus: "+",
            times: ".",
        };
        if check_kleene_labelled(
            carrier,
            plus,
            &t,
            &star,
            Elem(zero),
            Elem(one),
            labels,
            "star",
            &opts,
        )
        .map(|r| r.passed())
        .unwrap_or(false)
        {
            out.push((t, star));
        }
    });
    out
}

/// Every CKA on `n` elements with `0` at index 0 and `1` at index 1.
pub fn ckas(n: usize) -> Vec<CkaStructure> {
    assert!((1..=BEHAVIOUR_NAMES.len()).contains(&n));
    let carrier = Carrier::new(BEHAVIOUR_NAMES[..n].iter().copied()).unwrap();
    let one = 1.min(n - 1);
    let opts = CheckOptions::default();
    let mut out = Vec::new();
    for plus in semilattices(n, 0) {
        let seqs = kleene_algebras(&carrier, &plus, false);
        let pars = kleene_algebras(&carrier, &plus, true);
        for (seq, seq_star) in &seqs {
            for (par, par_star) in &pars {
                let cka = CkaStructure {
                    carrier: carrier.clone(),
                    plus: plus.clone(),
                    seq: seq.clone(),
                    par: par.clone(),
                    seq_star: seq_star.clone(),
                    par_star: par_star.clone(),
                    zero: Elem(0),
                    one: Elem(one),
                };
                if check_cka(&cka, &opts).map(|r| r.passed()).unwrap_or(false) {
                    out.push(cka);
                }
            }
        }
    }
    out
}
