//! Definition-literal reference implementations.
//!
//! Everything here is evaluated straight from the definitions over the raw
//! tables, without touching the analysis engine.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::algebra::Elem;
use crate::analysis::{AgentSystem, DependenceRelation};
use crate::model::C2kaModel;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("partition sweep supports at most 5 agents, system has {0}")]
    TooManyAgents(usize),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
}

/// `x | y` iff `x (.) z = y` for some `z`.
fn divides(m: &C2kaModel, x: Elem, y: Elem) -> bool {
    (0..m.stim.carrier.len()).any(|z| m.stim.odot.get(x, Elem(z)) == y)
}

pub fn oracle_basic_stimuli(m: &C2kaModel) -> Vec<Elem> {
    let n = m.stim.carrier.len();
    let mut out = Vec::new();
    for s in (0..n).map(Elem) {
        if s == m.stim.deactivation {
            continue;
        }
        let mut ok = true;
        for t in (0..n).map(Elem) {
            if divides(m, t, s) && t != m.stim.neutral && t != s {
                ok = false;
            }
            for r in (0..n).map(Elem) {
                if divides(m, s, m.stim.odot.get(t, r)) && !divides(m, s, t) && !divides(m, s, r) {
                    ok = false;
                }
            }
        }
        if ok {
            out.push(s);
        }
    }
    out
}

fn below(m: &C2kaModel, s: Elem, t: Elem) -> bool {
    m.stim.oplus.get(s, t) == t
}

/// Some basic `t` below what `a` emits on a basic `s` changes `b`.
pub fn oracle_direct_stimuli(m: &C2kaModel, a: Elem, b: Elem) -> bool {
    let basic = oracle_basic_stimuli(m);
    let mut found = false;
    for &s in &basic {
        for &t in &basic {
            if below(m, t, m.out.get(s, a)) && m.act.get(t, b) != b {
                found = true;
            }
        }
    }
    found
}

fn agent_index(sys: &AgentSystem, name: &str) -> Result<usize, OracleError> {
    sys.agents()
        .iter()
        .position(|a| a.name == name)
        .ok_or_else(|| OracleError::UnknownAgent(name.to_string()))
}

struct Walker<'a> {
    direct: &'a dyn Fn(usize, usize) -> bool,
    memo: HashMap<(usize, usize, usize), bool>,
}

impl Walker<'_> {
    /// A path of exactly `k` direct steps from `i` to `j` whose
    /// intermediate agents differ from both ends.
    fn steps(&mut self, k: usize, i: usize, j: usize, n: usize) -> bool {
        if let Some(&v) = self.memo.get(&(k, i, j)) {
            return v;
        }
        let v = if i == j {
            false
        } else if k == 1 {
            (self.direct)(i, j)
        } else {
            (0..n).any(|c| c != i && c != j && self.steps(k - 1, i, c, n) && (self.direct)(c, j))
        };
        self.memo.insert((k, i, j), v);
        v
    }
}

fn reachable(n: usize, direct: &dyn Fn(usize, usize) -> bool, i: usize, j: usize) -> bool {
    let mut w = Walker {
        direct,
        memo: HashMap::new(),
    };
    (1..n.max(2)).any(|k| w.steps(k, i, j, n))
}

pub fn oracle_stimuli(sys: &AgentSystem, a: &str, b: &str) -> Result<bool, OracleError> {
    let (i, j) = (agent_index(sys, a)?, agent_index(sys, b)?);
    let ag = sys.agents();
    let direct = |x: usize, y: usize| {
        x != y && oracle_direct_stimuli(&sys.model, ag[x].behaviour, ag[y].behaviour)
    };
    Ok(reachable(ag.len(), &direct, i, j))
}

/// Transitive closure by repeated composition until nothing new appears.
/// Pairs are `(b, a)` meaning `b` depends on `a`.
pub fn oracle_closure(r: &DependenceRelation) -> BTreeSet<(Elem, Elem)> {
    let base: BTreeSet<(Elem, Elem)> = r.pairs().into_iter().collect();
    let mut acc = base.clone();
    loop {
        let mut next = acc.clone();
        for &(x, y) in &base {
            for &(y2, z) in &acc {
                if y == y2 {
                    next.insert((x, z));
                }
            }
        }
        if next == acc {
            return acc;
        }
        acc = next;
    }
}

pub fn oracle_env(sys: &AgentSystem, a: &str, b: &str) -> Result<bool, OracleError> {
    let (i, j) = (agent_index(sys, a)?, agent_index(sys, b)?);
    if i == j {
        return Ok(false);
    }
    let ag = sys.agents();
    Ok(oracle_closure(&sys.dep).contains(&(ag[j].behaviour, ag[i].behaviour)))
}

pub fn oracle_pfc(sys: &AgentSystem, a: &str, b: &str) -> Result<bool, OracleError> {
    let (i, j) = (agent_index(sys, a)?, agent_index(sys, b)?);
    let ag = sys.agents();
    let direct = |x: usize, y: usize| {
        let (bx, by) = (ag[x].behaviour, ag[y].behaviour);
        x != y && (oracle_direct_stimuli(&sys.model, bx, by) || sys.dep.depends(by, bx))
    };
    Ok(reachable(ag.len(), &direct, i, j))
}

/// Connected iff every split of the agents into two nonempty parts has a
/// direct stimuli edge crossing it in some direction.
pub fn oracle_partition_connected(sys: &AgentSystem) -> Result<bool, OracleError> {
    let ag = sys.agents();
    let n = ag.len();
    if n > 5 {
        return Err(OracleError::TooManyAgents(n));
    }
    let edge = |x: usize, y: usize| {
        x != y && oracle_direct_stimuli(&sys.model, ag[x].behaviour, ag[y].behaviour)
    };
    for mask in 1..(1u32 << n) - 1 {
        let inside = |k: usize| mask & (1 << k) != 0;
        let mut crossing = false;
        for x in 0..n {
            for y in 0..n {
                if inside(x) != inside(y) && edge(x, y) {
                    crossing = true;
                }
            }
        }
        if !crossing {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A behaviour unchanged by every stimulus other than deactivation.
pub fn oracle_fixed_point(m: &C2kaModel, a: Elem) -> bool {
    (0..m.stim.carrier.len())
        .map(Elem)
        .filter(|&s| s != m.stim.deactivation)
        .all(|s| m.act.get(s, a) == a)
}

/// Every law of a C2KA evaluated over all instantiations: both Kleene
/// algebras of the CKA, the exchange law, commutativity of `*`, the
/// stimulus semiring, both semimodules and the three C2KA axioms.
/// Axiom (ii) is only evaluated when `cascaded` is set.
pub fn oracle_laws_hold(m: &C2kaModel, cascaded: bool) -> bool {
    let k = &m.cka;
    let st = &m.stim;
    let nk = k.carrier.len();
    let ns = st.carrier.len();
    let (z, o) = (k.zero, k.one);
    let (d, n) = (st.deactivation, st.neutral);
    let kk = || (0..nk).map(Elem);
    let ss = || (0..ns).map(Elem);
    let plus = |a, b| k.plus.get(a, b);
    let le = |a, b| plus(a, b) == b;

    for (times, star) in [(&k.seq, &k.seq_star), (&k.par, &k.par_star)] {
        let t = |a, b| times.get(a, b);
        for a in kk() {
            if plus(a, a) != a || plus(a, z) != a || t(a, o) != a || t(o, a) != a {
                return false;
            }
            if t(a, z) != z || t(z, a) != z {
                return false;
            }
            let s = star.get(a);
            if !le(plus(o, t(a, s)), s) || !le(plus(o, t(s, a)), s) {
                return false;
            }
            for b in kk() {
                if plus(a, b) != plus(b, a) {
                    return false;
                }
                for c in kk() {
                    if plus(plus(a, b), c) != plus(a, plus(b, c))
                        || t(t(a, b), c) != t(a, t(b, c))
                        || t(a, plus(b, c)) != plus(t(a, b), t(a, c))
                        || t(plus(a, b), c) != plus(t(a, c), t(b, c))
                    {
                        return false;
                    }
                    if le(plus(b, t(a, c)), c) && !le(t(s, b), c) {
                        return false;
                    }
                    if le(plus(b, t(c, a)), c) && !le(t(b, s), c) {
                        return false;
                    }
                }
            }
        }
    }
    for a in kk() {
        for b in kk() {
            if k.par.get(a, b) != k.par.get(b, a) {
                return false;
            }
            for c in kk() {
                for e in kk() {
                    let l = k.seq.get(k.par.get(a, b), k.par.get(c, e));
                    let r = k.par.get(k.seq.get(b, c), k.seq.get(a, e));
                    if !le(l, r) {
                        return false;
                    }
                }
            }
        }
    }

    let sp = |a, b| st.oplus.get(a, b);
    let sd = |a, b| st.odot.get(a, b);
    for a in ss() {
        if sp(a, a) != a || sp(a, d) != a || sd(a, n) != a || sd(n, a) != a {
            return false;
        }
        if sd(a, d) != d || sd(d, a) != d {
            return false;
        }
        for b in ss() {
            if sp(a, b) != sp(b, a) {
                return false;
            }
            for c in ss() {
                if sp(sp(a, b), c) != sp(a, sp(b, c))
                    || sd(sd(a, b), c) != sd(a, sd(b, c))
                    || sd(a, sp(b, c)) != sp(sd(a, b), sd(a, c))
                    || sd(sp(a, b), c) != sp(sd(a, c), sd(b, c))
                {
                    return false;
                }
            }
        }
    }

    let act = |s, a| m.act.get(s, a);
    let out = |s, a| m.out.get(s, a);
    for s in ss() {
        for a in kk() {
            if act(n, a) != a || act(d, a) != z || out(s, o) != s || out(s, z) != d {
                return false;
            }
            for b in kk() {
                if act(s, plus(a, b)) != plus(act(s, a), act(s, b))
                    || out(s, plus(a, b)) != sp(out(s, a), out(s, b))
                    || act(s, k.seq.get(a, b)) != k.seq.get(act(s, a), act(out(s, a), b))
                {
                    return false;
                }
                if cascaded {
                    for c in kk() {
                        if !le(c, a) && k.seq.get(act(s, a), act(out(s, c), b)) != z {
                            return false;
                        }
                    }
                }
            }
            for t in ss() {
                if act(sp(s, t), a) != plus(act(s, a), act(t, a))
                    || act(sd(s, t), a) != act(s, act(t, a))
                    || out(sp(s, t), a) != sp(out(s, a), out(t, a))
                    || out(sd(s, t), a) != sd(out(s, act(t, a)), out(t, a))
                {
                    return false;
                }
            }
        }
    }
    true
}
