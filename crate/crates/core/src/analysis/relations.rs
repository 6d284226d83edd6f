use std::collections::{HashMap, VecDeque};

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::algebra::{AxiomReport, CheckOptions, Elem};

use super::{AgentSystem, AnalysisError};

/// Which direct relation links two consecutive agents on a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Stimuli,
    Environment,
    Both,
}

impl EdgeKind {
    fn from_flags(stimuli: bool, environment: bool) -> Option<Self> {
        match (stimuli, environment) {
            (true, true) => Some(Self::Both),
            (true, false) => Some(Self::Stimuli),
            (false, true) => Some(Self::Environment),
            (false, false) => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Stimuli => "stimuli",
            Self::Environment => "environment",
            Self::Both => "both",
        }
    }

    fn has_stimuli(self) -> bool {
        matches!(self, Self::Stimuli | Self::Both)
    }

    fn has_environment(self) -> bool {
        matches!(self, Self::Environment | Self::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathWitness {
    pub hops: Vec<String>,
    /// `kinds[i]` labels the step from `hops[i]` to `hops[i + 1]`.
    pub kinds: Vec<EdgeKind>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// The source, stimulated by basic `received`, emits a stimulus with
    /// basic sub-stimulus `influencing`, which changes the sink.
    Stimuli {
        received: Elem,
        influencing: Elem,
    },
    /// Behaviours from source to sink, each depending on its predecessor.
    Dependence {
        chain: Vec<Elem>,
    },
    /// Which disjuncts of direct potential for communication hold.
    Direct {
        stimuli: Option<(Elem, Elem)>,
        environment: bool,
    },
    Path(PathWitness),
    /// A bipartition of the agents with no stimuli communication across.
    Partition {
        left: Vec<String>,
        right: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommVerdict {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl CommVerdict {
    fn yes(w: Witness) -> Self {
        Self {
            holds: true,
            witness: Some(w),
        }
    }

    fn no() -> Self {
        Self {
            holds: false,
            witness: None,
        }
    }

    pub fn path(&self) -> Option<&PathWitness> {
        match &self.witness {
            Some(Witness::Path(p)) => Some(p),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    DirectStimuli,
    Stimuli,
    DirectEnv,
    Env,
    PfcDirect,
    Pfc,
}

impl Relation {
    pub const ALL: [Relation; 6] = [
        Relation::DirectStimuli,
        Relation::Stimuli,
        Relation::DirectEnv,
        Relation::Env,
        Relation::PfcDirect,
        Relation::Pfc,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Self::DirectStimuli => "direct_stimuli",
            Self::Stimuli => "stimuli",
            Self::DirectEnv => "direct_env",
            Self::Env => "env",
            Self::PfcDirect => "pfc_direct",
            Self::Pfc => "pfc",
        }
    }

    /// Evaluates the relation for one ordered pair of distinct agents.
    pub fn eval(self, sys: &AgentSystem, a: &str, b: &str) -> Result<CommVerdict, AnalysisError> {
        match self {
            Self::DirectStimuli => direct_stimuli_comm(sys, a, b),
            Self::Stimuli => stimuli_comm(sys, a, b),
            Self::DirectEnv => direct_env_comm(sys, a, b),
            Self::Env => env_comm(sys, a, b),
            Self::PfcDirect => pfc_direct(sys, a, b),
            Self::Pfc => pfc(sys, a, b),
        }
    }
}

fn stimuli_witness(sys: &AgentSystem, a: Elem, b: Elem) -> Option<(Elem, Elem)> {
    let m = &sys.model;
    let basic = m.stim.basic_stimuli();
    for &s in &basic {
        let emitted = m.out(s, a);
        for &t in &basic {
            if m.stim.leq(t, emitted) && m.act(t, b) != b {
                return Some((s, t));
            }
        }
    }
    None
}

fn stimuli_witness_holds(sys: &AgentSystem, a: Elem, b: Elem, s: Elem, t: Elem) -> bool {
    let m = &sys.model;
    let basic = m.stim.basic_stimuli();
    basic.contains(&s) && basic.contains(&t) && m.stim.leq(t, m.out(s, a)) && m.act(t, b) != b
}

fn behaviours(sys: &AgentSystem) -> Vec<Elem> {
    sys.agents.iter().map(|a| a.behaviour).collect()
}

/// Direct stimuli edges between agent indices; the diagonal is empty.
fn stimuli_edges(sys: &AgentSystem) -> Vec<Vec<bool>> {
    let bs = behaviours(sys);
    let n = bs.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| i != j && stimuli_witness(sys, bs[i], bs[j]).is_some())
                .collect()
        })
        .collect()
}

fn env_edges(sys: &AgentSystem) -> Vec<Vec<bool>> {
    let bs = behaviours(sys);
    let n = bs.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| i != j && sys.dep.depends(bs[j], bs[i]))
                .collect()
        })
        .collect()
}

fn pfc_edges(sys: &AgentSystem) -> Vec<Vec<Option<EdgeKind>>> {
    let (s, e) = (stimuli_edges(sys), env_edges(sys));
    let n = s.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| EdgeKind::from_flags(s[i][j], e[i][j]))
                .collect()
        })
        .collect()
}

/// BFS distances to `dst` along edges, following them backwards.
fn distances_to(edge: &dyn Fn(usize, usize) -> bool, n: usize, dst: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; n];
    dist[dst] = Some(0);
    let mut queue = VecDeque::from([dst]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v].unwrap();
        for (u, du) in dist.iter_mut().enumerate() {
            if du.is_none() && edge(u, v) {
                *du = Some(d + 1);
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Shortest path from `src` to `dst`, choosing the earliest node at each
/// step among those still on a shortest route. For `src == dst` the path is
/// a self-loop or a cycle through another node.
fn shortest_path(
    edge: &dyn Fn(usize, usize) -> bool,
    n: usize,
    src: usize,
    dst: usize,
) -> Option<Vec<usize>> {
    let dist = distances_to(edge, n, dst);
    let mut path = vec![src];
    let mut at = src;
    if src == dst {
        if edge(src, src) {
            return Some(vec![src, src]);
        }
        let next = (0..n)
            .filter(|&c| c != src && edge(src, c))
            .filter_map(|c| dist[c].map(|d| (d, c)))
            .min()?;
        path.push(next.1);
        at = next.1;
    } else {
        dist[src]?;
    }
    while at != dst {
        let d = dist[at].unwrap();
        at = (0..n)
            .find(|&c| edge(at, c) && dist[c] == Some(d - 1))
            .expect("a shortest route continues");
        path.push(at);
    }
    Some(path)
}

/// `A ->s^d B`: some basic stimulus `t`, a sub-stimulus of what `A` emits
/// in response to a basic stimulus, changes `B`'s behaviour.
pub fn direct_stimuli_comm(
    sys: &AgentSystem,
    a: &str,
    b: &str,
) -> Result<CommVerdict, AnalysisError> {
    let (i, j) = sys.pair(a, b)?;
    let (ba, bb) = (sys.agents[i].behaviour, sys.agents[j].behaviour);
    Ok(match stimuli_witness(sys, ba, bb) {
        Some((received, influencing)) => CommVerdict::yes(Witness::Stimuli {
            received,
            influencing,
        }),
        None => CommVerdict::no(),
    })
}

/// The step-bounded relation: `n = 1` is the direct relation, and `n > 1`
/// asks for an intermediate `C` outside `{A, B}` with `A ->s^(n-1) C` and
/// `C ->s^d B`.
pub fn stimuli_comm_n(
    sys: &AgentSystem,
    a: &str,
    b: &str,
    n: usize,
) -> Result<bool, AnalysisError> {
    if n == 0 {
        return Err(AnalysisError::InvalidBound(n));
    }
    let (i, j) = sys.pair(a, b)?;
    let direct = stimuli_edges(sys);
    let m = direct.len();
    let step = |prev: &Vec<bool>| -> Vec<bool> {
        (0..m)
            .map(|y| (0..m).any(|c| c != i && c != y && prev[c] && direct[c][y]))
            .collect()
    };
    // The row for `A` is a deterministic function of the previous row, so
    // the sequence is eventually periodic.
    let mut seen: HashMap<Vec<bool>, usize> = HashMap::new();
    let mut rows: Vec<Vec<bool>> = vec![direct[i].clone()];
    seen.insert(rows[0].clone(), 1);
    let mut k = 1;
    while k < n {
        let next = step(&rows[k - 1]);
        k += 1;
        if let Some(&first) = seen.get(&next) {
            let period = k - first;
            let idx = first + (n - first) % period;
            return Ok(rows[idx - 1][j]);
        }
        seen.insert(next.clone(), k);
        rows.push(next);
    }
    Ok(rows[n - 1][j])
}

/// `A ->s B`: reachability over direct stimuli edges, with the shortest
/// path as witness.
pub fn stimuli_comm(sys: &AgentSystem, a: &str, b: &str) -> Result<CommVerdict, AnalysisError> {
    let (i, j) = sys.pair(a, b)?;
    let direct = stimuli_edges(sys);
    let edge = |u: usize, v: usize| direct[u][v];
    Ok(match shortest_path(&edge, direct.len(), i, j) {
        Some(p) => CommVerdict::yes(Witness::Path(PathWitness {
            kinds: vec![EdgeKind::Stimuli; p.len() - 1],
            hops: p.iter().map(|&k| sys.agents[k].name.clone()).collect(),
        })),
        None => CommVerdict::no(),
    })
}

fn stimuli_reach(sys: &AgentSystem) -> Vec<Vec<bool>> {
    let direct = stimuli_edges(sys);
    let n = direct.len();
    let edge = |u: usize, v: usize| direct[u][v];
    (0..n)
        .map(|i| {
            let dist = distances_from(&edge, n, i);
            (0..n).map(|j| j != i && dist[j].is_some()).collect()
        })
        .collect()
}

fn distances_from(edge: &dyn Fn(usize, usize) -> bool, n: usize, src: usize) -> Vec<Option<usize>> {
    distances_to(&|u, v| edge(v, u), n, src)
}

/// Weak connectivity of the stimuli digraph; a disconnecting partition is
/// the witness when it fails.
pub fn is_stimuli_connected(sys: &AgentSystem) -> CommVerdict {
    let direct = stimuli_edges(sys);
    let n = direct.len();
    let mut uf = UnionFind::new(n);
    for (i, row) in direct.iter().enumerate() {
        for (j, &e) in row.iter().enumerate() {
            if e {
                uf.union(i, j);
            }
        }
    }
    let root = uf.find(0);
    let (left, right): (Vec<usize>, Vec<usize>) = (0..n).partition(|&k| uf.find(k) == root);
    if right.is_empty() {
        return CommVerdict {
            holds: true,
            witness: None,
        };
    }
    let names = |v: Vec<usize>| v.into_iter().map(|k| sys.agents[k].name.clone()).collect();
    CommVerdict {
        holds: false,
        witness: Some(Witness::Partition {
            left: names(left),
            right: names(right),
        }),
    }
}

/// Agents with stimuli communication to no other agent.
pub fn communication_fixed_points(sys: &AgentSystem) -> Vec<String> {
    let reach = stimuli_reach(sys);
    sys.agents
        .iter()
        .zip(&reach)
        .filter(|(_, row)| !row.iter().any(|&r| r))
        .map(|(a, _)| a.name.clone())
        .collect()
}

/// Agents with stimuli communication to every other agent.
pub fn universally_influential(sys: &AgentSystem) -> Vec<String> {
    let reach = stimuli_reach(sys);
    sys.agents
        .iter()
        .enumerate()
        .filter(|&(i, _)| (0..reach.len()).all(|j| j == i || reach[i][j]))
        .map(|(_, a)| a.name.clone())
        .collect()
}

pub fn verify_dependence(
    sys: &AgentSystem,
    opts: &CheckOptions,
) -> Result<AxiomReport, AnalysisError> {
    sys.dep.verify(&sys.model.cka, opts)
}

/// `A ->e^d B`: the sink's behaviour depends on the source's.
pub fn direct_env_comm(sys: &AgentSystem, a: &str, b: &str) -> Result<CommVerdict, AnalysisError> {
    let (i, j) = sys.pair(a, b)?;
    let (ba, bb) = (sys.agents[i].behaviour, sys.agents[j].behaviour);
    Ok(if sys.dep.depends(bb, ba) {
        CommVerdict::yes(Witness::Dependence {
            chain: vec![ba, bb],
        })
    } else {
        CommVerdict::no()
    })
}

/// `A ->e B`: `b R+ a`, with the closure taken over all behaviours.
pub fn env_comm(sys: &AgentSystem, a: &str, b: &str) -> Result<CommVerdict, AnalysisError> {
    let (i, j) = sys.pair(a, b)?;
    let (ba, bb) = (sys.agents[i].behaviour, sys.agents[j].behaviour);
    let n = sys.model.cka.carrier.len();
    let edge = |u: usize, v: usize| sys.dep.depends(Elem(v), Elem(u));
    let closure = sys.dep.transitive_closure();
    if !closure.depends(bb, ba) {
        return Ok(CommVerdict::no());
    }
    let path = shortest_path(&edge, n, ba.0, bb.0).expect("closure and search agree");
    Ok(CommVerdict::yes(Witness::Dependence {
        chain: path.into_iter().map(Elem).collect(),
    }))
}

/// Direct potential for communication: either direct relation.
pub fn pfc_direct(sys: &AgentSystem, a: &str, b: &str) -> Result<CommVerdict, AnalysisError> {
    let (i, j) = sys.pair(a, b)?;
    let (ba, bb) = (sys.agents[i].behaviour, sys.agents[j].behaviour);
    let stimuli = stimuli_witness(sys, ba, bb);
    let environment = sys.dep.depends(bb, ba);
    Ok(if stimuli.is_some() || environment {
        CommVerdict::yes(Witness::Direct {
            stimuli,
            environment,
        })
    } else {
        CommVerdict::no()
    })
}

fn pfc_path(sys: &AgentSystem, i: usize, j: usize) -> CommVerdict {
    let edges = pfc_edges(sys);
    let edge = |u: usize, v: usize| edges[u][v].is_some();
    match shortest_path(&edge, edges.len(), i, j) {
        Some(p) => CommVerdict::yes(Witness::Path(PathWitness {
            kinds: p.windows(2).map(|w| edges[w[0]][w[1]].unwrap()).collect(),
            hops: p.iter().map(|&k| sys.agents[k].name.clone()).collect(),
        })),
        None => CommVerdict::no(),
    }
}

/// Potential for communication: a chain of direct steps of either kind.
pub fn pfc(sys: &AgentSystem, a: &str, b: &str) -> Result<CommVerdict, AnalysisError> {
    let (i, j) = sys.pair(a, b)?;
    Ok(pfc_path(sys, i, j))
}

/// As [`pfc`], but `A = B` is accepted and asks for a cycle through `A`.
pub fn pfc_allowing_self(
    sys: &AgentSystem,
    a: &str,
    b: &str,
) -> Result<CommVerdict, AnalysisError> {
    let (i, j) = (sys.index_of(a)?, sys.index_of(b)?);
    Ok(pfc_path(sys, i, j))
}

/// Re-checks a verdict's witness by direct evaluation of the definitions.
/// Returns `false` if a positive verdict lacks a valid witness, or if a
/// negative verdict carries one.
pub fn recheck(
    sys: &AgentSystem,
    relation: Relation,
    a: &str,
    b: &str,
    verdict: &CommVerdict,
) -> Result<bool, AnalysisError> {
    let (i, j) = (sys.index_of(a)?, sys.index_of(b)?);
    let (ba, bb) = (sys.agents[i].behaviour, sys.agents[j].behaviour);
    let Some(w) = &verdict.witness else {
        return Ok(!verdict.holds);
    };
    if !verdict.holds {
        return Ok(false);
    }
    let step_holds = |x: &str, y: &str, kind: EdgeKind| -> Result<bool, AnalysisError> {
        let (bx, by) = (sys.behaviour_of(x)?, sys.behaviour_of(y)?);
        if x == y {
            return Ok(false);
        }
        let s = stimuli_witness(sys, bx, by).is_some();
        let e = sys.dep.depends(by, bx);
        Ok((!kind.has_stimuli() || s) && (!kind.has_environment() || e))
    };
    Ok(match (relation, w) {
        (
            Relation::DirectStimuli,
            Witness::Stimuli {
                received,
                influencing,
            },
        ) => stimuli_witness_holds(sys, ba, bb, *received, *influencing),
        (Relation::DirectEnv, Witness::Dependence { chain }) => {
            chain == &vec![ba, bb] && sys.dep.depends(bb, ba)
        }
        (Relation::Env, Witness::Dependence { chain }) => {
            chain.len() >= 2
                && chain.first() == Some(&ba)
                && chain.last() == Some(&bb)
                && chain.windows(2).all(|w| sys.dep.depends(w[1], w[0]))
        }
        (
            Relation::PfcDirect,
            Witness::Direct {
                stimuli,
                environment,
            },
        ) => {
            (stimuli.is_some() || *environment)
                && stimuli.is_none_or(|(s, t)| stimuli_witness_holds(sys, ba, bb, s, t))
                && (!*environment || sys.dep.depends(bb, ba))
        }
        (Relation::Stimuli | Relation::Pfc, Witness::Path(p)) => {
            let ok_shape = p.hops.len() >= 2
                && p.kinds.len() == p.hops.len() - 1
                && p.hops.first().map(String::as_str) == Some(a)
                && p.hops.last().map(String::as_str) == Some(b);
            if !ok_shape
                || (relation == Relation::Stimuli
                    && p.kinds.iter().any(|&k| k != EdgeKind::Stimuli))
            {
                return Ok(false);
            }
            for (w, &kind) in p.hops.windows(2).zip(&p.kinds) {
                if !step_holds(&w[0], &w[1], kind)? {
                    return Ok(false);
                }
            }
            true
        }
        _ => false,
    })
}
