use crate::algebra::Elem;

use super::relations::{pfc, pfc_direct, CommVerdict};
use super::{AgentSystem, AnalysisError};

/// How the relay agent's behaviour `c` is replaced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Replacement {
    /// `c ; d`
    Seq(Elem),
    /// `c + d`
    Choice(Elem),
    /// the sequential iteration of `c`
    SeqStar,
    /// `0`
    Inactive,
    /// `1`
    Idle,
    /// a behaviour with the same orbit as `c`
    StrongOrbitMember(Elem),
    /// a behaviour unchanged by every stimulus except deactivation
    FixedPoint(Elem),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Clause {
    Seq,
    Choice,
    SeqStar,
    InactiveOrIdle,
    StrongOrbit,
    FixedPoint,
}

impl Clause {
    pub fn roman(self) -> &'static str {
        match self {
            Self::Seq => "i",
            Self::Choice => "ii",
            Self::SeqStar => "iii",
            Self::InactiveOrIdle => "iv",
            Self::StrongOrbit => "v",
            Self::FixedPoint => "vi",
        }
    }
}

impl Replacement {
    pub fn clause(self) -> Clause {
        match self {
            Self::Seq(_) => Clause::Seq,
            Self::Choice(_) => Clause::Choice,
            Self::SeqStar => Clause::SeqStar,
            Self::Inactive | Self::Idle => Clause::InactiveOrIdle,
            Self::StrongOrbitMember(_) => Clause::StrongOrbit,
            Self::FixedPoint(_) => Clause::FixedPoint,
        }
    }
}

/// What a clause asserts about the modified system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Claim {
    /// Potential for communication survives only if the condition holds.
    OnlyIf,
    /// Potential for communication survives.
    Preserved,
    /// Potential for communication is lost.
    Lost,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModificationReport {
    pub source: String,
    pub relay: String,
    pub sink: String,
    pub replacement: Replacement,
    pub clause: Clause,
    pub original: Elem,
    pub replaced_by: Elem,
    pub claim: Claim,
    /// The clause's side condition, for [`Claim::OnlyIf`] clauses.
    pub condition: Option<bool>,
    /// Potential for communication from source to sink after the change.
    pub recomputed: CommVerdict,
    /// Every route from source to sink in the original system uses the relay.
    pub only_route: bool,
    /// The recomputation respects the clause's claim.
    pub consistent: bool,
    /// For [`Claim::OnlyIf`] clauses: condition true implies the
    /// recomputation holds.
    pub sufficient: Option<bool>,
}

impl ModificationReport {
    /// The verdict the clause commits to, if it commits to one.
    pub fn claimed(&self) -> Option<bool> {
        match self.claim {
            Claim::Preserved => Some(true),
            Claim::Lost => Some(false),
            Claim::OnlyIf => (self.condition == Some(false)).then_some(false),
        }
    }

    pub fn preserved(&self) -> bool {
        self.recomputed.holds
    }
}

/// Replaces the behaviour of `relay` on a potential communication path from
/// `source` through `relay` to `sink`, evaluates the matching clause and
/// recomputes potential for communication on the modified system.
pub fn whatif_replace(
    sys: &AgentSystem,
    source: &str,
    relay: &str,
    sink: &str,
    replacement: Replacement,
) -> Result<ModificationReport, AnalysisError> {
    let m = &sys.model;
    let k = &m.cka;
    let (ia, ic, ib) = (
        sys.index_of(source)?,
        sys.index_of(relay)?,
        sys.index_of(sink)?,
    );
    if ia == ic || ic == ib || ia == ib {
        return Err(AnalysisError::HypothesisNotEstablished(format!(
            "source `{source}`, relay `{relay}` and sink `{sink}` must be distinct agents"
        )));
    }
    if !pfc_direct(sys, source, relay)?.holds {
        return Err(AnalysisError::HypothesisNotEstablished(format!(
            "no direct potential for communication from `{source}` to `{relay}`"
        )));
    }
    if !pfc(sys, relay, sink)?.holds {
        return Err(AnalysisError::HypothesisNotEstablished(format!(
            "no potential for communication from `{relay}` to `{sink}`"
        )));
    }
    let (a, c, b) = (
        sys.agents[ia].behaviour,
        sys.agents[ic].behaviour,
        sys.agents[ib].behaviour,
    );
    let r = |x: Elem, y: Elem| sys.dep.depends(x, y);

    let (replaced_by, claim, condition) = match replacement {
        Replacement::Seq(d) => {
            k.carrier.ensure(d)?;
            let cd = k.seq.get(c, d);
            let env = r(cd, a) && r(b, cd);
            let stim = m.stim.elements().any(|t| m.act(m.out(t, cd), b) != b);
            (cd, Claim::OnlyIf, Some(env || stim))
        }
        Replacement::Choice(d) => {
            k.carrier.ensure(d)?;
            let cd = k.plus.get(c, d);
            let cond = m
                .stim
                .basic_stimuli()
                .into_iter()
                .all(|t| !k.leq(m.act(t, d), cd));
            (cd, Claim::OnlyIf, Some(cond))
        }
        Replacement::SeqStar => (k.seq_star.get(c), Claim::Preserved, None),
        Replacement::Inactive | Replacement::Idle => {
            if !m.is_without_reactivation() {
                return Err(AnalysisError::PreconditionUnmet(
                    "the model has reactivation: some stimulus other than deactivation moves the idle behaviour"
                        .to_string(),
                ));
            }
            let e = if replacement == Replacement::Inactive {
                k.zero
            } else {
                k.one
            };
            (e, Claim::Lost, None)
        }
        Replacement::StrongOrbitMember(c2) => {
            if !m.strong_orbit(c)?.contains(&c2) {
                return Err(AnalysisError::PreconditionUnmet(format!(
                    "`{}` is not in the strong orbit of `{}`",
                    k.name(c2),
                    k.name(c)
                )));
            }
            (c2, Claim::Preserved, None)
        }
        Replacement::FixedPoint(c2) => {
            if !m.is_fixed_point_behaviour(c2)? {
                return Err(AnalysisError::PreconditionUnmet(format!(
                    "`{}` is not a fixed point behaviour",
                    k.name(c2)
                )));
            }
            (c2, Claim::OnlyIf, Some(r(c2, a) && r(b, c2)))
        }
    };

    let modified = sys.with_behaviour(relay, replaced_by)?;
    let recomputed = pfc(&modified, source, sink)?;
    let only_route = !pfc(&sys.without_agent(relay)?, source, sink)?.holds;
    let holds = recomputed.holds;
    let (consistent, sufficient) = match claim {
        Claim::Preserved => (holds, None),
        Claim::Lost => (!holds, None),
        Claim::OnlyIf => {
            let cond = condition.expect("only-if clauses evaluate a condition");
            (cond || !holds, Some(!cond || holds))
        }
    };
    Ok(ModificationReport {
        source: source.to_string(),
        relay: relay.to_string(),
        sink: sink.to_string(),
        replacement,
        clause: replacement.clause(),
        original: c,
        replaced_by,
        claim,
        condition,
        recomputed,
        only_route,
        consistent,
        sufficient,
    })
}
