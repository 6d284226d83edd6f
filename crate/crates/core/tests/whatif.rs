mod common;

use c2ka::analysis::{pfc, whatif_replace, AgentSystem, AnalysisError, Claim, Clause, Replacement};
use c2ka::factory::fixture_relay;

fn relay() -> AgentSystem {
    fixture_relay().system().unwrap()
}

fn elem(sys: &AgentSystem, name: &str) -> c2ka::algebra::Elem {
    sys.model.cka.carrier.lookup(name).unwrap()
}

/// Every what-if query on every ordered triple of distinct agents whose
/// hypothesis and preconditions hold.
fn applicable(sys: &AgentSystem) -> Vec<c2ka::analysis::ModificationReport> {
    let names = common::names(sys);
    let m = &sys.model;
    let mut out = Vec::new();
    for a in &names {
        for c in &names {
            for b in &names {
                if a == c || c == b || a == b {
                    continue;
                }
                let mut reps = vec![
                    Replacement::SeqStar,
                    Replacement::Inactive,
                    Replacement::Idle,
                ];
                for d in m.cka.carrier.elements() {
                    reps.extend([
                        Replacement::Seq(d),
                        Replacement::Choice(d),
                        Replacement::StrongOrbitMember(d),
                        Replacement::FixedPoint(d),
                    ]);
                }
                out.extend(
                    reps.into_iter()
                        .filter_map(|r| whatif_replace(sys, a, c, b, r).ok()),
                );
            }
        }
    }
    out
}

#[test]
fn idle_relay_cuts_the_only_path() {
    let sys = relay();
    for r in [Replacement::Inactive, Replacement::Idle] {
        let rep = whatif_replace(&sys, "A", "C", "B", r).unwrap();
        assert_eq!(rep.clause, Clause::InactiveOrIdle);
        assert_eq!(rep.claim, Claim::Lost);
        assert!(rep.only_route);
        assert!(!rep.recomputed.holds);
        assert!(rep.consistent);
    }
}

#[test]
fn strong_orbit_replacement_breaks_the_relay_path() {
    let sys = relay();
    let b = elem(&sys, "b");
    let rep = whatif_replace(&sys, "A", "C", "B", Replacement::StrongOrbitMember(b)).unwrap();
    assert_eq!(rep.claimed(), Some(true));
    assert!(!rep.recomputed.holds);
    assert!(!rep.consistent);
}

#[test]
fn sequential_iteration_breaks_the_relay_path() {
    let sys = relay();
    let rep = whatif_replace(&sys, "A", "C", "B", Replacement::SeqStar).unwrap();
    assert_eq!(rep.replaced_by, elem(&sys, "e"));
    assert_eq!(rep.claimed(), Some(true));
    assert!(!rep.recomputed.holds);
    assert!(!rep.consistent);
}

#[test]
fn seq_clause_condition_is_reported_with_sufficiency() {
    let sys = relay();
    for d in sys.model.cka.carrier.elements() {
        let rep = whatif_replace(&sys, "A", "C", "B", Replacement::Seq(d)).unwrap();
        assert_eq!(rep.claim, Claim::OnlyIf);
        let cond = rep.condition.unwrap();
        assert_eq!(rep.consistent, cond || !rep.recomputed.holds);
        assert_eq!(rep.sufficient, Some(!cond || rep.recomputed.holds));
    }
}

#[test]
fn missing_hypothesis_is_rejected() {
    let sys = relay();
    let err = whatif_replace(&sys, "B", "A", "C", Replacement::SeqStar).unwrap_err();
    assert!(matches!(err, AnalysisError::HypothesisNotEstablished(_)));
    let err = whatif_replace(&sys, "A", "A", "B", Replacement::SeqStar).unwrap_err();
    assert!(matches!(err, AnalysisError::HypothesisNotEstablished(_)));
}

#[test]
fn unmet_preconditions_are_rejected() {
    let sys = relay();
    let a = elem(&sys, "a");
    let err = whatif_replace(&sys, "A", "C", "B", Replacement::StrongOrbitMember(a)).unwrap_err();
    assert!(matches!(err, AnalysisError::PreconditionUnmet(_)));
    let c = elem(&sys, "c");
    let err = whatif_replace(&sys, "A", "C", "B", Replacement::FixedPoint(c)).unwrap_err();
    assert!(matches!(err, AnalysisError::PreconditionUnmet(_)));
}

#[test]
fn reactivation_blocks_the_inactive_clause() {
    let fx = c2ka::factory::fixture_stim4();
    let sys = fx.system().unwrap();
    assert!(!sys.model.is_without_reactivation());
    let with_relay = sys.with_agent("R", elem(&sys, "a")).unwrap();
    let err = whatif_replace(&with_relay, "Q", "R", "P", Replacement::Idle).unwrap_err();
    assert!(matches!(err, AnalysisError::PreconditionUnmet(_)));
}

#[test]
fn recomputation_matches_a_fresh_query() {
    for sys in common::pool().iter().take(40) {
        for rep in applicable(sys) {
            let modified = sys.with_behaviour(&rep.relay, rep.replaced_by).unwrap();
            assert_eq!(
                pfc(&modified, &rep.source, &rep.sink).unwrap().holds,
                rep.recomputed.holds
            );
            let without = sys.without_agent(&rep.relay).unwrap();
            assert_eq!(
                rep.only_route,
                !pfc(&without, &rep.source, &rep.sink).unwrap().holds
            );
        }
    }
}

#[test]
fn seq_and_fixed_point_clauses_hold_on_only_routes() {
    for sys in common::pool() {
        for rep in applicable(sys) {
            if rep.only_route && matches!(rep.clause, Clause::Seq | Clause::FixedPoint) {
                assert!(rep.consistent, "{rep:?}");
            }
        }
    }
}
