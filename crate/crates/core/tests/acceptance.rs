//! Acceptance suite. Runs every criterion, prints one line per criterion and
//! exits non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use c2ka::algebra::{check_cka, CheckOptions, Elem};
use c2ka::analysis::{
    communication_fixed_points, direct_env_comm, direct_stimuli_comm, env_comm,
    is_stimuli_connected, pfc, pfc_direct, stimuli_comm, universally_influential, whatif_replace,
    AgentSystem, Clause, DependenceRelation, ModificationReport, Replacement,
};
use c2ka::dsl::{export_json, import_json, parse_model, serialize_model};
use c2ka::factory::oracle::{
    oracle_direct_stimuli, oracle_env, oracle_laws_hold, oracle_partition_connected, oracle_pfc,
    oracle_stimuli,
};
use c2ka::factory::{
    all_fixtures, family_lattice_models, fixture_cka_r3, fixture_relay, fixture_stim4,
    product_model, sample_models, system_pool, SampleBounds,
};
use c2ka::model::C2kaModel;
use c2ka::report::ReportDocument;
use common::{names, ordered_pairs, with_fresh};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn pool() -> Vec<AgentSystem> {
    system_pool(2024, 150)
}

/// Every distinct model behind a pool, plus sampled and product models.
fn accepted_models(pool: &[AgentSystem]) -> Vec<(C2kaModel, CheckOptions)> {
    let relaxed = CheckOptions::relaxed();
    let strict = CheckOptions::default();
    let mut out: Vec<(C2kaModel, CheckOptions)> = Vec::new();
    let mut push = |m: C2kaModel, o: CheckOptions| {
        if !out.iter().any(|(x, _)| *x == m) {
            out.push((m, o));
        }
    };
    for sys in pool {
        push(sys.model.clone(), relaxed);
    }
    for opts in [strict, relaxed] {
        let bounds = SampleBounds {
            max_stimuli: 3,
            max_behaviours: 3,
            options: opts,
            ..SampleBounds::default()
        };
        for m in sample_models(99, bounds).take(30) {
            push(m, opts);
        }
    }
    let small = family_lattice_models(2, 2, &strict).remove(0);
    let stim4 = fixture_stim4().document.model;
    push(product_model(&stim4, &small).unwrap(), relaxed);
    push(product_model(&small, &small).unwrap(), relaxed);
    out
}

// ---------------------------------------------------------------------------
// Criterion 1

fn mutations(m: &C2kaModel) -> Vec<C2kaModel> {
    let (nk, ns) = (m.cka.carrier.len(), m.stim.len());
    let mut out = Vec::new();
    for t in 0..9 {
        let (rows, cols, codomain) = match t {
            0..=2 => (nk, nk, nk),
            3 | 4 => (nk, 1, nk),
            5 | 6 => (ns, ns, ns),
            7 => (ns, nk, nk),
            _ => (ns, nk, ns),
        };
        for r in 0..rows {
            for c in 0..cols {
                for v in 0..codomain {
                    let (r, c, v) = (Elem(r), Elem(c), Elem(v));
                    let mut x = m.clone();
                    let cell = match t {
                        0 => &mut x.cka.plus,
                        1 => &mut x.cka.seq,
                        2 => &mut x.cka.par,
                        3 => {
                            if x.cka.seq_star.get(r) == v {
                                continue;
                            }
                            x.cka.seq_star.set(r, v);
                            out.push(x);
                            continue;
                        }
                        4 => {
                            if x.cka.par_star.get(r) == v {
                                continue;
                            }
                            x.cka.par_star.set(r, v);
                            out.push(x);
                            continue;
                        }
                        5 => &mut x.stim.oplus,
                        6 => &mut x.stim.odot,
                        7 => &mut x.act,
                        _ => &mut x.out,
                    };
                    if cell.get(r, c) == v {
                        continue;
                    }
                    cell.set(r, c, v);
                    out.push(x);
                }
            }
        }
    }
    out
}

fn engine_passes(m: &C2kaModel, opts: &CheckOptions) -> bool {
    m.check_all(opts).is_ok_and(|r| r.passed())
}

fn random_mutation(m: &C2kaModel, rng: &mut ChaCha8Rng) -> C2kaModel {
    let (nk, ns) = (m.cka.carrier.len(), m.stim.len());
    let sizes = [
        nk * nk,
        nk * nk,
        nk * nk,
        nk,
        nk,
        ns * ns,
        ns * ns,
        ns * nk,
        ns * nk,
    ];
    let total: usize = sizes.iter().sum();
    let mut pick = rng.gen_range(0..total);
    let mut t = 0;
    while pick >= sizes[t] {
        pick -= sizes[t];
        t += 1;
    }
    let mut x = m.clone();
    let fresh = |rng: &mut ChaCha8Rng, n: usize, old: Elem| loop {
        let v = Elem(rng.gen_range(0..n));
        if v != old {
            return v;
        }
    };
    match t {
        3 | 4 => {
            let star = if t == 3 {
                &mut x.cka.seq_star
            } else {
                &mut x.cka.par_star
            };
            let a = Elem(pick);
            let v = fresh(rng, nk, star.get(a));
            star.set(a, v);
        }
        _ => {
            let (table, cols, codomain) = match t {
                0 => (&mut x.cka.plus, nk, nk),
                1 => (&mut x.cka.seq, nk, nk),
                2 => (&mut x.cka.par, nk, nk),
                5 => (&mut x.stim.oplus, ns, ns),
                6 => (&mut x.stim.odot, ns, ns),
                7 => (&mut x.act, nk, nk),
                _ => (&mut x.out, nk, ns),
            };
            let (r, c) = (Elem(pick / cols), Elem(pick % cols));
            let v = fresh(rng, codomain, table.get(r, c));
            table.set(r, c, v);
        }
    }
    x
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let strict = CheckOptions::default();
    let relaxed = CheckOptions::relaxed();

    let relay = fixture_relay().document.model;
    let relay_cka = check_cka(&relay.cka, &strict).unwrap().passed();
    let relay_c2ka = relay.check_c2ka(&strict).unwrap();
    let relay_ok = relay_cka && relay_c2ka.passed();

    let mut family = 0;
    let mut family_ok = 0;
    for k in 2..=4 {
        for m in family_lattice_models(k, 3, &relaxed) {
            family += 1;
            if check_cka(&m.cka, &strict).unwrap().passed()
                && m.check_c2ka(&strict).unwrap().passed()
            {
                family_ok += 1;
            }
        }
    }

    let mut bases: Vec<C2kaModel> = Vec::new();
    for k in 2..=3 {
        bases.extend(family_lattice_models(k, 3, &relaxed));
    }
    bases.push(fixture_cka_r3().document.model);
    let bounds = SampleBounds {
        max_stimuli: 3,
        max_behaviours: 3,
        options: relaxed,
        ..SampleBounds::default()
    };
    bases.extend(sample_models(31, bounds).take(6));
    let (mut mutated, mut recertified, mut disagreements) = (0, 0, 0);
    for base in &bases {
        let opts = if engine_passes(base, &strict) {
            strict
        } else {
            relaxed
        };
        let cascaded = !opts.cascaded_output_as_warning;
        for x in mutations(base) {
            mutated += 1;
            let engine = engine_passes(&x, &opts);
            let oracle = oracle_laws_hold(&x, cascaded);
            if engine != oracle {
                disagreements += 1;
            } else if engine {
                recertified += 1;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let trials = 1000;
    let detected = (0..trials)
        .filter(|_| !engine_passes(&random_mutation(&relay, &mut rng), &relaxed))
        .count();
    let rate = detected as f64 / trials as f64;
    let elapsed = start.elapsed();

    let pass = relay_ok
        && family_ok == family
        && disagreements == 0
        && rate >= 0.95
        && elapsed < Duration::from_secs(5);
    let relay_note = if relay_ok {
        "passes".to_string()
    } else {
        let laws: Vec<String> = relay_c2ka
            .violations
            .iter()
            .map(|v| v.law.clone())
            .collect();
        format!("fails strict check_c2ka on {}", laws.join(", "))
    };
    outcome(
        pass,
        format!(
            "RELAY {relay_note}; lattice family {family_ok}/{family} strictly valid; \
             {mutated} exhaustive mutations on {} small models, {recertified} re-certified valid, \
             {disagreements} checker/oracle disagreements; RELAY random mutations detected {:.1}% of {trials}; {}",
            bases.len(),
            rate * 100.0,
            secs(elapsed)
        ),
    )
}

// ---------------------------------------------------------------------------
// Criteria 2-4

fn criterion_2(pool: &[AgentSystem]) -> Outcome {
    let start = Instant::now();
    let (mut with_ui, mut violations) = (0, 0);
    for sys in pool.iter().filter(|s| s.len() <= 5) {
        if !universally_influential(sys).is_empty() {
            with_ui += 1;
            if !is_stimuli_connected(sys).holds || !oracle_partition_connected(sys).unwrap() {
                violations += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        violations == 0 && pool.len() >= 100 && with_ui > 0 && elapsed < Duration::from_secs(10),
        format!(
            "{} systems, {with_ui} with a universally influential agent, {violations} violations; {}",
            pool.len(),
            secs(elapsed)
        ),
    )
}

fn criterion_3(pool: &[AgentSystem], models: &[(C2kaModel, CheckOptions)]) -> Outcome {
    let mut systems: Vec<AgentSystem> = pool.to_vec();
    for (m, _) in models {
        let dep = DependenceRelation::empty(m.cka.carrier.len());
        let agents: Vec<(String, Elem)> = m
            .cka
            .carrier
            .elements()
            .take(5)
            .map(|e| (format!("G{}", e.0), e))
            .collect();
        systems.push(AgentSystem::new(m.clone(), agents, dep).unwrap());
    }
    let (mut checked, mut violations) = (0, 0);
    for sys in &systems {
        let m = &sys.model;
        for e in m.cka.carrier.elements() {
            if !m.is_fixed_point_behaviour(e).unwrap() {
                continue;
            }
            let (ext, fp) = with_fresh(sys, e);
            for src in names(&ext) {
                if src == fp {
                    continue;
                }
                checked += 1;
                if stimuli_comm(&ext, &src, &fp).unwrap().holds
                    || oracle_stimuli(&ext, &src, &fp).unwrap_or(false)
                {
                    violations += 1;
                }
            }
        }
    }
    outcome(
        violations == 0 && checked > 0,
        format!(
            "{} systems, {checked} queries into fixed-point agents, {violations} violations",
            systems.len()
        ),
    )
}

fn choice(sys: &AgentSystem, x: &str, y: &str) -> (AgentSystem, String) {
    let k = &sys.model.cka;
    with_fresh(
        sys,
        k.plus
            .get(sys.behaviour_of(x).unwrap(), sys.behaviour_of(y).unwrap()),
    )
}

fn criterion_4(pool: &[AgentSystem]) -> Outcome {
    let (mut source_bad, mut env_bad, mut sink_checked, mut sink_bad) = (0, 0, 0, 0);
    let mut source_n = 0;
    for sys in pool {
        let m = &sys.model;
        let k = &m.cka;
        let basic = m.stim.basic_stimuli();
        let all = names(sys);
        for (x, y) in ordered_pairs(sys) {
            if direct_stimuli_comm(sys, &x, &y).unwrap().holds {
                for z in &all {
                    source_n += 1;
                    let (ext, zx) = choice(sys, z, &x);
                    if !direct_stimuli_comm(&ext, &zx, &y).unwrap().holds {
                        source_bad += 1;
                    }
                    let (ext, yz) = choice(sys, &y, z);
                    let c = sys.behaviour_of(z).unwrap();
                    let sum = ext.behaviour_of(&yz).unwrap();
                    if basic.iter().any(|&t| k.leq(m.act(t, c), sum)) {
                        sink_checked += 1;
                        if direct_stimuli_comm(&ext, &x, &yz).unwrap().holds {
                            sink_bad += 1;
                        }
                    }
                }
            }
            if direct_env_comm(sys, &x, &y).unwrap().holds {
                for z in &all {
                    let (ext, zx) = choice(sys, z, &x);
                    if zx != y && !direct_env_comm(&ext, &zx, &y).unwrap().holds {
                        env_bad += 1;
                    }
                    let (ext, yz) = choice(sys, &y, z);
                    if !direct_env_comm(&ext, &x, &yz).unwrap().holds {
                        env_bad += 1;
                    }
                }
            }
        }
    }
    outcome(
        source_bad == 0 && env_bad == 0 && sink_bad == 0,
        format!(
            "choice at source: {source_bad} violations in {source_n}; environment preservation: {env_bad} violations; \
             sink-side condition false in {sink_checked} cases, edge still present (contrapositive inconsistent) in {sink_bad}"
        ),
    )
}

// ---------------------------------------------------------------------------
// Criterion 5

fn whatif_reports(sys: &AgentSystem) -> Vec<ModificationReport> {
    let all = names(sys);
    let m = &sys.model;
    let mut out = Vec::new();
    for a in &all {
        for c in &all {
            for b in &all {
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

fn criterion_5(pool: &[AgentSystem]) -> Outcome {
    let clauses = [
        Clause::Seq,
        Clause::Choice,
        Clause::SeqStar,
        Clause::InactiveOrIdle,
        Clause::StrongOrbit,
        Clause::FixedPoint,
    ];
    let mut checked = [0usize; 6];
    let mut bad = [0usize; 6];
    let mut recompute_mismatch = 0;
    let (mut idle_only, mut idle_only_bad) = (0, 0);
    for sys in pool {
        for rep in whatif_reports(sys) {
            let i = clauses.iter().position(|&c| c == rep.clause).unwrap();
            let modified = sys.with_behaviour(&rep.relay, rep.replaced_by).unwrap();
            if pfc(&modified, &rep.source, &rep.sink).unwrap().holds != rep.recomputed.holds {
                recompute_mismatch += 1;
            }
            match rep.clause {
                Clause::SeqStar | Clause::InactiveOrIdle | Clause::StrongOrbit => {
                    checked[i] += 1;
                    let wrong = rep.claimed() != Some(rep.recomputed.holds);
                    bad[i] += usize::from(wrong);
                    if rep.clause == Clause::InactiveOrIdle && rep.only_route {
                        idle_only += 1;
                        idle_only_bad += usize::from(wrong);
                    }
                }
                Clause::Seq | Clause::Choice | Clause::FixedPoint => {
                    if rep.only_route && rep.condition == Some(false) {
                        checked[i] += 1;
                        if rep.recomputed.holds {
                            bad[i] += 1;
                        }
                    }
                }
            }
        }
    }
    let parts: Vec<String> = clauses
        .iter()
        .enumerate()
        .map(|(i, c)| format!("({}) {}/{} inconsistent", c.roman(), bad[i], checked[i]))
        .collect();
    let pass = bad.iter().all(|&b| b == 0) && recompute_mismatch == 0 && checked[3] > 0;
    outcome(
        pass,
        format!(
            "{}; (iv) restricted to only routes {idle_only_bad}/{idle_only}; recomputation mismatches {recompute_mismatch}",
            parts.join(", ")
        ),
    )
}

// ---------------------------------------------------------------------------
// Criteria 6-9

fn criterion_6(pool: &[AgentSystem]) -> Outcome {
    let start = Instant::now();
    let (mut systems, mut queries, mut mismatches) = (0, 0, 0);
    for sys in pool
        .iter()
        .filter(|s| s.len() <= 5 && s.model.cka.carrier.len() <= 6)
    {
        systems += 1;
        for (a, b) in ordered_pairs(sys) {
            queries += 1;
            let pairs = [
                (
                    stimuli_comm(sys, &a, &b).unwrap().holds,
                    oracle_stimuli(sys, &a, &b).unwrap(),
                ),
                (
                    pfc(sys, &a, &b).unwrap().holds,
                    oracle_pfc(sys, &a, &b).unwrap(),
                ),
                (
                    env_comm(sys, &a, &b).unwrap().holds,
                    oracle_env(sys, &a, &b).unwrap(),
                ),
                (
                    pfc_direct(sys, &a, &b).unwrap().holds,
                    oracle_direct_stimuli(
                        &sys.model,
                        sys.behaviour_of(&a).unwrap(),
                        sys.behaviour_of(&b).unwrap(),
                    ) || sys
                        .dep
                        .depends(sys.behaviour_of(&b).unwrap(), sys.behaviour_of(&a).unwrap()),
                ),
            ];
            mismatches += pairs.iter().filter(|(x, y)| x != y).count();
        }
        if is_stimuli_connected(sys).holds != oracle_partition_connected(sys).unwrap() {
            mismatches += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        mismatches == 0 && systems >= 100 && elapsed < Duration::from_secs(30),
        format!(
            "{systems} systems, {queries} ordered pairs, {mismatches} mismatches; {}",
            secs(elapsed)
        ),
    )
}

fn criterion_7(pool: &[AgentSystem], models: &[(C2kaModel, CheckOptions)]) -> Outcome {
    let mut violations = 0;
    for (m, opts) in models {
        if !engine_passes(m, opts) {
            continue;
        }
        let (d, n, z, o) = (m.stim.deactivation, m.stim.neutral, m.cka.zero, m.cka.one);
        for a in m.cka.carrier.elements() {
            violations += usize::from(m.act(d, a) != z) + usize::from(m.act(n, a) != a);
        }
        for s in m.stim.elements() {
            violations += usize::from(m.out(s, z) != d) + usize::from(m.out(s, o) != s);
        }
        violations += usize::from(m.stim.basic_stimuli().contains(&d));
    }
    for sys in pool {
        let (ext, name) = with_fresh(sys, sys.model.cka.zero);
        if !communication_fixed_points(&ext).contains(&name) {
            violations += 1;
        }
    }
    outcome(
        violations == 0,
        format!(
            "{} accepted models, {} systems with an inactive agent, {violations} violations",
            models.len(),
            pool.len()
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut failures = Vec::new();
    for f in all_fixtures() {
        let doc = &f.document;
        let text = serialize_model(doc);
        if serialize_model(doc) != text {
            failures.push(format!("{}: serialization not byte-identical", f.name));
        }
        match parse_model(&text) {
            Ok(back) if back == *doc => {}
            _ => failures.push(format!("{}: parse(serialize) differs", f.name)),
        }
        match import_json(&export_json(doc)) {
            Ok(back) if back == *doc && serialize_model(&back) == text => {}
            _ => failures.push(format!("{}: JSON round trip differs", f.name)),
        }
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!(
                "{} fixtures round-trip through DSL and JSON",
                all_fixtures().len()
            )
        } else {
            failures.join("; ")
        },
    )
}

fn criterion_9() -> Outcome {
    let strict = CheckOptions::default();
    let relaxed = CheckOptions::relaxed();
    let small = family_lattice_models(2, 2, &strict).remove(0);
    let stim4 = fixture_stim4().document.model;

    let m8 = product_model(&stim4, &small).unwrap();
    let picks: Vec<(String, Elem)> = m8
        .cka
        .carrier
        .elements()
        .filter(|&e| e != m8.cka.zero)
        .take(6)
        .enumerate()
        .map(|(i, e)| (format!("A{i}"), e))
        .collect();
    let sys = AgentSystem::new(
        m8.clone(),
        picks,
        DependenceRelation::empty(m8.cka.carrier.len()),
    )
    .unwrap();
    let start = Instant::now();
    let passed = sys.model.check_all(&relaxed).unwrap().passed();
    let report = ReportDocument::build(&sys, &relaxed, passed).unwrap();
    let rendered = report.to_json().len() + report.to_text().len() + report.to_dot().len();
    let analyze = start.elapsed();

    let m16 = product_model(&stim4, &stim4).unwrap();
    let start = Instant::now();
    let full = CheckOptions {
        collect_all: true,
        ..strict
    };
    let c16 = m16.check_c2ka(&full).unwrap();
    let check = start.elapsed();

    outcome(
        passed
            && rendered > 0
            && analyze < Duration::from_secs(1)
            && check < Duration::from_secs(30)
            && m8.stim.len() == 8
            && m16.cka.carrier.len() == 16,
        format!(
            "analyze |K|=|S|=8 with 6 agents in {}; check_c2ka |K|=|S|=16 full sweep in {} ({} violations collected)",
            secs(analyze),
            secs(check),
            c16.violations.len()
        ),
    )
}

fn main() -> ExitCode {
    let pool = pool();
    let models = accepted_models(&pool);
    let results: Vec<(&str, Outcome)> = vec![
        ("axiom soundness", criterion_1()),
        (
            "universally influential implies connected",
            criterion_2(&pool),
        ),
        ("fixed points receive nothing", criterion_3(&pool, &models)),
        ("choice preserves communication", criterion_4(&pool)),
        ("what-if clauses", criterion_5(&pool)),
        ("oracle equivalence", criterion_6(&pool)),
        ("forced identities", criterion_7(&pool, &models)),
        ("DSL round trip", criterion_8()),
        ("performance envelope", criterion_9()),
    ];
    let mut failed = 0;
    for (i, (name, o)) in results.iter().enumerate() {
        failed += usize::from(!o.pass);
        println!(
            "criterion {} [{}] {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
