use c2ka::algebra::{check_cka, CheckOptions, Elem};
use c2ka::analysis::{
    communication_fixed_points, is_stimuli_connected, pfc, stimuli_comm, universally_influential,
};
use c2ka::factory::catalogue;
use c2ka::factory::oracle::{oracle_basic_stimuli, oracle_laws_hold};
use c2ka::factory::{
    all_fixtures, family_lattice_models, family_lattice_stimuli, fixture_cka_r3, fixture_relay,
    fixture_stim4, lattice_model, sample_models, Fixture, SampleBounds,
};

fn names(f: &Fixture, es: &[Elem]) -> Vec<String> {
    es.iter()
        .map(|&e| f.document.model.stim.name(e).to_string())
        .collect()
}

#[test]
fn every_fixture_reverifies_its_annotations() {
    for f in all_fixtures() {
        f.verify().unwrap();
        assert!(f.annotations.len() >= 10, "{}", f.name);
        assert!(f.annotations.iter().all(|a| !a.oracle.is_empty()));
    }
}

#[test]
fn fixtures_pass_relaxed_and_fail_strict() {
    for f in all_fixtures() {
        let m = &f.document.model;
        assert!(f.options.cascaded_output_as_warning);
        assert!(m.check_all(&f.options).unwrap().passed(), "{}", f.name);
        assert!(oracle_laws_hold(m, false), "{}", f.name);
        assert!(!oracle_laws_hold(m, true), "{}", f.name);
        let strict = m.check_all(&CheckOptions::default()).unwrap();
        assert!(!strict.passed());
        assert!(strict.violated("c2ka-(ii)-cascaded-output"));
    }
}

#[test]
fn relay_has_the_expected_shape() {
    let f = fixture_relay();
    let sys = f.system().unwrap();
    let m = &sys.model;
    assert_eq!(m.stim.len(), 4);
    assert_eq!(m.cka.carrier.len(), 6);
    assert_eq!(names(&f, &m.stim.basic_stimuli()), ["N", "x", "y"]);
    assert!(m.is_without_reactivation());
    let c = m.cka.carrier.lookup("c").unwrap();
    let orbit: Vec<&str> = m
        .strong_orbit(c)
        .unwrap()
        .into_iter()
        .map(|e| m.cka.name(e))
        .collect();
    assert_eq!(orbit, ["b", "c"]);
    assert!(pfc(&sys, "A", "B").unwrap().holds);
    assert_eq!(
        pfc(&sys, "A", "B").unwrap().path().unwrap().hops,
        ["A", "C", "B"]
    );
    for x in ["B", "C"] {
        assert!(!pfc(&sys, x, "A").unwrap().holds);
    }
    assert_eq!(universally_influential(&sys), ["A"]);
    assert!(is_stimuli_connected(&sys).holds);
}

#[test]
fn stim4_splits_into_a_pair_and_a_fixed_point() {
    let sys = fixture_stim4().system().unwrap();
    assert!(stimuli_comm(&sys, "P", "Q").unwrap().holds);
    assert!(stimuli_comm(&sys, "Q", "P").unwrap().holds);
    assert_eq!(communication_fixed_points(&sys), ["Z"]);
    assert!(!is_stimuli_connected(&sys).holds);
    assert!(!sys.model.is_without_reactivation());
}

#[test]
fn cka_r3_agents_only_share_an_environment() {
    let sys = fixture_cka_r3().system().unwrap();
    assert!(pfc(&sys, "X", "Y").unwrap().holds);
    assert!(pfc(&sys, "Y", "X").unwrap().holds);
    assert!(!pfc(&sys, "X", "Z").unwrap().holds);
    assert_eq!(communication_fixed_points(&sys), ["X", "Y", "Z"]);
    assert!(check_cka(&sys.model.cka, &CheckOptions::default())
        .unwrap()
        .passed());
}

#[test]
fn lattice_stimuli_are_distributive_chains() {
    for k in 1..=5 {
        let s = family_lattice_stimuli(k);
        assert_eq!(s.len(), k);
        assert!(
            s.check(&CheckOptions::default()).unwrap().passed(),
            "k = {k}"
        );
    }
    let two = family_lattice_stimuli(2);
    assert_eq!(two.carrier.names(), ["D", "N"]);
}

#[test]
fn middle_of_the_three_chain_is_basic() {
    let stim = family_lattice_stimuli(3);
    let cka = catalogue::ckas(2).remove(0);
    let m = lattice_model(&stim, &cka);
    let basic: Vec<&str> = m
        .stim
        .basic_stimuli()
        .into_iter()
        .map(|e| stim.name(e))
        .collect();
    let oracle: Vec<&str> = oracle_basic_stimuli(&m)
        .into_iter()
        .map(|e| stim.name(e))
        .collect();
    assert_eq!(basic, oracle);
    assert!(basic.contains(&"s1"));
    assert!(!basic.contains(&"D"));
}

#[test]
fn lattice_family_is_certified_and_strictly_valid_on_two_behaviours() {
    let strict = CheckOptions::default();
    for k in 2..=4 {
        let models = family_lattice_models(k, 2, &strict);
        assert!(!models.is_empty(), "k = {k}");
        for m in &models {
            assert!(oracle_laws_hold(m, true));
        }
        for m in family_lattice_models(k, 3, &CheckOptions::relaxed()) {
            assert!(oracle_laws_hold(&m, false));
        }
    }
}

#[test]
fn sampler_is_deterministic_and_certified() {
    let bounds = SampleBounds {
        max_stimuli: 3,
        max_behaviours: 3,
        options: CheckOptions::relaxed(),
        ..SampleBounds::default()
    };
    let a: Vec<_> = sample_models(5, bounds.clone()).take(6).collect();
    let b: Vec<_> = sample_models(5, bounds).take(6).collect();
    assert_eq!(a.len(), 6);
    assert_eq!(a, b);
    for m in &a {
        assert!(oracle_laws_hold(m, false));
    }
}

#[test]
fn trivial_two_behaviour_models_are_emitted() {
    let bounds = SampleBounds {
        max_stimuli: 2,
        max_behaviours: 2,
        ..SampleBounds::default()
    };
    let m = sample_models(1, bounds)
        .next()
        .expect("a strict model over {0, 1}");
    assert_eq!(m.cka.carrier.len(), 2);
    assert!(oracle_laws_hold(&m, true));
}
