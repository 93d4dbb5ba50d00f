use aspine_core::instances::{handcrafted, pigeonhole, random_program, RandomShape};
use aspine_core::oracle::{enumerate_answer_sets, AtomSet};
use aspine_core::store::LengthClass;
use aspine_core::{
    compile_completion, solve, verify_model, GroundProgram, HeuristicConfig, HeuristicKind, LearnMode, NogoodStore,
    RestartPolicy, SolverConfig, Status,
};
use proptest::prelude::*;

fn family(out: &aspine_core::SolveOutput) -> Vec<AtomSet> {
    let mut v: Vec<AtomSet> = out.models.iter().map(|m| m.atoms.clone()).collect();
    v.sort();
    v
}

fn oracle(p: &GroundProgram) -> Vec<AtomSet> {
    let mut v = enumerate_answer_sets(p).unwrap();
    v.sort();
    v
}

fn all(mode: LearnMode) -> SolverConfig {
    SolverConfig { mode, max_models: 0, verify: true, audit: true, ..SolverConfig::default() }
}

fn program(text: &str) -> GroundProgram {
    GroundProgram::parse(text).unwrap()
}

#[test]
fn two_loop_has_only_the_empty_answer_set() {
    let p = program("p :- q.\nq :- p.\n");
    for mode in [LearnMode::Fwd, LearnMode::Res] {
        let out = solve(&p, &all(mode)).unwrap();
        assert_eq!(out.status, Status::Sat);
        assert_eq!(family(&out), vec![AtomSet::new()]);
    }
}

#[test]
fn forced_loop_is_unsat() {
    let p = program("p :- q.\nq :- p.\n:- not p.\n");
    for mode in [LearnMode::Fwd, LearnMode::Res] {
        let out = solve(&p, &all(mode)).unwrap();
        assert_eq!(out.status, Status::Unsat);
        assert!(out.models.is_empty());
    }
}

#[test]
fn even_loop_enumerates_both_models() {
    let p = program("a :- not b.\nb :- not a.\n");
    let out = solve(&p, &all(LearnMode::Fwd)).unwrap();
    let names: Vec<Vec<String>> = out.models.iter().map(|m| m.names(&p)).collect();
    assert_eq!(names.len(), 2);
    assert!(names.contains(&vec!["a".to_string()]) && names.contains(&vec!["b".to_string()]));
}

#[test]
fn empty_program_has_one_empty_model() {
    let out = solve(&GroundProgram::new(), &all(LearnMode::Res)).unwrap();
    assert_eq!(out.status, Status::Sat);
    assert_eq!(family(&out), vec![AtomSet::new()]);
}

#[test]
fn max_models_limits_enumeration() {
    let p = program("a :- not b.\nb :- not a.\nc :- not d.\nd :- not c.\n");
    let cfg = SolverConfig { max_models: 3, ..all(LearnMode::Fwd) };
    assert_eq!(solve(&p, &cfg).unwrap().models.len(), 3);
    assert_eq!(solve(&p, &all(LearnMode::Fwd)).unwrap().models.len(), 4);
}

#[test]
fn pigeonhole_is_unsat_in_both_modes() {
    let p = pigeonhole(5, 4);
    for mode in [LearnMode::Fwd, LearnMode::Res] {
        let out = solve(&p, &SolverConfig { mode, audit: true, ..SolverConfig::default() }).unwrap();
        assert_eq!(out.status, Status::Unsat);
        assert!(out.stats.conflicts > 0);
        assert!(out.stats.audit.all_ok());
    }
}

#[test]
fn restarts_fanout_and_tiny_deps_keep_answers_exact() {
    let configs = [
        SolverConfig { restarts: RestartPolicy::Geometric { base: 1, factor: 1.1 }, ..all(LearnMode::Fwd) },
        SolverConfig { restarts: RestartPolicy::Geometric { base: 2, factor: 2.0 }, ..all(LearnMode::Res) },
        SolverConfig { fanout: 3, ..all(LearnMode::Fwd) },
        SolverConfig { fanout: 2, ..all(LearnMode::Res) },
        SolverConfig { deps_words: 1, ..all(LearnMode::Fwd) },
        SolverConfig { workers: 3, par_threshold: 0, fanout: 2, ..all(LearnMode::Fwd) },
    ];
    let mut restarted = 0;
    for seed in 0..150 {
        let p = random_program(seed, RandomShape::default());
        let expected = oracle(&p);
        for cfg in &configs {
            let out = solve(&p, cfg).unwrap();
            assert_eq!(family(&out), expected, "seed {seed} config {cfg:?}");
            restarted += out.stats.restarts;
        }
    }
    assert!(restarted > 0);
}

#[test]
fn deps_overflow_falls_back_to_res() {
    // 80 free choices decided ahead of an unsatisfiable core push levels past one deps word
    let mut text: String = (0..80).map(|i| format!("c{i} :- not d{i}.\nd{i} :- not c{i}.\n")).collect();
    text.push_str(&pigeonhole(4, 3).to_string());
    let p = program(&text);
    let heuristic = HeuristicConfig { kind: HeuristicKind::Activity, ..HeuristicConfig::default() };
    let cfg = SolverConfig { deps_words: 1, trace: true, audit: true, heuristic, ..SolverConfig::default() };
    let out = solve(&p, &cfg).unwrap();
    assert_eq!(out.status, Status::Unsat);
    assert!(out.stats.audit.all_ok());
    assert!(out.trace.iter().any(|e| e.to_string().contains("mode=res")));
    let wide = solve(&p, &SolverConfig { deps_words: 2, ..cfg }).unwrap();
    assert!(wide.trace.iter().all(|e| e.to_string().contains("mode=fwd")));
}

#[test]
fn trace_records_one_event_per_learned_nogood() {
    let p = pigeonhole(4, 3);
    let out = solve(&p, &SolverConfig { trace: true, ..SolverConfig::default() }).unwrap();
    assert_eq!(out.trace.len() as u64, out.stats.learned_count);
    let line = out.trace[0].to_string();
    assert!(line.starts_with("conflict mode=fwd"));
}

#[test]
fn invalid_configs_are_rejected() {
    let p = program("a.");
    for cfg in [
        SolverConfig { workers: 0, ..SolverConfig::default() },
        SolverConfig { deps_words: 0, ..SolverConfig::default() },
        SolverConfig { fanout: 0, ..SolverConfig::default() },
        SolverConfig { restarts: RestartPolicy::Geometric { base: 10, factor: 1.0 }, ..SolverConfig::default() },
    ] {
        assert!(solve(&p, &cfg).is_err());
    }
}

#[test]
fn learned_capacity_is_enforced() {
    let p = pigeonhole(5, 4);
    assert!(solve(&p, &SolverConfig { learned_capacity: 1, ..SolverConfig::default() }).is_err());
}

#[test]
fn handcrafted_programs_under_every_heuristic() {
    for (name, text) in handcrafted() {
        let p = program(text);
        let expected = oracle(&p);
        for kind in [HeuristicKind::Occurrence, HeuristicKind::JeroslowWang, HeuristicKind::Activity] {
            let cfg = SolverConfig {
                heuristic: HeuristicConfig { kind, ..HeuristicConfig::default() },
                ..all(LearnMode::Res)
            };
            assert_eq!(family(&solve(&p, &cfg).unwrap()), expected, "{name} {kind}");
        }
    }
}

fn shape() -> impl Strategy<Value = (u64, RandomShape)> {
    (any::<u64>(), 1usize..10, 1usize..20, 0usize..5, 0usize..4).prop_map(|(seed, a, r, c, b)| {
        (seed, RandomShape { max_atoms: a, max_rules: r, max_constraints: c, max_body: b })
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn models_are_answer_sets_and_complete((seed, s) in shape(), fwd in any::<bool>(), workers in 1usize..4) {
        let p = random_program(seed, s);
        let mode = if fwd { LearnMode::Fwd } else { LearnMode::Res };
        let out = solve(&p, &SolverConfig { workers, par_threshold: 0, ..all(mode) }).unwrap();
        for m in &out.models {
            prop_assert!(verify_model(&p, m));
        }
        prop_assert_eq!(family(&out), oracle(&p));
        prop_assert!(out.stats.audit.all_ok());
    }

    #[test]
    fn store_layout_is_consistent((seed, s) in shape()) {
        let p = random_program(seed, s);
        let c = compile_completion(&p);
        let store = NogoodStore::build(&c.nogoods, c.aux.total_atoms());
        prop_assert!(store.check_integrity().is_ok());
        prop_assert_eq!(store.static_count() + store.units().len(), c.nogoods.len());
        for id in 0..store.static_count() {
            let id = aspine_core::NogoodId(id as u32);
            prop_assert!(store.class(id) != LengthClass::Unit);
        }
    }
}
