mod common;

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use autotab::ast::{cache_key, normalize, scope, simplify, simplify_constraint, Domain, Expr, Model, VarName, Variable};
use autotab::heuristics::{gac_estimate, scan_top_level, HeuristicConfig};
use autotab::solver::{propagate_table, root_domains, solve, verify_solution, Mode, SolveOptions};
use autotab::table::Table;
use autotab::tabulate::{generate_table, tabulate_pass, TabLimits, TabResult};
use common::flat::{
    assignments, bool_expr, domains, equivalent_up_to_renaming, eval, rename, shuffle, truth_table, NAMES,
};
use proptest::prelude::*;

fn names() -> Vec<VarName> {
    NAMES.iter().map(|n| VarName::from(*n)).collect()
}

fn all_doms(d: &HashMap<VarName, Domain>) -> Vec<VarName> {
    let mut v: Vec<VarName> = d.keys().cloned().collect();
    v.sort();
    v
}

fn model(constraints: Vec<Expr>, d: &HashMap<VarName, Domain>) -> Model {
    let mut m = Model::new();
    for (i, n) in names().into_iter().enumerate() {
        m.add_variable(Variable { domain: d[&n].clone(), name: n, boolean: false, aux: false, position: i });
    }
    m.constraints = constraints;
    m
}

/// Solutions of `cs` by enumeration, in the solver's output shape.
fn brute_solutions(cs: &[Expr], d: &HashMap<VarName, Domain>) -> Vec<Vec<(VarName, i64)>> {
    let vars = names();
    assignments(&vars, d)
        .into_iter()
        .filter(|a| cs.iter().all(|c| eval(c, a).is_some_and(|v| v != 0)))
        .map(|a| vars.iter().map(|v| (v.clone(), a[v])).collect())
        .collect()
}

fn sorted<T: Ord>(mut v: Vec<T>) -> Vec<T> {
    v.sort();
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn normalize_is_idempotent(e in bool_expr(3)) {
        let n = normalize(&e);
        prop_assert_eq!(normalize(&n), n);
    }

    #[test]
    fn normalize_ignores_commutative_order(e in bool_expr(3), seed in any::<u64>()) {
        let mut s = seed;
        prop_assert_eq!(normalize(&shuffle(&e, &mut s)), normalize(&e));
    }

    #[test]
    fn cache_key_survives_permutation_and_renaming(
        e in bool_expr(3),
        d in domains(),
        seed in any::<u64>(),
        perm in Just(vec![0usize, 1, 2]).prop_shuffle(),
    ) {
        let mut s = seed;
        let (r, rd) = rename(&shuffle(&e, &mut s), &d, &perm);
        prop_assert_eq!(cache_key(&r, &rd), cache_key(&e, &d));
    }

    #[test]
    fn equal_cache_keys_mean_equivalent(a in bool_expr(2), da in domains(), b in bool_expr(2), db in domains()) {
        if cache_key(&a, &da) == cache_key(&b, &db) {
            prop_assert!(equivalent_up_to_renaming(&a, &da, &b, &db));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn normalize_and_simplify_preserve_truth(e in bool_expr(3), d in domains()) {
        let vars = all_doms(&d);
        let t = truth_table(&e, &vars, &d);
        prop_assert_eq!(truth_table(&normalize(&e), &vars, &d), t.clone());
        prop_assert_eq!(truth_table(&simplify(&e), &vars, &d), t);
    }

    #[test]
    fn total_assignment_folds_to_constant(e in bool_expr(3), d in domains()) {
        for a in assignments(&scope(&e), &d) {
            let expected = eval(&e, &a).is_some_and(|v| v != 0);
            prop_assert_eq!(simplify_constraint(&e, &a), Expr::Bool(expected));
        }
    }

    #[test]
    fn generated_table_is_the_truth_set(e in bool_expr(2), d in domains()) {
        let sc = scope(&e);
        let out = generate_table(&e, &sc, &d, &TabLimits::default(), false);
        let TabResult::Success(t) = out.result else { panic!("{:?}", out.result) };
        let expected: Vec<Vec<i64>> = assignments(&sc, &d)
            .into_iter()
            .filter(|a| eval(&e, a).is_some_and(|v| v != 0))
            .map(|a| sc.iter().map(|v| a[v]).collect())
            .collect();
        prop_assert_eq!(t.tuples(), &sorted(expected)[..]);
        prop_assert!(t.tuples().windows(2).all(|w| w[0] < w[1]));
        prop_assert!(out.nodes <= TabLimits::default().node_limit);
    }

    #[test]
    fn table_propagation_is_gac(
        arity in 1usize..=4,
        raw in prop::collection::vec(prop::collection::vec(0i64..6, 4), 0..40),
        keep in prop::collection::vec(prop::collection::vec(any::<bool>(), 6), 4),
    ) {
        let t = Table::new(arity, raw.into_iter().map(|r| r[..arity].to_vec()).collect());
        let mut doms: Vec<Domain> = (0..arity)
            .map(|i| Domain::new((0..6).filter(|&v| keep[i][v as usize]).collect()))
            .collect();
        prop_assume!(doms.iter().all(|d| !d.is_empty()));
        let live: Vec<&Vec<i64>> =
            t.tuples().iter().filter(|tp| tp.iter().zip(&doms).all(|(v, d)| d.contains(*v))).collect();
        let expected: Vec<Domain> =
            (0..arity).map(|i| Domain::new(live.iter().map(|tp| tp[i]).collect())).collect();
        let ok = propagate_table(&t, &mut doms);
        prop_assert_eq!(ok, !live.is_empty());
        if ok {
            prop_assert_eq!(doms, expected);
        }
    }

    #[test]
    fn domains_are_sorted_sets(values in prop::collection::vec(-20i64..20, 0..30)) {
        let d = Domain::new(values.clone());
        prop_assert!(d.values().windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(d.values().iter().copied().collect::<BTreeSet<_>>(), values.into_iter().collect::<BTreeSet<_>>());
    }

    #[test]
    fn gac_estimate_is_deterministic(e in bool_expr(3), d in domains()) {
        prop_assert_eq!(gac_estimate(&e, &d), gac_estimate(&e, &d));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn solver_finds_exactly_the_brute_force_solutions(
        cs in prop::collection::vec(bool_expr(2), 1..=3),
        d in domains(),
    ) {
        let m = model(cs.clone(), &d);
        let r = solve(&m, &SolveOptions::new(Mode::AllSolutions));
        prop_assert_eq!(sorted(r.solutions.clone()), brute_solutions(&cs, &d));
        for s in &r.solutions {
            prop_assert!(verify_solution(&m, &s.iter().cloned().collect()));
        }
        let again = solve(&m, &SolveOptions::new(Mode::AllSolutions));
        prop_assert_eq!(again.stats, r.stats);
    }

    #[test]
    fn tabulation_keeps_solutions(cs in prop::collection::vec(bool_expr(2), 1..=4), d in domains()) {
        let m = model(cs.clone(), &d);
        let (t, _) = tabulate_pass(m.clone(), &HeuristicConfig::default(), &TabLimits::default());
        let r = solve(&t, &SolveOptions::new(Mode::AllSolutions));
        prop_assert_eq!(sorted(r.solutions.clone()), brute_solutions(&cs, &d));
        for s in &r.solutions {
            prop_assert!(verify_solution(&m, &s.iter().cloned().collect()));
        }
    }

    #[test]
    fn propagation_fixpoint_ignores_schedule(
        cs in prop::collection::vec(bool_expr(2), 1..=4),
        d in domains(),
        seeds in prop::collection::vec(any::<u64>(), 3),
    ) {
        let m = model(cs, &d);
        let (t, _) = tabulate_pass(m.clone(), &HeuristicConfig::default(), &TabLimits::default());
        for m in [m, t] {
            let base = root_domains(&m, None);
            for &s in &seeds {
                prop_assert_eq!(root_domains(&m, Some(s)), base.clone());
            }
        }
    }

    #[test]
    fn identical_scope_groups_partition(cs in prop::collection::vec(bool_expr(1), 1..=6), d in domains()) {
        let m = model(cs, &d);
        let mut seen = BTreeSet::new();
        for c in scan_top_level(&m, &HeuristicConfig::default()) {
            for i in c.constraints.iter() {
                prop_assert!(seen.insert(*i));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn progress_check_is_sound(
        coefs in prop::collection::vec(1i64..=3, 4..=5),
        target in 10i64..80,
        limit in 200u64..30_000,
    ) {
        let vars: Vec<VarName> = (0..coefs.len()).map(|i| VarName::from(format!("v{i}"))).collect();
        let d: HashMap<VarName, Domain> = vars.iter().map(|v| (v.clone(), Domain::range(1, 16))).collect();
        let e = Expr::eq(
            Expr::sum(coefs.iter().zip(&vars).map(|(&c, v)| (c, Expr::Var(v.clone()))).collect(), 0),
            Expr::Int(target),
        );
        let limits = TabLimits { node_limit: limit };
        let out = generate_table(&e, &vars, &d, &limits, false);
        match out.result {
            TabResult::Success(t) => {
                prop_assert!(out.nodes <= limit);
                let full = generate_table(&e, &vars, &d, &TabLimits { node_limit: u64::MAX / 4 }, false);
                prop_assert_eq!(full.result, TabResult::Success(Arc::clone(&t)));
            }
            TabResult::AbandonedProgress { nodes, c, a } => {
                prop_assert!(TabLimits::is_checkpoint(nodes));
                prop_assert!(c * (limit as u128) < (nodes as u128) * a);
            }
            TabResult::AbandonedNodeLimit => prop_assert!(out.nodes > limit),
            other => prop_assert!(false, "unexpected {:?}", other),
        }
    }
}
