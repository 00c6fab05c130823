mod common;

use std::collections::BTreeSet;

use common::{herbrand_base, oracle_distances, oracle_model, random_faulty, random_theory, rng, Shape};
use datalog_repair::entrenchment::{predicate_entrenchment, Rational};
use datalog_repair::graph::{build_graph, confidence_distances, Distance};
use datalog_repair::inference::{detect_faults, least_model, prove, Fault};
use datalog_repair::repair::generate_incompat_candidates;
use datalog_repair::theory::{Atom, Clause, Term, Theory};
use datalog_repair::{parse_theory, pretty_print};
use proptest::prelude::*;

#[test]
fn least_model_matches_naive_fixpoint() {
    for seed in 0..300 {
        let t = random_theory(&mut rng(seed), Shape::default());
        let got: BTreeSet<Atom> = least_model(&t).atoms().into_iter().collect();
        assert_eq!(got, oracle_model(&t), "seed {seed}\n{t}");
    }
}

#[test]
fn prove_agrees_with_model_and_proofs_replay() {
    for seed in 0..150 {
        let t = random_theory(&mut rng(seed), Shape::default());
        let model = oracle_model(&t);
        for a in herbrand_base(&t) {
            match prove(&t, &a) {
                Some(p) => {
                    assert!(model.contains(&a), "seed {seed}: proved non-theorem {a}");
                    p.replay(&t).unwrap_or_else(|e| panic!("seed {seed}: {a}: {e}"));
                }
                None => assert!(!model.contains(&a), "seed {seed}: missed theorem {a}"),
            }
        }
    }
}

#[test]
fn pd_matches_relaxation_oracle() {
    for seed in 0..200 {
        let mut r = rng(seed);
        let t = random_theory(&mut r, Shape::default());
        let ps = common::random_ps(&mut r, &t);
        let protected: BTreeSet<String> = ps.protected().iter().map(|p| p.to_string()).collect();
        let oracle = oracle_distances(&t, &protected);
        for (p, d) in confidence_distances(&build_graph(&t), &ps.protected()) {
            assert_eq!(d.finite(), oracle[&*p], "seed {seed}: pd({p})");
        }
    }
}

#[test]
fn pd_never_increases_when_a_rule_is_added() {
    for seed in 0..200 {
        let mut r = rng(seed);
        let t = random_theory(&mut r, Shape::default());
        let ps = common::random_ps(&mut r, &t);
        let preds: Vec<_> = t.signature().predicates.iter().collect();
        let (b, &ba) = preds[seed as usize % preds.len()];
        let (h, &ha) = preds[(seed as usize / 3) % preds.len()];
        if ha > ba {
            continue;
        }
        let vars: Vec<Term> = ["X", "Y"].iter().take(ba).map(|v| Term::var(v)).collect();
        let rule = Clause::new(
            "N1",
            vec![Atom::new(b.clone(), vars.clone())],
            Some(Atom::new(h.clone(), vars[..ha].to_vec())),
        )
        .unwrap();
        let mut clauses = t.clauses().to_vec();
        clauses.push(rule);
        let bigger = Theory::new(clauses).unwrap();
        let before = confidence_distances(&build_graph(&t), &ps.protected());
        let after = confidence_distances(&build_graph(&bigger), &ps.protected());
        for (p, d) in &before {
            let shorter = match (after[p], *d) {
                (_, Distance::Infinite) => true,
                (Distance::Finite(a), Distance::Finite(b)) => a <= b,
                (Distance::Infinite, Distance::Finite(_)) => false,
            };
            assert!(shorter, "seed {seed}: pd({p}) grew");
        }
    }
}

#[test]
fn graph_reconstruction_is_isomorphic() {
    for seed in 0..200 {
        let t = random_theory(&mut rng(seed), Shape::default());
        let g = build_graph(&t);
        let rebuilt = build_graph(&g.to_theory().unwrap());
        assert_eq!(g.nodes(), rebuilt.nodes(), "seed {seed}");
        let mut a: Vec<String> = g.edges().iter().map(|e| format!("{e:?}")).collect();
        let mut b: Vec<String> = rebuilt.edges().iter().map(|e| format!("{e:?}")).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b, "seed {seed}");
    }
}

#[test]
fn entrenchment_is_exact_for_rationals_and_close_for_floats() {
    for seed in 0..100 {
        let mut r = rng(seed);
        let t = random_theory(&mut r, Shape::default());
        let ps = common::random_ps(&mut r, &t);
        let exact = predicate_entrenchment::<Rational>(&t, &ps);
        let float = predicate_entrenchment::<f64>(&t, &ps);
        for (p, e) in &exact.predicates {
            let x = *e.value.numer() as f64 / *e.value.denom() as f64;
            assert!((x - float.value(p).unwrap()).abs() < 1e-12);
        }
    }
}

#[test]
fn incompatibility_candidates_break_the_proof() {
    let mut checked = 0;
    for seed in 0..200 {
        let (t, ps) = random_faulty(&mut rng(seed), Shape::default());
        for f in detect_faults(&t, &ps) {
            let Fault::Incompatibility { proof, .. } = &f else { continue };
            for op in generate_incompat_candidates(&t, &f) {
                let Ok(repaired) = op.apply(&t) else { continue };
                assert!(proof.replay(&repaired).is_err(), "seed {seed}: {op} leaves the proof intact");
                checked += 1;
            }
        }
    }
    assert!(checked > 50, "only {checked} candidates exercised");
}

fn arb_theory() -> impl Strategy<Value = Theory> {
    any::<u64>().prop_map(|seed| random_theory(&mut rng(seed), Shape::default()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pretty_print_round_trips(t in arb_theory()) {
        let text = pretty_print(&t);
        let back = parse_theory(&text).unwrap();
        prop_assert_eq!(back.clauses(), t.clauses());
    }

    #[test]
    fn adding_an_assertion_only_grows_the_model(t in arb_theory(), pick in any::<prop::sample::Index>()) {
        let base = herbrand_base(&t);
        prop_assume!(!base.is_empty());
        let atom = pick.get(&base).clone();
        let mut clauses = t.clauses().to_vec();
        clauses.push(Clause::new("N1", vec![], Some(atom.clone())).unwrap());
        let bigger = oracle_model(&Theory::new(clauses).unwrap());
        prop_assert!(bigger.contains(&atom));
        prop_assert!(oracle_model(&t).is_subset(&bigger));
    }
}
