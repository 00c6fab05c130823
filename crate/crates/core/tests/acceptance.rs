//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};

use common::{
    equal_modulo_fresh, oracle_distances, oracle_fault_free, oracle_model, random_faulty, random_theory, rng, Shape,
};
use datalog_repair::engine::{faults, is_minimal, repair, RankedRepair, SearchConfig};
use datalog_repair::entrenchment::{
    argument_domain, predicate_entrenchment, recovery_probability, score_repair, Rational, ScoreCategory, ScoreValue,
};
use datalog_repair::graph::build_graph;
use datalog_repair::theory::{Atom, Clause, PreferredStructure, Term, Theory};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const ALL: SearchConfig =
    SearchConfig { max_plan_length: 3, max_candidates_per_fault: 64, max_results: 10_000, una: false };

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn find(repairs: &[RankedRepair], pred: impl Fn(&RankedRepair) -> bool) -> Option<&RankedRepair> {
    repairs.iter().find(|r| pred(r))
}

fn married_entrenchment() -> Outcome {
    let t = common::theory("married.adt");
    let ps = common::ps("married.aps");
    let e = predicate_entrenchment::<f64>(&t, &ps);
    let mut shown = Vec::new();
    for (p, want) in [("notDivorced", 1.0), ("marriedWoman", 0.67), ("hadHusband", 0.33)] {
        let got = *e.value(p).ok_or(format!("no value for {p}"))?;
        check((got - want).abs() <= 0.005, format!("e({p}) = {got}, expected {want}"))?;
        shown.push(format!("e({p})={got:.2}"));
    }
    Ok(shown.join(" "))
}

fn married_ranking() -> Outcome {
    let t = common::theory("married.adt");
    let ps = common::ps("married.aps");
    check(faults(&t, &ps, false).len() == 2, "expected one incompatibility and one insufficiency")?;
    let repairs = repair(&t, &ps, ALL);
    let top = repairs.first().ok_or("no repairs")?;
    check(
        top.plan.lines() == ["REF1(A2, body 1, hadHusband, hasHusband)"],
        format!("rank 1 is {:?}", top.plan.lines()),
    )?;
    check(oracle_fault_free(&top.theory, &ps), "rank 1 leaves faults")?;
    let a3 = find(&repairs, |r| r.plan.len() == 1 && r.plan.lines()[0].starts_with("REF1(A3, body 1, marriedWoman,"))
        .ok_or("no single rename of the A3 body")?;
    check(a3.rank > top.rank, "A3 rename does not rank lower")?;
    Ok(format!(
        "rank 1 {} ({}), A3 body rename at rank {} ({})",
        top.plan.lines().join("; "),
        top.score,
        a3.rank,
        a3.score
    ))
}

fn bird_ranking() -> Outcome {
    let t = common::theory("bird.adt");
    let ps = common::ps("bird.aps");
    let repairs = repair(&t, &ps, ALL);
    let is_split = |r: &RankedRepair, site: &str, p: &str| {
        r.plan.lines().first().is_some_and(|l| l.starts_with(&format!("REF1(A1, {site}, {p},")))
    };
    let bird = find(&repairs, |r| {
        is_split(r, "body 1", "bird") && r.plan.len() == 2 && r.plan.lines()[1].starts_with("ABD1(")
    })
    .ok_or("no bird split with abduction")?;
    let fly = find(&repairs, |r| is_split(r, "head", "fly")).ok_or("no fly split")?;
    check(bird.rank < fly.rank, format!("bird split rank {} vs fly split rank {}", bird.rank, fly.rank))?;
    let expected = common::theory("bird_repaired.adt");
    check(equal_modulo_fresh(&t, &repairs[0].theory, &expected), format!("rank 1 differs:\n{}", repairs[0].theory))?;
    Ok(format!(
        "bird split rank {} ({}), fly split rank {} ({}), rank 1 matches the preferred theory",
        bird.rank, bird.score, fly.rank, fly.score
    ))
}

fn families_scores() -> Outcome {
    let t = common::theory("families.adt");
    let ps = common::ps("families.aps");
    let repairs = repair(&t, &ps, ALL);
    let single = |r: &RankedRepair, prefix: &str| r.plan.len() == 1 && r.plan.lines()[0].starts_with(prefix);
    let variable = find(&repairs, |r| single(r, "REF6B(R1, body 1, 3, birth,")).ok_or("no variable generalisation")?;
    let step = find(&repairs, |r| {
        r.plan.len() == 1 && r.theory.clause("A2").is_some_and(|c| c.to_string() == "A2: => parent(a, c, birth).")
    })
    .ok_or("no step-to-birth replacement")?;
    let arity = find(&repairs, |r| single(r, "REF5(parent, 3)")).ok_or("no arity decrease")?;
    let mut got = Vec::new();
    for (r, want) in [(variable, 0), (step, 1), (arity, 2)] {
        let rescored = score_repair(&t, &r.theory, &r.plan, &ps).map_err(|e| e.to_string())?;
        check(rescored == r.score, "score is not reproducible")?;
        check(
            r.score.category == ScoreCategory::ArgumentChange
                && r.score.value == ScoreValue::Finite(Rational::from(want)),
            format!("{:?} scored {}, expected argumentChange {want}", r.plan.lines(), r.score),
        )?;
        got.push(r.rank);
    }
    check(got.windows(2).all(|w| w[0] < w[1]), format!("ranks {got:?} out of order"))?;
    Ok(format!("reductions 0, 1, 2 at ranks {got:?}"))
}

fn argument_domains() -> Outcome {
    let tm = common::theory("motherhood.adt");
    let trm = common::theory("motherhood_enriched.adt");
    let set = |xs: &[&str]| xs.iter().map(|s| datalog_repair::theory::name(s)).collect::<BTreeSet<_>>();
    check(argument_domain(&tm, "mum", 1) == set(&["anna", "lily", "lucy"]), "D(mum, 1) in the motherhood theory")?;
    check(argument_domain(&trm, "mum", 3) == set(&["birth", "step"]), "D(mum, 3) in the enriched motherhood theory")?;
    let atom = Atom::ground("mum", &["lucy", "tom", "birth"]);
    let s1: Rational = recovery_probability(&trm, &atom, 1).map_err(|e| e.to_string())?;
    let s3: Rational = recovery_probability(&trm, &atom, 3).map_err(|e| e.to_string())?;
    check(s1 == Rational::new(1, 3) && s3 == Rational::new(1, 2), format!("sigma = {s1}, {s3}"))?;
    Ok(format!("D(mum,1)={{anna,lily,lucy}} D(mum,3)={{birth,step}} sigma={s1},{s3}"))
}

fn entrenchment_ordering() -> Outcome {
    let mut predicates = 0;
    for seed in 0..250u64 {
        let mut r = rng(10_000 + seed);
        let t = random_theory(&mut r, Shape::default());
        let ps = common::random_ps(&mut r, &t);
        let e = predicate_entrenchment::<Rational>(&t, &ps);
        let sig: BTreeSet<String> = t.signature().predicates.keys().map(|p| p.to_string()).collect();
        let keys: BTreeSet<String> = e.predicates.keys().map(|p| p.to_string()).collect();
        check(sig == keys, format!("seed {seed}: not one value per predicate"))?;
        let protected: BTreeSet<String> = ps.protected().iter().map(|p| p.to_string()).collect();
        let pd = oracle_distances(&t, &protected);
        let zero = Rational::from(0);
        let one = Rational::from(1);
        for (p, v) in &e.predicates {
            check(zero < v.value && v.value <= one, format!("seed {seed}: e({p}) = {} out of range", v.value))?;
            check((v.value == one) == protected.contains(&**p), format!("seed {seed}: e({p}) = 1 mismatch"))?;
            predicates += 1;
        }
        let ranked: Vec<(&String, usize)> =
            pd.iter().filter(|(p, _)| !protected.contains(*p)).filter_map(|(p, d)| d.map(|d| (p, d))).collect();
        for (p1, d1) in &ranked {
            for (p2, d2) in &ranked {
                let (e1, e2) = (e.value(p1).unwrap(), e.value(p2).unwrap());
                check((e1 > e2) == (d1 < d2), format!("seed {seed}: e/pd order of {p1}, {p2}"))?;
            }
        }
    }
    Ok(format!("250 theories, {predicates} predicates, 0 violations"))
}

fn graph_independence() -> Outcome {
    let mut pairs = 0;
    let shape = Shape { predicates: 6, ..Shape::default() };
    for seed in 0..250u64 {
        let mut r = rng(20_000 + seed);
        let t = random_theory(&mut r, shape);
        let graph = build_graph(&t);
        let model = oracle_model(&t);
        let consts: Vec<String> = t.signature().constants.iter().map(|c| c.to_string()).collect();
        for (p, &arity) in &t.signature().predicates {
            let args: Vec<Term> = (0..arity)
                .map(|_| match r.gen_range(0..=consts.len()) {
                    k if k < consts.len() => Term::constant(&consts[k]),
                    _ => Term::constant("fresh_c"),
                })
                .collect();
            let mut clauses = t.clauses().to_vec();
            clauses.push(Clause::new("N1", vec![], Some(Atom::new(p.clone(), args))).unwrap());
            let bigger = oracle_model(&Theory::new(clauses).unwrap());
            for q in t.signature().predicates.keys() {
                if q == p || graph.reaches(p, q) {
                    continue;
                }
                let of_q = |m: &BTreeSet<Atom>| m.iter().filter(|a| a.predicate == *q).cloned().collect::<Vec<_>>();
                check(of_q(&model) == of_q(&bigger), format!("seed {seed}: adding {p} changed {q}"))?;
                pairs += 1;
            }
        }
    }
    check(pairs > 0, "no unreachable pairs exercised")?;
    Ok(format!("250 theories, {pairs} unreachable pairs, 0 violations"))
}

fn sound(t: &Theory, ps: &PreferredStructure, repairs: &[RankedRepair], what: &str) -> Result<(), String> {
    for r in repairs {
        check(
            faults(&r.theory, ps, false).is_empty() && oracle_fault_free(&r.theory, ps),
            format!("{what}: {:?} leaves faults", r.plan.lines()),
        )?;
        check(is_minimal(&r.plan, t, ps) == Ok(true), format!("{what}: {:?} is not minimal", r.plan.lines()))?;
    }
    Ok(())
}

fn soundness() -> Outcome {
    let mut total = 0;
    for (adt, aps) in [("bird.adt", "bird.aps"), ("married.adt", "married.aps"), ("families.adt", "families.aps")] {
        let (t, ps) = (common::theory(adt), common::ps(aps));
        let repairs = repair(&t, &ps, ALL);
        check(!repairs.is_empty(), format!("{adt}: no repairs"))?;
        sound(&t, &ps, &repairs, adt)?;
        total += repairs.len();
    }
    let cfg = SearchConfig { max_plan_length: 2, ..ALL };
    let (mut repaired, mut random_total) = (0, 0);
    for seed in 0..100u64 {
        let (t, ps) = random_faulty(&mut rng(30_000 + seed), Shape::default());
        let repairs = repair(&t, &ps, cfg);
        sound(&t, &ps, &repairs, &format!("random seed {seed}"))?;
        repaired += usize::from(!repairs.is_empty());
        random_total += repairs.len();
    }
    check(repaired >= 50, format!("only {repaired} of 100 random theories repaired"))?;
    Ok(format!("{total} corpus repairs; {random_total} repairs over {repaired}/100 random theories"))
}

fn determinism() -> Outcome {
    let run = |adt: &str, aps: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_datalog-repair"))
            .args(["repair", "--format", "json"])
            .arg(format!("{}/{adt}", common::CORPUS))
            .arg(format!("{}/{aps}", common::CORPUS))
            .output()
            .expect("binary runs");
        out.stdout
    };
    for (adt, aps) in [("bird.adt", "bird.aps"), ("married.adt", "married.aps"), ("families.adt", "families.aps")] {
        let (a, b) = (run(adt, aps), run(adt, aps));
        check(!a.is_empty() && a == b, format!("{adt}: reports differ"))?;
    }
    Ok("identical JSON for bird, married and families".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("married-women entrenchment", married_entrenchment),
        ("married-women repair ranking", married_ranking),
        ("bird repair ranking", bird_ranking),
        ("families argument scores", families_scores),
        ("argument domains", argument_domains),
        ("entrenchment ordering properties", entrenchment_ordering),
        ("graph independence property", graph_independence),
        ("soundness and minimality", soundness),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
