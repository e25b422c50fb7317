//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any FAIL.
//! Runs without the libtest harness so the lines show in plain `cargo test`.

use std::time::Instant;

use mis3::audit::{recurrence_root, worst_root, FORM_CATALOG};
use mis3::graph::named::*;
use mis3::graph::Graph;
use mis3::harness::{self, FuzzConfig, FuzzReport, GenSpec, Model};
use mis3::oracle;
use mis3::rules::RuleRegistry;
use mis3::solver::{Solver, SolverConfig};

const SEED: u64 = 20240601;

fn checked(registry: RuleRegistry) -> Solver {
    Solver::new(registry, SolverConfig { audit: true, track_properties: true, ..Default::default() })
}

// Newton from x = 1: the function is convex and decreasing there, so the
// iterates climb monotonically to the root.
fn newton_root(form: &[u32]) -> f64 {
    let mut x = 1.0f64;
    for _ in 0..200 {
        let f: f64 = form.iter().map(|&a| x.powi(-(a as i32))).sum::<f64>() - 1.0;
        let df: f64 = form.iter().map(|&a| -(a as f64) * x.powi(-(a as i32) - 1)).sum();
        let next = x - f / df;
        if (next - x).abs() < 1e-15 {
            return next;
        }
        x = next;
    }
    x
}

struct Gate {
    failed: usize,
}

impl Gate {
    fn report(&mut self, id: u32, title: &str, ok: bool, detail: String) {
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("{tag} [{id}] {title}: {detail}");
        if !ok {
            self.failed += 1;
        }
    }
}

fn criterion_roots(gate: &mut Gate) {
    let t = Instant::now();
    let headline = recurrence_root(&[16, 16, 16, 24]).unwrap();
    let (worst, worst_r) = worst_root(FORM_CATALOG).unwrap();
    let max_gap = FORM_CATALOG.iter().map(|f| (recurrence_root(f).unwrap() - newton_root(f)).abs()).fold(0.0, f64::max);
    let secs = t.elapsed().as_secs_f64();
    let ok = (headline - 1.0821).abs() < 1e-4 && worst == [16, 24, 16, 16] && max_gap < 1e-9 && secs < 1.0;
    gate.report(
        1,
        "recurrence roots",
        ok,
        format!(
            "root {headline:.6}, worst {worst:?} at {worst_r:.6}, bisection vs Newton gap {max_gap:.1e}, {secs:.3}s"
        ),
    );
}

fn criterion_oracle(gate: &mut Gate, rep: &FuzzReport, secs: f64) {
    let dependent = rep.failures.iter().filter(|f| f.kind == "dependent").count();
    let ok =
        rep.instances == 2000 && rep.oracle_checked == 2000 && rep.mismatches == 0 && dependent == 0 && secs < 600.0;
    gate.report(
        2,
        "oracle equivalence",
        ok,
        format!(
            "{} subcubic instances n in [4,24], {} oracle-checked, {} mismatches, {} dependent sets, {secs:.1}s",
            rep.instances, rep.oracle_checked, rep.mismatches, dependent
        ),
    );
}

fn criterion_named(gate: &mut Gate) {
    let cases: Vec<(&str, Graph, usize)> = vec![
        ("C5", cycle(5), 2),
        ("C6", cycle(6), 3),
        ("C9", cycle(9), 4),
        ("K4", complete(4), 1),
        ("K3,3", k33(), 3),
        ("Q3", cube(), 4),
        ("prism", prism(), 2),
        ("Petersen", petersen(), 4),
        ("dodecahedron", dodecahedron(), 8),
    ];
    let solver = Solver::default();
    let mut bad = Vec::new();
    for (name, g, want) in &cases {
        let got = solver.solve(g).map(|r| (r.size, g.is_independent(&r.vertices)));
        let oracle_size = oracle::brute_mis(g).map(|s| s.len()).ok();
        if got != Ok((*want, true)) || oracle_size != Some(*want) {
            bad.push(format!("{name}: got {got:?}, oracle {oracle_size:?}, frozen {want}"));
        }
    }
    let detail = if bad.is_empty() { format!("{} graphs exact", cases.len()) } else { bad.join("; ") };
    gate.report(3, "named instances", bad.is_empty(), detail);
}

fn criterion_properties(gate: &mut Gate, reps: &[&FuzzReport]) {
    let increases: u64 = reps.iter().map(|r| r.eta_increases).sum();
    let transitions: u64 = reps.iter().map(|r| r.fine_to_bottleneck).sum();
    let stalls: u64 = reps.iter().map(|r| r.bottleneck_stalls).sum();
    gate.report(4, "property 1 (eta never rises in a reduction)", increases == 0, format!("{increases} increases"));
    gate.report(
        5,
        "property 2 (fine to bottleneck lowers eta)",
        stalls == 0 && transitions > 0,
        format!("{transitions} fine-to-bottleneck steps observed, {stalls} without a decrease"),
    );
}

fn criterion_audit(gate: &mut Gate, reps: &[&FuzzReport]) {
    let mut violations: usize = reps.iter().map(|r| r.audit_violations).sum();
    let mut fired = std::collections::BTreeSet::new();
    for r in reps {
        for k in r.rule_histogram.keys() {
            fired.insert(k.trim_end_matches(|c: char| c.is_ascii_lowercase()).to_string());
        }
    }
    let solver = checked(RuleRegistry::standard());
    for g in [dodecahedron(), heawood(), mcgee(), tutte_coxeter()] {
        let r = solver.solve(&g).expect("named graph solves");
        violations += r.audit.map_or(1, |a| a.violation_count());
    }
    let missing: Vec<String> = (16..=20).map(|i| format!("R{i}")).filter(|r| !fired.contains(r)).collect();
    let mut last26 = i64::MAX;
    for r in reps {
        for (rule, s) in &r.audit.per_rule {
            if ["R16", "R19", "R20"].contains(&rule.as_str()) {
                last26 = last26.min(*s.min_measured.last().unwrap_or(&i64::MAX));
            }
        }
    }
    gate.report(
        6,
        "branch audit",
        violations == 0 && missing.is_empty(),
        format!(
            "{} audited branchings, {violations} violations, rules R16-R20 missing from corpus: {missing:?}, smallest last-branch drop of an (X,X,26) rule {last26}",
            reps.iter().map(|r| r.audit.branchings).sum::<u64>()
        ),
    );
}

fn criterion_exhaustive(gate: &mut Gate, reps: &[&FuzzReport]) {
    let faults: usize = reps.iter().map(|r| r.faults).sum();
    let instances: usize = reps.iter().map(|r| r.instances).sum();
    gate.report(7, "exhaustiveness", faults == 0, format!("{faults} faults over {instances} instances"));
}

fn criterion_growth(gate: &mut Gate) {
    let bound = 1000.0 * 1.0821f64.powi(60);
    let solver = Solver::default();
    let mut worst_leaves = 0u64;
    let mut worst_time = 0.0f64;
    let mut bad = Vec::new();
    for i in 0..20u64 {
        let g = harness::generate(&GenSpec { n: 60, model: Model::Cubic, seed: SEED + i, connected: true }).unwrap();
        let t = Instant::now();
        match solver.solve(&g) {
            Ok(r) => {
                let secs = t.elapsed().as_secs_f64();
                worst_leaves = worst_leaves.max(r.stats.leaves);
                worst_time = worst_time.max(secs);
                if !g.is_maximal_independent(&r.vertices) || r.stats.leaves as f64 > bound || secs >= 5.0 {
                    bad.push(format!("seed {}: leaves {} time {secs:.3}s", SEED + i, r.stats.leaves));
                }
            }
            Err(e) => bad.push(format!("seed {}: {e}", SEED + i)),
        }
    }
    gate.report(
        8,
        "growth at n = 60",
        bad.is_empty(),
        format!(
            "20 cubic instances, max leaves {worst_leaves} (bound {bound:.0}), max time {worst_time:.3}s {}",
            bad.join("; ")
        ),
    );
}

fn criterion_mutation(gate: &mut Gate) {
    let mut cfg = FuzzConfig::girth_stratified(1000, SEED);
    cfg.stop_on_failure = true;
    let mut undetected = Vec::new();
    let mut found = Vec::new();
    for i in 6..=20 {
        let id = format!("R{i}");
        let rep = harness::fuzz(&cfg, &checked(RuleRegistry::standard().without(&id)));
        match rep.failures.first() {
            Some(f) => found.push(format!("{id}:{}@{}", f.kind, f.index)),
            None => undetected.push(id),
        }
    }
    gate.report(
        9,
        "mutation sensitivity",
        undetected.is_empty(),
        format!("detected {}; undetected {undetected:?}", found.join(" ")),
    );
}

fn main() {
    let worker = std::thread::Builder::new().stack_size(256 << 20).spawn(run).unwrap();
    let failed = worker.join().unwrap();
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}

fn run() -> usize {
    let mut gate = Gate { failed: 0 };
    criterion_roots(&mut gate);

    let t = Instant::now();
    let sub = harness::fuzz(&FuzzConfig::subcubic(2000, 4, 24, SEED), &checked(RuleRegistry::standard()));
    let sub_secs = t.elapsed().as_secs_f64();
    criterion_oracle(&mut gate, &sub, sub_secs);
    criterion_named(&mut gate);

    let strat = harness::fuzz(&FuzzConfig::girth_stratified(1000, SEED), &checked(RuleRegistry::standard()));
    if !strat.failures.is_empty() {
        for f in strat.failures.iter().take(10) {
            println!(
                "  stratified failure #{} seed={} {} n={} {}: {}",
                f.index, f.seed, f.model, f.n, f.kind, f.detail
            );
        }
    }
    let reps = [&sub, &strat];
    criterion_properties(&mut gate, &reps);
    criterion_audit(&mut gate, &reps);
    criterion_exhaustive(&mut gate, &reps);
    criterion_growth(&mut gate);
    criterion_mutation(&mut gate);
    gate.failed
}
