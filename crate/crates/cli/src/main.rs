use std::io::Read;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{ArgGroup, Parser, Subcommand};
use serde_json::json;

use mis3::audit::{recurrence_root, worst_root, FORM_CATALOG};
use mis3::dimacs;
use mis3::graph::{Graph, VertexId};
use mis3::harness::{self, FuzzConfig, GenSpec, Model};
use mis3::oracle::{self, OracleLimit};
use mis3::rules::RuleRegistry;
use mis3::solver::{SolveError, Solver, SolverConfig};

/// Exact maximum independent set for graphs of maximum degree 3.
#[derive(Parser)]
#[command(name = "mis3", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve a DIMACS graph ("-" reads stdin).
    Solve {
        file: String,
        /// Check every branching against its claimed measure drop.
        #[arg(long)]
        audit: bool,
        #[arg(long)]
        stats: bool,
        #[arg(long)]
        json: bool,
        /// Drop a branching rule by id (R1..R20) or name. Repeatable.
        #[arg(long, value_name = "RULE")]
        disable: Vec<String>,
    },
    /// Check that a vertex set is independent.
    Verify {
        file: String,
        /// Comma-separated 1-based ids.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        set: Vec<usize>,
        /// Also require maximum cardinality (brute force).
        #[arg(long)]
        optimal: bool,
    },
    /// Write a random graph in DIMACS format.
    #[command(group(ArgGroup::new("model").required(true).args(["cubic", "subcubic"])))]
    Gen {
        #[arg(long)]
        cubic: bool,
        /// Edge probability.
        #[arg(long, value_name = "P")]
        subcubic: Option<f64>,
        #[arg(long, short = 'n')]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Greedy construction without cycles shorter than this.
        #[arg(long, value_name = "G")]
        min_girth: Option<usize>,
        /// Forbid cycles of these lengths (3..=8), e.g. 3,4,6.
        #[arg(long, value_delimiter = ',', value_name = "LENGTHS")]
        avoid: Vec<usize>,
        /// Join each vertex to a farthest admissible partner.
        #[arg(long)]
        spread: bool,
        /// Allow more than one component.
        #[arg(long)]
        disconnected: bool,
    },
    /// Differential run against brute force, with audit and property checks.
    Fuzz {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 4)]
        min_n: usize,
        #[arg(long, default_value_t = 24)]
        max_n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Mix cubic and girth-constrained instances in (ignores the n range).
        #[arg(long)]
        stratified: bool,
        #[arg(long, value_name = "RULE")]
        disable: Vec<String>,
        /// Stop at the first failing instance.
        #[arg(long)]
        stop_early: bool,
        #[arg(long)]
        json: bool,
    },
    /// Roots of branching recurrences.
    Roots {
        /// A single form, e.g. 16,24,16,16.
        #[arg(long, value_delimiter = ',')]
        form: Option<Vec<u32>>,
    },
}

enum Failure {
    Verify(String),
    Usage(anyhow::Error),
    Fault(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // the recursion depth grows with n
    let worker = std::thread::Builder::new().stack_size(512 << 20).spawn(move || run(cli)).expect("spawn worker");
    match worker.join().expect("worker panicked") {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Fault(e)) => {
            eprintln!("internal fault: {e:#}");
            ExitCode::from(3)
        }
    }
}

fn read_graph(path: &str) -> anyhow::Result<Graph> {
    let text = if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?
    };
    dimacs::parse(&text, Some(3)).with_context(|| format!("parsing {path}"))
}

fn registry(disable: &[String]) -> anyhow::Result<RuleRegistry> {
    let mut reg = RuleRegistry::standard();
    for key in disable {
        if !reg.disable(key) {
            return Err(anyhow!("unknown rule `{key}`"));
        }
    }
    Ok(reg)
}

fn one_based(set: &[VertexId]) -> Vec<usize> {
    set.iter().map(|v| v + 1).collect()
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Solve { file, audit, stats, json, disable } => {
            let g = read_graph(&file)?;
            let config = SolverConfig { audit, track_properties: stats || audit, ..Default::default() };
            let solver = Solver::new(registry(&disable)?, config);
            let res = solver.solve(&g).map_err(|e: SolveError| Failure::Fault(e.into()))?;
            if !g.is_independent(&res.vertices) {
                return Err(Failure::Fault(anyhow!("returned set is not independent")));
            }
            let ids = one_based(&res.vertices);
            if json {
                let out = json!({
                    "size": res.size,
                    "vertices": ids,
                    "stats": res.stats,
                    "audit": res.audit,
                });
                println!("{}", serde_json::to_string_pretty(&out).unwrap());
            } else {
                println!("size {}", res.size);
                let list: Vec<String> = ids.iter().map(ToString::to_string).collect();
                println!("vertices {}", list.join(" "));
                if stats {
                    let s = &res.stats;
                    println!("recursion_nodes {}", s.recursion_nodes);
                    println!("leaves {}", s.leaves);
                    println!("branchings {}", s.branchings);
                    println!("eta_initial {}", s.eta_initial);
                    println!("eta_increases {}", s.eta_increases);
                    println!("fine_to_bottleneck {} (stalled {})", s.fine_to_bottleneck, s.bottleneck_stalls);
                    println!("wall_time {:.6}s", s.wall_time);
                    for (k, v) in &s.rule_histogram {
                        println!("rule {k} {v}");
                    }
                    for (k, v) in &s.reductions {
                        println!("reduction {k} {v}");
                    }
                }
                if let Some(a) = &res.audit {
                    println!("audit branchings {} violations {}", a.branchings, a.violation_count());
                    for v in &a.violations {
                        println!("  {}{}: {}", v.rule, v.sub_case, v.violations.join("; "));
                    }
                }
            }
            Ok(())
        }
        Cmd::Verify { file, set, optimal } => {
            let g = read_graph(&file)?;
            let mut ids = Vec::with_capacity(set.len());
            for v in set {
                if v == 0 || v > g.n() {
                    return Err(Failure::Usage(anyhow!("vertex {v} out of range 1..={}", g.n())));
                }
                ids.push(v - 1);
            }
            ids.sort_unstable();
            ids.dedup();
            if let Some((a, b)) = g.violating_edge(&ids) {
                return Err(Failure::Verify(format!("not independent: edge {} {}", a + 1, b + 1)));
            }
            if optimal {
                match oracle::brute_mis_with(&g, OracleLimit::default()) {
                    Ok(best) if best.len() != ids.len() => {
                        return Err(Failure::Verify(format!(
                            "independent but not maximum: size {} < {}",
                            ids.len(),
                            best.len()
                        )));
                    }
                    Ok(_) => {}
                    Err(e) => eprintln!("optimality not checked: {e}"),
                }
            }
            println!("ok size {}", ids.len());
            Ok(())
        }
        Cmd::Gen { cubic, subcubic, n, seed, min_girth, avoid, spread, disconnected } => {
            let shaped = min_girth.is_some() || !avoid.is_empty() || spread;
            let model = match (cubic, subcubic) {
                (_, Some(_)) if shaped => {
                    return Err(Failure::Usage(anyhow!("cycle constraints build cubic-style graphs; drop --subcubic")))
                }
                (false, Some(p)) => Model::Subcubic(p),
                (true, _) if !shaped => Model::Cubic,
                (true, _) if avoid.is_empty() && !spread => Model::Girth(min_girth.unwrap()),
                (true, _) => {
                    if avoid.iter().chain(&min_girth).any(|&l| !(3..=9).contains(&l)) {
                        return Err(Failure::Usage(anyhow!("cycle lengths must lie in 3..=8")));
                    }
                    let mut lengths = avoid.clone();
                    lengths.extend(3..min_girth.unwrap_or(3));
                    let mask = harness::cycle_mask(&lengths);
                    if spread {
                        Model::Spread(mask)
                    } else {
                        Model::Avoid(mask)
                    }
                }
                (false, None) => unreachable!("clap requires a model"),
            };
            let g = harness::generate(&GenSpec { n, model, seed, connected: !disconnected })
                .map_err(|e| Failure::Usage(e.into()))?;
            print!("c {model} n={n} seed={seed}\n{}", dimacs::write(&g));
            Ok(())
        }
        Cmd::Fuzz { count, min_n, max_n, seed, stratified, disable, stop_early, json } => {
            if min_n == 0 || min_n > max_n {
                return Err(Failure::Usage(anyhow!("need 1 <= min-n <= max-n")));
            }
            let mut cfg = if stratified {
                FuzzConfig::girth_stratified(count, seed)
            } else {
                FuzzConfig::subcubic(count, min_n, max_n, seed)
            };
            cfg.stop_on_failure = stop_early;
            let config = SolverConfig { audit: true, track_properties: true, ..Default::default() };
            let rep = harness::fuzz(&cfg, &Solver::new(registry(&disable)?, config));
            if json {
                println!("{}", serde_json::to_string_pretty(&rep).unwrap());
            } else {
                println!(
                    "instances {} oracle_checked {} mismatches {} faults {} audit_violations {}",
                    rep.instances, rep.oracle_checked, rep.mismatches, rep.faults, rep.audit_violations
                );
                println!(
                    "eta_increases {} fine_to_bottleneck {} stalls {} max_leaves {}",
                    rep.eta_increases, rep.fine_to_bottleneck, rep.bottleneck_stalls, rep.max_leaves
                );
                for (k, v) in &rep.rule_histogram {
                    println!("rule {k} {v}");
                }
                for f in &rep.failures {
                    println!("FAIL #{} seed={} {} n={} {}: {}", f.index, f.seed, f.model, f.n, f.kind, f.detail);
                }
            }
            if rep.clean() {
                Ok(())
            } else {
                Err(Failure::Verify(format!("{} failures", rep.failures.len())))
            }
        }
        Cmd::Roots { form } => {
            match form {
                Some(f) => {
                    let r = recurrence_root(&f).map_err(|e| Failure::Usage(e.into()))?;
                    println!("{r:.6}");
                }
                None => {
                    for f in FORM_CATALOG {
                        let r = recurrence_root(f).expect("catalog forms are positive");
                        println!("{:<24} {r:.6}", format!("{f:?}"));
                    }
                    let (f, r) = worst_root(FORM_CATALOG).expect("non-empty catalog");
                    println!("worst {f:?} {r:.6}");
                }
            }
            Ok(())
        }
    }
}
