//! The recursive search: base cases, components, reduction, branching.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::audit::{self, AuditReport};
use crate::graph::{Graph, VertexId};
use crate::oracle;
use crate::reducer::{self, GammaOptions, ReduceError};
use crate::rules::{Branch, RuleRegistry};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("no rule applies to a reduced graph with {n} vertices, {m} edges, eta {eta}")]
    NoRuleApplies { n: usize, m: usize, eta: usize },
    #[error("rule {rule} tried to include a dependent set {set:?}")]
    DependentInclude { rule: String, set: Vec<VertexId> },
    #[error(transparent)]
    Reduce(#[from] ReduceError),
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SolveStats {
    pub recursion_nodes: u64,
    pub leaves: u64,
    pub branchings: u64,
    pub rule_histogram: BTreeMap<String, u64>,
    pub reductions: BTreeMap<String, u64>,
    pub eta_initial: usize,
    /// Reduction steps that raised η.
    pub eta_increases: u64,
    /// Reduction steps from a fine to a bottleneck graph, and how many of
    /// those failed to lower η.
    pub fine_to_bottleneck: u64,
    pub bottleneck_stalls: u64,
    pub audit_violations: u64,
    /// Seconds.
    pub wall_time: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MisResult {
    pub vertices: Vec<VertexId>,
    pub size: usize,
    pub stats: SolveStats,
    pub audit: Option<AuditReport>,
}

#[derive(Clone, Copy, Debug)]
pub struct SolverConfig {
    /// Check every branching against its claimed form.
    pub audit: bool,
    /// Classify graphs around each reduction step.
    pub track_properties: bool,
    /// Graphs up to this size are solved by exhaustive search.
    pub base_case_max: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { audit: false, track_properties: false, base_case_max: 10 }
    }
}

#[derive(Default)]
pub struct Solver {
    pub registry: RuleRegistry,
    pub config: SolverConfig,
}

struct Run {
    stats: SolveStats,
    audit: Option<AuditReport>,
}

/// Solves with the standard rule table and no auditing.
pub fn find_mis(g: &Graph) -> Result<MisResult, SolveError> {
    Solver::default().solve(g)
}

impl Solver {
    pub fn new(registry: RuleRegistry, config: SolverConfig) -> Self {
        Solver { registry, config }
    }

    pub fn solve(&self, g: &Graph) -> Result<MisResult, SolveError> {
        let start = Instant::now();
        let mut run = Run {
            stats: SolveStats { eta_initial: g.eta(), ..Default::default() },
            audit: self.config.audit.then(AuditReport::default),
        };
        let set = self.rec(g.clone(), &mut run)?;
        let mut stats = run.stats;
        stats.wall_time = start.elapsed().as_secs_f64();
        if let Some(a) = &run.audit {
            stats.audit_violations = a.violation_count() as u64;
        }
        let vertices: Vec<VertexId> = set.into_iter().collect();
        Ok(MisResult { size: vertices.len(), vertices, stats, audit: run.audit })
    }

    fn rec(&self, g: Graph, run: &mut Run) -> Result<BTreeSet<VertexId>, SolveError> {
        run.stats.recursion_nodes += 1;
        if g.n() <= self.config.base_case_max {
            run.stats.leaves += 1;
            return Ok(exhaustive(&g));
        }
        if g.max_degree() <= 2 {
            run.stats.leaves += 1;
            return Ok(oracle::mis_degree2(&g).expect("max degree checked").into_iter().collect());
        }
        let comps = g.connected_components();
        if comps.len() > 1 {
            let mut out = BTreeSet::new();
            for c in comps {
                out.extend(self.rec(g.induced(&c), run)?);
            }
            return Ok(out);
        }

        let opts = GammaOptions { track_fineness: self.config.track_properties };
        let (reduced, log) = reducer::gamma_with(&g, opts)?;
        if !log.is_empty() {
            for r in &log.steps {
                *run.stats.reductions.entry(r.step.name().to_string()).or_default() += 1;
            }
            run.stats.eta_increases += log.eta_increases() as u64;
            run.stats.fine_to_bottleneck += log.fine_to_bottleneck() as u64;
            run.stats.bottleneck_stalls += log.bottleneck_stalls() as u64;
            let mut set = self.rec(reduced, run)?;
            log.lift(&mut set)?;
            return Ok(set);
        }

        let firing =
            self.registry.first_firing(&g).ok_or(SolveError::NoRuleApplies { n: g.n(), m: g.m(), eta: g.eta() })?;
        run.stats.branchings += 1;
        *run.stats.rule_histogram.entry(firing.label()).or_default() += 1;

        let mut children = Vec::with_capacity(firing.branches.len());
        for b in &firing.branches {
            if let Branch::Include(a) = b {
                if !g.is_independent(a) {
                    return Err(SolveError::DependentInclude { rule: firing.label(), set: a.clone() });
                }
            }
            children.push(b.child(&g));
        }
        if let Some(report) = run.audit.as_mut() {
            let mut reduced = Vec::with_capacity(children.len());
            for c in &children {
                reduced.push(reducer::gamma(c)?.0);
            }
            report.record(audit::audit_branch(&g, &firing, &reduced));
        }

        let mut best: Option<BTreeSet<VertexId>> = None;
        for (b, child) in firing.branches.iter().zip(children) {
            let mut s = self.rec(child, run)?;
            s.extend(b.included().iter().copied());
            // strict comparison keeps the earliest branch on ties
            if best.as_ref().is_none_or(|cur| s.len() > cur.len()) {
                best = Some(s);
            }
        }
        Ok(best.unwrap_or_default())
    }
}

/// Exhaustive search for small graphs: branch on a highest-degree vertex.
fn exhaustive(g: &Graph) -> BTreeSet<VertexId> {
    let ids = g.vertex_list();
    let nbr: Vec<u64> =
        ids.iter().map(|&v| g.neighbors(v).iter().fold(0u64, |m, w| m | 1 << ids.binary_search(w).unwrap())).collect();
    let all = if ids.len() == 64 { u64::MAX } else { (1u64 << ids.len()) - 1 };
    let best = best_subset(&nbr, all);
    (0..ids.len()).filter(|&i| best >> i & 1 == 1).map(|i| ids[i]).collect()
}

fn best_subset(nbr: &[u64], rest: u64) -> u64 {
    if rest == 0 {
        return 0;
    }
    let mut pick = rest.trailing_zeros() as usize;
    let mut deg = (nbr[pick] & rest).count_ones();
    let mut r = rest;
    while r != 0 {
        let i = r.trailing_zeros() as usize;
        r &= r - 1;
        let d = (nbr[i] & rest).count_ones();
        if d > deg {
            pick = i;
            deg = d;
        }
    }
    let with = 1 << pick | best_subset(nbr, rest & !(nbr[pick] | 1 << pick));
    if deg == 0 {
        return with;
    }
    let without = best_subset(nbr, rest & !(1 << pick));
    if without.count_ones() > with.count_ones() {
        without
    } else {
        with
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::*;
    use crate::oracle::brute_mis;

    #[test]
    fn exhaustive_matches_oracle() {
        for g in [petersen(), cycle(7), complete(4), k33(), prism(), cube(), Graph::new(0)] {
            let s: Vec<VertexId> = exhaustive(&g).into_iter().collect();
            assert!(g.is_independent(&s));
            assert_eq!(s.len(), brute_mis(&g).unwrap().len());
        }
    }

    #[test]
    fn named_sizes() {
        for (g, k) in [(petersen(), 4), (k33(), 3), (Graph::new(0), 0), (dodecahedron(), 8), (heawood(), 7)] {
            let r = find_mis(&g).unwrap();
            assert_eq!(r.size, k);
            assert!(g.is_independent(&r.vertices));
        }
    }

    #[test]
    fn larger_named_graphs_with_audit() {
        let s = Solver::new(
            RuleRegistry::standard(),
            SolverConfig { audit: true, track_properties: true, base_case_max: 10 },
        );
        for g in [dodecahedron(), heawood(), mcgee(), tutte_coxeter()] {
            let r = s.solve(&g).unwrap();
            assert!(g.is_maximal_independent(&r.vertices));
            let a = r.audit.unwrap();
            assert!(a.violations.is_empty(), "{:#?}", a.violations);
            assert_eq!(r.stats.eta_increases, 0);
            assert_eq!(r.stats.bottleneck_stalls, 0);
            assert!(r.stats.leaves <= r.stats.recursion_nodes);
            assert_eq!(r.stats.rule_histogram.values().sum::<u64>(), r.stats.branchings);
        }
    }

    #[test]
    fn empty_registry_faults() {
        let s = Solver::new(RuleRegistry::empty(), SolverConfig::default());
        assert!(matches!(s.solve(&dodecahedron()), Err(SolveError::NoRuleApplies { .. })));
        assert_eq!(s.solve(&cycle(5)).unwrap().size, 2);
    }

    #[test]
    fn deterministic() {
        let a = find_mis(&mcgee()).unwrap();
        let b = find_mis(&mcgee()).unwrap();
        assert_eq!(a.vertices, b.vertices);
        assert_eq!(a.stats.rule_histogram, b.stats.rule_histogram);
    }
}
