//! Seeded instance generators and the differential fuzz loop.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::audit::AuditReport;
use crate::graph::Graph;
use crate::oracle::{self, OracleLimit};
use crate::solver::Solver;
use crate::structure::enumerate_small_cycles;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Model {
    /// Random perfect matching on 3n points, loops and multi-edges rejected.
    Cubic,
    /// Each admissible pair is added with this probability, degree capped at 3.
    Subcubic(f64),
    /// Greedy edge insertion keeping every cycle at least this long.
    Girth(usize),
    /// Uniform cubic graph with at least this girth, by rejection from the
    /// pairing model. Girth up to 6.
    UniformGirth(usize),
    /// Greedy edge insertion never closing a cycle whose length has its bit
    /// set (lengths 3..=8).
    Avoid(u16),
    /// Like `Avoid`, but each new edge goes to a farthest admissible vertex,
    /// so short cycles are few and appear only where forced.
    Spread(u16),
}

impl Model {
    fn forbidden(&self) -> Option<u16> {
        match *self {
            Model::Girth(g) => Some((3..g).fold(0, |m, l| m | 1 << l)),
            Model::Avoid(mask) | Model::Spread(mask) => Some(mask),
            _ => None,
        }
    }
}

/// Bit mask for `Model::Avoid`.
pub fn cycle_mask(lengths: &[usize]) -> u16 {
    lengths.iter().fold(0, |m, &l| m | 1 << l)
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Model::Cubic => write!(f, "cubic"),
            Model::Subcubic(p) => write!(f, "subcubic({p:.2})"),
            Model::Girth(g) => write!(f, "girth>={g}"),
            Model::UniformGirth(g) => write!(f, "uniform-girth>={g}"),
            Model::Avoid(mask) | Model::Spread(mask) => {
                let ls: Vec<String> = (3..=8).filter(|l| mask >> l & 1 == 1).map(|l| l.to_string()).collect();
                let kind = if matches!(self, Model::Avoid(_)) { "avoid" } else { "spread" };
                write!(f, "{kind}{{{}}}", ls.join(","))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GenSpec {
    pub n: usize,
    pub model: Model,
    pub seed: u64,
    pub connected: bool,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("infeasible request: {0}")]
    Infeasible(String),
    #[error("no valid graph after {0} attempts")]
    GaveUp(usize),
}

const ATTEMPTS: usize = 2000;
// girth 6 is accepted roughly once in 700 pairings
const UNIFORM_ATTEMPTS: usize = 200_000;

pub fn generate(spec: &GenSpec) -> Result<Graph, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    if spec.n == 0 {
        return Err(GenError::Infeasible("n must be at least 1".into()));
    }
    match spec.model {
        Model::Cubic => {
            if spec.n % 2 == 1 || spec.n < 4 {
                return Err(GenError::Infeasible(format!("no cubic graph on {} vertices", spec.n)));
            }
            for _ in 0..ATTEMPTS {
                if let Some(g) = pairing(spec.n, &mut rng) {
                    if !spec.connected || g.is_connected() {
                        return Ok(g);
                    }
                }
            }
            Err(GenError::GaveUp(ATTEMPTS))
        }
        Model::UniformGirth(girth) => {
            if spec.n % 2 == 1 || spec.n < 4 || !(3..=6).contains(&girth) {
                return Err(GenError::Infeasible(format!("uniform girth {girth} on {} vertices", spec.n)));
            }
            for _ in 0..UNIFORM_ATTEMPTS {
                if let Some(g) = pairing(spec.n, &mut rng) {
                    if (!spec.connected || g.is_connected()) && enumerate_small_cycles(&g, girth - 1).cycles.is_empty()
                    {
                        return Ok(g);
                    }
                }
            }
            Err(GenError::GaveUp(UNIFORM_ATTEMPTS))
        }
        Model::Subcubic(p) => {
            if !(0.0..=1.0).contains(&p) {
                return Err(GenError::Infeasible(format!("edge probability {p} outside [0, 1]")));
            }
            Ok(subcubic(spec.n, p, spec.connected, &mut rng))
        }
        Model::Girth(girth) if !(3..=9).contains(&girth) => {
            Err(GenError::Infeasible(format!("min girth {girth} outside 3..=9")))
        }
        Model::Avoid(mask) | Model::Spread(mask) if mask & !0x1f8 != 0 => {
            Err(GenError::Infeasible("only cycle lengths 3..=8 can be avoided".into()))
        }
        m => avoiding(spec.n, m.forbidden().unwrap(), matches!(m, Model::Spread(_)), spec.connected, &mut rng),
    }
}

fn pairing(n: usize, rng: &mut ChaCha8Rng) -> Option<Graph> {
    let mut pts: Vec<usize> = (0..3 * n).collect();
    pts.shuffle(rng);
    let mut g = Graph::new(n);
    for pair in pts.chunks(2) {
        let (a, b) = (pair[0] / 3, pair[1] / 3);
        if a == b || g.has_edge(a, b) {
            return None;
        }
        g.add_edge(a, b).unwrap();
    }
    Some(g)
}

fn subcubic(n: usize, p: f64, connected: bool, rng: &mut ChaCha8Rng) -> Graph {
    let mut g = Graph::new(n);
    if connected {
        // random tree with maximum degree 3
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        for i in 1..n {
            let open: Vec<usize> = order[..i].iter().copied().filter(|&v| g.degree(v) < 3).collect();
            let parent = open[rng.gen_range(0..open.len())];
            g.add_edge(parent, order[i]).unwrap();
        }
    }
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    pairs.shuffle(rng);
    for (a, b) in pairs {
        if g.degree(a) < 3 && g.degree(b) < 3 && !g.has_edge(a, b) && rng.gen_bool(p) {
            g.add_edge(a, b).unwrap();
        }
    }
    g
}

// marks every b such that some simple path a..b would close a forbidden cycle
fn closing(g: &Graph, a: usize, mask: u16, hit: &mut [bool], on: &mut [bool], len: usize) {
    let top = (16 - mask.leading_zeros() as usize).saturating_sub(1);
    on[a] = true;
    for &w in g.neighbors(a) {
        if on[w] {
            continue;
        }
        // path of len + 1 edges, cycle of len + 2
        if mask >> (len + 2) & 1 == 1 {
            hit[w] = true;
        }
        if len + 3 <= top {
            closing(g, w, mask, hit, on, len + 1);
        }
    }
    on[a] = false;
}

fn distances(g: &Graph, s: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.id_bound()];
    dist[s] = 0;
    let mut q = std::collections::VecDeque::from([s]);
    while let Some(v) = q.pop_front() {
        for &w in g.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                q.push_back(w);
            }
        }
    }
    dist
}

fn avoiding(n: usize, mask: u16, spread: bool, connected: bool, rng: &mut ChaCha8Rng) -> Result<Graph, GenError> {
    let mut best: Option<Graph> = None;
    let top = (16 - mask.leading_zeros() as usize).saturating_sub(1);
    for _ in 0..ATTEMPTS {
        let mut g = Graph::new(n);
        let mut open: Vec<usize> = (0..n).collect();
        let mut on = vec![false; n];
        while !open.is_empty() {
            let a = open[rng.gen_range(0..open.len())];
            let mut hit = vec![false; n];
            hit[a] = true;
            for &w in g.neighbors(a) {
                hit[w] = true;
            }
            if mask != 0 {
                closing(&g, a, mask, &mut hit, &mut on, 0);
            }
            let mut cands: Vec<usize> = open.iter().copied().filter(|&b| !hit[b]).collect();
            if spread && !cands.is_empty() {
                let dist = distances(&g, a);
                let far = cands.iter().map(|&b| dist[b]).max().unwrap();
                cands.retain(|&b| dist[b] == far);
            }
            if cands.is_empty() {
                open.retain(|&v| v != a);
                continue;
            }
            let b = cands[rng.gen_range(0..cands.len())];
            g.add_edge(a, b).unwrap();
            open.retain(|&v| g.degree(v) < 3);
        }
        if connected && !g.is_connected() {
            continue;
        }
        debug_assert!(enumerate_small_cycles(&g, top).cycles.iter().all(|c| mask >> c.len() & 1 == 0));
        if g.min_degree() == 3 {
            return Ok(g);
        }
        if best.as_ref().is_none_or(|b| g.m() > b.m()) {
            best = Some(g);
        }
    }
    best.ok_or(GenError::GaveUp(ATTEMPTS))
}

/// One block of the fuzz corpus.
#[derive(Clone, Debug, Serialize)]
pub struct Stratum {
    pub model: Model,
    pub min_n: usize,
    pub max_n: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct FuzzConfig {
    pub count: usize,
    pub seed: u64,
    /// Instance i is drawn from stratum i mod len.
    pub strata: Vec<Stratum>,
    /// Subcubic strata draw p uniformly from this range instead of their own.
    pub subcubic_p: Option<(f64, f64)>,
    pub oracle_max_n: usize,
    /// End the run at the first failing instance.
    pub stop_on_failure: bool,
}

impl FuzzConfig {
    /// Connected subcubic instances with n in the range, p varied per instance.
    pub fn subcubic(count: usize, min_n: usize, max_n: usize, seed: u64) -> Self {
        FuzzConfig {
            count,
            seed,
            strata: vec![Stratum { model: Model::Subcubic(0.5), min_n, max_n }],
            subcubic_p: Some((0.05, 0.7)),
            oracle_max_n: OracleLimit::default().max_n,
            stop_on_failure: false,
        }
    }

    /// Mix of subcubic, cubic and girth-constrained cubic instances, sized
    /// so that every branching rule fires somewhere in a run of 1000.
    pub fn girth_stratified(count: usize, seed: u64) -> Self {
        let st = |model, min_n, max_n| Stratum { model, min_n, max_n };
        let m = cycle_mask;
        FuzzConfig {
            count,
            seed,
            strata: vec![
                st(Model::Subcubic(0.5), 8, 24),
                st(Model::Cubic, 12, 40),
                st(Model::Girth(5), 20, 40),
                st(Model::Avoid(m(&[3, 4, 7])), 16, 30),
                st(Model::Girth(6), 20, 40),
                st(Model::Spread(m(&[3, 4])), 40, 64),
                st(Model::Spread(m(&[3, 4, 5])), 40, 64),
                st(Model::Avoid(m(&[3, 4, 6])), 20, 40),
                st(Model::Spread(m(&[3, 4, 6, 7])), 20, 40),
                st(Model::Spread(m(&[3, 4, 5, 6])), 30, 64),
                st(Model::Spread(m(&[3, 4])), 50, 64),
                st(Model::Spread(m(&[3, 4, 5])), 50, 64),
            ],
            subcubic_p: Some((0.05, 0.7)),
            oracle_max_n: oracle::BITMASK_CEILING,
            stop_on_failure: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FuzzFailure {
    pub index: usize,
    pub seed: u64,
    pub model: String,
    pub n: usize,
    pub kind: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct FuzzReport {
    pub instances: usize,
    pub oracle_checked: usize,
    pub mismatches: usize,
    pub faults: usize,
    pub audit_violations: usize,
    pub eta_increases: u64,
    pub fine_to_bottleneck: u64,
    pub bottleneck_stalls: u64,
    pub max_leaves: u64,
    pub rule_histogram: BTreeMap<String, u64>,
    /// Merged audit of every solved instance.
    pub audit: AuditReport,
    pub failures: Vec<FuzzFailure>,
}

impl FuzzReport {
    pub fn clean(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Deterministic instance list: (index, seed, spec).
pub fn corpus(cfg: &FuzzConfig) -> Vec<GenSpec> {
    let mut master = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.count)
        .map(|i| {
            let st = &cfg.strata[i % cfg.strata.len()];
            let seed = master.next_u64();
            let mut n = master.gen_range(st.min_n..=st.max_n);
            let model = match st.model {
                Model::Subcubic(p) => {
                    let p = cfg.subcubic_p.map_or(p, |(lo, hi)| master.gen_range(lo..=hi));
                    Model::Subcubic(p)
                }
                m => {
                    if n % 2 == 1 {
                        n = if n < st.max_n { n + 1 } else { n - 1 };
                    }
                    m
                }
            };
            GenSpec { n, model, seed, connected: true }
        })
        .collect()
}

pub fn fuzz(cfg: &FuzzConfig, solver: &Solver) -> FuzzReport {
    let mut rep = FuzzReport::default();
    let limit = OracleLimit { max_n: cfg.oracle_max_n };
    for (index, spec) in corpus(cfg).into_iter().enumerate() {
        if cfg.stop_on_failure && !rep.failures.is_empty() {
            break;
        }
        let fail = |kind: &str, detail: String| FuzzFailure {
            index,
            seed: spec.seed,
            model: spec.model.to_string(),
            n: spec.n,
            kind: kind.to_string(),
            detail,
        };
        let g = match generate(&spec) {
            Ok(g) => g,
            Err(e) => {
                rep.failures.push(fail("generator", e.to_string()));
                continue;
            }
        };
        rep.instances += 1;
        let res = match solver.solve(&g) {
            Ok(r) => r,
            Err(e) => {
                rep.faults += 1;
                rep.failures.push(fail("fault", e.to_string()));
                continue;
            }
        };
        let st = &res.stats;
        rep.eta_increases += st.eta_increases;
        rep.fine_to_bottleneck += st.fine_to_bottleneck;
        rep.bottleneck_stalls += st.bottleneck_stalls;
        rep.max_leaves = rep.max_leaves.max(st.leaves);
        for (k, v) in &st.rule_histogram {
            *rep.rule_histogram.entry(k.clone()).or_default() += v;
        }
        if let Some(e) = g.violating_edge(&res.vertices) {
            rep.failures.push(fail("dependent", format!("edge {e:?} inside the returned set")));
        } else if !g.is_maximal_independent(&res.vertices) {
            rep.failures.push(fail("not-maximal", format!("size {}", res.size)));
        }
        if let Ok(best) = oracle::brute_mis_with(&g, limit) {
            rep.oracle_checked += 1;
            if best.len() != res.size {
                rep.mismatches += 1;
                rep.failures.push(fail("mismatch", format!("solver {} oracle {}", res.size, best.len())));
            }
        }
        if let Some(a) = res.audit {
            if !a.violations.is_empty() {
                rep.audit_violations += a.violation_count();
                let first = &a.violations[0];
                let detail = format!("{}{}: {}", first.rule, first.sub_case, first.violations.join("; "));
                rep.failures.push(fail("audit", detail));
            }
            rep.audit.merge(a);
        }
        if st.eta_increases > 0 || st.bottleneck_stalls > 0 {
            rep.failures
                .push(fail("property", format!("{} eta increases, {} stalls", st.eta_increases, st.bottleneck_stalls)));
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, model: Model, seed: u64) -> GenSpec {
        GenSpec { n, model, seed, connected: true }
    }

    #[test]
    fn cubic_has_handshake_count() {
        let g = generate(&spec(10, Model::Cubic, 7)).unwrap();
        assert_eq!(g.m(), 15);
        assert!(g.vertices().all(|v| g.degree(v) == 3));
        assert!(g.is_connected());
        assert!(generate(&spec(9, Model::Cubic, 7)).is_err());
    }

    #[test]
    fn subcubic_single_vertex() {
        let g = generate(&spec(1, Model::Subcubic(0.5), 1)).unwrap();
        assert_eq!((g.n(), g.m()), (1, 0));
    }

    #[test]
    fn girth_five_on_ten_vertices() {
        let g = generate(&spec(10, Model::Girth(5), 3)).unwrap();
        assert!(g.max_degree() <= 3);
        assert!(enumerate_small_cycles(&g, 4).cycles.is_empty());
    }

    #[test]
    fn same_seed_same_graph() {
        for m in [Model::Cubic, Model::Subcubic(0.3), Model::Girth(6)] {
            let a = generate(&spec(16, m, 99)).unwrap();
            let b = generate(&spec(16, m, 99)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn empty_fuzz() {
        let rep = fuzz(&FuzzConfig::subcubic(0, 4, 10, 1), &Solver::default());
        assert_eq!(rep.instances, 0);
        assert!(rep.clean());
    }

    #[test]
    fn small_fuzz_is_clean() {
        let rep = fuzz(&FuzzConfig::subcubic(60, 4, 18, 5), &Solver::default());
        assert_eq!(rep.oracle_checked, 60);
        assert!(rep.clean(), "{:?}", rep.failures);
    }
}
