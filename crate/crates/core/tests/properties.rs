use std::collections::BTreeSet;

use proptest::prelude::*;

use mis3::audit::recurrence_root;
use mis3::dimacs;
use mis3::graph::Graph;
use mis3::harness::{cycle_mask, generate, GenSpec, Model};
use mis3::oracle::brute_mis;
use mis3::reducer;
use mis3::solver::{find_mis, Solver, SolverConfig};
use mis3::structure::enumerate_small_cycles;

// Edge list filtered down to a simple graph of maximum degree 3.
fn subcubic(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n), 0..2 * n).prop_map(move |pairs| {
            let mut g = Graph::new(n);
            for (a, b) in pairs {
                if a != b && !g.has_edge(a, b) && g.degree(a) < 3 && g.degree(b) < 3 {
                    g.add_edge(a, b).unwrap();
                }
            }
            g
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn solver_returns_a_maximum_independent_set(g in subcubic(22)) {
        let r = find_mis(&g).unwrap();
        prop_assert!(g.is_independent(&r.vertices));
        prop_assert_eq!(r.size, r.vertices.len());
        prop_assert_eq!(r.size, brute_mis(&g).unwrap().len());
    }

    #[test]
    fn stats_are_consistent(g in subcubic(22)) {
        let s = Solver::new(Default::default(), SolverConfig { audit: true, track_properties: true, ..Default::default() });
        let r = s.solve(&g).unwrap();
        prop_assert!(r.stats.leaves <= r.stats.recursion_nodes);
        prop_assert_eq!(r.stats.rule_histogram.values().sum::<u64>(), r.stats.branchings);
        prop_assert_eq!(r.stats.eta_initial, g.eta());
        prop_assert_eq!(r.stats.eta_increases, 0);
        prop_assert_eq!(r.stats.bottleneck_stalls, 0);
        prop_assert_eq!(r.audit.unwrap().violation_count(), 0);
    }

    #[test]
    fn gamma_lift_preserves_optimality(g in subcubic(20)) {
        let (h, log) = reducer::gamma(&g).unwrap();
        h.check_invariants().unwrap();
        prop_assert!(h.eta() <= g.eta());
        let mut set: BTreeSet<usize> = brute_mis(&h).unwrap().into_iter().collect();
        log.lift(&mut set).unwrap();
        let set: Vec<usize> = set.into_iter().collect();
        prop_assert!(g.is_independent(&set));
        prop_assert_eq!(set.len(), brute_mis(&g).unwrap().len());
    }

    #[test]
    fn eta_is_even_without_low_degrees(g in subcubic(20)) {
        let (h, _) = reducer::gamma(&g).unwrap();
        if h.vertices().all(|v| h.degree(v) >= 2) {
            prop_assert_eq!(h.eta() % 2, 0);
        }
    }

    #[test]
    fn dimacs_round_trip(g in subcubic(30)) {
        let back = dimacs::parse(&dimacs::write(&g), Some(3)).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn deterministic(g in subcubic(22)) {
        prop_assert_eq!(find_mis(&g).unwrap().vertices, find_mis(&g).unwrap().vertices);
    }

    #[test]
    fn roots_are_monotone(form in prop::collection::vec(1u32..30, 1..6), i in 0usize..6, extra in 1u32..30) {
        let base = recurrence_root(&form).unwrap();
        prop_assert!(base >= 1.0);
        let mut bigger = form.clone();
        let i = i % bigger.len();
        bigger[i] += 1;
        if form.len() > 1 {
            prop_assert!(recurrence_root(&bigger).unwrap() < base);
        }
        let mut longer = form.clone();
        longer.push(extra);
        prop_assert!(recurrence_root(&longer).unwrap() > base);
    }

    #[test]
    fn generated_graphs_are_valid(seed in any::<u64>(), half in 2usize..20, pick in 0usize..5) {
        let n = 2 * half;
        let model = [
            Model::Cubic,
            Model::Subcubic(0.3),
            Model::Girth(5),
            Model::Avoid(cycle_mask(&[3, 4, 6])),
            Model::Spread(cycle_mask(&[3, 4])),
        ][pick];
        let g = generate(&GenSpec { n, model, seed, connected: true }).unwrap();
        g.check_invariants().unwrap();
        prop_assert_eq!(g.n(), n);
        prop_assert!(g.max_degree() <= 3);
        prop_assert!(g.is_connected());
        if model == Model::Cubic {
            prop_assert_eq!(g.min_degree(), 3);
        }
        let forbidden = match model {
            Model::Girth(k) => (3..k).collect(),
            Model::Avoid(_) => vec![3, 4, 6],
            Model::Spread(_) => vec![3, 4],
            _ => vec![],
        };
        let cycles = enumerate_small_cycles(&g, 8);
        for len in forbidden {
            prop_assert_eq!(cycles.count(len), 0);
        }
    }
}
