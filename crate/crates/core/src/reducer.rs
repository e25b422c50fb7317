//! The reduction pass γ and the log needed to lift a solution back.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, GraphError, VertexId};
use crate::oracle;
use crate::structure::{self, FunnelKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReduceError {
    #[error("degree-2 fold on {v}: neighbours {v1} and {v2} are adjacent")]
    AdjacentFoldNeighbours { v: VertexId, v1: VertexId, v2: VertexId },
    #[error("cannot lift fold of {a:?}/{b:?}: both sides blocked")]
    FoldBlocked { a: Vec<VertexId>, b: Vec<VertexId> },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FoldKind {
    ShortFunnel,
    Desk,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ReconstructionStep {
    Isolated {
        v: VertexId,
    },
    SmallComponent {
        vertices: Vec<VertexId>,
        chosen: Vec<VertexId>,
    },
    Dominated {
        removed: VertexId,
        by: VertexId,
    },
    Degree2Fold {
        v: VertexId,
        v1: VertexId,
        v2: VertexId,
        merged: VertexId,
    },
    Roof {
        removed: VertexId,
    },
    AltFold {
        kind: FoldKind,
        a: Vec<VertexId>,
        b: Vec<VertexId>,
        removed: Vec<VertexId>,
        // parent edges incident to A ∪ B
        snapshot: Vec<(VertexId, VertexId)>,
    },
}

impl ReconstructionStep {
    pub fn name(&self) -> &'static str {
        match self {
            ReconstructionStep::Isolated { .. } => "isolated",
            ReconstructionStep::SmallComponent { .. } => "degree2-component",
            ReconstructionStep::Dominated { .. } => "dominated",
            ReconstructionStep::Degree2Fold { .. } => "degree2-fold",
            ReconstructionStep::Roof { .. } => "roof",
            ReconstructionStep::AltFold { kind: FoldKind::ShortFunnel, .. } => "short-funnel",
            ReconstructionStep::AltFold { kind: FoldKind::Desk, .. } => "desk",
        }
    }

    /// Maps an MIS of the reduced graph to an MIS of the graph before this step.
    pub fn lift(&self, set: &mut BTreeSet<VertexId>) -> Result<(), ReduceError> {
        match self {
            ReconstructionStep::Isolated { v } => {
                set.insert(*v);
            }
            ReconstructionStep::SmallComponent { chosen, .. } => set.extend(chosen.iter().copied()),
            ReconstructionStep::Dominated { .. } | ReconstructionStep::Roof { .. } => {}
            ReconstructionStep::Degree2Fold { v, v1, v2, merged } => {
                if set.remove(merged) {
                    set.insert(*v1);
                    set.insert(*v2);
                } else {
                    set.insert(*v);
                }
            }
            ReconstructionStep::AltFold { a, b, snapshot, .. } => {
                let blocked = |side: &[VertexId]| {
                    snapshot.iter().any(|&(x, y)| {
                        (side.contains(&x) && set.contains(&y)) || (side.contains(&y) && set.contains(&x))
                    })
                };
                let pick = if !blocked(a) {
                    a
                } else if !blocked(b) {
                    b
                } else {
                    return Err(ReduceError::FoldBlocked { a: a.clone(), b: b.clone() });
                };
                set.extend(pick.iter().copied());
            }
        }
        Ok(())
    }
}

/// One applied reduction with the bookkeeping for the measure properties.
#[derive(Clone, Debug, Serialize)]
pub struct StepRecord {
    pub step: ReconstructionStep,
    pub eta_before: usize,
    pub eta_after: usize,
    /// Parent connected, more than ten vertices, some vertex of degree 3.
    pub in_scope: bool,
    pub fine_before: Option<bool>,
    pub fine_after: Option<bool>,
}

impl StepRecord {
    pub fn raises_eta(&self) -> bool {
        self.eta_after > self.eta_before
    }

    /// Fine parent, bottleneck child and no measure drop.
    pub fn stalls_into_bottleneck(&self) -> bool {
        self.in_scope
            && self.fine_before == Some(true)
            && self.fine_after == Some(false)
            && self.eta_after >= self.eta_before
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ReductionLog {
    pub steps: Vec<StepRecord>,
}

impl ReductionLog {
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn lift(&self, set: &mut BTreeSet<VertexId>) -> Result<(), ReduceError> {
        for r in self.steps.iter().rev() {
            r.step.lift(set)?;
        }
        Ok(())
    }

    pub fn eta_increases(&self) -> usize {
        self.steps.iter().filter(|r| r.raises_eta()).count()
    }

    pub fn bottleneck_stalls(&self) -> usize {
        self.steps.iter().filter(|r| r.stalls_into_bottleneck()).count()
    }

    pub fn fine_to_bottleneck(&self) -> usize {
        self.steps.iter().filter(|r| r.in_scope && r.fine_before == Some(true) && r.fine_after == Some(false)).count()
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct GammaOptions {
    /// Classify parent and child of every step (costly).
    pub track_fineness: bool,
}

pub fn gamma(g: &Graph) -> Result<(Graph, ReductionLog), ReduceError> {
    gamma_with(g, GammaOptions::default())
}

/// Applies reductions until none fires.
pub fn gamma_with(g: &Graph, opts: GammaOptions) -> Result<(Graph, ReductionLog), ReduceError> {
    let mut g = g.clone();
    let mut log = ReductionLog::default();
    loop {
        let eta_before = g.eta();
        let in_scope = opts.track_fineness && g.n() > 10 && g.max_degree() >= 3 && g.is_connected();
        let fine_before = in_scope.then(|| structure::is_fine(&g));
        let Some(step) = reduce_once(&mut g)? else { break };
        let fine_after = in_scope.then(|| structure::is_fine(&g));
        log.steps.push(StepRecord { step, eta_before, eta_after: g.eta(), in_scope, fine_before, fine_after });
    }
    Ok((g, log))
}

/// Applies the first applicable reduction, in priority order.
pub fn reduce_once(g: &mut Graph) -> Result<Option<ReconstructionStep>, ReduceError> {
    let isolated = g.vertices().find(|&v| g.degree(v) == 0);
    if let Some(v) = isolated {
        g.remove_vertex(v)?;
        return Ok(Some(ReconstructionStep::Isolated { v }));
    }
    if let Some(step) = strip_degree2_component(g)? {
        return Ok(Some(step));
    }
    if let Some((by, removed)) = structure::find_dominating(g) {
        g.remove_vertex(removed)?;
        return Ok(Some(ReconstructionStep::Dominated { removed, by }));
    }
    let deg2 = g.vertices().find(|&v| g.degree(v) == 2);
    if let Some(v) = deg2 {
        return fold_degree2(g, v).map(Some);
    }
    if let Some(m) = structure::find_roof(g) {
        let removed = m.at("u1");
        g.remove_vertex(removed)?;
        return Ok(Some(ReconstructionStep::Roof { removed }));
    }
    if let Some(m) = structure::find_funnel(g, FunnelKind::Short) {
        return fold(g, FoldKind::ShortFunnel, &[m.at("u")], &[m.at("v")]).map(Some);
    }
    if let Some(m) = structure::find_desk(g) {
        let a = [m.at("u1"), m.at("u3")];
        let b = [m.at("u2"), m.at("u4")];
        return fold(g, FoldKind::Desk, &a, &b).map(Some);
    }
    Ok(None)
}

fn strip_degree2_component(g: &mut Graph) -> Result<Option<ReconstructionStep>, ReduceError> {
    for comp in g.connected_components() {
        if comp.iter().all(|&v| g.degree(v) <= 2) {
            let sub = g.induced(&comp);
            let chosen = oracle::mis_degree2(&sub).expect("component has max degree 2");
            g.remove_vertices(&comp)?;
            return Ok(Some(ReconstructionStep::SmallComponent { vertices: comp, chosen }));
        }
    }
    Ok(None)
}

/// Removes degree-2 vertex v and coalesces its two neighbours.
pub fn fold_degree2(g: &mut Graph, v: VertexId) -> Result<ReconstructionStep, ReduceError> {
    let nb = g.try_neighbors(v)?.to_vec();
    assert_eq!(nb.len(), 2, "fold_degree2 on vertex of degree {}", nb.len());
    let (v1, v2) = (nb[0], nb[1]);
    if g.has_edge(v1, v2) {
        return Err(ReduceError::AdjacentFoldNeighbours { v, v1, v2 });
    }
    g.remove_vertex(v)?;
    let merged = g.coalesce(v1, v2)?;
    Ok(ReconstructionStep::Degree2Fold { v, v1, v2, merged })
}

/// Deletes A ∪ B ∪ (N(A) ∩ N(B)) and joins every surviving neighbour of A
/// to every surviving neighbour of B that is not already adjacent.
pub fn fold(g: &mut Graph, kind: FoldKind, a: &[VertexId], b: &[VertexId]) -> Result<ReconstructionStep, ReduceError> {
    let na = g.neighborhood(a, 1, false);
    let nb = g.neighborhood(b, 1, false);
    let side: BTreeSet<VertexId> = a.iter().chain(b).copied().collect();
    let mut snapshot = Vec::new();
    for &x in &side {
        for &y in g.try_neighbors(x)?.to_vec().iter() {
            if !side.contains(&y) || x < y {
                snapshot.push((x.min(y), x.max(y)));
            }
        }
    }
    snapshot.sort_unstable();
    snapshot.dedup();
    let mut removed: BTreeSet<VertexId> = side.clone();
    removed.extend(na.intersection(&nb).copied());
    let left: Vec<VertexId> = na.iter().copied().filter(|x| !removed.contains(x)).collect();
    let right: Vec<VertexId> = nb.iter().copied().filter(|x| !removed.contains(x)).collect();
    let removed: Vec<VertexId> = removed.into_iter().collect();
    g.remove_vertices(&removed)?;
    for &x in &left {
        for &y in &right {
            if x != y {
                g.add_edge(x, y)?;
            }
        }
    }
    Ok(ReconstructionStep::AltFold { kind, a: a.to_vec(), b: b.to_vec(), removed, snapshot })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::*;
    use crate::oracle::brute_mis;

    fn solve_via_gamma(g: &Graph) -> Vec<VertexId> {
        let (h, log) = gamma(g).unwrap();
        let mut set: BTreeSet<VertexId> = brute_mis(&h).unwrap().into_iter().collect();
        log.lift(&mut set).unwrap();
        set.into_iter().collect()
    }

    #[test]
    fn degree2_fold_on_c5() {
        let mut g = cycle(5);
        let step = fold_degree2(&mut g, 0).unwrap();
        // path 1-2-3-4 with 1 and 4 merged: a triangle
        assert_eq!((g.n(), g.m()), (3, 3));
        let ReconstructionStep::Degree2Fold { merged, .. } = step else { panic!() };
        assert_eq!(g.degree(merged), 2);
    }

    #[test]
    fn degree2_fold_rejects_triangle() {
        let mut g = cycle(3);
        assert!(matches!(fold_degree2(&mut g, 0), Err(ReduceError::AdjacentFoldNeighbours { .. })));
    }

    #[test]
    fn gamma_is_a_fixpoint() {
        for g in [petersen(), cube(), complete(4), prism(), cycle(9), path(7), dodecahedron()] {
            let (h, _) = gamma(&g).unwrap();
            let (h2, log2) = gamma(&h).unwrap();
            assert!(log2.is_empty());
            assert_eq!(h, h2);
        }
    }

    #[test]
    fn gamma_keeps_cubic_girth5_graphs() {
        let (h, log) = gamma(&petersen()).unwrap();
        assert!(log.is_empty());
        assert_eq!(h.n(), 10);
    }

    #[test]
    fn gamma_reduces_small_graphs_away() {
        for g in [cycle(9), path(7), complete(4), prism()] {
            let (h, _) = gamma(&g).unwrap();
            assert!(h.is_empty(), "left {} vertices", h.n());
        }
    }

    #[test]
    fn lift_is_optimal() {
        for g in [petersen(), cube(), complete(4), prism(), cycle(9), path(7), k33(), heawood()] {
            let s = solve_via_gamma(&g);
            assert!(g.is_independent(&s));
            assert_eq!(s.len(), brute_mis(&g).unwrap().len());
        }
    }

    #[test]
    fn cube_desk_fold() {
        let mut g = cube();
        let step = fold(&mut g, FoldKind::Desk, &[0, 3], &[1, 2]).unwrap();
        let ReconstructionStep::AltFold { removed, .. } = &step else { panic!() };
        assert_eq!(removed, &vec![0, 1, 2, 3]);
        // the opposite face already carries every A-side/B-side edge
        assert_eq!((g.n(), g.m()), (4, 4));
    }
}
