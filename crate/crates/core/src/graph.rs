//! Mutable simple undirected graph with stable vertex identifiers.
//!
//! Deleted vertices are tombstoned and their ids are never handed out again,
//! so reconstruction logs can refer to parent vertices unambiguously.

use std::collections::BTreeSet;

use thiserror::Error;

pub type VertexId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("self-loop on vertex {0}")]
    SelfLoop(VertexId),
    #[error("cannot coalesce a vertex with itself ({0})")]
    SameVertex(VertexId),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    // None marks a deleted id
    adj: Vec<Option<Vec<VertexId>>>,
    live: usize,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph { adj: vec![Some(Vec::new()); n], live: n }
    }

    pub fn from_edges(n: usize, edges: &[(VertexId, VertexId)]) -> Result<Self, GraphError> {
        let mut g = Graph::new(n);
        for &(a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self) -> VertexId {
        self.adj.push(Some(Vec::new()));
        self.live += 1;
        self.adj.len() - 1
    }

    /// Number of live vertices.
    pub fn n(&self) -> usize {
        self.live
    }

    pub fn m(&self) -> usize {
        self.vertices().map(|v| self.degree(v)).sum::<usize>() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    /// One past the largest id ever allocated.
    pub fn id_bound(&self) -> usize {
        self.adj.len()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        matches!(self.adj.get(v), Some(Some(_)))
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.adj.iter().enumerate().filter_map(|(i, a)| a.as_ref().map(|_| i))
    }

    pub fn vertex_list(&self) -> Vec<VertexId> {
        self.vertices().collect()
    }

    /// Sorted neighbor list. Panics on an unknown vertex.
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        match self.adj.get(v) {
            Some(Some(a)) => a,
            _ => panic!("unknown vertex {v}"),
        }
    }

    pub fn try_neighbors(&self, v: VertexId) -> Result<&[VertexId], GraphError> {
        match self.adj.get(v) {
            Some(Some(a)) => Ok(a),
            _ => Err(GraphError::UnknownVertex(v)),
        }
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.neighbors(v).len()
    }

    pub fn try_degree(&self, v: VertexId) -> Result<usize, GraphError> {
        self.try_neighbors(v).map(|a| a.len())
    }

    pub fn max_degree(&self) -> usize {
        self.vertices().map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        self.vertices().map(|v| self.degree(v)).min().unwrap_or(0)
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        match self.adj.get(a) {
            Some(Some(na)) => na.binary_search(&b).is_ok(),
            _ => false,
        }
    }

    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::new();
        for v in self.vertices() {
            for &w in self.neighbors(v) {
                if v < w {
                    out.push((v, w));
                }
            }
        }
        out
    }

    /// Inserts edge a-b. Idempotent.
    pub fn add_edge(&mut self, a: VertexId, b: VertexId) -> Result<(), GraphError> {
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        if !self.contains(a) {
            return Err(GraphError::UnknownVertex(a));
        }
        if !self.contains(b) {
            return Err(GraphError::UnknownVertex(b));
        }
        insert_sorted(self.adj[a].as_mut().unwrap(), b);
        insert_sorted(self.adj[b].as_mut().unwrap(), a);
        Ok(())
    }

    pub fn remove_vertex(&mut self, v: VertexId) -> Result<(), GraphError> {
        let nbrs = match self.adj.get_mut(v) {
            Some(slot @ Some(_)) => slot.take().unwrap(),
            _ => return Err(GraphError::UnknownVertex(v)),
        };
        for w in nbrs {
            let a = self.adj[w].as_mut().unwrap();
            if let Ok(i) = a.binary_search(&v) {
                a.remove(i);
            }
        }
        self.live -= 1;
        Ok(())
    }

    /// Induced subgraph on V \ A, in place. Duplicates in `a` are ignored.
    pub fn remove_vertices(&mut self, a: &[VertexId]) -> Result<(), GraphError> {
        let set: BTreeSet<VertexId> = a.iter().copied().collect();
        if let Some(&v) = set.iter().find(|&&v| !self.contains(v)) {
            return Err(GraphError::UnknownVertex(v));
        }
        for v in set {
            self.remove_vertex(v)?;
        }
        Ok(())
    }

    pub fn without(&self, a: &[VertexId]) -> Result<Graph, GraphError> {
        let mut g = self.clone();
        g.remove_vertices(a)?;
        Ok(g)
    }

    /// Replaces v1, v2 by a fresh vertex adjacent to (N(v1) ∪ N(v2)) \ {v1, v2}.
    pub fn coalesce(&mut self, v1: VertexId, v2: VertexId) -> Result<VertexId, GraphError> {
        if v1 == v2 {
            return Err(GraphError::SameVertex(v1));
        }
        let mut merged: BTreeSet<VertexId> = self.try_neighbors(v1)?.iter().copied().collect();
        merged.extend(self.try_neighbors(v2)?.iter().copied());
        merged.remove(&v1);
        merged.remove(&v2);
        self.remove_vertex(v1)?;
        self.remove_vertex(v2)?;
        let u = self.add_vertex();
        for w in merged {
            self.add_edge(u, w)?;
        }
        Ok(u)
    }

    /// N(A), N[A], N²(A) or N²[A].
    ///
    /// N²(A) is N(N(A)) \ N[A]; the closed version is N[A] ∪ N²(A).
    pub fn neighborhood(&self, a: &[VertexId], order: u8, closed: bool) -> BTreeSet<VertexId> {
        let set_a: BTreeSet<VertexId> = a.iter().copied().collect();
        let mut n1: BTreeSet<VertexId> = BTreeSet::new();
        for &v in a {
            n1.extend(self.neighbors(v).iter().copied());
        }
        let n1: BTreeSet<VertexId> = n1.difference(&set_a).copied().collect();
        let closed1: BTreeSet<VertexId> = n1.union(&set_a).copied().collect();
        if order <= 1 {
            return if closed { closed1 } else { n1 };
        }
        let mut n2 = BTreeSet::new();
        for &v in &n1 {
            for &w in self.neighbors(v) {
                if !closed1.contains(&w) {
                    n2.insert(w);
                }
            }
        }
        if closed {
            closed1.union(&n2).copied().collect()
        } else {
            n2
        }
    }

    /// N[A] as a sorted vec.
    pub fn closed_nbhd(&self, a: &[VertexId]) -> Vec<VertexId> {
        self.neighborhood(a, 1, true).into_iter().collect()
    }

    pub fn open_nbhd(&self, a: &[VertexId]) -> Vec<VertexId> {
        self.neighborhood(a, 1, false).into_iter().collect()
    }

    pub fn eta(&self) -> usize {
        self.vertices().map(|v| self.degree(v).saturating_sub(2)).sum()
    }

    pub fn is_independent(&self, set: &[VertexId]) -> bool {
        for (i, &a) in set.iter().enumerate() {
            if !self.contains(a) {
                return false;
            }
            for &b in &set[i + 1..] {
                if a == b || self.has_edge(a, b) {
                    return false;
                }
            }
        }
        true
    }

    /// First edge with both ends in `set`, if any.
    pub fn violating_edge(&self, set: &[VertexId]) -> Option<(VertexId, VertexId)> {
        let s: BTreeSet<VertexId> = set.iter().copied().collect();
        for &a in &s {
            for &b in self.neighbors(a) {
                if a < b && s.contains(&b) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// True if no vertex outside `set` could be added.
    pub fn is_maximal_independent(&self, set: &[VertexId]) -> bool {
        let s: BTreeSet<VertexId> = set.iter().copied().collect();
        self.is_independent(set)
            && self.vertices().all(|v| s.contains(&v) || self.neighbors(v).iter().any(|w| s.contains(w)))
    }

    pub fn connected_components(&self) -> Vec<Vec<VertexId>> {
        let mut seen = vec![false; self.adj.len()];
        let mut out = Vec::new();
        for s in self.vertices() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let v = comp[i];
                i += 1;
                for &w in self.neighbors(v) {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }

    /// Subgraph induced on `keep`, preserving ids.
    pub fn induced(&self, keep: &[VertexId]) -> Graph {
        let k: BTreeSet<VertexId> = keep.iter().copied().collect();
        let mut adj = vec![None; self.adj.len()];
        for &v in &k {
            let a: Vec<VertexId> = self.neighbors(v).iter().copied().filter(|w| k.contains(w)).collect();
            adj[v] = Some(a);
        }
        Graph { adj, live: k.len() }
    }

    /// Full scan of symmetry and simplicity.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut count = 0;
        for (v, slot) in self.adj.iter().enumerate() {
            let Some(a) = slot else { continue };
            count += 1;
            for w in a.windows(2) {
                if w[0] >= w[1] {
                    return Err(format!("neighbors of {v} not strictly sorted"));
                }
            }
            for &w in a {
                if w == v {
                    return Err(format!("self-loop at {v}"));
                }
                if !self.contains(w) {
                    return Err(format!("{v} points at dead vertex {w}"));
                }
                if !self.has_edge(w, v) {
                    return Err(format!("asymmetric edge {v}-{w}"));
                }
            }
        }
        if count != self.live {
            return Err(format!("live count {} but {} slots", self.live, count));
        }
        Ok(())
    }
}

fn insert_sorted(a: &mut Vec<VertexId>, x: VertexId) {
    if let Err(i) = a.binary_search(&x) {
        a.insert(i, x);
    }
}

/// Small named graphs used across tests and examples.
pub mod named {
    use super::Graph;

    pub fn cycle(n: usize) -> Graph {
        let e: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &e).unwrap()
    }

    pub fn path(n: usize) -> Graph {
        let e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &e).unwrap()
    }

    pub fn complete(n: usize) -> Graph {
        let mut e = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                e.push((i, j));
            }
        }
        Graph::from_edges(n, &e).unwrap()
    }

    pub fn k33() -> Graph {
        let mut e = Vec::new();
        for i in 0..3 {
            for j in 3..6 {
                e.push((i, j));
            }
        }
        Graph::from_edges(6, &e).unwrap()
    }

    pub fn cube() -> Graph {
        let mut e = Vec::new();
        for v in 0..8usize {
            for bit in 0..3 {
                let w = v ^ (1 << bit);
                if v < w {
                    e.push((v, w));
                }
            }
        }
        Graph::from_edges(8, &e).unwrap()
    }

    /// Triangular prism C3 x K2.
    pub fn prism() -> Graph {
        Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)]).unwrap()
    }

    pub fn petersen() -> Graph {
        let mut e = Vec::new();
        for i in 0..5 {
            e.push((i, (i + 1) % 5));
            e.push((i, i + 5));
            e.push((5 + i, 5 + (i + 2) % 5));
        }
        Graph::from_edges(10, &e).unwrap()
    }

    pub fn dodecahedron() -> Graph {
        // outer 5-cycle, middle 10-cycle, inner 5-cycle
        let mut e = Vec::new();
        for i in 0..5 {
            e.push((i, (i + 1) % 5));
            e.push((i, 5 + 2 * i));
            e.push((15 + i, 15 + (i + 1) % 5));
            e.push((15 + i, 5 + (2 * i + 1) % 10));
        }
        for i in 0..10 {
            e.push((5 + i, 5 + (i + 1) % 10));
        }
        Graph::from_edges(20, &e).unwrap()
    }

    /// Hamiltonian cubic graph from LCF notation: a cycle on n vertices plus
    /// chords i -> i + jumps[i mod len].
    pub fn lcf(n: usize, jumps: &[i64]) -> Graph {
        let mut g = cycle(n);
        for i in 0..n {
            let j = (i as i64 + jumps[i % jumps.len()]).rem_euclid(n as i64) as usize;
            g.add_edge(i, j).unwrap();
        }
        g
    }

    /// Girth 6, 14 vertices.
    pub fn heawood() -> Graph {
        lcf(14, &[5, -5])
    }

    /// Girth 7, 24 vertices.
    pub fn mcgee() -> Graph {
        lcf(24, &[12, 7, -7])
    }

    /// Girth 8, 30 vertices.
    pub fn tutte_coxeter() -> Graph {
        lcf(30, &[-13, -9, 7, -7, 9, 13])
    }

    /// Union of two graphs with the second one's ids shifted.
    pub fn disjoint_union(a: &Graph, b: &Graph) -> Graph {
        let off = a.id_bound();
        let mut g = Graph::new(off + b.id_bound());
        for v in 0..off {
            if !a.contains(v) {
                g.remove_vertex(v).unwrap();
            }
        }
        for v in 0..b.id_bound() {
            if !b.contains(v) {
                g.remove_vertex(off + v).unwrap();
            }
        }
        for (x, y) in a.edges() {
            g.add_edge(x, y).unwrap();
        }
        for (x, y) in b.edges() {
            g.add_edge(off + x, off + y).unwrap();
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::named::*;
    use super::*;

    #[test]
    fn degrees() {
        let k4 = complete(4);
        assert_eq!(k4.degree(2), 3);
        let mut g = Graph::new(1);
        assert_eq!(g.degree(0), 0);
        g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(g.degree(0), 3);
        assert_eq!(g.try_degree(9), Err(GraphError::UnknownVertex(9)));
    }

    #[test]
    fn neighborhoods_on_c5_and_k4() {
        let c5 = cycle(5);
        assert_eq!(c5.neighborhood(&[0], 1, false).into_iter().collect::<Vec<_>>(), vec![1, 4]);
        assert_eq!(c5.neighborhood(&[0], 2, true).len(), 5);
        assert!(complete(4).neighborhood(&[0], 2, false).is_empty());
    }

    #[test]
    fn eta_values() {
        assert_eq!(path(3).eta(), 0);
        assert_eq!(complete(4).eta(), 4);
        assert_eq!(petersen().eta(), 10);
    }

    #[test]
    fn remove_gives_induced_subgraph() {
        let mut c5 = cycle(5);
        c5.remove_vertices(&[0]).unwrap();
        assert_eq!((c5.n(), c5.m()), (4, 3));
        assert_eq!(c5.max_degree(), 2);
        let k3 = complete(4).without(&[0]).unwrap();
        assert_eq!((k3.n(), k3.m()), (3, 3));
        assert!(cycle(3).without(&[7]).is_err());
    }

    #[test]
    fn petersen_minus_closed_nbhd() {
        let p = petersen();
        let nb = p.closed_nbhd(&[0]);
        let child = p.without(&nb).unwrap();
        assert_eq!(child.n(), 6);
        assert_eq!(child.eta(), 0);
        assert!(p.eta() - child.eta() >= 10);
    }

    #[test]
    fn coalesce_cases() {
        // a - v1, b - v2
        let mut g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let u = g.coalesce(1, 3).unwrap();
        assert_eq!(g.neighbors(u), &[0, 2]);
        // shared neighbor w = 2
        let mut g = Graph::from_edges(3, &[(0, 2), (1, 2)]).unwrap();
        let u = g.coalesce(0, 1).unwrap();
        assert_eq!(g.neighbors(u), &[2]);
        assert_eq!(g.degree(2), 1);
        // C5 minus vertex 0, then coalesce 1 and 4 -> triangle
        let mut g = cycle(5);
        g.remove_vertex(0).unwrap();
        let u = g.coalesce(1, 4).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.m(), 3);
        assert_eq!(g.degree(u), 2);
        assert_eq!(g.eta(), 0);
        assert!(g.coalesce(2, 2).is_err());
    }

    #[test]
    fn add_edge_behaviour() {
        let mut g = path(3);
        g.add_edge(0, 2).unwrap();
        assert_eq!(g.edges(), cycle(3).edges());
        let before = g.clone();
        g.add_edge(2, 0).unwrap();
        assert_eq!(g, before);
        let mut two = Graph::new(2);
        two.add_edge(0, 1).unwrap();
        assert_eq!((two.m(), two.eta()), (1, 0));
        assert_eq!(two.add_edge(1, 1), Err(GraphError::SelfLoop(1)));
    }

    #[test]
    fn components() {
        let g = disjoint_union(&cycle(3), &cycle(3));
        let cc = g.connected_components();
        assert_eq!(cc.len(), 2);
        assert!(cc.iter().all(|c| c.len() == 3));
        assert!(Graph::new(0).connected_components().is_empty());
        assert_eq!(petersen().connected_components().len(), 1);
    }

    #[test]
    fn named_graphs_are_cubic() {
        for g in [complete(4), k33(), cube(), prism(), petersen(), dodecahedron(), heawood(), mcgee(), tutte_coxeter()]
        {
            assert!(g.vertices().all(|v| g.degree(v) == 3));
            g.check_invariants().unwrap();
        }
        assert_eq!(dodecahedron().m(), 30);
    }
}
