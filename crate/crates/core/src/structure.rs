//! Pattern detection: dominating vertices, odd chains, roofs, funnels,
//! desks, short cycles and the complete-pentagon test.

use serde::Serialize;

use crate::graph::{Graph, VertexId};

/// A named pattern plus the role -> vertex binding that witnesses it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternMatch {
    pub rule: String,
    pub roles: Vec<(String, VertexId)>,
}

impl PatternMatch {
    pub fn new(rule: &str, roles: &[(&str, VertexId)]) -> Self {
        PatternMatch { rule: rule.to_string(), roles: roles.iter().map(|(r, v)| (r.to_string(), *v)).collect() }
    }

    pub fn get(&self, role: &str) -> Option<VertexId> {
        self.roles.iter().find(|(r, _)| r == role).map(|&(_, v)| v)
    }

    /// Panics if the role is unbound.
    pub fn at(&self, role: &str) -> VertexId {
        self.get(role).unwrap_or_else(|| panic!("role {role} unbound in {}", self.rule))
    }

    pub fn push(&mut self, role: &str, v: VertexId) {
        self.roles.push((role.to_string(), v));
    }
}

/// u dominates v: u ∈ N(v) and N(u) \ {v} ⊆ N(v).
pub fn dominates(g: &Graph, u: VertexId, v: VertexId) -> bool {
    g.has_edge(u, v) && g.neighbors(u).iter().all(|&w| w == v || g.has_edge(v, w))
}

/// Lowest (dominating, dominated) pair.
pub fn find_dominating(g: &Graph) -> Option<(VertexId, VertexId)> {
    for u in g.vertices() {
        for &v in g.neighbors(u) {
            if g.degree(u) <= g.degree(v) && dominates(g, u, v) {
                return Some((u, v));
            }
        }
    }
    None
}

pub fn has_dominating(g: &Graph) -> bool {
    find_dominating(g).is_some()
}

/// First maximal run of degree-2 vertices of odd length whose two outer
/// neighbours both have degree >= 3.
pub fn find_odd_chain(g: &Graph) -> Option<Vec<VertexId>> {
    let mut seen = vec![false; g.id_bound()];
    for s in g.vertices() {
        if seen[s] || g.degree(s) != 2 {
            continue;
        }
        let (run, ends) = degree2_run(g, s);
        for &v in &run {
            seen[v] = true;
        }
        let Some((x, y)) = ends else { continue };
        if run.len() % 2 == 1 && g.degree(x) >= 3 && g.degree(y) >= 3 {
            return Some(run);
        }
    }
    None
}

// Walks the degree-2 run through s. Returns the run in path order and the
// outer endpoints, or None for the endpoints when the run closes on itself.
fn degree2_run(g: &Graph, s: VertexId) -> (Vec<VertexId>, Option<(VertexId, VertexId)>) {
    let walk = |first: VertexId| -> (Vec<VertexId>, VertexId, bool) {
        let mut out = Vec::new();
        let mut prev = s;
        let mut cur = first;
        loop {
            if cur == s {
                return (out, cur, true);
            }
            if g.degree(cur) != 2 {
                return (out, cur, false);
            }
            out.push(cur);
            let next = g.neighbors(cur).iter().copied().find(|&w| w != prev).unwrap();
            prev = cur;
            cur = next;
        }
    };
    let nb = g.neighbors(s);
    let (left, lend, closed) = walk(nb[0]);
    if closed {
        let mut run = vec![s];
        run.extend(left);
        return (run, None);
    }
    let (right, rend, _) = walk(nb[1]);
    let mut run: Vec<VertexId> = left.into_iter().rev().collect();
    run.push(s);
    run.extend(right);
    (run, Some((lend, rend)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Fineness {
    Fine,
    Bottleneck,
}

pub fn classify_fine(g: &Graph) -> Fineness {
    if g.max_degree() >= 4 || has_dominating(g) || find_odd_chain(g).is_some() {
        Fineness::Fine
    } else {
        Fineness::Bottleneck
    }
}

pub fn is_fine(g: &Graph) -> bool {
    classify_fine(g) == Fineness::Fine
}

pub fn in_triangle(g: &Graph, x: VertexId) -> bool {
    let n = g.neighbors(x);
    for (i, &a) in n.iter().enumerate() {
        for &b in &n[i + 1..] {
            if g.has_edge(a, b) {
                return true;
            }
        }
    }
    false
}

/// Roof: 5-cycle u1..u5 with chord u2-u5, δ(u2)=δ(u5)=3, others >= 3.
pub fn find_roof(g: &Graph) -> Option<PatternMatch> {
    for u2 in g.vertices() {
        if g.degree(u2) != 3 {
            continue;
        }
        for &u5 in g.neighbors(u2) {
            if g.degree(u5) != 3 {
                continue;
            }
            for &u1 in g.neighbors(u2) {
                if u1 == u5 || !g.has_edge(u1, u5) || g.degree(u1) < 3 {
                    continue;
                }
                for &u3 in g.neighbors(u2) {
                    if u3 == u1 || u3 == u5 || g.degree(u3) < 3 {
                        continue;
                    }
                    for &u4 in g.neighbors(u5) {
                        if u4 == u1 || u4 == u2 || u4 == u3 || g.degree(u4) < 3 {
                            continue;
                        }
                        if g.has_edge(u3, u4) {
                            return Some(PatternMatch::new(
                                "roof",
                                &[("u1", u1), ("u2", u2), ("u3", u3), ("u4", u4), ("u5", u5)],
                            ));
                        }
                    }
                }
            }
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FunnelKind {
    Short,
    Good,
    Plain,
}

/// A 3-funnel u - v - {v1, v2}: δ(v)=3, N(v)={u,v1,v2}, v1v2 an edge,
/// u, v1, v2 all of degree >= 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Funnel {
    pub u: VertexId,
    pub v: VertexId,
    pub v1: VertexId,
    pub v2: VertexId,
}

impl Funnel {
    fn to_match(self, name: &str) -> PatternMatch {
        PatternMatch::new(name, &[("u", self.u), ("v", self.v), ("v1", self.v1), ("v2", self.v2)])
    }
}

pub fn all_funnels(g: &Graph) -> Vec<Funnel> {
    let mut out = Vec::new();
    for v in g.vertices() {
        let n = g.neighbors(v);
        if n.len() != 3 {
            continue;
        }
        for i in 0..3 {
            let u = n[i];
            let (v1, v2) = match i {
                0 => (n[1], n[2]),
                1 => (n[0], n[2]),
                _ => (n[0], n[1]),
            };
            if g.has_edge(v1, v2) && g.degree(u) >= 3 && g.degree(v1) >= 3 && g.degree(v2) >= 3 {
                out.push(Funnel { u, v, v1, v2 });
            }
        }
    }
    out
}

pub fn is_short_funnel(g: &Graph, f: &Funnel) -> bool {
    let nu = g.neighbors(f.u);
    let nv = g.neighbors(f.v);
    if nu.iter().any(|x| nv.contains(x)) {
        return false;
    }
    let mut missing = 0;
    for &x in nu.iter().filter(|&&x| x != f.v) {
        for &y in nv.iter().filter(|&&y| y != f.u) {
            if !g.has_edge(x, y) {
                missing += 1;
            }
        }
    }
    missing <= g.degree(f.u)
}

pub fn find_funnel(g: &Graph, kind: FunnelKind) -> Option<PatternMatch> {
    let funnels = all_funnels(g);
    match kind {
        FunnelKind::Short => funnels.into_iter().find(|f| is_short_funnel(g, f)).map(|f| f.to_match("short-funnel")),
        FunnelKind::Good => select_good_funnel(g, &funnels).map(|f| f.to_match("good-funnel")),
        FunnelKind::Plain => select_plain_funnel(g, &funnels).map(|f| f.to_match("funnel")),
    }
}

/// Good funnel selection, labels u1 - v1 - {v2, v3} mapped to u, v, v1, v2.
pub fn select_good_funnel(g: &Graph, funnels: &[Funnel]) -> Option<Funnel> {
    let good: Vec<Funnel> = funnels.iter().copied().filter(|f| g.degree(f.v1) > 3 || g.degree(f.v2) > 3).collect();
    if let Some(f) = good.iter().find(|f| g.degree(f.u) >= 4) {
        return Some(*f);
    }
    for f in &good {
        for (a, b) in [(f.v1, f.v2), (f.v2, f.v1)] {
            // a plays v2, b plays v3
            if g.degree(b) >= 4 && g.neighbors(a).iter().any(|&x| x != f.v && x != b && in_triangle(g, x)) {
                return Some(Funnel { u: f.u, v: f.v, v1: a, v2: b });
            }
        }
    }
    good.first().copied()
}

pub fn select_plain_funnel(g: &Graph, funnels: &[Funnel]) -> Option<Funnel> {
    for f in funnels {
        let core = [f.v, f.v1, f.v2];
        let side = g.neighborhood(&[f.v1, f.v2], 1, false);
        if side.iter().any(|&x| !core.contains(&x) && in_triangle(g, x)) {
            return Some(*f);
        }
    }
    funnels.first().copied()
}

/// All 4-cycles p-q-r-s, each listed once.
pub fn four_cycles(g: &Graph) -> Vec<[VertexId; 4]> {
    let mut out = Vec::new();
    for p in g.vertices() {
        let np = g.neighbors(p);
        for (i, &q) in np.iter().enumerate() {
            if q < p {
                continue;
            }
            for &s in &np[i + 1..] {
                if s < p {
                    continue;
                }
                for &r in g.neighbors(q) {
                    if r > p && r != s && g.has_edge(r, s) {
                        out.push([p, q, r, s]);
                    }
                }
            }
        }
    }
    out
}

pub fn is_desk(g: &Graph, c: &[VertexId; 4]) -> bool {
    let [p, q, r, s] = *c;
    if g.has_edge(p, r) || g.has_edge(q, s) {
        return false;
    }
    if c.iter().any(|&x| g.degree(x) < 3) {
        return false;
    }
    let na = g.neighborhood(&[p, r], 1, false);
    let nb = g.neighborhood(&[q, s], 1, false);
    if na.intersection(&nb).next().is_some() {
        return false;
    }
    let outside = |set: &std::collections::BTreeSet<VertexId>| set.iter().filter(|x| !c.contains(x)).count();
    outside(&na) <= 2 && outside(&nb) <= 2
}

pub fn find_desk(g: &Graph) -> Option<PatternMatch> {
    four_cycles(g)
        .into_iter()
        .find(|c| is_desk(g, c))
        .map(|c| PatternMatch::new("desk", &[("u1", c[0]), ("u2", c[1]), ("u3", c[2]), ("u4", c[3])]))
}

/// Simple cycles of length 3..=max_len, canonical rotation: smallest vertex
/// first, then the smaller of its two cycle neighbours.
#[derive(Clone, Debug, Default)]
pub struct CycleIndex {
    pub cycles: Vec<Vec<VertexId>>,
}

impl CycleIndex {
    pub fn count(&self, len: usize) -> usize {
        self.cycles.iter().filter(|c| c.len() == len).count()
    }

    pub fn of_len(&self, len: usize) -> impl Iterator<Item = &Vec<VertexId>> {
        self.cycles.iter().filter(move |c| c.len() == len)
    }
}

pub fn enumerate_small_cycles(g: &Graph, max_len: usize) -> CycleIndex {
    let mut out = Vec::new();
    let mut path = Vec::with_capacity(max_len);
    let mut on_path = vec![false; g.id_bound()];
    for s in g.vertices() {
        path.clear();
        path.push(s);
        on_path[s] = true;
        extend(g, s, max_len, &mut path, &mut on_path, &mut out);
        on_path[s] = false;
    }
    out.sort_by(|a: &Vec<VertexId>, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    CycleIndex { cycles: out }
}

fn extend(
    g: &Graph,
    s: VertexId,
    max_len: usize,
    path: &mut Vec<VertexId>,
    on_path: &mut [bool],
    out: &mut Vec<Vec<VertexId>>,
) {
    let last = *path.last().unwrap();
    for &w in g.neighbors(last) {
        if w == s && path.len() >= 3 && path[1] < last {
            out.push(path.clone());
        }
        if w > s && !on_path[w] && path.len() < max_len {
            path.push(w);
            on_path[w] = true;
            extend(g, s, max_len, path, on_path, out);
            on_path[w] = false;
            path.pop();
        }
    }
}

/// Presence of each short cycle length, the information the late rules
/// use as preconditions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CycleProfile {
    pub triangles: bool,
    pub rectangles: bool,
    pub pentagons: bool,
    pub hexagons: bool,
}

pub fn cycle_profile(g: &Graph) -> CycleProfile {
    let idx = enumerate_small_cycles(g, 6);
    CycleProfile {
        triangles: idx.count(3) > 0,
        rectangles: idx.count(4) > 0,
        pentagons: idx.count(5) > 0,
        hexagons: idx.count(6) > 0,
    }
}

/// Vertex sets of all 5-cycles through u.
pub fn pentagons_through(g: &Graph, u: VertexId) -> Vec<[VertexId; 5]> {
    let mut out = Vec::new();
    for &a in g.neighbors(u) {
        for &b in g.neighbors(a) {
            if b == u {
                continue;
            }
            for &c in g.neighbors(b) {
                if c == u || c == a {
                    continue;
                }
                for &d in g.neighbors(c) {
                    if d == u || d == a || d == b {
                        continue;
                    }
                    if g.has_edge(d, u) {
                        out.push([u, a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}

/// For every v ∈ N(u) and w ∈ N(v) \ {u}, some 5-cycle contains u, v, w.
pub fn complete_pentagon_property(g: &Graph, u: VertexId) -> bool {
    let pents = pentagons_through(g, u);
    g.neighbors(u).iter().all(|&v| {
        g.neighbors(v).iter().filter(|&&w| w != u).all(|&w| pents.iter().any(|p| p.contains(&v) && p.contains(&w)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::*;

    #[test]
    fn domination_examples() {
        let g = path(3);
        assert_eq!(find_dominating(&g), Some((0, 1)));
        assert!(find_dominating(&cycle(3)).is_some());
        assert!(find_dominating(&cycle(5)).is_none());
    }

    fn hubs_with_chain(len: usize) -> Graph {
        // two K4-minus-edge style hubs of degree 3 joined by a chain
        let mut e = vec![(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (4, 5), (4, 6), (5, 6), (5, 7), (6, 7)];
        let mut prev = 0;
        for i in 0..len {
            e.push((prev, 8 + i));
            prev = 8 + i;
        }
        e.push((prev, 4));
        e.push((3, 7));
        Graph::from_edges(8 + len, &e).unwrap()
    }

    #[test]
    fn odd_chains() {
        let g = hubs_with_chain(3);
        assert_eq!(find_odd_chain(&g), Some(vec![8, 9, 10]));
        assert_eq!(find_odd_chain(&hubs_with_chain(2)), None);
        assert_eq!(find_odd_chain(&petersen()), None);
        assert_eq!(find_odd_chain(&cycle(7)), None);
    }

    #[test]
    fn fineness() {
        let star = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert_eq!(classify_fine(&star), Fineness::Fine);
        assert_eq!(classify_fine(&petersen()), Fineness::Bottleneck);
        assert_eq!(classify_fine(&complete(4)), Fineness::Fine);
    }

    #[test]
    fn roof_detection() {
        // house: square 1-2-3-4 (u2 u3 u4 u5) with apex 0 over edge 1-4, plus
        // a pendant-free padding so that u1, u3, u4 reach degree 3
        let g = Graph::from_edges(
            8,
            &[(0, 1), (0, 4), (1, 4), (1, 2), (2, 3), (3, 4), (0, 5), (2, 6), (3, 7), (5, 6), (6, 7), (5, 7)],
        )
        .unwrap();
        let m = find_roof(&g).expect("roof");
        assert_eq!(m.at("u1"), 0);
        assert!(find_roof(&cycle(5)).is_none());
        assert!(find_roof(&complete(4)).is_none());
    }

    #[test]
    fn funnels() {
        // K4 minus edge (1,2): v=0 has neighbours 1,2,3... build explicit funnel:
        // triangle 0-1-2, apex 3 attached to 0, everything padded to degree 3
        let g = Graph::from_edges(
            8,
            &[(0, 1), (0, 2), (1, 2), (0, 3), (1, 4), (2, 5), (3, 6), (3, 7), (4, 6), (5, 7), (4, 5), (6, 7)],
        )
        .unwrap();
        assert!(find_funnel(&g, FunnelKind::Plain).is_some());
        let all = all_funnels(&g);
        assert!(all.iter().any(|f| (f.u, f.v) == (3, 0)));
        assert!(all.iter().all(|f| g.has_edge(f.v1, f.v2) && g.has_edge(f.u, f.v)));
        assert!(find_funnel(&petersen(), FunnelKind::Plain).is_none());
        // pairs (6,1),(6,2),(7,1),(7,2) all non-adjacent: 4 > δ(3) = 3
        let f = Funnel { u: 3, v: 0, v1: 1, v2: 2 };
        assert!(!is_short_funnel(&g, &f));
    }

    #[test]
    fn desks() {
        assert!(find_desk(&cube()).is_some());
        assert!(find_desk(&cycle(4)).is_none());
        let mut g = cycle(4);
        g.add_edge(0, 2).unwrap();
        assert!(find_desk(&g).is_none());
    }

    #[test]
    fn cycle_counts() {
        let p = enumerate_small_cycles(&petersen(), 7);
        assert_eq!(p.count(5), 12);
        assert_eq!(p.count(3) + p.count(4), 0);
        let k = enumerate_small_cycles(&complete(4), 7);
        assert_eq!(k.count(3), 4);
        assert_eq!(k.count(4), 3);
        assert!(enumerate_small_cycles(&path(6), 7).cycles.is_empty());
    }

    #[test]
    fn pentagon_property() {
        let p = petersen();
        assert!(p.vertices().all(|u| complete_pentagon_property(&p, u)));
        let q = cube();
        assert!(!complete_pentagon_property(&q, 0));
    }
}
