//! Branching rules and the registry that orders them.
//!
//! Each rule inspects a reduced, connected graph and either declines or
//! returns a [`Firing`]: the branches to explore, the measure drop the rule
//! claims for them and the pattern that triggered it.

use std::cell::OnceCell;
use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::graph::{Graph, VertexId};
use crate::patterns::{self as pat, check_constraints, check_tree_like, Template};
use crate::reducer;
use crate::structure::{self, CycleProfile, PatternMatch};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// Solve G \ D.
    Exclude(Vec<VertexId>),
    /// Solve G \ N[A] and add A.
    Include(Vec<VertexId>),
}

impl Branch {
    pub fn child(&self, g: &Graph) -> Graph {
        let gone = match self {
            Branch::Exclude(d) => d.clone(),
            Branch::Include(a) => g.closed_nbhd(a),
        };
        g.without(&gone).expect("branch vertices belong to the graph")
    }

    pub fn included(&self) -> &[VertexId] {
        match self {
            Branch::Exclude(_) => &[],
            Branch::Include(a) => a,
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Branch::Exclude(d) => write!(f, "exclude{d:?}"),
            Branch::Include(a) => write!(f, "include{a:?}"),
        }
    }
}

/// Claimed lower bound on the measure drop of one branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Claim {
    /// Drop of at least 10, and at least 12 unless the child is fine.
    X,
    AtLeast(usize),
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Claim::X => write!(f, "X"),
            Claim::AtLeast(k) => write!(f, "{k}"),
        }
    }
}

pub fn form_string(form: &[Claim]) -> String {
    let parts: Vec<String> = form.iter().map(|c| c.to_string()).collect();
    format!("({})", parts.join(","))
}

#[derive(Clone, Debug, Serialize)]
pub struct Firing {
    pub rule: &'static str,
    pub case: &'static str,
    pub branches: Vec<Branch>,
    /// Alternative forms; the branching must meet at least one.
    pub claims: Vec<Vec<Claim>>,
    pub pattern: PatternMatch,
    /// Structural facts about the match that should hold but do not.
    pub violations: Vec<String>,
}

impl Firing {
    fn new(rule: &'static str, case: &'static str, pattern: PatternMatch) -> Self {
        Firing { rule, case, branches: Vec::new(), claims: Vec::new(), pattern, violations: Vec::new() }
    }

    fn include(mut self, roles: &[&str]) -> Self {
        let vs = roles.iter().map(|r| self.pattern.at(r)).collect();
        self.branches.push(Branch::Include(vs));
        self
    }

    fn exclude(mut self, roles: &[&str]) -> Self {
        let vs = roles.iter().map(|r| self.pattern.at(r)).collect();
        self.branches.push(Branch::Exclude(vs));
        self
    }

    fn claim(mut self, form: &[Claim]) -> Self {
        self.claims.push(form.to_vec());
        self
    }

    fn flag(mut self, msgs: Vec<String>) -> Self {
        self.violations.extend(msgs);
        self
    }

    pub fn label(&self) -> String {
        format!("{}{}", self.rule, self.case)
    }
}

use Claim::{AtLeast as N, X};

/// Lazily computed facts about the node graph shared by all rules.
pub struct RuleContext<'a> {
    pub g: &'a Graph,
    profile: OnceCell<CycleProfile>,
}

impl<'a> RuleContext<'a> {
    pub fn new(g: &'a Graph) -> Self {
        RuleContext { g, profile: OnceCell::new() }
    }

    pub fn profile(&self) -> CycleProfile {
        *self.profile.get_or_init(|| structure::cycle_profile(self.g))
    }

    pub fn cubic(&self) -> bool {
        self.g.n() > 0 && self.g.max_degree() == 3 && self.g.min_degree() == 3
    }

    /// 3-regular without triangles or rectangles.
    pub fn regular_stage(&self) -> bool {
        self.cubic() && !self.profile().triangles && !self.profile().rectangles
    }
}

pub trait BranchRule: Send + Sync {
    /// Short id such as "R7".
    fn id(&self) -> &'static str;
    fn name(&self) -> &'static str;
    fn fire(&self, ctx: &RuleContext) -> Option<Firing>;
}

/// Ordered rule table. The first rule that fires wins.
pub struct RuleRegistry {
    rules: Vec<Box<dyn BranchRule>>,
}

impl Default for RuleRegistry {
    fn default() -> Self {
        Self::standard()
    }
}

impl RuleRegistry {
    pub fn empty() -> Self {
        RuleRegistry { rules: Vec::new() }
    }

    pub fn standard() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(GoodFunnel));
        r.register(Box::new(GoodK4));
        r.register(Box::new(GoodTriangle));
        r.register(Box::new(HeavyRectangle));
        r.register(Box::new(HighDegree));
        r.register(Box::new(CubicFunnel));
        r.register(Box::new(Simple { id: "R7", name: "pentagon-hexagon-2", t: &pat::PH2, run: ph2 }));
        r.register(Box::new(Simple { id: "R8", name: "hexagon-hexagon-3", t: &pat::HH3, run: hh3 }));
        r.register(Box::new(Simple { id: "R9", name: "hexagon-hexagon-2-nonadjacent", t: &pat::HH2NC, run: hh2nc }));
        r.register(Box::new(PentagonPair));
        r.register(Box::new(Simple { id: "R11", name: "pentagon-hexagon-1", t: &pat::PH1, run: ph1 }));
        r.register(Box::new(HexagonPairAdjacent));
        r.register(Box::new(Simple { id: "R13", name: "hexagon-hexagon-1", t: &pat::HH1, run: hh1 }));
        r.register(Box::new(Simple { id: "R14", name: "hexagon-septagon-2", t: &pat::HS2, run: hs2 }));
        r.register(Box::new(Simple { id: "R15", name: "hexagon-septagon-3", t: &pat::HS3, run: hs3 }));
        r.register(Box::new(Simple { id: "R16", name: "hexagon", t: &pat::HEX, run: hex }));
        r.register(Box::new(PentagonSeptagon));
        r.register(Box::new(PentagonTriple));
        r.register(Box::new(Pentagon));
        r.register(Box::new(Girth7Edge));
        r
    }

    pub fn register(&mut self, rule: Box<dyn BranchRule>) {
        self.rules.push(rule);
    }

    /// Drops the rule with this id or name. Returns whether one was found.
    pub fn disable(&mut self, key: &str) -> bool {
        let before = self.rules.len();
        self.rules.retain(|r| r.id() != key && r.name() != key);
        self.rules.len() != before
    }

    pub fn without(mut self, key: &str) -> Self {
        self.disable(key);
        self
    }

    pub fn ids(&self) -> Vec<&'static str> {
        self.rules.iter().map(|r| r.id()).collect()
    }

    pub fn get(&self, key: &str) -> Option<&dyn BranchRule> {
        self.rules.iter().find(|r| r.id() == key || r.name() == key).map(|b| b.as_ref())
    }

    pub fn first_firing(&self, g: &Graph) -> Option<Firing> {
        let ctx = RuleContext::new(g);
        self.rules.iter().find_map(|r| r.fire(&ctx))
    }
}

struct GoodFunnel;

impl BranchRule for GoodFunnel {
    fn id(&self) -> &'static str {
        "R1"
    }
    fn name(&self) -> &'static str {
        "good-funnel"
    }
    fn fire(&self, ctx: &RuleContext) -> Option<Firing> {
        let f = structure::select_good_funnel(ctx.g, &structure::all_funnels(ctx.g))?;
        let m = PatternMatch::new("good-funnel", &[("u1", f.u), ("v1", f.v), ("v2", f.v1), ("v3", f.v2)]);
        Some(Firing::new("R1", "", m).include(&["u1"]).include(&["v1"]).claim(&[N(8), N(12)]).claim(&[N(10), N(10)]))
    }
}

/// Four mutually adjacent vertices of degree at least four.
struct GoodK4;

impl BranchRule for GoodK4 {
    fn id(&self) -> &'static str {
        "R2"
    }
    fn name(&self) -> &'static str {
        "good-k4"
    }
    fn fire(&self, ctx: &RuleContext) -> Option<Firing> {
        let g = ctx.g;
        let heavy = |v: VertexId| g.degree(v) > 3;
        for p in g.vertices().filter(|&v| heavy(v)) {
            let nb: Vec<VertexId> = g.neighbors(p).iter().copied().filter(|&w| w > p && heavy(w)).collect();
            for (i, &q) in nb.iter().enumerate() {
                for (j, &r) in nb.iter().enumerate().skip(i + 1) {
                    if !g.has_edge(q, r) {
                        continue;
                    }
                    for &s in &nb[j + 1..] {
                        if g.has_edge(q, s) && g.has_edge(r, s) {
                            let m = PatternMatch::new("good-k4", &[("p", p), ("q", q), ("r", r), ("s", s)]);
                            return Some(
                                Firing::new("R2", "", m)
                                    .exclude(&["p", "r"])
                                    .exclude(&["q", "s"])
                                    .claim(&[N(10), N(10)]),
                            );
                        }
                    }
                }
            }
        }
        None
    }
}

struct GoodTriangle;

impl BranchRule for GoodTriangle {
    fn id(&self) -> &'static str {
        "R3"
    }
    fn name(&self) -> &'static str {
        "good-triangle"
    }
    fn fire(&self, ctx: &RuleContext) -> Option<Firing> {
        let g = ctx.g;
        let tri = g.vertices().filter(|&v| g.degree(v) > 3).find_map(|a| {
            let nb = g.neighbors(a);
            nb.iter()
                .filter(|&&b| b > a && g.degree(b) > 3)
                .find_map(|&b| nb.iter().find(|&&c| c > b && g.degree(c) > 3 && g.has_edge(b, c)).map(|&c| [a, b, c]))
        })?;
        let eta = g.eta();
        let drop = |u: VertexId| {
            let child = g.without(&g.closed_nbhd(&[u])).unwrap();
            reducer::gamma(&child).map(|(h, _)| eta.saturating_sub(h.eta())).unwrap_or(0)
        };
        // ties go to the earliest, i.e. lowest, vertex
        let mut best = tri[0];
        let mut best_drop = drop(best);
        for &u in &tri[1..] {
            let d = drop(u);
            if d > best_drop {
                best = u;
                best_drop = d;
            }
        }
        let m = PatternMatch::new("good-triangle", &[("u1", tri[0]), ("u2", tri[1]), ("u3", tri[2]), ("ui", best)]);
        Some(Firing::new("R3", "", m).exclude(&["ui"]).include(&["ui"]).claim(&[N(6), N(14)]))
    }
}

struct HeavyRectangle;

impl BranchRule for HeavyRectangle {
    fn id(&self) -> &'static str {
        "R4"
    }
    fn name(&self) -> &'static str {
        "heavy-rectangle"
    }
    fn fire(&self, ctx: &RuleContext) -> Option<Firing> {
        let g = ctx.g;
        let mut fallback = None;
        for c in structure::four_cycles(g) {
            for k in 0..4 {
                let r = [c[k], c[(k + 1) % 4], c[(k + 2) % 4], c[(k + 3) % 4]];
                if g.degree(r[0]) < 4 {
                    continue;
                }
                let chordless = !g.has_edge(r[0], r[2]) && !g.has_edge(r[1], r[3]);
                if chordless {
                    return Some(rectangle_firing(g, r));
                }
                fallback.get_or_insert(r);
            }
        }
        fallback.map(|r| rectangle_firing(g, r))
    }
}

fn rectangle_firing(g: &Graph, r: [VertexId; 4]) -> Firing {
    let m = PatternMatch::new("heavy-rectangle", &[("u1", r[0]), ("u2", r[1]), ("u3", r[2]), ("u4", r[3])]);
    let light = r[1..].iter().all(|&v| g.degree(v) == 3);
    let f = if light {
        Firing::new("R4", "a", m).include(&["u2", "u4"]).include(&["u3"])
    } else {
        Firing::new("R4", "b", m).exclude(&["u1", "u3"]).exclude(&["u2", "u4"])
    };
    f.claim(&[N(8), N(12)]).claim(&[N(10), N(10)])
}

struct HighDegree;

impl BranchRule for HighDegree {
    fn id(&self) -> &'static str {
        "R5"
    }
    fn name(&self) -> &'static str {
        "high-degree"
    }
    fn fire(&self, ctx: &RuleContext) -> Option<Firing> {
        let v = ctx.g.vertices().find(|&v| ctx.g.degree(v) >= 4)?;
        let m = PatternMatch::new("high-degree", &[("v", v)]);
        Some(Firing::new("R5", "", m).exclude(&["v"]).include(&["v"]).claim(&[N(6), N(14)]))
    }
}

struct CubicFunnel;

impl BranchRule for CubicFunnel {
    fn id(&self) -> &'static str {
        "R6"
    }
    fn name(&self) -> &'static str {
        "funnel"
    }
    fn fire(&self, ctx: &RuleContext) -> Option<Firing> {
        if !ctx.cubic() {
            return None;
        }
        let f = structure::select_plain_funnel(ctx.g, &structure::all_funnels(ctx.g))?;
        let m = PatternMatch::new("funnel", &[("u1", f.u), ("v1", f.v), ("v2", f.v1), ("v3", f.v2)]);
        Some(Firing::new("R6", "", m).include(&["u1"]).include(&["v1"]).claim(&[N(8), N(10)]))
    }
}

/// A template rule with a single case: first match, fixed branches.
struct Simple {
    id: &'static str,
    name: &'static str,
    t: &'static Template,
    run: fn(&Graph, Firing) -> Firing,
}

impl BranchRule for Simple {
    fn id(&self) -> &'static str {
        self.id
    }
    fn name(&self) -> &'static str {
        self.name
    }
    fn fire(&self, ctx: &RuleContext) -> Option<Firing> {
        if !ctx.regular_stage() || !stage_allows(self.id, ctx) {
            return None;
        }
        let m = pat::first_match(ctx.g, self.t)?;
        Some((self.run)(ctx.g, Firing::new(self.id, "", m)))
    }
}

// Later rules only run once the earlier cycle structures are gone.
fn stage_allows(id: &str, ctx: &RuleContext) -> bool {
    let p = ctx.profile();
    match id {
        "R17" | "R18" | "R19" => !p.hexagons,
        "R20" => !p.hexagons && !p.pentagons,
        _ => true,
    }
}

const CORE9: [&str; 9] = ["a", "b", "c", "d", "e", "f", "g", "h", "i"];

fn roles<'a>(base: &[&'a str], extra: &[&'a str]) -> Vec<&'a str> {
    base.iter().chain(extra).copied().collect()
}

fn ph2(_: &Graph, f: Firing) -> Firing {
    f.include(&["b"]).include(&["f"]).claim(&[N(8), N(10)])
}

fn hh3(_: &Graph, f: Firing) -> Firing {
    f.include(&["f"]).include(&["c"]).claim(&[N(8), N(10)])
}

fn hh2nc(g: &Graph, f: Firing) -> Firing {
    let group = roles(&CORE9, &[]);
    let msgs = check_constraints(g, &f.pattern, &[&group], &[], &[]);
    f.flag(msgs).include(&["d"]).include(&["g"]).claim(&[N(8), N(10)])
}

fn ph1(g: &Graph, f: Firing) -> Firing {
    let group = roles(&CORE9, &["p", "q", "r", "s", "t", "u", "v"]);
    let msgs = check_constraints(g, &f.pattern, &[&group], &[], &[]);
    f.flag(msgs).include(&["f"]).include(&["c", "g", "h"]).include(&["p", "r", "u"]).claim(&[X, N(16), N(16)])
}

fn hh1(g: &Graph, f: Firing) -> Firing {
    let core = ["a", "b", "c", "d", "e", "f", "g", "h", "i", "j"];
    let msgs = check_constraints(
        g,
        &f.pattern,
        &[
            &roles(&core, &["q", "s", "u", "v", "w"]),
            &roles(&core, &["r"]),
            &roles(&core, &["p"]),
            &roles(&core, &["t"]),
        ],
        &[("q", "u")],
        &[],
    );
    f.flag(msgs).include(&["b"]).include(&["a", "g"]).include(&["c", "h"]).claim(&[X, N(16), N(16)])
}

fn hs2(g: &Graph, f: Firing) -> Firing {
    let one = ["a", "b", "c", "d", "e", "g", "h", "i", "j", "ob", "od", "og", "t", "u"];
    let two = ["a", "f", "e", "d", "c", "j", "i", "h", "g", "of", "od", "oj", "u", "t"];
    let msgs = check_constraints(g, &f.pattern, &[&one, &two], &[], &[]);
    f.flag(msgs).include(&["d"]).include(&["e", "i"]).include(&["c", "h"]).claim(&[X, N(16), N(16)])
}

fn hs3(g: &Graph, f: Firing) -> Firing {
    let one = ["b", "a", "f", "e", "d", "p", "t", "g", "q", "h", "r", "i"];
    let two = ["c", "d", "e", "f", "a", "t", "p", "i", "s", "h", "r", "g"];
    let msgs = check_constraints(g, &f.pattern, &[&one, &two], &[], &[]);
    f.flag(msgs).include(&["h"]).include(&["e", "i"]).include(&["g", "f"]).claim(&[X, N(16), N(16)])
}

/// The hexagon may meet no other hexagon or pentagon and may share no two
/// adjacent edges with a septagon.
fn hex_isolation(g: &Graph, hex: &[VertexId]) -> Vec<String> {
    let on_hex = |x: VertexId, y: VertexId| {
        (0..6).any(|i| {
            let (a, b) = (hex[i], hex[(i + 1) % 6]);
            (a, b) == (x, y) || (b, a) == (x, y)
        })
    };
    let own: BTreeSet<VertexId> = hex.iter().copied().collect();
    let mut msgs = Vec::new();
    for c in structure::enumerate_small_cycles(g, 7).cycles {
        let set: BTreeSet<VertexId> = c.iter().copied().collect();
        if set == own || set.is_disjoint(&own) {
            continue;
        }
        let k = c.len();
        if k < 7 {
            msgs.push(format!("HEX: meets a {k}-cycle {c:?}"));
            continue;
        }
        let shared: Vec<bool> = (0..k).map(|i| on_hex(c[i], c[(i + 1) % k])).collect();
        if (0..k).any(|i| shared[i] && shared[(i + 1) % k]) {
            msgs.push(format!("HEX: shares adjacent edges with septagon {c:?}"));
        }
    }
    msgs
}

fn hex(g: &Graph, f: Firing) -> Firing {
    let ball = ["a", "b", "c", "d", "e", "f", "oa", "r", "s", "od", "oe", "of"];
    let core: Vec<VertexId> = ball[..6].iter().map(|r| f.pattern.at(r)).collect();
    let mut msgs = hex_isolation(g, &core);
    msgs.extend(check_tree_like(g, &f.pattern, &ball, 24));
    f.flag(msgs).include(&["b"]).include(&["c"]).include(&["a", "d", "r", "s"]).claim(&[X, X, N(26)])
}

/// A lone pentagon pqrst. The labelling keeps pq, qr and tp off every
/// other pentagon, which puts any shared edges at rs or st.
struct Pentagon;

fn shared_edge(g: &Graph, x: VertexId, y: VertexId, own: &BTreeSet<VertexId>) -> bool {
    structure::pentagons_through(g, x)
        .iter()
        .any(|c| c.contains(&y) && c.iter().copied().collect::<BTreeSet<_>>() != *own)
}

impl BranchRule for Pentagon {
    fn id(&self) -> &'static str {
        "R19"
    }
    fn name(&self) -> &'static str {
        "pentagon"
    }
    fn fire(&self, ctx: &RuleContext) -> Option<Firing> {
        if !ctx.regular_stage() || !stage_allows("R19", ctx) {
            return None;
        }
        let g = ctx.g;
        let mut first = None;
        let mut chosen = None;
        pat::for_each_match(g, &pat::PENT, |m| {
            let own: BTreeSet<VertexId> = ["p", "q", "r", "s", "t"].iter().map(|r| m.at(r)).collect();
            let clear =
                [("p", "q"), ("q", "r"), ("t", "p")].iter().all(|&(x, y)| !shared_edge(g, m.at(x), m.at(y), &own));
            if clear {
                chosen = Some(m);
                return false;
            }
            first.get_or_insert(m);
            true
        });
        let mut msgs = Vec::new();
        let m = match (chosen, first) {
            (Some(m), _) => m,
            (None, Some(m)) => {
                msgs.push("PENT: every labelling puts pq, qr or tp on another pentagon".to_string());
                m
            }
            (None, None) => return None,
        };
        let ball = ["p", "q", "r", "s", "t", "a", "b", "c", "e"];
        msgs.extend(check_tree_like(g, &m, &ball, 18));
        Some(
            Firing::new("R19", "", m)
                .flag(msgs)
                .include(&["p"])
                .include(&["q"])
                .include(&["r", "t", "a", "b"])
                .claim(&[X, X, N(26)]),
        )
    }
}

/// Two pentagons sharing two edges.
struct PentagonPair;

/// The extra roles u, v, w: u is the common neighbour of p and s, v and w
/// their remaining neighbours, joined by an edge.
fn pp2_spec(g: &Graph, m: &PatternMatch) -> Option<(VertexId, VertexId, VertexId)> {
    let p_side: BTreeSet<VertexId> = g.neighbors(m.at("p")).iter().copied().filter(|&x| x != m.at("f")).collect();
    let s_side: BTreeSet<VertexId> = g.neighbors(m.at("s")).iter().copied().filter(|&x| x != m.at("d")).collect();
    let common: Vec<VertexId> = p_side.intersection(&s_side).copied().collect();
    let [u] = common[..] else { return None };
    let v = *p_side.iter().find(|&&x| x != u)?;
    let w = *s_side.iter().find(|&&x| x != u)?;
    g.has_edge(v, w).then_some((u, v, w))
}

impl BranchRule for PentagonPair {
    fn id(&self) -> &'static str {
        "R10"
    }
    fn name(&self) -> &'static str {
        "pentagon-pentagon-2"
    }
    fn fire(&self, ctx: &RuleContext) -> Option<Firing> {
        if !ctx.regular_stage() {
            return None;
        }
        let g = ctx.g;
        let matches = pat::all_matches(g, &pat::PP2);
        let first = matches.first()?.clone();
        let mut spec_no_wq = None;
        let mut split_rt = None;
        for m in &matches {
            if let Some((u, v, w)) = pp2_spec(g, m) {
                let mut m = m.clone();
                m.push("u", u);
                m.push("v", v);
                m.push("w", w);
                if g.has_edge(w, m.at("q")) {
                    let f = Firing::new("R10", "a", m);
                    let msgs = pp2_checks(g, &f.pattern, true);
                    return Some(f.flag(msgs).include(&["f"]).include(&["b"]).claim(&[N(8), N(10)]));
                }
                spec_no_wq.get_or_insert(m);
            } else if split_rt.is_none() && !g.has_edge(m.at("r"), m.at("t")) && !g.has_edge(m.at("s"), m.at("t")) {
                split_rt = Some(m.clone());
            }
        }
        if let Some(m) = spec_no_wq {
            let f = Firing::new("R10", "b", m);
            let msgs = pp2_checks(g, &f.pattern, true);
            return Some(f.flag(msgs).include(&["u"]).include(&["b", "p"]).include(&["c", "s"]).claim(&[
                X,
                N(16),
                N(16),
            ]));
        }
        if let Some(m) = split_rt {
            let f = Firing::new("R10", "c", m);
            let msgs = pp2_checks(g, &f.pattern, false);
            return Some(f.flag(msgs).include(&["f"]).include(&["b", "d", "g"]).include(&["p", "s"]).claim(&[
                X,
                N(16),
                N(16),
            ]));
        }
        let f = Firing::new("R10", "d", first);
        let mut msgs = pp2_checks(g, &f.pattern, false);
        msgs.extend(check_constraints(g, &f.pattern, &[], &[], &[("p", "t"), ("q", "t")]));
        Some(f.flag(msgs).include(&["g"]).include(&["e", "f", "c"]).include(&["q", "r"]).claim(&[X, N(16), N(16)]))
    }
}

fn pp2_checks(g: &Graph, m: &PatternMatch, spec: bool) -> Vec<String> {
    let group = ["a", "b", "c", "d", "e", "f", "g", "p", "q", "r", "s", "t"];
    let quiet = [("p", "q"), ("p", "r"), ("p", "s"), ("q", "r"), ("q", "s"), ("r", "s")];
    let mut msgs = check_constraints(g, m, &[&group], &[], &quiet);
    let e = |x: &str, y: &str| g.has_edge(m.at(x), m.at(y));
    if (e("p", "t") || e("q", "t")) && (e("r", "t") || e("s", "t")) {
        msgs.push("PP2: t adjacent to both sides".to_string());
    }
    if spec {
        msgs.extend(check_constraints(
            g,
            m,
            &[&["u", "t"], &["v", "t"], &["w", "t"]],
            &[],
            &[("u", "t"), ("u", "q"), ("v", "q")],
        ));
    }
    msgs
}

/// Two hexagons sharing two adjacent edges.
struct HexagonPairAdjacent;

impl BranchRule for HexagonPairAdjacent {
    fn id(&self) -> &'static str {
        "R12"
    }
    fn name(&self) -> &'static str {
        "hexagon-hexagon-2-adjacent"
    }
    fn fire(&self, ctx: &RuleContext) -> Option<Firing> {
        if !ctx.regular_stage() {
            return None;
        }
        let g = ctx.g;
        let matches = pat::all_matches(g, &pat::HH2A);
        let first = matches.first()?.clone();
        let group = roles(&CORE9, &["p", "q", "r", "s", "t", "u", "v"]);
        if let Some(m) = matches.iter().find(|m| m.at("q") == m.at("t")) {
            let f = Firing::new("R12", "a", m.clone());
            let msgs = check_constraints(g, &f.pattern, &[&group], &[("q", "t")], &[]);
            return Some(f.flag(msgs).include(&["c"]).include(&["g"]).claim(&[N(8), N(10)]));
        }
        let msgs_for = |m: &PatternMatch| check_constraints(g, m, &[&group], &[], &[]);
        if let Some(m) = matches.iter().find(|m| g.has_edge(m.at("q"), m.at("t"))) {
            let f = Firing::new("R12", "b", m.clone());
            let msgs = msgs_for(&f.pattern);
            return Some(f.flag(msgs).include(&["d"]).include(&["a", "c", "e", "h"]).claim(&[N(8), N(10)]));
        }
        let f = Firing::new("R12", "c", first);
        let msgs = msgs_for(&f.pattern);
        Some(f.flag(msgs).include(&["d"]).include(&["a", "c", "e", "h"]).include(&["q", "v", "t"]).claim(&[
            X,
            N(16),
            N(16),
        ]))
    }
}

/// A pentagon and a septagon sharing two adjacent edges.
struct PentagonSeptagon;

impl BranchRule for PentagonSeptagon {
    fn id(&self) -> &'static str {
        "R17"
    }
    fn name(&self) -> &'static str {
        "pentagon-septagon-2"
    }
    fn fire(&self, ctx: &RuleContext) -> Option<Firing> {
        if !ctx.regular_stage() || !stage_allows("R17", ctx) {
            return None;
        }
        let g = ctx.g;
        let good = |m: &PatternMatch| !g.has_edge(m.at("q"), m.at("v")) || !g.has_edge(m.at("t"), m.at("v"));
        // u = s or p = r costs a vertex in one of the pair branches
        let apart = |m: &PatternMatch| m.at("u") != m.at("s") && m.at("p") != m.at("r");
        let mut first = None;
        let mut first_good = None;
        let mut chosen = None;
        pat::for_each_match(g, &pat::PS2, |m| {
            if good(&m) && apart(&m) {
                chosen = Some(m);
                return false;
            }
            if good(&m) {
                first_good.get_or_insert(m.clone());
            }
            first.get_or_insert(m);
            true
        });
        let (m, is_good) = match (chosen.or(first_good), first) {
            (Some(m), _) => (m, true),
            (None, Some(m)) => (m, false),
            (None, None) => return None,
        };
        let one = roles(&CORE9, &["p", "u", "t", "v"]);
        let two = roles(&CORE9, &["u", "p", "q", "v"]);
        let mut msgs = check_constraints(g, &m, &[&one, &two], &[], &[]);
        if !is_good {
            msgs.push("PS2: no labelling has the good property".to_string());
        }
        Some(Firing::new("R17", "", m).flag(msgs).include(&["a"]).include(&["e", "i"]).include(&["b", "h"]).claim(&[
            X,
            N(16),
            N(16),
        ]))
    }
}

/// Three pentagons in a chain.
struct PentagonTriple;

impl BranchRule for PentagonTriple {
    fn id(&self) -> &'static str {
        "R18"
    }
    fn name(&self) -> &'static str {
        "pentagon-pentagon-pentagon"
    }
    fn fire(&self, ctx: &RuleContext) -> Option<Firing> {
        if !ctx.regular_stage() || !stage_allows("R18", ctx) {
            return None;
        }
        let g = ctx.g;
        let matches = pat::all_matches(g, &pat::PPP);
        let first = matches.first()?.clone();
        let core = ["a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k"];
        let groups =
            [roles(&core, &["p", "u", "v"]), roles(&core, &["q", "s", "t"]), roles(&core, &["p", "u", "q", "r"])];
        let groups: Vec<&[&str]> = groups.iter().map(|v| v.as_slice()).collect();
        if let Some(m) = matches.iter().find(|m| m.at("p") == m.at("v")) {
            let f = Firing::new("R18", "a", m.clone());
            let msgs = check_constraints(g, &f.pattern, &groups, &[("p", "v")], &[]);
            return Some(f.flag(msgs).include(&["h"]).include(&["e", "k", "b"]).include(&["g", "q"]).claim(&[
                N(10),
                N(16),
                N(18),
            ]));
        }
        let f = Firing::new("R18", "b", first);
        let msgs = check_constraints(g, &f.pattern, &groups, &[], &[]);
        Some(f.flag(msgs).include(&["h"]).include(&["e", "k"]).include(&["g", "q"]).claim(&[X, N(16), N(16)]))
    }
}

/// Girth at least seven: branch around the lowest edge.
struct Girth7Edge;

impl BranchRule for Girth7Edge {
    fn id(&self) -> &'static str {
        "R20"
    }
    fn name(&self) -> &'static str {
        "edge"
    }
    fn fire(&self, ctx: &RuleContext) -> Option<Firing> {
        if !ctx.regular_stage() || !stage_allows("R20", ctx) {
            return None;
        }
        let g = ctx.g;
        let (u, v) = *g.edges().first()?;
        let pu: Vec<VertexId> = g.neighbors(u).iter().copied().filter(|&x| x != v).collect();
        let pv: Vec<VertexId> = g.neighbors(v).iter().copied().filter(|&x| x != u).collect();
        let m =
            PatternMatch::new("edge", &[("u", u), ("v", v), ("p", pu[0]), ("q", pu[1]), ("r", pv[0]), ("s", pv[1])]);
        let msgs: Vec<String> = check_tree_like(g, &m, &["u", "v", "p", "q", "r", "s"], 14).into_iter().collect();
        Some(
            Firing::new("R20", "", m)
                .flag(msgs)
                .include(&["u"])
                .include(&["v"])
                .include(&["p", "q", "r", "s"])
                .claim(&[X, X, N(26)]),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::*;

    fn fired(g: &Graph) -> Option<String> {
        RuleRegistry::standard().first_firing(g).map(|f| f.label())
    }

    #[test]
    fn registry_order_and_lookup() {
        let r = RuleRegistry::standard();
        assert_eq!(r.ids().len(), 20);
        assert_eq!(r.ids()[0], "R1");
        assert_eq!(r.ids()[19], "R20");
        assert_eq!(r.get("pentagon").unwrap().id(), "R19");
        let r = r.without("R19");
        assert_eq!(r.ids().len(), 19);
        assert!(r.get("R19").is_none());
    }

    #[test]
    fn high_degree_vertex() {
        let mut g = petersen();
        // give vertex 0 a fourth neighbour through a new K4 hanging off it
        let base = g.id_bound();
        for _ in 0..4 {
            g.add_vertex();
        }
        for i in 0..4 {
            for j in i + 1..4 {
                if (i, j) != (0, 1) {
                    g.add_edge(base + i, base + j).unwrap();
                }
            }
        }
        g.add_edge(0, base).unwrap();
        g.add_edge(base + 1, 5).unwrap();
        let f = RuleRegistry::standard().first_firing(&g).unwrap();
        assert!(f.rule.starts_with('R'));
    }

    #[test]
    fn petersen_rules() {
        // two hexagons sharing two opposite edges come before pentagon pairs
        assert_eq!(fired(&petersen()).as_deref(), Some("R9"));
        let r = RuleRegistry::standard().without("R7").without("R8").without("R9");
        let f = r.first_firing(&petersen()).unwrap();
        assert_eq!(f.rule, "R10");
        // skipping the earlier rules breaks the distinctness the match relies on
        assert!(!f.violations.is_empty());
    }

    #[test]
    fn dodecahedron_hits_pentagon_triple() {
        let f = RuleRegistry::standard().first_firing(&dodecahedron()).unwrap();
        assert_eq!(f.rule, "R18");
        assert!(f.violations.is_empty(), "{:?}", f.violations);
    }

    #[test]
    fn heawood_hits_hexagon_rules() {
        let f = RuleRegistry::standard().first_firing(&heawood()).unwrap();
        assert!(["R8", "R9", "R12", "R13", "R14", "R15", "R16"].contains(&f.rule), "{}", f.rule);
    }

    #[test]
    fn girth_seven_hits_edge_rule() {
        for g in [mcgee(), tutte_coxeter()] {
            let f = RuleRegistry::standard().first_firing(&g).unwrap();
            assert_eq!(f.rule, "R20");
            assert!(f.violations.is_empty());
            assert_eq!(f.branches.len(), 3);
        }
    }

    #[test]
    fn include_sets_are_independent() {
        for g in [petersen(), dodecahedron(), heawood(), mcgee(), cube(), k33()] {
            if let Some(f) = RuleRegistry::standard().first_firing(&g) {
                for b in &f.branches {
                    assert!(g.is_independent(b.included()), "{} {b}", f.label());
                }
            }
        }
    }

    #[test]
    fn forms_render() {
        assert_eq!(form_string(&[X, N(16), N(16)]), "(X,16,16)");
    }
}
