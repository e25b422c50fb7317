//! Subgraph templates for the 3-regular stage and a backtracking matcher.
//!
//! A template lists core roles, the edges between them and "outside" roles:
//! the third neighbour of a core role that has two template neighbours.
//! Matching is injective on core roles and non-induced. Outside roles may
//! coincide with anything; the validators decide whether that is allowed.

use std::collections::BTreeSet;

use crate::graph::{Graph, VertexId};
use crate::structure::PatternMatch;

pub struct Template {
    pub name: &'static str,
    /// Every role after the first must have a template edge to an earlier one.
    pub core: &'static [&'static str],
    pub edges: &'static [(&'static str, &'static str)],
    pub outs: &'static [(&'static str, &'static str)],
}

pub const PH2: Template = Template {
    name: "PH2",
    core: &["b", "a", "c", "d", "e", "f", "g", "h"],
    edges: &[
        ("a", "b"),
        ("b", "c"),
        ("c", "d"),
        ("d", "e"),
        ("e", "a"),
        ("b", "f"),
        ("f", "g"),
        ("g", "h"),
        ("h", "e"),
    ],
    outs: &[],
};

pub const HH3: Template = Template {
    name: "HH3",
    core: &["c", "b", "d", "h", "a", "e", "g", "f"],
    edges: &[
        ("a", "b"),
        ("b", "c"),
        ("c", "d"),
        ("d", "e"),
        ("e", "f"),
        ("f", "a"),
        ("c", "h"),
        ("h", "g"),
        ("g", "f"),
    ],
    outs: &[],
};

pub const HH2NC: Template = Template {
    name: "HH2nc",
    core: &["a", "b", "c", "d", "e", "f", "h", "i"],
    edges: &[
        ("a", "b"),
        ("b", "c"),
        ("c", "d"),
        ("d", "e"),
        ("e", "f"),
        ("f", "a"),
        ("b", "h"),
        ("h", "e"),
        ("f", "i"),
        ("i", "c"),
    ],
    outs: &[("g", "d")],
};

pub const PP2: Template = Template {
    name: "PP2",
    core: &["a", "b", "c", "d", "e", "f", "g"],
    edges: &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("e", "a"), ("b", "f"), ("f", "g"), ("g", "e")],
    outs: &[("t", "a"), ("q", "c"), ("s", "d"), ("p", "f"), ("r", "g")],
};

pub const PH1: Template = Template {
    name: "PH1",
    core: &["a", "b", "c", "d", "e", "f", "g", "h", "i"],
    edges: &[
        ("a", "b"),
        ("b", "c"),
        ("c", "d"),
        ("d", "e"),
        ("e", "a"),
        ("c", "f"),
        ("f", "h"),
        ("h", "i"),
        ("i", "g"),
        ("g", "d"),
    ],
    outs: &[("p", "a"), ("q", "b"), ("r", "f"), ("s", "h"), ("t", "i"), ("u", "g"), ("v", "e")],
};

pub const HH2A: Template = Template {
    name: "HH2a",
    core: &["a", "b", "c", "d", "e", "f", "g", "h", "i"],
    edges: &[
        ("a", "b"),
        ("b", "c"),
        ("c", "d"),
        ("d", "e"),
        ("e", "f"),
        ("f", "a"),
        ("c", "g"),
        ("g", "h"),
        ("h", "i"),
        ("i", "e"),
    ],
    outs: &[("q", "a"), ("p", "b"), ("v", "d"), ("r", "f"), ("u", "g"), ("t", "h"), ("s", "i")],
};

pub const HH1: Template = Template {
    name: "HH1",
    core: &["a", "b", "c", "d", "e", "f", "g", "h", "i", "j"],
    edges: &[
        ("a", "b"),
        ("b", "c"),
        ("c", "d"),
        ("d", "e"),
        ("e", "f"),
        ("f", "a"),
        ("f", "g"),
        ("g", "h"),
        ("h", "i"),
        ("i", "j"),
        ("j", "e"),
    ],
    outs: &[("p", "a"), ("q", "b"), ("r", "c"), ("s", "d"), ("t", "j"), ("u", "i"), ("v", "h"), ("w", "g")],
};

pub const HS2: Template = Template {
    name: "HS2",
    core: &["a", "b", "c", "d", "e", "f", "g", "h", "i", "j"],
    edges: &[
        ("a", "b"),
        ("b", "c"),
        ("c", "d"),
        ("d", "e"),
        ("e", "f"),
        ("f", "a"),
        ("c", "g"),
        ("g", "h"),
        ("h", "i"),
        ("i", "j"),
        ("j", "e"),
    ],
    outs: &[("oa", "a"), ("ob", "b"), ("od", "d"), ("of", "f"), ("og", "g"), ("t", "h"), ("u", "i"), ("oj", "j")],
};

pub const HS3: Template = Template {
    name: "HS3",
    core: &["a", "b", "c", "d", "e", "f", "g", "h", "i"],
    edges: &[
        ("a", "f"),
        ("f", "e"),
        ("e", "d"),
        ("a", "b"),
        ("b", "c"),
        ("c", "d"),
        ("a", "g"),
        ("g", "h"),
        ("h", "i"),
        ("i", "d"),
    ],
    outs: &[("ob", "b"), ("oc", "c"), ("p", "f"), ("t", "e"), ("q", "g"), ("r", "h"), ("s", "i")],
};

pub const HEX: Template = Template {
    name: "HEX",
    core: &["a", "b", "c", "d", "e", "f"],
    edges: &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("e", "f"), ("f", "a")],
    outs: &[("oa", "a"), ("r", "b"), ("s", "c"), ("od", "d"), ("oe", "e"), ("of", "f")],
};

pub const PS2: Template = Template {
    name: "PS2",
    core: &["a", "b", "c", "d", "e", "g", "i", "h", "f"],
    edges: &[
        ("a", "b"),
        ("b", "c"),
        ("c", "d"),
        ("d", "e"),
        ("e", "a"),
        ("e", "g"),
        ("g", "i"),
        ("i", "h"),
        ("h", "f"),
        ("f", "b"),
    ],
    outs: &[("v", "a"), ("r", "c"), ("s", "d"), ("q", "f"), ("t", "g"), ("p", "h"), ("u", "i")],
};

pub const PPP: Template = Template {
    name: "PPP",
    core: &["e", "d", "f", "g", "h", "a", "b", "c", "i", "j", "k"],
    edges: &[
        ("e", "d"),
        ("d", "f"),
        ("f", "g"),
        ("g", "h"),
        ("h", "e"),
        ("e", "a"),
        ("a", "b"),
        ("b", "c"),
        ("c", "d"),
        ("g", "i"),
        ("i", "j"),
        ("j", "k"),
        ("k", "h"),
    ],
    outs: &[("p", "a"), ("q", "b"), ("r", "c"), ("s", "f"), ("t", "i"), ("u", "j"), ("v", "k")],
};

pub const PENT: Template = Template {
    name: "PENT",
    core: &["p", "q", "r", "s", "t"],
    edges: &[("p", "q"), ("q", "r"), ("r", "s"), ("s", "t"), ("t", "p")],
    outs: &[("a", "p"), ("b", "q"), ("c", "r"), ("d", "s"), ("e", "t")],
};

struct Compiled {
    tnbrs: Vec<Vec<usize>>,
    anchor: Vec<usize>,
    outs: Vec<usize>,
}

fn compile(t: &Template) -> Compiled {
    let idx = |r: &str| t.core.iter().position(|&c| c == r).unwrap_or_else(|| panic!("{}: unknown role {r}", t.name));
    let k = t.core.len();
    let mut tnbrs = vec![Vec::new(); k];
    for &(x, y) in t.edges {
        let (i, j) = (idx(x), idx(y));
        tnbrs[i].push(j);
        tnbrs[j].push(i);
    }
    let anchor = (0..k)
        .map(|i| {
            if i == 0 {
                0
            } else {
                *tnbrs[i]
                    .iter()
                    .filter(|&&j| j < i)
                    .min()
                    .unwrap_or_else(|| panic!("{}: role {} has no earlier neighbour", t.name, t.core[i]))
            }
        })
        .collect();
    let outs = t.outs.iter().map(|&(_, c)| idx(c)).collect();
    Compiled { tnbrs, anchor, outs }
}

/// Calls `visit` on each match, in order of ascending image of the first
/// role, until it returns false.
pub fn for_each_match(g: &Graph, t: &Template, mut visit: impl FnMut(PatternMatch) -> bool) {
    let c = compile(t);
    let k = t.core.len();
    let mut img = vec![usize::MAX; k];
    let mut used = BTreeSet::new();
    for s in g.vertices() {
        img[0] = s;
        used.insert(s);
        let go_on = extend(g, t, &c, 1, &mut img, &mut used, &mut visit);
        used.remove(&s);
        if !go_on {
            return;
        }
    }
}

fn extend(
    g: &Graph,
    t: &Template,
    c: &Compiled,
    i: usize,
    img: &mut Vec<VertexId>,
    used: &mut BTreeSet<VertexId>,
    visit: &mut impl FnMut(PatternMatch) -> bool,
) -> bool {
    if i == img.len() {
        return match bind(g, t, c, img) {
            Some(m) => visit(m),
            None => true,
        };
    }
    let cands: Vec<VertexId> = g.neighbors(img[c.anchor[i]]).to_vec();
    for v in cands {
        if used.contains(&v) {
            continue;
        }
        if c.tnbrs[i].iter().any(|&j| j < i && !g.has_edge(img[j], v)) {
            continue;
        }
        img[i] = v;
        used.insert(v);
        let go_on = extend(g, t, c, i + 1, img, used, visit);
        used.remove(&v);
        if !go_on {
            return false;
        }
    }
    true
}

fn bind(g: &Graph, t: &Template, c: &Compiled, img: &[VertexId]) -> Option<PatternMatch> {
    let mut m = PatternMatch::new(t.name, &[]);
    for (i, r) in t.core.iter().enumerate() {
        m.push(r, img[i]);
    }
    for (o, &(role, _)) in t.outs.iter().enumerate() {
        let ci = c.outs[o];
        let inside: Vec<VertexId> = c.tnbrs[ci].iter().map(|&j| img[j]).collect();
        let mut rest = g.neighbors(img[ci]).iter().filter(|w| !inside.contains(w));
        let out = *rest.next()?;
        if rest.next().is_some() {
            return None;
        }
        m.push(role, out);
    }
    Some(m)
}

pub fn first_match(g: &Graph, t: &Template) -> Option<PatternMatch> {
    let mut found = None;
    for_each_match(g, t, |m| {
        found = Some(m);
        false
    });
    found
}

pub fn all_matches(g: &Graph, t: &Template) -> Vec<PatternMatch> {
    let mut out = Vec::new();
    for_each_match(g, t, |m| {
        out.push(m);
        true
    });
    out
}

/// Distinctness inside each group (except the listed pairs) and absence of
/// the listed edges. Returns one message per failed constraint.
pub fn check_constraints(
    g: &Graph,
    m: &PatternMatch,
    groups: &[&[&str]],
    may_coincide: &[(&str, &str)],
    non_edges: &[(&str, &str)],
) -> Vec<String> {
    let mut out = Vec::new();
    let exempt = |x: &str, y: &str| may_coincide.iter().any(|&(a, b)| (a == x && b == y) || (a == y && b == x));
    for group in groups {
        for (i, &x) in group.iter().enumerate() {
            for &y in &group[i + 1..] {
                if m.at(x) == m.at(y) && !exempt(x, y) {
                    out.push(format!("{}: {x} and {y} coincide at {}", m.rule, m.at(x)));
                }
            }
        }
    }
    for &(x, y) in non_edges {
        if g.has_edge(m.at(x), m.at(y)) {
            out.push(format!("{}: unexpected edge {x}-{y}", m.rule));
        }
    }
    out
}

/// Checks that the listed roles plus their neighbours outside the list are
/// all distinct, i.e. the ball around them looks like a tree.
pub fn check_tree_like(g: &Graph, m: &PatternMatch, roles: &[&str], expected: usize) -> Option<String> {
    let base: BTreeSet<VertexId> = roles.iter().map(|r| m.at(r)).collect();
    let mut seen = base.clone();
    let mut total = base.len();
    for r in roles {
        for &w in g.neighbors(m.at(r)) {
            if base.contains(&w) {
                continue;
            }
            total += 1;
            seen.insert(w);
        }
    }
    (seen.len() != expected || total != expected)
        .then(|| format!("{}: expected {expected} distinct vertices, found {}", m.rule, seen.len()))
}
