//! DIMACS edge format: `c` comments, one `p edge N M` line, M `e u v` lines.

use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct DimacsError {
    pub line: usize,
    pub msg: String,
}

fn err(line: usize, msg: impl Into<String>) -> DimacsError {
    DimacsError { line, msg: msg.into() }
}

/// Parses a graph with vertex ids 1..=N mapped to 0..N.
/// `max_degree` rejects inputs above that degree.
pub fn parse(text: &str, max_degree: Option<usize>) -> Result<Graph, DimacsError> {
    let mut g: Option<Graph> = None;
    let mut declared = 0;
    let mut seen = 0;
    let mut last = 0;
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        last = ln;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts[0] {
            "p" => {
                if g.is_some() {
                    return Err(err(ln, "second problem line"));
                }
                let [_, kind, n, m] = parts[..] else {
                    return Err(err(ln, "expected `p edge N M`"));
                };
                if kind != "edge" && kind != "col" {
                    return Err(err(ln, format!("unsupported problem kind `{kind}`")));
                }
                let n: usize = n.parse().map_err(|_| err(ln, format!("bad vertex count `{n}`")))?;
                declared = m.parse().map_err(|_| err(ln, format!("bad edge count `{m}`")))?;
                g = Some(Graph::new(n));
            }
            "e" => {
                let graph = g.as_mut().ok_or_else(|| err(ln, "edge before problem line"))?;
                let [_, a, b] = parts[..] else {
                    return Err(err(ln, "expected `e u v`"));
                };
                let id = |s: &str| -> Result<usize, DimacsError> {
                    let v: usize = s.parse().map_err(|_| err(ln, format!("bad vertex id `{s}`")))?;
                    if v == 0 || v > graph.n() {
                        return Err(err(ln, format!("vertex {v} out of range 1..={}", graph.n())));
                    }
                    Ok(v - 1)
                };
                let (a, b) = (id(a)?, id(b)?);
                if a == b {
                    return Err(err(ln, format!("self-loop on vertex {}", a + 1)));
                }
                if graph.has_edge(a, b) {
                    return Err(err(ln, format!("duplicate edge {} {}", a + 1, b + 1)));
                }
                graph.add_edge(a, b).unwrap();
                if let Some(cap) = max_degree {
                    for v in [a, b] {
                        if graph.degree(v) > cap {
                            return Err(err(ln, format!("vertex {} exceeds degree {cap}", v + 1)));
                        }
                    }
                }
                seen += 1;
            }
            other => return Err(err(ln, format!("unknown line type `{other}`"))),
        }
    }
    let g = g.ok_or_else(|| err(last.max(1), "missing problem line"))?;
    if seen != declared {
        return Err(err(last, format!("problem line declares {declared} edges, found {seen}")));
    }
    Ok(g)
}

/// Canonical output: edges in ascending order. Requires ids 0..n.
pub fn write(g: &Graph) -> String {
    assert_eq!(g.id_bound(), g.n(), "write needs a graph with contiguous ids");
    let edges = g.edges();
    let mut out = format!("p edge {} {}\n", g.n(), edges.len());
    for (a, b) in edges {
        out.push_str(&format!("e {} {}\n", a + 1, b + 1));
    }
    out
}
