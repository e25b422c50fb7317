//! Brute-force ground truth.
//!
//! Deliberately independent of the solver: it only reads the [`Graph`]
//! adjacency and never touches the reducer or the rule table.

use thiserror::Error;

use crate::graph::{Graph, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("graph has {n} vertices, oracle limit is {max_n}")]
    TooLarge { n: usize, max_n: usize },
    #[error("vertex {0} has degree above 2")]
    DegreeTooHigh(VertexId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimit {
    pub max_n: usize,
}

impl Default for OracleLimit {
    fn default() -> Self {
        OracleLimit { max_n: 26 }
    }
}

/// Hard ceiling from the u64 bitmask representation.
pub const BITMASK_CEILING: usize = 64;

pub fn brute_mis(g: &Graph) -> Result<Vec<VertexId>, OracleError> {
    brute_mis_with(g, OracleLimit::default())
}

pub fn brute_mis_with(g: &Graph, limit: OracleLimit) -> Result<Vec<VertexId>, OracleError> {
    let n = g.n();
    if n > limit.max_n || n > BITMASK_CEILING {
        return Err(OracleError::TooLarge { n, max_n: limit.max_n.min(BITMASK_CEILING) });
    }
    let ids = g.vertex_list();
    let mut masks = vec![0u64; n];
    for (i, &v) in ids.iter().enumerate() {
        for &w in g.neighbors(v) {
            let j = ids.binary_search(&w).unwrap();
            masks[i] |= 1 << j;
        }
    }
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut s = Search { nbr: &masks, best: 0, best_size: 0 };
    s.go(all, 0);
    Ok((0..n).filter(|&i| s.best >> i & 1 == 1).map(|i| ids[i]).collect())
}

struct Search<'a> {
    nbr: &'a [u64],
    best: u64,
    best_size: u32,
}

impl Search<'_> {
    fn go(&mut self, mut rest: u64, mut chosen: u64) {
        // take vertices of residual degree <= 1 greedily
        loop {
            let mut changed = false;
            let mut r = rest;
            while r != 0 {
                let i = r.trailing_zeros() as usize;
                r &= r - 1;
                if rest >> i & 1 == 0 {
                    continue;
                }
                if (self.nbr[i] & rest).count_ones() <= 1 {
                    chosen |= 1 << i;
                    rest &= !(self.nbr[i] | 1 << i);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if chosen.count_ones() + rest.count_ones() <= self.best_size {
            return;
        }
        if rest == 0 {
            self.best = chosen;
            self.best_size = chosen.count_ones();
            return;
        }
        let mut pick = 0;
        let mut pick_deg = 0;
        let mut r = rest;
        while r != 0 {
            let i = r.trailing_zeros() as usize;
            r &= r - 1;
            let d = (self.nbr[i] & rest).count_ones();
            if d > pick_deg {
                pick = i;
                pick_deg = d;
            }
        }
        self.go(rest & !(self.nbr[pick] | 1 << pick), chosen | 1 << pick);
        self.go(rest & !(1 << pick), chosen);
    }
}

/// Exact MIS for max degree <= 2: alternate along paths and cycles.
pub fn mis_degree2(g: &Graph) -> Result<Vec<VertexId>, OracleError> {
    if let Some(v) = g.vertices().find(|&v| g.degree(v) > 2) {
        return Err(OracleError::DegreeTooHigh(v));
    }
    let mut out = Vec::new();
    for comp in g.connected_components() {
        let start = comp.iter().copied().find(|&v| g.degree(v) <= 1);
        let is_cycle = start.is_none();
        let mut order = Vec::with_capacity(comp.len());
        let mut prev = usize::MAX;
        let mut cur = start.unwrap_or(comp[0]);
        loop {
            order.push(cur);
            let next = g.neighbors(cur).iter().copied().find(|&w| w != prev && w != order[0]);
            match next {
                Some(w) if order.len() < comp.len() => {
                    prev = cur;
                    cur = w;
                }
                _ => break,
            }
        }
        let take = if is_cycle { comp.len() / 2 } else { comp.len().div_ceil(2) };
        out.extend(order.iter().step_by(2).take(take));
    }
    out.sort_unstable();
    Ok(out)
}
