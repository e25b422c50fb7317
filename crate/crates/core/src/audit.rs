//! Recurrence roots and the run-time check of claimed measure drops.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;
use crate::rules::{form_string, Claim, Firing};
use crate::structure::{self, PatternMatch};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RootError {
    #[error("empty branching form")]
    Empty,
    #[error("branching form entries must be positive")]
    NonPositive,
}

/// The unique x >= 1 with Σ x^(-a_i) = 1, by bisection.
pub fn recurrence_root(form: &[u32]) -> Result<f64, RootError> {
    if form.is_empty() {
        return Err(RootError::Empty);
    }
    if form.contains(&0) {
        return Err(RootError::NonPositive);
    }
    let f = |x: f64| form.iter().map(|&a| x.powi(-(a as i32))).sum::<f64>() - 1.0;
    let mut lo = 1.0f64;
    let mut hi = (form.len() as f64).max(2.0);
    // f is decreasing, f(lo) >= 0 >= f(hi)
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Branching forms that survive once every X entry is expanded.
pub const FORM_CATALOG: &[&[u32]] = &[
    &[8, 10],
    &[10, 10],
    &[8, 12],
    &[6, 14],
    &[10, 16, 18],
    &[12, 16, 16],
    &[16, 24, 16, 16],
    &[18, 22, 16, 16],
    &[20, 20, 16, 16],
    &[12, 12, 26],
    &[12, 16, 24, 26],
    &[12, 18, 22, 26],
    &[12, 20, 20, 26],
    &[16, 24, 18, 22, 26],
    &[16, 24, 20, 20, 26],
    &[18, 22, 20, 20, 26],
    &[16, 24, 16, 24, 26],
    &[18, 22, 18, 22, 26],
    &[20, 20, 20, 20, 26],
];

pub fn worst_root(catalog: &[&[u32]]) -> Option<(Vec<u32>, f64)> {
    catalog.iter().filter_map(|f| recurrence_root(f).ok().map(|r| (f.to_vec(), r))).fold(
        None,
        |best: Option<(Vec<u32>, f64)>, (f, r)| match best {
            Some((_, br)) if br >= r => best,
            _ => Some((f, r)),
        },
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchAudit {
    pub rule: String,
    pub sub_case: String,
    pub claimed: Vec<String>,
    pub measured: Vec<i64>,
    pub x_flags: Vec<bool>,
    pub child_fine: Vec<bool>,
    pub violations: Vec<String>,
    pub pattern: PatternMatch,
    pub n: usize,
    pub eta: usize,
}

impl BranchAudit {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Compares the drop η(G) - η(γ(child_i)) of each branch with the claims.
/// `reduced` holds γ(child_i) in branch order.
pub fn audit_branch(g: &Graph, firing: &Firing, reduced: &[Graph]) -> BranchAudit {
    let eta = g.eta() as i64;
    let measured: Vec<i64> = reduced.iter().map(|h| eta - h.eta() as i64).collect();
    let child_fine: Vec<bool> = reduced.iter().map(structure::is_fine).collect();
    let exhausted: Vec<bool> = reduced.iter().map(Graph::is_empty).collect();
    let k = firing.branches.len();
    let x_flags: Vec<bool> = (0..k).map(|i| firing.claims.iter().any(|form| form.get(i) == Some(&Claim::X))).collect();
    let mut violations = firing.violations.clone();

    let meets = |form: &[Claim]| form_met(form, &measured, &child_fine, &exhausted);
    if !firing.claims.iter().any(|f| meets(f)) {
        let forms: Vec<String> = firing.claims.iter().map(|f| form_string(f)).collect();
        violations.push(format!("measured {measured:?} meets none of {}", forms.join(" or ")));
    }

    for (i, b) in firing.branches.iter().enumerate() {
        if !x_flags[i] {
            continue;
        }
        match b.included() {
            [u] if structure::complete_pentagon_property(g, *u) => {
                violations.push(format!("X-branch vertex {u} has the complete-pentagon property"));
            }
            [_] => {}
            _ => violations.push(format!("X-branch {b} is not a single inclusion")),
        }
    }

    let p = structure::cycle_profile(g);
    let cubic = g.n() > 0 && g.min_degree() == 3 && g.max_degree() == 3;
    if cubic && !p.triangles && !p.rectangles {
        for (i, b) in firing.branches.iter().enumerate() {
            if !b.included().is_empty() && measured[i] < 10 && !exhausted[i] {
                violations.push(format!("include branch {i} of a girth-5 cubic graph dropped only {}", measured[i]));
            }
        }
    }

    BranchAudit {
        rule: firing.rule.to_string(),
        sub_case: firing.case.to_string(),
        claimed: firing.claims.iter().map(|f| form_string(f)).collect(),
        measured,
        x_flags,
        child_fine,
        violations,
        pattern: firing.pattern.clone(),
        n: g.n(),
        eta: g.eta(),
    }
}

/// X entries are tied to their branch; numeric entries may be matched to the
/// remaining branches in any order. A branch whose reduced child is empty
/// has used up the whole measure and meets any claim.
fn form_met(form: &[Claim], measured: &[i64], child_fine: &[bool], exhausted: &[bool]) -> bool {
    if form.len() != measured.len() {
        return false;
    }
    let mut need = Vec::new();
    let mut have = Vec::new();
    for (i, c) in form.iter().enumerate() {
        if exhausted[i] {
            have.push(i64::MAX);
        }
        match *c {
            _ if exhausted[i] => need.push(0),
            Claim::X => {
                let m = measured[i];
                if m < 10 || (m < 12 && !child_fine[i]) {
                    return false;
                }
            }
            Claim::AtLeast(a) => {
                need.push(even_up(a as i64));
                have.push(measured[i]);
            }
        }
    }
    need.sort_unstable_by(|a, b| b.cmp(a));
    have.sort_unstable_by(|a, b| b.cmp(a));
    need.iter().zip(&have).all(|(n, h)| h >= n)
}

// η of a graph without degree-1 vertices is even, so an odd bound on a
// difference of two such values rounds up.
fn even_up(a: i64) -> i64 {
    a + (a & 1)
}

/// Per-rule summary kept for every branching, violations kept in full.
#[derive(Clone, Debug, Default, Serialize)]
pub struct AuditReport {
    pub branchings: u64,
    pub per_rule: BTreeMap<String, RuleSummary>,
    pub violations: Vec<BranchAudit>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct RuleSummary {
    pub fired: u64,
    /// Smallest measured drop seen per branch position.
    pub min_measured: Vec<i64>,
}

impl AuditReport {
    pub fn record(&mut self, a: BranchAudit) {
        self.branchings += 1;
        let key = format!("{}{}", a.rule, a.sub_case);
        let s = self.per_rule.entry(key).or_default();
        s.fired += 1;
        if s.min_measured.is_empty() {
            s.min_measured = a.measured.clone();
        } else {
            for (m, &x) in s.min_measured.iter_mut().zip(&a.measured) {
                *m = (*m).min(x);
            }
        }
        if !a.is_clean() {
            self.violations.push(a);
        }
    }

    pub fn merge(&mut self, other: AuditReport) {
        self.branchings += other.branchings;
        for (k, s) in other.per_rule {
            let e = self.per_rule.entry(k).or_default();
            e.fired += s.fired;
            if e.min_measured.is_empty() {
                e.min_measured = s.min_measured;
            } else {
                for (m, x) in e.min_measured.iter_mut().zip(s.min_measured) {
                    *m = (*m).min(x);
                }
            }
        }
        self.violations.extend(other.violations);
    }

    pub fn violation_count(&self) -> usize {
        self.violations.iter().map(|a| a.violations.len()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn headline_root() {
        let r = recurrence_root(&[16, 16, 16, 24]).unwrap();
        assert_abs_diff_eq!(r, 1.0821, epsilon = 1e-4);
    }

    #[test]
    fn unit_form_is_two() {
        assert_abs_diff_eq!(recurrence_root(&[1, 1]).unwrap(), 2.0, epsilon = 1e-9);
    }

    #[test]
    fn frozen_root_4_10() {
        // x^-4 + x^-10 = 1, solved independently and pinned
        assert_abs_diff_eq!(recurrence_root(&[4, 10]).unwrap(), 1.111983, epsilon = 1e-6);
    }

    #[test]
    fn refuses_bad_forms() {
        assert_eq!(recurrence_root(&[]), Err(RootError::Empty));
        assert_eq!(recurrence_root(&[3, 0]), Err(RootError::NonPositive));
    }

    #[test]
    fn worst_of_catalog() {
        let (form, r) = worst_root(FORM_CATALOG).unwrap();
        assert_eq!(form, vec![16, 24, 16, 16]);
        assert_abs_diff_eq!(r, 1.0821, epsilon = 1e-4);
        let (_, small) = worst_root(&[&[8, 10]]).unwrap();
        assert!(small < 1.0821);
        let a = recurrence_root(&[6, 14]).unwrap();
        let b = recurrence_root(&[10, 10]).unwrap();
        assert_eq!(worst_root(&[&[6, 14], &[10, 10]]).unwrap().1, a.max(b));
    }

    #[test]
    fn permuted_numeric_claims() {
        use Claim::*;
        let no = [false; 3];
        assert!(form_met(&[AtLeast(8), AtLeast(12)], &[12, 8], &no[..2], &no[..2]));
        assert!(!form_met(&[AtLeast(8), AtLeast(12)], &[10, 10], &no[..2], &no[..2]));
        assert!(form_met(&[X, AtLeast(16), AtLeast(16)], &[10, 16, 18], &[true, false, false], &no));
        assert!(!form_met(&[X, AtLeast(16), AtLeast(16)], &[10, 16, 18], &no, &no));
        assert!(form_met(&[X, X, AtLeast(26)], &[12, 12, 26], &no, &no));
        assert!(form_met(&[AtLeast(25)], &[26], &no[..1], &no[..1]));
        // the whole measure is gone in the last branch
        assert!(!form_met(&[X, X, AtLeast(26)], &[24, 24, 24], &no, &no));
        assert!(form_met(&[X, X, AtLeast(26)], &[24, 24, 24], &no, &[false, false, true]));
    }
}
