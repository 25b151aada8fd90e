//! The boundary map `F` of the cross section: a sheeted union of intervals
//! `I_0, …, I_p` with a Möbius branch on each piece.

use serde::{Deserialize, Serialize};

use crate::boundary::{act, act_exact, BoundaryPoint, ExactPoint, Interval, Rational};
use crate::error::Result;
use crate::group::{GeneratorSet, GroupElement};

/// One local diffeomorphism `domain × {source} → I_target × {target}`, `x ↦ map.x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Branch {
    pub domain: Interval,
    pub source: usize,
    #[serde(rename = "element")]
    pub map: GroupElement,
    pub target: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DynamicalSystem {
    pub p: u64,
    pub intervals: Vec<Interval>,
    pub branches: Vec<Branch>,
}

pub fn build_system(p: u64) -> Result<DynamicalSystem> {
    let g = GeneratorSet::new(p)?;
    let (pi, pu) = (p as i64, p as usize);
    let id = GroupElement::identity();
    let tinv = g.t().inverse();
    let hp1 = g.h(p - 1);
    let fin = ExactPoint::frac;
    let inf = ExactPoint::Infinity;
    let iv = Interval::new;
    let br = |domain, source, map, target| Branch { domain, source, map, target };

    let mut branches = vec![
        br(iv(inf, fin(-1, pi)), pu, hp1 * g.t(), 1),
        br(iv(fin(-1, pi), fin(0, 1)), pu, hp1 * g.t(), pu),
        br(iv(fin(0, 1), fin(1, pi)), 0, tinv * g.h(1), 0),
        br(iv(fin(1, pi), inf), 0, id, 1),
        br(iv(fin(pi - 1, pi), fin(1, 1)), pu - 1, hp1, pu),
        br(iv(fin(1, 1), inf), pu - 1, tinv, 0),
    ];
    for k in 1..p.saturating_sub(1) {
        let ki = k as i64;
        let target = g.kprime(k + 1) as usize + 1;
        branches.push(br(iv(fin(ki, pi), fin(ki + 1, pi)), k as usize, g.h(k + 1), target));
        branches.push(br(iv(fin(ki + 1, pi), inf), k as usize, id, k as usize + 1));
    }
    let intervals = (0..=p).map(|k| Interval::sheet(k, p)).collect();
    Ok(DynamicalSystem { p, intervals, branches })
}

impl DynamicalSystem {
    /// `F(x, k)`, or `None` when `x` is a branch boundary or outside `I_k`.
    pub fn apply_f(&self, x: f64, k: usize) -> Option<(f64, usize)> {
        let b = self.branches.iter().find(|b| b.source == k && b.domain.contains(x))?;
        match act(&b.map, BoundaryPoint::Finite(x)) {
            BoundaryPoint::Finite(y) => Some((y, b.target)),
            BoundaryPoint::Infinity => None,
        }
    }

    /// The first `n` iterates, starting with `(x, k)` itself and stopping early
    /// at the first point where `F` is undefined.
    pub fn orbit(&self, x: f64, k: usize, n: usize) -> Vec<(f64, usize)> {
        let mut out = vec![(x, k)];
        let mut cur = (x, k);
        for _ in 0..n {
            match self.apply_f(cur.0, cur.1) {
                Some(next) => {
                    out.push(next);
                    cur = next;
                }
                None => break,
            }
        }
        out
    }

    pub fn branches_from(&self, k: usize) -> impl Iterator<Item = &Branch> {
        self.branches.iter().filter(move |b| b.source == k)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.branches).expect("branch table serializes")
    }

    /// Exact validation: per-sheet partition, surjectivity onto the target
    /// interval, and absence of poles inside branch domains.
    pub fn verify(&self) -> Vec<String> {
        let mut failures = Vec::new();
        for (k, sheet) in self.intervals.iter().enumerate() {
            let mut doms: Vec<Interval> = self.branches_from(k).map(|b| b.domain).collect();
            doms.sort_by(|a, b| a.cmp_left(b));
            if let Err(msg) = check_partition(sheet, &doms) {
                failures.push(format!("sheet {k}: {msg}"));
            }
        }
        for (i, b) in self.branches.iter().enumerate() {
            if let Err(msg) = check_branch(b, &self.intervals[b.target]) {
                failures.push(format!("branch {i} (sheet {} -> {}): {msg}", b.source, b.target));
            }
        }
        failures
    }
}

fn check_partition(sheet: &Interval, doms: &[Interval]) -> std::result::Result<(), String> {
    let (first, last) = match (doms.first(), doms.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err("no branches".into()),
    };
    if first.left != sheet.left || last.right != sheet.right {
        return Err(format!("branches span {}..{} instead of {sheet}", first.left, last.right));
    }
    for w in doms.windows(2) {
        if w[0].right != w[1].left {
            return Err(format!("gap or overlap between {} and {}", w[0], w[1]));
        }
    }
    if doms.len() - 1 > 2 {
        return Err(format!("{} subdivision points", doms.len() - 1));
    }
    Ok(())
}

fn check_branch(b: &Branch, target: &Interval) -> std::result::Result<(), String> {
    let g = &b.map;
    let l = act_exact(g, b.domain.left);
    let r = act_exact(g, b.domain.right);
    // -∞ and ∞ share the Infinity tag, so this compares points of P¹.
    let ends_match = (l == target.left && r == target.right) || (l == target.right && r == target.left);
    if !ends_match {
        return Err(format!("endpoints map to {l}, {r}; target is {target}"));
    }
    let mid = b.domain.interior_point();
    match act_exact(g, ExactPoint::Finite(mid)) {
        ExactPoint::Finite(y) if target.contains_exact(y) => {}
        y => return Err(format!("interior point {mid} maps to {y}, outside {target}")),
    }
    if g.c() != 0 {
        let pole = Rational::new(-g.d(), g.c());
        if b.domain.contains_exact(pole) {
            return Err(format!("pole {pole} inside the domain"));
        }
    }
    Ok(())
}
