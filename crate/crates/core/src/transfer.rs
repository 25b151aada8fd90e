//! The transfer operator as a matrix of formal sums of `τ_s(g)`.
//!
//! Entry `(row, col)` holding `g` contributes `τ_s(g) f_col` to
//! `(L_s f)_row`. The parameter `s` is supplied only at application time.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::boundary::{tau_apply, ExactPoint, FunctionEvaluator, Interval};
use crate::dynamics::DynamicalSystem;
use crate::error::{Error, Result};
use crate::function_space::{assemble_matrix, SampledFunctionVector};
use crate::group::{GeneratorSet, GroupElement};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OperatorTerm {
    pub element: GroupElement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicTransferOperator {
    pub p: u64,
    entries: Vec<Vec<Vec<OperatorTerm>>>,
    pub domains: Vec<Interval>,
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    row: usize,
    col: usize,
    terms: Vec<OperatorTerm>,
}

#[derive(Serialize, Deserialize)]
struct OperatorJson {
    p: u64,
    entries: Vec<EntryJson>,
    domains: Vec<Interval>,
}

impl SymbolicTransferOperator {
    fn empty(p: u64, domains: Vec<Interval>) -> Self {
        let n = domains.len();
        SymbolicTransferOperator { p, entries: vec![vec![Vec::new(); n]; n], domains }
    }

    fn push(&mut self, row: usize, col: usize, element: GroupElement) {
        self.entries[row][col].push(OperatorTerm { element });
    }

    /// Number of components, `p + 1`.
    pub fn size(&self) -> usize {
        self.domains.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> &[OperatorTerm] {
        &self.entries[row][col]
    }

    /// All `(col, term)` pairs of a row, in column order.
    pub fn row_terms(&self, row: usize) -> impl Iterator<Item = (usize, &OperatorTerm)> {
        self.entries[row].iter().enumerate().flat_map(|(c, ts)| ts.iter().map(move |t| (c, t)))
    }

    pub fn term_count(&self) -> usize {
        self.entries.iter().flatten().map(Vec::len).sum()
    }

    /// Entry-wise comparison ignoring the order of terms within an entry.
    pub fn same_terms(&self, other: &Self) -> bool {
        if self.size() != other.size() || self.domains != other.domains {
            return false;
        }
        self.entries.iter().flatten().zip(other.entries.iter().flatten()).all(|(a, b)| {
            let (mut a, mut b) = (a.clone(), b.clone());
            a.sort();
            b.sort();
            a == b
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut entries = Vec::new();
        for (row, cols) in self.entries.iter().enumerate() {
            for (col, terms) in cols.iter().enumerate() {
                if !terms.is_empty() {
                    entries.push(EntryJson { row, col, terms: terms.clone() });
                }
            }
        }
        serde_json::to_value(OperatorJson { p: self.p, entries, domains: self.domains.clone() })
            .expect("operator serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let raw: OperatorJson = serde_json::from_value(v.clone())?;
        let mut op = Self::empty(raw.p, raw.domains);
        for e in raw.entries {
            if e.row >= op.size() || e.col >= op.size() {
                return Err(Error::Config(format!("entry ({}, {}) out of range", e.row, e.col)));
            }
            for t in e.terms {
                op.push(e.row, e.col, t.element);
            }
        }
        Ok(op)
    }
}

/// The operator with the rows written out for sheets `I_0, …, I_p`.
pub fn build_transfer(p: u64) -> Result<SymbolicTransferOperator> {
    let g = GeneratorSet::new(p)?;
    let pu = p as usize;
    let mut op = SymbolicTransferOperator::empty(p, (0..=p).map(|k| Interval::sheet(k, p)).collect());
    let tinv = g.t().inverse();
    let hp1 = g.h(p - 1);
    let id = GroupElement::identity();

    op.push(0, 0, tinv * g.h(1));
    op.push(0, pu - 1, tinv);
    op.push(pu, pu - 1, hp1);
    op.push(pu, pu, hp1 * g.t());
    op.push(1, 0, id);
    op.push(1, pu, hp1 * g.t());
    for k in 1..p.saturating_sub(1) {
        let kp = g.kprime(k);
        op.push(k as usize + 1, k as usize, id);
        op.push(k as usize + 1, kp as usize - 1, g.h(kp));
    }
    Ok(op)
}

/// Reads the operator off the branch table: branch `b` with source `k`,
/// target `ℓ` and map `g` becomes the term `τ_s(g) f_k` in row `ℓ`.
pub fn from_system(sys: &DynamicalSystem) -> SymbolicTransferOperator {
    let mut op = SymbolicTransferOperator::empty(sys.p, sys.intervals.clone());
    for b in &sys.branches {
        op.push(b.target, b.source, b.map);
    }
    op
}

/// The operator for level 3 built from the second set of representatives,
/// acting on functions over `(0,∞)`, `(-∞,1/3)`, `(-∞,-1/3)`, `(-∞,0)`.
pub fn build_transfer_alt_p3() -> SymbolicTransferOperator {
    let g = GeneratorSet::new(3).expect("3 is prime");
    let inf = ExactPoint::Infinity;
    let domains = vec![
        Interval::new(ExactPoint::int(0), inf),
        Interval::new(inf, ExactPoint::frac(1, 3)),
        Interval::new(inf, ExactPoint::frac(-1, 3)),
        Interval::new(inf, ExactPoint::int(0)),
    ];
    let mut op = SymbolicTransferOperator::empty(3, domains);
    let (t, tinv, id) = (g.t(), g.t().inverse(), GroupElement::identity());
    op.push(0, 0, tinv * g.h(1));
    op.push(0, 1, tinv * g.h(1));
    op.push(1, 2, t);
    op.push(1, 2, g.h(1) * t);
    op.push(2, 0, tinv * g.h(1));
    op.push(2, 3, id);
    op.push(3, 1, id);
    op.push(3, 3, g.h(2) * t);
    op
}

/// The intertwiner from the first to the second choice for level 3:
/// `f ↦ (f_0, τ_s(h_2) f_2, τ_s(T⁻¹h_1) f_1, f_3)`, as `(element, source)`
/// per target component.
pub fn p3_isomorphism_terms() -> [(GroupElement, usize); 4] {
    let g = GeneratorSet::new(3).expect("3 is prime");
    [
        (GroupElement::identity(), 0),
        (g.h(2), 2),
        (g.t().inverse() * g.h(1), 1),
        (GroupElement::identity(), 3),
    ]
}

/// The intertwiner applied to a sampled level-3 vector, resampled on the
/// domains of [`build_transfer_alt_p3`] with the same number of nodes.
pub fn p3_isomorphism(f: &SampledFunctionVector) -> Result<SampledFunctionVector> {
    p3_isomorphism_resampled(f, f.n())
}

/// As [`p3_isomorphism`], with `n` nodes per alternate chart.
pub fn p3_isomorphism_resampled(f: &SampledFunctionVector, n: usize) -> Result<SampledFunctionVector> {
    if f.p != 3 || f.domains != SampledFunctionVector::sheet_domains(3) {
        return Err(Error::ChartMismatch("expected a level-3 vector on the sheets".into()));
    }
    let alt = build_transfer_alt_p3();
    let out = SampledFunctionVector::zeros(3, f.s, alt.domains.clone(), n)?;
    let scale = (2.0 * f.s * 2f64.ln()).exp();
    let values = p3_isomorphism_terms()
        .iter()
        .enumerate()
        .map(|(j, (g, src))| {
            let ch = out.chart(j);
            out.cheb()
                .nodes()
                .iter()
                .map(|&u| {
                    let (x, z) = ch.projective(u);
                    Ok(scale * f.homogeneous(g, *src, x, z)?)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    out.with_values(values)
}

/// `sup |(I - L̃_s) G|` over stored values for a vector on the alternate domains.
pub fn alt_residual(g: &SampledFunctionVector) -> Result<f64> {
    let alt = build_transfer_alt_p3();
    if g.p != 3 || g.domains != alt.domains {
        return Err(Error::ChartMismatch("expected a level-3 vector on the alternate domains".into()));
    }
    let l = assemble_matrix(&alt, g.s, g.n())?;
    let x = DVector::from_vec(g.flat());
    let r = &x - &l * &x;
    Ok(r.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// `(L_s f)_row(x)` evaluated term by term.
pub fn apply_transfer(
    op: &SymbolicTransferOperator,
    s: Complex64,
    f: &[FunctionEvaluator],
    x: f64,
    row: usize,
) -> Result<Complex64> {
    if f.len() != op.size() {
        return Err(Error::Config(format!("expected {} components, got {}", op.size(), f.len())));
    }
    let dom = op.domains[row];
    if !dom.contains(x) {
        return Err(Error::OutsideDomain { point: x, domain: dom.to_string() });
    }
    op.row_terms(row).try_fold(Complex64::new(0.0, 0.0), |acc, (col, t)| {
        Ok(acc + tau_apply(&t.element, s, &f[col], x)?)
    })
}
