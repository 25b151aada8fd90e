//! Period functions ↔ parabolic cocycles.
//!
//! A cocycle is stored on the generators only (`c_T = 0`, `c_{h_k}`), as
//! expression trees over the components of one sampled period function, and
//! extended to words through `c_{gh} = τ_s(h⁻¹) c_g + c_h`. Relations are
//! checked, never imposed.
//!
//! All values are homogeneous: at the projective point `(X, Z)` an expression
//! evaluates to `|Z|^(-2s) φ(X/Z)`, which is the plain value for `Z = 1` and
//! stays finite at `∞`. Verification grids are the 200 points
//! `(sin θ, cos θ)` spread uniformly in `θ`, i.e. a `tan` grid on `P¹(R)`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary::{BoundaryPoint, ExactPoint, ratio_to_f64};
use crate::error::{Error, Result};
use crate::function_space::SampledFunctionVector;
use crate::group::{GeneratorSet, GroupElement, Letter, RelatorKind};
use crate::spectral::residuals;

pub const GRID_POINTS: usize = 200;

/// Which one-sided value to report when a point lands on a breakpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug)]
pub enum BoundaryExpr {
    Zero,
    /// `coef · τ_s(element) f_component`.
    Term { coef: Complex64, element: GroupElement, component: usize },
    Sum(Vec<Arc<BoundaryExpr>>),
    Scaled(Complex64, Arc<BoundaryExpr>),
    /// `τ_s(g) e`.
    Pulled(GroupElement, Arc<BoundaryExpr>),
    /// `left` below the breakpoint, `right` above it; `∞` counts as a breakpoint.
    Piecewise { breakpoint: f64, left: Arc<BoundaryExpr>, right: Arc<BoundaryExpr> },
}

impl BoundaryExpr {
    fn term(coef: f64, element: GroupElement, component: usize) -> Arc<Self> {
        Arc::new(BoundaryExpr::Term { coef: Complex64::new(coef, 0.0), element, component })
    }

    /// `(τ_s(g) self)` at `(X, Z)`, homogeneously.
    fn eval(&self, f: &SampledFunctionVector, g: &GroupElement, x: f64, z: f64, tie: Side) -> Result<Complex64> {
        match self {
            BoundaryExpr::Zero => Ok(Complex64::new(0.0, 0.0)),
            BoundaryExpr::Term { coef, element, component } => {
                Ok(coef * f.homogeneous(&(g * element), *component, x, z)?)
            }
            BoundaryExpr::Sum(parts) => parts.iter().try_fold(Complex64::new(0.0, 0.0), |acc, e| {
                Ok(acc + e.eval(f, g, x, z, tie)?)
            }),
            BoundaryExpr::Scaled(c, e) => Ok(c * e.eval(f, g, x, z, tie)?),
            BoundaryExpr::Pulled(h, e) => e.eval(f, &(g * h), x, z, tie),
            BoundaryExpr::Piecewise { breakpoint, left, right } => {
                let inv = g.inverse();
                let [a, b, c, d] = inv.entries().map(|e| e as f64);
                let (y, w) = (a * x + b * z, c * x + d * z);
                // compare y/w with the breakpoint without dividing
                let side = if w == 0.0 {
                    tie
                } else {
                    let diff = (y - breakpoint * w) * w.signum();
                    if diff.abs() <= 1e-15 * (y.abs() + w.abs()) {
                        tie
                    } else if diff > 0.0 {
                        Side::Right
                    } else {
                        Side::Left
                    }
                };
                match side {
                    Side::Left => left.eval(f, g, x, z, tie),
                    Side::Right => right.eval(f, g, x, z, tie),
                }
            }
        }
    }
}

/// A function on `P¹(R)` built from one sampled period function.
#[derive(Clone, Debug)]
pub struct PiecewiseBoundaryFunction {
    expr: Arc<BoundaryExpr>,
    source: Arc<SampledFunctionVector>,
    pub breakpoints: Vec<ExactPoint>,
}

impl PiecewiseBoundaryFunction {
    pub fn s(&self) -> Complex64 {
        self.source.s
    }

    pub fn expr(&self) -> &Arc<BoundaryExpr> {
        &self.expr
    }

    /// Homogeneous value at `(X, Z)`.
    pub fn eval_projective(&self, x: f64, z: f64) -> Result<Complex64> {
        self.expr.eval(&self.source, &GroupElement::identity(), x, z, Side::Right)
    }

    /// The value at a finite point; at `∞` the homogeneous value at `(1, 0)`.
    pub fn eval(&self, t: BoundaryPoint) -> Result<Complex64> {
        match t {
            BoundaryPoint::Finite(t) => self.eval_projective(t, 1.0),
            BoundaryPoint::Infinity => self.eval_projective(1.0, 0.0),
        }
    }

    /// Both one-sided values at `t`; they differ only at a breakpoint.
    pub fn eval_sides(&self, t: BoundaryPoint) -> Result<(Complex64, Complex64)> {
        let (x, z) = match t {
            BoundaryPoint::Finite(t) => (t, 1.0),
            BoundaryPoint::Infinity => (1.0, 0.0),
        };
        let id = GroupElement::identity();
        Ok((
            self.expr.eval(&self.source, &id, x, z, Side::Left)?,
            self.expr.eval(&self.source, &id, x, z, Side::Right)?,
        ))
    }

    /// `τ_s(g) self`.
    pub fn pulled(&self, g: &GroupElement) -> Self {
        self.with_expr(Arc::new(BoundaryExpr::Pulled(*g, self.expr.clone())))
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        self.with_expr(Arc::new(BoundaryExpr::Scaled(c, self.expr.clone())))
    }

    pub fn plus(&self, other: &Self) -> Self {
        self.with_expr(Arc::new(BoundaryExpr::Sum(vec![self.expr.clone(), other.expr.clone()])))
    }

    fn with_expr(&self, expr: Arc<BoundaryExpr>) -> Self {
        PiecewiseBoundaryFunction { expr, source: self.source.clone(), breakpoints: self.breakpoints.clone() }
    }

    /// Sup of the homogeneous value over the standard grid.
    pub fn sup_on_grid(&self) -> Result<f64> {
        projective_grid(GRID_POINTS)
            .par_iter()
            .map(|&(x, z)| self.eval_projective(x, z).map(|v| v.norm()))
            .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
    }
}

/// `n` points `(sin θ, cos θ)` with `θ` uniform in `(-π/2, π/2)`.
pub fn projective_grid(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|j| {
            let th = -PI / 2.0 + PI * (j as f64 + 0.5) / n as f64;
            (th.sin(), th.cos())
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct Cocycle {
    pub gens: GeneratorSet,
    /// `c_{h_k}` at index `k - 1`; `c_T` is zero.
    pub c_h: Vec<PiecewiseBoundaryFunction>,
    zero: PiecewiseBoundaryFunction,
}

impl Cocycle {
    pub fn s(&self) -> Complex64 {
        self.zero.s()
    }

    pub fn c_t(&self) -> &PiecewiseBoundaryFunction {
        &self.zero
    }

    pub fn c(&self, k: u64) -> &PiecewiseBoundaryFunction {
        &self.c_h[k as usize - 1]
    }

    fn letter(&self, l: Letter) -> PiecewiseBoundaryFunction {
        match l {
            Letter::T | Letter::TInv => self.zero.clone(),
            Letter::H(k) => self.c(k).clone(),
            // 0 = c_{g g⁻¹} = τ_s(g) c_g + c_{g⁻¹}
            Letter::HInv(k) => self.c(k).pulled(&self.gens.h(k)).scaled(Complex64::new(-1.0, 0.0)),
        }
    }
}

/// Thresholds below which a vector counts as a period function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Acceptance {
    pub m: usize,
    pub eigen: f64,
    pub constraints: f64,
}

impl Default for Acceptance {
    fn default() -> Self {
        Acceptance { m: 3, eigen: 1e-6, constraints: 1e-6 }
    }
}

/// `c_T = 0` and `c_{h_k} = f_k` on `(k/p, ∞)`, `-τ_s(h_{k'}) f_{k'}` on `(-∞, k/p)`.
pub fn cocycle_from_period(f: &SampledFunctionVector, acc: Acceptance) -> Result<Cocycle> {
    let r = residuals(f, acc.m)?;
    let scale = f.sup_norm().max(f64::MIN_POSITIVE);
    if r.eigen > acc.eigen * scale {
        return Err(Error::ResidualTooLarge { residual: r.eigen, threshold: acc.eigen * scale });
    }
    if r.constraints > acc.constraints * scale {
        return Err(Error::ResidualTooLarge { residual: r.constraints, threshold: acc.constraints * scale });
    }
    Ok(cocycle_unchecked(f))
}

/// The same construction without the residual gate.
pub fn cocycle_unchecked(f: &SampledFunctionVector) -> Cocycle {
    let p = f.p;
    let gens = GeneratorSet::new(p).expect("vector level is prime");
    let src = Arc::new(f.clone());
    let id = GroupElement::identity();
    let wrap = |expr, breakpoints| PiecewiseBoundaryFunction { expr, source: src.clone(), breakpoints };
    let c_h = (1..p)
        .map(|k| {
            let kp = gens.kprime(k);
            let b = ExactPoint::frac(k as i64, p as i64);
            let expr = Arc::new(BoundaryExpr::Piecewise {
                breakpoint: k as f64 / p as f64,
                left: BoundaryExpr::term(-1.0, gens.h(kp), kp as usize),
                right: BoundaryExpr::term(1.0, id, k as usize),
            });
            wrap(expr, vec![b, ExactPoint::Infinity])
        })
        .collect();
    let zero = wrap(Arc::new(BoundaryExpr::Zero), vec![]);
    Cocycle { gens, c_h, zero }
}

/// `c_w` for a word `w` via `c_{gh} = τ_s(h⁻¹) c_g + c_h`.
pub fn extend_cocycle(c: &Cocycle, word: &[Letter]) -> PiecewiseBoundaryFunction {
    let mut acc = c.zero.clone();
    for &l in word {
        let hinv = c.gens.element(l).inverse();
        acc = acc.pulled(&hinv).plus(&c.letter(l));
    }
    acc
}

/// `ψ = -f_0` on `(0, ∞)` and `f_p` on `(-∞, 0)`.
pub fn psi_from_period(f: &SampledFunctionVector) -> PiecewiseBoundaryFunction {
    let id = GroupElement::identity();
    let expr = Arc::new(BoundaryExpr::Piecewise {
        breakpoint: 0.0,
        left: BoundaryExpr::term(1.0, id, f.p as usize),
        right: BoundaryExpr::term(-1.0, id, 0),
    });
    PiecewiseBoundaryFunction { expr, source: Arc::new(f.clone()), breakpoints: vec![ExactPoint::int(0), ExactPoint::Infinity] }
}

/// Sup over the grid of `c_{h_{p-1}T} - (τ_s(T⁻¹h_1)ψ - ψ)`.
pub fn verify_parabolic(c: &Cocycle, psi: &PiecewiseBoundaryFunction) -> Result<f64> {
    let g = &c.gens;
    let p = g.p();
    let lhs = extend_cocycle(c, &[Letter::H(p - 1), Letter::T]);
    let rhs = psi.pulled(&(g.t().inverse() * g.h(1))).plus(&psi.scaled(Complex64::new(-1.0, 0.0)));
    lhs.plus(&rhs.scaled(Complex64::new(-1.0, 0.0))).sup_on_grid()
}

/// `f_k = c_{h_k}` on `I_k`, `f_0 = -ψ` on `I_0`, `f_p = ψ` on `I_p`,
/// resampled at the chart nodes of an `n`-point grid.
pub fn period_from_cocycle(c: &Cocycle, psi: &PiecewiseBoundaryFunction, n: usize) -> Result<SampledFunctionVector> {
    let p = c.gens.p();
    let s = c.s();
    let out = SampledFunctionVector::zeros(p, s, SampledFunctionVector::sheet_domains(p), n)?;
    let scale = (2.0 * s * 2f64.ln()).exp();
    let minus = Complex64::new(-1.0, 0.0);
    let mut values = Vec::with_capacity(p as usize + 1);
    for k in 0..=p {
        let func = match k {
            0 => psi.scaled(minus),
            k if k == p => psi.clone(),
            k => c.c(k).clone(),
        };
        let ch = out.chart(k as usize);
        let col = out
            .cheb()
            .nodes()
            .iter()
            .map(|&u| {
                let (x, z) = ch.projective(u);
                // stay on the side of the breakpoint that belongs to I_k
                let (l, r) = func_sides(&func, x, z)?;
                Ok(scale * if ch.dir > 0.0 { r } else { l })
            })
            .collect::<Result<Vec<_>>>()?;
        values.push(col);
    }
    out.with_values(values)
}

fn func_sides(f: &PiecewiseBoundaryFunction, x: f64, z: f64) -> Result<(Complex64, Complex64)> {
    let id = GroupElement::identity();
    Ok((
        f.expr.eval(&f.source, &id, x, z, Side::Left)?,
        f.expr.eval(&f.source, &id, x, z, Side::Right)?,
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelatorResidual {
    pub kind: RelatorKind,
    pub index: u64,
    pub word: Vec<Letter>,
    pub sup: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CohomologyReport {
    pub p: u64,
    pub s: [f64; 2],
    pub grid: String,
    pub grid_points: usize,
    pub relators: Vec<RelatorResidual>,
    /// Per `k`, sup of `c_{h_k} + τ_s(h_{k'}) c_{h_{k'}}`.
    pub antisymmetry: Vec<f64>,
    pub parabolic: f64,
    /// Per `k = 1..p-2`, sups of the three eigen-equation branches.
    pub branches: Vec<[f64; 3]>,
    pub roundtrip: f64,
}

impl CohomologyReport {
    pub fn max_relator(&self) -> f64 {
        self.relators.iter().map(|r| r.sup).fold(0.0, f64::max)
    }

    pub fn max_antisymmetry(&self) -> f64 {
        self.antisymmetry.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_branch(&self) -> f64 {
        self.branches.iter().flatten().copied().fold(0.0, f64::max)
    }
}

/// Sup over a chart grid of `I_k` of `lhs - rhs`, where both sides are sums of
/// `(coef, element, component)` terms.
fn branch_residual(
    f: &SampledFunctionVector,
    k: usize,
    terms: &[(f64, GroupElement, usize)],
) -> Result<f64> {
    let ch = f.chart(k);
    let mut sup: f64 = 0.0;
    for j in 0..GRID_POINTS {
        let u = -1.0 + 2.0 * j as f64 / (GRID_POINTS - 1) as f64;
        let (x, z) = ch.projective(u);
        let mut acc = Complex64::new(0.0, 0.0);
        for &(c, g, comp) in terms {
            acc += c * f.homogeneous(&g, comp, x, z)?;
        }
        sup = sup.max(acc.norm());
    }
    Ok(sup)
}

/// The eigen-equations in the form used for the triple relator, for each
/// `k = 1..p-2`:
///
/// ```text
/// f_{k+1}      = f_k + τ_s(h_{k'}) f_{k'-1}                on ((k+1)/p, ∞)
/// f_{(k'-1)'}  = f_{(k+1)'} + τ_s(h_{k+1}) f_k              on ((k'-1)'/p, ∞)
/// f_{k'}       = f_{k'-1} + τ_s(h_{(k'-1)'}) f_{(k+1)'}      on (k'/p, ∞)
/// ```
pub fn branch_residuals(f: &SampledFunctionVector) -> Result<Vec<[f64; 3]>> {
    let p = f.p;
    let g = GeneratorSet::new(p)?;
    let id = GroupElement::identity();
    (1..p.saturating_sub(1))
        .map(|k| {
            let kp = g.kprime(k);
            let a = g.kprime(kp - 1);
            let b = g.kprime(k + 1);
            let u = |x: u64| x as usize;
            Ok([
                branch_residual(f, u(k + 1), &[(1.0, id, u(k + 1)), (-1.0, id, u(k)), (-1.0, g.h(kp), u(kp - 1))])?,
                branch_residual(f, u(a), &[(1.0, id, u(a)), (-1.0, id, u(b)), (-1.0, g.h(k + 1), u(k))])?,
                branch_residual(f, u(kp), &[(1.0, id, u(kp)), (-1.0, id, u(kp - 1)), (-1.0, g.h(a), u(b))])?,
            ])
        })
        .collect()
}

/// Runs the full cohomology suite on one period function.
pub fn verify_period_function(f: &SampledFunctionVector, acc: Acceptance) -> Result<CohomologyReport> {
    let c = cocycle_from_period(f, acc)?;
    let psi = psi_from_period(f);
    let relators = c
        .gens
        .relators()
        .into_iter()
        .map(|r| {
            let sup = extend_cocycle(&c, &r.word).sup_on_grid()?;
            Ok(RelatorResidual { kind: r.kind, index: r.index, word: r.word, sup })
        })
        .collect::<Result<Vec<_>>>()?;
    let antisymmetry = (1..f.p)
        .map(|k| {
            let kp = c.gens.kprime(k);
            c.c(k).plus(&c.c(kp).pulled(&c.gens.h(kp))).sup_on_grid()
        })
        .collect::<Result<Vec<_>>>()?;
    let parabolic = verify_parabolic(&c, &psi)?;
    let back = period_from_cocycle(&c, &psi, f.n())?;
    let roundtrip = back
        .values
        .iter()
        .flatten()
        .zip(f.values.iter().flatten())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok(CohomologyReport {
        p: f.p,
        s: [f.s.re, f.s.im],
        grid: "homogeneous values at (sin θ, cos θ), θ uniform in (-π/2, π/2)".into(),
        grid_points: GRID_POINTS,
        relators,
        antisymmetry,
        parabolic,
        branches: branch_residuals(f)?,
        roundtrip,
    })
}

/// Breakpoints as floats, `∞` mapped to `None`.
pub fn finite_breakpoints(f: &PiecewiseBoundaryFunction) -> Vec<Option<f64>> {
    f.breakpoints
        .iter()
        .map(|b| match b {
            ExactPoint::Finite(r) => Some(ratio_to_f64(*r)),
            ExactPoint::Infinity => None,
        })
        .collect()
}
