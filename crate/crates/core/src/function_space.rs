//! Möbius charts onto the half-lines `I_k`, sampled function vectors, and the
//! collocation matrix of `L_s`.
//!
//! A chart with anchor `a` and direction `δ = ±1` is
//!
//! ```text
//! x(u) = a + δ (1 + u)/(1 - u),    u ∈ [-1, 1],
//! ```
//!
//! so `u = -1` is the finite endpoint and `u = 1` is infinity. Components are
//! stored as `F = f · ρ^(2s)` with `ρ(x) = 1 + δ(x - a) = 2/(1 - u)`: period
//! functions decay like `|x|^(-2s)`, so `F` is analytic up to `u = 1`, and
//! every `τ_s` term becomes a Möbius change of chart coordinate times the
//! bounded weight `|2/N|^(2s)`.
//!
//! Points are handled projectively: `x = X/Z` with `(X, Z) = (a(1-u) + δ(1+u), 1-u)`.
//! For `g⁻¹ = [[a, b], [c, d]]` put `(Y, W) = (aX + bZ, cX + dZ)`; in the
//! source chart `N = W(1 - δa) + δY` and the chart coordinate is `v = 1 - 2W/N`.
//! The homogeneous value `|N|^(-2s) F(v)` equals `|Z|^(-2s) (τ_s(g)f)(X/Z)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary::{ratio_to_f64, BoundaryPoint, ExactPoint, FunctionEvaluator, Interval};
use crate::cheb::{coefficient_tail, Cheb};
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::transfer::SymbolicTransferOperator;

/// Slack allowed when a mapped chart coordinate lands just outside `[-1, 1]`.
const CHART_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Chart {
    pub anchor: f64,
    pub dir: f64,
}

impl Chart {
    /// The chart of a half-line; bounded intervals and the whole line have none.
    pub fn for_interval(iv: &Interval) -> Result<Chart> {
        match (iv.left, iv.right) {
            (ExactPoint::Finite(a), ExactPoint::Infinity) => Ok(Chart { anchor: ratio_to_f64(a), dir: 1.0 }),
            (ExactPoint::Infinity, ExactPoint::Finite(a)) => Ok(Chart { anchor: ratio_to_f64(a), dir: -1.0 }),
            _ => Err(Error::ChartMismatch(format!("no half-line chart for {iv}"))),
        }
    }

    pub fn for_sheet(k: u64, p: u64) -> Chart {
        Chart::for_interval(&Interval::sheet(k, p)).expect("sheets are half-lines")
    }

    pub fn x(&self, u: f64) -> BoundaryPoint {
        if u >= 1.0 {
            BoundaryPoint::Infinity
        } else {
            BoundaryPoint::Finite(self.anchor + self.dir * (1.0 + u) / (1.0 - u))
        }
    }

    pub fn u(&self, x: BoundaryPoint) -> f64 {
        match x {
            BoundaryPoint::Infinity => 1.0,
            BoundaryPoint::Finite(x) => {
                let r = self.dir * (x - self.anchor);
                (r - 1.0) / (r + 1.0)
            }
        }
    }

    /// `ρ(x) = 1 + δ(x - a)`.
    pub fn rho(&self, x: f64) -> f64 {
        1.0 + self.dir * (x - self.anchor)
    }

    /// Projective coordinates of the chart point `u`.
    pub fn projective(&self, u: f64) -> (f64, f64) {
        (self.anchor * (1.0 - u) + self.dir * (1.0 + u), 1.0 - u)
    }

    /// `(N, v)` for a projective point `(Y, W)` in this (source) chart.
    fn locate(&self, y: f64, w: f64) -> (f64, f64) {
        let n = w * (1.0 - self.dir * self.anchor) + self.dir * y;
        (n, 1.0 - 2.0 * w / n)
    }
}

/// `|w|^e` for real `w ≠ 0` and complex `e`.
fn abs_pow(w: f64, e: Complex64) -> Complex64 {
    (e * w.abs().ln()).exp()
}

/// `(Y, W) = g⁻¹ · (X, Z)`.
fn pull_back(g: &GroupElement, x: f64, z: f64) -> (f64, f64) {
    let inv = g.inverse();
    let [a, b, c, d] = inv.entries().map(|e| e as f64);
    (a * x + b * z, c * x + d * z)
}

/// A discretized function vector `(f_0, …, f_p)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunctionVector {
    pub p: u64,
    pub s: Complex64,
    pub domains: Vec<Interval>,
    /// `values[k][j] = F_k(u_j)`.
    pub values: Vec<Vec<Complex64>>,
    cheb: Cheb,
    charts: Vec<Chart>,
}

#[derive(Serialize, Deserialize)]
struct ComplexJson {
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct VectorJson {
    p: u64,
    s: ComplexJson,
    #[serde(rename = "N")]
    n: usize,
    domains: Vec<Interval>,
    values: Vec<Vec<[f64; 2]>>,
}

impl SampledFunctionVector {
    pub fn from_values(p: u64, s: Complex64, domains: Vec<Interval>, values: Vec<Vec<Complex64>>) -> Result<Self> {
        if domains.len() != values.len() || values.is_empty() {
            return Err(Error::ChartMismatch("one value column per domain is required".into()));
        }
        let n = values[0].len();
        if n < 2 || values.iter().any(|v| v.len() != n) {
            return Err(Error::ChartMismatch("components must share a node count of at least 2".into()));
        }
        let charts = domains.iter().map(Chart::for_interval).collect::<Result<_>>()?;
        Ok(SampledFunctionVector { p, s, domains, values, cheb: Cheb::new(n), charts })
    }

    pub fn zeros(p: u64, s: Complex64, domains: Vec<Interval>, n: usize) -> Result<Self> {
        let k = domains.len();
        Self::from_values(p, s, domains, vec![vec![Complex64::new(0.0, 0.0); n]; k])
    }

    /// The sheet domains `I_0, …, I_p`.
    pub fn sheet_domains(p: u64) -> Vec<Interval> {
        (0..=p).map(|k| Interval::sheet(k, p)).collect()
    }

    pub fn n(&self) -> usize {
        self.cheb.len()
    }

    pub fn cheb(&self) -> &Cheb {
        &self.cheb
    }

    pub fn chart(&self, k: usize) -> Chart {
        self.charts[k]
    }

    pub fn components(&self) -> usize {
        self.values.len()
    }

    /// Same grid, charts and parameter; values replaced.
    pub fn with_values(&self, values: Vec<Vec<Complex64>>) -> Result<Self> {
        Self::from_values(self.p, self.s, self.domains.clone(), values)
    }

    pub fn flat(&self) -> Vec<Complex64> {
        self.values.concat()
    }

    pub fn from_flat(&self, flat: &[Complex64]) -> Result<Self> {
        let n = self.n();
        if flat.len() != n * self.components() {
            return Err(Error::ChartMismatch(format!("flat length {} for {} x {n}", flat.len(), self.components())));
        }
        self.with_values(flat.chunks(n).map(<[_]>::to_vec).collect())
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let values = self.values.iter().map(|v| v.iter().map(|z| z * c).collect()).collect();
        self.with_values(values).expect("same shape")
    }

    /// Stored value `F_k` at chart coordinate `u`.
    pub fn normalized_at(&self, k: usize, u: f64) -> Complex64 {
        self.cheb.interpolate(&self.values[k], u)
    }

    /// `f_k(x)`; at `x = ∞` this returns the stored boundary value `F_k(1)`.
    pub fn eval(&self, x: BoundaryPoint, k: usize) -> Result<Complex64> {
        let dom = self.domains[k];
        match x {
            BoundaryPoint::Infinity => Ok(self.normalized_at(k, 1.0)),
            BoundaryPoint::Finite(t) => {
                if !dom.contains_closed(t) {
                    return Err(Error::OutsideDomain { point: t, domain: dom.to_string() });
                }
                let ch = self.charts[k];
                let u = ch.u(x).clamp(-1.0, 1.0);
                Ok(self.normalized_at(k, u) * abs_pow(ch.rho(t), -2.0 * self.s))
            }
        }
    }

    /// Homogeneous value of `τ_s(g) f_k` at the projective point `(X, Z)`:
    /// `|Z|^(-2s) (τ_s(g) f_k)(X/Z)`, finite also at poles and at `Z = 0`.
    pub fn homogeneous(&self, g: &GroupElement, k: usize, x: f64, z: f64) -> Result<Complex64> {
        let (basis, weight) = self.term_basis(g, k, x, z)?;
        let v: Complex64 = basis.iter().zip(&self.values[k]).map(|(b, f)| f * b).sum();
        Ok(v * weight)
    }

    /// `(τ_s(g) f_k)(t)` at a finite point.
    pub fn eval_term(&self, g: &GroupElement, k: usize, t: f64) -> Result<Complex64> {
        self.homogeneous(g, k, t, 1.0)
    }

    /// Interpolation row and weight with `homogeneous = weight · basis · F_k`.
    pub fn term_basis(&self, g: &GroupElement, k: usize, x: f64, z: f64) -> Result<(Vec<f64>, Complex64)> {
        let (y, w) = pull_back(g, x, z);
        let (n, v) = self.charts[k].locate(y, w);
        if !(n.is_finite() && n != 0.0 && v.is_finite() && (-1.0 - CHART_SLACK..=1.0 + CHART_SLACK).contains(&v)) {
            return Err(Error::OutsideDomain {
                point: if w == 0.0 { f64::INFINITY } else { y / w },
                domain: self.domains[k].to_string(),
            });
        }
        Ok((self.cheb.basis(v.clamp(-1.0, 1.0)), abs_pow(n, -2.0 * self.s)))
    }

    /// Largest relative Chebyshev coefficient among the last quarter, over components.
    pub fn spectral_tail(&self) -> f64 {
        let tail = self.n() / 4;
        self.values
            .iter()
            .map(|v| coefficient_tail(&self.cheb.coefficients(v), tail))
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let raw = VectorJson {
            p: self.p,
            s: ComplexJson { re: self.s.re, im: self.s.im },
            n: self.n(),
            domains: self.domains.clone(),
            values: self.values.iter().map(|v| v.iter().map(|z| [z.re, z.im]).collect()).collect(),
        };
        serde_json::to_value(raw).expect("vector serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let raw: VectorJson = serde_json::from_value(v.clone())?;
        let values: Vec<Vec<Complex64>> =
            raw.values.iter().map(|c| c.iter().map(|&[re, im]| Complex64::new(re, im)).collect()).collect();
        if values.iter().any(|c| c.len() != raw.n) {
            return Err(Error::ChartMismatch(format!("value columns do not have N = {}", raw.n)));
        }
        Self::from_values(raw.p, Complex64::new(raw.s.re, raw.s.im), raw.domains, values)
    }
}

/// Samples one evaluator per domain at the chart nodes.
///
/// The node at infinity needs decay data: exponent `2s` gives the stored
/// value `limit`, a faster decay gives zero.
pub fn sample(
    p: u64,
    s: Complex64,
    domains: Vec<Interval>,
    phi: &[FunctionEvaluator],
    n: usize,
) -> Result<SampledFunctionVector> {
    if phi.len() != domains.len() {
        return Err(Error::Config(format!("{} evaluators for {} domains", phi.len(), domains.len())));
    }
    let cheb = Cheb::new(n);
    let mut values = Vec::with_capacity(domains.len());
    for (dom, f) in domains.iter().zip(phi) {
        let ch = Chart::for_interval(dom)?;
        let col = cheb
            .nodes()
            .iter()
            .map(|&u| match ch.x(u) {
                BoundaryPoint::Finite(x) => Ok(f.eval(x)? * abs_pow(ch.rho(x), 2.0 * s)),
                BoundaryPoint::Infinity => match f.decay() {
                    Some(d) if (d.exponent - 2.0 * s).norm() <= 1e-12 * (1.0 + s.norm()) => Ok(d.limit),
                    Some(d) if (d.exponent - 2.0 * s).re > 0.0 => Ok(Complex64::new(0.0, 0.0)),
                    _ => Err(Error::PoleWithoutDecay(f64::INFINITY)),
                },
            })
            .collect::<Result<Vec<_>>>()?;
        values.push(col);
    }
    SampledFunctionVector::from_values(p, s, domains, values)
}

/// Dense matrix of `L_s` on stored values: block `(ℓ, k)` maps `F_k` to the
/// contribution to `F_ℓ` at the nodes of component `ℓ`.
///
/// Blocks are computed independently (in parallel) and then placed, so the
/// result does not depend on scheduling.
pub fn assemble_matrix(op: &SymbolicTransferOperator, s: Complex64, n: usize) -> Result<DMatrix<Complex64>> {
    let m = op.size();
    let proto = SampledFunctionVector::zeros(op.p, s, op.domains.clone(), n)?;
    let blocks: Vec<(usize, usize)> = (0..m)
        .flat_map(|r| (0..m).map(move |c| (r, c)))
        .filter(|&(r, c)| !op.entry(r, c).is_empty())
        .collect();
    let computed = blocks
        .par_iter()
        .map(|&(r, c)| block(op, &proto, r, c).map(|b| (r, c, b)))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::Assembly { s, source: Box::new(e) })?;
    let mut mat = DMatrix::zeros(m * n, m * n);
    for (r, c, b) in computed {
        mat.view_mut((r * n, c * n), (n, n)).copy_from(&b);
    }
    Ok(mat)
}

fn block(op: &SymbolicTransferOperator, proto: &SampledFunctionVector, r: usize, c: usize) -> Result<DMatrix<Complex64>> {
    let n = proto.n();
    let ch = proto.chart(r);
    let scale = abs_pow(2.0, 2.0 * proto.s);
    let mut b = DMatrix::zeros(n, n);
    for term in op.entry(r, c) {
        for (i, &u) in proto.cheb().nodes().iter().enumerate() {
            let (x, z) = ch.projective(u);
            let (basis, w) = proto.term_basis(&term.element, c, x, z).map_err(|e| match e {
                Error::OutsideDomain { .. } => Error::TermCorrespondence { row: r, col: c, v: u },
                e => e,
            })?;
            let w = w * scale;
            for (j, bj) in basis.iter().enumerate() {
                b[(i, j)] += w * *bj;
            }
        }
    }
    Ok(b)
}

/// `L_s` applied to a sampled vector through the matrix.
pub fn apply_matrix(mat: &DMatrix<Complex64>, f: &SampledFunctionVector) -> Result<SampledFunctionVector> {
    let x = nalgebra::DVector::from_vec(f.flat());
    let y = mat * x;
    f.from_flat(y.as_slice())
}
