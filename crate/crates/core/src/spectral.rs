//! Detection of spectral parameters with regular 1-eigenfunctions.
//!
//! `I - L_s` alone has a kernel for every `s` on any finite grid; what singles
//! out period functions is smooth matching across the junctions `k/p`, `0`
//! and `∞`. Those matching conditions are stacked under `I - L_s` and the
//! smallest singular value of the tall system is scanned along `s = σ₀ + it`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cheb::Cheb;
use crate::error::{Error, Result};
use crate::function_space::{assemble_matrix, Chart, SampledFunctionVector};
use crate::group::{GeneratorSet, GroupElement};
use crate::transfer::build_transfer;

/// One side of a junction: `sign · τ_s(element) f_component` near the point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JunctionSide {
    pub component: usize,
    pub element: GroupElement,
    pub sign: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Junction {
    pub point: f64,
    pub left: JunctionSide,
    pub right: JunctionSide,
}

/// The matching conditions: at each `k/p` the two branches of the cocycle
/// value `c_{h_k}`; at `0` the two branches of `ψ`; and at `∞` the same pair
/// pulled back by `g = h_{p-1}T`, which moves `∞` to `1/p`.
pub fn junctions(p: u64) -> Result<Vec<Junction>> {
    let g = GeneratorSet::new(p)?;
    let id = GroupElement::identity();
    let pu = p as usize;
    let side = |component, element, sign| JunctionSide { component, element, sign };
    let mut out = Vec::new();
    for k in 1..p {
        let kp = g.kprime(k);
        out.push(Junction {
            point: k as f64 / p as f64,
            left: side(kp as usize, g.h(kp), -1.0),
            right: side(k as usize, id, 1.0),
        });
    }
    out.push(Junction { point: 0.0, left: side(pu, id, 1.0), right: side(0, id, -1.0) });
    let pinf = g.h(p - 1) * g.t();
    out.push(Junction { point: 1.0 / p as f64, left: side(0, pinf, -1.0), right: side(pu, pinf, 1.0) });
    Ok(out)
}

/// Taylor coefficients (orders `0..=m`) at `t0` of one side, as linear
/// functionals on the stored values of its component.
fn side_jet(
    side: &JunctionSide,
    t0: f64,
    chart: Chart,
    cheb: &Cheb,
    d: &DMatrix<f64>,
    s: Complex64,
    m: usize,
) -> Result<Vec<Vec<Complex64>>> {
    let n = cheb.len();
    let inv = side.element.inverse();
    let [a, b, c, dd] = inv.entries().map(|e| e as f64);
    // (Y, W) = (Y0 + Y1 τ, W0 + W1 τ) at t = t0 + τ
    let (y0, y1, w0, w1) = (a * t0 + b, a, c * t0 + dd, c);
    let nn = |y: f64, w: f64| w * (1.0 - chart.dir * chart.anchor) + chart.dir * y;
    let (n0, n1) = (nn(y0, w0), nn(y1, w1));
    if n0 == 0.0 {
        return Err(Error::JunctionSingular(t0));
    }
    // v = 1 - 2W/N as a power series in τ
    let w_over_n = series_div(&[w0, w1], &[n0, n1], m);
    let mut v: Vec<f64> = w_over_n.iter().map(|x| -2.0 * x).collect();
    v[0] += 1.0;
    let v0 = v[0];
    if !(-1.0 - 1e-9..=1.0 + 1e-9).contains(&v0) {
        return Err(Error::JunctionSingular(t0));
    }
    let mut dv = v.clone();
    dv[0] = 0.0;

    // |N|^(-2s) = |N0|^(-2s) (1 + (N1/N0) τ)^(-2s)
    let q = n1 / n0;
    let base = (-2.0 * s * n0.abs().ln()).exp();
    let mut weight = vec![Complex64::new(0.0, 0.0); m + 1];
    let mut binom = Complex64::new(1.0, 0.0);
    for (j, wj) in weight.iter_mut().enumerate() {
        *wj = base * binom * q.powi(j as i32);
        binom = binom * (-2.0 * s - j as f64) / (j + 1) as f64;
    }

    // F(v(τ)) = Σ_j F^(j)(v0)/j! (v - v0)^j
    let mut comp = vec![vec![0.0; n]; m + 1];
    let mut deriv = cheb.basis(v0.clamp(-1.0, 1.0));
    let mut pw = vec![0.0; m + 1];
    pw[0] = 1.0;
    let mut fact = 1.0;
    for j in 0..=m {
        if j > 0 {
            fact *= j as f64;
        }
        for (i, row) in comp.iter_mut().enumerate() {
            if pw[i] != 0.0 {
                for (r, dj) in row.iter_mut().zip(&deriv) {
                    *r += pw[i] * dj / fact;
                }
            }
        }
        pw = series_mul(&pw, &dv, m);
        deriv = (0..n).map(|col| (0..n).map(|k| deriv[k] * d[(k, col)]).sum()).collect();
    }

    let mut out = vec![vec![Complex64::new(0.0, 0.0); n]; m + 1];
    for (i, wi) in weight.iter().enumerate() {
        for (j, cj) in comp.iter().enumerate().take(m + 1 - i) {
            for (o, x) in out[i + j].iter_mut().zip(cj) {
                *o += wi * *x * side.sign;
            }
        }
    }
    Ok(out)
}

fn series_mul(a: &[f64], b: &[f64], m: usize) -> Vec<f64> {
    let mut r = vec![0.0; m + 1];
    for (i, ai) in a.iter().enumerate().take(m + 1) {
        for (j, bj) in b.iter().enumerate().take(m + 1 - i) {
            r[i + j] += ai * bj;
        }
    }
    r
}

/// `(a0 + a1 τ)/(b0 + b1 τ)` to order `m`.
fn series_div(a: &[f64; 2], b: &[f64; 2], m: usize) -> Vec<f64> {
    let geo: Vec<f64> = (0..=m).map(|j| (-b[1] / b[0]).powi(j as i32) / b[0]).collect();
    let mut num = vec![0.0; m + 1];
    num[0] = a[0];
    if m >= 1 {
        num[1] = a[1];
    }
    series_mul(&num, &geo, m)
}

/// Matching rows: `(p - 1)(m + 1) + 2(m + 1)` rows of unit norm over the
/// `(p + 1) N` stored values.
pub fn build_constraints(p: u64, s: Complex64, n: usize, m: usize) -> Result<DMatrix<Complex64>> {
    if m < 1 {
        return Err(Error::Config("matching order must be at least 1".into()));
    }
    let cheb = Cheb::new(n);
    let d = cheb.diff_matrix();
    let js = junctions(p)?;
    let cols = (p as usize + 1) * n;
    let mut mat = DMatrix::zeros(js.len() * (m + 1), cols);
    for (ji, j) in js.iter().enumerate() {
        let chart = |k: usize| Chart::for_sheet(k as u64, p);
        let l = side_jet(&j.left, j.point, chart(j.left.component), &cheb, &d, s, m)?;
        let r = side_jet(&j.right, j.point, chart(j.right.component), &cheb, &d, s, m)?;
        for i in 0..=m {
            let row = ji * (m + 1) + i;
            for col in 0..n {
                mat[(row, j.left.component * n + col)] += l[i][col];
                mat[(row, j.right.component * n + col)] -= r[i][col];
            }
            let norm = mat.row(row).norm();
            if norm > 0.0 {
                mat.row_mut(row).scale_mut(1.0 / norm);
            }
        }
    }
    Ok(mat)
}

/// `[I - L_s; C(s)]`.
pub fn stacked_matrix(p: u64, s: Complex64, n: usize, m: usize) -> Result<DMatrix<Complex64>> {
    let op = build_transfer(p)?;
    let l = assemble_matrix(&op, s, n)?;
    let c = build_constraints(p, s, n, m)?;
    let size = l.nrows();
    let mut out = DMatrix::zeros(size + c.nrows(), size);
    out.view_mut((0, 0), (size, size)).copy_from(&(DMatrix::identity(size, size) - l));
    out.view_mut((size, 0), (c.nrows(), size)).copy_from(&c);
    Ok(out)
}

pub fn sigma_min(p: u64, s: Complex64, n: usize, m: usize) -> Result<f64> {
    let a = stacked_matrix(p, s, n, m)?;
    Ok(a.singular_values().iter().copied().fold(f64::INFINITY, f64::min))
}

/// Golden-section minimization on `[lo, hi]` down to a bracket of width `tol`.
/// Fails when the minimum sits at an end of the bracket.
pub fn golden_min<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while b - a > tol {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2)?;
        }
    }
    let (x, fx) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
    let edge = 2.0 * tol.max(1e-12 * (hi - lo));
    if x - lo <= edge || hi - x <= edge {
        return Err(Error::NoInteriorMinimum { lo, hi });
    }
    Ok((x, fx))
}

/// Refines a dip of `σ_min(σ₀ + it)` inside `[lo, hi]`.
pub fn refine(p: u64, n: usize, m: usize, re_s: f64, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)> {
    golden_min(|t| sigma_min(p, Complex64::new(re_s, t), n, m), lo, hi, tol)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub eigen: f64,
    pub constraints: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Confirmation {
    #[serde(rename = "N")]
    pub n: usize,
    pub t: f64,
    pub sigma_min: f64,
    pub shift: f64,
    pub deepened: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub t: f64,
    pub sigma_min: f64,
    pub local_median: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub confirmation: Option<Confirmation>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub residuals: Option<Residuals>,
}

impl Candidate {
    /// Persisted under grid refinement with a small shift and a deeper dip.
    pub fn is_stable(&self, max_shift: f64) -> bool {
        self.confirmation.as_ref().is_some_and(|c| c.shift <= max_shift && c.deepened)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanConfig {
    pub p: u64,
    pub n: usize,
    pub m: usize,
    pub re_s: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    pub steps: usize,
    /// Half-width, in grid points, of the window for the local median.
    pub median_window: usize,
    /// A candidate must sit this many times below its local median.
    pub dip_ratio: f64,
    pub refine_tol: f64,
}

impl ScanConfig {
    pub fn new(p: u64, n: usize, m: usize, re_s: f64, t_lo: f64, t_hi: f64, steps: usize) -> Self {
        ScanConfig { p, n, m, re_s, t_lo, t_hi, steps, median_window: 25, dip_ratio: 1e-4, refine_tol: 1e-8 }
    }

    pub fn validate(&self) -> Result<()> {
        crate::group::ensure_prime(self.p)?;
        if !(self.re_s > 0.0 && self.re_s < 1.0) {
            return Err(Error::Config(format!("Re s = {} must lie in (0, 1)", self.re_s)));
        }
        if self.n < 8 {
            return Err(Error::Config(format!("N = {} must be at least 8", self.n)));
        }
        if self.m < 1 {
            return Err(Error::Config("matching order must be at least 1".into()));
        }
        if self.steps < 2 || !(self.t_hi > self.t_lo) {
            return Err(Error::Config("t-range needs lo < hi and at least two steps".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let h = (self.t_hi - self.t_lo) / self.steps as f64;
        (0..=self.steps).map(|i| self.t_lo + h * i as f64).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanResult {
    pub config: ScanConfig,
    pub grid: Vec<(f64, f64)>,
    pub candidates: Vec<Candidate>,
}

fn local_median(vals: &[f64], i: usize, half: usize) -> f64 {
    let lo = i.saturating_sub(half);
    let hi = (i + half + 1).min(vals.len());
    let mut w = vals[lo..hi].to_vec();
    w.sort_by(f64::total_cmp);
    w[w.len() / 2]
}

/// Scans `σ_min` on the grid, then refines every grid-local minimum sitting
/// well below its neighbourhood and keeps those that end up at least
/// `dip_ratio` below the local median.
pub fn scan_line(cfg: &ScanConfig) -> Result<ScanResult> {
    cfg.validate()?;
    let ts = cfg.grid();
    let sig = ts
        .par_iter()
        .map(|&t| sigma_min(cfg.p, Complex64::new(cfg.re_s, t), cfg.n, cfg.m))
        .collect::<Result<Vec<_>>>()?;
    let mut picks = Vec::new();
    for i in 1..ts.len() - 1 {
        if sig[i] < sig[i - 1] && sig[i] <= sig[i + 1] {
            let med = local_median(&sig, i, cfg.median_window);
            if sig[i] < 0.5 * med {
                picks.push((i, med));
            }
        }
    }
    let refined: Vec<Option<Candidate>> = picks
        .par_iter()
        .map(|&(i, med)| {
            match refine(cfg.p, cfg.n, cfg.m, cfg.re_s, ts[i - 1], ts[i + 1], cfg.refine_tol) {
                Ok((t, s)) if s <= cfg.dip_ratio * med => {
                    Ok(Some(Candidate { t, sigma_min: s, local_median: med, confirmation: None, residuals: None }))
                }
                Ok(_) | Err(Error::NoInteriorMinimum { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    Ok(ScanResult {
        config: cfg.clone(),
        grid: ts.into_iter().zip(sig).collect(),
        candidates: refined.into_iter().flatten().collect(),
    })
}

/// Re-refines each candidate at a finer grid `n2` inside `±window`.
pub fn confirm(cfg: &ScanConfig, candidates: &mut [Candidate], n2: usize, window: f64) -> Result<()> {
    let outcomes = candidates
        .par_iter()
        .map(|c| match refine(cfg.p, n2, cfg.m, cfg.re_s, c.t - window, c.t + window, cfg.refine_tol) {
            Ok((t, s)) => Ok(Some((t, s))),
            Err(Error::NoInteriorMinimum { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;
    for (c, o) in candidates.iter_mut().zip(outcomes) {
        c.confirmation = Some(match o {
            Some((t, s)) => Confirmation { n: n2, t, sigma_min: s, shift: (t - c.t).abs(), deepened: s < c.sigma_min },
            None => Confirmation { n: n2, t: f64::NAN, sigma_min: f64::NAN, shift: f64::INFINITY, deepened: false },
        });
    }
    Ok(())
}

/// An extracted near-kernel vector with its diagnostics.
#[derive(Clone, Debug)]
pub struct PeriodFunction {
    pub vector: SampledFunctionVector,
    pub m: usize,
    pub sigma_min: f64,
    /// The second smallest singular value; a small gap hints at multiplicity.
    pub sigma_next: f64,
    pub residuals: Residuals,
}

/// Sup-norm residuals of a stored vector against `I - L_s` and the matching rows.
pub fn residuals(f: &SampledFunctionVector, m: usize) -> Result<Residuals> {
    let (p, s, n) = (f.p, f.s, f.n());
    let op = build_transfer(p)?;
    let l = assemble_matrix(&op, s, n)?;
    let c = build_constraints(p, s, n, m)?;
    let x = DVector::from_vec(f.flat());
    let eig = &x - &l * &x;
    let con = &c * &x;
    let sup = |v: &DVector<Complex64>| v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(Residuals { eigen: sup(&eig), constraints: sup(&con) })
}

/// Right singular vector of the smallest singular value, scaled to unit
/// sup-norm with its largest entry real and positive.
pub fn extract_period_function(p: u64, s: Complex64, n: usize, m: usize, threshold: f64) -> Result<PeriodFunction> {
    let a = stacked_matrix(p, s, n, m)?;
    let svd = a.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested V");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let (imin, inext) = (order[0], order[1]);
    let sigma = svd.singular_values[imin];
    if sigma > threshold {
        return Err(Error::NoKernel { sigma_min: sigma, threshold });
    }
    let raw: Vec<Complex64> = v_t.row(imin).iter().map(|z| z.conj()).collect();
    let pivot = *raw.iter().max_by(|a, b| a.norm().total_cmp(&b.norm())).expect("nonempty");
    let flat: Vec<Complex64> = raw.iter().map(|z| z / pivot).collect();
    let proto = SampledFunctionVector::zeros(p, s, SampledFunctionVector::sheet_domains(p), n)?;
    let vector = proto.from_flat(&flat)?;
    let residuals = residuals(&vector, m)?;
    Ok(PeriodFunction { vector, m, sigma_min: sigma, sigma_next: svd.singular_values[inext], residuals })
}

/// CSV with header `t,sigma_min,N,m`.
pub fn scan_csv(res: &ScanResult) -> String {
    let mut out = String::from("t,sigma_min,N,m\n");
    for (t, s) in &res.grid {
        out.push_str(&format!("{t:.10},{s:.12e},{},{}\n", res.config.n, res.config.m));
    }
    out
}

/// The candidates file written by a scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidatesFile {
    pub p: u64,
    #[serde(rename = "N")]
    pub n: usize,
    pub m: usize,
    pub re_s: f64,
    pub candidates: Vec<Candidate>,
}

pub fn candidates_json(res: &ScanResult) -> CandidatesFile {
    CandidatesFile {
        p: res.config.p,
        n: res.config.n,
        m: res.config.m,
        re_s: res.config.re_s,
        candidates: res.candidates.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::FunctionEvaluator;
    use crate::function_space::sample;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constraint_row_count() {
        let cm = build_constraints(3, c(0.5, 4.0), 16, 3).unwrap();
        assert_eq!(cm.nrows(), 16);
        assert_eq!(cm.ncols(), 64);
        for r in 0..cm.nrows() {
            assert!((cm.row(r).norm() - 1.0).abs() < 1e-12);
        }
        assert!(build_constraints(3, c(0.5, 4.0), 16, 0).is_err());
    }

    /// Components cut from one function `φ` on `P¹` that is smooth in the line
    /// model: `f_k = φ` on `I_k` for `1 ≤ k ≤ p-1`, `-f_0 = φ` on `(0,∞)` and
    /// `f_p = φ` on `(-∞,0)`. PF3 then needs `τ_s(h_k)φ = -φ` on the left of
    /// `k/p`, which a generic `φ` does not satisfy, so only the `0` and `∞`
    /// rows are checked here.
    #[test]
    fn matched_input_satisfies_junctions_at_zero_and_infinity() {
        let p = 3;
        let s = c(0.5, 2.5);
        let n = 40;
        let phi = move |x: f64| (-s * (1.0 + x * x).ln()).exp() * c((x / (1.0 + x * x)).cos(), 0.3 * x / (1.0 + x * x));
        let doms = SampledFunctionVector::sheet_domains(p);
        let evals: Vec<_> = doms
            .iter()
            .enumerate()
            .map(|(k, d)| {
                let sign = if k == 0 { -1.0 } else { 1.0 };
                FunctionEvaluator::new(*d, move |x| phi(x) * sign).with_decay(2.0 * s, c(sign, 0.0))
            })
            .collect();
        let v = sample(p, s, doms, &evals, n).unwrap();
        let cm = build_constraints(p, s, n, 3).unwrap();
        let r = &cm * DVector::from_vec(v.flat());
        // the last two junctions (0 and ∞) are the final 8 rows
        for i in (r.len() - 8)..r.len() {
            assert!(r[i].norm() < 1e-10, "row {i}: {}", r[i]);
        }
    }

    #[test]
    fn golden_section_examples() {
        let (x, _) = golden_min(|t| Ok((t - 2.0).powi(2) + 1e-10), 1.0, 3.5, 1e-9).unwrap();
        assert!((x - 2.0).abs() < 1e-8);
        assert!(matches!(golden_min(|t| Ok(t), 0.0, 1.0, 1e-8), Err(Error::NoInteriorMinimum { .. })));
    }

    #[test]
    fn conjugate_parameter_symmetry() {
        let a = sigma_min(3, c(0.5, 3.3), 16, 3).unwrap();
        let b = sigma_min(3, c(0.5, -3.3), 16, 3).unwrap();
        assert!((a - b).abs() <= 1e-10 * a.max(1e-300));
    }

    #[test]
    fn scan_config_validation() {
        let mut cfg = ScanConfig::new(5, 48, 3, 1.5, 0.0, 10.0, 100);
        assert!(cfg.validate().is_err());
        cfg.re_s = 0.5;
        assert!(cfg.validate().is_ok());
        assert_eq!(cfg.grid().len(), 101);
        cfg.n = 4;
        assert!(cfg.validate().is_err());
        cfg.n = 48;
        cfg.p = 4;
        assert!(cfg.validate().is_err());
    }
}
