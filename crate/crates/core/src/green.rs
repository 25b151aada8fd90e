//! Poisson kernel, the Green form `[u, v] = u_z v dz + u v_z̄ dz̄` with
//! `v = R(t, ·)^s`, and its integrals along paths in the upper half-plane.

use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary::{real_pow, FunctionEvaluator, Interval};
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::quad::{composite_gl, integrate, Pair};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `R(t, z) = Im(1/(t - z)) = y / ((t - x)² + y²)`.
pub fn poisson_kernel(t: f64, z: Complex64) -> Result<f64> {
    if !(z.im > 0.0) {
        return Err(Error::OutsideUpperHalfPlane(z));
    }
    let dx = t - z.re;
    Ok(z.im / (dx * dx + z.im * z.im))
}

/// `∂_z̄ R(t, z) = (i/2) / (t - z̄)²`.
pub fn poisson_dzbar(t: f64, z: Complex64) -> Complex64 {
    let w = c(t) - z.conj();
    0.5 * I / (w * w)
}

/// `K_ν(x)` and `K_ν'(x)` for complex order and `x > 0`, from
/// `K_ν(x) = ∫_0^∞ e^{-x cosh τ} cosh(ντ) dτ`.
pub fn bessel_k_pair(nu: Complex64, x: f64) -> (Complex64, Complex64) {
    let tmax = k_cutoff(nu, x);
    let r = integrate(
        |tau: f64| {
            let e = (-x * tau.cosh()).exp();
            let ch = (nu * tau).cosh();
            Pair(ch * e, -ch * (e * tau.cosh()))
        },
        0.0,
        tmax,
        1e-15 * (-x).exp(),
        1e-13,
        2000,
    );
    (r.value.0, r.value.1)
}

pub fn bessel_k(nu: Complex64, x: f64) -> Complex64 {
    bessel_k_pair(nu, x).0
}

/// Point past which `e^{-x cosh τ + |Re ν| τ}` is below `1e-18 · e^{-x}`.
pub fn k_cutoff(nu: Complex64, x: f64) -> f64 {
    let a = nu.re.abs();
    let mut tau: f64 = 1.0;
    while x * (tau.cosh() - 1.0) - a * tau < 18.0 * std::f64::consts::LN_10 + 2.0 {
        tau += 0.25;
    }
    tau
}

/// Independent check: trapezoid rule with step `h` (spectrally accurate here).
pub fn bessel_k_trapezoid(nu: Complex64, x: f64, h: f64) -> Complex64 {
    let tmax = k_cutoff(nu, x);
    let n = (tmax / h).ceil() as usize;
    let f = |tau: f64| (nu * tau).cosh() * (-x * tau.cosh()).exp();
    let mut acc = 0.5 * f(0.0);
    for j in 1..=n {
        acc += f(j as f64 * h);
    }
    acc * h
}

/// A Laplace eigenfunction `u` on `H` with `Δu = s(1-s)u` (hyperbolic Laplacian).
pub trait EigenfunctionModel: Send + Sync {
    fn s(&self) -> Complex64;
    fn u(&self, z: Complex64) -> Complex64;
    /// `∂_z u = (u_x - i u_y)/2`.
    fn u_z(&self, z: Complex64) -> Complex64;
    /// `∂_z̄ u = (u_x + i u_y)/2`.
    fn u_zbar(&self, z: Complex64) -> Complex64;
    /// Rapid decay as `y → ∞`.
    fn decays(&self) -> bool;
}

/// `u = y^s`.
#[derive(Clone, Copy, Debug)]
pub struct PowerModel {
    pub s: Complex64,
}

impl EigenfunctionModel for PowerModel {
    fn s(&self) -> Complex64 {
        self.s
    }
    fn u(&self, z: Complex64) -> Complex64 {
        real_pow(z.im, self.s)
    }
    fn u_z(&self, z: Complex64) -> Complex64 {
        -0.5 * I * self.s * real_pow(z.im, self.s - 1.0)
    }
    fn u_zbar(&self, z: Complex64) -> Complex64 {
        0.5 * I * self.s * real_pow(z.im, self.s - 1.0)
    }
    fn decays(&self) -> bool {
        false
    }
}

/// `u = √y K_{s-1/2}(2π|n|y) e^{2πinx}`.
#[derive(Clone, Copy, Debug)]
pub struct BesselMode {
    pub s: Complex64,
    pub n: i64,
}

impl BesselMode {
    /// `(u, u_x, u_y)`.
    fn parts(&self, z: Complex64) -> (Complex64, Complex64, Complex64) {
        let k = 2.0 * PI * self.n.unsigned_abs() as f64;
        let (kv, dk) = bessel_k_pair(self.s - 0.5, k * z.im);
        let e = (2.0 * PI * self.n as f64 * z.re * I).exp();
        let sy = z.im.sqrt();
        let u = sy * kv * e;
        let ux = 2.0 * PI * self.n as f64 * I * u;
        let uy = e * (kv / (2.0 * sy) + sy * k * dk);
        (u, ux, uy)
    }
}

impl EigenfunctionModel for BesselMode {
    fn s(&self) -> Complex64 {
        self.s
    }
    fn u(&self, z: Complex64) -> Complex64 {
        self.parts(z).0
    }
    fn u_z(&self, z: Complex64) -> Complex64 {
        let (_, ux, uy) = self.parts(z);
        0.5 * (ux - I * uy)
    }
    fn u_zbar(&self, z: Complex64) -> Complex64 {
        let (_, ux, uy) = self.parts(z);
        0.5 * (ux + I * uy)
    }
    fn decays(&self) -> bool {
        self.n != 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientJson {
    pub n: i64,
    pub a: ComplexJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CuspFormFile {
    pub s: ComplexJson,
    pub coefficients: Vec<CoefficientJson>,
}

/// `u = Σ_{n≠0} a_n √y K_{s-1/2}(2π|n|y) e^{2πinx}`.
#[derive(Clone, Debug)]
pub struct FourierSum {
    pub s: Complex64,
    pub terms: Vec<(Complex64, BesselMode)>,
}

impl FourierSum {
    pub fn new(s: Complex64, coefficients: &[(i64, Complex64)]) -> Result<Self> {
        if coefficients.iter().any(|&(n, _)| n == 0) {
            return Err(Error::Config("a cusp form has no constant term (n = 0)".into()));
        }
        let terms = coefficients.iter().map(|&(n, a)| (a, BesselMode { s, n })).collect();
        Ok(FourierSum { s, terms })
    }

    pub fn from_file(file: &CuspFormFile) -> Result<Self> {
        let s = Complex64::new(file.s.re, file.s.im);
        let coeffs: Vec<_> = file.coefficients.iter().map(|c| (c.n, Complex64::new(c.a.re, c.a.im))).collect();
        Self::new(s, &coeffs)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_file(&serde_json::from_str(&text)?)
    }

    /// `(u, u_x, u_y)`, sharing one Bessel evaluation per `|n|`.
    fn parts(&self, z: Complex64) -> (Complex64, Complex64, Complex64) {
        let mut out = (c(0.0), c(0.0), c(0.0));
        for (a, m) in &self.terms {
            let (u, ux, uy) = m.parts(z);
            out.0 += a * u;
            out.1 += a * ux;
            out.2 += a * uy;
        }
        out
    }
}

impl EigenfunctionModel for FourierSum {
    fn s(&self) -> Complex64 {
        self.s
    }
    fn u(&self, z: Complex64) -> Complex64 {
        self.parts(z).0
    }
    fn u_z(&self, z: Complex64) -> Complex64 {
        let (_, ux, uy) = self.parts(z);
        0.5 * (ux - I * uy)
    }
    fn u_zbar(&self, z: Complex64) -> Complex64 {
        let (_, ux, uy) = self.parts(z);
        0.5 * (ux + I * uy)
    }
    fn decays(&self) -> bool {
        true
    }
}

/// Möbius action on `H`.
pub fn act_h(g: &GroupElement, z: Complex64) -> Complex64 {
    let [a, b, cc, d] = g.entries().map(|e| e as f64);
    (a * z + b) / (cc * z + d)
}

/// `u ∘ g`.
#[derive(Clone)]
pub struct Transformed {
    pub inner: Arc<dyn EigenfunctionModel>,
    pub g: GroupElement,
}

impl Transformed {
    fn dg(&self, z: Complex64) -> Complex64 {
        let w = self.g.c() as f64 * z + self.g.d() as f64;
        1.0 / (w * w)
    }
}

impl EigenfunctionModel for Transformed {
    fn s(&self) -> Complex64 {
        self.inner.s()
    }
    fn u(&self, z: Complex64) -> Complex64 {
        self.inner.u(act_h(&self.g, z))
    }
    // g is holomorphic, so ∂_z(u∘g) = (u_z ∘ g) g' and ∂_z̄(u∘g) = (u_z̄ ∘ g) conj(g').
    fn u_z(&self, z: Complex64) -> Complex64 {
        self.inner.u_z(act_h(&self.g, z)) * self.dg(z)
    }
    fn u_zbar(&self, z: Complex64) -> Complex64 {
        self.inner.u_zbar(act_h(&self.g, z)) * self.dg(z).conj()
    }
    fn decays(&self) -> bool {
        self.inner.decays() && self.g.c() == 0
    }
}

/// The zero function.
#[derive(Clone, Copy, Debug)]
pub struct ZeroModel {
    pub s: Complex64,
}

impl EigenfunctionModel for ZeroModel {
    fn s(&self) -> Complex64 {
        self.s
    }
    fn u(&self, _: Complex64) -> Complex64 {
        c(0.0)
    }
    fn u_z(&self, _: Complex64) -> Complex64 {
        c(0.0)
    }
    fn u_zbar(&self, _: Complex64) -> Complex64 {
        c(0.0)
    }
    fn decays(&self) -> bool {
        true
    }
}

/// `[u, R(t,·)^s]` pulled back along `z(r)` with velocity `z'(r)`.
pub fn green_form_pullback(
    u: &dyn EigenfunctionModel,
    s: Complex64,
    t: f64,
    z: Complex64,
    dz: Complex64,
) -> Result<Complex64> {
    let r = poisson_kernel(t, z)?;
    let v = real_pow(r, s);
    let v_zbar = s * real_pow(r, s - 1.0) * poisson_dzbar(t, z);
    Ok(u.u_z(z) * v * dz + u.u(z) * v_zbar * dz.conj())
}

/// A piece of a path in `H`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PathPiece {
    /// Straight segment between interior points.
    Segment(Complex64, Complex64),
    /// Vertical ray `x + iy`, `y` from `from` to `to`; `to = ∞` reaches the cusp `∞`.
    Vertical { x: f64, from: f64, to: f64 },
}

impl PathPiece {
    pub fn reversed(&self) -> PathPiece {
        match *self {
            PathPiece::Segment(a, b) => PathPiece::Segment(b, a),
            PathPiece::Vertical { x, from, to } => PathPiece::Vertical { x, from: to, to: from },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryPath {
    pub pieces: Vec<PathPiece>,
}

impl BoundaryPath {
    pub fn segment(a: Complex64, b: Complex64) -> Self {
        BoundaryPath { pieces: vec![PathPiece::Segment(a, b)] }
    }

    /// Closed polygon through the given vertices.
    pub fn polygon(vertices: &[Complex64]) -> Self {
        let n = vertices.len();
        BoundaryPath { pieces: (0..n).map(|i| PathPiece::Segment(vertices[i], vertices[(i + 1) % n])).collect() }
    }

    pub fn reversed(&self) -> Self {
        BoundaryPath { pieces: self.pieces.iter().rev().map(PathPiece::reversed).collect() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathIntegral {
    pub value: Complex64,
    pub error: f64,
}

/// `∫_path [u, R(t,·)^s]` by adaptive Gauss–Kronrod.
///
/// A ray to `∞` is integrated in the variable `r ∈ [0, 1)`, `y = y0 + r/(1-r)`,
/// which needs the decay flag; boundary endpoints at `y = 0` are rejected.
pub fn path_integral(u: &dyn EigenfunctionModel, s: Complex64, t: f64, path: &BoundaryPath, tol: f64) -> Result<PathIntegral> {
    let mut total = PathIntegral { value: c(0.0), error: 0.0 };
    for piece in &path.pieces {
        let r = match *piece {
            PathPiece::Segment(a, b) => {
                if !(a.im > 0.0 && b.im > 0.0) {
                    return Err(Error::OutsideUpperHalfPlane(if a.im > 0.0 { b } else { a }));
                }
                run(|r| green_form_pullback(u, s, t, a + (b - a) * r, b - a), 0.0, 1.0, tol)?
            }
            PathPiece::Vertical { x, from, to } => {
                if from <= 0.0 || to <= 0.0 {
                    return Err(Error::NonDecaying);
                }
                let (lo, hi, sign) = if from <= to { (from, to, 1.0) } else { (to, from, -1.0) };
                let mut r = if hi.is_infinite() {
                    if !u.decays() {
                        return Err(Error::NonDecaying);
                    }
                    run(
                        |r| {
                            let q = 1.0 / (1.0 - r);
                            let z = Complex64::new(x, lo + r * q);
                            green_form_pullback(u, s, t, z, I * q * q)
                        },
                        0.0,
                        1.0,
                        tol,
                    )?
                } else {
                    run(|y| green_form_pullback(u, s, t, Complex64::new(x, y), I), lo, hi, tol)?
                };
                r.value *= sign;
                r
            }
        };
        total.value += r.value;
        total.error += r.error;
    }
    Ok(total)
}

fn run(mut f: impl FnMut(f64) -> Result<Complex64>, a: f64, b: f64, tol: f64) -> Result<PathIntegral> {
    let mut err = None;
    let r = integrate(
        |x| match f(x) {
            Ok(v) if v.is_finite() => v,
            Ok(_) => c(0.0),
            Err(e) => {
                err.get_or_insert(e);
                c(0.0)
            }
        },
        a,
        b,
        tol,
        0.0,
        4000,
    );
    match err {
        Some(e) => Err(e),
        None => Ok(PathIntegral { value: r.value, error: r.error }),
    }
}

/// Fixed quadrature nodes along a path with `u` and `u_z` cached, so that
/// integrals for many `t` reuse the expensive model evaluations.
#[derive(Clone, Debug)]
pub struct SampledPath {
    z: Vec<Complex64>,
    dz: Vec<Complex64>,
    u: Vec<Complex64>,
    u_z: Vec<Complex64>,
}

impl SampledPath {
    /// The vertical ray `x + iy`, `y ≥ y0`, truncated at `y0 + length`.
    pub fn vertical_ray(u: &dyn EigenfunctionModel, x: f64, y0: f64, length: f64, panels: usize, order: usize) -> Self {
        let (ys, ws) = composite_gl(y0, y0 + length, panels, order);
        let z: Vec<Complex64> = ys.iter().map(|&y| Complex64::new(x, y)).collect();
        let dz = ws.iter().map(|&w| I * w).collect();
        let (u_v, u_z) = z.par_iter().map(|&z| (u.u(z), u.u_z(z))).unzip();
        SampledPath { z, dz, u: u_v, u_z }
    }

    /// `∫ [u, R(t,·)^s]` with the cached rule.
    pub fn integral(&self, s: Complex64, t: f64) -> Complex64 {
        let mut acc = c(0.0);
        for i in 0..self.z.len() {
            let z = self.z[i];
            let dx = t - z.re;
            let r = z.im / (dx * dx + z.im * z.im);
            let v = real_pow(r, s);
            let v_zbar = s * real_pow(r, s - 1.0) * poisson_dzbar(t, z);
            acc += self.u_z[i] * v * self.dz[i] + self.u[i] * v_zbar * self.dz[i].conj();
        }
        acc
    }

    /// `∫ [u, y^s]`, the limit of `|x|^(2s) ∫ [u, R(x,·)^s]` as `|x| → ∞`.
    pub fn integral_at_infinity(&self, s: Complex64) -> Complex64 {
        let mut acc = c(0.0);
        for i in 0..self.z.len() {
            let y = self.z[i].im;
            let v_zbar = 0.5 * I * s * real_pow(y, s - 1.0);
            acc += self.u_z[i] * real_pow(y, s) * self.dz[i] + self.u[i] * v_zbar * self.dz[i].conj();
        }
        acc
    }
}

/// `t ↦ c_g(t) = ∫_{g⁻¹.∞}^{∞} [u, R(t,·)^s]` for a cusp form `u`.
///
/// The path from the cusp `a = g⁻¹.∞` is split at `a + i/|c|`; the lower part
/// is moved by `g` to a ray from `g(a + i/|c|) = a/c·… + i/|c|` up to `∞`
/// using the invariance of `u`, which gives
///
/// ```text
/// c_g(t) = ∫_{a + i/|c|}^{∞} [u, R(t,·)^s] - (g'(t))^s ∫_{B}^{∞} [u, R(g.t,·)^s],
/// B = g(a + i/|c|).
/// ```
///
/// Both rays stay at height `≥ 1/|c|`, where a truncated Fourier expansion is
/// accurate.
#[derive(Clone, Debug)]
pub struct CocycleIntegral {
    s: Complex64,
    g: GroupElement,
    rays: Option<(SampledPath, SampledPath)>,
}

impl CocycleIntegral {
    pub fn eval(&self, t: f64) -> Complex64 {
        let Some((upper, lower)) = &self.rays else {
            return c(0.0);
        };
        let g = &self.g;
        let w = g.c() as f64 * t + g.d() as f64;
        let first = upper.integral(self.s, t);
        if w == 0.0 {
            // g.t = ∞: (g'(t))^s R(g.t, ·)^s → |c|^(2s) y^s
            return first - real_pow((g.c() as f64).abs(), 2.0 * self.s) * lower.integral_at_infinity(self.s);
        }
        let gt = (g.a() as f64 * t + g.b() as f64) / w;
        first - real_pow(1.0 / (w * w), self.s) * lower.integral(self.s, gt)
    }

    pub fn into_evaluator(self) -> FunctionEvaluator {
        FunctionEvaluator::new(Interval::real_line(), move |t| self.eval(t))
    }
}

/// Ray discretization used by [`cocycle_integral`]: `panels × order` nodes
/// over a height range of `length`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RayRule {
    pub length: f64,
    pub panels: usize,
    pub order: usize,
}

impl Default for RayRule {
    fn default() -> Self {
        RayRule { length: 12.0, panels: 48, order: 16 }
    }
}

pub fn cocycle_integral(u: &dyn EigenfunctionModel, g: &GroupElement, rule: RayRule) -> Result<CocycleIntegral> {
    if !u.decays() {
        return Err(Error::NonDecaying);
    }
    let s = u.s();
    if g.c() == 0 {
        // g = ±T^n fixes ∞: the path is empty
        return Ok(CocycleIntegral { s, g: *g, rays: None });
    }
    let cc = g.c() as f64;
    let a = -(g.d() as f64) / cc;
    let y0 = 1.0 / cc.abs();
    let b = act_h(g, Complex64::new(a, y0));
    let upper = SampledPath::vertical_ray(u, a, y0, rule.length, rule.panels, rule.order);
    let lower = SampledPath::vertical_ray(u, b.re, b.im, rule.length, rule.panels, rule.order);
    Ok(CocycleIntegral { s, g: *g, rays: Some((upper, lower)) })
}

/// `-y²(u_xx + u_yy)` by a sixth-order central stencil with step `h`.
pub fn fd_laplacian(u: &dyn EigenfunctionModel, z: Complex64, h: f64) -> Complex64 {
    const W: [f64; 4] = [-49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0];
    let mut uxx = W[0] * u.u(z);
    let mut uyy = W[0] * u.u(z);
    for (k, w) in W.iter().enumerate().skip(1) {
        let d = h * k as f64;
        uxx += *w * (u.u(z + d) + u.u(z - d));
        uyy += *w * (u.u(z + I * d) + u.u(z - I * d));
    }
    -(z.im * z.im) * (uxx + uyy) / (h * h)
}
