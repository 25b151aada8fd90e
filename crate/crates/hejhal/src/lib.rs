//! Hejhal's collocation method for Maass cusp forms on `Γ₀(p)`, `p` prime.
//!
//! A cusp form that is an eigenfunction of the Fricke involution `W_p` is
//! invariant (up to the sign `ε`) under the extended group `Γ₀⁺(p)`, whose
//! fundamental domain has a single cusp. Writing
//!
//! ```text
//! u(x + iy) = Σ_{n ≥ 1} c_n √y K_{ir}(2πny) cs(2πnx),   cs = cos or sin,
//! ```
//!
//! and pulling points on the horocycle `Im z = Y` back into the fundamental
//! domain gives a linear system for the `c_n`. Solving with `c_1 = 1` at two
//! heights and comparing `c_2, c_3` yields a function of `r` that vanishes at
//! eigenvalues `1/4 + r²`.

use std::f64::consts::PI;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// `e^{πr/2} K_{ir}(x)` by the trapezoid rule on `∫_0^∞ e^{-x cosh τ} cos(rτ) dτ`.
///
/// The scaling keeps values of order one for moderate `r`.
pub fn k_scaled(r: f64, x: f64) -> f64 {
    const H: f64 = 0.02;
    let tmax = (60.0 / x).max(1.0).acosh() + 1.5;
    let n = (tmax / H) as usize;
    let mut acc = 0.5 * (-x + 0.5 * PI * r).exp();
    for j in 1..=n {
        let tau = j as f64 * H;
        acc += (-x * tau.cosh() + 0.5 * PI * r).exp() * (r * tau).cos();
    }
    acc * H
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// `(x, y)` with `a x + b y = gcd(a, b) > 0`.
fn bezout(a: i64, b: i64) -> (i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut x0, mut x1) = (1i64, 0i64);
    let (mut y0, mut y1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    if r0 < 0 {
        (-x0, -y0)
    } else {
        (x0, y0)
    }
}

/// A point of the upper half-plane as `(x, y)`.
pub type Point = (f64, f64);

fn mobius(m: [f64; 4], (x, y): Point) -> Point {
    let [a, b, c, d] = m;
    let (nr, ni) = (a * x + b, a * y);
    let (dr, di) = (c * x + d, c * y);
    let q = dr * dr + di * di;
    ((nr * dr + ni * di) / q, (ni * dr - nr * di) / q)
}

/// Pull `z` into the fundamental domain of `Γ₀⁺(p)` by greedily maximizing
/// the height. Returns the reduced point and the number of Fricke-type
/// elements used, mod 2.
pub fn reduce(z: Point, p: i64) -> (Point, bool) {
    let (mut x, mut y) = z;
    let mut flipped = false;
    for _ in 0..100 {
        x -= (x + 0.5).floor();
        let mut best = y;
        let mut step: Option<([f64; 4], bool)> = None;
        let cmax = (1.0 / y) as i64 + 1;
        for c in 1..=cmax {
            let base = (-(c as f64) * x).floor() as i64;
            for d in base - 1..=base + 2 {
                let cf = c as f64;
                let q = (cf * x + d as f64).powi(2) + (cf * y).powi(2);
                if c % p == 0 && gcd(c, d) == 1 {
                    let v = y / q;
                    if v > best + 1e-13 {
                        let (a, b) = bezout(d, -c);
                        best = v;
                        step = Some(([a as f64, b as f64, c as f64, d as f64], false));
                    }
                }
                if c % p != 0 && gcd(c, p * d) == 1 {
                    let v = y / (p as f64 * q);
                    if v > best + 1e-13 {
                        // [[p a, b], [p c, p d]] with determinant p
                        let (a, b) = bezout(p * d, -c);
                        let pf = p as f64;
                        best = v;
                        step = Some(([pf * a as f64, b as f64, pf * c as f64, pf * d as f64], true));
                    }
                }
            }
        }
        match step {
            None => return ((x, y), flipped),
            Some((m, w)) => {
                (x, y) = mobius(m, (x, y));
                flipped ^= w;
            }
        }
    }
    panic!("reduction did not terminate for {z:?}");
}

/// Parity under `x ↦ -x` and the Fricke eigenvalue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Symmetry {
    pub odd: bool,
    pub fricke: i8,
}

impl Symmetry {
    pub const ALL: [Symmetry; 4] = [
        Symmetry { odd: false, fricke: 1 },
        Symmetry { odd: false, fricke: -1 },
        Symmetry { odd: true, fricke: 1 },
        Symmetry { odd: true, fricke: -1 },
    ];

    fn cs(&self, x: f64) -> f64 {
        if self.odd {
            x.sin()
        } else {
            x.cos()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Config {
    pub p: i64,
    /// The two collocation heights; both below the fundamental domain.
    pub y1: f64,
    pub y2: f64,
    /// Number of unknown coefficients.
    pub m0: usize,
    /// Collocation points per horocycle.
    pub q: usize,
}

impl Config {
    pub fn desk(p: i64) -> Config {
        Config { p, y1: 0.18, y2: 0.16, m0: 45, q: 60 }
    }
}

/// Collocation points on one horocycle together with their reductions.
#[derive(Clone, Debug)]
struct Horocycle {
    y: f64,
    xs: Vec<f64>,
    reduced: Vec<(Point, bool)>,
}

impl Horocycle {
    fn new(p: i64, y: f64, q: usize) -> Self {
        let xs: Vec<f64> = (1..=q).map(|j| (j as f64 - 0.5) / (2 * q) as f64).collect();
        let reduced = xs.iter().map(|&x| reduce((x, y), p)).collect();
        Horocycle { y, xs, reduced }
    }

    /// `√y*_j K̃(2πl y*_j)` for every collocation point, and `√Y K̃(2πnY)`.
    fn bessel_table(&self, r: f64, m0: usize) -> BesselTable {
        let cols = self
            .reduced
            .iter()
            .map(|&((_, ys), _)| (1..=m0).map(|l| ys.sqrt() * k_scaled(r, 2.0 * PI * l as f64 * ys)).collect())
            .collect();
        let diag = (1..=m0).map(|n| self.y.sqrt() * k_scaled(r, 2.0 * PI * n as f64 * self.y)).collect();
        BesselTable { cols, diag }
    }

    /// `V c = 0` with `V_{nl} = (2/Q) Σ_j cs(2πnx_j) ε^{w_j} √y*_j K̃(2πl y*_j) cs(2πl x*_j) - δ_{nl} √Y K̃(2πnY)`.
    fn system(&self, table: &BesselTable, sym: Symmetry) -> DMatrix<f64> {
        let q = self.xs.len();
        let m0 = table.diag.len();
        let mut v = DMatrix::zeros(m0, m0);
        for (j, &x) in self.xs.iter().enumerate() {
            let ((xs, _), w) = self.reduced[j];
            let sign = if w && sym.fricke < 0 { -1.0 } else { 1.0 };
            let col: Vec<f64> =
                (0..m0).map(|l| sign * table.cols[j][l] * sym.cs(2.0 * PI * (l + 1) as f64 * xs)).collect();
            for n in 0..m0 {
                let row = sym.cs(2.0 * PI * (n + 1) as f64 * x);
                for l in 0..m0 {
                    v[(n, l)] += row * col[l];
                }
            }
        }
        v *= 2.0 / q as f64;
        for n in 0..m0 {
            v[(n, n)] -= table.diag[n];
        }
        v
    }

    /// Coefficients `c_1 = 1, c_2, …, c_{m0}`.
    fn coefficients(&self, table: &BesselTable, sym: Symmetry) -> Option<Vec<f64>> {
        let v = self.system(table, sym);
        let m0 = v.nrows();
        let a = v.view((1, 1), (m0 - 1, m0 - 1)).into_owned();
        let b: DVector<f64> = -v.view((1, 0), (m0 - 1, 1)).column(0).into_owned();
        let sol = a.lu().solve(&b)?;
        Some(std::iter::once(1.0).chain(sol.iter().copied()).collect())
    }
}

struct BesselTable {
    cols: Vec<Vec<f64>>,
    diag: Vec<f64>,
}

/// Root of `f` in a sign-changing bracket by the Illinois variant of regula falsi.
fn illinois(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let (mut fa, mut fb) = (f(a), f(b));
    let mut side = 0;
    for _ in 0..100 {
        let c = (a * fb - b * fa) / (fb - fa);
        if (b - a).abs() < tol || !c.is_finite() {
            return c;
        }
        let fc = f(c);
        if fc == 0.0 {
            return c;
        }
        if (fc < 0.0) == (fb < 0.0) {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
        if (fc.abs()) < 1e-14 {
            return c;
        }
    }
    (a * fb - b * fa) / (fb - fa)
}

/// `Σ c_n √y K̃(2πny) cs(2πnx)` for coefficients from [`Solver::coefficients`].
pub fn eval_form(r: f64, sym: Symmetry, c: &[f64], (x, y): Point) -> f64 {
    c.iter()
        .enumerate()
        .map(|(i, cn)| {
            let n = (i + 1) as f64;
            cn * y.sqrt() * k_scaled(r, 2.0 * PI * n * y) * sym.cs(2.0 * PI * n * x)
        })
        .sum()
}

/// Largest second defect component accepted at a refined root.
pub const ROOT_DEFECT: f64 = 1e-3;

/// The solver for one level.
#[derive(Clone, Debug)]
pub struct Solver {
    pub config: Config,
    h1: Horocycle,
    h2: Horocycle,
}

/// A located eigenvalue `1/4 + r²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub r: f64,
    pub symmetry: Symmetry,
    /// `|c_2(Y1) - c_2(Y2)|` and `|c_3(Y1) - c_3(Y2)|` at the root.
    pub defect: [f64; 2],
}

impl Solver {
    pub fn new(config: Config) -> Self {
        Solver {
            h1: Horocycle::new(config.p, config.y1, config.q),
            h2: Horocycle::new(config.p, config.y2, config.q),
            config,
        }
    }

    /// Smallest height reached by reducing a fine horocycle; the collocation
    /// heights must lie below it.
    pub fn fundamental_height(p: i64) -> f64 {
        (0..=400)
            .map(|j| reduce((-0.5 + j as f64 / 400.0, 1e-3), p).0 .1)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn coefficients(&self, r: f64, sym: Symmetry) -> Option<Vec<f64>> {
        self.h1.coefficients(&self.h1.bessel_table(r, self.config.m0), sym)
    }

    /// `(c_2(Y1) - c_2(Y2), c_3(Y1) - c_3(Y2))`.
    pub fn defect(&self, r: f64, sym: Symmetry) -> [f64; 2] {
        self.defects(r, &[sym])[0]
    }

    /// Defects for several classes sharing one set of Bessel evaluations.
    pub fn defects(&self, r: f64, syms: &[Symmetry]) -> Vec<[f64; 2]> {
        let m0 = self.config.m0;
        let (t1, t2) = (self.h1.bessel_table(r, m0), self.h2.bessel_table(r, m0));
        syms.iter()
            .map(|&sym| match (self.h1.coefficients(&t1, sym), self.h2.coefficients(&t2, sym)) {
                (Some(a), Some(b)) => [a[1] - b[1], a[2] - b[2]],
                _ => [f64::NAN; 2],
            })
            .collect()
    }

    /// Simultaneous sign changes of both defect components on a grid, refined
    /// by bisection on the first component. A bracket may straddle a pole of
    /// the defect instead of a zero; those are discarded by requiring the
    /// second component to vanish too.
    pub fn scan(&self, sym: Symmetry, r_lo: f64, r_hi: f64, step: f64) -> Vec<Root> {
        self.scan_classes(&[sym], r_lo, r_hi, step)
    }

    /// All four symmetry classes, sorted by `r`.
    pub fn scan_all(&self, r_lo: f64, r_hi: f64, step: f64) -> Vec<Root> {
        self.scan_classes(&Symmetry::ALL, r_lo, r_hi, step)
    }

    fn scan_classes(&self, syms: &[Symmetry], r_lo: f64, r_hi: f64, step: f64) -> Vec<Root> {
        let n = ((r_hi - r_lo) / step).round() as usize;
        let rs: Vec<f64> = (0..=n).map(|i| r_lo + i as f64 * step).collect();
        let hs: Vec<Vec<[f64; 2]>> = rs.par_iter().map(|&r| self.defects(r, syms)).collect();
        let mut brackets = Vec::new();
        for (c, &sym) in syms.iter().enumerate() {
            for i in 0..n {
                let (a, b) = (hs[i][c], hs[i + 1][c]);
                if a[0] * b[0] < 0.0 && a[1] * b[1] < 0.0 && a[0].abs().max(b[0].abs()) < 5.0 {
                    brackets.push((sym, rs[i], rs[i + 1], a[0]));
                }
            }
        }
        let mut roots: Vec<Root> = brackets
            .par_iter()
            .map(|&(sym, lo, hi, _)| {
                let r = illinois(|r| self.defect(r, sym)[0], lo, hi, 1e-10);
                let d = self.defect(r, sym);
                Root { r, symmetry: sym, defect: [d[0].abs(), d[1].abs()] }
            })
            .filter(|root| root.defect[1] < ROOT_DEFECT)
            .collect();
        roots.sort_by(|a, b| a.r.total_cmp(&b.r));
        roots
    }

    /// The form at `root` as `u = Σ_{n ≠ 0} a_n √y K_{ir}(2π|n|y) e^{2πinx}`.
    pub fn cusp_form(&self, root: &Root, terms: usize) -> Option<CuspFormFile> {
        let c = self.coefficients(root.r, root.symmetry)?;
        // c_n multiplies the scaled K; fold the scale into a_n
        let scale = (0.5 * PI * root.r).exp();
        let mut coefficients = Vec::new();
        for (i, &cn) in c.iter().take(terms).enumerate() {
            let n = i as i64 + 1;
            let (pos, neg) = if root.symmetry.odd {
                // sin θ = (e^{iθ} - e^{-iθ}) / 2i
                (Complex { re: 0.0, im: -0.5 * cn * scale }, Complex { re: 0.0, im: 0.5 * cn * scale })
            } else {
                (Complex { re: 0.5 * cn * scale, im: 0.0 }, Complex { re: 0.5 * cn * scale, im: 0.0 })
            };
            coefficients.push(Coefficient { n, a: pos });
            coefficients.push(Coefficient { n: -n, a: neg });
        }
        Some(CuspFormFile { s: Complex { re: 0.5, im: root.r }, coefficients })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub n: i64,
    pub a: Complex,
}

/// `{"s": {...}, "coefficients": [{"n": .., "a": {...}}, ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CuspFormFile {
    pub s: Complex,
    pub coefficients: Vec<Coefficient>,
}

impl CuspFormFile {
    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")
    }
}
