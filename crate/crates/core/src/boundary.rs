//! Möbius action on the boundary `P¹(R)` and the line-model principal series
//! action
//!
//! ```text
//! (τ_s(h) φ)(t) = ((h⁻¹)'(t))^s · φ(h⁻¹.t)
//! ```
//!
//! The weight `(h⁻¹)'(t) = (ct + d)⁻²` is a positive real off the pole, so the
//! complex power is taken as `exp(s · ln w)` without branch ambiguity.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupElement;

pub type Rational = Ratio<i64>;

/// A point of `P¹(R)` in floating point. `Infinity` is a tag, never a float.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryPoint {
    Finite(f64),
    Infinity,
}

impl From<f64> for BoundaryPoint {
    fn from(x: f64) -> Self {
        BoundaryPoint::Finite(x)
    }
}

/// A point of `P¹(Q)`, used wherever endpoints must be compared exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExactPoint {
    Finite(Rational),
    Infinity,
}

impl ExactPoint {
    pub fn int(n: i64) -> Self {
        ExactPoint::Finite(Rational::from_integer(n))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        ExactPoint::Finite(Rational::new(n, d))
    }

    pub fn to_f64(self) -> BoundaryPoint {
        match self {
            ExactPoint::Finite(r) => BoundaryPoint::Finite(ratio_to_f64(r)),
            ExactPoint::Infinity => BoundaryPoint::Infinity,
        }
    }
}

pub fn ratio_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl fmt::Display for ExactPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactPoint::Finite(r) => write!(f, "{r}"),
            ExactPoint::Infinity => write!(f, "inf"),
        }
    }
}

/// `g.x = (ax + b)/(cx + d)`, with `g.∞ = a/c` and `g.(-d/c) = ∞`.
pub fn act(g: &GroupElement, x: BoundaryPoint) -> BoundaryPoint {
    let [a, b, c, d] = g.entries().map(|e| e as f64);
    match x {
        BoundaryPoint::Infinity if c == 0.0 => BoundaryPoint::Infinity,
        BoundaryPoint::Infinity => BoundaryPoint::Finite(a / c),
        BoundaryPoint::Finite(t) => {
            let den = c * t + d;
            if den == 0.0 {
                BoundaryPoint::Infinity
            } else {
                BoundaryPoint::Finite((a * t + b) / den)
            }
        }
    }
}

/// Exact version of [`act`].
pub fn act_exact(g: &GroupElement, x: ExactPoint) -> ExactPoint {
    let [a, b, c, d] = g.entries();
    match x {
        ExactPoint::Infinity if c == 0 => ExactPoint::Infinity,
        ExactPoint::Infinity => ExactPoint::frac(a, c),
        ExactPoint::Finite(t) => {
            let den = t * c + d;
            if den == Rational::from_integer(0) {
                ExactPoint::Infinity
            } else {
                ExactPoint::Finite((t * a + b) / den)
            }
        }
    }
}

/// `g'(t) = (ct + d)⁻²`.
pub fn derivative(g: &GroupElement, t: f64) -> Result<f64> {
    let den = g.c() as f64 * t + g.d() as f64;
    if is_pole(g, t) {
        return Err(Error::DerivativePole(t));
    }
    Ok(1.0 / (den * den))
}

fn is_pole(g: &GroupElement, t: f64) -> bool {
    let (c, d) = (g.c() as f64, g.d() as f64);
    c != 0.0 && (c * t + d).abs() <= 1e-14 * (c * t).abs().max(d.abs())
}

/// `w^s` for a positive real `w`.
pub fn real_pow(w: f64, s: Complex64) -> Complex64 {
    debug_assert!(w > 0.0);
    (s * w.ln()).exp()
}

/// An open interval of `R` with exact endpoints; a left `Infinity` means `-∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub left: ExactPoint,
    pub right: ExactPoint,
}

impl Interval {
    pub fn new(left: ExactPoint, right: ExactPoint) -> Self {
        Interval { left, right }
    }

    pub fn real_line() -> Self {
        Interval::new(ExactPoint::Infinity, ExactPoint::Infinity)
    }

    /// The sheet interval `I_k = (k/p, ∞)` for `k < p`, and `I_p = (-∞, 0)`.
    pub fn sheet(k: u64, p: u64) -> Self {
        if k < p {
            Interval::new(ExactPoint::frac(k as i64, p as i64), ExactPoint::Infinity)
        } else {
            Interval::new(ExactPoint::Infinity, ExactPoint::int(0))
        }
    }

    fn lower(&self) -> f64 {
        match self.left {
            ExactPoint::Finite(r) => ratio_to_f64(r),
            ExactPoint::Infinity => f64::NEG_INFINITY,
        }
    }

    fn upper(&self) -> f64 {
        match self.right {
            ExactPoint::Finite(r) => ratio_to_f64(r),
            ExactPoint::Infinity => f64::INFINITY,
        }
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lower(), self.upper())
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lower() && x < self.upper()
    }

    pub fn contains_closed(&self, x: f64) -> bool {
        x >= self.lower() && x <= self.upper()
    }

    pub fn contains_exact(&self, x: Rational) -> bool {
        let above = match self.left {
            ExactPoint::Finite(l) => x > l,
            ExactPoint::Infinity => true,
        };
        let below = match self.right {
            ExactPoint::Finite(r) => x < r,
            ExactPoint::Infinity => true,
        };
        above && below
    }

    pub fn is_bounded(&self) -> bool {
        matches!((self.left, self.right), (ExactPoint::Finite(_), ExactPoint::Finite(_)))
    }

    /// An exact interior point, used to fix orientation questions.
    pub fn interior_point(&self) -> Rational {
        let one = Rational::from_integer(1);
        match (self.left, self.right) {
            (ExactPoint::Finite(l), ExactPoint::Finite(r)) => (l + r) / Rational::from_integer(2),
            (ExactPoint::Finite(l), ExactPoint::Infinity) => l + one,
            (ExactPoint::Infinity, ExactPoint::Finite(r)) => r - one,
            (ExactPoint::Infinity, ExactPoint::Infinity) => Rational::from_integer(0),
        }
    }

    /// Sort key for intervals sharing a line: by left endpoint, `-∞` first.
    pub fn cmp_left(&self, other: &Interval) -> Ordering {
        match (self.left, other.left) {
            (ExactPoint::Infinity, ExactPoint::Infinity) => Ordering::Equal,
            (ExactPoint::Infinity, _) => Ordering::Less,
            (_, ExactPoint::Infinity) => Ordering::Greater,
            (ExactPoint::Finite(a), ExactPoint::Finite(b)) => a.cmp(&b),
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = match self.left {
            ExactPoint::Infinity => "-inf".to_string(),
            p => p.to_string(),
        };
        write!(f, "({l}, {})", self.right)
    }
}

// Endpoints travel as strings ("1/3", "-inf", "inf") to stay exact.
impl Serialize for Interval {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let l = match self.left {
            ExactPoint::Infinity => "-inf".to_string(),
            p => p.to_string(),
        };
        [l, self.right.to_string()].serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let [l, r] = <[String; 2]>::deserialize(de)?;
        let parse = |s: &str, allow: &str| -> std::result::Result<ExactPoint, D::Error> {
            if s == allow {
                return Ok(ExactPoint::Infinity);
            }
            Rational::from_str(s)
                .map(ExactPoint::Finite)
                .map_err(|_| serde::de::Error::custom(format!("bad interval endpoint {s:?}")))
        };
        Ok(Interval::new(parse(&l, "-inf")?, parse(&r, "inf")?))
    }
}

/// Asymptotics `φ(x) ≈ limit · |x|^(-exponent)` as `|x| → ∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Decay {
    pub exponent: Complex64,
    pub limit: Complex64,
}

type Callable = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// A complex function on an interval, optionally carrying its behaviour at ∞.
#[derive(Clone)]
pub struct FunctionEvaluator {
    domain: Interval,
    f: Callable,
    decay: Option<Decay>,
}

impl fmt::Debug for FunctionEvaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionEvaluator")
            .field("domain", &self.domain)
            .field("decay", &self.decay)
            .finish_non_exhaustive()
    }
}

impl FunctionEvaluator {
    pub fn new(domain: Interval, f: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        FunctionEvaluator { domain, f: Arc::new(f), decay: None }
    }

    pub fn constant(domain: Interval, value: Complex64) -> Self {
        Self::new(domain, move |_| value)
    }

    pub fn with_decay(mut self, exponent: Complex64, limit: Complex64) -> Self {
        self.decay = Some(Decay { exponent, limit });
        self
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn decay(&self) -> Option<Decay> {
        self.decay
    }

    /// Evaluates on the closure of the domain; anything else is an error.
    pub fn eval(&self, x: f64) -> Result<Complex64> {
        if !self.domain.contains_closed(x) {
            return Err(Error::OutsideDomain { point: x, domain: self.domain.to_string() });
        }
        Ok((self.f)(x))
    }
}

/// `(τ_s(h)φ)(t)`.
///
/// At the pole of `h⁻¹` the sample point is `∞`; the value is then the limit,
/// which exists exactly when `φ` decays like `|x|^(-2s)` (giving
/// `|c|^(2s) · limit`) or faster (giving zero).
pub fn tau_apply(h: &GroupElement, s: Complex64, phi: &FunctionEvaluator, t: f64) -> Result<Complex64> {
    let hinv = h.inverse();
    if is_pole(&hinv, t) {
        let unbounded = !matches!(
            (phi.domain.left, phi.domain.right),
            (ExactPoint::Finite(_), ExactPoint::Finite(_))
        );
        return match phi.decay {
            Some(dec) if unbounded => {
                let excess = dec.exponent - 2.0 * s;
                if excess.norm() <= 1e-12 * (1.0 + s.norm()) {
                    Ok(real_pow((hinv.c() as f64).abs(), 2.0 * s) * dec.limit)
                } else if excess.re > 0.0 {
                    Ok(Complex64::new(0.0, 0.0))
                } else {
                    Err(Error::PoleWithoutDecay(t))
                }
            }
            _ => Err(Error::PoleWithoutDecay(t)),
        };
    }
    let w = derivative(&hinv, t)?;
    let y = match act(&hinv, BoundaryPoint::Finite(t)) {
        BoundaryPoint::Finite(y) => y,
        BoundaryPoint::Infinity => return Err(Error::PoleWithoutDecay(t)),
    };
    Ok(real_pow(w, s) * phi.eval(y)?)
}

/// `τ_s(h)φ` as a new evaluator on the whole line.
///
/// Requires `φ` to live on the whole line with decay exponent `2s` (a smooth
/// vector of the line model), so that the result is again such a vector.
pub fn tau_curried(h: &GroupElement, s: Complex64, phi: &FunctionEvaluator) -> Result<FunctionEvaluator> {
    if phi.domain != Interval::real_line() {
        return Err(Error::Config("tau_curried needs a function on the whole line".into()));
    }
    let hinv = h.inverse();
    let limit = if hinv.c() == 0 {
        phi.decay.map(|d| d.limit)
    } else {
        // t → ±∞: (ct + d)^(-2s) φ(a/c) ≈ |c|^(-2s) |t|^(-2s) φ(a/c)
        let at = hinv.a() as f64 / hinv.c() as f64;
        Some(real_pow((hinv.c() as f64).abs(), -2.0 * s) * phi.eval(at)?)
    };
    let inner = phi.clone();
    let h = *h;
    let mut out = FunctionEvaluator::new(Interval::real_line(), move |t| {
        tau_apply(&h, s, &inner, t).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    });
    if let Some(limit) = limit {
        out = out.with_decay(2.0 * s, limit);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GeneratorSet;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn el(a: i64, b: i64, cc: i64, d: i64) -> GroupElement {
        GroupElement::new(a, b, cc, d).unwrap()
    }

    #[test]
    fn act_examples() {
        let t = GroupElement::translation();
        assert_eq!(act(&t, BoundaryPoint::Infinity), BoundaryPoint::Infinity);
        let g = el(1, 0, 3, 1);
        assert_eq!(act_exact(&g, ExactPoint::Infinity), ExactPoint::frac(1, 3));
        assert_eq!(act_exact(&g, ExactPoint::frac(-1, 3)), ExactPoint::Infinity);
        assert_eq!(act(&g, BoundaryPoint::Finite(-1.0 / 3.0)), BoundaryPoint::Infinity);
    }

    #[test]
    fn derivative_examples() {
        let t = GroupElement::translation();
        assert_eq!(derivative(&t, 3.7).unwrap(), 1.0);
        let g = el(1, 0, 3, 1);
        assert_eq!(derivative(&g, 1.0).unwrap(), 1.0 / 16.0);
        assert!(matches!(derivative(&g, -1.0 / 3.0), Err(Error::DerivativePole(_))));
    }

    #[test]
    fn tau_examples() {
        let line = Interval::real_line();
        let phi = FunctionEvaluator::new(line, |x| c(x * x, 1.0));
        let tinv = GroupElement::translation().inverse();
        let s = c(0.5, 3.0);
        let got = tau_apply(&tinv, s, &phi, 0.25).unwrap();
        assert_eq!(got, phi.eval(1.25).unwrap());

        let g3 = GeneratorSet::new(3).unwrap();
        let h2t = g3.h(2) * g3.t();
        let phi = FunctionEvaluator::new(line, |x| c(x, 0.0));
        let got = tau_apply(&h2t, c(1.0, 0.0), &phi, 1.0).unwrap();
        assert!((got - c(0.25 * -0.5, 0.0)).norm() < 1e-15);

        let one = FunctionEvaluator::constant(line, c(1.0, 0.0));
        assert!(matches!(
            tau_apply(&h2t, c(1.0, 0.0), &one, 1.0 / 3.0),
            Err(Error::PoleWithoutDecay(_))
        ));
    }

    #[test]
    fn tau_pole_limit_uses_decay() {
        // φ(x) = (1 + x²)^(-s) has limit 1 with exponent 2s.
        let s = c(0.5, 2.0);
        let phi = FunctionEvaluator::new(Interval::real_line(), move |x| real_pow(1.0 + x * x, -s))
            .with_decay(2.0 * s, c(1.0, 0.0));
        let g = el(1, 0, 3, 1);
        let at_pole = tau_apply(&g, s, &phi, 1.0 / 3.0).unwrap();
        let near = tau_apply(&g, s, &phi, 1.0 / 3.0 + 1e-7).unwrap();
        assert!((at_pole - near).norm() < 1e-5, "{at_pole} vs {near}");
    }

    #[test]
    fn outside_domain_is_error() {
        let phi = FunctionEvaluator::constant(Interval::sheet(0, 3), c(1.0, 0.0));
        assert!(matches!(phi.eval(-1.0), Err(Error::OutsideDomain { .. })));
        assert!(phi.eval(0.0).is_ok());
    }

    #[test]
    fn interval_json() {
        let i = Interval::sheet(1, 3);
        assert_eq!(serde_json::to_string(&i).unwrap(), r#"["1/3","inf"]"#);
        let j = Interval::sheet(3, 3);
        assert_eq!(serde_json::to_string(&j).unwrap(), r#"["-inf","0"]"#);
        let back: Interval = serde_json::from_str(r#"["-inf","-1/3"]"#).unwrap();
        assert_eq!(back, Interval::new(ExactPoint::Infinity, ExactPoint::frac(-1, 3)));
    }
}
