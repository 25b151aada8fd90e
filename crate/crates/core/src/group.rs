//! Exact arithmetic in PSL(2,Z) and the side-pairing generators of Γ₀(p).
//!
//! Elements are stored as integer matrices with determinant one, normalized
//! so that the bottom row `(c, d)` is lexicographically positive. Two
//! matrices that differ by a sign therefore compare equal structurally.

use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of PSL(2,Z) in sign-normalized form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawElement", into = "RawElement")]
pub struct GroupElement {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

#[derive(Serialize, Deserialize)]
struct RawElement {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl TryFrom<RawElement> for GroupElement {
    type Error = Error;
    fn try_from(r: RawElement) -> Result<Self> {
        GroupElement::new(r.a, r.b, r.c, r.d)
    }
}

impl From<GroupElement> for RawElement {
    fn from(g: GroupElement) -> Self {
        RawElement { a: g.a, b: g.b, c: g.c, d: g.d }
    }
}

impl GroupElement {
    /// Builds `[[a, b], [c, d]]`, rejecting matrices whose determinant is not one.
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = a
            .checked_mul(d)
            .zip(b.checked_mul(c))
            .and_then(|(ad, bc)| ad.checked_sub(bc))
            .ok_or(Error::Overflow)?;
        if det != 1 {
            return Err(Error::Determinant(det));
        }
        Ok(Self::canonical(a, b, c, d))
    }

    fn canonical(a: i64, b: i64, c: i64, d: i64) -> Self {
        if c < 0 || (c == 0 && d < 0) {
            GroupElement { a: -a, b: -b, c: -c, d: -d }
        } else {
            GroupElement { a, b, c, d }
        }
    }

    pub const fn identity() -> Self {
        GroupElement { a: 1, b: 0, c: 0, d: 1 }
    }

    /// The translation `z ↦ z + 1`.
    pub const fn translation() -> Self {
        GroupElement { a: 1, b: 1, c: 0, d: 1 }
    }

    pub fn a(&self) -> i64 {
        self.a
    }
    pub fn b(&self) -> i64 {
        self.b
    }
    pub fn c(&self) -> i64 {
        self.c
    }
    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn entries(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    /// Matrix product `self · other`, failing on integer overflow.
    pub fn try_compose(&self, other: &GroupElement) -> Result<GroupElement> {
        let dot = |x: i64, y: i64, z: i64, w: i64| -> Result<i64> {
            x.checked_mul(y)
                .zip(z.checked_mul(w))
                .and_then(|(p, q)| p.checked_add(q))
                .ok_or(Error::Overflow)
        };
        let a = dot(self.a, other.a, self.b, other.c)?;
        let b = dot(self.a, other.b, self.b, other.d)?;
        let c = dot(self.c, other.a, self.d, other.c)?;
        let d = dot(self.c, other.b, self.d, other.d)?;
        Ok(Self::canonical(a, b, c, d))
    }

    /// Matrix product `self · other`.
    ///
    /// Panics on overflow; entries stay tiny for every word this crate builds.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        self.try_compose(other).expect("group element overflow")
    }

    pub fn inverse(&self) -> GroupElement {
        Self::canonical(self.d, -self.b, -self.c, self.a)
    }

    pub fn pow(&self, n: i64) -> GroupElement {
        let base = if n < 0 { self.inverse() } else { *self };
        (0..n.unsigned_abs()).fold(Self::identity(), |acc, _| acc.compose(&base))
    }

    /// Trace up to sign (the sign is fixed by normalization).
    pub fn trace(&self) -> i64 {
        self.a + self.d
    }

    pub fn is_parabolic(&self) -> bool {
        !self.is_identity() && self.trace().abs() == 2
    }

    /// Membership in Γ₀(p).
    pub fn in_gamma0(&self, p: u64) -> bool {
        self.c.rem_euclid(p as i64) == 0
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;
    fn mul(self, rhs: GroupElement) -> GroupElement {
        self.compose(&rhs)
    }
}

impl Mul<&GroupElement> for &GroupElement {
    type Output = GroupElement;
    fn mul(self, rhs: &GroupElement) -> GroupElement {
        self.compose(rhs)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn ensure_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// The partner index `k'` with `k k' ≡ -1 (mod p)`.
pub fn kprime(k: u64, p: u64) -> Result<u64> {
    ensure_prime(p)?;
    if k == 0 || k >= p {
        return Err(Error::IndexOutOfRange { k, max: p - 1 });
    }
    let inv = mod_inverse(k as i64, p as i64);
    Ok(((p as i64 - inv) % p as i64) as u64)
}

fn mod_inverse(k: i64, p: i64) -> i64 {
    let (mut r0, mut r1) = (p, k.rem_euclid(p));
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    t0.rem_euclid(p)
}

/// A letter of a word in the generators `T`, `h_1, …, h_{p-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Letter {
    T,
    TInv,
    H(u64),
    HInv(u64),
}

/// The side-pairing generators of Γ₀(p) for the Ford domain over `(0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSet {
    p: u64,
    t: GroupElement,
    h: Vec<GroupElement>,
    kprime: Vec<u64>,
}

impl GeneratorSet {
    pub fn new(p: u64) -> Result<Self> {
        ensure_prime(p)?;
        let mut h = Vec::with_capacity(p as usize - 1);
        let mut kp = Vec::with_capacity(p as usize - 1);
        for k in 1..p {
            let k2 = kprime(k, p)?;
            let (ki, k2i, pi) = (k as i64, k2 as i64, p as i64);
            h.push(GroupElement::new(k2i, -(ki * k2i + 1) / pi, pi, -ki)?);
            kp.push(k2);
        }
        Ok(GeneratorSet { p, t: GroupElement::translation(), h, kprime: kp })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn t(&self) -> GroupElement {
        self.t
    }

    /// `h_k` for `1 ≤ k ≤ p-1`.
    pub fn h(&self, k: u64) -> GroupElement {
        assert!(k >= 1 && k < self.p, "h index {k} out of range for p = {}", self.p);
        self.h[k as usize - 1]
    }

    pub fn kprime(&self, k: u64) -> u64 {
        assert!(k >= 1 && k < self.p, "k' index {k} out of range for p = {}", self.p);
        self.kprime[k as usize - 1]
    }

    pub fn element(&self, letter: Letter) -> GroupElement {
        match letter {
            Letter::T => self.t,
            Letter::TInv => self.t.inverse(),
            Letter::H(k) => self.h(k),
            Letter::HInv(k) => self.h(k).inverse(),
        }
    }

    pub fn evaluate(&self, word: &[Letter]) -> GroupElement {
        word.iter()
            .fold(GroupElement::identity(), |acc, &l| acc.compose(&self.element(l)))
    }

    /// Relators of the presentation: `h_{j'} h_j` for every `j` followed by
    /// `h_{(k'-1)'-1} h_{k'-1} h_k` for `k = 1, …, p-2`.
    pub fn relators(&self) -> Vec<Relator> {
        let p = self.p;
        let mut out = Vec::new();
        for j in 1..p {
            out.push(Relator {
                kind: RelatorKind::Involution,
                index: j,
                word: vec![Letter::H(self.kprime(j)), Letter::H(j)],
            });
        }
        for k in 1..p.saturating_sub(1) {
            let a = self.kprime(k) - 1;
            let b = self.kprime(a) - 1;
            out.push(Relator {
                kind: RelatorKind::Triple,
                index: k,
                word: vec![Letter::H(b), Letter::H(a), Letter::H(k)],
            });
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelatorKind {
    Involution,
    Triple,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relator {
    pub kind: RelatorKind,
    pub index: u64,
    pub word: Vec<Letter>,
}

/// Outcome of the exact checks on the generators of one level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupReport {
    pub p: u64,
    pub involution_relators: usize,
    pub triple_relators: usize,
    pub failures: Vec<String>,
}

impl GroupReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs every exact identity for level `p`: the `k'` involution, membership,
/// `h_k h_{k'} = 1`, the shape of `h_1`, both relator families, the identities
/// `(k'-1)'-1 = (k+1)'` and `h_{k'} h_{(k'-1)'} = h_{(k+1)'}`, and parabolicity
/// of `h_{p-1} T`.
pub fn verify_group(p: u64) -> Result<GroupReport> {
    let gens = GeneratorSet::new(p)?;
    let pi = p as i64;
    let mut failures = Vec::new();
    let id = GroupElement::identity();

    for k in 1..p {
        let k2 = gens.kprime(k);
        if gens.kprime(k2) != k {
            failures.push(format!("k' is not an involution at k = {k}"));
        }
        if (k * k2 + 1) % p != 0 {
            failures.push(format!("k k' != -1 mod p at k = {k}"));
        }
        if !gens.h(k).in_gamma0(p) {
            failures.push(format!("h_{k} not in Gamma_0({p})"));
        }
        if gens.h(k) * gens.h(k2) != id {
            failures.push(format!("h_{k} h_{k2} != id"));
        }
    }
    if gens.h(1) != GroupElement::new(pi - 1, -1, pi, -1)? {
        failures.push("h_1 != [[p-1, -1], [p, -1]]".into());
    }

    let relators = gens.relators();
    for r in &relators {
        if gens.evaluate(&r.word) != id {
            failures.push(format!("relator {:?} {} does not vanish", r.kind, r.index));
        }
    }

    for k in 1..p.saturating_sub(1) {
        let lhs = gens.kprime(gens.kprime(k) - 1) - 1;
        let rhs = gens.kprime(k + 1);
        if lhs != rhs {
            failures.push(format!("(k'-1)'-1 != (k+1)' at k = {k}"));
        }
        let prod = gens.h(gens.kprime(k)) * gens.h(gens.kprime(gens.kprime(k) - 1));
        if prod != gens.h(rhs) {
            failures.push(format!("h_k' h_(k'-1)' != h_(k+1)' at k = {k}"));
        }
    }

    let ht = gens.h(p - 1) * gens.t();
    if ht != GroupElement::new(1, 0, pi, 1)? || !ht.is_parabolic() {
        failures.push("h_{p-1} T is not [[1, 0], [p, 1]] or not parabolic".into());
    }

    let count = |kind| relators.iter().filter(|r| r.kind == kind).count();
    Ok(GroupReport {
        p,
        involution_relators: count(RelatorKind::Involution),
        triple_relators: count(RelatorKind::Triple),
        failures,
    })
}
