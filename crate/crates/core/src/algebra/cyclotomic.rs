//! Exact arithmetic in cyclotomic fields ℚ(ζ_N).
//!
//! An element of order `N` is stored as its coefficient vector in the power
//! basis `1, ζ, …, ζ^{φ(N)-1}`, i.e. reduced modulo the cyclotomic polynomial
//! Φ_N. Values with no irrational part are demoted to order 1, so rationals
//! have a single representation. Elements of different orders are combined in
//! ℚ(ζ_lcm).

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rational::{format_rational, parse_rational, Rational};
use crate::error::AlgebraError;

/// Reduction data for one order `n`: `powers[j]` is ζ_n^j in the power basis.
#[derive(Debug)]
struct Table {
    phi: usize,
    powers: Vec<Vec<i64>>,
}

fn tables() -> &'static RwLock<HashMap<u32, Arc<Table>>> {
    static TABLES: OnceLock<RwLock<HashMap<u32, Arc<Table>>>> = OnceLock::new();
    TABLES.get_or_init(|| RwLock::new(HashMap::new()))
}

fn table(n: u32) -> Arc<Table> {
    if let Some(t) = tables().read().unwrap().get(&n) {
        return t.clone();
    }
    let built = Arc::new(build_table(n));
    tables().write().unwrap().entry(n).or_insert(built).clone()
}

/// Coefficients (low to high) of the n-th cyclotomic polynomial.
pub fn cyclotomic_polynomial(n: u32) -> Vec<i64> {
    assert!(n >= 1);
    // x^n - 1 divided by Φ_d for every proper divisor d.
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            num = exact_div(&num, &cyclotomic_polynomial(d));
        }
    }
    num
}

fn exact_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    let lead = den[dn];
    debug_assert!(lead == 1);
    let qlen = rem.len() - dn;
    let mut q = vec![0i64; qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dn] / lead;
        q[i] = c;
        for (j, &dj) in den.iter().enumerate() {
            rem[i + j] -= c * dj;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    q
}

fn build_table(n: u32) -> Table {
    let phi_poly = cyclotomic_polynomial(n);
    let phi = phi_poly.len() - 1;
    let mut powers = Vec::with_capacity(n as usize);
    let mut cur = vec![0i64; phi];
    cur[0] = 1;
    for _ in 0..n {
        powers.push(cur.clone());
        // multiply by ζ: shift up, fold the x^phi term back using Φ_n
        let top = cur[phi - 1];
        let mut next = vec![0i64; phi];
        next[1..phi].copy_from_slice(&cur[..(phi - 1)]);
        if top != 0 {
            for i in 0..phi {
                next[i] -= top * phi_poly[i];
            }
        }
        cur = next;
    }
    Table { phi, powers }
}

pub fn euler_phi(n: u32) -> usize {
    table(n).phi
}

#[derive(Clone, Debug)]
pub struct Cyclotomic {
    order: u32,
    coeffs: Vec<Rational>,
}

impl Cyclotomic {
    pub fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_rational(q: Rational) -> Self {
        Cyclotomic { order: 1, coeffs: vec![q] }
    }

    pub fn from_int(k: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(k)))
    }

    /// ζ_n^k for any integer k.
    pub fn zeta(n: u32, k: i64) -> Self {
        let t = table(n);
        let j = k.rem_euclid(n as i64) as usize;
        let coeffs = t.powers[j].iter().map(|&c| Rational::from_integer(c.into())).collect();
        Cyclotomic { order: n, coeffs }.demoted()
    }

    /// Builds Σ_k c_k ζ_n^k from an arbitrary exponent → coefficient list.
    pub fn from_terms(n: u32, terms: &[(i64, Rational)]) -> Self {
        let t = table(n);
        let mut out = vec![Rational::zero(); t.phi];
        for (k, c) in terms {
            let j = k.rem_euclid(n as i64) as usize;
            for (slot, &p) in out.iter_mut().zip(&t.powers[j]) {
                if p != 0 {
                    *slot += c * Rational::from_integer(p.into());
                }
            }
        }
        Cyclotomic { order: n, coeffs: out }.demoted()
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Power-basis coefficients, `len() == φ(order)`.
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.order == 1 && self.coeffs[0].is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn to_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.coeffs[0].clone())
    }

    fn demoted(mut self) -> Self {
        if self.order != 1 && self.is_rational() {
            self.coeffs.truncate(1);
            self.order = 1;
        }
        self
    }

    /// The same number viewed in ℚ(ζ_m); requires `order | m`.
    pub fn embed(&self, m: u32) -> Cyclotomic {
        assert!(m.is_multiple_of(self.order), "cannot embed order {} into {}", self.order, m);
        if m == self.order {
            return self.clone();
        }
        let t = table(m);
        let step = (m / self.order) as usize;
        let mut out = vec![Rational::zero(); t.phi];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (slot, &p) in out.iter_mut().zip(&t.powers[i * step]) {
                if p != 0 {
                    *slot += c * Rational::from_integer(p.into());
                }
            }
        }
        Cyclotomic { order: m, coeffs: out }
    }

    /// Coefficient vector in the power basis of ℚ(ζ_m).
    pub fn key_in(&self, m: u32) -> Vec<Rational> {
        self.embed(m).coeffs
    }

    fn aligned(a: &Self, b: &Self) -> (Self, Self, u32) {
        let m = a.order.lcm(&b.order);
        (a.embed(m), b.embed(m), m)
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        Cyclotomic { order: self.order, coeffs: self.coeffs.iter().map(|c| c * q).collect() }
    }

    /// Galois action ζ ↦ ζ^k (k coprime to the order).
    pub fn galois(&self, k: i64) -> Self {
        let n = self.order;
        if n == 1 {
            return self.clone();
        }
        let terms: Vec<(i64, Rational)> =
            self.coeffs.iter().enumerate().map(|(i, c)| (i as i64 * k, c.clone())).collect();
        Self::from_terms(n, &terms)
    }

    /// Complex conjugation ζ ↦ ζ^{-1}.
    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    pub fn inverse(&self) -> Result<Self, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        if self.order == 1 {
            return Ok(Self::from_rational(self.coeffs[0].recip()));
        }
        // Solve x·y = 1 as a linear system over ℚ in the power basis.
        let n = self.order;
        let phi = self.coeffs.len();
        let mut m: Vec<Vec<Rational>> = vec![vec![Rational::zero(); phi + 1]; phi];
        for j in 0..phi {
            let col = self.mul(&Self::zeta(n, j as i64)).embed(n);
            for i in 0..phi {
                m[i][j] = col.coeffs[i].clone();
            }
        }
        m[0][phi] = Rational::one();
        for c in 0..phi {
            let p = (c..phi).find(|&r| !m[r][c].is_zero()).ok_or(AlgebraError::DivisionByZero)?;
            m.swap(c, p);
            let inv = m[c][c].recip();
            for k in c..=phi {
                m[c][k] = &m[c][k] * &inv;
            }
            for r in 0..phi {
                if r != c && !m[r][c].is_zero() {
                    let f = m[r][c].clone();
                    for k in c..=phi {
                        let v = &m[c][k] * &f;
                        m[r][k] -= v;
                    }
                }
            }
        }
        let coeffs = m.into_iter().map(|row| row[phi].clone()).collect();
        Ok(Cyclotomic { order: n, coeffs }.demoted())
    }

    pub fn div(&self, other: &Self) -> Result<Self, AlgebraError> {
        Ok(self.mul(&other.inverse()?))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    fn mul_same(a: &Self, b: &Self, n: u32) -> Self {
        let t = table(n);
        let phi = t.phi;
        let mut wide = vec![Rational::zero(); 2 * phi - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    wide[i + j] += x * y;
                }
            }
        }
        let mut out: Vec<Rational> = wide[..phi].to_vec();
        for (k, c) in wide.iter().enumerate().skip(phi) {
            if c.is_zero() {
                continue;
            }
            for (slot, &p) in out.iter_mut().zip(&t.powers[k % n as usize]) {
                if p != 0 {
                    *slot += c * Rational::from_integer(p.into());
                }
            }
        }
        Cyclotomic { order: n, coeffs: out }.demoted()
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.coeffs == other.coeffs;
        }
        let (a, b, _) = Self::aligned(self, other);
        a.coeffs == b.coeffs
    }
}

impl Eq for Cyclotomic {}

impl<'a> Add<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, other: &Cyclotomic) -> Cyclotomic {
        if self.order == other.order {
            let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
            return Cyclotomic { order: self.order, coeffs }.demoted();
        }
        let (a, b, m) = Cyclotomic::aligned(self, other);
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect();
        Cyclotomic { order: m, coeffs }.demoted()
    }
}

impl<'a> Sub<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, other: &Cyclotomic) -> Cyclotomic {
        self + &(-other)
    }
}

impl<'a> Mul<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, other: &Cyclotomic) -> Cyclotomic {
        if other.order == 1 {
            return self.scale(&other.coeffs[0]);
        }
        if self.order == 1 {
            return other.scale(&self.coeffs[0]);
        }
        let (a, b, m) = Cyclotomic::aligned(self, other);
        Cyclotomic::mul_same(&a, &b, m)
    }
}

impl Cyclotomic {
    pub fn add(&self, other: &Self) -> Self {
        self + other
    }
    pub fn sub(&self, other: &Self) -> Self {
        self - other
    }
    pub fn mul(&self, other: &Self) -> Self {
        self * other
    }
}

impl AddAssign<&Cyclotomic> for Cyclotomic {
    fn add_assign(&mut self, other: &Cyclotomic) {
        if self.order == other.order {
            for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
                *a += b;
            }
            if self.order != 1 && self.is_rational() {
                self.coeffs.truncate(1);
                self.order = 1;
            }
        } else {
            *self = &*self + other;
        }
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic { order: self.order, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl From<Rational> for Cyclotomic {
    fn from(q: Rational) -> Self {
        Self::from_rational(q)
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            if k == 0 {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "z{}^{}", self.order, k)?;
            } else {
                write!(f, "{a}*z{}^{}", self.order, k)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CycloRepr {
    order: u32,
    terms: Vec<(u32, String)>,
}

impl Serialize for Cyclotomic {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let terms = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k as u32, format_rational(c)))
            .collect();
        CycloRepr { order: self.order, terms }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cyclotomic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let r = CycloRepr::deserialize(d)?;
        if r.order == 0 {
            return Err(D::Error::custom("cyclotomic order must be positive"));
        }
        let mut terms = Vec::with_capacity(r.terms.len());
        for (k, c) in r.terms {
            let q = parse_rational(&c).map_err(D::Error::custom)?;
            terms.push((k as i64, q));
        }
        Ok(Cyclotomic::from_terms(r.order, &terms))
    }
}
