//! Laurent polynomials in the equivariant parameters `w_1 … w_m` with
//! rational exponents and cyclotomic coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::cyclotomic::Cyclotomic;
use super::rational::{format_exponent, parse_exponent, Exponent, Rational};
use crate::error::AlgebraError;

/// Exponent sequence of a Laurent monomial `∏ w_i^{e_i}`.
pub type Exps = Vec<Exponent>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EqScalar {
    nvars: usize,
    terms: BTreeMap<Exps, Cyclotomic>,
}

impl EqScalar {
    pub fn zero(nvars: usize) -> Self {
        EqScalar { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Cyclotomic::one())
    }

    pub fn constant(nvars: usize, c: Cyclotomic) -> Self {
        Self::monomial(nvars, vec![Exponent::zero(); nvars], c)
    }

    pub fn rational(nvars: usize, q: Rational) -> Self {
        Self::constant(nvars, Cyclotomic::from_rational(q))
    }

    pub fn monomial(nvars: usize, exps: Exps, c: Cyclotomic) -> Self {
        assert_eq!(exps.len(), nvars);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        EqScalar { nvars, terms }
    }

    /// `w_i^e`.
    pub fn var_power(nvars: usize, i: usize, e: Exponent) -> Self {
        let mut exps = vec![Exponent::zero(); nvars];
        exps[i] = e;
        Self::monomial(nvars, exps, Cyclotomic::one())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &Cyclotomic)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[Exponent]) -> Cyclotomic {
        self.terms.get(exps).cloned().unwrap_or_else(Cyclotomic::zero)
    }

    /// The single monomial of this scalar, if it has exactly one term.
    pub fn as_monomial(&self) -> Option<(&Exps, &Cyclotomic)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    /// Constant rational value, if the scalar has no `w` dependence.
    pub fn to_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                if e.iter().all(|x| x.is_zero()) {
                    c.to_rational()
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Every coefficient lies in ℚ.
    pub fn has_rational_coeffs(&self) -> bool {
        self.terms.values().all(|c| c.is_rational())
    }

    /// Every exponent is an integer.
    pub fn has_integer_exponents(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|x| x.is_integer()))
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.nvars, other.nvars, "equivariant scalars over different variable sets");
    }

    fn insert_add(&mut self, exps: Exps, c: Cyclotomic) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        self.check(other);
        for (e, c) in &other.terms {
            self.insert_add(e.clone(), c.clone());
        }
    }

    /// `self += factor · other`.
    pub fn add_scaled(&mut self, other: &Self, factor: &Cyclotomic) {
        self.check(other);
        if factor.is_zero() {
            return;
        }
        for (e, c) in &other.terms {
            self.insert_add(e.clone(), c * factor);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        EqScalar { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exps = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.insert_add(e, c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &Cyclotomic) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        EqScalar { nvars: self.nvars, terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect() }
    }

    pub fn scale_rational(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero(self.nvars);
        }
        EqScalar { nvars: self.nvars, terms: self.terms.iter().map(|(e, x)| (e.clone(), x.scale(q))).collect() }
    }

    /// Multiplies every exponent sequence by `∏ w_i^{shift_i}`.
    pub fn shift(&self, shift: &[Exponent]) -> Self {
        assert_eq!(shift.len(), self.nvars);
        EqScalar {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(shift).map(|(a, b)| a + b).collect(), c.clone()))
                .collect(),
        }
    }

    /// Division by a scalar that must be a single Laurent monomial.
    pub fn div(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check(other);
        let (e, c) = match other.as_monomial() {
            Some(m) => m,
            None if other.is_zero() => return Err(AlgebraError::DivisionByZero),
            None => return Err(AlgebraError::NonMonomialDivision),
        };
        let inv = c.inverse()?;
        let neg: Exps = e.iter().map(|x| -x).collect();
        Ok(self.shift(&neg).scale(&inv))
    }

    /// Rational power of a monomial (used for `√e₁`, `e₁^{g-1}`).
    pub fn monomial_pow(&self, p: Exponent) -> Result<Self, AlgebraError> {
        let (e, c) = self.as_monomial().ok_or(AlgebraError::NonMonomialDivision)?;
        let coeff = if p.is_integer() {
            let k = *p.numer();
            if k >= 0 {
                c.pow(k as u32)
            } else {
                c.inverse()?.pow((-k) as u32)
            }
        } else if c.is_one() {
            Cyclotomic::one()
        } else {
            return Err(AlgebraError::NonMonomialDivision);
        };
        let exps = e.iter().map(|x| x * p).collect();
        Ok(Self::monomial(self.nvars, exps, coeff))
    }
}

impl fmt::Display for EqScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (i, x) in e.iter().enumerate() {
                if !x.is_zero() {
                    if x.is_one() {
                        write!(f, "*w{}", i + 1)?;
                    } else {
                        write!(f, "*w{}^({})", i + 1, format_exponent(x))?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermRepr {
    exps: Vec<String>,
    coeff: Cyclotomic,
}

impl Serialize for EqScalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<TermRepr> = self
            .terms
            .iter()
            .map(|(e, c)| TermRepr { exps: e.iter().map(format_exponent).collect(), coeff: c.clone() })
            .collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for EqScalar {
    /// An empty list deserializes to a zero scalar with no variables.
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v: Vec<TermRepr> = Vec::deserialize(d)?;
        let nvars = v.first().map(|t| t.exps.len()).unwrap_or(0);
        let mut out = EqScalar::zero(nvars);
        for t in v {
            if t.exps.len() != nvars {
                return Err(D::Error::custom("inconsistent exponent lengths"));
            }
            let exps =
                t.exps.iter().map(|s| parse_exponent(s)).collect::<Result<Exps, _>>().map_err(D::Error::custom)?;
            out.insert_add(exps, t.coeff);
        }
        Ok(out)
    }
}
