//! Polynomials in descendant variables `u^β_a` (and powers of ħ) with
//! equivariant-scalar coefficients.

use std::collections::BTreeMap;
use std::fmt;

use super::cyclotomic::Cyclotomic;
use super::rational::Rational;
use super::scalar::EqScalar;

pub type Var = u16;

/// `ħ^hbar ∏ u_{vars}`; `vars` is sorted and may repeat.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub hbar: i32,
    pub vars: Vec<Var>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { hbar: 0, vars: Vec::new() }
    }

    pub fn new(hbar: i32, mut vars: Vec<Var>) -> Self {
        vars.sort_unstable();
        Monomial { hbar, vars }
    }

    pub fn degree(&self) -> usize {
        self.vars.len()
    }

    pub fn count(&self, v: Var) -> usize {
        self.vars.iter().filter(|&&x| x == v).count()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut vars = Vec::with_capacity(self.vars.len() + other.vars.len());
        let (mut i, mut j) = (0, 0);
        while i < self.vars.len() || j < other.vars.len() {
            if j == other.vars.len() || (i < self.vars.len() && self.vars[i] <= other.vars[j]) {
                vars.push(self.vars[i]);
                i += 1;
            } else {
                vars.push(other.vars[j]);
                j += 1;
            }
        }
        Monomial { hbar: self.hbar + other.hbar, vars }
    }

    pub fn with_var(&self, v: Var) -> Monomial {
        let pos = self.vars.partition_point(|&x| x < v);
        let mut vars = self.vars.clone();
        vars.insert(pos, v);
        Monomial { hbar: self.hbar, vars }
    }

    /// Removes one copy of `v`, returning the multiplicity it had.
    pub fn without_var(&self, v: Var) -> Option<(Monomial, usize)> {
        let pos = self.vars.iter().position(|&x| x == v)?;
        let c = self.count(v);
        let mut vars = self.vars.clone();
        vars.remove(pos);
        Some((Monomial { hbar: self.hbar, vars }, c))
    }

    /// `∏ (multiplicity)!`, the symmetry factor of the variable multiset.
    pub fn symmetry(&self) -> u64 {
        let mut acc = 1u64;
        let mut run = 0u64;
        for (i, v) in self.vars.iter().enumerate() {
            if i > 0 && self.vars[i - 1] == *v {
                run += 1;
            } else {
                run = 1;
            }
            acc *= run;
        }
        acc
    }
}

/// Indexing of the descendant variables `u^β_a`, `a ≤ max_height`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UVars {
    pub irreps: usize,
    pub max_height: u32,
}

impl UVars {
    pub fn new(irreps: usize, max_height: u32) -> Self {
        UVars { irreps, max_height }
    }

    pub fn count(&self) -> usize {
        self.irreps * (self.max_height as usize + 1)
    }

    pub fn index(&self, irrep: usize, a: u32) -> Var {
        (a as usize * self.irreps + irrep) as Var
    }

    /// `(irrep, height)` of a variable.
    pub fn decode(&self, v: Var) -> (usize, u32) {
        (v as usize % self.irreps, (v as usize / self.irreps) as u32)
    }

    pub fn height(&self, v: Var) -> u32 {
        (v as usize / self.irreps) as u32
    }

    /// `Σ (a_i − 1) − 3·ħ-power`, the grading preserved by the BG potential.
    pub fn weight(&self, m: &Monomial) -> i64 {
        m.vars.iter().map(|&v| self.height(v) as i64 - 1).sum::<i64>() - 3 * m.hbar as i64
    }

    pub fn format(&self, m: &Monomial) -> String {
        let mut s = String::new();
        if m.hbar != 0 {
            s.push_str(&format!("hbar^{}", m.hbar));
        }
        for &v in &m.vars {
            let (b, a) = self.decode(v);
            if !s.is_empty() {
                s.push('*');
            }
            s.push_str(&format!("u{a}^{b}"));
        }
        if s.is_empty() {
            s.push('1');
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, EqScalar>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(c: EqScalar) -> Self {
        let mut p = Poly::zero(c.nvars());
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn var(nvars: usize, v: Var) -> Self {
        let mut p = Poly::zero(nvars);
        p.add_term(Monomial::new(0, vec![v]), EqScalar::one(nvars));
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &EqScalar)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, EqScalar> {
        self.terms
    }

    pub fn coeff(&self, m: &Monomial) -> EqScalar {
        self.terms.get(m).cloned().unwrap_or_else(|| EqScalar::zero(self.nvars))
    }

    pub fn add_term(&mut self, m: Monomial, c: EqScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                o.get_mut().add_assign(&c);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &Poly) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale_rational(&Rational::from_integer((-1).into())))
    }

    pub fn scale(&self, c: &EqScalar) -> Poly {
        let mut out = Poly::zero(self.nvars);
        if c.is_zero() {
            return out;
        }
        for (m, x) in &self.terms {
            out.add_term(m.clone(), x.mul(c));
        }
        out
    }

    pub fn scale_cyclotomic(&self, c: &Cyclotomic) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, x) in &self.terms {
            out.add_term(m.clone(), x.scale(c));
        }
        out
    }

    pub fn scale_rational(&self, q: &Rational) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, x) in &self.terms {
            out.add_term(m.clone(), x.scale_rational(q));
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1.mul(c2));
            }
        }
        out
    }

    /// Keeps only the terms accepted by `keep`.
    pub fn retain(&mut self, mut keep: impl FnMut(&Monomial) -> bool) {
        self.terms.retain(|m, _| keep(m));
    }

    pub fn map_coeffs(&self, f: impl Fn(&EqScalar) -> EqScalar) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "[{c}]")?;
            if m.hbar != 0 {
                write!(f, "*hbar^{}", m.hbar)?;
            }
            for v in &m.vars {
                write!(f, "*u{v}")?;
            }
        }
        Ok(())
    }
}
