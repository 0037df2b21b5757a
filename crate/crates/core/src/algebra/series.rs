//! Truncated power series in `z` (and in `z, w`) over equivariant scalars.

use super::cyclotomic::Cyclotomic;
use super::rational::{int, Rational};
use super::scalar::EqScalar;
use crate::error::AlgebraError;

/// `Σ_{k ≤ order} c_k z^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    nvars: usize,
    coeffs: Vec<EqScalar>,
}

impl Series {
    pub fn zero(nvars: usize, order: usize) -> Self {
        Series { nvars, coeffs: vec![EqScalar::zero(nvars); order + 1] }
    }

    pub fn one(nvars: usize, order: usize) -> Self {
        let mut s = Self::zero(nvars, order);
        s.coeffs[0] = EqScalar::one(nvars);
        s
    }

    /// Builds from coefficients, truncating or zero-padding to `order`.
    pub fn from_coeffs(nvars: usize, order: usize, coeffs: Vec<EqScalar>) -> Self {
        let mut s = Self::zero(nvars, order);
        for (k, c) in coeffs.into_iter().enumerate().take(order + 1) {
            assert_eq!(c.nvars(), nvars);
            s.coeffs[k] = c;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// `[z^k]`, zero beyond the truncation.
    pub fn coeff(&self, k: usize) -> EqScalar {
        self.coeffs.get(k).cloned().unwrap_or_else(|| EqScalar::zero(self.nvars))
    }

    pub fn coeff_ref(&self, k: usize) -> &EqScalar {
        &self.coeffs[k]
    }

    pub fn set_coeff(&mut self, k: usize, c: EqScalar) {
        self.coeffs[k] = c;
    }

    pub fn coeffs(&self) -> &[EqScalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        Series { nvars: self.nvars, coeffs: (0..=order).map(|k| self.coeffs[k].add(&other.coeffs[k])).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Series { nvars: self.nvars, coeffs: self.coeffs.iter().map(|c| c.neg()).collect() }
    }

    pub fn scale(&self, c: &Cyclotomic) -> Self {
        Series { nvars: self.nvars, coeffs: self.coeffs.iter().map(|x| x.scale(c)).collect() }
    }

    pub fn scale_scalar(&self, c: &EqScalar) -> Self {
        Series { nvars: self.nvars, coeffs: self.coeffs.iter().map(|x| x.mul(c)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut out = Self::zero(self.nvars, order);
        for i in 0..=order {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=order - i {
                if other.coeffs[j].is_zero() {
                    continue;
                }
                let p = self.coeffs[i].mul(&other.coeffs[j]);
                out.coeffs[i + j].add_assign(&p);
            }
        }
        out
    }

    /// `s(−z)`.
    pub fn negate_variable(&self) -> Self {
        Series {
            nvars: self.nvars,
            coeffs: self.coeffs.iter().enumerate().map(|(k, c)| if k % 2 == 1 { c.neg() } else { c.clone() }).collect(),
        }
    }

    /// `Σ_{k ≤ D} s^k / k!` via `n e_n = Σ_{k=1}^n k s_k e_{n−k}`.
    pub fn exp(&self) -> Result<Self, AlgebraError> {
        if !self.coeffs[0].is_zero() {
            return Err(AlgebraError::NonzeroConstantTerm);
        }
        let d = self.order();
        let mut e = Self::one(self.nvars, d);
        for n in 1..=d {
            let mut acc = EqScalar::zero(self.nvars);
            for k in 1..=n {
                if self.coeffs[k].is_zero() || e.coeffs[n - k].is_zero() {
                    continue;
                }
                let t = self.coeffs[k].mul(&e.coeffs[n - k]).scale_rational(&int(k as i64));
                acc.add_assign(&t);
            }
            e.coeffs[n] = acc.scale_rational(&Rational::new(1.into(), (n as i64).into()));
        }
        Ok(e)
    }

    /// Inverse of `exp` for series with constant term one.
    pub fn log(&self) -> Result<Self, AlgebraError> {
        let one = EqScalar::one(self.nvars);
        if self.coeffs[0] != one {
            return Err(AlgebraError::NonzeroConstantTerm);
        }
        // n l_n = n a_n − Σ_{k=1}^{n−1} k l_k a_{n−k}
        let d = self.order();
        let mut l = Self::zero(self.nvars, d);
        for n in 1..=d {
            let mut acc = self.coeffs[n].scale_rational(&int(n as i64));
            for k in 1..n {
                let t = l.coeffs[k].mul(&self.coeffs[n - k]).scale_rational(&int(k as i64));
                acc = acc.sub(&t);
            }
            l.coeffs[n] = acc.scale_rational(&Rational::new(1.into(), (n as i64).into()));
        }
        Ok(l)
    }
}

/// `Σ_{a,b ≤ order} c_{a,b} z^a w^b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series2 {
    nvars: usize,
    order: usize,
    coeffs: Vec<EqScalar>,
}

impl Series2 {
    pub fn zero(nvars: usize, order: usize) -> Self {
        Series2 { nvars, order, coeffs: vec![EqScalar::zero(nvars); (order + 1) * (order + 1)] }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn idx(&self, a: usize, b: usize) -> usize {
        a * (self.order + 1) + b
    }

    pub fn coeff(&self, a: usize, b: usize) -> &EqScalar {
        &self.coeffs[self.idx(a, b)]
    }

    pub fn set_coeff(&mut self, a: usize, b: usize, c: EqScalar) {
        let i = self.idx(a, b);
        self.coeffs[i] = c;
    }

    pub fn add_to(&mut self, a: usize, b: usize, c: &EqScalar) {
        let i = self.idx(a, b);
        self.coeffs[i].add_assign(c);
    }

    /// `f(z)·g(w)`.
    pub fn outer(f: &Series, g: &Series) -> Self {
        let order = f.order().min(g.order());
        let mut out = Self::zero(f.nvars(), order);
        for a in 0..=order {
            if f.coeff_ref(a).is_zero() {
                continue;
            }
            for b in 0..=order {
                let p = f.coeff_ref(a).mul(g.coeff_ref(b));
                out.set_coeff(a, b, p);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.order, other.order);
        Series2 {
            nvars: self.nvars,
            order: self.order,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Series2 { nvars: self.nvars, order: self.order, coeffs: self.coeffs.iter().map(|c| c.neg()).collect() }
    }

    /// `(z + w)·self`, truncated to the same rectangle.
    pub fn mul_z_plus_w(&self) -> Self {
        let mut out = Self::zero(self.nvars, self.order);
        for a in 0..=self.order {
            for b in 0..=self.order {
                let mut c = EqScalar::zero(self.nvars);
                if a > 0 {
                    c.add_assign(self.coeff(a - 1, b));
                }
                if b > 0 {
                    c.add_assign(self.coeff(a, b - 1));
                }
                out.set_coeff(a, b, c);
            }
        }
        out
    }

    /// The unique `Q` with `(z + w)·Q = self` up to total degree `order`.
    ///
    /// Coefficients of `Q` are exact for total degree `< order`; the rest of the
    /// rectangle is left at zero.
    pub fn divide_by_z_plus_w(&self) -> Result<Self, AlgebraError> {
        let d = self.order;
        let mut q = Self::zero(self.nvars, d);
        if !self.coeff(0, 0).is_zero() {
            return Err(AlgebraError::NotDivisible { degree: 0 });
        }
        for total in 1..=d {
            // N_{a,b} = Q_{a−1,b} + Q_{a,b−1} along the antidiagonal a + b = total.
            // Solve for Q_{a,total−1−a} going up in a.
            let mut prev = EqScalar::zero(self.nvars);
            for a in 0..total {
                let b = total - 1 - a;
                // N_{a, b+1} = Q_{a−1, b+1} + Q_{a, b}
                let qab = self.coeff(a, b + 1).sub(&prev);
                q.set_coeff(a, b, qab.clone());
                prev = qab;
            }
            // last relation N_{total,0} = Q_{total−1,0}
            if *self.coeff(total, 0) != prev {
                return Err(AlgebraError::NotDivisible { degree: total });
            }
        }
        Ok(q)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Zeroes all coefficients of total degree above `max_total`.
    pub fn truncate_total(&mut self, max_total: usize) {
        for a in 0..=self.order {
            for b in 0..=self.order {
                if a + b > max_total {
                    let i = self.idx(a, b);
                    self.coeffs[i] = EqScalar::zero(self.nvars);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{rat, Exponent};

    fn q(x: Rational) -> EqScalar {
        EqScalar::rational(1, x)
    }

    fn winv(k: i64, c: Rational) -> EqScalar {
        EqScalar::monomial(1, vec![Exponent::from_integer(-k)], Cyclotomic::from_rational(c))
    }

    #[test]
    fn exp_of_z() {
        let s = Series::from_coeffs(1, 2, vec![q(int(0)), q(int(1))]);
        let e = s.exp().unwrap();
        assert_eq!(e.coeff(0), q(int(1)));
        assert_eq!(e.coeff(1), q(int(1)));
        assert_eq!(e.coeff(2), q(rat(1, 2)));
    }

    #[test]
    fn exp_of_hodge_term() {
        let s = Series::from_coeffs(1, 2, vec![q(int(0)), winv(1, rat(-1, 12))]);
        let e = s.exp().unwrap();
        assert_eq!(e.coeff(1), winv(1, rat(-1, 12)));
        assert_eq!(e.coeff(2), winv(2, rat(1, 288)));
        assert_eq!(e.log().unwrap(), s);
    }

    #[test]
    fn exp_rejects_constant() {
        let s = Series::one(1, 3);
        assert_eq!(s.exp(), Err(AlgebraError::NonzeroConstantTerm));
    }

    #[test]
    fn divide_examples() {
        let one = q(int(1));
        let mut n = Series2::zero(1, 3);
        n.set_coeff(1, 0, one.clone());
        n.set_coeff(0, 1, one.clone());
        let r = n.divide_by_z_plus_w().unwrap();
        assert_eq!(*r.coeff(0, 0), one);
        assert!(r.coeff(1, 0).is_zero());

        let mut n = Series2::zero(1, 3);
        n.set_coeff(2, 0, one.clone());
        n.set_coeff(0, 2, one.neg());
        let r = n.divide_by_z_plus_w().unwrap();
        assert_eq!(*r.coeff(1, 0), one);
        assert_eq!(*r.coeff(0, 1), one.neg());

        let mut n = Series2::zero(1, 3);
        n.set_coeff(2, 1, one.clone());
        n.set_coeff(1, 2, one.clone());
        let r = n.divide_by_z_plus_w().unwrap();
        assert_eq!(*r.coeff(1, 1), one);

        let mut bad = Series2::zero(1, 2);
        bad.set_coeff(1, 0, one);
        assert_eq!(bad.divide_by_z_plus_w(), Err(AlgebraError::NotDivisible { degree: 1 }));
    }
}
