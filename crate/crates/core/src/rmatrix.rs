//! Quantization data: `B_t^{ρ_i}(h)`, the operators `A_t^i`, their matrices
//! `E_t^i` in the φ basis, and the R-matrix.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::algebra::{bernoulli_poly, int, Cyclotomic, EqScalar, Exponent, Rational, Series};
use crate::chen_ruan::Target;
use crate::error::RMatrixError;

/// Which Bernoulli index multiplies `(z/w)^t` in the exponent of R.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BernoulliIndex {
    /// `B_{t+1}`, as in the quantized operator `A_{t+1}`.
    #[default]
    Shifted,
    /// `B_t`, as printed in the closed formula for `R(z)`.
    Literal,
}

/// `B_t^{ρ_i}(h) = Σ_l B_t(l/o(h)) D_{ρ_i}^h(l)`.
pub fn b_profile(target: &Target, i: usize, class: usize, t: u32) -> Rational {
    let p = target.profile(i, class);
    let o = p.order() as i64;
    let mut acc = Rational::zero();
    for (l, &d) in p.mult.iter().enumerate() {
        if d > 0 {
            acc += bernoulli_poly(t, &Rational::new(BigInt::from(l as i64), BigInt::from(o))) * int(d as i64);
        }
    }
    acc
}

/// Diagonal of `A_t^i` on the class basis.
pub fn a_action_on_classes(target: &Target, i: usize, t: u32) -> Vec<Rational> {
    (0..target.num_classes()).map(|c| b_profile(target, i, c, t)).collect()
}

/// `(E)^α_β = |V_β|/(|G||V_α|) Σ_h χ_α(h) χ_β(h⁻¹) f(h)` for a class function `f`.
pub fn class_function_matrix(target: &Target, f: &[Rational]) -> Vec<Vec<Cyclotomic>> {
    let t = target.table();
    let g = t.group();
    let n = t.num_irreps();
    (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    let mut s = Cyclotomic::zero();
                    for c in 0..g.num_classes() {
                        if f[c].is_zero() {
                            continue;
                        }
                        let w = int(g.class_size(c) as i64) * &f[c];
                        s += &t.value(a, c).mul(t.value(b, g.class_inverse(c))).scale(&w);
                    }
                    let pre = Rational::new(BigInt::from(t.dim(b)), BigInt::from(g.order() * t.dim(a)));
                    s.scale(&pre)
                })
                .collect()
        })
        .collect()
}

/// Matrix of `A_t^i` acting on the φ basis: `A φ_β = Σ_α E^α_β φ_α`.
pub fn e_matrix(target: &Target, i: usize, t: u32) -> Vec<Vec<Cyclotomic>> {
    class_function_matrix(target, &a_action_on_classes(target, i, t))
}

/// R-matrix truncated at `z^order`, in the natural φ frame and in the
/// orthonormal frame `R̃^α_β = R^α_β |V_α|/|V_β|`.
#[derive(Clone, Debug)]
pub struct RMatrix {
    order: usize,
    nvars: usize,
    natural: Vec<Vec<Series>>,
    ortho: Vec<Vec<Series>>,
    class_series: Vec<Series>,
}

impl RMatrix {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn size(&self) -> usize {
        self.natural.len()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// `R(z)^α_β` in the φ basis.
    pub fn entry(&self, alpha: usize, beta: usize) -> &Series {
        &self.natural[alpha][beta]
    }

    /// `R̃(z)^α_β` in the orthonormal basis `φ_γ/√ν_γ`.
    pub fn ortho(&self, alpha: usize, beta: usize) -> &Series {
        &self.ortho[alpha][beta]
    }

    /// The diagonal series `exp(Σ_i Σ_t …)` on the class basis.
    pub fn class_series(&self, class: usize) -> &Series {
        &self.class_series[class]
    }

    /// First failing coefficient of `Σ_γ R̃(−z)^γ_α R̃(z)^γ_β − δ_{αβ}`, if any.
    pub fn symplectic_defect(&self) -> Option<(usize, usize, usize)> {
        let n = self.size();
        let neg: Vec<Vec<Series>> =
            self.ortho.iter().map(|row| row.iter().map(|s| s.negate_variable()).collect()).collect();
        for a in 0..n {
            for b in 0..n {
                let mut acc = Series::zero(self.nvars, self.order);
                for g in 0..n {
                    acc = acc.add(&neg[g][a].mul(&self.ortho[g][b]));
                }
                for d in 0..=self.order {
                    let want = if d == 0 && a == b { EqScalar::one(self.nvars) } else { EqScalar::zero(self.nvars) };
                    if *acc.coeff_ref(d) != want {
                        return Some((d, a, b));
                    }
                }
            }
        }
        None
    }
}

/// Truncation covering every height that can occur for `(g, n)` with `g ≤ g_max`, `n ≤ n_max`.
pub fn default_order(g_max: u32, n_max: usize) -> usize {
    (3 * g_max as usize + n_max).saturating_sub(1).max(1)
}

pub fn r_matrix(target: &Target, order: usize) -> Result<RMatrix, RMatrixError> {
    r_matrix_with(target, order, BernoulliIndex::Shifted)
}

/// Builds R and refuses to return it unless the symplectic identity holds.
pub fn r_matrix_with(target: &Target, order: usize, index: BernoulliIndex) -> Result<RMatrix, RMatrixError> {
    let r = r_matrix_unchecked(target, order, index)?;
    if let Some((degree, row, col)) = r.symplectic_defect() {
        return Err(RMatrixError::SymplecticCheckFailed { degree, row, col });
    }
    Ok(r)
}

pub fn r_matrix_unchecked(target: &Target, order: usize, index: BernoulliIndex) -> Result<RMatrix, RMatrixError> {
    if order == 0 {
        return Err(RMatrixError::ZeroOrder);
    }
    let m = target.nvars();
    let table = target.table();
    let g = table.group();
    let k = g.num_classes();
    let n = table.num_irreps();

    let mut class_series = Vec::with_capacity(k);
    for c in 0..k {
        let mut log = Series::zero(m, order);
        for t in 1..=order {
            let bt = match index {
                BernoulliIndex::Shifted => t as u32 + 1,
                BernoulliIndex::Literal => t as u32,
            };
            let sign = if t % 2 == 0 { 1 } else { -1 };
            let pre = Rational::new(BigInt::from(sign), BigInt::from((t * (t + 1)) as i64));
            let mut coeff = EqScalar::zero(m);
            for i in 0..m {
                let b = b_profile(target, i, c, bt);
                if b.is_zero() {
                    continue;
                }
                let w = EqScalar::var_power(m, i, Exponent::from_integer(-(t as i64)));
                coeff.add_assign(&w.scale_rational(&(&pre * b)));
            }
            log.set_coeff(t, coeff);
        }
        class_series.push(log.exp()?);
    }

    let mut ortho = vec![vec![Series::zero(m, order); n]; n];
    let mut natural = vec![vec![Series::zero(m, order); n]; n];
    let inv_order = Rational::new(1.into(), BigInt::from(g.order()));
    for a in 0..n {
        for b in 0..n {
            let mut s = Series::zero(m, order);
            for (c, es) in class_series.iter().enumerate() {
                let w = table.value(a, c).mul(table.value(b, g.class_inverse(c))).scale(&int(g.class_size(c) as i64));
                if !w.is_zero() {
                    s = s.add(&es.scale(&w));
                }
            }
            let s = s.scale(&Cyclotomic::from_rational(inv_order.clone()));
            let ratio = Rational::new(BigInt::from(table.dim(b)), BigInt::from(table.dim(a)));
            natural[a][b] = s.scale(&Cyclotomic::from_rational(ratio));
            ortho[a][b] = s;
        }
    }
    Ok(RMatrix { order, nvars: m, natural, ortho, class_series })
}
