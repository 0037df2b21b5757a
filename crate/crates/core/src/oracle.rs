//! Quantized Riemann–Roch operator applied to the truncated BG potential,
//! as an independent check on the graph sum.

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::algebra::{Cyclotomic, EqScalar, Exponent, Monomial, Poly, Rational, UVars, Var};
use crate::chars::{bg_correlator, BgLabel};
use crate::chen_ruan::Target;
use crate::error::OracleError;
use crate::graphs::{potential_part, GraphOptions, GraphSum};
use crate::rmatrix::{e_matrix, r_matrix};

pub const DEFAULT_BUDGET: usize = 2_000_000;

/// Sign pattern of the quadratic term `Σ_ℓ s(ℓ) ∂_{u^α_ℓ} ∂_{u^β_{t−1−ℓ}}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadraticSign {
    /// `s(ℓ) = (−1)^{ℓ+1+t}`.
    #[default]
    Verbatim,
    /// `s(ℓ) = (−1)^ℓ`.
    Alternating,
}

impl QuadraticSign {
    fn sign(self, l: u32, t: u32) -> i64 {
        let e = match self {
            QuadraticSign::Verbatim => l + 1 + t,
            QuadraticSign::Alternating => l,
        };
        if e % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

/// Bounds on the monomials `ħ^p ∏ u^{β_i}_{a_i}` kept in a potential:
/// degree, height, and `χ = 2p + degree`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Truncation {
    pub max_degree: usize,
    pub max_height: u32,
    pub max_chi: i64,
}

impl Truncation {
    fn chi(m: &Monomial) -> i64 {
        2 * m.hbar as i64 + m.degree() as i64
    }

    pub fn admits(&self, vars: &UVars, m: &Monomial) -> bool {
        m.degree() <= self.max_degree
            && Self::chi(m) <= self.max_chi
            && m.vars.iter().all(|&v| vars.height(v) <= self.max_height)
    }

    /// Input truncation that determines every output coefficient of
    /// `self` after `lowering` units of weight.
    pub fn required_input(&self, lowering: u32) -> Truncation {
        Truncation {
            max_degree: self.max_degree + 2 * lowering as usize,
            max_height: (self.max_height + lowering).max(lowering + 1),
            max_chi: self.max_chi + lowering as i64,
        }
    }

    pub fn contains(&self, other: &Truncation) -> bool {
        self.max_degree >= other.max_degree && self.max_height >= other.max_height && self.max_chi >= other.max_chi
    }
}

/// A truncated generating function in the variables `u^β_a` and `ħ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PotentialPolynomial {
    pub vars: UVars,
    pub trunc: Truncation,
    pub poly: Poly,
}

impl PotentialPolynomial {
    fn restrict(&mut self) {
        let (v, t) = (self.vars, self.trunc);
        self.poly.retain(|m| t.admits(&v, m));
    }

    fn mul(&self, other: &Poly, budget: usize) -> Result<Poly, OracleError> {
        let mut out = Poly::zero(self.poly.nvars());
        for (m1, c1) in self.poly.terms() {
            for (m2, c2) in other.terms() {
                let m = m1.mul(m2);
                if self.trunc.admits(&self.vars, &m) {
                    out.add_term(m, c1.mul(c2));
                }
            }
            if out.len() > budget {
                return Err(OracleError::BudgetExceeded { budget });
            }
        }
        Ok(out)
    }

    /// `exp(self)`, assuming every term has `χ ≥ 1`.
    pub fn exp(&self, budget: usize) -> Result<PotentialPolynomial, OracleError> {
        let m = self.poly.nvars();
        let mut total = Poly::constant(EqScalar::one(m));
        let mut power = Poly::constant(EqScalar::one(m));
        let mut k = 0i64;
        loop {
            k += 1;
            power = self.mul(&power, budget)?.scale_rational(&Rational::new(BigInt::one(), BigInt::from(k)));
            if power.is_zero() {
                break;
            }
            total.add_assign(&power);
        }
        Ok(PotentialPolynomial { vars: self.vars, trunc: self.trunc, poly: total })
    }

    /// `log(self)` for a potential with constant term 1.
    pub fn log(&self, budget: usize) -> Result<PotentialPolynomial, OracleError> {
        let m = self.poly.nvars();
        let mut x = self.clone();
        x.poly.add_term(Monomial::one(), EqScalar::one(m).neg());
        let mut total = Poly::zero(m);
        let mut power = Poly::constant(EqScalar::one(m));
        let mut k = 0i64;
        loop {
            k += 1;
            power = x.mul(&power, budget)?;
            if power.is_zero() {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            total.add_assign(&power.scale_rational(&Rational::new(BigInt::from(sign), BigInt::from(k))));
        }
        Ok(PotentialPolynomial { vars: self.vars, trunc: self.trunc, poly: total })
    }
}

/// `log 𝒟^{BG} = Σ_g ħ^{g−1} Σ_α Σ (1/n!) ⟨τ_{a₁}(φ_α)…⟩ ∏ u^α_{a_i}` within `trunc`.
pub fn bg_log_potential(target: &Target, trunc: Truncation, budget: usize) -> Result<PotentialPolynomial, OracleError> {
    let table = target.table();
    let n_irreps = table.num_irreps();
    let vars = UVars::new(n_irreps, trunc.max_height);
    let m = target.nvars();
    let mut poly = Poly::zero(m);
    for g in 0..=((trunc.max_chi + 2) / 2) as u32 {
        for n in 0..=trunc.max_degree {
            let chi = 2 * g as i64 - 2 + n as i64;
            if chi <= 0 || chi > trunc.max_chi {
                continue;
            }
            let dim = 3 * g as i64 - 3 + n as i64;
            for hs in height_multisets(n, dim as u32, trunc.max_height) {
                for alpha in 0..n_irreps {
                    let ins: Vec<(BgLabel, u32)> = hs.iter().map(|&a| (BgLabel::Phi(alpha), a)).collect();
                    let value = bg_correlator(table, g, &ins)?;
                    let mono = Monomial::new(g as i32 - 1, hs.iter().map(|&a| vars.index(alpha, a)).collect());
                    let sym = Rational::new(BigInt::one(), BigInt::from(mono.symmetry()));
                    poly.add_term(mono, EqScalar::constant(m, value.scale(&sym)));
                }
                if poly.len() > budget {
                    return Err(OracleError::BudgetExceeded { budget });
                }
            }
        }
    }
    Ok(PotentialPolynomial { vars, trunc, poly })
}

/// `𝒟^{BG} = exp(log 𝒟^{BG})` within `trunc`.
pub fn bg_potential(target: &Target, trunc: Truncation, budget: usize) -> Result<PotentialPolynomial, OracleError> {
    bg_log_potential(target, trunc, budget)?.exp(budget)
}

/// Non-decreasing height sequences of length `n`, entries `≤ cap`, sum `total`.
fn height_multisets(n: usize, total: u32, cap: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, left: u32, lo: u32, cap: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == n {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for a in lo..=cap.min(left) {
            cur.push(a);
            rec(n, left - a, a, cap, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, total, 0, cap, &mut Vec::new(), &mut out);
    out
}

/// One piece `c_t w_i^{−t} (A^i_{t+1})^∧` of the quantized operator.
#[derive(Clone, Debug)]
pub struct OperatorPiece {
    pub summand: usize,
    pub t: u32,
    pub coeff: EqScalar,
    /// `E^α_β` of `A^i_{t+1}` in the φ basis.
    pub e: Vec<Vec<Cyclotomic>>,
}

/// `Σ_i Σ_{t ≤ max_t} ((−1)^t/(t(t+1))) (A^i_{t+1} (z/w_i)^t)^∧`.
#[derive(Clone, Debug)]
pub struct QuantizedOperator {
    pub pieces: Vec<OperatorPiece>,
    pub sign: QuadraticSign,
    inv_two_nu: Vec<Rational>,
}

impl QuantizedOperator {
    pub fn new(target: &Target, max_t: u32, sign: QuadraticSign) -> Self {
        let m = target.nvars();
        let mut pieces = Vec::new();
        for i in 0..m {
            for t in 1..=max_t {
                let s = if t % 2 == 0 { 1 } else { -1 };
                let c = Rational::new(BigInt::from(s), BigInt::from(t * (t + 1)));
                let coeff = EqScalar::var_power(m, i, Exponent::from_integer(-(t as i64))).scale_rational(&c);
                pieces.push(OperatorPiece { summand: i, t, coeff, e: e_matrix(target, i, t + 1) });
            }
        }
        let inv_two_nu = (0..target.num_irreps())
            .map(|b| Rational::one() / (target.table().nu(b) * Rational::from_integer(2.into())))
            .collect();
        QuantizedOperator { pieces, sign, inv_two_nu }
    }

    /// Same operator with every `E` replaced by zero.
    pub fn zero(target: &Target, max_t: u32) -> Self {
        let mut op = Self::new(target, max_t, QuadraticSign::default());
        for p in &mut op.pieces {
            for row in &mut p.e {
                for x in row.iter_mut() {
                    *x = Cyclotomic::zero();
                }
            }
        }
        op
    }

    pub fn restricted_to(&self, index: usize) -> Self {
        QuantizedOperator {
            pieces: vec![self.pieces[index].clone()],
            sign: self.sign,
            inv_two_nu: self.inv_two_nu.clone(),
        }
    }

    /// `Σ_{α,β} E^α_β (∂_{u^α_{t+1}} − Σ_ℓ u^β_ℓ ∂_{u^α_{ℓ+t}} + (ħ/2ν_β) Σ_ℓ s(ℓ) ∂_{u^α_ℓ}∂_{u^β_{t−1−ℓ}})`,
    /// the first term being the dilaton-shifted `ℓ = 1` part of the second.
    pub fn apply_piece(&self, piece: &OperatorPiece, vars: &UVars, p: &Poly) -> Poly {
        let n = vars.irreps;
        let t = piece.t;
        let mut out = Poly::zero(p.nvars());
        for (mono, c) in p.terms() {
            let base = c.mul(&piece.coeff);
            let mut seen: Vec<Var> = Vec::new();
            for &v in &mono.vars {
                if seen.contains(&v) {
                    continue;
                }
                seen.push(v);
                let (alpha, h) = vars.decode(v);
                let (rest, count) = mono.without_var(v).unwrap();
                let cnt = Cyclotomic::from_int(count as i64);
                if h == t + 1 {
                    for beta in 0..n {
                        let e = &piece.e[alpha][beta];
                        if !e.is_zero() {
                            out.add_term(rest.clone(), base.scale(&e.mul(&cnt)));
                        }
                    }
                }
                if h >= t {
                    let l = h - t;
                    for beta in 0..n {
                        let e = &piece.e[alpha][beta];
                        if !e.is_zero() && l <= vars.max_height {
                            out.add_term(rest.with_var(vars.index(beta, l)), base.scale(&e.mul(&cnt)).neg());
                        }
                    }
                }
                if h < t {
                    // ∂_{u^α_h} ∂_{u^β_{t−1−h}}
                    let l2 = t - 1 - h;
                    for beta in 0..n {
                        let e = &piece.e[alpha][beta];
                        if e.is_zero() {
                            continue;
                        }
                        let v2 = vars.index(beta, l2);
                        let Some((rest2, c2)) = rest.without_var(v2) else { continue };
                        let s = self.sign.sign(h, t);
                        let f = Rational::from_integer(BigInt::from(s * (count * c2) as i64)) * &self.inv_two_nu[beta];
                        let mut m2 = rest2;
                        m2.hbar += 1;
                        out.add_term(m2, base.scale(e).scale_rational(&f));
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, vars: &UVars, p: &Poly) -> Poly {
        let mut out = Poly::zero(p.nvars());
        for piece in &self.pieces {
            out.add_assign(&self.apply_piece(piece, vars, p));
        }
        out
    }
}

/// Output region of a comparison: degree, height and `χ` caps plus the
/// largest weight lowering `T` that can reach it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OutputWindow {
    pub trunc: Truncation,
    pub lowering: u32,
}

impl OutputWindow {
    /// Everything needed for the degree-`n` part of `ℱ_g`, heights `≤ cap`.
    pub fn for_correlators(g: u32, n: usize, cap: u32) -> Self {
        OutputWindow {
            trunc: Truncation { max_degree: n, max_height: cap, max_chi: 2 * g as i64 - 2 + n as i64 },
            lowering: (3 * g as i64 - 3 + n as i64).max(0) as u32,
        }
    }

    /// Whether a term at an intermediate stage can still reach the window.
    fn reachable(&self, vars: &UVars, m: &Monomial) -> bool {
        let w = vars.weight(m);
        let rem = self.lowering as i64 + w;
        if rem < 0 {
            return false;
        }
        let deg = m.degree() as i64;
        if deg - 2 * rem > self.trunc.max_degree as i64 {
            return false;
        }
        if Truncation::chi(m) - rem > self.trunc.max_chi {
            return false;
        }
        let hcap = (self.trunc.max_height as i64 + rem).max(rem + 1);
        m.vars.iter().all(|&v| (vars.height(v) as i64) <= hcap)
    }
}

/// `exp(L)·P` by the terminating Taylor sum, pruned to what can reach `window`.
pub fn apply_quantized(
    op: &QuantizedOperator,
    p: &PotentialPolynomial,
    window: &OutputWindow,
    budget: usize,
) -> Result<PotentialPolynomial, OracleError> {
    check_input(p, window)?;
    let mut out =
        PotentialPolynomial { vars: p.vars, trunc: window.trunc, poly: taylor(op, &p.vars, &p.poly, window, budget)? };
    out.restrict();
    Ok(out)
}

/// `∏_pieces exp(L_piece)` applied one factor at a time.
pub fn apply_quantized_factored(
    op: &QuantizedOperator,
    p: &PotentialPolynomial,
    window: &OutputWindow,
    budget: usize,
) -> Result<PotentialPolynomial, OracleError> {
    check_input(p, window)?;
    let mut cur = p.poly.clone();
    for i in 0..op.pieces.len() {
        cur = taylor(&op.restricted_to(i), &p.vars, &cur, window, budget)?;
    }
    let mut out = PotentialPolynomial { vars: p.vars, trunc: window.trunc, poly: cur };
    out.restrict();
    Ok(out)
}

fn check_input(p: &PotentialPolynomial, window: &OutputWindow) -> Result<(), OracleError> {
    let needed = window.trunc.required_input(window.lowering);
    if !p.trunc.contains(&needed) {
        return Err(OracleError::TruncationTooTight(format!(
            "input truncation {:?} does not cover the required {:?}",
            p.trunc, needed
        )));
    }
    Ok(())
}

fn taylor(
    op: &QuantizedOperator,
    vars: &UVars,
    p: &Poly,
    window: &OutputWindow,
    budget: usize,
) -> Result<Poly, OracleError> {
    let mut term = p.clone();
    term.retain(|m| window.reachable(vars, m));
    let mut total = term.clone();
    let mut k = 0i64;
    while !term.is_zero() {
        k += 1;
        term = op.apply(vars, &term).scale_rational(&Rational::new(BigInt::one(), BigInt::from(k)));
        term.retain(|m| window.reachable(vars, m));
        if term.len() > budget {
            return Err(OracleError::BudgetExceeded { budget });
        }
        total.add_assign(&term);
    }
    Ok(total)
}

/// Degree-`n`, `ħ^{g−1}` part of `log 𝒟^{tw}` computed by quantization.
pub fn twisted_potential_part(
    target: &Target,
    g: u32,
    n: usize,
    cap: u32,
    sign: QuadraticSign,
    budget: usize,
) -> Result<Poly, OracleError> {
    let window = OutputWindow::for_correlators(g, n, cap);
    let input = bg_potential(target, window.trunc.required_input(window.lowering), budget)?;
    let op = QuantizedOperator::new(target, window.lowering.max(1), sign);
    let d = apply_quantized(&op, &input, &window, budget)?;
    let mut f = d.log(budget)?.poly;
    f.retain(|m| m.degree() == n && m.hbar == g as i32 - 1);
    Ok(f)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComparisonReport {
    pub g: u32,
    pub n: usize,
    pub height_cap: u32,
    pub monomials: usize,
    pub nonzero: usize,
    pub mismatches: usize,
}

fn zero_hbar(p: &Poly) -> Poly {
    let mut out = Poly::zero(p.nvars());
    for (m, c) in p.terms() {
        out.add_term(Monomial::new(0, m.vars.clone()), c.clone());
    }
    out
}

/// Checks graph sum against quantization on the degree-`n` part of `ℱ_g`,
/// in both the twisted and the `[ℂʳ/G]` normalization.
pub fn compare_with_graphsum(
    target: &Target,
    g: u32,
    n: usize,
    cap: u32,
    sign: QuadraticSign,
    budget: usize,
) -> Result<ComparisonReport, OracleError> {
    let vars = UVars::new(target.num_irreps(), cap);
    let oracle = zero_hbar(&twisted_potential_part(target, g, n, cap, sign, budget)?);
    let order = (3 * g as usize + n).max(2);
    let r = r_matrix(target, order)?;
    let tw = potential_part(&GraphSum::new(target, &r, GraphOptions::twisted())?, g, n, &vars)?;
    let x = potential_part(&GraphSum::new(target, &r, GraphOptions::x())?, g, n, &vars)?;
    let e = target.e1().monomial_pow(Exponent::from_integer(g as i64 - 1)).map_err(crate::error::GraphError::from)?;
    let oracle_x = oracle.scale(&e);
    let mut monomials: Vec<&Monomial> = oracle.terms().map(|t| t.0).chain(tw.terms().map(|t| t.0)).collect();
    monomials.sort();
    monomials.dedup();
    let mut nonzero = 0;
    for m in &monomials {
        let (a, b) = (tw.coeff(m), oracle.coeff(m));
        if a != b {
            return Err(OracleError::MismatchFound {
                monomial: vars.format(m),
                graph: a.to_string(),
                oracle: b.to_string(),
            });
        }
        let (a, b) = (x.coeff(m), oracle_x.coeff(m));
        if a != b {
            return Err(OracleError::MismatchFound {
                monomial: format!("{} (X)", vars.format(m)),
                graph: a.to_string(),
                oracle: b.to_string(),
            });
        }
        if !b.is_zero() {
            nonzero += 1;
        }
    }
    Ok(ComparisonReport { g, n, height_cap: cap, monomials: monomials.len(), nonzero, mismatches: 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use crate::chars::character_table;
    use crate::chen_ruan::RepSpec;
    use crate::group::FiniteGroup;
    use std::sync::Arc;

    fn target(f: &str, n: i64, rep: Vec<usize>) -> Target {
        let t = character_table(Arc::new(FiniteGroup::builtin(f, n).unwrap())).unwrap();
        Target::new(Arc::new(t), RepSpec::new(rep)).unwrap()
    }

    #[test]
    fn bg_coefficients() {
        let x = target("cyclic", 2, vec![1]);
        let tr = Truncation { max_degree: 3, max_height: 2, max_chi: 1 };
        let f = bg_log_potential(&x, tr, DEFAULT_BUDGET).unwrap();
        let v = UVars::new(2, 2);
        let cubic = Monomial::new(-1, vec![v.index(1, 0); 3]);
        assert_eq!(f.poly.coeff(&cubic), EqScalar::rational(1, rat(1, 24)));
        let one = Monomial::new(0, vec![v.index(0, 1)]);
        assert_eq!(f.poly.coeff(&one), EqScalar::rational(1, rat(1, 24)));
        let mixed = Monomial::new(-1, vec![v.index(0, 0), v.index(0, 0), v.index(1, 0)]);
        assert!(f.poly.coeff(&mixed).is_zero());
    }

    #[test]
    fn exp_log_round_trip() {
        let x = target("cyclic", 2, vec![1]);
        let tr = Truncation { max_degree: 4, max_height: 2, max_chi: 3 };
        let f = bg_log_potential(&x, tr, DEFAULT_BUDGET).unwrap();
        let back = f.exp(DEFAULT_BUDGET).unwrap().log(DEFAULT_BUDGET).unwrap();
        assert_eq!(back.poly, f.poly);
    }

    #[test]
    fn zero_operator_is_identity() {
        let x = target("cyclic", 2, vec![1]);
        let w = OutputWindow::for_correlators(1, 1, 2);
        let p = bg_potential(&x, w.trunc.required_input(w.lowering), DEFAULT_BUDGET).unwrap();
        let op = QuantizedOperator::zero(&x, 1);
        let mut expect = p.clone();
        expect.trunc = w.trunc;
        expect.restrict();
        assert_eq!(apply_quantized(&op, &p, &w, DEFAULT_BUDGET).unwrap(), expect);
    }

    #[test]
    fn tight_truncation_is_reported() {
        let x = target("cyclic", 1, vec![0]);
        let w = OutputWindow::for_correlators(1, 2, 2);
        let p = bg_potential(&x, w.trunc, DEFAULT_BUDGET).unwrap();
        let op = QuantizedOperator::new(&x, 2, QuadraticSign::Verbatim);
        assert!(matches!(apply_quantized(&op, &p, &w, DEFAULT_BUDGET), Err(OracleError::TruncationTooTight(_))));
    }

    #[test]
    fn hodge_anchor() {
        let x = target("cyclic", 1, vec![0]);
        let f = twisted_potential_part(&x, 1, 1, 1, QuadraticSign::Verbatim, DEFAULT_BUDGET).unwrap();
        let m = Monomial::new(0, vec![UVars::new(1, 1).index(0, 0)]);
        assert_eq!(
            f.coeff(&m),
            EqScalar::monomial(1, vec![Exponent::from_integer(-1)], Cyclotomic::from_rational(rat(-1, 24)))
        );
    }

    #[test]
    fn matches_graph_sum_small() {
        let x = target("cyclic", 2, vec![1]);
        for (g, n) in [(0, 3), (1, 1), (0, 4)] {
            compare_with_graphsum(&x, g, n, 3, QuadraticSign::Verbatim, DEFAULT_BUDGET).unwrap();
        }
    }

    #[test]
    fn factored_exponential_agrees() {
        let x = target("symmetric", 3, vec![2, 1]);
        for (g, n) in [(0, 4), (1, 2)] {
            let w = OutputWindow::for_correlators(g, n, 2);
            let p = bg_potential(&x, w.trunc.required_input(w.lowering), DEFAULT_BUDGET).unwrap();
            let op = QuantizedOperator::new(&x, w.lowering, QuadraticSign::Verbatim);
            let a = apply_quantized(&op, &p, &w, DEFAULT_BUDGET).unwrap();
            let b = apply_quantized_factored(&op, &p, &w, DEFAULT_BUDGET).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn alternating_sign_disagrees_with_graph_sum() {
        // Even-t quadratic terms only pair distinct irreps, first reachable at (1,3).
        let x = target("cyclic", 3, vec![1, 2]);
        assert!(compare_with_graphsum(&x, 1, 3, 2, QuadraticSign::Verbatim, DEFAULT_BUDGET).is_ok());
        assert!(matches!(
            compare_with_graphsum(&x, 1, 3, 2, QuadraticSign::Alternating, DEFAULT_BUDGET),
            Err(OracleError::MismatchFound { .. })
        ));
    }
}
