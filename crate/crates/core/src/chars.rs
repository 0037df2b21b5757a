//! Character tables, Frobenius counting and the correlators of BG.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{int, Cyclotomic, Rational};
use crate::error::CharError;
use crate::group::FiniteGroup;
use crate::psi::psi_integral;

/// Irreducible characters of a group, rows indexed by irrep, columns by class.
#[derive(Clone, Debug)]
pub struct CharacterTable {
    group: Arc<FiniteGroup>,
    dims: Vec<usize>,
    values: Vec<Vec<Cyclotomic>>,
    nu: Vec<Rational>,
}

impl CharacterTable {
    /// Validates both orthogonality relations exactly before accepting.
    pub fn new(group: Arc<FiniteGroup>, values: Vec<Vec<Cyclotomic>>) -> Result<Self, CharError> {
        let k = group.num_classes();
        if values.len() != k {
            return Err(CharError::InvalidTable(format!("{} rows for {} classes", values.len(), k)));
        }
        let mut dims = Vec::with_capacity(k);
        for row in &values {
            if row.len() != k {
                return Err(CharError::InvalidTable("row length differs from class count".into()));
            }
            let d = row[0]
                .to_rational()
                .filter(|d| d.is_integer() && d.is_positive())
                .and_then(|d| d.to_integer().to_usize())
                .ok_or_else(|| CharError::InvalidTable("value at the identity is not a positive integer".into()))?;
            dims.push(d);
        }
        let order = group.order();
        let nu = dims.iter().map(|&d| Rational::new(BigInt::from(d), BigInt::from(order)).pow(2)).collect();
        let t = CharacterTable { group, dims, values, nu };
        t.check_orthogonality()?;
        Ok(t)
    }

    fn check_orthogonality(&self) -> Result<(), CharError> {
        let g = &self.group;
        let k = g.num_classes();
        let order = int(g.order() as i64);
        if self.dims.iter().map(|d| d * d).sum::<usize>() != g.order() {
            return Err(CharError::InvalidTable("sum of squared dimensions differs from |G|".into()));
        }
        for a in 0..k {
            for b in a..k {
                let mut s = Cyclotomic::zero();
                for c in 0..k {
                    let term = self.value(a, g.class_inverse(c)).mul(self.value(b, c));
                    s += &term.scale(&int(g.class_size(c) as i64));
                }
                let want = if a == b { order.clone() } else { Rational::zero() };
                if s != Cyclotomic::from_rational(want) {
                    return Err(CharError::InvalidTable(format!("rows {a} and {b} are not orthogonal")));
                }
            }
        }
        for c in 0..k {
            for d in c..k {
                let mut s = Cyclotomic::zero();
                for r in 0..k {
                    s += &self.value(r, g.class_inverse(c)).mul(self.value(r, d));
                }
                let want = if c == d { int(g.class_centralizer(c) as i64) } else { Rational::zero() };
                if s != Cyclotomic::from_rational(want) {
                    return Err(CharError::InvalidTable(format!("columns {c} and {d} are not orthogonal")));
                }
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn group_arc(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn num_irreps(&self) -> usize {
        self.dims.len()
    }

    pub fn dim(&self, irrep: usize) -> usize {
        self.dims[irrep]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// χ_irrep at class `class`.
    pub fn value(&self, irrep: usize, class: usize) -> &Cyclotomic {
        &self.values[irrep][class]
    }

    pub fn values(&self) -> &[Vec<Cyclotomic>] {
        &self.values
    }

    /// `ν_γ = (|V_γ|/|G|)²`.
    pub fn nu(&self, irrep: usize) -> &Rational {
        &self.nu[irrep]
    }

    /// `|V_γ|/|G| = √ν_γ`.
    pub fn sqrt_nu(&self, irrep: usize) -> Rational {
        Rational::new(BigInt::from(self.dims[irrep]), BigInt::from(self.group.order()))
    }

    pub fn to_json(&self) -> TableJson {
        TableJson {
            classes: self.group.classes().iter().map(|c| c.len()).collect(),
            irreps: self.dims.iter().zip(&self.values).map(|(&dim, v)| IrrepJson { dim, values: v.clone() }).collect(),
        }
    }

    /// Accepts a user table after checking class sizes and orthogonality.
    pub fn from_json(group: Arc<FiniteGroup>, json: &TableJson) -> Result<Self, CharError> {
        let sizes: Vec<usize> = group.classes().iter().map(|c| c.len()).collect();
        if sizes != json.classes {
            return Err(CharError::InvalidTable(format!(
                "class sizes {:?} do not match the group's {:?}",
                json.classes, sizes
            )));
        }
        for ir in &json.irreps {
            if ir.values.first().map(|v| *v != Cyclotomic::from_int(ir.dim as i64)).unwrap_or(true) {
                return Err(CharError::InvalidTable("dim does not match the value at the identity".into()));
            }
        }
        Self::new(group, json.irreps.iter().map(|ir| ir.values.clone()).collect())
    }

    /// Coordinates in the φ basis of `Σ_h x_h 1_h`.
    pub fn class_to_phi(&self, x: &[Cyclotomic]) -> Vec<Cyclotomic> {
        (0..self.num_irreps())
            .map(|r| {
                let mut s = Cyclotomic::zero();
                for (c, xc) in x.iter().enumerate() {
                    if xc.is_zero() {
                        continue;
                    }
                    s += &xc.mul(&self.class_in_phi(c, r));
                }
                s
            })
            .collect()
    }

    /// Coordinates in the 1_h basis of `Σ_γ y_γ φ_γ`.
    pub fn phi_to_class(&self, y: &[Cyclotomic]) -> Vec<Cyclotomic> {
        (0..self.group.num_classes())
            .map(|c| {
                let mut s = Cyclotomic::zero();
                for (r, yr) in y.iter().enumerate() {
                    if yr.is_zero() {
                        continue;
                    }
                    s += &yr.mul(&self.phi_in_class(r, c));
                }
                s
            })
            .collect()
    }

    /// `[φ_γ] 1_h = |[h]| χ_γ(h) / |V_γ|`.
    pub fn class_in_phi(&self, class: usize, irrep: usize) -> Cyclotomic {
        let f = Rational::new(BigInt::from(self.group.class_size(class)), BigInt::from(self.dims[irrep]));
        self.values[irrep][class].scale(&f)
    }

    /// `[1_h] φ_γ = (|V_γ|/|G|) χ_γ(h⁻¹)`.
    pub fn phi_in_class(&self, irrep: usize, class: usize) -> Cyclotomic {
        self.values[irrep][self.group.class_inverse(class)].scale(&self.sqrt_nu(irrep))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableJson {
    pub classes: Vec<usize>,
    pub irreps: Vec<IrrepJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IrrepJson {
    pub dim: usize,
    pub values: Vec<Cyclotomic>,
}

// ---------------------------------------------------------------------------
// Dixon–Burnside

fn mod_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn mod_inv(a: u64, p: u64) -> u64 {
    mod_pow(a, p - 2, p)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn primitive_root(p: u64) -> u64 {
    let qs = prime_factors(p - 1);
    (2..p).find(|&g| qs.iter().all(|&q| mod_pow(g, (p - 1) / q, p) != 1)).expect("prime has a primitive root")
}

/// Reduced row echelon form in place; returns pivot columns.
fn rref(rows: &mut Vec<Vec<u64>>, p: u64) -> Vec<usize> {
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(piv) = (r..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(r, piv);
        let inv = mod_inv(rows[r][c], p);
        for x in rows[r].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let f = rows[i][c];
                for j in 0..ncols {
                    rows[i][j] = (rows[i][j] + p - f * rows[r][j] % p) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// Basis of `{x : A x = 0}` for a square matrix `A`.
fn nullspace(a: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let n = a.len();
    let mut rows = a.to_vec();
    let pivots = rref(&mut rows, p);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u64; n];
            v[f] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - rows[r][f]) % p;
            }
            v
        })
        .collect()
}

/// Characteristic polynomial (low to high, monic) via Hessenberg reduction.
fn charpoly(a: &[Vec<u64>], p: u64) -> Vec<u64> {
    let n = a.len();
    let mut h = a.to_vec();
    for c in 0..n.saturating_sub(2) {
        let Some(piv) = (c + 1..n).find(|&i| h[i][c] != 0) else { continue };
        if piv != c + 1 {
            h.swap(piv, c + 1);
            for row in h.iter_mut() {
                row.swap(piv, c + 1);
            }
        }
        let inv = mod_inv(h[c + 1][c], p);
        for i in c + 2..n {
            if h[i][c] == 0 {
                continue;
            }
            let f = h[i][c] * inv % p;
            for j in 0..n {
                h[i][j] = (h[i][j] + p - f * h[c + 1][j] % p) % p;
            }
            for row in h.iter_mut() {
                row[c + 1] = (row[c + 1] + f * row[i]) % p;
            }
        }
    }
    // p_0 = 1; p_m = (x − h_mm) p_{m−1} − Σ_{i<m} h_{i,m} (∏_{j=i+1}^{m} h_{j,j−1}) p_{i−1}
    let mut polys: Vec<Vec<u64>> = vec![vec![1]];
    for m in 0..n {
        let prev = &polys[m];
        let mut next = vec![0u64; m + 2];
        for (d, &c) in prev.iter().enumerate() {
            next[d + 1] = (next[d + 1] + c) % p;
            next[d] = (next[d] + p - h[m][m] * c % p) % p;
        }
        let mut prod = 1u64;
        for i in (0..m).rev() {
            prod = prod * h[i + 1][i] % p;
            let coef = h[i][m] * prod % p;
            if coef == 0 {
                continue;
            }
            for (d, &c) in polys[i].iter().enumerate() {
                next[d] = (next[d] + p - coef * c % p) % p;
            }
        }
        polys.push(next);
    }
    polys.pop().unwrap()
}

fn roots(poly: &[u64], p: u64) -> Vec<u64> {
    (0..p)
        .filter(|&x| {
            let mut acc = 0u64;
            for &c in poly.iter().rev() {
                acc = (acc * x + c) % p;
            }
            acc == 0
        })
        .collect()
}

/// Computes the character table by Dixon's modular method.
pub fn character_table(group: Arc<FiniteGroup>) -> Result<CharacterTable, CharError> {
    let g = &*group;
    let n = g.order();
    let k = g.num_classes();
    let exp = g.exponent() as u64;
    let fail = |m: &str| CharError::TableComputationFailed(m.to_string());

    let mut p = exp + 1;
    while !(p > 2 * n as u64 && is_prime(p)) {
        p += exp;
    }
    let zeta_p = mod_pow(primitive_root(p), (p - 1) / exp, p);

    // class matrices: (M_j)_{l,m} = #{x ∈ C_j : x⁻¹ z_m ∈ C_l}
    let mut cmat = vec![vec![vec![0u64; k]; k]; k];
    for m in 0..k {
        let z = g.class_rep(m);
        for x in 0..n {
            let j = g.class_of(x);
            let l = g.class_of(g.mul(g.inv(x), z));
            cmat[j][l][m] += 1;
        }
    }

    let mut spaces: Vec<Vec<Vec<u64>>> = vec![(0..k)
        .map(|i| {
            let mut v = vec![0u64; k];
            v[i] = 1;
            v
        })
        .collect()];
    for j in 1..k {
        if spaces.iter().all(|s| s.len() == 1) {
            break;
        }
        let mut next = Vec::new();
        for mut w in spaces {
            if w.len() == 1 {
                next.push(w);
                continue;
            }
            let piv = rref(&mut w, p);
            let d = w.len();
            // A[r][i] = coordinate r of M_j w_i
            let mut a = vec![vec![0u64; d]; d];
            for (i, wi) in w.iter().enumerate() {
                let img: Vec<u64> =
                    (0..k).map(|l| (0..k).fold(0u64, |acc, m| (acc + cmat[j][l][m] * wi[m]) % p)).collect();
                for (r, &pc) in piv.iter().enumerate() {
                    a[r][i] = img[pc];
                }
            }
            for lam in roots(&charpoly(&a, p), p) {
                let shifted: Vec<Vec<u64>> = (0..d)
                    .map(|r| (0..d).map(|c| if r == c { (a[r][c] + p - lam) % p } else { a[r][c] }).collect())
                    .collect();
                let ns = nullspace(&shifted, p);
                let sub: Vec<Vec<u64>> = ns
                    .iter()
                    .map(|coef| (0..k).map(|m| (0..d).fold(0u64, |acc, r| (acc + coef[r] * w[r][m]) % p)).collect())
                    .collect();
                if !sub.is_empty() {
                    next.push(sub);
                }
            }
        }
        spaces = next;
    }
    if spaces.len() != k || spaces.iter().any(|s| s.len() != 1) {
        return Err(fail("class algebra did not split into one-dimensional eigenspaces"));
    }

    let mut rows = Vec::with_capacity(k);
    for s in spaces {
        let v = &s[0];
        if v[0] == 0 {
            return Err(fail("eigenvector vanishes at the identity class"));
        }
        let inv0 = mod_inv(v[0], p);
        let omega: Vec<u64> = v.iter().map(|x| x * inv0 % p).collect();
        // d² = |G| / Σ_j ω_j ω_{j*} / |C_j|
        let mut s = 0u64;
        for j in 0..k {
            let term = omega[j] * omega[g.class_inverse(j)] % p * mod_inv(g.class_size(j) as u64, p) % p;
            s = (s + term) % p;
        }
        let d2 = n as u64 % p * mod_inv(s, p) % p;
        let d =
            (1..=n as u64).find(|d| d * d <= n as u64 && d * d % p == d2).ok_or_else(|| fail("no integral degree"))?;
        let theta: Vec<u64> = (0..k).map(|j| d % p * omega[j] % p * mod_inv(g.class_size(j) as u64, p) % p).collect();
        let mut row = Vec::with_capacity(k);
        for c in 0..k {
            let o = g.class_element_order(c) as u64;
            let step = exp / o;
            let z_o = mod_pow(zeta_p, step, p);
            let inv_o = mod_inv(o % p, p);
            let mut terms = Vec::new();
            for l in 0..o {
                let mut acc = 0u64;
                for t in 0..o {
                    let val = theta[g.class_power(c, t as i64)];
                    let root = mod_pow(z_o, (p - 1 - (t * l) % (p - 1)) % (p - 1), p);
                    acc = (acc + val * root) % p;
                }
                let m = acc * inv_o % p;
                if m > d {
                    return Err(fail("eigenvalue multiplicity out of range"));
                }
                if m > 0 {
                    terms.push(((l * step) as i64, int(m as i64)));
                }
            }
            row.push(Cyclotomic::from_terms(exp as u32, &terms));
        }
        rows.push((d as usize, row));
    }
    // trivial row first, then by dimension and value sequence
    let key = |(d, row): &(usize, Vec<Cyclotomic>)| {
        let trivial = row.iter().all(|v| v.is_one());
        (!trivial, *d, row.iter().map(|v| v.key_in(exp as u32)).collect::<Vec<_>>())
    };
    rows.sort_by_key(key);
    CharacterTable::new(group.clone(), rows.into_iter().map(|(_, r)| r).collect())
        .map_err(|e| CharError::TableComputationFailed(e.to_string()))
}

// ---------------------------------------------------------------------------
// Frobenius counting

/// `Ω^G_{g,n}(γ) = |X^G_{g,n}(γ)| / |G|` from the character formula.
pub fn omega(table: &CharacterTable, g: u32, classes: &[usize]) -> Result<Rational, CharError> {
    let grp = table.group();
    for &c in classes {
        if c >= grp.num_classes() {
            return Err(CharError::IndexOutOfRange(c));
        }
    }
    let order = int(grp.order() as i64);
    let mut sum = Cyclotomic::zero();
    for r in 0..table.num_irreps() {
        let dim = int(table.dim(r) as i64);
        let mut term = Cyclotomic::one();
        for &c in classes {
            term = term.mul(&table.value(r, c).scale(&(int(grp.class_size(c) as i64) / &dim)));
        }
        let e = 2 - 2 * g as i32;
        term = term.scale(&pow_i(&dim, e));
        sum += &term;
    }
    let x = sum.to_rational().ok_or(CharError::NonRationalResult)?;
    let count = x * pow_i(&order, 2 * g as i32 - 1);
    if count.is_negative() {
        return Err(CharError::NonRationalResult);
    }
    Ok(count / order)
}

fn pow_i(x: &Rational, e: i32) -> Rational {
    if e >= 0 {
        x.pow(e)
    } else {
        x.recip().pow(-e)
    }
}

pub const DEFAULT_BUDGET: u128 = 100_000_000;

/// `Ω` by direct enumeration of `(α, β, σ)` tuples.
///
/// The commutator products `∏[α_i, β_i]` are tallied first, then every
/// `σ`-tuple is enumerated and matched against the tally.
pub fn omega_bruteforce(group: &FiniteGroup, g: u32, classes: &[usize], budget: u128) -> Result<Rational, CharError> {
    let n = group.order();
    for &c in classes {
        if c >= group.num_classes() {
            return Err(CharError::IndexOutOfRange(c));
        }
    }
    let needed = (n as u128).saturating_pow(2 * g + classes.len() as u32);
    if needed > budget {
        return Err(CharError::BudgetExceeded { needed, budget });
    }
    let comm = |a: usize, b: usize| group.mul(group.mul(a, b), group.mul(group.inv(a), group.inv(b)));
    let mut tally = vec![0u128; n];
    tally[0] = 1;
    for _ in 0..g {
        let mut next = vec![0u128; n];
        for (x, &cnt) in tally.iter().enumerate() {
            if cnt == 0 {
                continue;
            }
            for a in 0..n {
                for b in 0..n {
                    next[group.mul(x, comm(a, b))] += cnt;
                }
            }
        }
        tally = next;
    }
    let mut count = 0u128;
    let mut idx = vec![0usize; classes.len()];
    loop {
        let prod = idx.iter().zip(classes).fold(0, |acc, (&i, &c)| group.mul(acc, group.class(c)[i]));
        count += tally[prod];
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return Ok(Rational::new(BigInt::from(count), BigInt::from(n)));
            }
            idx[pos] += 1;
            if idx[pos] < group.class_size(classes[pos]) {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Insertion label of a BG correlator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BgLabel {
    /// `1_h` for the class index.
    Class(usize),
    /// `φ_γ` for the irrep index.
    Phi(usize),
}

/// `⟨τ_{a₁}(x₁)…τ_{a_n}(x_n)⟩_g` on BG.
///
/// Pure-φ and pure-class insertions give rationals; mixed insertions are
/// expanded in the φ basis and may carry cyclotomic values.
pub fn bg_correlator(table: &CharacterTable, g: u32, insertions: &[(BgLabel, u32)]) -> Result<Cyclotomic, CharError> {
    let exps: Vec<u32> = insertions.iter().map(|&(_, a)| a).collect();
    let psi = psi_integral(g, &exps)?;
    if psi.is_zero() {
        return Ok(Cyclotomic::zero());
    }
    for &(l, _) in insertions {
        match l {
            BgLabel::Class(c) if c >= table.group().num_classes() => return Err(CharError::IndexOutOfRange(c)),
            BgLabel::Phi(r) if r >= table.num_irreps() => return Err(CharError::IndexOutOfRange(r)),
            _ => {}
        }
    }
    if insertions.iter().all(|(l, _)| matches!(l, BgLabel::Class(_))) {
        let classes: Vec<usize> =
            insertions.iter().map(|(l, _)| if let BgLabel::Class(c) = l { *c } else { unreachable!() }).collect();
        return Ok(Cyclotomic::from_rational(omega(table, g, &classes)? * psi));
    }
    let mut total = Cyclotomic::zero();
    for r in 0..table.num_irreps() {
        let mut coef = Cyclotomic::one();
        for &(l, _) in insertions {
            match l {
                BgLabel::Phi(s) if s != r => {
                    coef = Cyclotomic::zero();
                    break;
                }
                BgLabel::Phi(_) => {}
                BgLabel::Class(c) => coef = coef.mul(&table.class_in_phi(c, r)),
            }
        }
        if coef.is_zero() {
            continue;
        }
        let nu_pow = pow_i(table.nu(r), 1 - g as i32);
        total += &coef.scale(&(nu_pow * &psi));
    }
    Ok(total)
}
