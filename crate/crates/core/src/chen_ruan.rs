//! Chen–Ruan data of BG and of `[ℂʳ/G]`: ages, Euler factors, pairings and
//! cup products in the four bases `1_h`, `φ_γ`, `1̄_h`, `φ̄_γ`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{int, Cyclotomic, EqScalar, Exponent, Rational};
use crate::chars::CharacterTable;
use crate::error::ChenRuanError;

/// `ρ = ρ₁ ⊕ … ⊕ ρ_m` as a list of irrep indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepSpec {
    pub summands: Vec<usize>,
}

impl RepSpec {
    pub fn new(summands: Vec<usize>) -> Self {
        RepSpec { summands }
    }

    /// Parses `"i,j,…"`.
    pub fn parse(s: &str) -> Result<Self, ChenRuanError> {
        let summands = s
            .split(',')
            .map(|x| x.trim().parse::<usize>().map_err(|_| ChenRuanError::InvalidRep(format!("bad summand `{x}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RepSpec { summands })
    }
}

/// Eigenvalue multiplicities of one summand at one class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenProfile {
    /// `D(l)` = multiplicity of `exp(2πi l/o(h))`, for `l < o(h)`.
    pub mult: Vec<u32>,
    pub age: Exponent,
}

impl EigenProfile {
    pub fn order(&self) -> usize {
        self.mult.len()
    }
}

/// `D(l) = (1/o) Σ_k χ(h^k) ζ_o^{−kl}` for the irrep `irrep` at class `class`.
pub fn eigen_profile(table: &CharacterTable, irrep: usize, class: usize) -> Result<EigenProfile, ChenRuanError> {
    let g = table.group();
    let o = g.class_element_order(class);
    let mut mult = Vec::with_capacity(o);
    let mut age = Exponent::zero();
    for l in 0..o {
        let mut s = Cyclotomic::zero();
        for k in 0..o {
            let chi = table.value(irrep, g.class_power(class, k as i64));
            s += &chi.mul(&Cyclotomic::zeta(o as u32, -((k * l) as i64)));
        }
        let d = s
            .to_rational()
            .map(|q| q / int(o as i64))
            .filter(|q| q.is_integer() && !q.is_negative())
            .and_then(|q| q.to_integer().to_u32())
            .ok_or(ChenRuanError::NonIntegerMultiplicity { summand: irrep, class, l: l as u32 })?;
        age += Exponent::new((l as i64) * d as i64, o as i64);
        mult.push(d);
    }
    Ok(EigenProfile { mult, age })
}

/// Cohomology basis of BG or `[ℂʳ/G]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    Class,
    Phi,
    Classbar,
    Phibar,
}

impl Basis {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "class" => Some(Basis::Class),
            "phi" => Some(Basis::Phi),
            "classbar" => Some(Basis::Classbar),
            "phibar" => Some(Basis::Phibar),
            _ => None,
        }
    }
}

/// BG pairing: `⟨1_h, 1_{h'}⟩ = δ_{h⁻¹,h'}/|C(h)|`, `⟨φ_α, φ_β⟩ = ν_α δ`.
pub fn pairing_bg(table: &CharacterTable, basis: Basis, x: usize, y: usize) -> Rational {
    let g = table.group();
    match basis {
        Basis::Class | Basis::Classbar => {
            if g.class_inverse(x) == y {
                Rational::new(1.into(), BigInt::from(g.class_centralizer(x)))
            } else {
                Rational::zero()
            }
        }
        Basis::Phi | Basis::Phibar => {
            if x == y {
                table.nu(x).clone()
            } else {
                Rational::zero()
            }
        }
    }
}

/// BG product in the class basis, as coordinates over classes.
pub fn cup_bg_classes(table: &CharacterTable, x: usize, y: usize) -> Vec<Rational> {
    let g = table.group();
    let mut out = vec![Rational::zero(); g.num_classes()];
    for &a in g.class(x) {
        for &b in g.class(y) {
            let ab = g.mul(a, b);
            out[g.class_of(ab)] += Rational::new(BigInt::from(g.centralizer_order(ab)), BigInt::from(g.order()));
        }
    }
    out
}

/// The target `[ℂʳ/G]` for a group with character table and a representation.
#[derive(Clone, Debug)]
pub struct Target {
    table: Arc<CharacterTable>,
    rep: RepSpec,
    profiles: Vec<Vec<EigenProfile>>,
}

impl Target {
    pub fn new(table: Arc<CharacterTable>, rep: RepSpec) -> Result<Self, ChenRuanError> {
        if rep.summands.is_empty() {
            return Err(ChenRuanError::InvalidRep("no summands".into()));
        }
        if let Some(&bad) = rep.summands.iter().find(|&&s| s >= table.num_irreps()) {
            return Err(ChenRuanError::InvalidRep(format!("irrep index {bad} out of range")));
        }
        let k = table.group().num_classes();
        let profiles = rep
            .summands
            .iter()
            .map(|&r| (0..k).map(|c| eigen_profile(&table, r, c)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Target { table, rep, profiles })
    }

    pub fn table(&self) -> &CharacterTable {
        &self.table
    }

    pub fn table_arc(&self) -> &Arc<CharacterTable> {
        &self.table
    }

    pub fn rep(&self) -> &RepSpec {
        &self.rep
    }

    /// Number of equivariant parameters `m`.
    pub fn nvars(&self) -> usize {
        self.rep.summands.len()
    }

    pub fn num_classes(&self) -> usize {
        self.table.group().num_classes()
    }

    pub fn num_irreps(&self) -> usize {
        self.table.num_irreps()
    }

    pub fn summand_dim(&self, i: usize) -> usize {
        self.table.dim(self.rep.summands[i])
    }

    pub fn profile(&self, i: usize, class: usize) -> &EigenProfile {
        &self.profiles[i][class]
    }

    pub fn age(&self, i: usize, class: usize) -> Exponent {
        self.profiles[i][class].age
    }

    pub fn ages(&self, class: usize) -> Vec<Exponent> {
        (0..self.nvars()).map(|i| self.age(i, class)).collect()
    }

    pub fn total_age(&self, class: usize) -> Exponent {
        self.ages(class).into_iter().sum()
    }

    /// `dim (ℂʳ)^h`.
    pub fn fixed_dim(&self, class: usize) -> u32 {
        (0..self.nvars()).map(|i| self.profiles[i][class].mult[0]).sum()
    }

    /// `e_h = ∏ w_i^{D_i^h(0)}`.
    pub fn euler_factor(&self, class: usize) -> EqScalar {
        let exps = (0..self.nvars()).map(|i| Exponent::from_integer(self.profiles[i][class].mult[0] as i64)).collect();
        EqScalar::monomial(self.nvars(), exps, Cyclotomic::one())
    }

    pub fn e1(&self) -> EqScalar {
        self.euler_factor(0)
    }

    /// `∏ w_i^{age_i(h)}`, the factor with `1_h = w^{age} 1̄_h`.
    pub fn w_age(&self, class: usize) -> EqScalar {
        EqScalar::monomial(self.nvars(), self.ages(class), Cyclotomic::one())
    }

    /// `ν̄_γ = ν_γ / e₁`.
    pub fn nubar(&self, irrep: usize) -> EqScalar {
        EqScalar::rational(self.nvars(), self.table.nu(irrep).clone()).div(&self.e1()).expect("e1 is a monomial")
    }

    /// `rank F^{ρ_i}_{g,n} = (1−g) r_i − Σ_j age_i(h_j)` per summand.
    pub fn rank(&self, g: u32, classes: &[usize]) -> Vec<Exponent> {
        (0..self.nvars())
            .map(|i| {
                let base = Exponent::from_integer((1 - g as i64) * self.summand_dim(i) as i64);
                classes.iter().fold(base, |acc, &c| acc - self.age(i, c))
            })
            .collect()
    }

    fn scalar(&self, c: Cyclotomic) -> EqScalar {
        EqScalar::constant(self.nvars(), c)
    }

    /// Coordinates of a basis element in the unbarred class basis `1_h`.
    pub fn to_class_coords(&self, basis: Basis, label: usize) -> Vec<EqScalar> {
        let k = self.num_classes();
        let mut out = vec![EqScalar::zero(self.nvars()); k];
        match basis {
            Basis::Class => out[label] = EqScalar::one(self.nvars()),
            Basis::Classbar => out[label] = EqScalar::one(self.nvars()).div(&self.w_age(label)).unwrap(),
            Basis::Phi => {
                for (c, slot) in out.iter_mut().enumerate() {
                    *slot = self.scalar(self.table.phi_in_class(label, c));
                }
            }
            Basis::Phibar => {
                for (c, slot) in out.iter_mut().enumerate() {
                    *slot = self.scalar(self.table.phi_in_class(label, c)).div(&self.w_age(c)).unwrap();
                }
            }
        }
        out
    }

    /// Rewrites class-basis coordinates in `basis`.
    pub fn from_class_coords(&self, basis: Basis, x: &[EqScalar]) -> Vec<EqScalar> {
        let bar: Vec<EqScalar> = match basis {
            Basis::Classbar | Basis::Phibar => x.iter().enumerate().map(|(c, v)| v.mul(&self.w_age(c))).collect(),
            _ => x.to_vec(),
        };
        match basis {
            Basis::Class | Basis::Classbar => bar,
            Basis::Phi | Basis::Phibar => (0..self.num_irreps())
                .map(|r| {
                    let mut s = EqScalar::zero(self.nvars());
                    for (c, v) in bar.iter().enumerate() {
                        s.add_scaled(v, &self.table.class_in_phi(c, r));
                    }
                    s
                })
                .collect(),
        }
    }

    /// Equivariant pairing `⟨1_h, 1_{h'}⟩ = δ_{h⁻¹,h'} / (|C(h)| e_h)` extended bilinearly.
    pub fn pairing(&self, basis: Basis, x: usize, y: usize) -> EqScalar {
        let g = self.table.group();
        let xs = self.to_class_coords(basis, x);
        let ys = self.to_class_coords(basis, y);
        let mut out = EqScalar::zero(self.nvars());
        for c in 0..self.num_classes() {
            let d = g.class_inverse(c);
            if xs[c].is_zero() || ys[d].is_zero() {
                continue;
            }
            let w = xs[c]
                .mul(&ys[d])
                .div(&self.euler_factor(c))
                .unwrap()
                .scale_rational(&Rational::new(1.into(), BigInt::from(g.class_centralizer(c))));
            out.add_assign(&w);
        }
        out
    }

    /// The non-equivariant pairing, nonzero only on isolated sectors.
    pub fn pairing_nonequivariant(&self, x: usize, y: usize) -> Rational {
        if self.fixed_dim(x) != 0 {
            return Rational::zero();
        }
        pairing_bg(&self.table, Basis::Class, x, y)
    }

    /// `1_h ⋆ 1_{h'} = Σ_{g∈[h], g'∈[h']} |C(gg')| w^{age(g)+age(g')−age(gg')} / |G| · 1_{gg'}`.
    pub fn cup_classes(&self, x: usize, y: usize) -> Vec<EqScalar> {
        let g = self.table.group();
        let mut out = vec![EqScalar::zero(self.nvars()); self.num_classes()];
        for &a in g.class(x) {
            for &b in g.class(y) {
                let ab = g.mul(a, b);
                let t = g.class_of(ab);
                let exps: Vec<Exponent> =
                    (0..self.nvars()).map(|i| self.age(i, x) + self.age(i, y) - self.age(i, t)).collect();
                let coeff = Rational::new(BigInt::from(g.centralizer_order(ab)), BigInt::from(g.order()));
                out[t].add_assign(&EqScalar::monomial(self.nvars(), exps, Cyclotomic::from_rational(coeff)));
            }
        }
        out
    }

    /// Product of two basis elements, expressed in the same basis.
    pub fn cup_product(&self, basis: Basis, x: usize, y: usize) -> Vec<EqScalar> {
        let xs = self.to_class_coords(basis, x);
        let ys = self.to_class_coords(basis, y);
        let mut prod = vec![EqScalar::zero(self.nvars()); self.num_classes()];
        for (a, xa) in xs.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, yb) in ys.iter().enumerate() {
                if yb.is_zero() {
                    continue;
                }
                let f = xa.mul(yb);
                for (t, v) in self.cup_classes(a, b).iter().enumerate() {
                    if !v.is_zero() {
                        prod[t].add_assign(&v.mul(&f));
                    }
                }
            }
        }
        self.from_class_coords(basis, &prod)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use crate::chars::character_table;
    use crate::group::FiniteGroup;

    fn target(f: &str, n: i64, rep: Vec<usize>) -> Target {
        let t = character_table(Arc::new(FiniteGroup::builtin(f, n).unwrap())).unwrap();
        Target::new(Arc::new(t), RepSpec::new(rep)).unwrap()
    }

    #[test]
    fn profiles() {
        let x = target("cyclic", 3, vec![0, 1]);
        for c in 0..3 {
            assert_eq!(x.profile(0, c).mult[0], 1);
            assert_eq!(x.age(0, c), Exponent::zero());
        }
        // the generator is element 1 and class 1
        let p = x.profile(1, 1);
        assert_eq!(p.mult.iter().sum::<u32>(), 1);
        assert_eq!(p.mult[0], 0);
        assert!(x.age(1, 1) == Exponent::new(1, 3) || x.age(1, 1) == Exponent::new(2, 3));
        assert_eq!(x.age(1, 1) + x.age(1, 2), Exponent::from_integer(1));
    }

    #[test]
    fn binary_dihedral_b() {
        let t = character_table(Arc::new(FiniteGroup::builtin("binary_dihedral", 2).unwrap())).unwrap();
        let two = (0..t.num_irreps()).find(|&r| t.dim(r) == 2).unwrap();
        let b = t.group().class_of(4);
        let p = eigen_profile(&t, two, b).unwrap();
        assert_eq!(p.mult, vec![0, 1, 0, 1]);
        assert_eq!(p.age, Exponent::from_integer(1));
    }

    #[test]
    fn euler_factors() {
        let x = target("cyclic", 3, vec![1]);
        assert_eq!(x.e1(), EqScalar::var_power(1, 0, Exponent::from_integer(1)));
        assert_eq!(x.euler_factor(1), EqScalar::one(1));
        let x = target("cyclic", 1, vec![0]);
        assert_eq!(x.e1(), EqScalar::var_power(1, 0, Exponent::from_integer(1)));
    }

    #[test]
    fn pairings() {
        let x = target("cyclic", 2, vec![1]);
        assert_eq!(pairing_bg(x.table(), Basis::Class, 1, 1), rat(1, 2));
        let w_inv = EqScalar::var_power(1, 0, Exponent::from_integer(-1));
        assert_eq!(x.pairing(Basis::Classbar, 1, 1), w_inv.scale_rational(&rat(1, 2)));
        assert!(x.pairing(Basis::Phibar, 0, 1).is_zero());
        assert_eq!(x.pairing(Basis::Phibar, 1, 1), x.nubar(1));
        assert_eq!(x.pairing_nonequivariant(1, 1), rat(1, 2));
        assert!(x.pairing_nonequivariant(0, 0).is_zero());
    }

    #[test]
    fn products() {
        let x = target("cyclic", 2, vec![1]);
        let p = x.cup_product(Basis::Class, 1, 1);
        assert_eq!(p[0], EqScalar::var_power(1, 0, Exponent::from_integer(1)));
        assert!(p[1].is_zero());
        let s3 = target("symmetric", 3, vec![2, 1]);
        for c in 0..3 {
            let p = s3.cup_product(Basis::Class, 0, c);
            for (t, v) in p.iter().enumerate() {
                assert_eq!(*v, if t == c { EqScalar::one(2) } else { EqScalar::zero(2) });
            }
        }
        for a in 0..3 {
            for b in 0..3 {
                let p = s3.cup_product(Basis::Phibar, a, b);
                for (t, v) in p.iter().enumerate() {
                    let want = if a == b && t == a { EqScalar::one(2) } else { EqScalar::zero(2) };
                    assert_eq!(*v, want);
                }
            }
        }
    }
}
