//! The type-D example: `G` binary dihedral of order `4n` acting on `ℂ³`
//! through its faithful 2-dimensional irrep plus the trivial one.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::algebra::{bernoulli_poly, format_rational, Cyclotomic, EqScalar, Rational};
use crate::chars::character_table;
use crate::chen_ruan::{RepSpec, Target};
use crate::error::{Error, GroupError};
use crate::group::FiniteGroup;
use crate::rmatrix::{a_action_on_classes, r_matrix};

#[derive(Clone, Debug, Serialize)]
pub struct TypeDClass {
    /// `a^r` or `ba^r`.
    pub label: String,
    pub size: usize,
    /// `A_t^1` and `A_t^2` coefficients on `1_h`, `t = 1..`.
    pub a1: Vec<String>,
    pub a2: Vec<String>,
    pub expected_a1: Vec<String>,
    pub expected_a2: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TypeDReport {
    pub n: usize,
    pub rep: Vec<usize>,
    pub classes: Vec<TypeDClass>,
    /// `R(z)^α_β` coefficients in the φ basis, `[α][β][k]`.
    pub r_matrix: Vec<Vec<Vec<EqScalar>>>,
    pub matches: bool,
}

fn frac(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p.rem_euclid(q)), BigInt::from(q))
}

/// `A_t` actions for `t ≤ t_max` and R to `z^order`, with the closed forms
/// `B_t(r/2n) + B_t(−r/2n)` (fractional parts) on `1_{a^r}`, `B_t(1/4) + B_t(3/4)`
/// on `1_{ba^r}` and `B_t(0)` for the trivial summand.
pub fn type_d_example(n: usize, t_max: u32, order: usize) -> Result<TypeDReport, Error> {
    if n < 2 {
        return Err(GroupError::ParameterOutOfRange { family: "binary_dihedral".into(), n: n as i64 }.into());
    }
    let group = Arc::new(FiniteGroup::builtin("binary_dihedral", n as i64)?);
    let table = character_table(group.clone())?;
    let m = 2 * n as i64;
    let want = Cyclotomic::zeta(m as u32, 1).add(&Cyclotomic::zeta(m as u32, -1));
    let a_class = group.class_of(1);
    let faithful = (0..table.num_irreps())
        .find(|&r| table.dim(r) == 2 && *table.value(r, a_class) == want)
        .expect("binary dihedral groups have a faithful 2-dimensional irrep");
    let rep = vec![faithful, 0];
    let target = Target::new(Arc::new(table), RepSpec::new(rep.clone()))?;
    let a1: Vec<Vec<Rational>> = (1..=t_max).map(|t| a_action_on_classes(&target, 0, t)).collect();
    let a2: Vec<Vec<Rational>> = (1..=t_max).map(|t| a_action_on_classes(&target, 1, t)).collect();
    let mut matches = true;
    let mut classes = Vec::new();
    for c in 0..group.num_classes() {
        let h = group.class_rep(c) as i64;
        let (label, expected): (String, Vec<Rational>) = if h < m {
            (
                format!("a^{h}"),
                (1..=t_max).map(|t| bernoulli_poly(t, &frac(h, m)) + bernoulli_poly(t, &frac(-h, m))).collect(),
            )
        } else {
            (
                format!("ba^{}", h - m),
                (1..=t_max).map(|t| bernoulli_poly(t, &frac(1, 4)) + bernoulli_poly(t, &frac(3, 4))).collect(),
            )
        };
        let expected2: Vec<Rational> = (1..=t_max).map(|t| bernoulli_poly(t, &Rational::zero())).collect();
        let got1: Vec<Rational> = a1.iter().map(|row| row[c].clone()).collect();
        let got2: Vec<Rational> = a2.iter().map(|row| row[c].clone()).collect();
        matches &= got1 == expected && got2 == expected2;
        let fmt = |v: &[Rational]| v.iter().map(format_rational).collect::<Vec<_>>();
        classes.push(TypeDClass {
            label,
            size: group.class_size(c),
            a1: fmt(&got1),
            a2: fmt(&got2),
            expected_a1: fmt(&expected),
            expected_a2: fmt(&expected2),
        });
    }
    let r = r_matrix(&target, order)?;
    let k = target.num_irreps();
    let r_entries = (0..k).map(|a| (0..k).map(|b| r.entry(a, b).coeffs().to_vec()).collect()).collect();
    Ok(TypeDReport { n, rep, classes, r_matrix: r_entries, matches })
}
