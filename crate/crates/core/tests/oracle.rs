use std::sync::Arc;

use orbigw::algebra::{rat, Monomial, Poly, UVars};
use orbigw::oracle::{
    apply_quantized, bg_log_potential, bg_potential, OutputWindow, QuadraticSign, QuantizedOperator, Truncation,
    DEFAULT_BUDGET,
};
use orbigw::{character_table, Cyclotomic, EqScalar, FiniteGroup, Rational, RepSpec, Target};

fn target(family: &str, n: i64, rep: Vec<usize>) -> Target {
    let t = character_table(Arc::new(FiniteGroup::builtin(family, n).unwrap())).unwrap();
    Target::new(Arc::new(t), RepSpec::new(rep)).unwrap()
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn linear_part_is_a_binomial_shift() {
    let x = target("cyclic", 1, vec![0]);
    let vars = UVars::new(1, 4);
    let t = 2;
    let mut op = QuantizedOperator::new(&x, t, QuadraticSign::Verbatim).restricted_to(t as usize - 1);
    assert_eq!(op.pieces[0].t, t);
    let c = rat(3, 7);
    op.pieces[0].e = vec![vec![Cyclotomic::one()]];
    op.pieces[0].coeff = EqScalar::rational(1, c.clone());
    let k = 4u64;
    let u = |a: u32| Poly::var(1, vars.index(0, a));
    let mut p = Poly::constant(EqScalar::one(1));
    for _ in 0..k {
        p = p.mul(&u(t + 1));
    }
    let mut term = p.clone();
    let mut total = p;
    for j in 1..=k + 1 {
        term = op.apply(&vars, &term).scale_rational(&rat(1, j as i64));
        total.add_assign(&term);
    }
    assert!(term.is_zero());
    // exp(c(1 − u₁)∂_{u₃}) u₃^k = (u₃ + c(1 − u₁))^k
    let shift = Poly::constant(EqScalar::rational(1, c.clone())).sub(&u(1).scale_rational(&c));
    let mut want = Poly::zero(1);
    for j in 0..=k {
        let mut m = Poly::constant(EqScalar::rational(1, Rational::from_integer(binomial(k, j).into())));
        for _ in 0..k - j {
            m = m.mul(&u(t + 1));
        }
        for _ in 0..j {
            m = m.mul(&shift);
        }
        want.add_assign(&m);
    }
    assert_eq!(total, want);
}

#[test]
fn bg_log_potential_examples() {
    let x = target("cyclic", 3, vec![1]);
    let vars = UVars::new(3, 2);
    let trunc = Truncation { max_degree: 3, max_height: 2, max_chi: 3 };
    let f = bg_log_potential(&x, trunc, DEFAULT_BUDGET).unwrap().poly;
    for gamma in 0..3 {
        let v = vars.index(gamma, 0);
        assert_eq!(f.coeff(&Monomial::new(-1, vec![v, v, v])), EqScalar::rational(1, x.table().nu(gamma) * rat(1, 6)));
        assert_eq!(f.coeff(&Monomial::new(0, vec![vars.index(gamma, 1)])), EqScalar::rational(1, rat(1, 24)));
    }
    let (a, b) = (vars.index(0, 0), vars.index(1, 0));
    assert!(f.coeff(&Monomial::new(-1, vec![a, a, b])).is_zero());
    assert!(f.coeff(&Monomial::new(-1, vec![a, b, vars.index(2, 0)])).is_zero());
}

#[test]
fn quantization_commutes_with_restriction() {
    let x = target("cyclic", 2, vec![1, 0]);
    let big = OutputWindow { trunc: Truncation { max_degree: 2, max_height: 3, max_chi: 2 }, lowering: 2 };
    let small = OutputWindow { trunc: Truncation { max_degree: 1, max_height: 2, max_chi: 1 }, lowering: 2 };
    let op = QuantizedOperator::new(&x, 2, QuadraticSign::Verbatim);
    let vars = UVars::new(2, big.trunc.required_input(big.lowering).max_height);
    let input = bg_potential(&x, big.trunc.required_input(big.lowering), DEFAULT_BUDGET).unwrap();
    assert_eq!(input.vars, vars);
    let out_big = apply_quantized(&op, &input, &big, DEFAULT_BUDGET).unwrap();
    let out_small = apply_quantized(&op, &input, &small, DEFAULT_BUDGET).unwrap();
    let mut restricted = out_big.poly.clone();
    restricted.retain(|m| small.trunc.admits(&vars, m));
    assert_eq!(restricted, out_small.poly);
    assert!(!out_small.poly.is_zero());
}
