//! ψ-class intersection numbers on `M̄_{g,n}` by the DVV recursion.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_traits::Zero;

use crate::algebra::rational::{double_factorial_odd, int, rat, Rational};
use crate::error::PsiError;

type Key = (u32, Vec<u32>);

fn memo() -> &'static RwLock<HashMap<Key, Rational>> {
    static MEMO: OnceLock<RwLock<HashMap<Key, Rational>>> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(HashMap::new()))
}

/// `∫_{M̄_{g,n}} ψ₁^{a₁}…ψ_n^{a_n}`, zero off the dimension `3g−3+n`.
pub fn psi_integral(g: u32, exponents: &[u32]) -> Result<Rational, PsiError> {
    let n = exponents.len();
    let excess = 2 * g as i64 - 2 + n as i64;
    if excess <= 0 {
        return Err(PsiError::UnstableInput { g, n, excess });
    }
    let mut key = exponents.to_vec();
    key.sort_unstable();
    Ok(eval(g, key))
}

fn dfact(n: i64) -> Rational {
    Rational::from_integer(double_factorial_odd(n))
}

fn eval(g: u32, key: Vec<u32>) -> Rational {
    let n = key.len() as i64;
    if 2 * g as i64 - 2 + n <= 0 {
        return Rational::zero();
    }
    let dim = 3 * g as i64 - 3 + n;
    if key.iter().map(|&a| a as i64).sum::<i64>() != dim {
        return Rational::zero();
    }
    if g == 0 && key == [0, 0, 0] {
        return int(1);
    }
    if g == 1 && key == [1] {
        return rat(1, 24);
    }
    if let Some(v) = memo().read().unwrap().get(&(g, key.clone())) {
        return v.clone();
    }
    let v = compute(g, &key);
    memo().write().unwrap().insert((g, key), v.clone());
    v
}

fn sorted(mut v: Vec<u32>) -> Vec<u32> {
    v.sort_unstable();
    v
}

fn compute(g: u32, key: &[u32]) -> Rational {
    if key[0] == 0 {
        // string equation
        let rest = &key[1..];
        let mut acc = Rational::zero();
        for j in 0..rest.len() {
            if rest[j] == 0 || (j > 0 && rest[j] == rest[j - 1]) {
                continue;
            }
            let mult = rest.iter().filter(|&&x| x == rest[j]).count() as i64;
            let mut v = rest.to_vec();
            v[j] -= 1;
            acc += eval(g, sorted(v)) * int(mult);
        }
        return acc;
    }
    if key[0] == 1 {
        // dilaton equation
        let rest = key[1..].to_vec();
        return eval(g, rest) * int(2 * g as i64 - 2 + key.len() as i64 - 1);
    }
    // DVV on the largest exponent a = k + 1
    let a = *key.last().unwrap();
    let k = a as i64 - 1;
    let s: Vec<u32> = key[..key.len() - 1].to_vec();
    let mut acc = Rational::zero();
    for j in 0..s.len() {
        let d = s[j] as i64;
        let mut v: Vec<u32> = s.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &x)| x).collect();
        v.push((k + d) as u32);
        acc += dfact(2 * k + 2 * d + 1) / dfact(2 * d - 1) * eval(g, sorted(v));
    }
    let half = rat(1, 2);
    for r in 0..k {
        let t = k - 1 - r;
        let c = dfact(2 * r + 1) * dfact(2 * t + 1) * &half;
        if g >= 1 {
            let mut v = s.clone();
            v.push(r as u32);
            v.push(t as u32);
            acc += &c * eval(g - 1, sorted(v));
        }
        // splits of s into I ⊔ J, labeled by subset masks
        let m = s.len();
        for mask in 0u64..(1u64 << m) {
            let (mut i_part, mut j_part) = (vec![r as u32], vec![t as u32]);
            for (idx, &x) in s.iter().enumerate() {
                if mask >> idx & 1 == 1 {
                    i_part.push(x);
                } else {
                    j_part.push(x);
                }
            }
            for g1 in 0..=g {
                let left = eval(g1, sorted(i_part.clone()));
                if left.is_zero() {
                    continue;
                }
                let right = eval(g - g1, sorted(j_part.clone()));
                acc += &c * left * right;
            }
        }
    }
    acc / dfact(2 * k + 3)
}
