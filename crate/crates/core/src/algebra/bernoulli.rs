//! Bernoulli numbers and polynomials with `B_1(x) = x − 1/2`.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_traits::{One, Zero};

use super::rational::{binomial, Rational};

fn numbers() -> &'static RwLock<Vec<Rational>> {
    static CACHE: OnceLock<RwLock<Vec<Rational>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(vec![Rational::one()]))
}

fn values() -> &'static RwLock<HashMap<(u32, Rational), Rational>> {
    static CACHE: OnceLock<RwLock<HashMap<(u32, Rational), Rational>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Bernoulli number `B_n = B_n(0)`.
pub fn bernoulli_number(n: u32) -> Rational {
    if let Some(b) = numbers().read().unwrap().get(n as usize) {
        return b.clone();
    }
    let mut cache = numbers().write().unwrap();
    // Σ_{k=0}^{m} C(m+1, k) B_k = 0
    while cache.len() <= n as usize {
        let m = cache.len() as u32;
        let mut acc = Rational::zero();
        for (k, b) in cache.iter().enumerate() {
            acc += b * Rational::from_integer(binomial(m + 1, k as u32));
        }
        cache.push(-acc / Rational::from_integer((m + 1).into()));
    }
    cache[n as usize].clone()
}

/// `B_t(x) = Σ_k C(t,k) B_k x^{t−k}`.
pub fn bernoulli_poly(t: u32, x: &Rational) -> Rational {
    let key = (t, x.clone());
    if let Some(v) = values().read().unwrap().get(&key) {
        return v.clone();
    }
    let mut acc = Rational::zero();
    let mut xp = Rational::one();
    for j in 0..=t {
        // term with x^j uses B_{t-j}
        acc += Rational::from_integer(binomial(t, j)) * bernoulli_number(t - j) * &xp;
        xp *= x;
    }
    values().write().unwrap().insert(key, acc.clone());
    acc
}
