use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use proptest::test_runner::RngSeed;

use orbigw::algebra::{int, rat, Monomial, Poly};
use orbigw::chars::{omega, omega_bruteforce, DEFAULT_BUDGET};
use orbigw::{
    character_table, correlator_x, psi_integral, r_matrix, Basis, CharacterTable, Cyclotomic, EqScalar, Exponent,
    FiniteGroup, Insertion, RMatrix, Rational, RepSpec, Series, Series2, Target,
};

fn cyclotomic() -> impl Strategy<Value = Cyclotomic> {
    (prop::sample::select(vec![1u32, 2, 3, 4, 5, 6, 8, 12]), prop::collection::vec((0i64..12, -6i64..7, 1i64..5), 0..4))
        .prop_map(|(n, terms)| {
            let t: Vec<(i64, Rational)> = terms.into_iter().map(|(k, p, q)| (k, rat(p, q))).collect();
            Cyclotomic::from_terms(n, &t)
        })
}

fn scalar(nvars: usize) -> impl Strategy<Value = EqScalar> {
    prop::collection::vec((prop::collection::vec(-3i64..4, nvars), -5i64..6, 1i64..4), 0..4).prop_map(move |terms| {
        let mut s = EqScalar::zero(nvars);
        for (e, p, q) in terms {
            let exps = e.into_iter().map(|x| Exponent::new(x, 2)).collect();
            s.add_assign(&EqScalar::monomial(nvars, exps, Cyclotomic::from_rational(rat(p, q))));
        }
        s
    })
}

fn monomial(nvars: usize) -> impl Strategy<Value = EqScalar> {
    (prop::collection::vec(-3i64..4, nvars), prop::sample::select(vec![-3i64, -1, 1, 2, 5]), 1i64..4).prop_map(
        move |(e, p, q)| {
            EqScalar::monomial(
                nvars,
                e.into_iter().map(Exponent::from_integer).collect(),
                Cyclotomic::from_rational(rat(p, q)),
            )
        },
    )
}

fn series(order: usize) -> impl Strategy<Value = Series> {
    prop::collection::vec(scalar(1), order).prop_map(move |c| {
        let mut coeffs = vec![EqScalar::zero(1)];
        coeffs.extend(c);
        Series::from_coeffs(1, order, coeffs)
    })
}

fn series2(order: usize) -> impl Strategy<Value = Series2> {
    prop::collection::vec(scalar(1), (order + 1) * (order + 1)).prop_map(move |c| {
        let mut s = Series2::zero(1, order);
        for a in 0..=order {
            for b in 0..=order {
                if a + b < order {
                    s.set_coeff(a, b, c[a * (order + 1) + b].clone());
                }
            }
        }
        s
    })
}

fn stable_key() -> impl Strategy<Value = (u32, Vec<u32>)> {
    (0u32..=3, 1usize..=5).prop_filter("stable", |&(g, n)| 2 * g as i64 - 2 + n as i64 > 0).prop_flat_map(|(g, n)| {
        let dim = 3 * g as usize + n - 3;
        (Just(g), prop::collection::vec(0..n, dim)).prop_map(move |(g, slots)| {
            let mut a = vec![0u32; n];
            for s in slots {
                a[s] += 1;
            }
            (g, a)
        })
    })
}

fn tables() -> &'static Vec<CharacterTable> {
    static T: OnceLock<Vec<CharacterTable>> = OnceLock::new();
    T.get_or_init(|| {
        [
            ("cyclic", 4),
            ("cyclic", 5),
            ("dihedral", 4),
            ("symmetric", 3),
            ("binary_dihedral", 2),
            ("binary_dihedral", 3),
        ]
        .into_iter()
        .map(|(f, n)| character_table(Arc::new(FiniteGroup::builtin(f, n).unwrap())).unwrap())
        .collect()
    })
}

fn s3_target() -> &'static (Target, RMatrix) {
    static T: OnceLock<(Target, RMatrix)> = OnceLock::new();
    T.get_or_init(|| {
        let t = character_table(Arc::new(FiniteGroup::builtin("symmetric", 3).unwrap())).unwrap();
        let x = Target::new(Arc::new(t), RepSpec::new(vec![2, 1])).unwrap();
        let r = r_matrix(&x, 5).unwrap();
        (x, r)
    })
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 128,
        rng_seed: RngSeed::Fixed(0x0b16_0001),
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn cyclotomic_ring_axioms(a in cyclotomic(), b in cyclotomic(), c in cyclotomic()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(a.sub(&a).is_zero());
        prop_assert_eq!(a.mul(&Cyclotomic::one()), a.clone());
        prop_assert_eq!(a.conj().conj(), a.clone());
        prop_assert_eq!(a.mul(&b).conj(), a.conj().mul(&b.conj()));
    }

    #[test]
    fn cyclotomic_inverse(a in cyclotomic()) {
        prop_assume!(!a.is_zero());
        prop_assert!(a.mul(&a.inverse().unwrap()).is_one());
    }

    #[test]
    fn cyclotomic_json_round_trip(a in cyclotomic()) {
        let s = serde_json::to_string(&a).unwrap();
        let back: Cyclotomic = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn roots_of_unity(n in 1u32..13, k in -20i64..20) {
        prop_assert!(Cyclotomic::zeta(n, k).pow(n).is_one());
        prop_assert_eq!(Cyclotomic::zeta(n, k).mul(&Cyclotomic::zeta(n, -k)), Cyclotomic::one());
    }

    #[test]
    fn scalar_ring_axioms(a in scalar(2), b in scalar(2), c in scalar(2)) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn scalar_monomial_division(a in scalar(2), m in monomial(2)) {
        prop_assert_eq!(a.mul(&m).div(&m).unwrap(), a.clone());
    }

    #[test]
    fn scalar_json_round_trip(a in scalar(2)) {
        prop_assume!(!a.is_zero());
        let back: EqScalar = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn series_exp_log_round_trip(s in series(4)) {
        let e = s.exp().unwrap();
        prop_assert_eq!(e.log().unwrap(), s.clone());
        prop_assert_eq!(s.negate_variable().negate_variable(), s);
    }

    #[test]
    fn series_exp_is_multiplicative(a in series(3), b in series(3)) {
        prop_assert_eq!(a.add(&b).exp().unwrap(), a.exp().unwrap().mul(&b.exp().unwrap()));
    }

    #[test]
    fn divide_by_z_plus_w_inverts_multiplication(q in series2(4)) {
        let p = q.mul_z_plus_w();
        let back = p.divide_by_z_plus_w().unwrap();
        for a in 0..=4 {
            for b in 0..=4 {
                if a + b < 4 {
                    prop_assert_eq!(back.coeff(a, b), q.coeff(a, b));
                }
            }
        }
    }

    #[test]
    fn poly_distributive(a in scalar(1), b in scalar(1), c in scalar(1), v in 0u16..4, w in 0u16..4) {
        let x = Poly::var(1, v).scale(&a).add(&Poly::constant(b));
        let y = Poly::var(1, w).scale(&c);
        let z = Poly::var(1, v).mul(&Poly::var(1, w));
        prop_assert_eq!(x.mul(&y.add(&z)), x.mul(&y).add(&x.mul(&z)));
        prop_assert_eq!(x.mul(&y), y.mul(&x));
        prop_assert_eq!(z.coeff(&Monomial::new(0, vec![v, w])), EqScalar::one(1));
    }

    #[test]
    fn string_and_dilaton_equations((g, a) in stable_key()) {
        let n = a.len();
        let mut string = Rational::from_integer(0.into());
        for j in 0..n {
            if a[j] > 0 {
                let mut b = a.clone();
                b[j] -= 1;
                string += psi_integral(g, &b).unwrap();
            }
        }
        prop_assert_eq!(psi_integral(g, &[a.clone(), vec![0]].concat()).unwrap(), string);
        let dilaton = psi_integral(g, &a).unwrap() * int(2 * g as i64 - 2 + n as i64);
        prop_assert_eq!(psi_integral(g, &[a.clone(), vec![1]].concat()).unwrap(), dilaton);
    }

    #[test]
    fn psi_is_symmetric((g, a) in stable_key(), rot in 0usize..6) {
        let mut b = a.clone();
        let k = rot % b.len();
        b.rotate_left(k);
        prop_assert_eq!(psi_integral(g, &a).unwrap(), psi_integral(g, &b).unwrap());
    }

    #[test]
    fn omega_matches_brute_force(t in 0usize..6, g in 0u32..3, raw in prop::collection::vec(0usize..16, 0..4)) {
        let table = &tables()[t];
        let classes: Vec<usize> = raw.iter().map(|c| c % table.group().num_classes()).collect();
        let a = omega(table, g, &classes).unwrap();
        let b = omega_bruteforce(table.group(), g, &classes, DEFAULT_BUDGET).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn class_phi_change_of_basis(t in 0usize..6, raw in prop::collection::vec((-4i64..5, 1i64..4), 16)) {
        let table = &tables()[t];
        let n = table.num_irreps();
        let x: Vec<Cyclotomic> = raw[..n].iter().map(|&(p, q)| Cyclotomic::from_rational(rat(p, q))).collect();
        prop_assert_eq!(table.phi_to_class(&table.class_to_phi(&x)), x.clone());
        prop_assert_eq!(table.class_to_phi(&table.phi_to_class(&x)), x);
    }

    #[test]
    fn correlators_are_symmetric_in_ordered_insertions(labels in prop::collection::vec((0usize..3, 0u32..2), 3)) {
        let (x, r) = s3_target();
        let ins: Vec<Insertion> = labels.iter().map(|&(label, a)| Insertion { basis: Basis::Phibar, label, a }).collect();
        let rev: Vec<Insertion> = ins.iter().rev().copied().collect();
        let v = correlator_x(x, r, 0, &ins, None).unwrap();
        prop_assert_eq!(v.clone(), correlator_x(x, r, 0, &rev, None).unwrap());
        prop_assert!(v.has_rational_coeffs());
    }
}

#[test]
fn unordered_equals_ordered_for_identical_insertions() {
    let (x, r) = s3_target();
    for label in 0..3 {
        for a in 0..2 {
            let ins = Insertion { basis: Basis::Classbar, label, a };
            let ordered = correlator_x(x, r, 0, &[ins; 4], None).unwrap();
            let unordered = correlator_x(x, r, 0, &[], Some((ins, 4))).unwrap();
            assert_eq!(ordered, unordered, "label {label}, a {a}");
        }
    }
}
