//! One PASS/FAIL line per acceptance criterion, with wall time and tolerance.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use orbigw::algebra::{int, rat, Poly, UVars};
use orbigw::chars::{omega, omega_bruteforce, DEFAULT_BUDGET as OMEGA_BUDGET};
use orbigw::example::type_d_example;
use orbigw::graphs::{potential_part, GraphOptions};
use orbigw::oracle::{compare_with_graphsum, QuadraticSign, DEFAULT_BUDGET};
use orbigw::rmatrix::{a_action_on_classes, r_matrix_unchecked, BernoulliIndex};
use orbigw::{
    character_table, correlator_tw, correlator_x, psi_integral, r_matrix, Basis, CharacterTable, Cyclotomic, EqScalar,
    Exponent, FiniteGroup, GraphSum, Insertion, Rational, RepSpec, Series, Target,
};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check, u64);

fn table(family: &str, n: i64) -> CharacterTable {
    character_table(Arc::new(FiniteGroup::builtin(family, n).unwrap())).unwrap()
}

fn target(family: &str, n: i64, rep: &[usize]) -> Target {
    Target::new(Arc::new(table(family, n)), RepSpec::new(rep.to_vec())).unwrap()
}

/// The five test groups with a two-summand representation each.
const SUITE: [(&str, i64, &[usize]); 5] = [
    ("cyclic", 1, &[0, 0]),
    ("cyclic", 2, &[1, 0]),
    ("cyclic", 3, &[1, 2]),
    ("symmetric", 3, &[2, 1]),
    ("binary_dihedral", 2, &[4, 0]),
];

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn builtin_groups_up_to(n: usize) -> Vec<(String, i64)> {
    let mut out = Vec::new();
    for (family, range) in [
        ("cyclic", 1..=24),
        ("dihedral", 1..=12),
        ("binary_dihedral", 1..=6),
        ("quaternion", 3..=4),
        ("symmetric", 1..=4),
    ] {
        for k in range {
            if FiniteGroup::builtin(family, k).unwrap().order() <= n {
                out.push((family.to_string(), k));
            }
        }
    }
    out
}

fn orthogonality() -> Check {
    let groups = builtin_groups_up_to(24);
    for (family, k) in &groups {
        let t = table(family, *k);
        let g = t.group();
        let nc = g.num_classes();
        ensure(t.num_irreps() == nc, || format!("{family}({k}): {} irreps for {nc} classes", t.num_irreps()))?;
        for a in 0..nc {
            for b in 0..nc {
                let mut row = Cyclotomic::zero();
                let mut col = Cyclotomic::zero();
                for c in 0..nc {
                    let size = int(g.class_size(c) as i64);
                    row += &t.value(a, c).mul(t.value(b, g.class_inverse(c))).scale(&size);
                    col += &t.value(c, g.class_inverse(a)).mul(t.value(c, b));
                }
                let want_row = if a == b { g.order() } else { 0 };
                let want_col = if a == b { g.class_centralizer(a) } else { 0 };
                ensure(row == Cyclotomic::from_int(want_row as i64), || format!("{family}({k}) row ({a},{b})"))?;
                ensure(col == Cyclotomic::from_int(want_col as i64), || format!("{family}({k}) column ({a},{b})"))?;
            }
        }
    }
    Ok(format!("{} groups", groups.len()))
}

fn class_tuples(classes: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|t| (0..classes).map(move |c| [t.clone(), vec![c]].concat())).collect();
    }
    out
}

fn frobenius() -> Check {
    let mut count = 0;
    for (family, k) in [("cyclic", 2), ("cyclic", 3), ("cyclic", 4), ("symmetric", 3), ("binary_dihedral", 2)] {
        let t = table(family, k);
        for g in 0..=2 {
            for n in 0..=3 {
                for tuple in class_tuples(t.group().num_classes(), n) {
                    let a = omega(&t, g, &tuple).map_err(|e| e.to_string())?;
                    let b = omega_bruteforce(t.group(), g, &tuple, OMEGA_BUDGET).map_err(|e| e.to_string())?;
                    ensure(a == b, || format!("{family}({k}) g={g} {tuple:?}: {a} vs {b}"))?;
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} class tuples"))
}

fn random_key(rng: &mut ChaCha8Rng, max_n: usize) -> (u32, Vec<u32>) {
    loop {
        let g = rng.gen_range(0..=3u32);
        let n = rng.gen_range(1..=max_n);
        if 2 * g as i64 - 2 + n as i64 <= 0 {
            continue;
        }
        let dim = 3 * g as usize + n - 3;
        let mut a = vec![0u32; n];
        for _ in 0..dim {
            a[rng.gen_range(0..n)] += 1;
        }
        return (g, a);
    }
}

fn psi_checks() -> Check {
    ensure(psi_integral(0, &[0, 0, 0]).unwrap() == int(1), || "<tau_0^3>_0".into())?;
    ensure(psi_integral(1, &[1]).unwrap() == rat(1, 24), || "<tau_1>_1".into())?;
    ensure(psi_integral(2, &[4]).unwrap() == rat(1, 1152), || "<tau_4>_2".into())?;
    let seed = 20240601;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..200 {
        let (g, a) = random_key(&mut rng, 5);
        let n = a.len();
        let string = psi_integral(g, &[a.clone(), vec![0]].concat()).unwrap();
        let mut expect = Rational::zero();
        for j in 0..n {
            if a[j] > 0 {
                let mut b = a.clone();
                b[j] -= 1;
                expect += psi_integral(g, &b).unwrap();
            }
        }
        ensure(string == expect, || format!("string equation at g={g} {a:?}"))?;
        let dilaton = psi_integral(g, &[a.clone(), vec![1]].concat()).unwrap();
        let expect = psi_integral(g, &a).unwrap() * int(2 * g as i64 - 2 + n as i64);
        ensure(dilaton == expect, || format!("dilaton equation at g={g} {a:?}"))?;
    }
    Ok(format!("200 keys, seed {seed}"))
}

fn symplectic() -> Check {
    let mut reps = 0;
    for (family, k, _) in SUITE {
        let t = Arc::new(table(family, k));
        let irreps = t.num_irreps();
        let mut specs: Vec<Vec<usize>> = (0..irreps).map(|i| vec![i]).collect();
        for i in 0..irreps {
            for j in i..irreps {
                specs.push(vec![i, j]);
            }
        }
        for spec in specs {
            let x = Target::new(t.clone(), RepSpec::new(spec.clone())).unwrap();
            let r = r_matrix_unchecked(&x, 5, BernoulliIndex::Shifted).map_err(|e| e.to_string())?;
            if let Some((d, a, b)) = r.symplectic_defect() {
                return Err(format!("{family}({k}) rep {spec:?}: z^{d} entry ({a},{b})"));
            }
            reps += 1;
        }
    }
    let trivial = target("cyclic", 1, &[0]);
    let r = r_matrix(&trivial, 5).map_err(|e| e.to_string())?;
    let log: Series = r.entry(0, 0).log().map_err(|e| e.to_string())?;
    let w = |p: i64, q: Rational| EqScalar::var_power(1, 0, Exponent::from_integer(p)).scale_rational(&q);
    ensure(log.coeff(1) == w(-1, rat(-1, 12)), || format!("[z]log R = {}", log.coeff(1)))?;
    ensure(log.coeff(2).is_zero(), || format!("[z^2]log R = {}", log.coeff(2)))?;
    ensure(log.coeff(3) == w(-3, rat(1, 360)), || format!("[z^3]log R = {}", log.coeff(3)))?;
    ensure(log.coeff(4).is_zero(), || format!("[z^4]log R = {}", log.coeff(4)))?;
    Ok(format!("{reps} representations through z^5; trivial log R = -z/12w + z^3/360w^3"))
}

fn oracle() -> Check {
    let mut lines = Vec::new();
    let mut coefficients = 0;
    for (family, k, rep) in SUITE {
        let x = target(family, k, rep);
        for (g, n) in [(0u32, 3usize), (0, 4), (1, 1), (1, 2)] {
            let r = compare_with_graphsum(&x, g, n, 3, QuadraticSign::Verbatim, DEFAULT_BUDGET)
                .map_err(|e| format!("{family}({k}) ({g},{n}): {e}"))?;
            ensure(r.mismatches == 0, || format!("{family}({k}) ({g},{n}): {} mismatches", r.mismatches))?;
            coefficients += r.monomials;
        }
        lines.push(format!("{family}({k})"));
    }
    Ok(format!("{coefficients} coefficients, heights <= 3, groups {}", lines.join(" ")))
}

fn phibar(label: usize, a: u32) -> Insertion {
    Insertion { basis: Basis::Phibar, label, a }
}

fn anchors() -> Check {
    let trivial = target("cyclic", 1, &[0]);
    let r = r_matrix(&trivial, 3).map_err(|e| e.to_string())?;
    let inv_w = |q: Rational| EqScalar::var_power(1, 0, Exponent::from_integer(-1)).scale_rational(&q);
    let v = correlator_x(&trivial, &r, 0, &[phibar(0, 0); 3], None).map_err(|e| e.to_string())?;
    ensure(v == inv_w(int(1)), || format!("<tau_0^3>_0 = {v}"))?;
    let v = correlator_x(&trivial, &r, 1, &[phibar(0, 0)], None).map_err(|e| e.to_string())?;
    ensure(v == inv_w(rat(-1, 24)), || format!("<tau_0>_1 = {v}"))?;
    let mut triples = 0;
    for (family, k, rep) in SUITE {
        let x = target(family, k, rep);
        let r = r_matrix(&x, 3).map_err(|e| e.to_string())?;
        let m = x.num_irreps();
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let v = correlator_x(&x, &r, 0, &[phibar(a, 0), phibar(b, 0), phibar(c, 0)], None)
                        .map_err(|e| e.to_string())?;
                    let want = if a == b && b == c { x.nubar(a) } else { EqScalar::zero(x.nvars()) };
                    ensure(v == want, || format!("{family}({k}) ({a},{b},{c}): {v}"))?;
                    let prod = x.cup_product(Basis::Phibar, a, b);
                    let mut pred = EqScalar::zero(x.nvars());
                    for (d, coeff) in prod.iter().enumerate() {
                        pred.add_assign(&coeff.mul(&x.pairing(Basis::Phibar, d, c)));
                    }
                    ensure(v == pred, || format!("{family}({k}) ({a},{b},{c}): pairing of product {pred}"))?;
                    triples += 1;
                }
            }
        }
    }
    Ok(format!("trivial anchors and {triples} three-point triples"))
}

fn rational_poly(p: &Poly) -> bool {
    p.terms().all(|(_, c)| c.has_rational_coeffs())
}

fn rationality() -> Check {
    let mut correlators = 0;
    for (family, k, rep) in [("symmetric", 3, &[2usize, 1][..]), ("binary_dihedral", 2, &[4, 0][..])] {
        let x = target(family, k, rep);
        let r = r_matrix(&x, 5).map_err(|e| e.to_string())?;
        let cap = 3;
        let vars = UVars::new(x.num_irreps(), cap);
        let xs = GraphSum::new(&x, &r, GraphOptions::x()).map_err(|e| e.to_string())?;
        let tw = GraphSum::new(&x, &r, GraphOptions::twisted()).map_err(|e| e.to_string())?;
        for (g, n) in [(0u32, 3usize), (0, 4), (1, 1), (1, 2)] {
            let px = potential_part(&xs, g, n, &vars).map_err(|e| e.to_string())?;
            let pt = potential_part(&tw, g, n, &vars).map_err(|e| e.to_string())?;
            ensure(rational_poly(&px), || format!("{family}({k}) ({g},{n}): non-rational X coefficient"))?;
            let e = x.e1().monomial_pow(Exponent::from_integer(g as i64 - 1)).map_err(|e| e.to_string())?;
            ensure(px == pt.scale(&e), || format!("{family}({k}) ({g},{n}): X != e1^(g-1) tw"))?;
            ensure(pt.terms().all(|(_, c)| c.has_integer_exponents()), || {
                format!("{family}({k}) ({g},{n}): fractional w-exponent in tw")
            })?;
            correlators += px.len();
        }
        let classbar = |label: usize, a: u32| Insertion { basis: Basis::Classbar, label, a };
        let nc = x.num_classes();
        for tuple in class_tuples(nc, 3) {
            let ins: Vec<Insertion> = tuple.iter().map(|&c| classbar(c, 0)).collect();
            let v = correlator_x(&x, &r, 0, &ins, None).map_err(|e| e.to_string())?;
            ensure(v.has_rational_coeffs(), || format!("{family}({k}) classbar {tuple:?}"))?;
            correlators += 1;
        }
        for c in 0..nc {
            for a in 0..=2 {
                let v = correlator_x(&x, &r, 1, &[classbar(c, a)], None).map_err(|e| e.to_string())?;
                let t = correlator_tw(&x, &r, 1, &[Insertion { basis: Basis::Class, label: c, a }], None)
                    .map_err(|e| e.to_string())?;
                ensure(v.has_rational_coeffs() && t.has_rational_coeffs(), || {
                    format!("{family}({k}) (1,1) class {c}")
                })?;
                correlators += 1;
            }
        }
    }
    Ok(format!("{correlators} correlators and coefficients rational; X = e1^(g-1) tw exactly"))
}

fn type_d() -> Check {
    for n in [2usize, 3] {
        let rep = type_d_example(n, 6, 3).map_err(|e| e.to_string())?;
        ensure(rep.matches, || format!("n={n}: A_t actions differ from the closed forms"))?;
        for c in &rep.classes {
            ensure(c.a1 == c.expected_a1 && c.a2 == c.expected_a2, || format!("n={n} class {}", c.label))?;
        }
    }
    let rep = type_d_example(2, 2, 2).map_err(|e| e.to_string())?;
    let b = rep.classes.iter().find(|c| c.label == "ba^0").ok_or("no class ba^0")?;
    ensure(b.a1[1] == "-1/24", || format!("B_2(1/4)+B_2(3/4) = {}", b.a1[1]))?;
    let a = rep.classes.iter().find(|c| c.label == "a^1").ok_or("no class a^1")?;
    ensure(a.a1[0] == "0/1", || format!("B_1(1/4)+B_1(3/4) = {}", a.a1[0]))?;
    let x = target("binary_dihedral", 2, &[4, 0]);
    ensure(a_action_on_classes(&x, 1, 2).iter().all(|v| *v == rat(1, 6)), || "A_2^2 is not B_2(0)".into())?;
    Ok("n = 2, 3 with t <= 6".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("character orthogonality, |G| <= 24", orthogonality, 10),
        ("omega == omega_bruteforce, g <= 2, n <= 3", frobenius, 120),
        ("psi anchors, string and dilaton equations", psi_checks, 10),
        ("R-matrix symplectic identity and trivial Bernoulli pattern", symplectic, 30),
        ("graph sum == quantization oracle", oracle, 600),
        ("closed-form anchors", anchors, 30),
        ("rationality and e1^(g-1) normalization", rationality, 120),
        ("Type-D example", type_d, 5),
    ];
    let mut failed = 0;
    for (name, f, limit) in criteria {
        let start = Instant::now();
        let result = f();
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(limit);
        let (status, detail) = match (&result, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; over the time limit")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("{status} {name} | {:.2}s (limit {limit}s) | tolerance: exact | {detail}", elapsed.as_secs_f64());
    }
    println!("{} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
