//! Acceptance suite: every published count, classification and certificate
//! the library is expected to reproduce, at the stated tolerances (all
//! exact). One test per criterion; each prints a PASS line when it holds.

use semiample::budget::Budget;
use semiample::criteria::{
    cyclic_semiample_all_strict, cyclic_semiample_test, democratic_test,
    emit_certificates, new_nef_divisor, second_criterion_test, semiample_test,
};
use semiample::divisors::{
    self, is_fnef_divisor, keel_rewrite, parasymmetric, psi_minus_delta, symmetrized_class,
    to_symmetric_class, SymmetricDivisor,
};
use semiample::fcone;
use semiample::groupfn::{
    is_fnef, m_of, standard_function, tilde, FnefVerdict, StandardKind, SymmetricFunction,
};
use semiample::quadforms::{
    is_balanced, BalanceStatus, CyclicQuadraticForm, NamedForm,
};
use semiample::rat::{int, rat, Rat};
use semiample::weightings::{
    cyclic_weighting, effectivity_oracle, sigma_vector, CyclicOrdering, EffectivityVerdict,
    LabeledTree, Mode, Weighting,
};

use num::Zero;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn budget() -> Budget {
    Budget::default()
}

#[test]
fn criterion_01_table_reproduction() {
    let expected = [
        (8usize, (4usize, 3usize, 1usize, 0usize)),
        (9, (4, 3, 0, 1)),
        (10, (7, 6, 1, 0)),
        (11, (10, 6, 0, 4)),
        (12, (10, 6, 1, 3)),
        (13, (18, 9, 0, 9)),
        (14, (27, 13, 1, 13)),
    ];
    for (n, want) in expected {
        let row = semiample_test(n, None, &budget()).unwrap();
        assert_eq!(row.counts(), want, "table row n={n}");
    }
    println!("criterion 1 PASS: table rows n=8..14 match exactly");
}

#[test]
#[ignore = "extended, non-gating: minutes-to-hours depending on the machine"]
fn criterion_01_extended_table() {
    // Known divergence at n = 17: this implementation classifies all 91
    // remaining rays as democratic, while the published table reports 84.
    // The published values are asserted as stated; the n = 17 row is
    // expected to fail here until the discrepancy is resolved. The stated
    // algorithm (associated F-nef function, displayed flow formula,
    // compositions into >= 4 positive parts) reproduces every row up to
    // n = 16 exactly, and two independent implementations of it agree on
    // 91; every tested variant (true flow formula with k >= 4 or k >= 5,
    // fixed or existential lambda, zero-padded tuples, strict
    // inequalities) breaks some row with n <= 16 instead.
    let expected = [
        (15usize, (26usize, 11usize, 0usize, 15usize)),
        (16, (74, 19, 7, 48)),
        (17, (113, 22, 0, 84)),
    ];
    for (n, want) in expected {
        let row = semiample_test(n, None, &budget()).unwrap();
        assert_eq!(row.counts(), want, "table row n={n}");
    }
    println!("criterion 1 (extended) PASS: table rows n=15..17 match exactly");
}

#[test]
fn criterion_02_ray_counts_small_and_twenty() {
    assert_eq!(fcone::ray_counts(5).unwrap(), 1);
    assert_eq!(fcone::ray_counts(6).unwrap(), 2);
    let rays = fcone::extreme_rays(&fcone::fcone_inequalities(20)).unwrap();
    assert_eq!(rays.len(), 739, "n=20 ray count");
    let cyclic = rays
        .iter()
        .filter(|coords| {
            let d = SymmetricDivisor::new(20, coords.iter().map(|&c| int(c)).collect())
                .unwrap();
            cyclic_semiample_test(&d, &budget()).unwrap().is_pass()
        })
        .count();
    assert_eq!(cyclic, 60, "n=20 cyclic semiample count");
    println!("criterion 2 PASS: ray counts 5->1, 6->2, 20->739 with 60 cyclic semiample");
}

#[test]
fn criterion_02_ray_count_twenty_five() {
    let start = std::time::Instant::now();
    assert_eq!(fcone::ray_counts(25).unwrap(), 28_334, "n=25 ray count");
    let elapsed = start.elapsed();
    println!(
        "criterion 2 PASS: n=25 has 28334 extremal rays ({}s; >1800s would be a performance defect)",
        elapsed.as_secs()
    );
    assert!(
        elapsed.as_secs() <= 1800,
        "n=25 enumeration exceeded the 30 minute performance target"
    );
}

#[test]
fn criterion_03_vanishing_class() {
    for n in 5..=12usize {
        let a_n = standard_function(StandardKind::A, n).unwrap();
        let expr = parasymmetric(&a_n, &vec![1i64; n]).unwrap();
        let class = to_symmetric_class(&expr).unwrap();
        assert!(class.is_zero(), "D(Z_{n}, A_{n}; 1^{n}) must vanish");
    }
    println!("criterion 3 PASS: parasymmetric(A_n, 1^n) symmetrizes to 0 for n=5..12");
}

#[test]
fn criterion_04_balancedness_suite() {
    let budget = budget();
    for m in 2..=8usize {
        let am = standard_function(StandardKind::A, m).unwrap();
        let q = CyclicQuadraticForm::from_function(&am);
        let verdict = is_balanced(&q, &budget).unwrap();
        assert_eq!(verdict.status, BalanceStatus::Balanced, "Q_A_{m}");
    }
    for m in [4usize, 6, 8, 9, 12] {
        let b = CyclicQuadraticForm::named(NamedForm::B, m).unwrap();
        let verdict = is_balanced(&b, &budget).unwrap();
        assert_eq!(verdict.status, BalanceStatus::Balanced, "form B_{m}");
    }
    for m in [5usize, 7, 11, 13] {
        let b = CyclicQuadraticForm::named(NamedForm::B, m).unwrap();
        let verdict = is_balanced(&b, &budget).unwrap();
        assert_eq!(verdict.status, BalanceStatus::NotBalanced, "form B_{m}");
        let w = verdict.witness.expect("witness on failure");
        assert_eq!(w.q_value, int(1), "B_{m} witness value");
        assert_eq!(w.reference_value, int(3), "B_{m} reference value");
        // the witness follows the period recurrence off a single position
        let violations = (0..m)
            .filter(|&i| {
                w.vector[i] - w.vector[(i + 1) % m] + w.vector[(i + 2) % m] != 0
            })
            .count();
        assert_eq!(violations, 1, "B_{m} witness period pattern");
    }
    for m in [6usize, 10, 14] {
        let c = CyclicQuadraticForm::named(NamedForm::C, m).unwrap();
        assert_eq!(
            is_balanced(&c, &budget).unwrap().status,
            BalanceStatus::Balanced,
            "form C_{m}"
        );
    }
    for m in [3usize, 5, 7] {
        let d = CyclicQuadraticForm::named(NamedForm::D, m).unwrap();
        assert_eq!(
            is_balanced(&d, &budget).unwrap().status,
            BalanceStatus::Balanced,
            "form D_{m}"
        );
    }
    println!("criterion 4 PASS: balancedness suite (A 2..8, B classified with witnesses, C, D)");
}

#[test]
fn criterion_05_fnef_classifications() {
    for m in 2..=16usize {
        let am = standard_function(StandardKind::A, m).unwrap();
        assert!(is_fnef(&am).is_pass(), "A_{m}");
    }
    for m in 4..=16usize {
        let bm = standard_function(StandardKind::B, m).unwrap();
        let expected = m == 4 || m == 6 || m >= 8;
        assert_eq!(is_fnef(&bm).is_pass(), expected, "B_{m}");
    }
    for m in 2..=16usize {
        let em = standard_function(StandardKind::E, m).unwrap();
        assert_eq!(is_fnef(&em).is_pass(), m >= 3, "E_{m}");
    }
    println!("criterion 5 PASS: F-nef classifications of A (2..16), B (4..16), E (2..16)");
}

#[test]
fn criterion_06_tilde_suite() {
    let budget = budget();
    for m in 3..=10usize {
        let am = standard_function(StandardKind::A, m).unwrap();
        assert_eq!(m_of(&am), int(m as i64), "m(A_{m})");
        let em = standard_function(StandardKind::E, m).unwrap();
        assert_eq!(tilde(&am), em, "tilde(A_{m}) = E_{m}");
    }
    let a3 = standard_function(StandardKind::A, 3).unwrap();
    let (expr, report) = new_nef_divisor(&a3, &[1; 9], false, &budget).unwrap();
    assert!(report.is_pass(), "condition (dagger) for A_3");
    let class = to_symmetric_class(&expr).unwrap();
    let ray = SymmetricDivisor::new(9, vec![int(1), int(1), int(2)]).unwrap();
    assert_eq!(class, ray.scale(&rat(3, 2)), "new nef divisor on 9 points");
    // the ray passes F-nefness and the democratic test, fails the cyclic one
    let p = ray.p_function();
    assert!(is_fnef_divisor(&p, &[1; 9], &budget).unwrap().is_pass());
    let e3 = standard_function(StandardKind::E, 3).unwrap();
    assert!(is_fnef_divisor(&e3, &[1; 9], &budget).unwrap().is_pass());
    assert!(democratic_test(&ray).unwrap().is_pass());
    assert!(!cyclic_semiample_test(&ray, &budget).unwrap().is_pass());
    println!("criterion 6 PASS: tilde suite and the Delta_2+Delta_3+2Delta_4 ray on 9 points");
}

#[test]
fn criterion_07_cyclic_weighting_master_property() {
    let mut rng = StdRng::seed_from_u64(0x5eed_cafe);
    let mut checked = 0usize;
    while checked < 200 {
        let m = rng.gen_range(1..=6usize);
        let n = rng.gen_range(3..=8usize);
        // random symmetric f with small rational values
        let mut values = vec![Rat::from_integer(0.into()); m];
        for i in 0..=m / 2 {
            let v = rat(rng.gen_range(-12i64..=12), rng.gen_range(1i64..=3));
            values[i] = v.clone();
            values[(m - i) % m] = v;
        }
        let f = SymmetricFunction::new(m, values).unwrap();
        // random tuple with zero sum mod m
        let mut d: Vec<i64> = (0..n - 1).map(|_| rng.gen_range(-6i64..=6)).collect();
        let partial: i64 = d.iter().sum();
        let fix = (-partial).rem_euclid(m as i64);
        d.push(fix);
        // random ordering
        let mut order: Vec<usize> = (1..=n).collect();
        for i in (1..n).rev() {
            let j = rng.gen_range(0..=i);
            order.swap(i, j);
        }
        let sigma = CyclicOrdering::new(order).unwrap();
        let w = cyclic_weighting(&f, &d, &sigma).unwrap();
        let q = CyclicQuadraticForm::from_function(&f);
        for mask in 1u32..(1 << n) - 1 {
            let side: Vec<usize> = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| i + 1)
                .collect();
            let z = sigma_vector(m, &d, &sigma, &side).unwrap();
            assert_eq!(
                w.cut_flow(mask),
                q.evaluate(&z),
                "flow mismatch: m={m} n={n} d={d:?} side={side:?}"
            );
        }
        checked += 1;
    }
    println!("criterion 7 PASS: 200 random cyclic weightings match Q_f on every partition");
}

#[test]
fn criterion_08_oracle_equivalence() {
    let budget = budget();
    let range = [-2i64, -1, 0, 1, 2];
    let mut scanned = 0usize;
    for m in 1..=4usize {
        let free = m / 2 + 1;
        let mut counters = vec![0usize; free];
        loop {
            let mut values = vec![int(0); m];
            for i in 0..free {
                values[i] = int(range[counters[i]]);
                values[(m - i) % m] = int(range[counters[i]]);
            }
            let f = SymmetricFunction::new(m, values).unwrap();
            check_oracle_equivalence(&f, &budget);
            scanned += 1;
            // odometer
            let mut i = 0;
            while i < free {
                if counters[i] + 1 < range.len() {
                    counters[i] += 1;
                    break;
                }
                counters[i] = 0;
                i += 1;
            }
            if i == free {
                break;
            }
        }
    }
    let mut rng = StdRng::seed_from_u64(0xfeed_0123);
    for _ in 0..100 {
        let m = 5usize;
        let mut values = vec![int(0); m];
        for i in 0..=m / 2 {
            let v = int(rng.gen_range(-2i64..=2));
            values[i] = v.clone();
            values[(m - i) % m] = v;
        }
        let f = SymmetricFunction::new(m, values).unwrap();
        check_oracle_equivalence(&f, &budget);
        scanned += 1;
    }
    println!(
        "criterion 8 PASS: is_fnef matches 4-tuple oracle feasibility on {scanned} functions"
    );
}

fn check_oracle_equivalence(f: &SymmetricFunction, budget: &Budget) {
    let m = f.modulus() as i64;
    let fnef = is_fnef(f).is_pass();
    let mut all_feasible = true;
    'outer: for d1 in 0..m {
        for d2 in 0..m {
            for d3 in 0..m {
                let d4 = (-(d1 + d2 + d3)).rem_euclid(m);
                let d = [d1, d2, d3, d4];
                let verdict = effectivity_oracle(f, &d, Mode::Plain, budget).unwrap();
                if matches!(verdict, EffectivityVerdict::Infeasible(_)) {
                    all_feasible = false;
                    break 'outer;
                }
            }
        }
    }
    assert_eq!(
        fnef,
        all_feasible,
        "oracle equivalence fails for f = {f}"
    );
}

#[test]
fn criterion_09_certificate_suite() {
    let budget = budget();
    let double_factorials = [(5usize, 15usize), (6, 105), (7, 945)];
    for (n, expected_count) in double_factorials {
        let candidates = cyclic_semiample_candidates(n, &budget);
        assert!(
            candidates.len() >= 3,
            "need three cyclic semiample divisors at n={n}"
        );
        for d in candidates.iter().take(3) {
            let certs = emit_certificates(d, &budget).unwrap();
            assert_eq!(certs.len(), expected_count, "(2n-5)!! trees at n={n}");
            let double = d.scale(&int(2)).expression();
            for entry in &certs {
                for k in 1..=n {
                    assert!(entry.boundary.psi(k).is_zero(), "psi residual");
                }
                for (_, coeff) in entry.boundary.boundary_entries() {
                    assert!(coeff >= &int(0), "negative boundary coefficient");
                }
                let tree = LabeledTree::parse(&entry.tree).unwrap();
                for part in tree.tree_partitions() {
                    let side: Vec<usize> = (0..n)
                        .filter(|i| part & (1 << i) != 0)
                        .map(|i| i + 1)
                        .collect();
                    assert!(
                        entry
                            .boundary
                            .boundary_coefficient(&side)
                            .unwrap()
                            .is_zero(),
                        "tree partition coefficient must vanish"
                    );
                }
                let back = keel_rewrite(&entry.boundary, &entry.weighting.negate());
                assert_eq!(back, double, "certificate must reproduce 2D");
            }
        }
    }
    println!("criterion 9 PASS: 15/105/945 verifying representatives for three divisors each");
}

fn cyclic_semiample_candidates(n: usize, budget: &Budget) -> Vec<SymmetricDivisor> {
    let base = psi_minus_delta(n).scale(&int((n - 1) as i64));
    let mut candidates = vec![base.clone()];
    if let Ok(rays) = fcone::extreme_rays(&fcone::fcone_inequalities(n)) {
        for coords in rays {
            let ray =
                SymmetricDivisor::new(n, coords.iter().map(|&c| int(c)).collect()).unwrap();
            candidates.push(base.add(&ray));
            candidates.push(ray);
        }
    }
    candidates.push(base.scale(&int(3)));
    candidates
        .into_iter()
        .filter(|d| {
            !d.is_zero()
                && cyclic_semiample_test(d, budget)
                    .map(|r| r.is_pass())
                    .unwrap_or(false)
        })
        .collect()
}

#[test]
fn criterion_10_psi_minus_delta_strictness() {
    let budget = budget();
    for n in 5..=12usize {
        let d = psi_minus_delta(n);
        assert!(
            cyclic_semiample_test(&d, &budget).unwrap().is_pass(),
            "psi - Delta passes at n={n}"
        );
        assert!(
            cyclic_semiample_all_strict(&d),
            "psi - Delta strict off the contiguous subsets at n={n}"
        );
    }
    println!("criterion 10 PASS: psi - Delta passes strictly for n=5..12");
}

#[test]
fn criterion_11_keel_rewrite_invariance() {
    let mut rng = StdRng::seed_from_u64(0xdead_beef);
    for case in 0..100 {
        let n = rng.gen_range(5..=9usize);
        let a: Vec<Rat> = (0..n / 2 - 1)
            .map(|_| int(rng.gen_range(-9i64..=9)))
            .collect();
        let d = SymmetricDivisor::new(n, a).unwrap();
        let expr = d.expression();
        let mut w = Weighting::zero(n).unwrap();
        for i in 1..=n {
            for j in i + 1..=n {
                w.set_weight(i, j, int(rng.gen_range(-5i64..=5)));
            }
        }
        let rewritten = keel_rewrite(&expr, &w);
        assert_eq!(
            symmetrized_class(&rewritten),
            symmetrized_class(&expr),
            "case {case}: symmetrized class must be Keel-invariant"
        );
        assert_eq!(symmetrized_class(&expr), d, "expression round trip");
    }
    println!("criterion 11 PASS: symmetrized class invariant under 100 random Keel rewrites");
}

#[test]
fn second_criterion_and_democratic_spot_checks() {
    // sanity anchors used by the table rows: the n=8 ray (2,6,5) satisfies
    // the second criterion and fails the cyclic one; psi - Delta interiors
    // pass everything they should
    let budget = budget();
    let ray = SymmetricDivisor::new(8, vec![int(2), int(6), int(5)]).unwrap();
    assert!(!cyclic_semiample_test(&ray, &budget).unwrap().is_pass());
    assert!(second_criterion_test(&ray, None).unwrap().is_pass());
    // divisors::symmetrized_class on a parasymmetric divisor agrees with
    // to_symmetric_class
    let e3 = standard_function(StandardKind::E, 3).unwrap();
    let expr = parasymmetric(&e3, &[1; 9]).unwrap();
    assert_eq!(
        divisors::symmetrized_class(&expr),
        to_symmetric_class(&expr).unwrap()
    );
}
