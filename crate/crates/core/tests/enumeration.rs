use std::collections::HashSet;

use multree::enumerate::{
    count_row, count_shapes, count_space, eulerian, generate_all, generate_all_capped, pair_table, valid_pairs,
};
use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};

#[test]
fn generator_agrees_with_formula() {
    for n in 2..=8 {
        let mut seen = HashSet::new();
        let all = generate_all(n, None).unwrap();
        for s in &all {
            assert!(seen.insert(s.clone()));
            assert_eq!(s.n_tips(), n);
        }
        for k in 1..n {
            let by_k = all.iter().filter(|s| s.n_internal() == k).count();
            assert_eq!(BigUint::from(by_k), count_shapes(n, k).value, "N={n} K={k}");
            assert_eq!(generate_all(n, Some(k)).unwrap().len(), by_k);
        }
        assert_eq!(BigUint::from(all.len()), count_space(n).value);
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(sorted, all);
    }
}

#[test]
fn cap_is_configurable() {
    assert!(generate_all_capped(10, Some(2), 9).is_err());
    assert_eq!(generate_all_capped(10, Some(2), 10).unwrap().len(), 8);
}

/// `sum_i c_i N^(deg - i)` with rational coefficients `num/den`.
fn poly(coeffs: &[(i64, i64)], n: i64) -> BigInt {
    let den: i64 = coeffs.iter().map(|&(_, d)| d).product();
    let deg = coeffs.len() as u32 - 1;
    let mut acc = BigInt::zero();
    for (i, &(num, d)) in coeffs.iter().enumerate() {
        acc += BigInt::from(num) * (den / d) * BigInt::from(n).pow(deg - i as u32);
    }
    assert!((&acc % den).is_zero());
    acc / den
}

#[test]
fn closed_form_polynomials() {
    // K = 6 and K = 8 use corrected coefficients (N^2 sign for K = 6, the
    // N^3 numerator for K = 8); the rest are as published.
    let table: Vec<(usize, Vec<(i64, i64)>)> = vec![
        (2, vec![(1, 1), (-2, 1)]),
        (3, vec![(1, 1), (-5, 1), (6, 1)]),
        (4, vec![(1, 1), (-19, 2), (59, 2), (-30, 1)]),
        (5, vec![(1, 1), (-31, 2), (179, 2), (-229, 1), (220, 1)]),
        (6, vec![(1, 1), (-23, 1), (634, 3), (-1945, 2), (13489, 6), (-2095, 1)]),
        (
            7,
            vec![
                (1, 1),
                (-32, 1),
                (3417, 8),
                (-36601, 12),
                (98519, 8),
                (-320483, 12),
                (24346, 1),
            ],
        ),
        (
            8,
            vec![
                (1, 1),
                (-85, 2),
                (93091, 120),
                (-94739, 12),
                (1162777, 24),
                (-2154193, 12),
                (3722867, 10),
                (-333676, 1),
            ],
        ),
    ];
    for (k, coeffs) in table {
        for n in k + 1..=20 {
            let want = poly(&coeffs, n as i64);
            assert_eq!(BigInt::from(count_shapes(n, k).value), want, "N={n} K={k}");
        }
    }
    for n in 5..=20u64 {
        let want = (n - 3) * (n - 4) * (2 * n - 5) / 2;
        assert_eq!(count_shapes(n as usize, 4).value, BigUint::from(want));
    }
}

#[test]
fn growth_bound() {
    for n in 2..=20 {
        for k in 1..n {
            assert!(count_shapes(n, k).value <= BigUint::from(n).pow(k as u32 - 1));
        }
    }
    let g20 = count_space(20).value;
    assert!(g20 > BigUint::from(u32::MAX));
    // log G(N) / (N log N) stays within a narrow band
    let ratio = |n: usize| count_space(n).value.to_f64().unwrap().ln() / (n as f64 * (n as f64).ln());
    for n in 10..=20 {
        let r = ratio(n);
        assert!(r > 0.3 && r < 1.0, "N={n}: {r}");
    }
}

#[test]
fn pair_table_identities() {
    for k in 2..=20 {
        let t = pair_table(k).unwrap();
        assert_eq!(t.len(), (k - 1) * (k - 1) / 4 + 1);
        assert_eq!(valid_pairs(k).unwrap().len(), t.len());
        let total: BigUint = t.iter().map(|(_, v)| v.clone()).sum();
        let fact = (1..k).fold(BigUint::from(1u32), |acc, i| acc * BigUint::from(i));
        assert_eq!(total, fact);
        for (i, b) in t.row_sums().into_iter().enumerate() {
            assert_eq!(b, eulerian(k - 1, i));
        }
        for (&(k0, k1), v) in t.iter() {
            assert!(!v.is_zero(), "K={k} ({k0},{k1})");
        }
    }
}

#[test]
fn rows_match_single_counts() {
    for n in 2..=14 {
        let row = count_row(n);
        assert_eq!(row.len(), n - 1);
        for (i, v) in row.iter().enumerate() {
            assert_eq!(*v, count_shapes(n, i + 1).value);
        }
    }
}

#[test]
fn pairs_with_too_many_leaves_contribute_nothing() {
    // 2 k0 + k1 > N means the binomial term vanishes
    for k in 3..=8 {
        let t = pair_table(k).unwrap();
        for n in k + 1..=12 {
            let direct: BigUint = t
                .iter()
                .filter(|(&(k0, k1), _)| 2 * k0 + k1 <= n)
                .map(|(&(k0, k1), a)| {
                    let top = n as i64 - 2 * k0 as i64 - k1 as i64 + k as i64 - 1;
                    a * multree::enumerate::binomial(top, k as i64 - 1)
                })
                .sum();
            assert_eq!(direct, count_shapes(n, k).value);
        }
    }
}
