use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;

use triangle_map::combinatorics::{
    compositions_standard_order, partial_fraction_sides, signed_multinomial, signed_row,
    tree_prefix_sum, row_prefix_sum,
};

fn q(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Absolute signed-row values in standard order (OEIS A124774), rows 1-5.
const A124774: [&[u64]; 5] = [
    &[1],
    &[1, 2],
    &[1, 3, 3, 6],
    &[1, 4, 6, 12, 4, 12, 12, 24],
    &[1, 5, 10, 20, 10, 30, 30, 60, 5, 20, 30, 60, 20, 60, 60, 120],
];

/// Standard order rebuilt from binary cut masks: every composition of `n`
/// corresponds to a subset of the `n - 1` gaps, sorted lexicographically
/// with larger leading parts first.
fn cut_mask_order(n: u32) -> Vec<Vec<u32>> {
    let mut all: Vec<Vec<u32>> = (0..1u32 << (n - 1))
        .map(|mask| {
            let mut parts = Vec::new();
            let mut run = 1;
            for gap in 0..n - 1 {
                if mask >> gap & 1 == 1 {
                    parts.push(run);
                    run = 1;
                } else {
                    run += 1;
                }
            }
            parts.push(run);
            parts
        })
        .collect();
    all.sort_by(|a, b| b.cmp(a));
    all
}

#[test]
fn compositions_form_a_bijection() {
    for n in 1..=16u32 {
        let comps = compositions_standard_order(n).unwrap();
        assert_eq!(comps.len(), 1usize << (n - 1));
        let set: HashSet<&Vec<u32>> = comps.iter().map(|c| &c.parts).collect();
        assert_eq!(set.len(), comps.len(), "duplicates at n={n}");
        for (i, c) in comps.iter().enumerate() {
            assert_eq!(c.parts.iter().sum::<u32>(), n);
            assert!(c.parts.iter().all(|&p| p >= 1));
            assert_eq!(c.index, i as u64 + 1);
        }
    }
}

#[test]
fn standard_order_matches_cut_masks() {
    for n in 1..=12u32 {
        let ours: Vec<Vec<u32>> = compositions_standard_order(n)
            .unwrap()
            .into_iter()
            .map(|c| c.parts)
            .collect();
        assert_eq!(ours, cut_mask_order(n), "n={n}");
    }
}

#[test]
fn signed_rows_match_oeis_fixture() {
    for (i, row) in A124774.iter().enumerate() {
        let ours: Vec<u64> = signed_row(i as u32 + 1)
            .unwrap()
            .iter()
            .map(|v| u64::try_from(v.magnitude()).unwrap())
            .collect();
        assert_eq!(ours.as_slice(), *row);
    }
    // rows 6-8 against the cut-mask enumeration
    for n in 6..=8u32 {
        let ours: Vec<BigInt> = signed_row(n).unwrap();
        let oracle: Vec<BigInt> = cut_mask_order(n)
            .into_iter()
            .map(|parts| {
                let fact = |k: u32| (1..=k).map(BigInt::from).product::<BigInt>();
                let v = fact(n) / parts.iter().map(|&p| fact(p)).product::<BigInt>();
                if parts.len() % 2 == 1 { v } else { -v }
            })
            .collect();
        assert_eq!(ours, oracle, "n={n}");
    }
}

#[test]
fn filtered_entries_are_nested() {
    for n in 1..=12u32 {
        let row = signed_row(n + 1).unwrap();
        let filtered = |k: u32| -> Vec<BigInt> {
            let step = 1usize << (n - k);
            row.iter().step_by(step).cloned().collect()
        };
        for k in 0..n {
            let coarse = filtered(k);
            let fine = filtered(k + 1);
            assert_eq!(coarse.len(), 1 << k);
            let evens: Vec<BigInt> = fine.iter().step_by(2).cloned().collect();
            assert_eq!(coarse, evens, "n={n} k={k}");
            assert_eq!(&row[..1 << k], &row[..1 << (k + 1)][..1 << k]);
        }
        for k in 0..=n {
            assert_eq!(tree_prefix_sum(n, k).unwrap(), row_prefix_sum(n, k).unwrap());
        }
    }
}

#[test]
fn multinomial_values_sum_to_powers() {
    // sum over compositions of n of n!/prod(parts!) is the ordered Bell number
    let fubini = [1u64, 1, 3, 13, 75, 541, 4683, 47293];
    for n in 1..=7u32 {
        let total: BigInt = compositions_standard_order(n)
            .unwrap()
            .iter()
            .map(|c| signed_multinomial(c).value)
            .sum();
        assert_eq!(total, BigInt::from(fubini[n as usize]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn partial_fractions_hold(
        n in 2u32..=12,
        (xn, xd) in (-80i64..=80, 1i64..=80),
        (yn, yd) in (-80i64..=80, 1i64..=80),
    ) {
        let (x, y) = (q(xn, xd), q(yn, yd));
        if let Ok((lhs, rhs)) = partial_fraction_sides(n, &x, &y) {
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn telescoping_base_case((rn, rd) in (1i64..=50, 1i64..=50), (un, ud) in (1i64..=50, 1i64..=50)) {
        let (r, u) = (q(rn, rd), q(un, ud));
        let one = BigRational::one();
        let a = &one + &r * &u;
        let b = &one + (&r + &one) * &u;
        let lhs = a.recip() - b.recip();
        let rhs = u / (a * b);
        prop_assert_eq!(lhs, rhs);
    }
}
