//! Brute-force oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use num_integer::Integer;
use twogen::synth::{parse_formula, CountingFormula};
use twogen::FactorCache;

pub const GOLDEN: &str = include_str!("../fixtures/golden_formulas.txt");

/// `(k, text)` pairs from the golden fixture file.
pub fn golden_texts() -> Vec<(u32, &'static str)> {
    GOLDEN
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let (k, text) = l.split_once(':').expect("k: formula");
            (k.trim().parse().expect("k"), text.trim())
        })
        .collect()
}

pub fn golden_formulas(cache: &FactorCache) -> Vec<CountingFormula> {
    golden_texts()
        .into_iter()
        .map(|(k, t)| parse_formula(k, t, cache).expect("fixture parses"))
        .collect()
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

pub fn odd_primes(bound: u64) -> Vec<u64> {
    (3..=bound).filter(|&n| is_prime(n)).collect()
}

/// `n(g,2)` by scanning generator pairs `a < b` with `(a-1)(b-1) = 2g`.
pub fn two_gen_by_pairs(g: u64) -> u64 {
    let two_g = 2 * g;
    (2..)
        .take_while(|&a| (a - 1) * (a - 1) < two_g)
        .filter(|&a| {
            two_g % (a - 1) == 0 && {
                let b = two_g / (a - 1) + 1;
                a.gcd(&b) == 1
            }
        })
        .count() as u64
}

/// Semigroups of genus `g` found by trying every `g`-subset of `[1, 2g]` as
/// a gap set; returns `(total, with_two_generators)`.
pub fn semigroups_by_subsets(g: u32) -> (u64, u64) {
    if g == 0 {
        return (1, 0);
    }
    let window = 2 * g;
    let mut total = 0;
    let mut two = 0;
    for mask in 0u64..1 << window {
        if mask.count_ones() != g {
            continue;
        }
        let gap = |n: u32| n >= 1 && n <= window && mask >> (n - 1) & 1 == 1;
        let member = |n: u32| !gap(n);
        let limit = 2 * window + 2;
        let closed =
            (1..=limit).all(|x| !member(x) || (1..=limit - x).all(|y| !member(y) || member(x + y)));
        if !closed {
            continue;
        }
        total += 1;
        // minimal generators: nonzero members not a sum of two nonzero members
        let gens = (1..=limit)
            .filter(|&n| member(n) && !(1..n).any(|x| member(x) && member(n - x)))
            .count();
        if gens == 2 {
            two += 1;
        }
    }
    (total, two)
}

/// Whether `gcd(p^i + 1, 2p^(k-i) + 1) = 1`, by a plain bignum gcd.
pub fn row_survives_big(p: u64, i: u32, k: u32) -> bool {
    use num_bigint::BigUint;
    use num_traits::One;
    let p = BigUint::from(p);
    let a = p.pow(i) + 1u32;
    let b = (p.pow(k - i) << 1) + 1u32;
    a.gcd(&b).is_one()
}

pub fn prime_power_count(p: u64, k: u32) -> u64 {
    (0..=k).filter(|&i| row_survives_big(p, i, k)).count() as u64
}
