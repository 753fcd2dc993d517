//! Direct counts of `n(g,2)`.
//!
//! `n(g,2)` is the number of unordered pairs `{u, v}` with `uv = 2g` and
//! `gcd(u+1, v+1) = 1` (the pair `<u+1, v+1>` is then the semigroup). For
//! `g = p^k` this is the number of `0 <= i <= k` with
//! `gcd(p^i + 1, 2p^(k-i) + 1) = 1`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{self, ArithError};
use crate::factor_cache::FactorCache;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("genus must be positive")]
    ZeroGenus,
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// `{u, v}` with `u <= v`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SpecialFactorization {
    #[serde(serialize_with = "crate::cli::json::big_as_string")]
    pub u: BigUint,
    #[serde(serialize_with = "crate::cli::json::big_as_string")]
    pub v: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecialCount {
    pub count: u64,
    /// Surviving pairs, by increasing `u`.
    pub witnesses: Vec<SpecialFactorization>,
}

/// Counts special factorizations of `2g`.
pub fn count_special(g: &BigUint, cache: &FactorCache) -> Result<SpecialCount, CountError> {
    if g.is_zero() {
        return Err(CountError::ZeroGenus);
    }
    let two_g = g << 1;
    let f = arith::factorize(&two_g, cache)?;
    let one = BigUint::one();
    let witnesses: Vec<SpecialFactorization> = arith::divisors(&f)
        .into_iter()
        .take_while(|u| u * u <= two_g)
        .filter_map(|u| {
            let v = &two_g / &u;
            (&u + &one)
                .gcd(&(&v + &one))
                .is_one()
                .then_some(SpecialFactorization { u, v })
        })
        .collect();
    Ok(SpecialCount {
        count: witnesses.len() as u64,
        witnesses,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimePowerCount {
    pub p: u64,
    pub k: u32,
    pub count: u64,
    /// The exponents `i` with `gcd(p^i+1, 2p^(k-i)+1) = 1`, increasing.
    pub surviving: Vec<u32>,
}

/// Whether `gcd(p^i + 1, 2p^(k-i) + 1) = 1`, by direct bignum gcd.
pub fn row_survives(p: u64, i: u32, k: u32) -> bool {
    let p = BigUint::from(p);
    let left = num_traits::pow(p.clone(), i as usize) + 1u32;
    let right = (num_traits::pow(p, (k - i) as usize) << 1) + 1u32;
    left.gcd(&right).is_one()
}

/// `n(p^k, 2)` via the exponent condition.
pub fn count_prime_power(p: u64, k: u32) -> Result<PrimePowerCount, CountError> {
    if p == 2 || !arith::is_prime_u64(p) {
        return Err(CountError::NotOddPrime(p));
    }
    let surviving: Vec<u32> = (0..=k).filter(|&i| row_survives(p, i, k)).collect();
    Ok(PrimePowerCount {
        p,
        k,
        count: surviving.len() as u64,
        surviving,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(c: &SpecialCount) -> Vec<(u64, u64)> {
        use num_traits::ToPrimitive;
        c.witnesses
            .iter()
            .map(|w| (w.u.to_u64().unwrap(), w.v.to_u64().unwrap()))
            .collect()
    }

    #[test]
    fn special_examples() {
        let cache = FactorCache::new();
        let c = count_special(&BigUint::from(5u32), &cache).unwrap();
        assert_eq!(c.count, 1);
        assert_eq!(pairs(&c), vec![(1, 10)]);
        let c = count_special(&BigUint::from(1u32), &cache).unwrap();
        assert_eq!(pairs(&c), vec![(1, 2)]);
        let c = count_special(&BigUint::from(7u32), &cache).unwrap();
        assert_eq!(pairs(&c), vec![(1, 14), (2, 7)]);
        let c = count_special(&BigUint::from(4u32), &cache).unwrap();
        assert_eq!(pairs(&c), vec![(1, 8), (2, 4)]);
        assert_eq!(
            count_special(&BigUint::zero(), &cache),
            Err(CountError::ZeroGenus)
        );
    }

    #[test]
    fn prime_power_examples() {
        assert_eq!(count_prime_power(7, 1).unwrap().count, 2);
        assert_eq!(count_prime_power(3, 2).unwrap().count, 3);
        let c = count_prime_power(5, 9).unwrap();
        assert_eq!(c.count, 5);
        assert_eq!(c.surviving[0], 0);
        assert_eq!(count_prime_power(2, 3), Err(CountError::NotOddPrime(2)));
        assert_eq!(count_prime_power(9, 3), Err(CountError::NotOddPrime(9)));
    }

    #[test]
    fn both_counts_agree_on_prime_powers() {
        let cache = FactorCache::new();
        for p in (3u64..100).filter(|&p| arith::is_prime_u64(p)) {
            for k in 1..=6u32 {
                let g = num_traits::pow(BigUint::from(p), k as usize);
                let direct = count_special(&g, &cache).unwrap().count;
                let by_rows = count_prime_power(p, k).unwrap();
                assert_eq!(direct, by_rows.count, "p = {p}, k = {k}");
                assert_eq!(by_rows.surviving.first(), Some(&0));
            }
        }
    }
}
