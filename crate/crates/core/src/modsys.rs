//! The moduli `m_k(i) = 2^(i/gcd(i,k)) - (-1)^(k/gcd(i,k))` and their
//! radical `M(k)`, modulo which `n(p^k, 2)` is periodic in `p`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{self, ArithError, FactorBudget, Factorization};
use crate::cli::json::{big_as_string, bigs_as_strings};
use crate::factor_cache::FactorCache;
use crate::gcdreduce::{odd_primes_up_to, two_power_modulus};
use crate::specialfact::count_prime_power;

/// `m_k(i)` for `1 <= i <= k`.
pub fn m_k(k: u32, i: u32) -> BigUint {
    assert!(1 <= i && i <= k, "need 1 <= i <= k");
    let d = i.gcd(&k);
    two_power_modulus(u64::from(i / d), (k / d) % 2 == 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModulusTerm {
    pub i: u32,
    #[serde(serialize_with = "big_as_string")]
    pub m: BigUint,
    /// `None` when the factorization could not be completed.
    #[serde(skip)]
    pub factors: Option<Factorization>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ModulusStatus {
    Complete,
    /// Some `m_k(i)` resisted factoring; `modulus` is then only the known
    /// square-free part of `M(k)`.
    Incomplete {
        failed_i: Vec<u32>,
        #[serde(serialize_with = "bigs_as_strings")]
        unfactored: Vec<BigUint>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModulusReport {
    pub k: u32,
    pub per_i: Vec<ModulusTerm>,
    #[serde(serialize_with = "big_as_string")]
    pub modulus: BigUint,
    #[serde(serialize_with = "bigs_as_strings")]
    pub primes: Vec<BigUint>,
    #[serde(flatten)]
    pub status: ModulusStatus,
}

impl ModulusReport {
    pub fn is_complete(&self) -> bool {
        self.status == ModulusStatus::Complete
    }

    /// `M(k)` as a (square-free) factorization.
    pub fn factorization(&self) -> Factorization {
        Factorization::from_factors(self.primes.iter().map(|p| (p.clone(), 1)).collect())
            .expect("primes came from verified factorizations")
    }
}

/// Computes `M(k)` as the union of the prime sets of the individual
/// `m_k(i)`; the product itself is never factored.
pub fn modulus_of(k: u32, cache: &FactorCache) -> ModulusReport {
    modulus_of_with(k, cache, FactorBudget::default())
}

/// [`modulus_of`] with an explicit factoring budget.
pub fn modulus_of_with(k: u32, cache: &FactorCache, budget: FactorBudget) -> ModulusReport {
    assert!(k >= 1, "k must be positive");
    let mut primes = BTreeSet::new();
    let mut failed_i = Vec::new();
    let mut unfactored = Vec::new();
    let mut per_i = Vec::with_capacity(k as usize);
    for i in 1..=k {
        let m = m_k(k, i);
        let factors = match arith::factorize_with(&m, cache, budget) {
            Ok(f) => {
                primes.extend(f.primes().cloned());
                Some(f)
            }
            Err(ArithError::FactorizationTimeout {
                found, cofactor, ..
            }) => {
                primes.extend(found);
                failed_i.push(i);
                unfactored.push(cofactor);
                None
            }
            Err(other) => unreachable!("factorize only times out: {other}"),
        };
        per_i.push(ModulusTerm { i, m, factors });
    }
    let modulus: BigUint = primes.iter().product();
    let status = if failed_i.is_empty() {
        ModulusStatus::Complete
    } else {
        ModulusStatus::Incomplete {
            failed_i,
            unfactored,
        }
    };
    ModulusReport {
        k,
        per_i,
        modulus,
        primes: primes.into_iter().collect(),
        status,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DependenceViolation {
    #[serde(serialize_with = "big_as_string")]
    pub residue: BigUint,
    pub first_prime: u64,
    pub first_count: u64,
    pub prime: u64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DependenceReport {
    pub k: u32,
    #[serde(serialize_with = "big_as_string")]
    pub modulus: BigUint,
    pub primes_checked: usize,
    /// Primes skipped because they divide `M(k)`.
    pub excluded: Vec<u64>,
    pub classes: usize,
    pub values: Vec<u64>,
    pub violations: Vec<DependenceViolation>,
}

/// Groups the odd primes up to `prime_bound` by their class mod `M(k)` and
/// checks that `n(p^k, 2)` is constant on each class.
pub fn dependence_check(
    k: u32,
    prime_bound: u64,
    cache: &FactorCache,
) -> Result<DependenceReport, ArithError> {
    let report = modulus_of(k, cache);
    if let ModulusStatus::Incomplete { unfactored, .. } = &report.status {
        let n = unfactored[0].clone();
        return Err(ArithError::FactorizationTimeout {
            n: n.clone(),
            found: Vec::new(),
            cofactor: n,
        });
    }
    let modulus = report.modulus;
    let (excluded, primes): (Vec<u64>, Vec<u64>) = odd_primes_up_to(prime_bound)
        .into_iter()
        .partition(|&p| (&modulus % p).to_u64() == Some(0));
    let counts: Vec<(u64, u64)> = primes
        .par_iter()
        .map(|&p| (p, count_prime_power(p, k).expect("odd prime").count))
        .collect();

    let mut classes: BTreeMap<BigUint, (u64, u64)> = BTreeMap::new();
    let mut values = BTreeSet::new();
    let mut violations = Vec::new();
    for (p, count) in counts {
        values.insert(count);
        let residue = BigUint::from(p) % &modulus;
        match classes.get(&residue) {
            Some(&(first_prime, first_count)) if first_count != count => {
                violations.push(DependenceViolation {
                    residue,
                    first_prime,
                    first_count,
                    prime: p,
                    count,
                });
            }
            Some(_) => {}
            None => {
                classes.insert(residue, (p, count));
            }
        }
    }
    Ok(DependenceReport {
        k,
        modulus,
        primes_checked: primes.len(),
        excluded,
        classes: classes.len(),
        values: values.into_iter().collect(),
        violations,
    })
}

/// Whether `n` is square-free, by the cache-backed factorization.
pub fn is_square_free(n: &BigUint, cache: &FactorCache) -> Result<bool, ArithError> {
    if n.is_one() {
        return Ok(true);
    }
    Ok(arith::factorize(n, cache)?.is_square_free())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modulus_examples() {
        let cache = FactorCache::new();
        assert_eq!(modulus_of(3, &cache).modulus, BigUint::from(15u32));
        assert_eq!(modulus_of(1, &cache).modulus, BigUint::from(3u32));
        let r = modulus_of(9, &cache);
        assert!(r.is_complete());
        assert_eq!(r.modulus, BigUint::from(30_998_055u32));
        assert_eq!(r.factorization().to_string(), "3 * 5 * 11 * 17 * 43 * 257");
    }

    #[test]
    fn odd_k_moduli_are_plus_one() {
        for k in [1u32, 3, 5, 7, 9, 11] {
            for i in 1..=k {
                let e = i / i.gcd(&k);
                assert_eq!(m_k(k, i), (BigUint::one() << e) + 1u32);
            }
        }
    }

    #[test]
    fn moduli_square_free_and_odd() {
        let cache = FactorCache::seeded();
        for k in 1..=16 {
            let r = modulus_of(k, &cache);
            assert!(r.is_complete());
            assert!(r.modulus.bit(0), "k = {k}");
            assert!(is_square_free(&r.modulus, &cache).unwrap());
            let product: BigUint = r.per_i.iter().map(|t| t.m.clone()).product();
            for p in &r.primes {
                assert!((&product % p).to_u64() == Some(0));
            }
        }
    }

    #[test]
    fn incomplete_when_budget_fails() {
        let cache = FactorCache::new();
        let blocked = FactorBudget {
            trial_bound: 2,
            rho_iterations: 0,
        };
        // 2^9 - 1 = 7 * 73 needs a split; everything else for k = 10 is prime
        // or found by the cache once factored
        let r = modulus_of_with(10, &cache, blocked);
        match &r.status {
            ModulusStatus::Incomplete {
                failed_i,
                unfactored,
            } => {
                assert!(failed_i.contains(&9));
                assert!(unfactored.contains(&BigUint::from(511u32)));
            }
            ModulusStatus::Complete => panic!("expected incomplete report"),
        }
        assert!(!r.is_complete());
        // the known part still divides the true M(10)
        assert_eq!(
            (BigUint::from(16_548_735u32) % &r.modulus).to_u64(),
            Some(0)
        );
    }

    #[test]
    fn dependence_small_k() {
        let cache = FactorCache::new();
        let r = dependence_check(4, 10_000, &cache).unwrap();
        assert!(r.violations.is_empty());
        assert_eq!(r.values, vec![4, 5]);
        let r = dependence_check(2, 1000, &cache).unwrap();
        assert!(r.violations.is_empty());
        assert_eq!(r.values, vec![3]);
        assert_eq!(r.excluded, vec![3]);
    }
}
