//! Reduction of `gcd(p^alpha + 1, 2p^beta + 1)` through the Euclidean
//! algorithm on the exponents.
//!
//! Write `f_j = x^(r_j) - (-1)^(s_j) * 2^(t_j)` where `r_j` are the
//! Euclidean remainders of `(alpha, beta)` and `s_j`, `t_j` follow the same
//! recurrence as the remainders, started from `(1, 1)` and `(0, -1)`. Then
//! `f_0 = x^alpha + 1`, `f_1 = x^beta + 2^-1`, and consecutive pairs share
//! their gcd up to units of `Z[1/2]`. The last pair collapses to
//!
//! ```text
//! gcd(p^delta - (-1)^(s_n) 2^(t_n),  2^(alpha/delta) - (-1)^((alpha-beta)/delta))
//! ```
//!
//! with `delta = gcd(alpha, beta)`. The second argument is odd, so the
//! `Z[1/2]` gcd is the integer gcd.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith;
use crate::cli::json::big_as_string;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("exponents must be positive (got alpha = {alpha}, beta = {beta})")]
    ZeroExponent { alpha: u32, beta: u32 },
    #[error("prime bound must be at least 3")]
    PrimeBoundTooSmall,
}

/// The full record of the Euclidean run with sign and unit exponents.
///
/// With `n = quotients.len()`: `remainders` has `n + 2` entries ending in 0,
/// `signs` and `units` have `n + 2` entries as well.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EuclideanTrace {
    pub remainders: Vec<u64>,
    pub quotients: Vec<u64>,
    pub signs: Vec<i64>,
    pub units: Vec<i64>,
}

impl EuclideanTrace {
    /// Number of division steps.
    pub fn steps(&self) -> usize {
        self.quotients.len()
    }

    /// `r_n = gcd(r_0, r_1)`.
    pub fn gcd(&self) -> u64 {
        self.remainders[self.steps()]
    }

    /// Checks the recurrences and both closed forms
    /// `t_(n+1) = (-1)^(n+1) r_0 / r_n` and `s_(n+1) = (-1)^n (r_0 - r_1) / r_n`.
    pub fn check(&self) -> Result<(), String> {
        let n = self.steps();
        let (r, a, s, t) = (&self.remainders, &self.quotients, &self.signs, &self.units);
        if r.len() != n + 2 || s.len() != n + 2 || t.len() != n + 2 {
            return Err("length mismatch".into());
        }
        if r[n + 1] != 0 {
            return Err("trace does not end in zero".into());
        }
        if (s[0], s[1], t[0], t[1]) != (1, 1, 0, -1) {
            return Err("bad initial values".into());
        }
        for i in 0..n {
            if r[i] != a[i] * r[i + 1] + r[i + 2] {
                return Err(format!("remainder recurrence fails at {i}"));
            }
            if s[i + 2] != s[i] - a[i] as i64 * s[i + 1] {
                return Err(format!("sign recurrence fails at {i}"));
            }
            if t[i + 2] != t[i] - a[i] as i64 * t[i + 1] {
                return Err(format!("unit recurrence fails at {i}"));
            }
        }
        for i in 1..n {
            if r[i + 1] >= r[i] {
                return Err(format!("remainders not decreasing at {i}"));
            }
        }
        if r[n] != r[0].gcd(&r[1]) {
            return Err("last remainder is not the gcd".into());
        }
        let rn = r[n] as i64;
        let parity = |e: usize| if e % 2 == 0 { 1i64 } else { -1 };
        if t[n + 1] != parity(n + 1) * (r[0] as i64 / rn) {
            return Err(format!("t_(n+1) = {} breaks the closed form", t[n + 1]));
        }
        if s[n + 1] != parity(n) * ((r[0] as i64 - r[1] as i64) / rn) {
            return Err(format!("s_(n+1) = {} breaks the closed form", s[n + 1]));
        }
        Ok(())
    }
}

/// Runs the Euclidean algorithm on `(alpha, beta)` with sign and unit
/// bookkeeping. When `alpha < beta` the first quotient is 0.
pub fn euclidean_trace(alpha: u32, beta: u32) -> Result<EuclideanTrace, ReduceError> {
    if alpha == 0 || beta == 0 {
        return Err(ReduceError::ZeroExponent { alpha, beta });
    }
    let mut remainders = vec![u64::from(alpha), u64::from(beta)];
    let mut quotients = Vec::new();
    let mut signs = vec![1i64, 1];
    let mut units = vec![0i64, -1];
    let mut i = 0;
    while remainders[i + 1] != 0 {
        let (q, rem) = remainders[i].div_rem(&remainders[i + 1]);
        quotients.push(q);
        remainders.push(rem);
        signs.push(signs[i] - q as i64 * signs[i + 1]);
        units.push(units[i] - q as i64 * units[i + 1]);
        i += 1;
    }
    Ok(EuclideanTrace {
        remainders,
        quotients,
        signs,
        units,
    })
}

/// `gcd(p^delta - sign * 2^two_exp, modulus)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReducedGcdForm {
    pub delta: u64,
    /// `(-1)^(s_n)`, either 1 or -1.
    pub sign: i8,
    /// `t_n`; negative values mean powers of the inverse of 2.
    pub two_exp: i64,
    /// `2^(alpha/delta) - (-1)^((alpha-beta)/delta)`, always odd.
    #[serde(serialize_with = "big_as_string")]
    pub modulus: BigUint,
}

/// `2^e + 1` when `odd_exponent`, else `2^e - 1`.
pub fn two_power_modulus(e: u64, odd_exponent: bool) -> BigUint {
    let power = BigUint::one() << e;
    if odd_exponent {
        power + 1u32
    } else {
        power - 1u32
    }
}

pub fn reduce(alpha: u32, beta: u32) -> Result<ReducedGcdForm, ReduceError> {
    Ok(reduce_trace(&euclidean_trace(alpha, beta)?))
}

/// Reads the reduced form off an existing trace.
pub fn reduce_trace(trace: &EuclideanTrace) -> ReducedGcdForm {
    let n = trace.steps();
    let delta = trace.gcd();
    let alpha_q = trace.remainders[0] / delta;
    let beta_q = trace.remainders[1] / delta;
    // (alpha - beta)/delta has the parity of alpha/delta + beta/delta
    let odd = (alpha_q + beta_q) % 2 == 1;
    ReducedGcdForm {
        delta,
        sign: if trace.signs[n].rem_euclid(2) == 0 {
            1
        } else {
            -1
        },
        two_exp: trace.units[n],
        modulus: two_power_modulus(alpha_q, odd),
    }
}

/// `gcd(p^exponent - residue, modulus)` with `residue` in `[0, modulus)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Congruence {
    pub exponent: u64,
    #[serde(serialize_with = "big_as_string")]
    pub residue: BigUint,
    #[serde(serialize_with = "big_as_string")]
    pub modulus: BigUint,
}

impl Congruence {
    /// True when the gcd is 1 for every `p`.
    pub fn is_trivial(&self) -> bool {
        self.modulus.is_one()
    }

    /// `gcd(p^exponent - residue, modulus)` evaluated at `p`.
    pub fn gcd_at(&self, p: u64) -> BigUint {
        if self.modulus.is_one() {
            return BigUint::one();
        }
        let power = BigUint::from(p).modpow(&BigUint::from(self.exponent), &self.modulus);
        let diff = arith::reduce_mod(
            &(BigInt::from(power) - BigInt::from(self.residue.clone())),
            &self.modulus,
        );
        diff.gcd(&self.modulus)
    }
}

/// Resolves `sign * 2^two_exp` to a residue modulo the (odd) modulus.
/// A modulus of 1 gives `(0, 1)`.
pub fn normalize_target(form: &ReducedGcdForm) -> Congruence {
    Congruence {
        exponent: form.delta,
        residue: arith::signed_power_of_two_mod(form.sign, form.two_exp, &form.modulus),
        modulus: form.modulus.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionCounterexample {
    pub p: u64,
    #[serde(serialize_with = "big_as_string")]
    pub direct: BigUint,
    #[serde(serialize_with = "big_as_string")]
    pub reduced: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionReport {
    pub alpha: u32,
    pub beta: u32,
    pub primes_checked: usize,
    pub counterexample: Option<ReductionCounterexample>,
}

impl ReductionReport {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// `gcd(p^alpha + 1, 2p^beta + 1)` by bignum arithmetic.
pub fn direct_gcd(p: u64, alpha: u32, beta: u32) -> BigUint {
    let p = BigUint::from(p);
    let left = num_traits::pow(p.clone(), alpha as usize) + 1u32;
    let right = (num_traits::pow(p, beta as usize) << 1) + 1u32;
    left.gcd(&right)
}

/// Odd primes up to `bound`, increasing.
pub fn odd_primes_up_to(bound: u64) -> Vec<u64> {
    (3..=bound)
        .step_by(2)
        .filter(|&p| arith::is_prime_u64(p))
        .collect()
}

/// Compares the direct gcd with the reduced congruence at every odd prime
/// `p <= prime_bound`, stopping at the first disagreement.
pub fn verify_reduction(
    alpha: u32,
    beta: u32,
    prime_bound: u64,
) -> Result<ReductionReport, ReduceError> {
    if prime_bound < 3 {
        return Err(ReduceError::PrimeBoundTooSmall);
    }
    let target = normalize_target(&reduce(alpha, beta)?);
    let primes = odd_primes_up_to(prime_bound);
    let mut checked = 0;
    let mut counterexample = None;
    for &p in &primes {
        checked += 1;
        let direct = direct_gcd(p, alpha, beta);
        let reduced = target.gcd_at(p);
        if direct != reduced {
            counterexample = Some(ReductionCounterexample { p, direct, reduced });
            break;
        }
    }
    Ok(ReductionReport {
        alpha,
        beta,
        primes_checked: checked,
        counterexample,
    })
}

impl std::fmt::Display for Congruence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let power = if self.exponent == 1 {
            "p".to_string()
        } else {
            format!("p^{}", self.exponent)
        };
        if self.residue.is_zero() {
            write!(f, "gcd({power}, {})", self.modulus)
        } else {
            write!(f, "gcd({power} - {}, {})", self.residue, self.modulus)
        }
    }
}

impl ReducedGcdForm {
    /// Whether this form is trivially 1 at every prime.
    pub fn is_trivial(&self) -> bool {
        self.modulus.is_one()
    }

    pub fn modulus_u64(&self) -> Option<u64> {
        self.modulus.to_u64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_examples() {
        let t = euclidean_trace(5, 4).unwrap();
        assert_eq!(t.remainders, vec![5, 4, 1, 0]);
        assert_eq!(t.quotients, vec![1, 4]);
        assert_eq!(t.signs, vec![1, 1, 0, 1]);
        assert_eq!(t.units, vec![0, -1, 1, -5]);
        t.check().unwrap();

        let t = euclidean_trace(3, 3).unwrap();
        assert_eq!(t.remainders, vec![3, 3, 0]);
        assert_eq!(t.quotients, vec![1]);
        assert_eq!(t.signs, vec![1, 1, 0]);
        assert_eq!(t.units, vec![0, -1, 1]);
        t.check().unwrap();

        let t = euclidean_trace(2, 7).unwrap();
        let n = t.steps();
        assert_eq!(t.gcd(), 1);
        assert_eq!(t.quotients[0], 0);
        let parity = if (n + 1) % 2 == 0 { 1 } else { -1 };
        assert_eq!(t.units[n + 1], parity * 2);
        t.check().unwrap();

        assert!(euclidean_trace(9, 0).is_err());
    }

    #[test]
    fn closed_forms_hold() {
        for alpha in 1..=200 {
            for beta in 1..=200 {
                euclidean_trace(alpha, beta)
                    .unwrap()
                    .check()
                    .unwrap_or_else(|e| panic!("({alpha}, {beta}): {e}"));
            }
        }
    }

    fn as_pair(c: &Congruence) -> (u64, u64) {
        (c.residue.to_u64().unwrap(), c.modulus.to_u64().unwrap())
    }

    #[test]
    fn reduce_examples() {
        let f = reduce(5, 4).unwrap();
        assert_eq!((f.delta, f.sign, f.two_exp), (1, 1, 1));
        assert_eq!(f.modulus, BigUint::from(33u32));
        assert_eq!(as_pair(&normalize_target(&f)), (2, 33));

        let f = reduce(7, 2).unwrap();
        assert_eq!(f.delta, 1);
        assert_eq!(as_pair(&normalize_target(&f)), (8, 129));

        // gcd(2p - 1, 5) = gcd(p - 3, 5)
        let f = reduce(2, 7).unwrap();
        assert_eq!(f.delta, 1);
        assert_eq!(as_pair(&normalize_target(&f)), (3, 5));
    }

    #[test]
    fn normalize_examples() {
        let form = |sign, two_exp, modulus: u32| ReducedGcdForm {
            delta: 1,
            sign,
            two_exp,
            modulus: BigUint::from(modulus),
        };
        assert_eq!(as_pair(&normalize_target(&form(1, 1, 33))), (2, 33));
        // 2^-5 = -1 mod 33
        assert_eq!(as_pair(&normalize_target(&form(1, -5, 33))), (32, 33));
        assert_eq!(as_pair(&normalize_target(&form(1, 0, 1))), (0, 1));
        assert_eq!(as_pair(&normalize_target(&form(-1, 1, 3))), (1, 3));
    }

    #[test]
    fn verify_examples() {
        let r = verify_reduction(5, 4, 200).unwrap();
        assert!(r.holds());
        assert_eq!(r.primes_checked, 45);
        let r = verify_reduction(1, 1, 200).unwrap();
        assert!(r.holds());
        assert!(normalize_target(&reduce(1, 1).unwrap()).is_trivial());
        assert!(verify_reduction(9, 0, 200).is_err());
        assert!(verify_reduction(1, 1, 2).is_err());
    }

    #[test]
    fn moduli_are_odd_and_gcds_odd() {
        for alpha in 1..=24 {
            for beta in 1..=24 {
                let f = reduce(alpha, beta).unwrap();
                assert!(f.modulus.bit(0), "({alpha}, {beta})");
            }
        }
        for p in odd_primes_up_to(300) {
            for alpha in 1..=6 {
                for beta in 1..=6 {
                    assert!(direct_gcd(p, alpha, beta).bit(0));
                }
            }
        }
    }

    #[test]
    fn sign_parity_matches_k_over_delta() {
        for k in 2..=40u32 {
            for i in 1..k {
                let delta = i.gcd(&k);
                let by_pair = (i as i64 - (k - i) as i64) / delta as i64;
                assert_eq!(by_pair.rem_euclid(2), ((k / delta) % 2) as i64);
                let f = reduce(i, k - i).unwrap();
                let expected = two_power_modulus(u64::from(i / delta), (k / delta) % 2 == 1);
                assert_eq!(f.modulus, expected);
            }
        }
    }
}
