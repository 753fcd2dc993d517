//! Integer kernel: modular arithmetic, primality, factorization and the
//! multiplicative group modulo a prime.
//!
//! Values that can grow without bound (`p^k + 1`, `2^m +- 1`, moduli `M(k)`)
//! are [`BigUint`]. Residues modulo the primes that occur in counting
//! formulas are machine words, and have `u64` fast paths here.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::factor_cache::FactorCache;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("{a} is not invertible modulo {modulus}")]
    NotInvertible { a: BigInt, modulus: BigUint },
    #[error("factorization of {n} exceeded the work budget (unfactored cofactor {cofactor})")]
    FactorizationTimeout {
        n: BigUint,
        /// Prime factors found before the budget ran out.
        found: Vec<BigUint>,
        cofactor: BigUint,
    },
    #[error("invalid factorization: {0}")]
    InvalidFactorization(String),
}

/// Witnesses making Miller-Rabin deterministic below 3.3 * 10^24.
const DETERMINISTIC_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Extra random rounds for inputs at or above 2^64.
pub const PROBABILISTIC_ROUNDS: usize = 40;

const RNG_SEED: u64 = 0x7477_6f67_656e_0001;

/// A verified prime factorization.
///
/// Primes are strictly increasing, exponents are at least one and the
/// product of `prime^exponent` is `value`. The factorization of 1 is empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Factorization {
    value: BigUint,
    factors: Vec<(BigUint, u32)>,
}

impl Factorization {
    pub fn one() -> Self {
        Factorization {
            value: BigUint::one(),
            factors: Vec::new(),
        }
    }

    /// Builds a factorization from `(prime, exponent)` pairs in any order.
    ///
    /// Every prime is checked with [`is_prime`]; repeated primes and zero
    /// exponents are rejected.
    pub fn from_factors(mut factors: Vec<(BigUint, u32)>) -> Result<Self, ArithError> {
        factors.sort();
        let mut value = BigUint::one();
        for (idx, (p, e)) in factors.iter().enumerate() {
            if *e == 0 {
                return Err(ArithError::InvalidFactorization(format!(
                    "exponent of {p} is zero"
                )));
            }
            if idx > 0 && factors[idx - 1].0 == *p {
                return Err(ArithError::InvalidFactorization(format!(
                    "prime {p} repeated"
                )));
            }
            if !is_prime(p) {
                return Err(ArithError::InvalidFactorization(format!(
                    "{p} is not prime"
                )));
            }
            value *= num_traits::pow(p.clone(), *e as usize);
        }
        Ok(Factorization { value, factors })
    }

    /// Like [`Factorization::from_factors`], additionally checking the product.
    pub fn new(value: BigUint, factors: Vec<(BigUint, u32)>) -> Result<Self, ArithError> {
        let f = Self::from_factors(factors)?;
        if f.value != value {
            return Err(ArithError::InvalidFactorization(format!(
                "product is {} but value is {value}",
                f.value
            )));
        }
        Ok(f)
    }

    /// Assembles a factorization whose primes came out of the factoring
    /// routines below and are therefore already known to be prime.
    fn from_prime_map(primes: BTreeMap<BigUint, u32>) -> Self {
        let mut value = BigUint::one();
        for (p, e) in &primes {
            value *= num_traits::pow(p.clone(), *e as usize);
        }
        Factorization {
            value,
            factors: primes.into_iter().collect(),
        }
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn factors(&self) -> &[(BigUint, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigUint> {
        self.factors.iter().map(|(p, _)| p)
    }

    /// Product of the distinct primes.
    pub fn radical(&self) -> BigUint {
        self.primes().product()
    }

    pub fn is_square_free(&self) -> bool {
        self.factors.iter().all(|(_, e)| *e == 1)
    }

    pub fn divisor_count(&self) -> u64 {
        self.factors
            .iter()
            .map(|(_, e)| u64::from(*e) + 1)
            .product()
    }
}

impl fmt::Display for Factorization {
    /// `3^3 * 19`; the empty factorization prints as `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (idx, (p, e)) in self.factors.iter().enumerate() {
            if idx > 0 {
                write!(f, " * ")?;
            }
            if *e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Word-sized helpers.

#[inline]
pub fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn inverse_mod_u64(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = ((a % m) as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// `n mod m` in `[0, m)` for a signed `n`.
#[inline]
pub fn residue_i64(n: i64, m: u64) -> u64 {
    (n as i128).rem_euclid(m as i128) as u64
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &DETERMINISTIC_WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    'witness: for &a in &DETERMINISTIC_WITNESSES {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// ---------------------------------------------------------------------------
// Arbitrary precision.

/// `base^exp mod modulus` in `[0, modulus)`. Negative bases are reduced
/// first.
///
/// Panics if `modulus` is zero.
pub fn mod_pow(base: &BigInt, exp: &BigUint, modulus: &BigUint) -> BigUint {
    assert!(!modulus.is_zero(), "modulus must be positive");
    let b = reduce_mod(base, modulus);
    b.modpow(exp, modulus)
}

/// `n mod m` in `[0, m)`.
pub fn reduce_mod(n: &BigInt, m: &BigUint) -> BigUint {
    let m_signed = BigInt::from(m.clone());
    n.mod_floor(&m_signed)
        .to_biguint()
        .expect("mod_floor by a positive modulus is non-negative")
}

/// The inverse of `a` modulo `modulus`, in `[0, modulus)`.
pub fn mod_inverse(a: &BigInt, modulus: &BigUint) -> Result<BigUint, ArithError> {
    let m = BigInt::from(modulus.clone());
    let ext = a.mod_floor(&m).extended_gcd(&m);
    if !ext.gcd.is_one() {
        return Err(ArithError::NotInvertible {
            a: a.clone(),
            modulus: modulus.clone(),
        });
    }
    Ok(ext
        .x
        .mod_floor(&m)
        .to_biguint()
        .expect("non-negative after mod_floor"))
}

/// Primality test.
///
/// Deterministic for `n < 2^64` (Miller-Rabin with the first twelve prime
/// witnesses). Above that, the same fixed witnesses plus
/// [`PROBABILISTIC_ROUNDS`] rounds with bases drawn from a fixed-seed
/// ChaCha stream, so the answer is reproducible; a composite passes with
/// probability below `4^-40`.
pub fn is_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &p in &DETERMINISTIC_WITNESSES {
        if (n % p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().expect("n - 1 > 0");
    let d = &n_minus_1 >> s;

    let mut rng = ChaCha8Rng::seed_from_u64(RNG_SEED);
    let random_bases = (0..PROBABILISTIC_ROUNDS).map(|_| {
        // base in [2, 2^64), always below n here
        BigUint::from(rng.gen_range(2..u64::MAX))
    });
    let bases = DETERMINISTIC_WITNESSES
        .iter()
        .map(|&a| BigUint::from(a))
        .chain(random_bases);

    'witness: for a in bases {
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Work limits for [`factorize_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorBudget {
    /// Trial division by every integer up to this bound.
    pub trial_bound: u32,
    /// Total Pollard-rho iterations allowed across all splits.
    pub rho_iterations: u64,
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget {
            trial_bound: 10_000,
            rho_iterations: 10_000_000,
        }
    }
}

/// Factors `n` with the default [`FactorBudget`], consulting and updating
/// `cache`.
pub fn factorize(n: &BigUint, cache: &FactorCache) -> Result<Factorization, ArithError> {
    factorize_with(n, cache, FactorBudget::default())
}

/// Factors `n`: cache lookup, trial division, then Pollard rho with Brent's
/// cycle detection on whatever composite cofactors remain (each cofactor is
/// looked up in the cache again before it is split).
///
/// Panics if `n` is zero.
pub fn factorize_with(
    n: &BigUint,
    cache: &FactorCache,
    budget: FactorBudget,
) -> Result<Factorization, ArithError> {
    assert!(!n.is_zero(), "cannot factor zero");
    if n.is_one() {
        return Ok(Factorization::one());
    }
    if let Some(f) = cache.get(n) {
        return Ok(f);
    }

    let mut primes: BTreeMap<BigUint, u32> = BTreeMap::new();
    let mut rest = n.clone();

    let mut d = 2u32;
    while d <= budget.trial_bound {
        if BigUint::from(d) * BigUint::from(d) > rest {
            break;
        }
        if (&rest % d).is_zero() {
            let mut e = 0;
            while (&rest % d).is_zero() {
                rest /= d;
                e += 1;
            }
            primes.insert(BigUint::from(d), e);
        }
        d += if d == 2 { 1 } else { 2 };
    }

    let mut rng = ChaCha8Rng::seed_from_u64(RNG_SEED);
    let mut iterations = budget.rho_iterations;
    let mut pending = vec![rest];
    while let Some(m) = pending.pop() {
        if m.is_one() {
            continue;
        }
        if is_prime(&m) {
            *primes.entry(m).or_insert(0) += 1;
            continue;
        }
        if let Some(known) = cache.get(&m) {
            for (p, e) in known.factors() {
                *primes.entry(p.clone()).or_insert(0) += e;
            }
            continue;
        }
        let root = m.sqrt();
        if &root * &root == m {
            pending.push(root.clone());
            pending.push(root);
            continue;
        }
        match split(&m, &mut rng, &mut iterations) {
            Some(factor) => {
                let other = &m / &factor;
                pending.push(factor);
                pending.push(other);
            }
            None => {
                let mut cofactor = m;
                for c in pending {
                    cofactor *= c;
                }
                return Err(ArithError::FactorizationTimeout {
                    n: n.clone(),
                    found: primes.into_keys().collect(),
                    cofactor,
                });
            }
        }
    }

    let f = Factorization::from_prime_map(primes);
    debug_assert_eq!(f.value(), n);
    cache.insert(f.clone());
    Ok(f)
}

/// Finds a nontrivial factor of the composite `m`, trying successive random
/// polynomials until the iteration budget runs out.
fn split(m: &BigUint, rng: &mut ChaCha8Rng, iterations: &mut u64) -> Option<BigUint> {
    loop {
        if *iterations == 0 {
            return None;
        }
        let outcome = match m.to_u64() {
            Some(small) => {
                let c = rng.gen_range(1..small);
                let y = rng.gen_range(0..small);
                brent_u64(small, c, y, iterations).map(BigUint::from)
            }
            None => {
                let c = BigUint::from(rng.gen_range(1..u64::MAX));
                let y = BigUint::from(rng.gen_range(0..u64::MAX));
                brent_big(m, &c, y, iterations)
            }
        };
        match outcome {
            Rho::Factor(d) => return Some(d),
            Rho::Failed => continue,
            Rho::OutOfBudget => return None,
        }
    }
}

enum Rho<T> {
    Factor(T),
    Failed,
    OutOfBudget,
}

impl<T> Rho<T> {
    fn map<U>(self, f: impl FnOnce(T) -> U) -> Rho<U> {
        match self {
            Rho::Factor(t) => Rho::Factor(f(t)),
            Rho::Failed => Rho::Failed,
            Rho::OutOfBudget => Rho::OutOfBudget,
        }
    }
}

const BRENT_BATCH: u64 = 128;

fn take(iterations: &mut u64, steps: u64) -> bool {
    if *iterations < steps {
        *iterations = 0;
        return false;
    }
    *iterations -= steps;
    true
}

fn brent_u64(n: u64, c: u64, start: u64, iterations: &mut u64) -> Rho<u64> {
    let f = |x: u64| ((mul_mod_u64(x, x, n) as u128 + c as u128) % n as u128) as u64;
    let (mut x, mut y, mut ys) = (start, start, start);
    let (mut r, mut q, mut g) = (1u64, 1u64, 1u64);
    while g == 1 {
        x = y;
        if !take(iterations, r) {
            return Rho::OutOfBudget;
        }
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            let steps = BRENT_BATCH.min(r - k);
            if !take(iterations, steps) {
                return Rho::OutOfBudget;
            }
            for _ in 0..steps {
                y = f(y);
                q = mul_mod_u64(q, x.abs_diff(y), n);
            }
            g = q.gcd(&n);
            k += BRENT_BATCH;
        }
        r *= 2;
    }
    if g == n {
        // the batch overshot; replay it one step at a time
        loop {
            if !take(iterations, 1) {
                return Rho::OutOfBudget;
            }
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    if g == n {
        Rho::Failed
    } else {
        Rho::Factor(g)
    }
}

fn brent_big(n: &BigUint, c: &BigUint, start: BigUint, iterations: &mut u64) -> Rho<BigUint> {
    let f = |x: &BigUint| (x * x + c) % n;
    let abs_diff = |a: &BigUint, b: &BigUint| if a > b { a - b } else { b - a };
    let mut y = start % n;
    let mut x = y.clone();
    let mut ys = y.clone();
    let mut r = 1u64;
    let mut q = BigUint::one();
    let mut g = BigUint::one();
    while g.is_one() {
        x = y.clone();
        if !take(iterations, r) {
            return Rho::OutOfBudget;
        }
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            let steps = BRENT_BATCH.min(r - k);
            if !take(iterations, steps) {
                return Rho::OutOfBudget;
            }
            for _ in 0..steps {
                y = f(&y);
                q = (q * abs_diff(&x, &y)) % n;
            }
            g = q.gcd(n);
            k += BRENT_BATCH;
        }
        r *= 2;
    }
    if &g == n {
        loop {
            if !take(iterations, 1) {
                return Rho::OutOfBudget;
            }
            ys = f(&ys);
            g = abs_diff(&x, &ys).gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    if &g == n {
        Rho::Failed
    } else {
        Rho::Factor(g)
    }
}

/// The largest square-free divisor of `n`.
pub fn radical(n: &BigUint, cache: &FactorCache) -> Result<BigUint, ArithError> {
    Ok(factorize(n, cache)?.radical())
}

/// All divisors of `f.value()`, increasing.
pub fn divisors(f: &Factorization) -> Vec<BigUint> {
    let mut divs = vec![BigUint::one()];
    for (p, e) in f.factors() {
        let current = divs.len();
        let mut power = BigUint::one();
        for _ in 0..*e {
            power *= p;
            for idx in 0..current {
                let d = &divs[idx] * &power;
                divs.push(d);
            }
        }
    }
    divs.sort();
    divs
}

/// Factors a machine word without touching any shared cache. The rho budget
/// is unbounded; 64-bit inputs always split quickly.
pub fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    let big = BigUint::from(n);
    let scratch = FactorCache::new();
    let budget = FactorBudget {
        trial_bound: 1 << 12,
        rho_iterations: u64::MAX,
    };
    factorize_with(&big, &scratch, budget)
        .expect("unbounded budget")
        .factors()
        .iter()
        .map(|(p, e)| (p.to_u64().expect("factor of a u64"), *e))
        .collect()
}

/// The smallest positive generator of the multiplicative group mod `q`.
///
/// `q` must be prime. Returns 1 for `q = 2`.
pub fn primitive_root(q: u64) -> u64 {
    debug_assert!(is_prime_u64(q), "{q} is not prime");
    if q == 2 {
        return 1;
    }
    let order = q - 1;
    let cofactors: Vec<u64> = factor_u64(order).iter().map(|(r, _)| order / r).collect();
    (2..q)
        .find(|&g| cofactors.iter().all(|&c| pow_mod_u64(g, c, q) != 1))
        .expect("every prime has a primitive root")
}

/// `sign * 2^exp mod m`, for odd `m`, with `exp` possibly negative.
pub fn signed_power_of_two_mod(sign: i8, exp: i64, m: &BigUint) -> BigUint {
    if m.is_one() {
        return BigUint::zero();
    }
    let two = BigInt::from(2);
    let base = if exp >= 0 {
        BigUint::from(2u32)
    } else {
        mod_inverse(&two, m).expect("modulus is odd")
    };
    let power = base.modpow(&BigUint::from(exp.unsigned_abs()), m);
    if sign >= 0 {
        power
    } else {
        reduce_mod(&BigInt::from_biguint(Sign::Minus, power), m)
    }
}
