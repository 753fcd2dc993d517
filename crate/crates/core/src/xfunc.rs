//! Residue-class indicators.
//!
//! For a prime `q`, `X_{a,q}(n)` is 0 when `n = a (mod q)` and 1 otherwise.
//! For composite `q` it is the product over the distinct primes of `q`, so
//! `X_{a,q}(n) = 1` exactly when `gcd(n - a, q) = 1`.
//!
//! Conditions on `p^s` are brought back to conditions on `p`: first the part
//! of `s` coprime to `q - 1` is inverted (`X_{a,q}(n^s) = X_{a^d,q}(n^t)`
//! with `t = gcd(s, q-1)`), then `X_{a,q}(n^t)` with `t | q - 1` is either
//! identically 1 (no `t`-th root of `a`) or the product over the `t` roots.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{self, ArithError, FactorBudget};
use crate::factor_cache::FactorCache;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum XError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus must be at least 2")]
    ModulusTooSmall,
    #[error("prime factor {0} of the modulus does not fit in 64 bits")]
    PrimeTooLarge(BigUint),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// `X_{a,q}` for a prime `q`, with `a` reduced into `[0, q)`.
///
/// Ordered by `(q, a)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasicX {
    q: u64,
    a: u64,
}

impl BasicX {
    pub fn new(a: i64, q: u64) -> Result<Self, XError> {
        if !arith::is_prime_u64(q) {
            return Err(XError::NotPrime(q));
        }
        Ok(BasicX {
            q,
            a: arith::residue_i64(a, q),
        })
    }

    /// `q` must be prime and `a < q`.
    pub(crate) fn from_reduced(a: u64, q: u64) -> Self {
        debug_assert!(a < q);
        BasicX { q, a }
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn eval(&self, n: i64) -> u8 {
        self.eval_residue(arith::residue_i64(n, self.q))
    }

    pub fn eval_u64(&self, n: u64) -> u8 {
        self.eval_residue(n % self.q)
    }

    /// Evaluation at a residue already reduced mod `q`.
    #[inline]
    pub fn eval_residue(&self, r: u64) -> u8 {
        u8::from(r != self.a)
    }
}

impl Serialize for BasicX {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("BasicX", 2)?;
        st.serialize_field("a", &self.a)?;
        st.serialize_field("q", &self.q)?;
        st.end()
    }
}

impl fmt::Display for BasicX {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X_{{{},{}}}", self.a, self.q)
    }
}

/// A product of prime-modulus indicators, kept as a set since `X * X = X`.
/// The empty product is the constant 1.
///
/// Products order by number of factors first, then lexicographically by
/// their `(q, a)` sequence.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct XProduct(BTreeSet<BasicX>);

impl XProduct {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn single(x: BasicX) -> Self {
        XProduct(BTreeSet::from([x]))
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &BasicX> {
        self.0.iter()
    }

    pub fn contains(&self, x: &BasicX) -> bool {
        self.0.contains(x)
    }

    pub fn insert(&mut self, x: BasicX) {
        self.0.insert(x);
    }

    pub fn remove(&mut self, x: &BasicX) -> bool {
        self.0.remove(x)
    }

    pub fn mul(&self, other: &XProduct) -> XProduct {
        XProduct(self.0.union(&other.0).copied().collect())
    }

    pub fn eval(&self, n: i64) -> u8 {
        u8::from(self.0.iter().all(|x| x.eval(n) == 1))
    }

    pub fn eval_u64(&self, n: u64) -> u8 {
        u8::from(self.0.iter().all(|x| x.eval_u64(n) == 1))
    }

    /// Renders as `X_{a,q}(var)X_{b,r}(var)`; the empty product as `1`.
    pub fn render(&self, var: &str) -> String {
        if self.0.is_empty() {
            return "1".into();
        }
        self.0.iter().map(|x| format!("{x}({var})")).collect()
    }
}

impl FromIterator<BasicX> for XProduct {
    fn from_iter<I: IntoIterator<Item = BasicX>>(iter: I) -> Self {
        XProduct(iter.into_iter().collect())
    }
}

impl Ord for XProduct {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.0.iter().cmp(other.0.iter()))
    }
}

impl PartialOrd for XProduct {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Serialize for XProduct {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter())
    }
}

impl fmt::Display for XProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("p"))
    }
}

/// `X_{a,q}` for an arbitrary `q >= 2`, with its prime expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeX {
    pub a: BigInt,
    pub q: BigUint,
    pub expansion: XProduct,
}

impl CompositeX {
    /// Direct evaluation: 1 iff `gcd(n - a, q) = 1`.
    pub fn eval_gcd(&self, n: &BigInt) -> u8 {
        let diff = arith::reduce_mod(&(n - &self.a), &self.q);
        u8::from(diff.gcd(&self.q).is_one())
    }

    pub fn eval(&self, n: i64) -> u8 {
        self.expansion.eval(n)
    }
}

/// Splits `X_{a,q}` into the product of `X_{a mod q_i, q_i}` over the
/// distinct primes `q_i` of `q`.
pub fn decompose(a: &BigInt, q: &BigUint, cache: &FactorCache) -> Result<CompositeX, XError> {
    decompose_with(a, q, cache, FactorBudget::default())
}

/// [`decompose`] with an explicit factoring budget.
pub fn decompose_with(
    a: &BigInt,
    q: &BigUint,
    cache: &FactorCache,
    budget: FactorBudget,
) -> Result<CompositeX, XError> {
    if *q < BigUint::from(2u32) {
        return Err(XError::ModulusTooSmall);
    }
    let f = arith::factorize_with(q, cache, budget)?;
    let mut expansion = XProduct::one();
    for p in f.primes() {
        let small = p.to_u64().ok_or_else(|| XError::PrimeTooLarge(p.clone()))?;
        let r = arith::reduce_mod(a, p).to_u64().expect("below a u64 prime");
        expansion.insert(BasicX::from_reduced(r, small));
    }
    Ok(CompositeX {
        a: a.clone(),
        q: q.clone(),
        expansion,
    })
}

/// `X_{a,q}(n^s) = X_{a^d,q}(n^t)` with `t = gcd(s, q-1)` and `e = s/t`.
/// Returns the new indicator and `t`.
///
/// `d` inverts `e` on the `t`-th powers (`de = 1 mod (q-1)/t`) and is taken
/// coprime to `q - 1`, so that `a -> a^d` also keeps non-`t`-th powers out
/// of reach. When `e` is coprime to `q - 1` this is just `de = 1 mod q-1`.
///
/// Panics if `s` is zero.
pub fn strip_exponent_rsa(x: BasicX, s: u64) -> (BasicX, u64) {
    assert!(s >= 1, "exponent must be positive");
    let order = x.q - 1;
    if order == 1 {
        // q = 2: n^s and n have the same parity
        return (x, 1);
    }
    let t = s.gcd(&order);
    let sub = order / t;
    let base = if sub == 1 {
        1
    } else {
        arith::inverse_mod_u64((s / t) % sub, sub).expect("s/t is coprime to (q-1)/t")
    };
    let d = (0..)
        .map(|j| base + j * sub)
        .find(|d| *d > 0 && d.gcd(&order) == 1)
        .expect("a unit lift exists");
    let a = arith::pow_mod_u64(x.a, d, x.q);
    (BasicX::from_reduced(a, x.q), t)
}

/// The least `i` in `[0, (q-1)/s)` with `a = g^(s i) (mod q)`, where `g` is
/// the smallest primitive root; `None` when `a` is not an `s`-th power.
pub fn power_residue_index(a: u64, q: u64, s: u64) -> Option<u64> {
    let g = arith::primitive_root(q);
    let step = arith::pow_mod_u64(g, s, q);
    let mut acc = 1u64;
    for i in 0..(q - 1) / s {
        if acc == a {
            return Some(i);
        }
        acc = arith::mul_mod_u64(acc, step, q);
    }
    None
}

/// `X_{a,q}(n^s)` for `s | q - 1` as a product of indicators in `n`:
/// the constant 1 when `a` is not an `s`-th power, otherwise the product of
/// `X_{g^(i + j(q-1)/s), q}` for `0 <= j < s`.
///
/// `a = 0` gives `X_{0,q}` back, since `n^s = 0` only for `n = 0`.
///
/// Panics unless `s >= 1` divides `q - 1`.
pub fn expand_power(x: BasicX, s: u64) -> XProduct {
    let order = x.q - 1;
    assert!(s >= 1 && order % s == 0, "{s} does not divide {order}");
    if s == 1 || x.a == 0 {
        return XProduct::single(x);
    }
    let Some(i) = power_residue_index(x.a, x.q, s) else {
        return XProduct::one();
    };
    let g = arith::primitive_root(x.q);
    let stride = order / s;
    (0..s)
        .map(|j| BasicX::from_reduced(arith::pow_mod_u64(g, i + j * stride, x.q), x.q))
        .collect()
}

/// `X_{a,q}(n^s)` for any `s >= 1`: strip the invertible part of the
/// exponent, then expand the rest.
pub fn reduce_basic_power(x: BasicX, s: u64) -> XProduct {
    if s == 1 {
        return XProduct::single(x);
    }
    let (stripped, t) = strip_exponent_rsa(x, s);
    expand_power(stripped, t)
}

/// Rewrites `X_{a,q}(n^s)` as a product of prime-modulus indicators in `n`
/// (possibly empty, meaning the constant 1).
pub fn reduce_composite_power(
    a: &BigInt,
    q: &BigUint,
    s: u64,
    cache: &FactorCache,
) -> Result<XProduct, XError> {
    reduce_composite_power_with(a, q, s, cache, FactorBudget::default())
}

pub fn reduce_composite_power_with(
    a: &BigInt,
    q: &BigUint,
    s: u64,
    cache: &FactorCache,
    budget: FactorBudget,
) -> Result<XProduct, XError> {
    assert!(s >= 1, "exponent must be positive");
    let composite = decompose_with(a, q, cache, budget)?;
    let mut out = XProduct::one();
    for &x in composite.expansion.iter() {
        out = out.mul(&reduce_basic_power(x, s));
    }
    Ok(out)
}
