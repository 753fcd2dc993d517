//! Counting formulas for `n(p^k, 2)`.
//!
//! Each of the `k + 1` rows `gcd(p^i + 1, 2p^(k-i) + 1) = 1` becomes either
//! the constant 1 or a product of prime-modulus indicators in `p`:
//! - `i = 0` always survives: `gcd(2, 2p^k + 1) = 1`;
//! - `0 < i < k` goes through the Euclidean reduction to
//!   `gcd(p^delta - a, c) = 1`, i.e. `X_{a,c}(p^delta)`;
//! - `i = k` is `gcd(p^k + 1, 3) = 1`, i.e. `X_{-1,3}(p^k)`.
//!
//! Powers of `p` are then removed and composite moduli split into primes.

mod formula;
mod minimal;
mod parse;
mod render;

use std::fmt;

use num_bigint::{BigInt, BigUint};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{ArithError, FactorBudget};
use crate::factor_cache::FactorCache;
use crate::gcdreduce::{self, odd_primes_up_to, Congruence};
use crate::specialfact::count_prime_power;
use crate::xfunc::{self, XError, XProduct};

pub use formula::CountingFormula;
pub use minimal::{minimal_modulus, minimal_modulus_exhaustive, CellSpace};
pub use parse::{parse_formula, ParseError};
pub use render::{group_terms, render, Grouping, RenderStyle};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("synthesis blocked: could not factor {modulus} (row i = {i})")]
    Blocked { i: u32, modulus: BigUint },
    #[error("row i = {i}: prime {prime} exceeds 64 bits")]
    PrimeTooLarge { i: u32, prime: BigUint },
    #[error("k must be positive")]
    ZeroExponent,
}

/// Which gcd a row reduces to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RowTarget {
    /// `i = 0`: `gcd(2, 2p^k + 1) = 1`.
    Always,
    /// `gcd(p^exponent - residue, modulus)`.
    Reduced { congruence: Congruence },
    /// `i = k`: `gcd(p^k + 1, 3)`.
    Boundary { k: u32 },
}

impl fmt::Display for RowTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowTarget::Always => f.write_str("1"),
            RowTarget::Reduced { congruence } => write!(f, "{congruence}"),
            RowTarget::Boundary { k } => write!(f, "gcd(p^{k} + 1, 3)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SynthRow {
    pub i: u32,
    pub target: RowTarget,
    /// Indicator of the row surviving; the empty product means always.
    pub product: XProduct,
}

pub fn synthesize_rows(k: u32, cache: &FactorCache) -> Result<Vec<SynthRow>, SynthError> {
    synthesize_rows_with(k, cache, FactorBudget::default())
}

pub fn synthesize_rows_with(
    k: u32,
    cache: &FactorCache,
    budget: FactorBudget,
) -> Result<Vec<SynthRow>, SynthError> {
    if k == 0 {
        return Err(SynthError::ZeroExponent);
    }
    let mut rows = Vec::with_capacity(k as usize + 1);
    rows.push(SynthRow {
        i: 0,
        target: RowTarget::Always,
        product: XProduct::one(),
    });
    for i in 1..k {
        let form = gcdreduce::reduce(i, k - i).expect("both exponents positive");
        let congruence = gcdreduce::normalize_target(&form);
        let product = if congruence.is_trivial() {
            XProduct::one()
        } else {
            xfunc::reduce_composite_power_with(
                &BigInt::from(congruence.residue.clone()),
                &congruence.modulus,
                congruence.exponent,
                cache,
                budget,
            )
            .map_err(|e| row_error(i, e))?
        };
        rows.push(SynthRow {
            i,
            target: RowTarget::Reduced { congruence },
            product,
        });
    }
    let product = xfunc::reduce_composite_power_with(
        &BigInt::from(-1),
        &BigUint::from(3u32),
        u64::from(k),
        cache,
        budget,
    )
    .map_err(|e| row_error(k, e))?;
    rows.push(SynthRow {
        i: k,
        target: RowTarget::Boundary { k },
        product,
    });
    Ok(rows)
}

fn row_error(i: u32, e: XError) -> SynthError {
    match e {
        XError::Arith(ArithError::FactorizationTimeout { n, .. }) => {
            SynthError::Blocked { i, modulus: n }
        }
        XError::PrimeTooLarge(prime) => SynthError::PrimeTooLarge { i, prime },
        other => unreachable!("row moduli are odd and at least 3: {other}"),
    }
}

/// The canonical formula: one summand per row.
pub fn synthesize(k: u32, cache: &FactorCache) -> Result<CountingFormula, SynthError> {
    synthesize_with(k, cache, FactorBudget::default())
}

pub fn synthesize_with(
    k: u32,
    cache: &FactorCache,
    budget: FactorBudget,
) -> Result<CountingFormula, SynthError> {
    let rows = synthesize_rows_with(k, cache, budget)?;
    Ok(CountingFormula::from_summands(
        k,
        rows.into_iter().map(|r| r.product),
    ))
}

pub fn evaluate(f: &CountingFormula, p: u64) -> u64 {
    f.evaluate(p)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub p: u64,
    pub formula: u64,
    pub direct: u64,
    /// Exponents `i` whose gcd is 1.
    pub surviving: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub k: u32,
    pub prime_bound: u64,
    pub primes_checked: usize,
    pub mismatches: Vec<Mismatch>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares the formula with the direct count at every odd prime up to
/// `prime_bound`.
pub fn verify_formula(f: &CountingFormula, prime_bound: u64) -> VerifyReport {
    let primes = odd_primes_up_to(prime_bound);
    let mismatches: Vec<Mismatch> = primes
        .par_iter()
        .filter_map(|&p| {
            let direct = count_prime_power(p, f.k()).expect("odd prime");
            let value = f.evaluate(p);
            (value != direct.count).then_some(Mismatch {
                p,
                formula: value,
                direct: direct.count,
                surviving: direct.surviving,
            })
        })
        .collect();
    VerifyReport {
        k: f.k(),
        prime_bound,
        primes_checked: primes.len(),
        mismatches,
    }
}
