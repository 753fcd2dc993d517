//! Counting two-generator numerical semigroups of prime-power genus.
//!
//! The number `n(g,2)` of semigroups `<a,b>` of genus `g` equals the number of
//! unordered factorizations `uv = 2g` with `gcd(u+1, v+1) = 1`. For `g = p^k`
//! with `p` an odd prime this becomes a count of exponents `0 <= i <= k` with
//! `gcd(p^i+1, 2p^(k-i)+1) = 1`, and each of those gcds reduces, through the
//! Euclidean algorithm on `(i, k-i)`, to a congruence condition on `p` modulo
//! a number of the form `2^m +- 1`.
//!
//! The crate is organised bottom-up:
//!
//! - [`arith`]: bignum kernel (modular arithmetic, primality, factoring).
//! - [`factor_cache`]: persistent, verified table of known factorizations.
//! - [`semigroup`]: Sylvester's genus formula and the genus-tree census.
//! - [`specialfact`]: direct counts via special factorizations.
//! - [`gcdreduce`]: the Euclidean reduction of `gcd(p^a+1, 2p^b+1)`.
//! - [`modsys`]: the moduli `m_k(i)` and their radical `M(k)`.
//! - [`xfunc`]: residue-class indicator functions `X_{a,q}`.
//! - [`synth`]: mechanical derivation of closed formulas for `n(p^k,2)`.
//! - [`cli`]: the `twogen` command-line front end.

pub mod arith;
pub mod cli;
pub mod factor_cache;
pub mod gcdreduce;
pub mod modsys;
pub mod semigroup;
pub mod specialfact;
pub mod synth;
pub mod xfunc;

pub use arith::{ArithError, Factorization};
pub use factor_cache::{CacheError, FactorCache};
pub use synth::{CountingFormula, SynthError};
pub use xfunc::{BasicX, XProduct};
