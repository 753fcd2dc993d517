//! Serde helpers: arbitrary-precision integers are written as decimal
//! strings so that no JSON consumer truncates them.

use num_bigint::BigUint;
use serde::ser::{SerializeSeq, Serializer};

pub fn big_as_string<S: Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_str_radix(10))
}

pub fn bigs_as_strings<S: Serializer>(ns: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(ns.len()))?;
    for n in ns {
        seq.serialize_element(&n.to_str_radix(10))?;
    }
    seq.end()
}

pub fn opt_big_as_string<S: Serializer>(n: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
    match n {
        Some(n) => s.serialize_str(&n.to_str_radix(10)),
        None => s.serialize_none(),
    }
}
