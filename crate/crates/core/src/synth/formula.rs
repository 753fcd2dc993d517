use std::collections::BTreeSet;

use num_bigint::BigUint;
use serde::Serialize;

use crate::xfunc::XProduct;

/// `constant + sum(terms)`, with `terms` a multiset of non-empty products
/// kept in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CountingFormula {
    k: u32,
    constant: u64,
    terms: Vec<XProduct>,
}

impl CountingFormula {
    /// Empty products among `terms` are folded into the constant.
    pub fn new(k: u32, constant: u64, terms: Vec<XProduct>) -> Self {
        let (ones, mut terms): (Vec<_>, Vec<_>) = terms.into_iter().partition(XProduct::is_one);
        terms.sort();
        CountingFormula {
            k,
            constant: constant + ones.len() as u64,
            terms,
        }
    }

    pub fn from_summands(k: u32, summands: impl IntoIterator<Item = XProduct>) -> Self {
        Self::new(k, 0, summands.into_iter().collect())
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn constant(&self) -> u64 {
        self.constant
    }

    pub fn terms(&self) -> &[XProduct] {
        &self.terms
    }

    /// Number of summands counting the constant as that many ones.
    pub fn summands(&self) -> u64 {
        self.constant + self.terms.len() as u64
    }

    /// Distinct terms with their multiplicities, in canonical order.
    pub fn term_counts(&self) -> Vec<(XProduct, u64)> {
        let mut out: Vec<(XProduct, u64)> = Vec::new();
        for t in &self.terms {
            match out.last_mut() {
                Some((last, n)) if last == t => *n += 1,
                _ => out.push((t.clone(), 1)),
            }
        }
        out
    }

    pub fn evaluate(&self, p: u64) -> u64 {
        self.constant
            + self
                .terms
                .iter()
                .map(|t| u64::from(t.eval_u64(p)))
                .sum::<u64>()
    }

    /// The distinct prime moduli appearing in the terms.
    pub fn primes(&self) -> BTreeSet<u64> {
        self.terms
            .iter()
            .flat_map(|t| t.iter().map(|x| x.q()))
            .collect()
    }

    /// Product of the distinct prime moduli; 1 for a constant formula.
    pub fn natural_modulus(&self) -> BigUint {
        self.primes().into_iter().map(BigUint::from).product()
    }
}

impl Serialize for CountingFormula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CountingFormula", 4)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("constant", &self.constant)?;
        st.serialize_field("terms", &self.terms)?;
        st.serialize_field("natural_modulus", &self.natural_modulus().to_str_radix(10))?;
        st.end()
    }
}
