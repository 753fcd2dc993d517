//! Smallest modulus determining a formula's value.
//!
//! On primes coprime to the natural modulus, a formula only sees, for each
//! prime `q`, which of the residues appearing in its indicators `p` hits,
//! or that it hits none of them. Those classes form a finite cell space and
//! the minimal modulus is the product of the coordinates the value actually
//! depends on.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::CountingFormula;
use crate::xfunc::XProduct;

/// Per-prime residue classes seen by a set of products.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellSpace {
    primes: Vec<u64>,
    /// Nonzero residues appearing for each prime, increasing.
    residues: Vec<Vec<u64>>,
    /// Whether some nonzero residue avoids all of them.
    has_other: Vec<bool>,
}

/// A cell gives, per coordinate, an index into the residues of that prime;
/// the index equal to their count stands for "none of them".
pub type Cell = Vec<usize>;

impl CellSpace {
    pub fn from_terms<'a>(terms: impl IntoIterator<Item = &'a XProduct>) -> Self {
        let mut by_prime: std::collections::BTreeMap<u64, std::collections::BTreeSet<u64>> =
            Default::default();
        for t in terms {
            for x in t.iter() {
                let set = by_prime.entry(x.q()).or_default();
                if x.a() != 0 {
                    set.insert(x.a());
                }
            }
        }
        let mut space = CellSpace {
            primes: Vec::new(),
            residues: Vec::new(),
            has_other: Vec::new(),
        };
        for (q, set) in by_prime {
            space.has_other.push((set.len() as u64) < q - 1);
            space.primes.push(q);
            space.residues.push(set.into_iter().collect());
        }
        space
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn residues(&self, coord: usize) -> &[u64] {
        &self.residues[coord]
    }

    /// Classes available at a coordinate.
    pub fn width(&self, coord: usize) -> usize {
        self.residues[coord].len() + usize::from(self.has_other[coord])
    }

    pub fn dims(&self) -> usize {
        self.primes.len()
    }

    /// All cells in lexicographic order (named residues before "other").
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = vec![Vec::with_capacity(self.dims())];
        for coord in 0..self.dims() {
            out = out
                .into_iter()
                .flat_map(|cell| {
                    (0..self.width(coord)).map(move |idx| {
                        let mut c = cell.clone();
                        c.push(idx);
                        c
                    })
                })
                .collect();
        }
        out
    }

    fn coord_of(&self, q: u64) -> usize {
        self.primes
            .binary_search(&q)
            .expect("prime is in the space")
    }

    /// Value of a product (whose primes must all belong to the space) on a cell.
    pub fn eval(&self, t: &XProduct, cell: &[usize]) -> u8 {
        let hit = t.iter().any(|x| {
            let c = self.coord_of(x.q());
            self.residues[c].get(cell[c]) == Some(&x.a())
        });
        u8::from(!hit)
    }

    /// A sample residue for the class at a coordinate.
    pub fn representative(&self, coord: usize, idx: usize) -> u64 {
        let named = &self.residues[coord];
        if let Some(&r) = named.get(idx) {
            return r;
        }
        (1..self.primes[coord])
            .find(|r| named.binary_search(r).is_err())
            .expect("an unnamed class exists")
    }

    /// `a` for a named residue, `¬a` or `¬{a,b}` for the rest.
    pub fn label(&self, coord: usize, idx: usize) -> String {
        let named = &self.residues[coord];
        if let Some(r) = named.get(idx) {
            return r.to_string();
        }
        match named.as_slice() {
            [r] => format!("¬{r}"),
            rs => {
                let inner: Vec<String> = rs.iter().map(u64::to_string).collect();
                format!("¬{{{}}}", inner.join(","))
            }
        }
    }
}

fn value(f: &CountingFormula, space: &CellSpace, cell: &[usize]) -> u64 {
    f.constant()
        + f.terms()
            .iter()
            .map(|t| u64::from(space.eval(t, cell)))
            .sum::<u64>()
}

/// The smallest divisor `m` of the natural modulus such that the formula is
/// constant on every class mod `m` of residues coprime to the natural
/// modulus.
pub fn minimal_modulus(f: &CountingFormula) -> BigUint {
    let space = CellSpace::from_terms(f.terms());
    let cells = space.cells();
    let values: HashMap<&Cell, u64> = cells.iter().map(|c| (c, value(f, &space, c))).collect();
    let essential = (0..space.dims()).filter(|&coord| {
        cells.iter().any(|cell| {
            let v = values[cell];
            (0..space.width(coord)).any(|idx| {
                let mut other = cell.clone();
                other[coord] = idx;
                values[&other] != v
            })
        })
    });
    essential.map(|c| BigUint::from(space.primes[c])).product()
}

/// Brute-force version of [`minimal_modulus`]: tabulates the formula on every
/// residue coprime to the natural modulus and tries each divisor in
/// increasing order. Returns `None` when the natural modulus exceeds `limit`.
pub fn minimal_modulus_exhaustive(f: &CountingFormula, limit: u64) -> Option<u64> {
    let n = f.natural_modulus().to_u64().filter(|&n| n <= limit)?;
    let residues: Vec<u64> = (1..=n).filter(|r| r.gcd(&n) == 1).collect();
    let values: Vec<u64> = residues.par_iter().map(|&r| f.evaluate(r)).collect();
    let primes: Vec<u64> = f.primes().into_iter().collect();
    let mut divisors: Vec<u64> = (0u32..1 << primes.len())
        .map(|mask| {
            primes
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &q)| q)
                .product()
        })
        .collect();
    divisors.sort_unstable();
    divisors.into_iter().find(|&m| {
        let mut seen: HashMap<u64, u64> = HashMap::new();
        residues
            .iter()
            .zip(&values)
            .all(|(&r, &v)| *seen.entry(r % m).or_insert(v) == v)
    })
}
