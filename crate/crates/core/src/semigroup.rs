//! Numerical-semigroup ground truth.
//!
//! Sylvester's formula gives the genus of `<a,b>` directly. The genus tree
//! gives every numerical semigroup of genus `g`: the children of `S` are
//! `S \ {m}` for the minimal generators `m` of `S` above its Frobenius
//! number, and each semigroup of genus `g + 1` has exactly one parent.

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemigroupError {
    #[error("generators {a} and {b} are not coprime")]
    NotCoprime { a: u64, b: u64 },
    #[error("generator {0} is below 2")]
    TrivialGenerator(u64),
    #[error("genus {requested} exceeds the enumeration cap {cap}")]
    BudgetExceeded { requested: u32, cap: u32 },
}

/// `<a,b>` with `2 <= a < b` and `gcd(a, b) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TwoGenSemigroup {
    a: u64,
    b: u64,
}

impl TwoGenSemigroup {
    /// Accepts the generators in either order.
    pub fn new(a: u64, b: u64) -> Result<Self, SemigroupError> {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        if a < 2 {
            return Err(SemigroupError::TrivialGenerator(a));
        }
        if a.gcd(&b) != 1 {
            return Err(SemigroupError::NotCoprime { a, b });
        }
        Ok(TwoGenSemigroup { a, b })
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    /// `(a-1)(b-1)/2`.
    pub fn genus(&self) -> u64 {
        (self.a - 1) * (self.b - 1) / 2
    }

    /// `ab - a - b`, the largest gap.
    pub fn frobenius(&self) -> u64 {
        self.a * self.b - self.a - self.b
    }

    /// The positive integers not of the form `xa + yb` with `x, y >= 0`.
    pub fn gap_set(&self) -> Vec<u64> {
        let frob = self.frobenius() as usize;
        let mut reachable = vec![false; frob + 1];
        reachable[0] = true;
        for n in 1..=frob {
            let a = self.a as usize;
            let b = self.b as usize;
            reachable[n] = (n >= a && reachable[n - a]) || (n >= b && reachable[n - b]);
        }
        (1..=frob)
            .filter(|&n| !reachable[n])
            .map(|n| n as u64)
            .collect()
    }
}

pub fn sylvester_genus(a: u64, b: u64) -> Result<u64, SemigroupError> {
    Ok(TwoGenSemigroup::new(a, b)?.genus())
}

pub fn gap_set(a: u64, b: u64) -> Result<Vec<u64>, SemigroupError> {
    Ok(TwoGenSemigroup::new(a, b)?.gap_set())
}

/// Absolute ceiling: gaps of a genus-`g` semigroup lie in `[1, 2g-1]`, which
/// must fit the 64-bit gap mask.
pub const MAX_GENUS: u32 = 30;

pub const DEFAULT_GENUS_CAP: u32 = 25;

/// One numerical semigroup.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SemigroupNode {
    pub gaps: Vec<u32>,
    /// Minimal generating set, increasing.
    pub generators: Vec<u32>,
    pub genus: u32,
}

impl SemigroupNode {
    pub fn contains(&self, n: u32) -> bool {
        self.gaps.binary_search(&n).is_err()
    }

    pub fn frobenius(&self) -> Option<u32> {
        self.gaps.last().copied()
    }

    pub fn embedding_dimension(&self) -> usize {
        self.generators.len()
    }
}

/// Packed semigroup: gap bitmask plus Frobenius number (-1 for N itself).
#[derive(Debug, Clone, Copy)]
struct Packed {
    gaps: u64,
    frobenius: i32,
    multiplicity: u32,
}

impl Packed {
    const NATURALS: Packed = Packed {
        gaps: 0,
        frobenius: -1,
        multiplicity: 1,
    };

    #[inline]
    fn contains(&self, n: u32) -> bool {
        n as i32 > self.frobenius || self.gaps & (1u64 << n) == 0
    }

    fn minimal_generators(&self) -> Vec<u32> {
        let m = self.multiplicity;
        // every element above F + m is m plus an element
        let bound = (self.frobenius + m as i32).max(m as i32) as u32;
        (m..=bound)
            .filter(|&s| self.contains(s))
            .filter(|&s| !(m..=s / 2).any(|x| self.contains(x) && self.contains(s - x)))
            .collect()
    }

    fn remove(&self, generator: u32) -> Packed {
        let gaps = self.gaps | (1u64 << generator);
        let mut child = Packed {
            gaps,
            frobenius: generator as i32,
            multiplicity: self.multiplicity,
        };
        if generator == self.multiplicity {
            child.multiplicity = (generator + 1..)
                .find(|&n| child.contains(n))
                .expect("cofinite");
        }
        child
    }

    fn genus(&self) -> u32 {
        self.gaps.count_ones()
    }

    fn unpack(&self, generators: Vec<u32>) -> SemigroupNode {
        let gaps: Vec<u32> = (1..64).filter(|&n| self.gaps & (1u64 << n) != 0).collect();
        SemigroupNode {
            genus: gaps.len() as u32,
            gaps,
            generators,
        }
    }
}

/// Per-genus totals from a census.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LevelCensus {
    pub genus: u32,
    pub total: u64,
    pub two_generator: u64,
}

/// Genus-tree enumerator with a configurable genus cap.
#[derive(Debug, Clone, Copy)]
pub struct GenusTree {
    cap: u32,
}

impl Default for GenusTree {
    fn default() -> Self {
        GenusTree {
            cap: DEFAULT_GENUS_CAP,
        }
    }
}

impl GenusTree {
    /// A tree with a custom cap (at most [`MAX_GENUS`]).
    pub fn with_cap(cap: u32) -> Result<Self, SemigroupError> {
        if cap > MAX_GENUS {
            return Err(SemigroupError::BudgetExceeded {
                requested: cap,
                cap: MAX_GENUS,
            });
        }
        Ok(GenusTree { cap })
    }

    fn check(&self, max_genus: u32) -> Result<(), SemigroupError> {
        if max_genus > self.cap {
            return Err(SemigroupError::BudgetExceeded {
                requested: max_genus,
                cap: self.cap,
            });
        }
        Ok(())
    }

    /// Every semigroup of genus `0..=max_genus`, level by level, each level
    /// sorted by gap set.
    pub fn enumerate(&self, max_genus: u32) -> Result<Vec<Vec<SemigroupNode>>, SemigroupError> {
        self.check(max_genus)?;
        let mut levels = vec![Vec::new(); max_genus as usize + 1];
        walk(Packed::NATURALS, max_genus, &mut |node, gens| {
            levels[node.genus() as usize].push(node.unpack(gens.to_vec()));
        });
        for level in &mut levels {
            level.sort();
        }
        Ok(levels)
    }

    /// Level totals without materializing the nodes.
    pub fn census(&self, max_genus: u32) -> Result<Vec<LevelCensus>, SemigroupError> {
        self.check(max_genus)?;
        let mut levels: Vec<LevelCensus> = (0..=max_genus)
            .map(|genus| LevelCensus {
                genus,
                total: 0,
                two_generator: 0,
            })
            .collect();
        walk(Packed::NATURALS, max_genus, &mut |node, gens| {
            let level = &mut levels[node.genus() as usize];
            level.total += 1;
            if gens.len() == 2 {
                level.two_generator += 1;
            }
        });
        Ok(levels)
    }
}

fn walk(node: Packed, max_genus: u32, visit: &mut impl FnMut(&Packed, &[u32])) {
    let gens = node.minimal_generators();
    visit(&node, &gens);
    if node.genus() == max_genus {
        return;
    }
    for &g in gens.iter().filter(|&&g| g as i32 > node.frobenius) {
        walk(node.remove(g), max_genus, visit);
    }
}

/// [`GenusTree::enumerate`] with the default cap.
pub fn enumerate_by_genus(max_genus: u32) -> Result<Vec<Vec<SemigroupNode>>, SemigroupError> {
    GenusTree::default().enumerate(max_genus)
}

/// How many of `nodes` have a minimal generating set of size two.
pub fn count_two_generator(nodes: &[SemigroupNode]) -> u64 {
    nodes
        .iter()
        .filter(|n| n.embedding_dimension() == 2)
        .count() as u64
}
