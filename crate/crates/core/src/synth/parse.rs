//! Reads formulas written as sums of products of `X_{a,q}(p)` factors.
//!
//! Grammar (blanks allowed between tokens):
//!
//! ```text
//! sum     := product ('+' product)*
//! product := factor (('·' | '*' | '\cdot')? factor)*
//! factor  := integer | indicator | '(' sum ')'
//! indicator := 'X_{' int ',' int '}' '(' 'p' ('^' (int | '{' int '}'))? ')'
//! ```
//!
//! `q` may be composite and the argument may be a power of `p`; such
//! factors are expanded into prime-modulus indicators in `p`.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use thiserror::Error;

use super::CountingFormula;
use crate::factor_cache::FactorCache;
use crate::xfunc::{self, XProduct};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at offset {offset}: {reason}")]
pub struct ParseError {
    pub offset: usize,
    pub reason: String,
}

/// Polynomial in indicators: product -> coefficient.
type Poly = BTreeMap<XProduct, u64>;

fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (x, m) in a {
        for (y, n) in b {
            *out.entry(x.mul(y)).or_default() += m * n;
        }
    }
    out
}

fn add(into: &mut Poly, other: Poly) {
    for (t, n) in other {
        *into.entry(t).or_default() += n;
    }
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    len: usize,
    cache: &'a FactorCache,
}

impl Parser<'_> {
    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.len, |c| c.0)
    }

    fn err<T>(&self, reason: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            offset: self.offset(),
            reason: reason.into(),
        })
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|c| c.1)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    /// Next non-blank character.
    fn next_tok(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek()
    }

    fn starts_with(&self, s: &str) -> bool {
        let mut i = self.pos;
        for want in s.chars() {
            match self.chars.get(i) {
                Some(&(_, c)) if c == want => i += 1,
                _ => return false,
            }
        }
        true
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.starts_with(s) {
            self.pos += s.chars().count();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat(s) {
            Ok(())
        } else {
            self.err(format!("expected {s:?}"))
        }
    }

    fn int(&mut self) -> Result<BigInt, ParseError> {
        let negative = self.eat("-");
        if negative {
            self.skip_ws();
        }
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        let digits: String = self.chars[start..self.pos].iter().map(|c| c.1).collect();
        let n: BigInt = digits.parse().expect("ascii digits");
        Ok(if negative { -n } else { n })
    }

    fn small(&mut self, what: &str) -> Result<u64, ParseError> {
        let n = self.int()?;
        match u64::try_from(&n) {
            Ok(v) => Ok(v),
            Err(_) => self.err(format!("{what} out of range")),
        }
    }

    fn sum(&mut self) -> Result<Poly, ParseError> {
        let mut out = self.product()?;
        while self.eat("+") {
            let next = self.product()?;
            add(&mut out, next);
        }
        Ok(out)
    }

    fn product(&mut self) -> Result<Poly, ParseError> {
        let mut out = self.factor()?;
        loop {
            let explicit = self.eat("·") || self.eat("*") || self.eat("\\cdot");
            match self.next_tok() {
                Some('X' | '(') => {}
                Some(c) if c.is_ascii_digit() && explicit => {}
                _ if explicit => return self.err("expected a factor"),
                _ => return Ok(out),
            }
            let next = self.factor()?;
            out = mul(&out, &next);
        }
    }

    fn factor(&mut self) -> Result<Poly, ParseError> {
        if self.eat("(") {
            let inner = self.sum()?;
            self.expect(")")?;
            return Ok(inner);
        }
        if self.eat("X_{") {
            let a = self.int()?;
            self.expect(",")?;
            let q = self.int()?;
            self.expect("}")?;
            self.expect("(")?;
            self.expect("p")?;
            let s = if self.eat("^") {
                if self.eat("{") {
                    let s = self.small("exponent")?;
                    self.expect("}")?;
                    s
                } else {
                    self.small("exponent")?
                }
            } else {
                1
            };
            self.expect(")")?;
            if s == 0 {
                return self.err("exponent must be positive");
            }
            let q = match BigUint::try_from(q) {
                Ok(q) if q >= BigUint::from(2u32) => q,
                _ => return self.err("modulus must be at least 2"),
            };
            let t = match xfunc::reduce_composite_power(&a, &q, s, self.cache) {
                Ok(t) => t,
                Err(e) => return self.err(e.to_string()),
            };
            return Ok(Poly::from([(t, 1)]));
        }
        if self.next_tok().is_some_and(|c| c.is_ascii_digit()) {
            let n = self.small("constant")?;
            return Ok(Poly::from([(XProduct::one(), n)]));
        }
        self.err("expected a factor")
    }
}

/// Parses a formula for `n(p^k, 2)`, expanding products over sums.
pub fn parse_formula(
    k: u32,
    text: &str,
    cache: &FactorCache,
) -> Result<CountingFormula, ParseError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut p = Parser {
        chars,
        pos: 0,
        len: text.len(),
        cache,
    };
    let poly = p.sum()?;
    p.skip_ws();
    if p.pos != p.chars.len() {
        return p.err("trailing input");
    }
    let mut constant = 0;
    let mut terms = Vec::new();
    for (t, n) in poly {
        if t.is_one() {
            constant += n;
        } else {
            terms.extend(std::iter::repeat_n(t, n as usize));
        }
    }
    Ok(CountingFormula::new(k, constant, terms))
}
