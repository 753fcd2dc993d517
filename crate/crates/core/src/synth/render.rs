//! Text renderings of a formula.
//!
//! - flat: every term in canonical order, repeats as coefficients;
//! - factored: indicators shared by several terms pulled out as
//!   `X(p)(c + ...)`;
//! - case-table: the factored form read as a piecewise function, with
//!   residue signatures `ρ_{q1,...,qt}(p) = (a, ¬b, ...)`.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::str::FromStr;

use serde::Serialize;

use super::minimal::{Cell, CellSpace};
use super::CountingFormula;
use crate::xfunc::{BasicX, XProduct};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RenderStyle {
    #[default]
    Flat,
    Factored,
    CaseTable,
}

impl FromStr for RenderStyle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "flat" => Ok(RenderStyle::Flat),
            "factored" => Ok(RenderStyle::Factored),
            "case-table" => Ok(RenderStyle::CaseTable),
            other => Err(format!("unknown style {other:?}")),
        }
    }
}

/// A sum `constant + terms` inside a factored rendering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sum {
    pub constant: u64,
    pub terms: Vec<XProduct>,
}

impl Sum {
    fn render(&self) -> String {
        let mut parts = Vec::new();
        if self.constant > 0 || self.terms.is_empty() {
            parts.push(self.constant.to_string());
        }
        parts.extend(render_terms(&self.terms));
        parts.join("+")
    }
}

/// `base + sum_j gate_j * inner_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grouping {
    pub base: Sum,
    pub groups: Vec<(BasicX, Sum)>,
}

/// Repeatedly pulls out the indicator shared by the most terms, as long as
/// it is shared by at least two and one of them has other factors. Ties go
/// to the smaller indicator.
pub fn group_terms(f: &CountingFormula) -> Grouping {
    let mut remaining: Vec<XProduct> = f.terms().to_vec();
    let mut groups = Vec::new();
    loop {
        let mut counts: BTreeMap<BasicX, (usize, bool)> = BTreeMap::new();
        for t in &remaining {
            for x in t.iter() {
                let e = counts.entry(*x).or_default();
                e.0 += 1;
                e.1 |= t.len() > 1;
            }
        }
        let best = counts
            .iter()
            .filter(|(_, &(n, wider))| n >= 2 && wider)
            .max_by(|a, b| a.1 .0.cmp(&b.1 .0).then_with(|| b.0.cmp(a.0)))
            .map(|(x, _)| *x);
        let Some(gate) = best else { break };
        let (hit, rest): (Vec<_>, Vec<_>) = remaining.into_iter().partition(|t| t.contains(&gate));
        remaining = rest;
        let mut inner = Sum {
            constant: 0,
            terms: Vec::new(),
        };
        for mut t in hit {
            t.remove(&gate);
            if t.is_one() {
                inner.constant += 1;
            } else {
                inner.terms.push(t);
            }
        }
        inner.terms.sort();
        groups.push((gate, inner));
    }
    Grouping {
        base: Sum {
            constant: f.constant(),
            terms: remaining,
        },
        groups,
    }
}

fn render_terms(terms: &[XProduct]) -> Vec<String> {
    let mut out: Vec<(XProduct, u64)> = Vec::new();
    for t in terms {
        match out.last_mut() {
            Some((last, n)) if last == t => *n += 1,
            _ => out.push((t.clone(), 1)),
        }
    }
    out.into_iter()
        .map(|(t, n)| {
            if n == 1 {
                t.render("p")
            } else {
                format!("{n}{}", t.render("p"))
            }
        })
        .collect()
}

pub fn render(f: &CountingFormula, style: RenderStyle) -> String {
    match style {
        RenderStyle::Flat => Sum {
            constant: f.constant(),
            terms: f.terms().to_vec(),
        }
        .render(),
        RenderStyle::Factored => render_factored(&group_terms(f)),
        RenderStyle::CaseTable => render_case_table(f),
    }
}

fn render_factored(g: &Grouping) -> String {
    let mut parts = vec![g.base.render()];
    for (gate, inner) in &g.groups {
        parts.push(format!("{gate}(p)({})", inner.render()));
    }
    parts.join("+")
}

fn signature(space: &CellSpace, cell: &[usize]) -> String {
    let labels: Vec<String> = cell
        .iter()
        .enumerate()
        .map(|(c, &idx)| space.label(c, idx))
        .collect();
    format!("({})", labels.join(", "))
}

fn rho(space: &CellSpace) -> String {
    let qs: Vec<String> = space.primes().iter().map(u64::to_string).collect();
    format!("ρ_{{{}}}(p)", qs.join(","))
}

/// "p ≡ a mod q" style text when a single residue class is involved.
fn condition(space: &CellSpace, cells: &[&Cell]) -> String {
    if let ([cell], 1) = (cells, space.dims()) {
        let q = space.primes()[0];
        if let [r] = space.residues(0) {
            let rel = if cell[0] == 0 { "≡" } else { "≢" };
            return format!("p {rel} {r} mod {q}");
        }
    }
    match cells {
        [cell] => format!("{} = {}", rho(space), signature(space, cell)),
        _ => {
            let sigs: Vec<String> = cells.iter().map(|c| signature(space, c)).collect();
            format!("{} ∈ {{{}}}", rho(space), sigs.join(", "))
        }
    }
}

/// Lines `v if <condition>` for a sum, grouping cells by value.
fn value_table(sum: &Sum) -> Vec<String> {
    let space = CellSpace::from_terms(&sum.terms);
    let cells = space.cells();
    let mut by_value: BTreeMap<u64, Vec<&Cell>> = BTreeMap::new();
    for cell in &cells {
        let v = sum.constant
            + sum
                .terms
                .iter()
                .map(|t| u64::from(space.eval(t, cell)))
                .sum::<u64>();
        by_value.entry(v).or_default().push(cell);
    }
    by_value
        .into_iter()
        .map(|(v, cells)| format!("{v} if {}", condition(&space, &cells)))
        .collect()
}

fn block(out: &mut String, head: &str, sum: &Sum) {
    if sum.terms.is_empty() {
        let _ = writeln!(out, "{head} = {}", sum.constant);
        return;
    }
    let _ = writeln!(out, "{head} =");
    for line in value_table(sum) {
        let _ = writeln!(out, "  {line}");
    }
}

fn render_case_table(f: &CountingFormula) -> String {
    if f.terms().is_empty() {
        return f.constant().to_string();
    }
    let g = group_terms(f);
    let mut out = String::new();
    let whole = format!("n(p^{},2)", f.k());
    if g.groups.is_empty() {
        block(&mut out, &whole, &g.base);
        return out.trim_end().to_string();
    }
    let names: Vec<String> = if g.groups.len() == 1 {
        vec!["μ".into()]
    } else {
        (1..=g.groups.len()).map(|j| format!("μ{j}")).collect()
    };
    block(&mut out, "λ(p)", &g.base);
    for (name, (_, inner)) in names.iter().zip(&g.groups) {
        block(&mut out, &format!("{name}(p)"), inner);
    }

    // which inner sums are switched on, per class of the gate primes
    let gates: Vec<XProduct> = g.groups.iter().map(|(x, _)| XProduct::single(*x)).collect();
    let space = CellSpace::from_terms(&gates);
    let cells = space.cells();
    let mut cases: Vec<(Vec<usize>, Vec<&Cell>)> = Vec::new();
    for cell in &cells {
        let active: Vec<usize> = (0..gates.len())
            .filter(|&j| space.eval(&gates[j], cell) == 1)
            .collect();
        match cases.iter_mut().find(|(a, _)| *a == active) {
            Some((_, cs)) => cs.push(cell),
            None => cases.push((active, vec![cell])),
        }
    }
    let _ = writeln!(out, "{whole} =");
    for (active, cs) in cases {
        let mut expr = String::from("λ(p)");
        for j in active {
            let _ = write!(expr, " + {}(p)", names[j]);
        }
        let _ = writeln!(out, "  {expr} if {}", condition(&space, &cs));
    }
    out.trim_end().to_string()
}
