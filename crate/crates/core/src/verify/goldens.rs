//! Hand-transcribed reference expressions for n = 2, 3, 4.

use std::collections::HashMap;

use serde::Deserialize;

use super::expr::parse_rational;
use super::Tally;
use crate::blocks::ArgList;
use crate::error::{Error, Result};
use crate::ncalg::{nc_equal, AbstractKind, AbstractSymbol, NcExpr, Twist};
use crate::projection::{build_f_ij, build_tau_ij, f_block, s_block, s_row, weight_plus_closed, AdmissiblePair, Orientation};
use crate::series::{Bound, ExpansionSeries};

const SOURCE: &str = include_str!("../../goldens/examples.json");

#[derive(Debug, Deserialize)]
pub struct GoldenFile {
    pub version: u32,
    pub cases: Vec<GoldenCase>,
}

#[derive(Debug, Deserialize)]
pub struct GoldenCase {
    pub id: String,
    pub n: usize,
    #[serde(flatten)]
    pub body: Body,
}

#[derive(Debug, Deserialize)]
pub struct Term {
    pub kind: AbstractKind,
    pub var: usize,
    #[serde(default = "plain")]
    pub twist: Twist,
    pub coeff: String,
}

fn plain() -> Twist {
    Twist::One
}

#[derive(Debug, Deserialize)]
pub struct SymbolRef {
    pub kind: AbstractKind,
    pub var: usize,
    #[serde(default = "plain")]
    pub twist: Twist,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum Piece {
    Case { case: String },
    Symbol { symbol: SymbolRef },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Body {
    Tau {
        #[serde(rename = "I")]
        i: Vec<usize>,
        #[serde(rename = "J")]
        j: Vec<usize>,
        k: usize,
        expr: String,
    },
    FIj {
        #[serde(rename = "I")]
        i: Vec<usize>,
        #[serde(rename = "J")]
        j: Vec<usize>,
        l: usize,
        terms: Vec<Term>,
    },
    SBlock {
        prefix: Vec<usize>,
        target: usize,
        terms: Vec<Term>,
    },
    FAssign {
        #[serde(rename = "I")]
        i: Vec<usize>,
        #[serde(rename = "J")]
        j: Vec<usize>,
        l: usize,
        prefix: Vec<usize>,
        target: usize,
    },
    SAssign {
        #[serde(rename = "I")]
        i: Vec<usize>,
        #[serde(rename = "J")]
        j: Vec<usize>,
        k: usize,
        prefix: Vec<usize>,
        target: usize,
    },
    Structure {
        summands: Vec<Vec<Piece>>,
    },
}

pub fn load() -> Result<GoldenFile> {
    serde_json::from_str(SOURCE).map_err(|e| Error::Parse(format!("golden file: {e}")))
}

fn bound_of(vs: &[Bound], depth: i64) -> i64 {
    vs.iter().filter_map(|v| v.finite()).min().unwrap_or(depth)
}

fn terms_expr(n: usize, terms: &[Term], depth: i64) -> Result<NcExpr> {
    let mut out = NcExpr::zero(n);
    for t in terms {
        let s = AbstractSymbol::new(t.kind, t.var, t.twist)?;
        let c = parse_rational(&t.coeff, n)?.expand(depth)?;
        out = out.add(&NcExpr::symbol(n, s).scale(&c)?)?;
    }
    Ok(out)
}

fn first_difference(a: &ExpansionSeries, b: &ExpansionSeries, bound: i64) -> Option<String> {
    let d = a.sub(b).ok()?;
    d.terms()
        .iter()
        .find(|(e, _)| d.grade(e) <= bound)
        .map(|(e, c)| format!("exponent {e:?} differs by {c}"))
}

fn compare_nc(a: &NcExpr, b: &NcExpr, depth: i64) -> Result<Option<String>> {
    let bound = bound_of(&[a.validity(), b.validity()], depth);
    if nc_equal(a, b, bound)? {
        return Ok(None);
    }
    let zero = ExpansionSeries::zero(a.n());
    for w in a.terms().keys().chain(b.terms().keys()) {
        let x = a.terms().get(w).unwrap_or(&zero);
        let y = b.terms().get(w).unwrap_or(&zero);
        if let Some(msg) = first_difference(x, y, bound) {
            return Ok(Some(format!("word {w}: {msg}")));
        }
    }
    Ok(Some("expressions differ".into()))
}

fn pair(i: &[usize], j: &[usize], n: usize) -> Result<AdmissiblePair> {
    AdmissiblePair::new(i.to_vec(), j.to_vec(), Orientation::Plus, n)
}

struct Ctx<'a> {
    cases: HashMap<&'a str, &'a GoldenCase>,
    depth: i64,
}

impl Ctx<'_> {
    fn golden_value(&self, id: &str) -> Result<NcExpr> {
        let c = self.cases.get(id).ok_or_else(|| Error::Parse(format!("unknown golden case {id}")))?;
        let n = c.n;
        match &c.body {
            Body::Tau { expr, .. } => NcExpr::one(n).scale(&parse_rational(expr, n)?.expand(self.depth)?),
            Body::FIj { terms, .. } | Body::SBlock { terms, .. } => terms_expr(n, terms, self.depth),
            _ => Err(Error::Parse(format!("case {id} cannot be used as a factor"))),
        }
    }

    fn check(&self, c: &GoldenCase) -> Result<Option<String>> {
        let n = c.n;
        let depth = self.depth;
        match &c.body {
            Body::Tau { i, j, k, expr } => {
                let ours = build_tau_ij(&pair(i, j, n)?, *k, depth)?;
                let theirs = parse_rational(expr, n)?.expand(depth)?;
                let bound = bound_of(&[ours.validity(), theirs.validity()], depth);
                Ok(first_difference(&ours, &theirs, bound))
            }
            Body::FIj { i, j, l, terms } => {
                compare_nc(&build_f_ij(&pair(i, j, n)?, *l, depth)?, &terms_expr(n, terms, depth)?, depth)
            }
            Body::SBlock { prefix, target, terms } => {
                let ours = s_block(&ArgList::new(prefix.clone(), *target)?, n, depth)?;
                compare_nc(&ours, &terms_expr(n, terms, depth)?, depth)
            }
            Body::FAssign { i, j, l, prefix, target } => {
                let ours = build_f_ij(&pair(i, j, n)?, *l, depth)?;
                let theirs = f_block(&ArgList::new(prefix.clone(), *target)?, n, depth)?;
                compare_nc(&ours, &theirs, depth)
            }
            Body::SAssign { i, j, k, prefix, target } => {
                let ours = s_block(&s_row(&pair(i, j, n)?, *k), n, depth)?;
                let theirs = s_block(&ArgList::new(prefix.clone(), *target)?, n, depth)?;
                compare_nc(&ours, &theirs, depth)
            }
            Body::Structure { summands } => {
                let mut total = NcExpr::zero(n);
                for s in summands {
                    let mut prod = NcExpr::one(n);
                    for p in s {
                        let v = match p {
                            Piece::Case { case } => self.golden_value(case)?,
                            Piece::Symbol { symbol } => {
                                NcExpr::symbol(n, AbstractSymbol::new(symbol.kind, symbol.var, symbol.twist)?)
                            }
                        };
                        prod = prod.mul(&v)?;
                    }
                    total = total.add(&prod)?;
                }
                compare_nc(&weight_plus_closed(n, depth)?.expr, &total, depth)
            }
        }
    }
}

/// Runs every golden case (optionally only those with the given n).
pub fn run(tally: &mut Tally, n: Option<usize>, depth: i64) -> Result<()> {
    let file = load()?;
    let ctx = Ctx { cases: file.cases.iter().map(|c| (c.id.as_str(), c)).collect(), depth };
    for c in &file.cases {
        if n.is_some_and(|n| n != c.n) {
            continue;
        }
        tally.record(&c.id, ctx.check(c));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_parses() {
        let f = load().unwrap();
        assert_eq!(f.version, 1);
        let ids: std::collections::HashSet<_> = f.cases.iter().map(|c| c.id.as_str()).collect();
        assert_eq!(ids.len(), f.cases.len());
    }

    #[test]
    fn expressions_parse() {
        for c in load().unwrap().cases {
            match &c.body {
                Body::Tau { expr, .. } => {
                    parse_rational(expr, c.n).unwrap();
                }
                Body::FIj { terms, .. } | Body::SBlock { terms, .. } => {
                    for t in terms {
                        parse_rational(&t.coeff, c.n).unwrap();
                    }
                }
                _ => {}
            }
        }
    }
}
