//! Reader for the hand-written rational expressions in the golden file.
//!
//! Grammar: sums, products (explicit `*` or juxtaposition), quotients, integer
//! powers, integers, `q`, `z3` / `z_3`, `lambda_k(z.., ..; z..)` and
//! `alpha(c z_i/z_j)`. Sums must collapse to at most two z-monomials before
//! they are multiplied into a product.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::blocks::{build_block, build_kernel, ArgList, BlockKind, KernelKind};
use crate::error::{Error, Result};
use crate::qfield::QRat;
use crate::series::{ExpVec, FactoredRational};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
}

fn lex(src: &str) -> Result<Vec<Tok>> {
    let cs: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < cs.len() {
        let c = cs[k];
        if c.is_whitespace() {
            k += 1;
        } else if c.is_ascii_digit() {
            let start = k;
            while k < cs.len() && cs[k].is_ascii_digit() {
                k += 1;
            }
            let s: String = cs[start..k].iter().collect();
            out.push(Tok::Num(s.parse().map_err(|_| Error::Parse(s.clone()))?));
        } else if c.is_ascii_alphabetic() {
            let start = k;
            while k < cs.len() && (cs[k].is_ascii_alphanumeric() || cs[k] == '_') {
                k += 1;
            }
            out.push(Tok::Ident(cs[start..k].iter().collect()));
        } else if "+-*/^(),;".contains(c) {
            out.push(Tok::Sym(c));
            k += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
enum Value {
    Sum(BTreeMap<ExpVec, QRat>),
    Fr(FactoredRational),
}

fn sum_add(a: &BTreeMap<ExpVec, QRat>, b: &BTreeMap<ExpVec, QRat>, sign: i64) -> BTreeMap<ExpVec, QRat> {
    let mut out = a.clone();
    for (e, c) in b {
        let c = if sign < 0 { c.neg() } else { c.clone() };
        let v = out.get(e).map(|x| x.add(&c)).unwrap_or(c);
        if v.is_zero() {
            out.remove(e);
        } else {
            out.insert(e.clone(), v);
        }
    }
    out
}

impl Value {
    fn constant(n: usize, c: QRat) -> Value {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(vec![0; n], c);
        }
        Value::Sum(m)
    }

    fn as_sum(&self) -> Option<BTreeMap<ExpVec, QRat>> {
        match self {
            Value::Sum(m) => Some(m.clone()),
            Value::Fr(f) if f.factors().is_empty() => {
                let mut m = BTreeMap::new();
                if !f.scalar().is_zero() {
                    m.insert(f.monomial_exps().clone(), f.scalar().clone());
                }
                Some(m)
            }
            Value::Fr(_) => None,
        }
    }

    fn to_fr(&self, n: usize) -> Result<FactoredRational> {
        let m = match self {
            Value::Fr(f) => return Ok(f.clone()),
            Value::Sum(m) => m,
        };
        let terms: Vec<(&ExpVec, &QRat)> = m.iter().collect();
        match terms.len() {
            0 => Ok(FactoredRational::constant(n, QRat::zero())),
            1 => Ok(FactoredRational::monomial(n, terms[0].0.clone(), terms[0].1.clone())),
            2 => {
                let (a, c1) = terms[0];
                let (b, c2) = terms[1];
                let d: Vec<i32> = a.iter().zip(b).map(|(x, y)| x - y).collect();
                let i = d.iter().position(|&x| x == 1);
                let j = d.iter().position(|&x| x == -1);
                let others = d.iter().filter(|&&x| x != 0).count();
                let (Some(i), Some(j)) = (i, j) else {
                    return Err(Error::Parse("sum is not a binomial in two variables".into()));
                };
                if others != 2 {
                    return Err(Error::Parse("sum is not a binomial in two variables".into()));
                }
                let mut shift = b.clone();
                shift[j] -= 1;
                FactoredRational::monomial(n, shift, QRat::one())
                    .mul(&FactoredRational::binary(n, c1.clone(), i + 1, c2.clone(), j + 1, 1)?)
            }
            _ => Err(Error::Parse("sums of more than two monomials are not supported".into())),
        }
    }

    fn add(&self, other: &Value, sign: i64) -> Result<Value> {
        match (self.as_sum(), other.as_sum()) {
            (Some(a), Some(b)) => Ok(Value::Sum(sum_add(&a, &b, sign))),
            _ => Err(Error::Parse("cannot add factored expressions".into())),
        }
    }

    fn mul(&self, other: &Value, n: usize) -> Result<Value> {
        if let (Some(a), Some(b)) = (self.as_sum(), other.as_sum()) {
            if a.len() <= 1 || b.len() <= 1 {
                let mut out = BTreeMap::new();
                for (ea, ca) in &a {
                    for (eb, cb) in &b {
                        let e: ExpVec = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                        out = sum_add(&out, &BTreeMap::from([(e, ca.mul(cb))]), 1);
                    }
                }
                return Ok(Value::Sum(out));
            }
        }
        Ok(Value::Fr(self.to_fr(n)?.mul(&other.to_fr(n)?)?))
    }

    fn inv(&self, n: usize) -> Result<Value> {
        Ok(Value::Fr(self.to_fr(n)?.inv()?))
    }

    fn pow(&self, e: i32, n: usize) -> Result<Value> {
        let base = if e < 0 { self.inv(n)? } else { self.clone() };
        let mut acc = Value::constant(n, QRat::one());
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base, n)?;
        }
        Ok(acc)
    }
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
    n: usize,
}

fn var_index(name: &str) -> Option<usize> {
    let rest = name.strip_prefix('z')?;
    let rest = rest.strip_prefix('_').unwrap_or(rest);
    rest.parse().ok().filter(|&k: &usize| k > 0)
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(Error::Parse(format!("expected {c:?} at token {}", self.pos)))
        }
    }

    fn expr(&mut self) -> Result<Value> {
        let mut sign = 1;
        if self.eat('-') {
            sign = -1;
        } else {
            self.eat('+');
        }
        let first = self.term()?;
        let mut acc = Value::constant(self.n, QRat::zero()).add(&first, sign).or_else(|_| {
            if sign < 0 {
                first.mul(&Value::constant(self.n, QRat::from_int(-1)), self.n)
            } else {
                Ok(first.clone())
            }
        })?;
        loop {
            let s = if self.eat('+') {
                1
            } else if self.eat('-') {
                -1
            } else {
                break;
            };
            let t = self.term()?;
            acc = acc.add(&t, s)?;
        }
        Ok(acc)
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::Sym('(')))
    }

    fn term(&mut self) -> Result<Value> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                let f = self.factor()?;
                acc = acc.mul(&f, self.n)?;
            } else if self.eat('/') {
                let f = self.factor()?;
                acc = acc.mul(&f.inv(self.n)?, self.n)?;
            } else if self.starts_atom() {
                let f = self.factor()?;
                acc = acc.mul(&f, self.n)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Value> {
        let base = self.atom()?;
        if self.eat('^') {
            let neg = self.eat('-');
            let Some(Tok::Num(k)) = self.peek().cloned() else {
                return Err(Error::Parse("expected integer exponent".into()));
            };
            self.pos += 1;
            let k: i32 = k.try_into().map_err(|_| Error::Parse("exponent too large".into()))?;
            return base.pow(if neg { -k } else { k }, self.n);
        }
        Ok(base)
    }

    fn var(&mut self) -> Result<usize> {
        match self.peek().cloned() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                let k = var_index(&s).ok_or_else(|| Error::Parse(format!("expected a variable, got {s}")))?;
                if k > self.n {
                    return Err(Error::Parse(format!("variable {s} out of range")));
                }
                Ok(k)
            }
            _ => Err(Error::Parse("expected a variable".into())),
        }
    }

    fn atom(&mut self) -> Result<Value> {
        let n = self.n;
        match self.peek().cloned() {
            Some(Tok::Num(k)) => {
                self.pos += 1;
                Ok(Value::constant(n, QRat::from_rat(k.into())))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(')')?;
                Ok(v)
            }
            Some(Tok::Ident(s)) if s == "q" => {
                self.pos += 1;
                Ok(Value::constant(n, QRat::q()))
            }
            Some(Tok::Ident(s)) if s == "alpha" => {
                self.pos += 1;
                self.expect('(')?;
                let arg = self.expr()?;
                self.expect(')')?;
                let m = arg.as_sum().filter(|m| m.len() == 1).ok_or_else(|| Error::Parse("alpha needs c z_i/z_j".into()))?;
                let (e, c) = m.into_iter().next().unwrap();
                let i = e.iter().position(|&x| x == 1);
                let j = e.iter().position(|&x| x == -1);
                match (i, j, e.iter().filter(|&&x| x != 0).count()) {
                    (Some(i), Some(j), 2) => Ok(Value::Fr(build_kernel(KernelKind::Alpha, &c, i + 1, j + 1, n)?)),
                    _ => Err(Error::Parse("alpha needs c z_i/z_j".into())),
                }
            }
            Some(Tok::Ident(s)) if s.starts_with("lambda_") => {
                self.pos += 1;
                let k: usize = s["lambda_".len()..].parse().map_err(|_| Error::Parse(s.clone()))?;
                self.expect('(')?;
                let mut prefix = vec![self.var()?];
                while self.eat(',') {
                    prefix.push(self.var()?);
                }
                self.expect(';')?;
                let target = self.var()?;
                self.expect(')')?;
                let args = ArgList::new(prefix, target)?;
                Ok(Value::Fr(build_block(BlockKind::Lambda, &args, k, n)?))
            }
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                let k = var_index(&s).ok_or_else(|| Error::Parse(format!("unknown identifier {s}")))?;
                if k > n {
                    return Err(Error::Parse(format!("variable {s} out of range")));
                }
                let mut e = vec![0; n];
                e[k - 1] = 1;
                Ok(Value::Sum(BTreeMap::from([(e, QRat::one())])))
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

/// Parses an expression in `n` variables into a factored rational function.
pub fn parse_rational(src: &str, n: usize) -> Result<FactoredRational> {
    let mut p = Parser { toks: lex(src)?, pos: 0, n };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input in {src:?}")));
    }
    v.to_fr(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfield::{rat, Rat};

    fn at(src: &str, n: usize, q0: Rat, z: &[Rat]) -> Rat {
        parse_rational(src, n).unwrap().eval_exact(&q0, z).unwrap()
    }

    #[test]
    fn arithmetic() {
        let z = [rat(3, 1), rat(5, 1)];
        let q0 = rat(2, 1);
        // 2 - 5/3 = 1/3
        assert_eq!(at("q - z2/z1", 2, q0.clone(), &z), rat(1, 3));
        // -(1+8)(1-5/3)/((3)(4-5/3)(1+10/3))
        let v = at("-(1+q^3)(1-z2/z1)/((1+q)(q^2-z2/z1)(1+q z2/z1))", 2, q0.clone(), &z);
        let y = rat(5, 3);
        let expect = -(rat(9, 1) * (rat(1, 1) - &y)) / (rat(3, 1) * (rat(4, 1) - &y) * (rat(1, 1) + rat(2, 1) * &y));
        assert_eq!(v, expect);
        assert_eq!(at("q^-2 z_1", 2, q0, &z), rat(3, 4));
    }

    #[test]
    fn rejects_bad_sums() {
        assert!(parse_rational("(z1 + z2 + z3)", 3).is_err());
        assert!(parse_rational("(z1 z2 + 1)", 2).is_err());
        assert!(parse_rational("foo", 2).is_err());
    }

    #[test]
    fn alpha_matches_kernel() {
        let a = parse_rational("alpha(-q z2/z1)", 2).unwrap();
        let b = build_kernel(KernelKind::Alpha, &QRat::signed_q_pow(-1, 1), 2, 1, 2).unwrap();
        assert_eq!(a, b);
    }
}
