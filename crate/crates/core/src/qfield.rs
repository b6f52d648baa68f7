//! Exact arithmetic in ℚ(q).
//!
//! [`QPolynomial`] is a Laurent polynomial in `q` with rational coefficients,
//! stored densely from its lowest exponent. [`QRat`] is a reduced quotient of
//! two such polynomials in canonical form: the denominator is an ordinary
//! monic polynomial with nonzero constant term, so that two values are equal
//! exactly when their fields are identical.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// Laurent polynomial `Σ c_e q^e` with finitely many nonzero rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct QPolynomial {
    low: i32,
    coeffs: Vec<Rat>,
}

impl QPolynomial {
    pub fn zero() -> Self {
        QPolynomial { low: 0, coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: Rat, e: i32) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        QPolynomial { low: e, coeffs: vec![c] }
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs; repeated exponents add up.
    pub fn from_terms<I: IntoIterator<Item = (i32, Rat)>>(terms: I) -> Self {
        let terms: Vec<(i32, Rat)> = terms.into_iter().collect();
        if terms.is_empty() {
            return Self::zero();
        }
        let low = terms.iter().map(|t| t.0).min().unwrap();
        let high = terms.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![Rat::zero(); (high - low + 1) as usize];
        for (e, c) in terms {
            coeffs[(e - low) as usize] += c;
        }
        let mut p = QPolynomial { low, coeffs };
        p.trim();
        p
    }

    pub fn from_int_terms(terms: &[(i32, i64)]) -> Self {
        Self::from_terms(terms.iter().map(|&(e, c)| (e, rat_int(c))))
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        let lead_zeros = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead_zeros == self.coeffs.len() {
            self.coeffs.clear();
            self.low = 0;
            return;
        }
        if lead_zeros > 0 {
            self.coeffs.drain(..lead_zeros);
            self.low += lead_zeros as i32;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.low == 0 && self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Lowest exponent; zero for the zero polynomial.
    pub fn low_exp(&self) -> i32 {
        self.low
    }

    pub fn high_exp(&self) -> i32 {
        self.low + self.coeffs.len() as i32 - 1
    }

    pub fn coeff(&self, e: i32) -> Rat {
        if e < self.low || e > self.high_exp() {
            return Rat::zero();
        }
        self.coeffs[(e - self.low) as usize].clone()
    }

    pub fn leading_coeff(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    /// Nonzero terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i32, &Rat)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(k, c)| (self.low + k as i32, c))
    }

    pub fn as_monomial(&self) -> Option<(&Rat, i32)> {
        if self.coeffs.len() == 1 {
            Some((&self.coeffs[0], self.low))
        } else {
            None
        }
    }

    pub fn shift(&self, k: i32) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        QPolynomial { low: self.low + k, coeffs: self.coeffs.clone() }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        QPolynomial { low: self.low, coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn neg(&self) -> Self {
        QPolynomial { low: self.low, coeffs: self.coeffs.iter().map(|x| -x).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let low = self.low.min(other.low);
        let high = self.high_exp().max(other.high_exp());
        let mut coeffs = vec![Rat::zero(); (high - low + 1) as usize];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[(self.low - low) as usize + k] += c;
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            coeffs[(other.low - low) as usize + k] += c;
        }
        let mut p = QPolynomial { low, coeffs };
        p.trim();
        p
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (a, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (b, y) in other.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    coeffs[a + b] += x * y;
                }
            }
        }
        let mut p = QPolynomial { low: self.low + other.low, coeffs };
        p.trim();
        p
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, q0: &Rat) -> Result<Rat> {
        if self.is_zero() {
            return Ok(Rat::zero());
        }
        if q0.is_zero() && self.low < 0 {
            return Err(Error::PoleAtQ(q0.to_string()));
        }
        // Horner on the ordinary part, then multiply by q0^low.
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * q0 + c;
        }
        Ok(acc * rat_pow(q0, self.low)?)
    }

    /// Division with remainder for ordinary polynomials (no negative exponents).
    fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        debug_assert!(self.is_zero() || self.low >= 0);
        debug_assert!(divisor.low >= 0 && !divisor.is_zero());
        let num = self.to_dense_ordinary();
        let den = &divisor.to_dense_ordinary();
        if num.len() < den.len() {
            return (Self::zero(), self.clone());
        }
        let mut rem = num;
        let dl = den.len();
        let lead_inv = den[dl - 1].recip();
        let mut quot = vec![Rat::zero(); rem.len() - dl + 1];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dl - 1] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (t, d) in den.iter().enumerate() {
                rem[k + t] -= &c * d;
            }
            quot[k] = c;
        }
        let mut q = QPolynomial { low: 0, coeffs: quot };
        q.trim();
        let mut r = QPolynomial { low: 0, coeffs: rem };
        r.trim();
        (q, r)
    }

    fn to_dense_ordinary(&self) -> Vec<Rat> {
        if self.is_zero() {
            return Vec::new();
        }
        let mut v = vec![Rat::zero(); self.low as usize];
        v.extend(self.coeffs.iter().cloned());
        v
    }

    fn monic(&self) -> Self {
        match self.leading_coeff() {
            Some(c) => self.scale(&c.recip()),
            None => Self::zero(),
        }
    }

    /// Monic gcd of two ordinary polynomials by the Euclidean algorithm over ℚ.
    fn gcd_ordinary(a: &Self, b: &Self) -> Self {
        let mut x = a.monic();
        let mut y = b.monic();
        while !y.is_zero() {
            let (_, r) = x.div_rem(&y);
            x = y;
            y = r.monic();
        }
        x
    }
}

fn rat_pow(x: &Rat, e: i32) -> Result<Rat> {
    if e >= 0 {
        Ok(num_traits::pow(x.clone(), e as usize))
    } else if x.is_zero() {
        Err(Error::DivisionByZero)
    } else {
        Ok(num_traits::pow(x.recip(), (-e) as usize))
    }
}

fn fmt_rat_coeff(c: &Rat) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for QPolynomial {
    /// Terms `c*q^e` in increasing exponent order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms() {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let mono = match e {
                0 => String::new(),
                1 => "q".to_string(),
                _ => format!("q^{e}"),
            };
            if mono.is_empty() {
                write!(f, "{}", fmt_rat_coeff(&abs))?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}*{mono}", fmt_rat_coeff(&abs))?;
            }
        }
        Ok(())
    }
}

/// Element of ℚ(q) in canonical reduced form.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QRat {
    num: QPolynomial,
    den: QPolynomial,
}

impl Default for QRat {
    fn default() -> Self {
        Self::zero()
    }
}

impl QRat {
    pub fn zero() -> Self {
        QRat { num: QPolynomial::zero(), den: QPolynomial::one() }
    }

    pub fn one() -> Self {
        Self::from_poly(QPolynomial::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rat(rat_int(n))
    }

    pub fn from_rat(c: Rat) -> Self {
        Self::from_poly(QPolynomial::constant(c))
    }

    /// `c·q^e`.
    pub fn monomial(c: Rat, e: i32) -> Self {
        Self::from_poly(QPolynomial::monomial(c, e))
    }

    /// `±q^e` with sign given by `sign < 0`.
    pub fn signed_q_pow(sign: i64, e: i32) -> Self {
        Self::monomial(rat_int(sign.signum()), e)
    }

    pub fn q() -> Self {
        Self::q_pow(1)
    }

    pub fn q_pow(e: i32) -> Self {
        Self::monomial(Rat::one(), e)
    }

    /// Laurent polynomial; already canonical over the unit denominator.
    pub fn from_poly(num: QPolynomial) -> Self {
        QRat { num, den: QPolynomial::one() }
    }

    pub fn from_int_terms(terms: &[(i32, i64)]) -> Self {
        Self::from_poly(QPolynomial::from_int_terms(terms))
    }

    pub fn new(num: QPolynomial, den: QPolynomial) -> Result<Self> {
        normalize(num, den)
    }

    pub fn num(&self) -> &QPolynomial {
        &self.num
    }

    pub fn den(&self) -> &QPolynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    /// `Some((c, e))` when the value is `c·q^e`.
    pub fn as_monomial(&self) -> Option<(&Rat, i32)> {
        if self.den.is_one() {
            self.num.as_monomial()
        } else {
            None
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.is_poly() && other.is_poly() {
            return Self::from_poly(self.num.add(&other.num));
        }
        if self.den == other.den {
            return normalize(self.num.add(&other.num), self.den.clone()).expect("nonzero denominator");
        }
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        normalize(num, self.den.mul(&other.den)).expect("nonzero denominator")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        QRat { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.is_poly() && other.is_poly() {
            return Self::from_poly(self.num.mul(&other.num));
        }
        if let Some((c, e)) = other.as_monomial() {
            return QRat { num: self.num.scale(c).shift(e), den: self.den.clone() };
        }
        if let Some((c, e)) = self.as_monomial() {
            return QRat { num: other.num.scale(c).shift(e), den: other.den.clone() };
        }
        normalize(self.num.mul(&other.num), self.den.mul(&other.den)).expect("nonzero denominator")
    }

    pub fn scale_rat(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        QRat { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        normalize(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i32) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        let mut sq = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&sq);
            }
            k >>= 1;
            if k > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(acc)
    }

    pub fn eval(&self, q0: &Rat) -> Result<Rat> {
        let d = self.den.eval(q0)?;
        if d.is_zero() {
            return Err(Error::PoleAtQ(q0.to_string()));
        }
        Ok(self.num.eval(q0)? / d)
    }
}

/// Reduces `num/den` to canonical form.
pub fn normalize(num: QPolynomial, den: QPolynomial) -> Result<QRat> {
    if den.is_zero() {
        return Err(Error::DivisionByZero);
    }
    if num.is_zero() {
        return Ok(QRat::zero());
    }
    let s = den.low;
    let den = den.shift(-s);
    let num = num.shift(-s);
    if den.coeffs.len() == 1 {
        let inv = den.coeffs[0].recip();
        return Ok(QRat { num: num.scale(&inv), den: QPolynomial::one() });
    }
    // q is a unit, so only the q-free part of the numerator can share factors with den.
    let t = num.low;
    let mut n0 = num.shift(-t);
    let mut d0 = den;
    let g = QPolynomial::gcd_ordinary(&n0, &d0);
    if g.coeffs.len() > 1 {
        n0 = n0.div_rem(&g).0;
        d0 = d0.div_rem(&g).0;
    }
    let lc_inv = d0.leading_coeff().expect("nonzero").recip();
    Ok(QRat { num: n0.shift(t).scale(&lc_inv), den: d0.scale(&lc_inv) })
}

impl fmt::Display for QRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl From<i64> for QRat {
    fn from(n: i64) -> Self {
        QRat::from_int(n)
    }
}

macro_rules! qrat_binop {
    ($tr:ident, $method:ident, $f:ident) => {
        impl std::ops::$tr<&QRat> for &QRat {
            type Output = QRat;
            fn $method(self, rhs: &QRat) -> QRat {
                QRat::$f(self, rhs)
            }
        }
        impl std::ops::$tr<QRat> for QRat {
            type Output = QRat;
            fn $method(self, rhs: QRat) -> QRat {
                QRat::$f(&self, &rhs)
            }
        }
    };
}
qrat_binop!(Add, add, add);
qrat_binop!(Sub, sub, sub);
qrat_binop!(Mul, mul, mul);

impl std::ops::Neg for QRat {
    type Output = QRat;
    fn neg(self) -> QRat {
        QRat::neg(&self)
    }
}

impl std::ops::Neg for &QRat {
    type Output = QRat;
    fn neg(self) -> QRat {
        QRat::neg(self)
    }
}

type TermList = Vec<(i32, String)>;

#[derive(Serialize, Deserialize)]
struct QRatRepr {
    num: TermList,
    den: TermList,
}

fn poly_repr(p: &QPolynomial) -> TermList {
    p.terms().map(|(e, c)| (e, fmt_rat_coeff(c))).collect()
}

fn poly_from_repr(terms: &TermList) -> std::result::Result<QPolynomial, String> {
    let mut out = Vec::with_capacity(terms.len());
    for (e, c) in terms {
        let c = Rat::from_str(c).map_err(|err| format!("bad coefficient {c:?}: {err}"))?;
        out.push((*e, c));
    }
    Ok(QPolynomial::from_terms(out))
}

impl Serialize for QRat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QRatRepr { num: poly_repr(&self.num), den: poly_repr(&self.den) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QRat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = QRatRepr::deserialize(d)?;
        let num = poly_from_repr(&r.num).map_err(D::Error::custom)?;
        let den = poly_from_repr(&r.den).map_err(D::Error::custom)?;
        normalize(num, den).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(terms: &[(i32, i64)]) -> QPolynomial {
        QPolynomial::from_int_terms(terms)
    }

    #[test]
    fn normalize_cancels_common_factor() {
        let r = normalize(p(&[(2, 1), (0, -1)]), p(&[(1, 1), (0, -1)])).unwrap();
        assert_eq!(r, QRat::from_poly(p(&[(1, 1), (0, 1)])));
    }

    #[test]
    fn normalize_zero_numerator() {
        let r = normalize(QPolynomial::zero(), p(&[(3, 1)])).unwrap();
        assert!(r.is_zero());
        assert_eq!(r, QRat::zero());
    }

    #[test]
    fn normalize_laurent_square() {
        // (q - q^-1)^2 / (q - q^-1) = q - q^-1
        let x = p(&[(1, 1), (-1, -1)]);
        let r = normalize(x.mul(&x), x.clone()).unwrap();
        assert_eq!(r, QRat::from_poly(x.clone()));
        // oracle: result times den equals num
        assert_eq!(r.num().mul(&x), x.mul(&x).mul(r.den()));
    }

    #[test]
    fn zero_denominator_is_error() {
        assert_eq!(normalize(QPolynomial::one(), QPolynomial::zero()), Err(Error::DivisionByZero));
        assert_eq!(QRat::zero().inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn add_q_and_inverse() {
        let s = QRat::q().add(&QRat::q_pow(-1));
        let expect = normalize(p(&[(2, 1), (0, 1)]), p(&[(1, 1)])).unwrap();
        assert_eq!(s, expect);
        assert_eq!(s.to_string(), "q^-1 + q");
    }

    #[test]
    fn canonical_denominator_shape() {
        let r = normalize(p(&[(0, 3)]), p(&[(-2, 2), (1, 4)])).unwrap();
        assert_eq!(r.den().low_exp(), 0);
        assert!(r.den().leading_coeff().unwrap().is_one());
    }

    #[test]
    fn eval_examples() {
        let x = QRat::from_poly(p(&[(1, 1), (-1, -1)]));
        assert_eq!(x.eval(&rat_int(2)).unwrap(), rat(3, 2));
        // raw (q^2-1)/(q-1) has a pole at 1 before normalization; canonical form evaluates to 2
        let den = p(&[(1, 1), (0, -1)]);
        assert!(den.eval(&rat_int(1)).unwrap().is_zero());
        let r = normalize(p(&[(2, 1), (0, -1)]), den).unwrap();
        assert_eq!(r.eval(&rat_int(1)).unwrap(), rat_int(2));
        let pole = normalize(QPolynomial::one(), p(&[(1, 1), (0, -1)])).unwrap();
        assert!(matches!(pole.eval(&rat_int(1)), Err(Error::PoleAtQ(_))));
    }

    #[test]
    fn alpha_at_zero_is_q() {
        // α(0) = (q^2)(q^-1) / (1·1)
        let a0 = QRat::q_pow(2).mul(&QRat::q_pow(-1));
        assert_eq!(a0.eval(&rat(5, 3)).unwrap(), rat(5, 3));
    }

    #[test]
    fn json_round_trip() {
        let r = normalize(p(&[(0, 1), (3, -2)]), p(&[(0, 1), (1, 1)])).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        let back: QRat = serde_json::from_str(&s).unwrap();
        assert_eq!(r, back);
    }

    #[test]
    fn pow_negative() {
        let x = QRat::from_int_terms(&[(0, 1), (1, 1)]);
        let y = x.pow(-2).unwrap();
        assert!(y.mul(&x.pow(2).unwrap()).is_one());
    }
}
