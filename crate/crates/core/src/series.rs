//! Truncated Laurent expansions in z₁,…,zₙ.
//!
//! Expansions live in the domain |z₁| ≫ … ≫ |zₙ| and are graded by the
//! ratio-degree d(a) = Σ j·a_j, under which every correction monomial z_j/z_i
//! with j > i has positive degree. A series records the largest grade `V` up to
//! which its stored terms are the true coefficients.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qfield::{QRat, Rat};

/// Exponent vector; position `i - 1` holds the power of `z_i`.
pub type ExpVec = Vec<i32>;

/// Ratio-degree d(a) = Σ j·a_j with 1-based `j`.
pub fn ratio_degree(a: &[i32]) -> i64 {
    a.iter().enumerate().map(|(k, &e)| (k as i64 + 1) * e as i64).sum()
}

/// Upper grade up to which a series is exact. `Exact` means no truncation occurred.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Bound {
    Finite(i64),
    Exact,
}

impl Bound {
    pub fn plus(self, k: i64) -> Bound {
        match self {
            Bound::Finite(v) => Bound::Finite(v + k),
            Bound::Exact => Bound::Exact,
        }
    }

    fn add(self, other: Bound) -> Bound {
        match (self, other) {
            (Bound::Finite(a), Bound::Finite(b)) => Bound::Finite(a + b),
            _ => Bound::Exact,
        }
    }

    pub fn admits(self, g: i64) -> bool {
        match self {
            Bound::Finite(v) => g <= v,
            Bound::Exact => true,
        }
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            Bound::Finite(v) => Some(v),
            Bound::Exact => None,
        }
    }
}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Bound {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Bound::Finite(a), Bound::Finite(b)) => a.cmp(b),
            (Bound::Finite(_), Bound::Exact) => Ordering::Less,
            (Bound::Exact, Bound::Finite(_)) => Ordering::Greater,
            (Bound::Exact, Bound::Exact) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(v) => write!(f, "{v}"),
            Bound::Exact => write!(f, "exact"),
        }
    }
}

/// Which ordering of the variables a series is expanded in.
///
/// `Ascending` (|z₁| ≪ … ≪ |zₙ|) only arises from inverting every variable,
/// and its grade is −d(a).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Domain {
    #[default]
    Descending,
    Ascending,
}

impl Domain {
    pub fn grade(self, a: &[i32]) -> i64 {
        match self {
            Domain::Descending => ratio_degree(a),
            Domain::Ascending => -ratio_degree(a),
        }
    }

    pub fn flip(self) -> Domain {
        match self {
            Domain::Descending => Domain::Ascending,
            Domain::Ascending => Domain::Descending,
        }
    }
}

/// Truncated expansion with a validity bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionSeries {
    n: usize,
    domain: Domain,
    terms: BTreeMap<ExpVec, QRat>,
    validity: Bound,
}

impl ExpansionSeries {
    pub fn zero(n: usize) -> Self {
        ExpansionSeries { n, domain: Domain::Descending, terms: BTreeMap::new(), validity: Bound::Exact }
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, QRat::one())
    }

    pub fn constant(n: usize, c: QRat) -> Self {
        Self::monomial(n, vec![0; n], c)
    }

    pub fn monomial(n: usize, a: ExpVec, c: QRat) -> Self {
        assert_eq!(a.len(), n, "exponent vector length");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(a, c);
        }
        ExpansionSeries { n, domain: Domain::Descending, terms, validity: Bound::Exact }
    }

    /// Builds a series from raw terms, dropping zeros and anything above `validity`.
    pub fn from_terms<I>(n: usize, domain: Domain, validity: Bound, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ExpVec, QRat)>,
    {
        let mut map: BTreeMap<ExpVec, QRat> = BTreeMap::new();
        for (a, c) in terms {
            if a.len() != n {
                return Err(Error::VariableCount(a.len(), n));
            }
            if !validity.admits(domain.grade(&a)) {
                continue;
            }
            let slot = map.entry(a).or_insert_with(QRat::zero);
            *slot = slot.add(&c);
        }
        map.retain(|_, c| !c.is_zero());
        Ok(ExpansionSeries { n, domain, terms: map, validity })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn validity(&self) -> Bound {
        self.validity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<ExpVec, QRat> {
        &self.terms
    }

    pub fn coeff(&self, a: &[i32]) -> QRat {
        self.terms.get(a).cloned().unwrap_or_else(QRat::zero)
    }

    pub fn grade(&self, a: &[i32]) -> i64 {
        self.domain.grade(a)
    }

    /// Smallest grade in the support, or the first grade past validity when empty.
    fn dmin(&self) -> Bound {
        match self.terms.keys().map(|a| self.domain.grade(a)).min() {
            Some(g) => Bound::Finite(g),
            None => self.validity.plus(1),
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::VariableCount(self.n, other.n));
        }
        if self.domain != other.domain && !self.is_trivially_domainless() && !other.is_trivially_domainless() {
            return Err(Error::DomainMismatch);
        }
        Ok(())
    }

    /// Exact series supported on the zero exponent mean the same thing in either domain.
    fn is_trivially_domainless(&self) -> bool {
        self.validity == Bound::Exact && self.terms.keys().all(|a| a.iter().all(|&e| e == 0))
    }

    fn joint_domain(&self, other: &Self) -> Domain {
        if self.is_trivially_domainless() {
            other.domain
        } else {
            self.domain
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let domain = self.joint_domain(other);
        let validity = self.validity.min(other.validity);
        let mut terms = BTreeMap::new();
        for (a, c) in self.terms.iter().chain(other.terms.iter()) {
            if !validity.admits(domain.grade(a)) {
                continue;
            }
            let slot: &mut QRat = terms.entry(a.clone()).or_insert_with(QRat::zero);
            *slot = slot.add(c);
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(ExpansionSeries { n: self.n, domain, terms, validity })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        ExpansionSeries {
            n: self.n,
            domain: self.domain,
            terms: self.terms.iter().map(|(a, c)| (a.clone(), c.neg())).collect(),
            validity: self.validity,
        }
    }

    pub fn scale(&self, c: &QRat) -> Self {
        if c.is_zero() {
            return ExpansionSeries { terms: BTreeMap::new(), ..self.clone() };
        }
        ExpansionSeries {
            n: self.n,
            domain: self.domain,
            terms: self.terms.iter().map(|(a, x)| (a.clone(), x.mul(c))).collect(),
            validity: self.validity,
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let domain = self.joint_domain(other);
        let validity = self.validity.add(other.dmin()).min(other.validity.add(self.dmin()));
        let mut rhs: Vec<(i64, &ExpVec, &QRat)> =
            other.terms.iter().map(|(a, c)| (domain.grade(a), a, c)).collect();
        rhs.sort_by_key(|t| t.0);
        let mut terms: BTreeMap<ExpVec, QRat> = BTreeMap::new();
        for (a, x) in &self.terms {
            let ga = domain.grade(a);
            for (gb, b, y) in &rhs {
                if !validity.admits(ga + gb) {
                    break;
                }
                let e: ExpVec = a.iter().zip(b.iter()).map(|(p, q)| p + q).collect();
                let prod = x.mul(y);
                let slot = terms.entry(e).or_insert_with(QRat::zero);
                *slot = slot.add(&prod);
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(ExpansionSeries { n: self.n, domain, terms, validity })
    }

    /// Multiplies by the monomial z^b.
    pub fn shift(&self, b: &[i32]) -> Self {
        let g = self.domain.grade(b);
        ExpansionSeries {
            n: self.n,
            domain: self.domain,
            terms: self
                .terms
                .iter()
                .map(|(a, c)| (a.iter().zip(b).map(|(x, y)| x + y).collect(), c.clone()))
                .collect(),
            validity: self.validity.plus(g),
        }
    }

    /// Drops every term above `bound` and lowers the validity accordingly.
    pub fn truncate(&self, bound: i64) -> Self {
        let validity = self.validity.min(Bound::Finite(bound));
        ExpansionSeries {
            n: self.n,
            domain: self.domain,
            terms: self
                .terms
                .iter()
                .filter(|(a, _)| validity.admits(self.domain.grade(a)))
                .map(|(a, c)| (a.clone(), c.clone()))
                .collect(),
            validity,
        }
    }

    /// Replaces z_i by c·z_i for a nonzero monomial c = ±q^e.
    pub fn substitute_scale(&self, i: usize, c: &QRat) -> Result<Self> {
        let (cr, ce) = monomial_parts(c)?;
        if i == 0 || i > self.n {
            return Err(Error::InvalidArgument(format!("variable index {i} out of range 1..={}", self.n)));
        }
        let mut terms = BTreeMap::new();
        for (a, x) in &self.terms {
            let k = a[i - 1];
            let factor = QRat::monomial(rat_pow(&cr, k), ce * k);
            terms.insert(a.clone(), x.mul(&factor));
        }
        Ok(ExpansionSeries { n: self.n, domain: self.domain, terms, validity: self.validity })
    }

    /// z_i → z_i⁻¹ for every variable; the grade of each term is unchanged.
    pub fn invert_vars(&self) -> Self {
        ExpansionSeries {
            n: self.n,
            domain: self.domain.flip(),
            terms: self.terms.iter().map(|(a, c)| (a.iter().map(|e| -e).collect(), c.clone())).collect(),
            validity: self.validity,
        }
    }

    /// Embeds into a larger variable set by appending zero exponents.
    pub fn widen(&self, n: usize) -> Self {
        assert!(n >= self.n);
        ExpansionSeries {
            n,
            domain: self.domain,
            terms: self
                .terms
                .iter()
                .map(|(a, c)| {
                    let mut b = a.clone();
                    b.resize(n, 0);
                    (b, c.clone())
                })
                .collect(),
            validity: self.validity,
        }
    }

    /// Agreement on all terms of grade at most `bound`.
    pub fn agrees_up_to(&self, other: &Self, bound: i64) -> bool {
        let keys: std::collections::BTreeSet<&ExpVec> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter()
            .filter(|a| self.domain.grade(a) <= bound)
            .all(|a| self.coeff(a) == other.coeff(a))
    }
}

impl fmt::Display for ExpansionSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (k, (a, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (v, &e) in a.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*z{}", v + 1)?,
                    _ => write!(f, "*z{}^{}", v + 1, e)?,
                }
            }
        }
        if let Bound::Finite(v) = self.validity {
            write!(f, " + O(d>{v})")?;
        }
        Ok(())
    }
}

fn monomial_parts(c: &QRat) -> Result<(Rat, i32)> {
    match c.as_monomial() {
        Some((r, e)) if !r.is_zero() => Ok((r.clone(), e)),
        _ if c.is_zero() => Err(Error::InvalidArgument("scale factor must be nonzero".into())),
        _ => Err(Error::InvalidArgument(format!("scale factor {c} is not a monomial in q"))),
    }
}

fn rat_pow(r: &Rat, k: i32) -> Rat {
    if k >= 0 {
        num_traits::pow(r.clone(), k as usize)
    } else {
        num_traits::pow(r.recip(), (-k) as usize)
    }
}

fn binom(n: i64, k: i64) -> BigInt {
    let mut acc = BigInt::one();
    for t in 0..k {
        acc = acc * BigInt::from(n - t) / BigInt::from(t + 1);
    }
    acc
}

/// One binary factor (z_i + v·z_j)^m with i < j, stored with unit leading coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Factor {
    pub i: usize,
    pub j: usize,
    pub v: QRat,
    pub m: i32,
}

/// Rational function scalar · z^monomial · ∏ (z_i + v·z_j)^m.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredRational {
    n: usize,
    scalar: QRat,
    monomial: ExpVec,
    factors: Vec<Factor>,
}

impl FactoredRational {
    pub fn one(n: usize) -> Self {
        Self::constant(n, QRat::one())
    }

    pub fn constant(n: usize, c: QRat) -> Self {
        FactoredRational { n, scalar: c, monomial: vec![0; n], factors: Vec::new() }
    }

    pub fn monomial(n: usize, a: ExpVec, c: QRat) -> Self {
        assert_eq!(a.len(), n);
        FactoredRational { n, scalar: c, monomial: a, factors: Vec::new() }
    }

    /// z_i as a factored rational.
    pub fn var(n: usize, i: usize) -> Self {
        let mut a = vec![0; n];
        a[i - 1] = 1;
        Self::monomial(n, a, QRat::one())
    }

    /// (u·z_i + v·z_j)^m for arbitrary indices, normalized.
    pub fn binary(n: usize, u: QRat, i: usize, v: QRat, j: usize, m: i32) -> Result<Self> {
        Self::one(n).times_binary(u, i, v, j, m)
    }

    /// Multiplies in (u·z_i + v·z_j)^m, keeping the canonical factor list.
    pub fn times_binary(mut self, u: QRat, i: usize, v: QRat, j: usize, m: i32) -> Result<Self> {
        for idx in [i, j] {
            if idx == 0 || idx > self.n {
                return Err(Error::InvalidArgument(format!("variable index {idx} out of range 1..={}", self.n)));
            }
        }
        if m == 0 {
            return Ok(self);
        }
        let (u, i, v, j) = if i == j {
            (u.add(&v), i, QRat::zero(), j)
        } else if i < j {
            (u, i, v, j)
        } else {
            (v, j, u, i)
        };
        if u.is_zero() && v.is_zero() {
            if m < 0 {
                return Err(Error::NonExpandable(format!("zero factor in z{i}, z{j} raised to {m}")));
            }
            self.scalar = QRat::zero();
            return Ok(self);
        }
        if v.is_zero() {
            self.scalar = self.scalar.mul(&u.pow(m)?);
            self.monomial[i - 1] += m;
            return Ok(self);
        }
        if u.is_zero() {
            self.scalar = self.scalar.mul(&v.pow(m)?);
            self.monomial[j - 1] += m;
            return Ok(self);
        }
        self.scalar = self.scalar.mul(&u.pow(m)?);
        let ratio = v.div(&u)?;
        if let Some(pos) = self.factors.iter().position(|f| f.i == i && f.j == j && f.v == ratio) {
            self.factors[pos].m += m;
            if self.factors[pos].m == 0 {
                self.factors.remove(pos);
            }
        } else {
            self.factors.push(Factor { i, j, v: ratio, m });
            self.factors.sort_by(|a, b| (a.i, a.j, a.v.to_string()).cmp(&(b.i, b.j, b.v.to_string())));
        }
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn scalar(&self) -> &QRat {
        &self.scalar
    }

    pub fn monomial_exps(&self) -> &ExpVec {
        &self.monomial
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn is_zero(&self) -> bool {
        self.scalar.is_zero()
    }

    pub fn scale(mut self, c: &QRat) -> Self {
        self.scalar = self.scalar.mul(c);
        self
    }

    pub fn neg(self) -> Self {
        self.scale(&QRat::from_int(-1))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::VariableCount(self.n, other.n));
        }
        let mut out = self.clone();
        out.scalar = out.scalar.mul(&other.scalar);
        for (x, y) in out.monomial.iter_mut().zip(&other.monomial) {
            *x += y;
        }
        for f in &other.factors {
            out = out.times_binary(QRat::one(), f.i, f.v.clone(), f.j, f.m)?;
        }
        Ok(out)
    }

    pub fn inv(&self) -> Result<Self> {
        Ok(FactoredRational {
            n: self.n,
            scalar: self.scalar.inv()?,
            monomial: self.monomial.iter().map(|e| -e).collect(),
            factors: self.factors.iter().map(|f| Factor { m: -f.m, ..f.clone() }).collect(),
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inv()?)
    }

    /// Total homogeneous degree in z.
    pub fn degree(&self) -> i64 {
        self.monomial.iter().map(|&e| e as i64).sum::<i64>() + self.factors.iter().map(|f| f.m as i64).sum::<i64>()
    }

    /// Exponents of the leading monomial in the descending domain.
    pub fn leading_exps(&self) -> ExpVec {
        let mut a = self.monomial.clone();
        for f in &self.factors {
            a[f.i - 1] += f.m;
        }
        a
    }

    /// Relabels variables: z_k ↦ z_{map[k-1]} in an `n`-variable context.
    pub fn relabel(&self, map: &[usize], n: usize) -> Result<Self> {
        let mut mono = vec![0; n];
        for (k, &e) in self.monomial.iter().enumerate() {
            mono[map[k] - 1] += e;
        }
        let mut out = FactoredRational { n, scalar: self.scalar.clone(), monomial: mono, factors: Vec::new() };
        for f in &self.factors {
            out = out.times_binary(QRat::one(), map[f.i - 1], f.v.clone(), map[f.j - 1], f.m)?;
        }
        Ok(out)
    }

    /// Replaces z_i by c·z_i.
    pub fn substitute_scale(&self, i: usize, c: &QRat) -> Result<Self> {
        monomial_parts(c)?;
        let mut out = FactoredRational {
            n: self.n,
            scalar: self.scalar.mul(&c.pow(self.monomial[i - 1])?),
            monomial: self.monomial.clone(),
            factors: Vec::new(),
        };
        for f in &self.factors {
            let u = if f.i == i { c.clone() } else { QRat::one() };
            let v = if f.j == i { f.v.mul(c) } else { f.v.clone() };
            out = out.times_binary(u, f.i, v, f.j, f.m)?;
        }
        Ok(out)
    }

    /// Exact value at q = q₀ and z = zvals.
    pub fn eval_exact(&self, q0: &Rat, zvals: &[Rat]) -> Result<Rat> {
        if zvals.len() != self.n {
            return Err(Error::VariableCount(zvals.len(), self.n));
        }
        let mut acc = self.scalar.eval(q0)?;
        for (k, &e) in self.monomial.iter().enumerate() {
            if e < 0 && zvals[k].is_zero() {
                return Err(Error::PoleHit(format!("z{} = 0", k + 1)));
            }
            acc *= rat_pow(&zvals[k], e);
        }
        for f in &self.factors {
            let val = &zvals[f.i - 1] + f.v.eval(q0)? * &zvals[f.j - 1];
            if val.is_zero() {
                if f.m < 0 {
                    return Err(Error::PoleHit(format!("factor (z{} + ({})z{}) vanishes", f.i, f.v, f.j)));
                }
                return Ok(Rat::zero());
            }
            acc *= rat_pow(&val, f.m);
        }
        Ok(acc)
    }

    /// Laurent expansion in |z₁| ≫ … ≫ |zₙ| to relative depth `depth`.
    pub fn expand(&self, depth: i64) -> Result<ExpansionSeries> {
        let n = self.n;
        if self.scalar.is_zero() {
            return Ok(ExpansionSeries::zero(n));
        }
        let truncated = self.factors.iter().any(|f| f.m < 0);
        let cap = if truncated { Some(depth) } else { None };
        // relative series: exponent offsets from the leading monomial
        let mut acc: Vec<(ExpVec, i64, QRat)> = vec![(vec![0; n], 0, QRat::one())];
        for f in &self.factors {
            let step = (f.j - f.i) as i64;
            let mut part: Vec<(ExpVec, i64, QRat)> = Vec::new();
            let (count, signed_m) = if f.m > 0 { (f.m as i64, f.m as i64) } else { (i64::MAX, f.m as i64) };
            let mut t: i64 = 0;
            while t <= count && cap.is_none_or(|d| t * step <= d) {
                // coefficient of (v z_j/z_i)^t in (1 + x)^m
                let c = if signed_m > 0 {
                    binom(signed_m, t)
                } else {
                    let k = -signed_m;
                    let b = binom(k + t - 1, t);
                    if t % 2 == 1 {
                        -b
                    } else {
                        b
                    }
                };
                let coeff = QRat::from_rat(Rat::from_integer(c)).mul(&f.v.pow(t as i32)?);
                let mut a = vec![0; n];
                a[f.i - 1] = -(t as i32);
                a[f.j - 1] = t as i32;
                part.push((a, t * step, coeff));
                t += 1;
            }
            let mut next: BTreeMap<ExpVec, (i64, QRat)> = BTreeMap::new();
            for (a, ga, x) in &acc {
                for (b, gb, y) in &part {
                    let g = ga + gb;
                    if cap.is_some_and(|d| g > d) {
                        continue;
                    }
                    let e: ExpVec = a.iter().zip(b).map(|(p, q)| p + q).collect();
                    let slot = next.entry(e).or_insert((g, QRat::zero()));
                    slot.1 = slot.1.add(&x.mul(y));
                }
            }
            acc = next.into_iter().filter(|(_, (_, c))| !c.is_zero()).map(|(a, (g, c))| (a, g, c)).collect();
        }
        let lead = self.leading_exps();
        let lead_deg = ratio_degree(&lead);
        let validity = if truncated { Bound::Finite(lead_deg + depth) } else { Bound::Exact };
        ExpansionSeries::from_terms(
            n,
            Domain::Descending,
            validity,
            acc.into_iter().map(|(a, _, c)| (a.iter().zip(&lead).map(|(x, y)| x + y).collect(), c.mul(&self.scalar))),
        )
    }
}

/// Numerator and denominator of a factored form as exact multivariate
/// polynomials, each encoded as a term map.
pub fn cleared_parts(fr: &FactoredRational) -> (BTreeMap<ExpVec, QRat>, BTreeMap<ExpVec, QRat>) {
    let n = fr.n;
    let mut num: BTreeMap<ExpVec, QRat> = BTreeMap::new();
    let mut den: BTreeMap<ExpVec, QRat> = BTreeMap::new();
    let mut nm = vec![0; n];
    let mut dm = vec![0; n];
    for (k, &e) in fr.monomial.iter().enumerate() {
        if e >= 0 {
            nm[k] = e;
        } else {
            dm[k] = -e;
        }
    }
    num.insert(nm, fr.scalar.clone());
    den.insert(dm, QRat::one());
    for f in &fr.factors {
        let target = if f.m > 0 { &mut num } else { &mut den };
        for _ in 0..f.m.unsigned_abs() {
            let mut a = vec![0; n];
            a[f.i - 1] = 1;
            let mut b = vec![0; n];
            b[f.j - 1] = 1;
            let lin: BTreeMap<ExpVec, QRat> = [(a, QRat::one()), (b, f.v.clone())].into_iter().collect();
            *target = poly_mul(target, &lin);
        }
    }
    (num, den)
}

pub fn poly_mul(a: &BTreeMap<ExpVec, QRat>, b: &BTreeMap<ExpVec, QRat>) -> BTreeMap<ExpVec, QRat> {
    let mut out: BTreeMap<ExpVec, QRat> = BTreeMap::new();
    for (x, c) in a {
        for (y, d) in b {
            let e: ExpVec = x.iter().zip(y).map(|(p, q)| p + q).collect();
            let slot = out.entry(e).or_insert_with(QRat::zero);
            *slot = slot.add(&c.mul(d));
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Checks that `expand(fr)` times the cleared denominator reproduces the
/// cleared numerator on every grade the product is valid for.
pub fn reconstruction_holds(fr: &FactoredRational, depth: i64) -> Result<bool> {
    let s = fr.expand(depth)?;
    let (num, den) = cleared_parts(fr);
    let den_series = ExpansionSeries::from_terms(fr.n, Domain::Descending, Bound::Exact, den)?;
    let prod = s.mul(&den_series)?;
    let num_series = ExpansionSeries::from_terms(fr.n, Domain::Descending, Bound::Exact, num)?;
    let bound = match prod.validity() {
        Bound::Finite(v) => v,
        Bound::Exact => i64::MAX,
    };
    Ok(prod.agrees_up_to(&num_series, bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfield::{rat, rat_int};

    fn qp(e: i32) -> QRat {
        QRat::q_pow(e)
    }

    #[test]
    fn geometric_example() {
        // z1/(q^2 z1 - z2) at D=2 in n=2
        let fr = FactoredRational::var(2, 1)
            .mul(&FactoredRational::binary(2, qp(2), 1, QRat::from_int(-1), 2, -1).unwrap())
            .unwrap();
        let s = fr.expand(2).unwrap();
        assert_eq!(s.validity(), Bound::Finite(2));
        assert_eq!(s.len(), 3);
        assert_eq!(s.coeff(&[0, 0]), qp(-2));
        assert_eq!(s.coeff(&[-1, 1]), qp(-4));
        assert_eq!(s.coeff(&[-2, 2]), qp(-6));
    }

    #[test]
    fn polynomial_is_exact() {
        let fr = FactoredRational::binary(2, QRat::one(), 1, QRat::from_int(-1), 2, 1).unwrap();
        let s = fr.expand(3).unwrap();
        assert_eq!(s.validity(), Bound::Exact);
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn telescoping_product() {
        let a = FactoredRational::binary(2, QRat::one(), 1, QRat::from_int(-1), 2, 1).unwrap().expand(0).unwrap();
        let b = FactoredRational::binary(2, QRat::one(), 1, QRat::from_int(-1), 2, -1)
            .unwrap()
            .mul(&FactoredRational::var(2, 1))
            .unwrap()
            .expand(5)
            .unwrap();
        let scaled = a.mul(&b).unwrap().shift(&[-1, 0]);
        assert_eq!(scaled.validity(), Bound::Finite(5));
        assert_eq!(scaled.terms().len(), 1);
        assert_eq!(scaled.coeff(&[0, 0]), QRat::one());
    }

    #[test]
    fn scale_by_zero_is_empty() {
        let s = ExpansionSeries::one(2).scale(&QRat::zero());
        assert!(s.is_zero());
    }

    #[test]
    fn substitute_scale_on_series() {
        let s = ExpansionSeries::monomial(1, vec![-3], QRat::one());
        let t = s.substitute_scale(1, &QRat::signed_q_pow(-1, 1)).unwrap();
        assert_eq!(t.coeff(&[-3]), QRat::signed_q_pow(-1, -3));
        assert_eq!(s.substitute_scale(1, &QRat::one()).unwrap(), s);
        assert!(s.substitute_scale(1, &QRat::zero()).is_err());
    }

    #[test]
    fn eval_simple() {
        let fr = FactoredRational::binary(2, QRat::one(), 1, QRat::from_int(-1), 2, 1).unwrap();
        assert_eq!(fr.eval_exact(&rat_int(2), &[rat_int(3), rat_int(1)]).unwrap(), rat_int(2));
        let inv = fr.inv().unwrap();
        assert!(matches!(inv.eval_exact(&rat_int(2), &[rat_int(3), rat_int(3)]), Err(Error::PoleHit(_))));
    }

    #[test]
    fn zero_factor_with_negative_power_rejected() {
        assert!(matches!(
            FactoredRational::binary(2, QRat::one(), 1, QRat::from_int(-1), 1, -1),
            Err(Error::NonExpandable(_))
        ));
    }

    #[test]
    fn swapped_indices_normalize() {
        let a = FactoredRational::binary(3, QRat::from_int(2), 3, qp(1), 1, -1).unwrap();
        assert_eq!(a.factors()[0].i, 1);
        assert_eq!(a.factors()[0].j, 3);
        let z = [rat(3, 1), rat(5, 7), rat(2, 9)];
        let q0 = rat(3, 2);
        let direct = (rat_int(2) * &z[2] + &q0 * &z[0]).recip();
        assert_eq!(a.eval_exact(&q0, &z).unwrap(), direct);
    }

    #[test]
    fn invert_vars_twice() {
        let fr = FactoredRational::binary(2, QRat::one(), 1, qp(1), 2, -2).unwrap();
        let s = fr.expand(4).unwrap();
        assert_eq!(s.invert_vars().invert_vars(), s);
        assert_eq!(s.invert_vars().domain(), Domain::Ascending);
    }

    #[test]
    fn domain_mismatch_errors() {
        let fr = FactoredRational::binary(2, QRat::one(), 1, qp(1), 2, -1).unwrap();
        let s = fr.expand(2).unwrap();
        assert_eq!(s.add(&s.invert_vars()), Err(Error::DomainMismatch));
    }
}
