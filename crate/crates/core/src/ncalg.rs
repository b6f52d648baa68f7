//! Free noncommutative polynomials with series coefficients.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qfield::QRat;
use crate::series::{Bound, ExpansionSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "e")]
    E,
    #[serde(rename = "f")]
    F,
    #[serde(rename = "a")]
    A,
}

impl Family {
    pub fn letter(self) -> char {
        match self {
            Family::E => 'e',
            Family::F => 'f',
            Family::A => 'a',
        }
    }
}

/// A current mode e_n, f_n or a_n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeSymbol {
    pub family: Family,
    pub index: i64,
}

impl ModeSymbol {
    pub fn e(index: i64) -> Self {
        ModeSymbol { family: Family::E, index }
    }

    pub fn f(index: i64) -> Self {
        ModeSymbol { family: Family::F, index }
    }

    pub fn a(index: i64) -> Self {
        ModeSymbol { family: Family::A, index }
    }

    /// Principal degree: 3n+1 for e_n, 3n−1 for f_n, 3n for a_n.
    pub fn degree(self) -> i64 {
        match self.family {
            Family::E => 3 * self.index + 1,
            Family::F => 3 * self.index - 1,
            Family::A => 3 * self.index,
        }
    }

    pub fn iota(self) -> Self {
        match self.family {
            Family::E => ModeSymbol::f(-self.index),
            Family::F => ModeSymbol::e(-self.index),
            Family::A => ModeSymbol::a(-self.index),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AbstractKind {
    PfPlus,
    PsPlus,
    PfMinus,
    PsTildeMinus,
}

/// Scale applied to the argument of an abstract symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Twist {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "-q")]
    MinusQ,
    #[serde(rename = "-q^-1")]
    MinusQInv,
}

impl Twist {
    pub fn value(self) -> QRat {
        match self {
            Twist::One => QRat::one(),
            Twist::MinusQ => QRat::signed_q_pow(-1, 1),
            Twist::MinusQInv => QRat::signed_q_pow(-1, -1),
        }
    }
}

/// One of P(f(c z_i)), P(s(c z_i)), P⁻(f(c z_i)), P⁻(s̃(c z_i)).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AbstractSymbol {
    pub kind: AbstractKind,
    pub var: usize,
    pub twist: Twist,
}

impl AbstractSymbol {
    pub fn new(kind: AbstractKind, var: usize, twist: Twist) -> Result<Self> {
        let ok = match twist {
            Twist::One => true,
            Twist::MinusQ => kind == AbstractKind::PsPlus,
            Twist::MinusQInv => kind == AbstractKind::PsTildeMinus,
        };
        if !ok || var == 0 {
            return Err(Error::InvalidArgument(format!("twist {twist:?} not allowed on {kind:?} z{var}")));
        }
        Ok(AbstractSymbol { kind, var, twist })
    }

    pub fn plain(kind: AbstractKind, var: usize) -> Self {
        AbstractSymbol { kind, var, twist: Twist::One }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Mode(ModeSymbol),
    Abstract(AbstractSymbol),
}

impl Symbol {
    fn is_mode(&self) -> bool {
        matches!(self, Symbol::Mode(_))
    }
}

impl From<ModeSymbol> for Symbol {
    fn from(m: ModeSymbol) -> Self {
        Symbol::Mode(m)
    }
}

impl From<AbstractSymbol> for Symbol {
    fn from(a: AbstractSymbol) -> Self {
        Symbol::Abstract(a)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Mode(m) => write!(f, "{}_{}", m.family.letter(), m.index),
            Symbol::Abstract(a) => {
                let head = match a.kind {
                    AbstractKind::PfPlus => "P(f",
                    AbstractKind::PsPlus => "P(s",
                    AbstractKind::PfMinus => "P-(f",
                    AbstractKind::PsTildeMinus => "P-(s~",
                };
                let arg = match a.twist {
                    Twist::One => format!("z{}", a.var),
                    Twist::MinusQ => format!("-q*z{}", a.var),
                    Twist::MinusQInv => format!("-q^-1*z{}", a.var),
                };
                write!(f, "{head}({arg}))")
            }
        }
    }
}

/// Word over a single alphabet, ordered by length then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        if let Some(first) = symbols.first() {
            if symbols.iter().any(|s| s.is_mode() != first.is_mode()) {
                return Err(Error::AlphabetMixing("word mixes mode and abstract symbols".into()));
            }
        }
        Ok(Word(symbols))
    }

    pub fn modes(ms: &[ModeSymbol]) -> Self {
        Word(ms.iter().map(|&m| Symbol::Mode(m)).collect())
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `Some(true)` for mode words, `Some(false)` for abstract words, `None` when empty.
    pub fn is_mode_word(&self) -> Option<bool> {
        self.0.first().map(Symbol::is_mode)
    }

    pub fn concat(&self, other: &Word) -> Result<Word> {
        if let (Some(a), Some(b)) = (self.is_mode_word(), other.is_mode_word()) {
            if a != b {
                return Err(Error::AlphabetMixing(format!("cannot concatenate {self} and {other}")));
            }
        }
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Ok(Word(v))
    }

    pub fn mode_symbols(&self) -> Result<Vec<ModeSymbol>> {
        self.0
            .iter()
            .map(|s| match s {
                Symbol::Mode(m) => Ok(*m),
                Symbol::Abstract(_) => Err(Error::AlphabetMixing("expected a mode word".into())),
            })
            .collect()
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, s) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Sum of principal degrees; fails on abstract symbols.
pub fn principal_degree(w: &Word) -> Result<i64> {
    Ok(w.mode_symbols()?.iter().map(|m| m.degree()).sum())
}

/// Finite sum Σ coeff(w)·w with series coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NcExpr {
    n: usize,
    terms: BTreeMap<Word, ExpansionSeries>,
    validity: Bound,
}

impl NcExpr {
    pub fn zero(n: usize) -> Self {
        NcExpr { n, terms: BTreeMap::new(), validity: Bound::Exact }
    }

    pub fn one(n: usize) -> Self {
        Self::term(n, Word::empty(), ExpansionSeries::one(n)).expect("unit")
    }

    pub fn symbol(n: usize, s: impl Into<Symbol>) -> Self {
        Self::term(n, Word(vec![s.into()]), ExpansionSeries::one(n)).expect("single symbol")
    }

    pub fn term(n: usize, w: Word, c: ExpansionSeries) -> Result<Self> {
        if c.n() != n {
            return Err(Error::VariableCount(c.n(), n));
        }
        let validity = c.validity();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(w, c);
        }
        Ok(NcExpr { n, terms, validity })
    }

    pub fn from_terms<I: IntoIterator<Item = (Word, ExpansionSeries)>>(n: usize, it: I) -> Result<Self> {
        let mut out = NcExpr::zero(n);
        for (w, c) in it {
            out.accumulate(w, c)?;
        }
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn validity(&self) -> Bound {
        self.validity
    }

    pub fn terms(&self) -> &BTreeMap<Word, ExpansionSeries> {
        &self.terms
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

    pub fn coeff(&self, w: &Word) -> ExpansionSeries {
        self.terms.get(w).cloned().unwrap_or_else(|| ExpansionSeries::zero(self.n))
    }

    fn alphabet(&self) -> Option<bool> {
        self.terms.keys().find_map(|w| w.is_mode_word())
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::VariableCount(self.n, other.n));
        }
        if let (Some(a), Some(b)) = (self.alphabet(), other.alphabet()) {
            if a != b {
                return Err(Error::AlphabetMixing("expressions over different alphabets".into()));
            }
        }
        Ok(())
    }

    fn accumulate(&mut self, w: Word, c: ExpansionSeries) -> Result<()> {
        if c.n() != self.n {
            return Err(Error::VariableCount(c.n(), self.n));
        }
        if let (Some(a), Some(b)) = (self.alphabet(), w.is_mode_word()) {
            if a != b {
                return Err(Error::AlphabetMixing(format!("word {w} does not match expression alphabet")));
            }
        }
        let sum = match self.terms.remove(&w) {
            Some(old) => old.add(&c)?,
            None => c,
        };
        self.validity = self.validity.min(sum.validity());
        if !sum.is_zero() {
            self.terms.insert(w, sum);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        out.validity = out.validity.min(other.validity);
        for (w, c) in &other.terms {
            out.accumulate(w.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| Ok(c.neg())).expect("negation")
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = NcExpr::zero(self.n);
        out.validity = self.validity.min(other.validity);
        if self.terms.is_empty() || other.terms.is_empty() {
            return Ok(out);
        }
        out.validity = Bound::Exact;
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                out.accumulate(w1.concat(w2)?, c1.mul(c2)?)?;
            }
        }
        Ok(out)
    }

    /// Multiplies every coefficient by a series.
    pub fn scale(&self, s: &ExpansionSeries) -> Result<Self> {
        let mut out = NcExpr::zero(self.n);
        out.validity = self.validity.min(s.validity());
        for (w, c) in &self.terms {
            out.accumulate(w.clone(), c.mul(s)?)?;
        }
        Ok(out)
    }

    pub fn scale_q(&self, c: &QRat) -> Self {
        let mut out = self.map_coeffs(|s| Ok(s.scale(c))).expect("scalar multiple");
        out.terms.retain(|_, s| !s.is_zero());
        out
    }

    /// Applies `f` to every coefficient, keeping words fixed.
    pub fn map_coeffs<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(&ExpansionSeries) -> Result<ExpansionSeries>,
    {
        let mut out = NcExpr::zero(self.n);
        out.validity = self.validity;
        for (w, c) in &self.terms {
            out.accumulate(w.clone(), f(c)?)?;
        }
        Ok(out)
    }

    /// Restricts every coefficient to grades ≤ `bound`.
    pub fn truncate(&self, bound: i64) -> Self {
        let mut out = self.map_coeffs(|c| Ok(c.truncate(bound))).expect("truncation");
        out.validity = out.validity.min(Bound::Finite(bound));
        out
    }

    /// Keeps only the words accepted by `keep`.
    pub fn filter_words<F: Fn(&Word) -> bool>(&self, keep: F) -> Self {
        NcExpr {
            n: self.n,
            terms: self.terms.iter().filter(|(w, _)| keep(w)).map(|(w, c)| (w.clone(), c.clone())).collect(),
            validity: self.validity,
        }
    }

    /// Builds an expression whose coefficients live in a larger variable set.
    pub fn widen(&self, n: usize) -> Self {
        NcExpr {
            n,
            terms: self.terms.iter().map(|(w, c)| (w.clone(), c.widen(n))).collect(),
            validity: self.validity,
        }
    }

    /// Sets the header to `v` if that is smaller.
    pub fn cap_validity(mut self, v: Bound) -> Self {
        self.validity = self.validity.min(v);
        self
    }
}

impl fmt::Display for NcExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            if *c == ExpansionSeries::one(self.n) {
                write!(f, "{w}")?;
            } else {
                write!(f, "[{c}] {w}")?;
            }
        }
        Ok(())
    }
}

/// q-commutator [a, b]_c = ab − c·ba.
pub fn q_commutator(a: &NcExpr, b: &NcExpr, c: &QRat) -> Result<NcExpr> {
    a.mul(b)?.sub(&b.mul(a)?.scale_q(c))
}

/// The involution e_n ↔ f_{−n}, a_n → a_{−n} applied letterwise, optionally with z_i → z_i⁻¹.
pub fn iota(x: &NcExpr, invert_vars: bool) -> Result<NcExpr> {
    let mut out = NcExpr::zero(x.n);
    out.validity = x.validity;
    for (w, c) in &x.terms {
        let image: Vec<ModeSymbol> = w.mode_symbols()?.into_iter().map(ModeSymbol::iota).collect();
        let coeff = if invert_vars { c.invert_vars() } else { c.clone() };
        out.accumulate(Word::modes(&image), coeff)?;
    }
    Ok(out)
}

/// Coefficientwise agreement on all grades ≤ `bound`.
pub fn nc_equal(a: &NcExpr, b: &NcExpr, bound: i64) -> Result<bool> {
    for v in [a.validity, b.validity] {
        if !v.admits(bound) {
            return Err(Error::InsufficientTruncation { bound, validity: v.to_string() });
        }
    }
    if a.n != b.n {
        return Err(Error::VariableCount(a.n, b.n));
    }
    let zero = ExpansionSeries::zero(a.n);
    let words: std::collections::BTreeSet<&Word> = a.terms.keys().chain(b.terms.keys()).collect();
    for w in words {
        let x = a.terms.get(w).unwrap_or(&zero);
        let y = b.terms.get(w).unwrap_or(&zero);
        if !x.agrees_up_to(y, bound) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::FactoredRational;

    fn f(k: i64) -> NcExpr {
        NcExpr::symbol(2, ModeSymbol::f(k))
    }

    #[test]
    fn product_of_modes() {
        let p = f(1).mul(&f(0)).unwrap();
        assert_eq!(p.len(), 1);
        let w = Word::modes(&[ModeSymbol::f(1), ModeSymbol::f(0)]);
        assert_eq!(p.coeff(&w), ExpansionSeries::one(2));
    }

    #[test]
    fn q_commutator_has_two_words() {
        let c = q_commutator(&f(1), &f(0), &QRat::q_pow(-1)).unwrap();
        assert_eq!(c.len(), 2);
        let ba = Word::modes(&[ModeSymbol::f(0), ModeSymbol::f(1)]);
        assert_eq!(c.coeff(&ba), ExpansionSeries::constant(2, QRat::q_pow(-1).neg()));
    }

    #[test]
    fn mul_by_empty() {
        assert!(f(1).mul(&NcExpr::zero(2)).unwrap().is_zero());
    }

    #[test]
    fn alphabet_mixing_errors() {
        let a = NcExpr::symbol(2, AbstractSymbol::plain(AbstractKind::PfPlus, 1));
        assert!(matches!(f(1).mul(&a), Err(Error::AlphabetMixing(_))));
        assert!(matches!(f(1).add(&a), Err(Error::AlphabetMixing(_))));
    }

    #[test]
    fn iota_on_word() {
        let w = f(2).mul(&f(-1)).unwrap();
        let img = iota(&w, false).unwrap();
        let expect = Word::modes(&[ModeSymbol::e(-2), ModeSymbol::e(1)]);
        assert_eq!(img.terms().keys().next(), Some(&expect));
        assert_eq!(iota(&img, false).unwrap(), w);
    }

    #[test]
    fn iota_inverts_exponents() {
        let c = ExpansionSeries::monomial(1, vec![-3], QRat::one());
        let x = NcExpr::term(1, Word::modes(&[ModeSymbol::f(3)]), c).unwrap();
        let y = iota(&x, true).unwrap();
        let (w, s) = y.terms().iter().next().unwrap();
        assert_eq!(w, &Word::modes(&[ModeSymbol::e(-3)]));
        assert_eq!(s.coeff(&[3]), QRat::one());
    }

    #[test]
    fn degrees() {
        assert_eq!(principal_degree(&Word::modes(&[ModeSymbol::f(1), ModeSymbol::f(0)])).unwrap(), 1);
        assert_eq!(principal_degree(&Word::empty()).unwrap(), 0);
        let w = Word::modes(&[ModeSymbol::e(2), ModeSymbol::f(-3), ModeSymbol::a(4)]);
        let img = Word::modes(&w.mode_symbols().unwrap().into_iter().map(ModeSymbol::iota).collect::<Vec<_>>());
        assert_eq!(principal_degree(&img).unwrap(), -principal_degree(&w).unwrap());
    }

    #[test]
    fn equality_ignores_terms_above_bound() {
        let fr = FactoredRational::binary(2, QRat::one(), 1, QRat::from_int(-1), 2, -1).unwrap();
        let s = fr.expand(3).unwrap();
        let v = s.validity().finite().unwrap();
        let x = NcExpr::term(2, Word::modes(&[ModeSymbol::f(1)]), s).unwrap();
        let extra = ExpansionSeries::monomial(2, vec![-(v as i32 + 1), v as i32 + 1], QRat::one());
        let y = x.add(&NcExpr::term(2, Word::modes(&[ModeSymbol::f(1)]), extra).unwrap()).unwrap();
        assert!(nc_equal(&x, &x, v).unwrap());
        assert!(nc_equal(&x, &y, v).unwrap());
        assert!(matches!(nc_equal(&x, &y, v + 1), Err(Error::InsufficientTruncation { .. })));
    }
}
