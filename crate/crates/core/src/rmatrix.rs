//! Truncated pairing tensor, Cartan tensor and the projected R-matrix factors.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ncalg::{Family, ModeSymbol, NcExpr, Symbol, Word};
use crate::projection::{mode_expand, star_projection, weight_minus_closed, weight_plus_closed, Orientation};
use crate::qfield::{QRat, Rat};

/// Σ coeff·(left ⊗ right) over pairs of mode words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorExpr {
    pub terms: BTreeMap<(Word, Word), QRat>,
    pub order: usize,
    pub window: i64,
}

impl TensorExpr {
    pub fn zero(order: usize, window: i64) -> Self {
        TensorExpr { terms: BTreeMap::new(), order, window }
    }

    /// 1 ⊗ 1.
    pub fn unit(window: i64) -> Self {
        let mut t = Self::zero(0, window);
        t.terms.insert((Word::empty(), Word::empty()), QRat::one());
        t
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, left: &Word, right: &Word) -> QRat {
        self.terms.get(&(left.clone(), right.clone())).cloned().unwrap_or_else(QRat::zero)
    }

    pub fn insert_add(&mut self, left: Word, right: Word, c: QRat) {
        if c.is_zero() {
            return;
        }
        let key = (left, right);
        let sum = match self.terms.get(&key) {
            Some(old) => old.add(&c),
            None => c,
        };
        if sum.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, sum);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.order = self.order.max(other.order);
        out.window = self.window.max(other.window);
        for ((l, r), c) in &other.terms {
            out.insert_add(l.clone(), r.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &QRat) -> Self {
        let mut out = Self::zero(self.order, self.window);
        for ((l, r), x) in &self.terms {
            out.insert_add(l.clone(), r.clone(), x.mul(c));
        }
        out
    }

    /// (a ⊗ b)(c ⊗ d) = ac ⊗ bd.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut out = Self::zero(self.order + other.order, self.window.max(other.window));
        for ((l1, r1), c1) in &self.terms {
            for ((l2, r2), c2) in &other.terms {
                let l = canonical(l1.concat(l2)?);
                let r = canonical(r1.concat(r2)?);
                out.insert_add(l, r, c1.mul(c2));
            }
        }
        Ok(out)
    }

    /// The tensor flip x ⊗ y ↦ y ⊗ x.
    pub fn flip(&self) -> Self {
        let mut out = Self::zero(self.order, self.window);
        for ((l, r), c) in &self.terms {
            out.terms.insert((r.clone(), l.clone()), c.clone());
        }
        out
    }
}

// a-modes commute, so words made only of them are kept sorted.
fn canonical(w: Word) -> Word {
    let Ok(ms) = w.mode_symbols() else { return w };
    if !ms.is_empty() && ms.iter().all(|m| m.family == Family::A) {
        let mut ms = ms;
        ms.sort();
        return Word::modes(&ms);
    }
    w
}

fn factorial(m: usize) -> Rat {
    let mut f = BigInt::one();
    for k in 2..=m {
        f *= k;
    }
    Rat::from_integer(f)
}

/// (q − q⁻¹)^m / m!.
fn prefactor(m: usize) -> Result<QRat> {
    let d = QRat::q().sub(&QRat::q_pow(-1));
    Ok(d.pow(m as i32)?.scale_rat(&factorial(m).recip()))
}

/// Order-m term of exp((q−q⁻¹)∮ e(z)⊗f(z) dz/z) restricted to modes in [−K, K].
pub fn rbar_order(m: usize, window: i64) -> Result<TensorExpr> {
    if window < 0 {
        return Err(Error::InvalidArgument("window must be nonnegative".into()));
    }
    if m == 0 {
        return Ok(TensorExpr::unit(window));
    }
    let mut out = TensorExpr::zero(m, window);
    let c = prefactor(m)?;
    let span = (2 * window + 1) as usize;
    let total = span.pow(m as u32);
    for code in 0..total {
        let mut x = code;
        let mut ks = Vec::with_capacity(m);
        for _ in 0..m {
            ks.push((x % span) as i64 - window);
            x /= span;
        }
        let e: Vec<ModeSymbol> = ks.iter().map(|&k| ModeSymbol::e(k)).collect();
        let f: Vec<ModeSymbol> = ks.iter().map(|&k| ModeSymbol::f(-k)).collect();
        out.insert_add(Word::modes(&e), Word::modes(&f), c.clone());
    }
    Ok(out)
}

/// Sum over matching exponents: ∮ of left(z)·right(z) dz/z.
fn pair(e_side: &NcExpr, f_side: &NcExpr, m: usize, window: i64) -> Result<TensorExpr> {
    let c = prefactor(m)?;
    let rows: Vec<Vec<(Word, Word, QRat)>> = e_side
        .terms()
        .par_iter()
        .map(|(we, ce)| {
            let mut row = Vec::new();
            for (wf, cf) in f_side.terms() {
                let mut acc = QRat::zero();
                for (a, x) in ce.terms() {
                    let neg: Vec<i32> = a.iter().map(|v| -v).collect();
                    let y = cf.coeff(&neg);
                    if !y.is_zero() {
                        acc = acc.add(&x.mul(&y));
                    }
                }
                if !acc.is_zero() {
                    row.push((we.clone(), wf.clone(), acc.mul(&c)));
                }
            }
            row
        })
        .collect();
    let mut out = TensorExpr::zero(m, window);
    for (l, r, x) in rows.into_iter().flatten() {
        out.insert_add(l, r, x);
    }
    Ok(out)
}

/// R₊ = (P*⁻ ⊗ P⁺)(R̄) or R₋ = (P*⁺ ⊗ P⁻)(R̄) at expansion order m.
/// A window of 0 keeps only the order-0 term.
pub fn r_factor(sign: Orientation, m: usize, depth: i64, window: i64) -> Result<TensorExpr> {
    if m == 0 {
        return Ok(TensorExpr::unit(window));
    }
    if window == 0 {
        return Ok(TensorExpr::zero(m, 0));
    }
    let (e_side, f_side) = match sign {
        Orientation::Plus => (
            star_projection(m, depth, window, Orientation::Minus)?,
            mode_expand(&weight_plus_closed(m, depth)?, window)?,
        ),
        Orientation::Minus => (
            star_projection(m, depth, window, Orientation::Plus)?,
            mode_expand(&weight_minus_closed(m, depth)?, window)?,
        ),
    };
    pair(&e_side, &f_side, m, window)
}

/// c_n = n(q−q⁻¹)² / ((qⁿ−q⁻ⁿ)(qⁿ+(−1)^{n+1}+q⁻ⁿ)).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartanCoeff {
    pub n: i64,
    pub value: QRat,
}

pub fn cartan_coeff(n: i64) -> Result<CartanCoeff> {
    if n <= 0 {
        return Err(Error::InvalidArgument(format!("Cartan coefficient index must be positive, got {n}")));
    }
    let e = n as i32;
    let d = QRat::q().sub(&QRat::q_pow(-1));
    let num = d.mul(&d).scale_rat(&Rat::from_integer(n.into()));
    let sign = if n % 2 == 1 { QRat::one() } else { QRat::one().neg() };
    let a = QRat::q_pow(e).sub(&QRat::q_pow(-e));
    let b = QRat::q_pow(e).add(&sign).add(&QRat::q_pow(-e));
    Ok(CartanCoeff { n, value: num.div(&a.mul(&b))? })
}

/// exp(Σ_{0<n≤N} c_n a_{−n} ⊗ a_n) truncated at the given order.
pub fn cartan_tensor(cutoff: i64, order: usize) -> Result<TensorExpr> {
    let mut gen = TensorExpr::zero(1, cutoff);
    for n in 1..=cutoff {
        let c = cartan_coeff(n)?.value;
        gen.insert_add(Word::modes(&[ModeSymbol::a(-n)]), Word::modes(&[ModeSymbol::a(n)]), c);
    }
    let mut out = TensorExpr::unit(cutoff);
    let mut power = TensorExpr::unit(cutoff);
    for j in 1..=order {
        power = power.mul(&gen)?;
        out = out.add(&power.scale(&QRat::from_rat(factorial(j).recip())));
    }
    out.order = order;
    Ok(out)
}

/// One factor of R = R₊²¹ q^{h⊗h} K²¹ R₋.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RFactor {
    Tensor { label: String, tensor: TensorExpr },
    QHH,
}

impl RFactor {
    pub fn label(&self) -> &str {
        match self {
            RFactor::Tensor { label, .. } => label,
            RFactor::QHH => "q^{h⊗h}",
        }
    }
}

/// The four factors in product order; nothing is multiplied out.
pub fn assemble_r(order: usize, depth: i64, window: i64) -> Result<Vec<RFactor>> {
    let mut plus = TensorExpr::unit(window);
    let mut minus = TensorExpr::unit(window);
    for m in 1..=order {
        plus = plus.add(&r_factor(Orientation::Plus, m, depth, window)?);
        minus = minus.add(&r_factor(Orientation::Minus, m, depth, window)?);
    }
    let cartan = if window == 0 { TensorExpr::unit(0) } else { cartan_tensor(window, 1)? };
    Ok(vec![
        RFactor::Tensor { label: "R+^21".into(), tensor: plus.flip() },
        RFactor::QHH,
        RFactor::Tensor { label: "K^21".into(), tensor: cartan.flip() },
        RFactor::Tensor { label: "R-".into(), tensor: minus },
    ])
}

/// Word ⊗ word principal degree, used for table ordering.
pub fn pair_degree(left: &Word, right: &Word) -> i64 {
    let deg = |w: &Word| {
        w.symbols()
            .iter()
            .map(|s| match s {
                Symbol::Mode(m) => m.degree(),
                Symbol::Abstract(_) => 0,
            })
            .sum::<i64>()
    };
    deg(left) + deg(right)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dq() -> QRat {
        QRat::q().sub(&QRat::q_pow(-1))
    }

    #[test]
    fn rbar_first_order() {
        let t = rbar_order(1, 3).unwrap();
        assert_eq!(t.len(), 7);
        for k in -3..=3 {
            let c = t.coeff(&Word::modes(&[ModeSymbol::e(k)]), &Word::modes(&[ModeSymbol::f(-k)]));
            assert_eq!(c, dq());
        }
    }

    #[test]
    fn rbar_second_order_count() {
        assert_eq!(rbar_order(2, 2).unwrap().len(), 25);
    }

    #[test]
    fn r_minus_first_order() {
        let t = r_factor(Orientation::Minus, 1, 4, 5).unwrap();
        assert_eq!(t.len(), 6);
        for k in 0..=5 {
            let c = t.coeff(&Word::modes(&[ModeSymbol::e(k)]), &Word::modes(&[ModeSymbol::f(-k)]));
            assert_eq!(c, dq());
        }
    }

    #[test]
    fn cartan_small() {
        let c1 = cartan_coeff(1).unwrap().value;
        let expect = dq().div(&QRat::q().add(&QRat::one()).add(&QRat::q_pow(-1))).unwrap();
        assert_eq!(c1, expect);
        assert!(cartan_coeff(0).is_err());
        let c2 = cartan_coeff(2).unwrap().value;
        let f = QRat::q_pow(2).add(&QRat::q_pow(-2)).sub(&QRat::one());
        assert!(c2.mul(&f).den().high_exp() < c2.den().high_exp());
    }

    #[test]
    fn assemble_trivial() {
        let fs = assemble_r(2, 2, 0).unwrap();
        assert_eq!(fs.len(), 4);
        assert_eq!(fs[1], RFactor::QHH);
        for f in [&fs[0], &fs[2], &fs[3]] {
            let RFactor::Tensor { tensor, .. } = f else { panic!() };
            assert_eq!(tensor.terms, TensorExpr::unit(0).terms);
        }
    }

    #[test]
    fn flip_involution() {
        let t = rbar_order(2, 1).unwrap();
        assert_eq!(t.flip().flip(), t);
    }
}
