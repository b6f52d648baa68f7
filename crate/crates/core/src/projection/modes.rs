//! Mode expansion of the projected currents.

use std::collections::HashMap;

use super::{closed, Orientation, WeightExpr};
use crate::error::{Error, Result};
use crate::ncalg::{iota, q_commutator, AbstractKind, AbstractSymbol, ModeSymbol, NcExpr, Symbol};
use crate::qfield::QRat;
use crate::series::ExpansionSeries;

fn zpow(n: usize, var: usize, e: i32) -> ExpansionSeries {
    let mut a = vec![0; n];
    a[var - 1] = e;
    ExpansionSeries::monomial(n, a, QRat::one())
}

fn f(n: usize, m: i64) -> NcExpr {
    NcExpr::symbol(n, ModeSymbol::f(m))
}

/// P(f(z)) = Σ_{0<m≤K} f_m z^{−m}.
pub fn pf_plus_modes(n: usize, var: usize, window: i64) -> Result<NcExpr> {
    let mut out = NcExpr::zero(n);
    for m in 1..=window {
        out = out.add(&f(n, m).scale(&zpow(n, var, -(m as i32)))?)?;
    }
    Ok(out)
}

/// P⁻(f(z)) = Σ_{−K≤m≤0} f_m z^{−m}.
pub fn pf_minus_modes(n: usize, var: usize, window: i64) -> Result<NcExpr> {
    let mut out = NcExpr::zero(n);
    for m in 0..=window {
        out = out.add(&f(n, -m).scale(&zpow(n, var, m as i32))?)?;
    }
    Ok(out)
}

/// P(s(z)) = −(q + q⁻²)⁻¹ (q[P(f(z)), f₀]_{q⁻¹} + [f₁z⁻¹, f₀ + P(f(z))]_{q⁻¹}).
pub fn ps_plus_modes(n: usize, var: usize, window: i64) -> Result<NcExpr> {
    let pf = pf_plus_modes(n, var, window)?;
    let qinv = QRat::q_pow(-1);
    let f0 = f(n, 0);
    let f1z = f(n, 1).scale(&zpow(n, var, -1))?;
    let a = q_commutator(&pf, &f0, &qinv)?.scale_q(&QRat::q());
    let b = q_commutator(&f1z, &f0.add(&pf)?, &qinv)?;
    let pref = QRat::q().add(&QRat::q_pow(-2)).inv()?.neg();
    Ok(a.add(&b)?.scale_q(&pref))
}

/// P⁻(s̃(z)) = (1 + q³)⁻¹ ([f₀, P⁻(f(z))]_q + q[P⁻(f(z)) − f₀, f₁z⁻¹]_q).
pub fn ps_tilde_minus_modes(n: usize, var: usize, window: i64) -> Result<NcExpr> {
    let pf = pf_minus_modes(n, var, window)?;
    let q = QRat::q();
    let f0 = f(n, 0);
    let f1z = f(n, 1).scale(&zpow(n, var, -1))?;
    let a = q_commutator(&f0, &pf, &q)?;
    let b = q_commutator(&pf.sub(&f0)?, &f1z, &q)?.scale_q(&q);
    let pref = QRat::one().add(&QRat::q_pow(3)).inv()?;
    Ok(a.add(&b)?.scale_q(&pref))
}

/// Mode series of one abstract symbol, twist included.
pub fn symbol_modes(n: usize, s: &AbstractSymbol, window: i64) -> Result<NcExpr> {
    let base = match s.kind {
        AbstractKind::PfPlus => pf_plus_modes(n, s.var, window)?,
        AbstractKind::PsPlus => ps_plus_modes(n, s.var, window)?,
        AbstractKind::PfMinus => pf_minus_modes(n, s.var, window)?,
        AbstractKind::PsTildeMinus => ps_tilde_minus_modes(n, s.var, window)?,
    };
    let c = s.twist.value();
    if c.is_one() {
        return Ok(base);
    }
    base.map_coeffs(|x| x.substitute_scale(s.var, &c))
}

/// Replaces every abstract symbol by its mode series with indices in [−K, K].
pub fn mode_expand(w: &WeightExpr, window: i64) -> Result<NcExpr> {
    if window < 1 {
        return Err(Error::InvalidArgument("mode window must be at least 1".into()));
    }
    let n = w.n;
    let mut cache: HashMap<AbstractSymbol, NcExpr> = HashMap::new();
    let mut out = NcExpr::zero(n);
    for (word, coeff) in w.expr.terms() {
        let mut prod = NcExpr::one(n);
        for s in word.symbols() {
            let Symbol::Abstract(a) = s else {
                return Err(Error::AlphabetMixing("weight expression contains mode symbols".into()));
            };
            if !cache.contains_key(a) {
                cache.insert(*a, symbol_modes(n, a, window)?);
            }
            prod = prod.mul(&cache[a])?;
        }
        out = out.add(&prod.scale(coeff)?)?;
    }
    Ok(out.cap_validity(w.expr.validity()))
}

/// P*^{star}(e(z₁)…e(zₙ)) = ι P^{−star}(f(z₁⁻¹)…f(zₙ⁻¹)).
pub fn star_projection(n: usize, depth: i64, window: i64, star: Orientation) -> Result<NcExpr> {
    let w = match star {
        Orientation::Minus => closed::weight_plus_closed(n, depth)?,
        Orientation::Plus => closed::weight_minus_closed(n, depth)?,
    };
    iota(&mode_expand(&w, window)?, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::Word;

    fn word(ms: &[(i64,)]) -> Word {
        Word::modes(&ms.iter().map(|&(m,)| ModeSymbol::f(m)).collect::<Vec<_>>())
    }

    #[test]
    fn ps_plus_first_coefficient() {
        let s = ps_plus_modes(1, 1, 4).unwrap();
        let pref = QRat::q().add(&QRat::q_pow(-2)).inv().unwrap().neg();
        let c10 = s.coeff(&word(&[(1,), (0,)])).coeff(&[-1]);
        let c01 = s.coeff(&word(&[(0,), (1,)])).coeff(&[-1]);
        assert_eq!(c10, QRat::q().add(&QRat::one()).mul(&pref));
        assert_eq!(c01, QRat::one().add(&QRat::q_pow(-1)).neg().mul(&pref));
    }

    #[test]
    fn pf_minus_support() {
        let s = pf_minus_modes(1, 1, 3).unwrap();
        assert_eq!(s.len(), 4);
        for w in s.terms().keys() {
            assert!(w.mode_symbols().unwrap().iter().all(|m| m.index <= 0));
        }
    }

    #[test]
    fn star_minus_single_current() {
        let e = star_projection(1, 2, 3, Orientation::Minus).unwrap();
        assert_eq!(e.len(), 3);
        for (w, c) in e.terms() {
            let m = w.mode_symbols().unwrap()[0];
            assert_eq!(m.family, crate::ncalg::Family::E);
            assert!(m.index < 0);
            assert_eq!(c.coeff(&[(-m.index) as i32]), QRat::one());
        }
    }
}
