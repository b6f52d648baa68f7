//! Closed formulas for P⁺ and P⁻ of products of f-currents.

use rayon::prelude::*;

use super::admissible::{all_admissible_pairs, AdmissiblePair};
use super::{Orientation, WeightExpr};
use crate::blocks::{build_block, build_kernel, build_tilde_block, ArgList, BlockKind, KernelKind};
use crate::error::{Error, Result};
use crate::ncalg::{AbstractKind, AbstractSymbol, NcExpr, Twist};
use crate::qfield::QRat;
use crate::series::{ExpansionSeries, FactoredRational};

fn sym(kind: AbstractKind, var: usize, twist: Twist) -> AbstractSymbol {
    AbstractSymbol { kind, var, twist }
}

/// head − Σ expand(coeff)·symbol.
fn combination(n: usize, depth: i64, head: AbstractSymbol, parts: Vec<(FactoredRational, AbstractSymbol)>) -> Result<NcExpr> {
    let mut out = NcExpr::symbol(n, head);
    for (fr, s) in parts {
        let c = fr.expand(depth)?.neg();
        out = out.add(&NcExpr::symbol(n, s).scale(&c)?)?;
    }
    Ok(out)
}

/// F(prefix; target) = P(f(z_t)) − Σ_k ρ_k P(f(z_k)).
pub fn f_block(args: &ArgList, n: usize, depth: i64) -> Result<NcExpr> {
    let mut parts = Vec::new();
    for &k in &args.prefix {
        parts.push((build_block(BlockKind::Rho, args, k, n)?, sym(AbstractKind::PfPlus, k, Twist::One)));
    }
    combination(n, depth, sym(AbstractKind::PfPlus, args.target, Twist::One), parts)
}

/// S(prefix; target) = P(s(z_t)) − Σ_k μ_k P(s(z_k)) − Σ_k ν_k P(s(−q z_k)).
pub fn s_block(args: &ArgList, n: usize, depth: i64) -> Result<NcExpr> {
    let mut parts = Vec::new();
    for &k in &args.prefix {
        parts.push((build_block(BlockKind::Mu, args, k, n)?, sym(AbstractKind::PsPlus, k, Twist::One)));
    }
    for &k in &args.prefix {
        parts.push((build_block(BlockKind::Nu, args, k, n)?, sym(AbstractKind::PsPlus, k, Twist::MinusQ)));
    }
    combination(n, depth, sym(AbstractKind::PsPlus, args.target, Twist::One), parts)
}

/// F̃(target; prefix) = P⁻(f(z_t)) − Σ_k ρ̃_k P⁻(f(z_k)).
pub fn f_tilde_block(args: &ArgList, n: usize, depth: i64) -> Result<NcExpr> {
    let mut parts = Vec::new();
    for &k in &args.prefix {
        parts.push((build_tilde_block(BlockKind::Rho, args, k, n)?, sym(AbstractKind::PfMinus, k, Twist::One)));
    }
    combination(n, depth, sym(AbstractKind::PfMinus, args.target, Twist::One), parts)
}

/// S̃(target; prefix) = P⁻(s̃(z_t)) − Σ_k μ̃_k P⁻(s̃(z_k)) − Σ_k ν̃_k P⁻(s̃(−q⁻¹ z_k)).
pub fn s_tilde_block(args: &ArgList, n: usize, depth: i64) -> Result<NcExpr> {
    let mut parts = Vec::new();
    for &k in &args.prefix {
        parts.push((build_tilde_block(BlockKind::Mu, args, k, n)?, sym(AbstractKind::PsTildeMinus, k, Twist::One)));
    }
    for &k in &args.prefix {
        parts.push((
            build_tilde_block(BlockKind::Nu, args, k, n)?,
            sym(AbstractKind::PsTildeMinus, k, Twist::MinusQInv),
        ));
    }
    combination(n, depth, sym(AbstractKind::PsTildeMinus, args.target, Twist::One), parts)
}

/// `front` followed by `lo..=hi` with the entries of `front` skipped.
fn prepend_skipping(front: &[usize], lo: usize, hi: usize) -> Vec<usize> {
    let mut row = front.to_vec();
    row.extend((lo..=hi).filter(|k| !front.contains(k)));
    row
}

/// `lo..=hi` without `skip`, followed by `back`.
fn append_skipping(lo: usize, hi: usize, skip: &[usize], back: &[usize]) -> Vec<usize> {
    let mut row: Vec<usize> = (lo..=hi).filter(|k| !skip.contains(k)).collect();
    row.extend_from_slice(back);
    row
}

fn reversed(v: &[usize]) -> Vec<usize> {
    v.iter().rev().copied().collect()
}

/// Argument row of F_{I,J}^ℓ (or F̃_{I,J}^ℓ for the minus orientation).
pub fn f_ij_row(pair: &AdmissiblePair, l: usize) -> Result<ArgList> {
    if l == 0 || l > pair.n || pair.contains(l) {
        return Err(Error::InvalidArgument(format!("index {l} must lie outside I ∪ J")));
    }
    let r = pair.r();
    match pair.orientation {
        Orientation::Plus => {
            // j_p < ℓ < j_{p-1} with j_0 = n+1, j_{r+1} = 0
            let jb = |p: usize| if p == 0 { pair.n + 1 } else if p == r + 1 { 0 } else { pair.j[p - 1] };
            let p = (1..=r + 1).find(|&p| jb(p) < l && l < jb(p - 1)).expect("bracketing index");
            Ok(ArgList { prefix: prepend_skipping(&pair.i[..p - 1], 1, l - 1), target: l })
        }
        Orientation::Minus => {
            // i_{p-1} < ℓ < i_p with i_0 = 0, i_{r+1} = n+1
            let ib = |p: usize| if p == 0 { 0 } else if p == r + 1 { pair.n + 1 } else { pair.i[p - 1] };
            let p = (1..=r + 1).find(|&p| ib(p - 1) < l && l < ib(p)).expect("bracketing index");
            let js = &pair.j[..p - 1];
            Ok(ArgList { prefix: append_skipping(l + 1, pair.n, js, &reversed(js)), target: l })
        }
    }
}

/// τ^k_{I,J} (or τ̃^k_{I,J}) as a rational function.
pub fn tau_ij(pair: &AdmissiblePair, k: usize) -> Result<FactoredRational> {
    let n = pair.n;
    if k == 0 || k > pair.r() {
        return Err(Error::InvalidArgument(format!("τ index {k} outside 1..={}", pair.r())));
    }
    let minus_q = QRat::signed_q_pow(-1, 1);
    let one = QRat::one();
    match pair.orientation {
        Orientation::Plus => {
            let ik = pair.i[k - 1];
            let jk = pair.j[k - 1];
            let before = &pair.i[..k - 1];
            let upto = &pair.i[..k];
            let args = ArgList { prefix: prepend_skipping(before, 1, jk - 1), target: jk };
            let mut fr = build_block(BlockKind::Lambda, &args, ik, n)?.neg();
            for l in (1..ik).filter(|l| !before.contains(l)) {
                fr = fr.mul(&build_kernel(KernelKind::Alpha, &one, l, ik, n)?)?;
            }
            for l in (1..jk).filter(|l| !upto.contains(l)) {
                fr = fr.mul(&build_kernel(KernelKind::Alpha, &minus_q, l, ik, n)?)?;
            }
            Ok(fr)
        }
        Orientation::Minus => {
            let ik = pair.i[k - 1];
            let jk = pair.j[k - 1];
            let before = &pair.j[..k - 1];
            let upto = &pair.j[..k];
            let args = ArgList { prefix: append_skipping(ik + 1, n, before, &reversed(before)), target: ik };
            let mut fr = build_tilde_block(BlockKind::Lambda, &args, jk, n)?;
            for l in (jk + 1..=n).filter(|l| !before.contains(l)) {
                fr = fr.mul(&build_kernel(KernelKind::Alpha, &one, jk, l, n)?)?;
            }
            for l in (ik + 1..=n).filter(|l| !upto.contains(l)) {
                fr = fr.mul(&build_kernel(KernelKind::Alpha, &minus_q, jk, l, n)?)?;
            }
            Ok(fr)
        }
    }
}

pub fn build_tau_ij(pair: &AdmissiblePair, k: usize, depth: i64) -> Result<ExpansionSeries> {
    tau_ij(pair, k)?.expand(depth)
}

pub fn build_f_ij(pair: &AdmissiblePair, l: usize, depth: i64) -> Result<NcExpr> {
    let row = f_ij_row(pair, l)?;
    match pair.orientation {
        Orientation::Plus => f_block(&row, pair.n, depth),
        Orientation::Minus => f_tilde_block(&row, pair.n, depth),
    }
}

/// Argument row of the k-th S (or S̃) factor.
pub fn s_row(pair: &AdmissiblePair, k: usize) -> ArgList {
    match pair.orientation {
        Orientation::Plus => ArgList { prefix: pair.i[..k - 1].to_vec(), target: pair.i[k - 1] },
        Orientation::Minus => ArgList { prefix: reversed(&pair.j[..k - 1]), target: pair.j[k - 1] },
    }
}

/// The summand of one admissible pair.
pub fn pair_term(pair: &AdmissiblePair, depth: i64) -> Result<NcExpr> {
    let n = pair.n;
    let r = pair.r();
    let mut tau = FactoredRational::one(n);
    for k in 1..=r {
        tau = tau.mul(&tau_ij(pair, k)?)?;
    }
    let mut s_part = NcExpr::one(n);
    let mut f_part = NcExpr::one(n);
    for l in pair.complement() {
        f_part = f_part.mul(&build_f_ij(pair, l, depth)?)?;
    }
    let body = match pair.orientation {
        Orientation::Plus => {
            for k in 1..=r {
                s_part = s_part.mul(&s_block(&s_row(pair, k), n, depth)?)?;
            }
            s_part.mul(&f_part)?
        }
        Orientation::Minus => {
            for k in (1..=r).rev() {
                s_part = s_part.mul(&s_tilde_block(&s_row(pair, k), n, depth)?)?;
            }
            f_part.mul(&s_part)?
        }
    };
    body.scale(&tau.expand(depth)?)
}

fn weight_closed(n: usize, depth: i64, orientation: Orientation) -> Result<WeightExpr> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let pairs = all_admissible_pairs(n, orientation);
    let terms: Vec<NcExpr> = pairs.par_iter().map(|p| pair_term(p, depth)).collect::<Result<_>>()?;
    let mut expr = NcExpr::zero(n);
    for t in &terms {
        expr = expr.add(t)?;
    }
    Ok(WeightExpr { expr, n, depth, orientation })
}

/// P⁺(f(z₁)…f(zₙ)) as a sum over P⁺-admissible pairs.
pub fn weight_plus_closed(n: usize, depth: i64) -> Result<WeightExpr> {
    weight_closed(n, depth, Orientation::Plus)
}

/// P⁻(f(z₁)…f(zₙ)) as a sum over P⁻-admissible pairs.
pub fn weight_minus_closed(n: usize, depth: i64) -> Result<WeightExpr> {
    weight_closed(n, depth, Orientation::Minus)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plus(i: &[usize], j: &[usize], n: usize) -> AdmissiblePair {
        AdmissiblePair::new(i.to_vec(), j.to_vec(), Orientation::Plus, n).unwrap()
    }

    #[test]
    fn f_ij_bracketing() {
        let p = plus(&[3], &[4], 4);
        assert_eq!(f_ij_row(&p, 2).unwrap(), ArgList { prefix: vec![3, 1], target: 2 });
        assert_eq!(f_ij_row(&p, 1).unwrap(), ArgList { prefix: vec![3], target: 1 });
        assert!(f_ij_row(&p, 3).is_err());
    }

    #[test]
    fn f_of_empty_row() {
        let f = f_block(&ArgList { prefix: vec![], target: 1 }, 1, 4).unwrap();
        assert_eq!(f, NcExpr::symbol(1, sym(AbstractKind::PfPlus, 1, Twist::One)));
    }

    #[test]
    fn n1_weights() {
        let w = weight_plus_closed(1, 3).unwrap();
        assert_eq!(w.expr, NcExpr::symbol(1, sym(AbstractKind::PfPlus, 1, Twist::One)));
        let w = weight_minus_closed(1, 3).unwrap();
        assert_eq!(w.expr, NcExpr::symbol(1, sym(AbstractKind::PfMinus, 1, Twist::One)));
    }

    #[test]
    fn tau_n2_is_minus_lambda() {
        let p = plus(&[1], &[2], 2);
        let lam = build_block(BlockKind::Lambda, &ArgList { prefix: vec![1], target: 2 }, 1, 2).unwrap();
        assert_eq!(tau_ij(&p, 1).unwrap(), lam.neg());
    }

    #[test]
    fn minus_tau_n2() {
        let p = AdmissiblePair::new(vec![1], vec![2], Orientation::Minus, 2).unwrap();
        let lam = build_tilde_block(BlockKind::Lambda, &ArgList { prefix: vec![2], target: 1 }, 2, 2).unwrap();
        assert_eq!(tau_ij(&p, 1).unwrap(), lam);
    }
}
