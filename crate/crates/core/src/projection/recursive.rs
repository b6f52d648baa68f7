//! Independent evaluation of P⁺(f(z₁)…f(zₙ)) by peeling currents off the right.
//!
//! Nodes are P(s(z_{s₁})…s(z_{s_p}) f(z_{f₁})…f(z_{f_m})) keyed by the two
//! argument rows exactly as they occur, since each collapse step permutes
//! variables.

use std::collections::HashMap;
use std::sync::Mutex;

use super::{Orientation, WeightExpr};
use crate::blocks::{build_block, build_kernel, ArgList, BlockKind, KernelKind};
use crate::error::{Error, Result};
use crate::ncalg::{AbstractKind, AbstractSymbol, NcExpr, Twist};
use crate::qfield::QRat;
use crate::series::FactoredRational;

type Key = (Vec<usize>, Vec<usize>);

pub struct Recursion {
    n: usize,
    depth: i64,
    memo: Mutex<HashMap<Key, NcExpr>>,
}

impl Recursion {
    pub fn new(n: usize, depth: i64) -> Self {
        Recursion { n, depth, memo: Mutex::new(HashMap::new()) }
    }

    fn pf(&self, k: usize) -> NcExpr {
        NcExpr::symbol(self.n, AbstractSymbol { kind: AbstractKind::PfPlus, var: k, twist: Twist::One })
    }

    fn ps(&self, k: usize, twist: Twist) -> NcExpr {
        NcExpr::symbol(self.n, AbstractSymbol { kind: AbstractKind::PsPlus, var: k, twist })
    }

    fn term(&self, fr: &FactoredRational, x: NcExpr) -> Result<NcExpr> {
        x.scale(&fr.expand(self.depth)?)
    }

    fn f_factor(&self, row: &[usize], t: usize) -> Result<NcExpr> {
        let args = ArgList { prefix: row.to_vec(), target: t };
        let mut out = self.pf(t);
        for &k in row {
            let rho = build_block(BlockKind::Rho, &args, k, self.n)?;
            out = out.sub(&self.term(&rho, self.pf(k))?)?;
        }
        Ok(out)
    }

    fn s_factor(&self, row: &[usize], t: usize) -> Result<NcExpr> {
        let args = ArgList { prefix: row.to_vec(), target: t };
        let mut out = self.ps(t, Twist::One);
        for &k in row {
            let mu = build_block(BlockKind::Mu, &args, k, self.n)?;
            let nu = build_block(BlockKind::Nu, &args, k, self.n)?;
            out = out.sub(&self.term(&mu, self.ps(k, Twist::One))?)?;
            out = out.sub(&self.term(&nu, self.ps(k, Twist::MinusQ))?)?;
        }
        Ok(out)
    }

    /// τ_{k,p}(row; t) with 1-based position `k` in `row`.
    fn tau(&self, row: &[usize], t: usize, k: usize, p: usize) -> Result<FactoredRational> {
        let zk = row[k - 1];
        let args = ArgList { prefix: row.to_vec(), target: t };
        let mut fr = build_block(BlockKind::Lambda, &args, zk, self.n)?.neg();
        for l in p + 1..k {
            fr = fr.mul(&build_kernel(KernelKind::Alpha, &QRat::one(), row[l - 1], zk, self.n)?)?;
        }
        let minus_q = QRat::signed_q_pow(-1, 1);
        for l in (p + 1..=row.len()).filter(|&l| l != k) {
            fr = fr.mul(&build_kernel(KernelKind::Alpha, &minus_q, row[l - 1], zk, self.n)?)?;
        }
        Ok(fr)
    }

    pub fn eval(&self, s_row: &[usize], f_row: &[usize]) -> Result<NcExpr> {
        let key = (s_row.to_vec(), f_row.to_vec());
        if let Some(hit) = self.memo.lock().expect("memo lock").get(&key) {
            return Ok(hit.clone());
        }
        let value = self.compute(s_row, f_row)?;
        self.memo.lock().expect("memo lock").entry(key).or_insert_with(|| value.clone());
        Ok(value)
    }

    fn compute(&self, s_row: &[usize], f_row: &[usize]) -> Result<NcExpr> {
        let Some((&t, rest)) = f_row.split_last() else {
            let Some((&last, init)) = s_row.split_last() else {
                return Ok(NcExpr::one(self.n));
            };
            return self.eval(init, &[])?.mul(&self.s_factor(init, last)?);
        };
        let p = s_row.len();
        let row: Vec<usize> = s_row.iter().chain(rest).copied().collect();
        let mut out = self.eval(s_row, rest)?.mul(&self.f_factor(&row, t)?)?;
        for k in p + 1..=row.len() {
            let zk = row[k - 1];
            let mut s_next = s_row.to_vec();
            s_next.push(zk);
            let f_next: Vec<usize> = rest.iter().copied().filter(|&v| v != zk).collect();
            let tau = self.tau(&row, t, k, p)?;
            out = out.add(&self.term(&tau, self.eval(&s_next, &f_next)?)?)?;
        }
        Ok(out)
    }
}

/// P⁺(f(z₁)…f(zₙ)) via the recursion.
pub fn weight_plus_recursive(n: usize, depth: i64) -> Result<WeightExpr> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let rec = Recursion::new(n, depth);
    let f_row: Vec<usize> = (1..=n).collect();
    let expr = rec.eval(&[], &f_row)?;
    Ok(WeightExpr { expr, n, depth, orientation: Orientation::Plus })
}
