//! Scalar building blocks: ρ, λ, μ, ν and their tilde variants, the kernels
//! α, β, γ with their residue constants, and the interpolation matrices.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qfield::{QRat, Rat};
use crate::series::FactoredRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockKind {
    Rho,
    Lambda,
    Mu,
    Nu,
}

/// Argument row of a block: `prefix` fills the ordinary slots and `target`
/// the distinguished one (last slot for plain blocks, first for tilde blocks).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArgList {
    pub prefix: Vec<usize>,
    pub target: usize,
}

impl ArgList {
    pub fn new(prefix: Vec<usize>, target: usize) -> Result<Self> {
        let a = ArgList { prefix, target };
        a.validate(usize::MAX)?;
        Ok(a)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for &v in self.prefix.iter().chain(std::iter::once(&self.target)) {
            if v == 0 || v > n {
                return Err(Error::InvalidArgument(format!("variable z{v} outside 1..={n}")));
            }
            if !seen.insert(v) {
                return Err(Error::InvalidArgument(format!("variable z{v} repeated in argument row")));
            }
        }
        Ok(())
    }
}

fn q(e: i32) -> QRat {
    QRat::q_pow(e)
}

fn mq(e: i32) -> QRat {
    QRat::signed_q_pow(-1, e)
}

fn one() -> QRat {
    QRat::one()
}

fn minus_one() -> QRat {
    QRat::from_int(-1)
}

/// Accumulates (u·z_a + v·z_b)^m factors.
struct Builder(FactoredRational);

impl Builder {
    fn new(n: usize, scalar: QRat) -> Self {
        Builder(FactoredRational::constant(n, scalar))
    }

    fn lin(mut self, u: QRat, a: usize, v: QRat, b: usize, m: i32) -> Result<Self> {
        self.0 = self.0.times_binary(u, a, v, b, m)?;
        Ok(self)
    }
}

fn check_k(args: &ArgList, k: usize) -> Result<()> {
    if !args.prefix.contains(&k) {
        return Err(Error::InvalidArgument(format!("z{k} is not among the ordinary arguments {:?}", args.prefix)));
    }
    Ok(())
}

/// ρ_k, λ_k, μ_k or ν_k of the row (prefix; target) in an `n`-variable context.
pub fn build_block(kind: BlockKind, args: &ArgList, k: usize, n: usize) -> Result<FactoredRational> {
    args.validate(n)?;
    check_k(args, k)?;
    let t = args.target;
    let pre = &args.prefix;
    let mut b = match kind {
        BlockKind::Rho | BlockKind::Mu => Builder::new(n, one()),
        BlockKind::Lambda => Builder::new(n, one()).lin(one(), k, QRat::zero(), k, 1)?.lin(q(1), t, one(), k, -1)?,
        BlockKind::Nu => Builder::new(n, mq(pre.len() as i32 + 1)),
    };
    for &i in pre {
        if i != k {
            b = match kind {
                BlockKind::Rho | BlockKind::Mu => b.lin(one(), t, minus_one(), i, 1)?.lin(one(), k, minus_one(), i, -1)?,
                BlockKind::Nu => b.lin(one(), t, q(1), i, 1)?.lin(one(), k, minus_one(), i, -1)?,
                BlockKind::Lambda => b,
            };
        }
        b = match kind {
            BlockKind::Rho => b.lin(one(), k, mq(2), i, 1)?.lin(one(), t, mq(2), i, -1)?,
            BlockKind::Lambda => b
                .lin(one(), t, minus_one(), i, 1)?
                .lin(one(), k, q(3), i, 1)?
                .lin(one(), k, q(1), i, -1)?
                .lin(one(), t, mq(2), i, -1)?,
            BlockKind::Mu => b
                .lin(one(), t, q(1), i, 1)?
                .lin(one(), k, mq(2), i, 1)?
                .lin(one(), k, q(3), i, 1)?
                .lin(one(), k, q(1), i, -1)?
                .lin(one(), t, mq(2), i, -1)?
                .lin(one(), t, q(3), i, -1)?,
            BlockKind::Nu => b
                .lin(one(), t, minus_one(), i, 1)?
                .lin(one(), k, q(1), i, 1)?
                .lin(one(), k, mq(2), i, 1)?
                .lin(q(1), k, one(), i, -1)?
                .lin(one(), t, mq(2), i, -1)?
                .lin(one(), t, q(3), i, -1)?,
        };
    }
    Ok(b.0)
}

/// ρ̃_k, λ̃_k, μ̃_k or ν̃_k of the row (target; prefix).
pub fn build_tilde_block(kind: BlockKind, args: &ArgList, k: usize, n: usize) -> Result<FactoredRational> {
    args.validate(n)?;
    check_k(args, k)?;
    let s = args.target;
    let rest = &args.prefix;
    let mut b = match kind {
        BlockKind::Rho | BlockKind::Mu => Builder::new(n, one()),
        BlockKind::Lambda => Builder::new(n, mq(1)).lin(one(), k, QRat::zero(), k, 1)?.lin(one(), s, q(1), k, -1)?,
        BlockKind::Nu => Builder::new(n, mq(rest.len() as i32)),
    };
    for &i in rest {
        if i != k {
            b = match kind {
                BlockKind::Rho | BlockKind::Mu => b.lin(one(), s, minus_one(), i, 1)?.lin(one(), k, minus_one(), i, -1)?,
                BlockKind::Nu => b.lin(q(1), s, one(), i, 1)?.lin(one(), k, minus_one(), i, -1)?,
                BlockKind::Lambda => b,
            };
        }
        b = match kind {
            BlockKind::Rho => b.lin(q(2), k, minus_one(), i, 1)?.lin(q(2), s, minus_one(), i, -1)?,
            BlockKind::Lambda => b
                .lin(one(), s, minus_one(), i, 1)?
                .lin(q(3), k, one(), i, 1)?
                .lin(q(1), k, one(), i, -1)?
                .lin(q(2), s, minus_one(), i, -1)?,
            BlockKind::Mu => b
                .lin(q(1), s, one(), i, 1)?
                .lin(q(2), k, minus_one(), i, 1)?
                .lin(q(3), k, one(), i, 1)?
                .lin(q(1), k, one(), i, -1)?
                .lin(q(2), s, minus_one(), i, -1)?
                .lin(q(3), s, one(), i, -1)?,
            BlockKind::Nu => b
                .lin(one(), s, minus_one(), i, 1)?
                .lin(q(1), k, one(), i, 1)?
                .lin(q(2), k, minus_one(), i, 1)?
                .lin(one(), k, q(1), i, -1)?
                .lin(q(2), s, minus_one(), i, -1)?
                .lin(q(3), s, one(), i, -1)?,
        };
    }
    Ok(b.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Alpha,
    Beta,
    Gamma,
}

/// Linear factors (a + b·x) of numerator and denominator.
type LinearList = Vec<(QRat, QRat)>;

fn kernel_factors(kind: KernelKind) -> (LinearList, LinearList) {
    match kind {
        KernelKind::Alpha => (vec![(q(2), minus_one()), (q(-1), one())], vec![(one(), mq(2)), (one(), q(-1))]),
        KernelKind::Beta => (vec![(one(), minus_one()), (q(3), one())], vec![(one(), mq(2)), (q(1), one())]),
        KernelKind::Gamma => (
            vec![(q(2), minus_one()), (q(3), one()), (one(), q(1))],
            vec![(one(), mq(2)), (one(), q(3)), (q(1), one())],
        ),
    }
}

/// Kernel value at a point of ℚ(q).
pub fn kernel_value(kind: KernelKind, x: &QRat) -> Result<QRat> {
    let (num, den) = kernel_factors(kind);
    let mut acc = QRat::one();
    for (a, b) in &num {
        acc = acc.mul(&a.add(&b.mul(x)));
    }
    for (a, b) in &den {
        acc = acc.div(&a.add(&b.mul(x)))?;
    }
    Ok(acc)
}

/// Exact numeric value of a kernel at q = q₀, x = x₀.
pub fn kernel_eval(kind: KernelKind, q0: &Rat, x0: &Rat) -> Result<Rat> {
    let (num, den) = kernel_factors(kind);
    let mut acc = Rat::from_integer(1.into());
    for (a, b) in &num {
        acc *= a.eval(q0)? + b.eval(q0)? * x0;
    }
    for (a, b) in &den {
        let d = a.eval(q0)? + b.eval(q0)? * x0;
        if d.is_zero() {
            return Err(Error::PoleHit(format!("{kind:?} at x = {x0}")));
        }
        acc /= d;
    }
    Ok(acc)
}

/// The kernel at x = c·z_i/z_j as a factored form in z_i, z_j.
pub fn build_kernel(kind: KernelKind, c: &QRat, i: usize, j: usize, n: usize) -> Result<FactoredRational> {
    if i == j {
        return Err(Error::InvalidArgument("kernel needs two distinct variables".into()));
    }
    let (num, den) = kernel_factors(kind);
    let mut b = Builder::new(n, one());
    for (a, bb) in &num {
        b = b.lin(bb.mul(c), i, a.clone(), j, 1)?;
    }
    for (a, bb) in &den {
        b = b.lin(bb.mul(c), i, a.clone(), j, -1)?;
    }
    Ok(b.0)
}

/// Residue constant of a kernel at one of its poles.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelConstant {
    pub kind: KernelKind,
    pub pole: QRat,
    pub value: QRat,
}

/// Residue of K(1/t) at t = c, so that K_c(x) = value/(c − x).
pub fn residue_constant(kind: KernelKind, c: &QRat) -> Result<QRat> {
    // K(1/t) = t^{dd - dn} ∏(a t + b) / ∏(a' t + b')
    let (num, den) = kernel_factors(kind);
    let mut value = c.pow(den.len() as i32 - num.len() as i32)?;
    let mut hits = 0;
    for (a, b) in &num {
        value = value.mul(&a.mul(c).add(b));
    }
    for (a, b) in &den {
        let at_c = a.mul(c).add(b);
        if at_c.is_zero() {
            hits += 1;
            value = value.div(a)?;
        } else {
            value = value.div(&at_c)?;
        }
    }
    match hits {
        0 => Ok(QRat::zero()),
        1 => Ok(value),
        _ => Err(Error::InvalidArgument("double pole".into())),
    }
}

/// Constants for every (kernel, pole) pair used in the commutation relations.
pub fn residue_constants() -> Result<Vec<KernelConstant>> {
    let table: [(KernelKind, Vec<QRat>); 3] = [
        (KernelKind::Alpha, vec![q(2), mq(-1)]),
        (KernelKind::Beta, vec![q(2), mq(-1)]),
        (KernelKind::Gamma, vec![q(2), mq(3), mq(-1)]),
    ];
    let mut out = Vec::new();
    for (kind, poles) in table {
        for c in poles {
            let value = residue_constant(kind, &c)?;
            out.push(KernelConstant { kind, pole: c, value });
        }
    }
    Ok(out)
}

/// Checks K(1/x) = K(0) − Σ_c A_c/(c − x) at a numeric point.
pub fn partial_fraction_holds(kind: KernelKind, consts: &[KernelConstant], q0: &Rat, x0: &Rat) -> Result<bool> {
    let lhs = kernel_eval(kind, q0, &x0.recip())?;
    let mut rhs = kernel_eval(kind, q0, &Rat::zero())?;
    for kc in consts.iter().filter(|k| k.kind == kind) {
        let d = kc.pole.eval(q0)? - x0;
        if d.is_zero() {
            return Err(Error::PoleHit(format!("x = {x0} at pole")));
        }
        rhs -= kc.value.eval(q0)? / d;
    }
    Ok(lhs == rhs)
}

/// Matrix M_c, row vector V_c and closed-form solution W_c of W·M_c = V_c.
pub struct Interpolation {
    pub m: Vec<Vec<FactoredRational>>,
    pub v: Vec<FactoredRational>,
    pub w: Vec<FactoredRational>,
}

/// 1/(1 − c⁻¹ z_a/z_b).
fn cauchy_entry(c: &QRat, a: usize, b: usize, n: usize) -> Result<FactoredRational> {
    let cinv = c.inv()?;
    if a == b {
        return Ok(FactoredRational::constant(n, one().sub(&cinv).inv()?));
    }
    Ok(Builder::new(n, one()).lin(one(), b, QRat::zero(), b, 1)?.lin(one(), b, cinv.neg(), a, -1)?.0)
}

pub fn build_matrices(c: &QRat, n: usize) -> Result<Interpolation> {
    if n < 2 {
        return Err(Error::InvalidArgument("interpolation needs n ≥ 2".into()));
    }
    let mut m = Vec::new();
    for a in 1..n {
        m.push((1..n).map(|b| cauchy_entry(c, a, b, n)).collect::<Result<Vec<_>>>()?);
    }
    let v = (1..n).map(|b| cauchy_entry(c, n, b, n)).collect::<Result<Vec<_>>>()?;
    let mut w = Vec::new();
    for k in 1..n {
        let mut b = Builder::new(n, one());
        for i in 1..n {
            if i != k {
                b = b.lin(one(), n, minus_one(), i, 1)?.lin(one(), k, minus_one(), i, -1)?;
            }
            b = b.lin(one(), k, c.neg(), i, 1)?.lin(one(), n, c.neg(), i, -1)?;
        }
        w.push(b.0);
    }
    Ok(Interpolation { m, v, w })
}

/// Solves x·A = b exactly by Gaussian elimination on the transpose.
pub fn solve_row(a: &[Vec<Rat>], b: &[Rat]) -> Result<Vec<Rat>> {
    let n = b.len();
    // augmented system Aᵀ xᵀ = bᵀ
    let mut rows: Vec<Vec<Rat>> = (0..n)
        .map(|r| {
            let mut row: Vec<Rat> = (0..n).map(|c| a[c][r].clone()).collect();
            row.push(b[r].clone());
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !rows[r][col].is_zero()).ok_or(Error::Singular)?;
        rows.swap(col, pivot);
        let inv = rows[col][col].recip();
        for x in rows[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                let pivot_row = rows[col].clone();
                for (x, p) in rows[r].iter_mut().zip(pivot_row.iter()) {
                    *x -= &f * p;
                }
            }
        }
    }
    Ok(rows.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// Exact determinant by Gaussian elimination.
pub fn determinant(a: &[Vec<Rat>]) -> Rat {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = Rat::from_integer(1.into());
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Rat::zero();
        };
        if pivot != col {
            m.swap(col, pivot);
            det = -det;
        }
        det *= &m[col][col];
        for r in col + 1..n {
            let f = &m[r][col] / &m[col][col];
            if f.is_zero() {
                continue;
            }
            let pivot_row = m[col].clone();
            for (x, p) in m[r].iter_mut().zip(pivot_row.iter()) {
                *x -= &f * p;
            }
        }
    }
    det
}

pub fn eval_matrix(m: &[Vec<FactoredRational>], q0: &Rat, z: &[Rat]) -> Result<Vec<Vec<Rat>>> {
    m.iter().map(|row| eval_vector(row, q0, z)).collect()
}

pub fn eval_vector(v: &[FactoredRational], q0: &Rat, z: &[Rat]) -> Result<Vec<Rat>> {
    v.iter().map(|f| f.eval_exact(q0, z)).collect()
}

/// The plain row (z₁,…,z_{n−1}; z_n).
pub fn standard_row(n: usize) -> ArgList {
    ArgList { prefix: (1..n).collect(), target: n }
}
