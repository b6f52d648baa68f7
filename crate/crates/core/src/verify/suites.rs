use num_traits::Zero;

use super::sample::{with_retries, Sampler};
use super::{brute_admissible, Resolved, Tally};
use crate::blocks::{
    build_block, build_kernel, build_matrices, eval_matrix, eval_vector, partial_fraction_holds, residue_constants,
    solve_row, standard_row, BlockKind, KernelKind,
};
use crate::error::Result;
use crate::ncalg::{iota, nc_equal, Family, ModeSymbol, NcExpr, Word};
use crate::projection::{
    admissible_pairs, ps_plus_modes, star_projection, weight_plus_closed, weight_plus_recursive, AdmissiblePair,
    Orientation,
};
use crate::qfield::{QRat, Rat};
use crate::rmatrix::{cartan_coeff, r_factor};
use crate::series::{cleared_parts, reconstruction_holds, ExpansionSeries, FactoredRational};

const TRIES: usize = 200;

fn bound(vs: &[crate::series::Bound], depth: i64) -> i64 {
    vs.iter().filter_map(|v| v.finite()).min().unwrap_or(depth)
}

fn show(xs: &[Rat]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

pub fn oracle(t: &mut Tally, p: &Resolved) -> Result<()> {
    let ns: Vec<usize> = p.n.map(|n| vec![n]).unwrap_or_else(|| (2..=5).collect());
    for n in ns {
        let outcome = (|| {
            let a = weight_plus_closed(n, p.depth)?;
            let b = weight_plus_recursive(n, p.depth)?;
            nc_equal(&a.expr, &b.expr, bound(&[a.expr.validity(), b.expr.validity()], p.depth))
        })();
        t.check(&format!("n={n}"), outcome, || "closed and recursive forms differ".into());
    }
    Ok(())
}

fn block_values(kind: BlockKind, n: usize, q0: &Rat, z: &[Rat]) -> Result<Vec<Rat>> {
    let args = standard_row(n);
    (1..n).map(|k| build_block(kind, &args, k, n)?.eval_exact(q0, z)).collect()
}

fn block_matrix(a: &[Vec<Rat>], b: &[Vec<Rat>], c: &[Vec<Rat>], d: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let mut out = Vec::new();
    for (ra, rb) in a.iter().zip(b) {
        out.push(ra.iter().chain(rb).cloned().collect());
    }
    for (rc, rd) in c.iter().zip(d) {
        out.push(rc.iter().chain(rd).cloned().collect());
    }
    out
}

pub fn interp(t: &mut Tally, p: &Resolved) -> Result<()> {
    let mut s = Sampler::new(p.seed);
    let q = QRat::q();
    let q2 = QRat::q_pow(2);
    let mqinv = QRat::signed_q_pow(-1, -1);
    let mq = QRat::signed_q_pow(-1, 1);
    let mq3 = QRat::signed_q_pow(-1, 3);
    let small: Vec<usize> = p.n.map(|n| vec![n]).unwrap_or_else(|| (2..=6).collect());
    for &n in &small {
        let a = build_matrices(&q2, n)?;
        let b = build_matrices(&mqinv, n)?;
        for trial in 0..p.trials {
            let outcome = with_retries(&mut s, TRIES, |s| {
                let q0 = s.q0();
                let z = s.distinct(n);
                let x = solve_row(&eval_matrix(&a.m, &q0, &z)?, &eval_vector(&a.v, &q0, &z)?)?;
                let rho = block_values(BlockKind::Rho, n, &q0, &z)?;
                let w = eval_vector(&a.w, &q0, &z)?;
                let mb = eval_matrix(&b.m, &q0, &z)?;
                let vb = eval_vector(&b.v, &q0, &z)?;
                let lam = block_values(BlockKind::Lambda, n, &q0, &z)?;
                let y: Vec<Rat> = (0..n - 1)
                    .map(|k| {
                        let mut acc = vb[k].clone();
                        for (xa, row) in x.iter().zip(&mb) {
                            acc -= xa * &row[k];
                        }
                        acc
                    })
                    .collect();
                Ok((x == rho && x == w, y == lam, format!("q={q0}, z=({})", show(&z))))
            });
            match outcome {
                Ok((r, l, at)) => {
                    t.check(&format!("rho n={n} #{trial}"), Ok(r), || format!("V M^-1 differs from rho at {at}"));
                    t.check(&format!("lambda n={n} #{trial}"), Ok(l), || format!("lambda identity fails at {at}"));
                }
                Err(e) => t.record(&format!("rho/lambda n={n} #{trial}"), Err(e)),
            }
        }
        for k in 1..n {
            let args = standard_row(n);
            let lam = build_block(BlockKind::Lambda, &args, k, n)?;
            let norm = lam
                .mul(&FactoredRational::binary(n, QRat::one(), k, q.clone(), n, 1)?)?
                .mul(&FactoredRational::var(n, k).inv()?)?;
            let rho = build_block(BlockKind::Rho, &args, k, n)?;
            for trial in 0..p.trials {
                let outcome = with_retries(&mut s, TRIES, |s| {
                    let q0 = s.q0();
                    let mut z = s.distinct(n);
                    z[n - 1] = -&z[k - 1] / &q0;
                    let ok_norm = norm.eval_exact(&q0, &z)? == Rat::from_integer(1.into());
                    let mut ok_delta = true;
                    for i in 1..n {
                        z[n - 1] = z[i - 1].clone();
                        let v = rho.eval_exact(&q0, &z)?;
                        ok_delta &= v == Rat::from_integer(if i == k { 1 } else { 0 }.into());
                    }
                    Ok((ok_norm, ok_delta, format!("q={q0}, z=({})", show(&z))))
                });
                match outcome {
                    Ok((a, b, at)) => {
                        t.check(&format!("lambda normalization n={n} k={k} #{trial}"), Ok(a), || format!("limit is not 1 at {at}"));
                        t.check(&format!("rho kronecker n={n} k={k} #{trial}"), Ok(b), || format!("rho_k(z_i) ≠ δ at {at}"));
                    }
                    Err(e) => t.record(&format!("normalization n={n} k={k} #{trial}"), Err(e)),
                }
            }
        }
    }
    let big: Vec<usize> = p.n.map(|n| vec![n]).unwrap_or_else(|| (2..=5).collect());
    for &n in &big {
        let m11 = build_matrices(&q2, n)?;
        let m12 = build_matrices(&mq3, n)?;
        let m21 = build_matrices(&mq, n)?;
        for trial in 0..p.trials {
            let outcome = with_retries(&mut s, TRIES, |s| {
                let q0 = s.q0();
                let z = s.distinct(n);
                let a = eval_matrix(&m11.m, &q0, &z)?;
                let m = block_matrix(&a, &eval_matrix(&m12.m, &q0, &z)?, &eval_matrix(&m21.m, &q0, &z)?, &a);
                let v: Vec<Rat> = eval_vector(&m11.v, &q0, &z)?.into_iter().chain(eval_vector(&m12.v, &q0, &z)?).collect();
                let x = solve_row(&m, &v)?;
                let expect: Vec<Rat> = block_values(BlockKind::Mu, n, &q0, &z)?
                    .into_iter()
                    .chain(block_values(BlockKind::Nu, n, &q0, &z)?)
                    .collect();
                Ok((x == expect, format!("q={q0}, z=({})", show(&z))))
            });
            let case = format!("mu/nu n={n} #{trial}");
            match outcome {
                Ok((ok, at)) => t.check(&case, Ok(ok), || format!("V M^-1 differs from (mu, nu) at {at}")),
                Err(e) => t.record(&case, Err(e)),
            }
        }
    }
    Ok(())
}

pub fn kernels(t: &mut Tally, p: &Resolved) -> Result<()> {
    for kind in [KernelKind::Alpha, KernelKind::Gamma] {
        let outcome = (|| {
            let a = build_kernel(kind, &QRat::one(), 1, 2, 2)?;
            let b = build_kernel(kind, &QRat::one(), 2, 1, 2)?;
            let (num, den) = cleared_parts(&a.mul(&b)?);
            Ok(num == den)
        })();
        t.check(&format!("{kind:?} inverse"), outcome, || "k(x)k(1/x) ≠ 1".into());
    }
    let consts = residue_constants()?;
    let mut s = Sampler::new(p.seed);
    for kind in [KernelKind::Alpha, KernelKind::Beta, KernelKind::Gamma] {
        for trial in 0..5 {
            let outcome = with_retries(&mut s, TRIES, |s| {
                let q0 = s.q0();
                let x0 = s.rat();
                Ok((partial_fraction_holds(kind, &consts, &q0, &x0)?, format!("q={q0}, x={x0}")))
            });
            let case = format!("{kind:?} residues #{trial}");
            match outcome {
                Ok((ok, at)) => t.check(&case, Ok(ok), || format!("partial fractions fail at {at}")),
                Err(e) => t.record(&case, Err(e)),
            }
        }
    }
    Ok(())
}

fn single_current_support(x: &NcExpr, positive: bool, window: i64) -> Option<String> {
    let mut seen = Vec::new();
    for (w, c) in x.terms() {
        let Ok(ms) = w.mode_symbols() else { return Some(format!("abstract word {w}")) };
        if ms.len() != 1 || ms[0].family != Family::E {
            return Some(format!("unexpected word {w}"));
        }
        let k = ms[0].index;
        let ok = if positive { k >= 0 } else { k < 0 };
        if !ok {
            return Some(format!("mode e_{k} outside the projected half"));
        }
        let expect = ExpansionSeries::monomial(1, vec![-k as i32], QRat::one());
        if c.terms() != expect.terms() {
            return Some(format!("coefficient of e_{k} is {c}"));
        }
        seen.push(k);
    }
    let want: Vec<i64> = if positive { (0..=window).collect() } else { (-window..=-1).collect() };
    seen.sort();
    (seen != want).then(|| format!("support {seen:?}, expected {want:?}"))
}

pub fn duality(t: &mut Tally, p: &Resolved) -> Result<()> {
    t.record(
        "P*-(e(z)) support",
        star_projection(1, p.depth, p.window, Orientation::Minus).map(|x| single_current_support(&x, false, p.window)),
    );
    t.record(
        "P*+(e(z)) support",
        star_projection(1, p.depth, p.window, Orientation::Plus).map(|x| single_current_support(&x, true, p.window)),
    );
    let mut s = Sampler::new(p.seed);
    for trial in 0..100 {
        let len = s.int(1, 5) as usize;
        let ms: Vec<ModeSymbol> = (0..len)
            .map(|_| {
                let k = s.int(-9, 9);
                match s.int(0, 2) {
                    0 => ModeSymbol::e(k),
                    1 => ModeSymbol::f(k),
                    _ => ModeSymbol::a(k),
                }
            })
            .collect();
        let c = ExpansionSeries::monomial(2, vec![s.int(-3, 3) as i32, s.int(-3, 3) as i32], QRat::from_rat(s.rat()));
        let w = Word::modes(&ms);
        let outcome = (|| {
            let x = NcExpr::term(2, w.clone(), c.clone())?;
            let plain = iota(&iota(&x, false)?, false)? == x;
            let inverted = iota(&iota(&x, true)?, true)? == x;
            let moved = iota(&x, false)? != x || ms.iter().all(|m| m.family == Family::A && m.index == 0);
            Ok(plain && inverted && moved)
        })();
        t.check(&format!("iota involution #{trial}"), outcome, || format!("iota∘iota ≠ id on {w}"));
    }
    Ok(())
}

pub fn enumeration(t: &mut Tally, p: &Resolved) -> Result<()> {
    let ns: Vec<usize> = p.n.map(|n| vec![n]).unwrap_or_else(|| (1..=8).collect());
    for n in ns {
        for o in [Orientation::Plus, Orientation::Minus] {
            for r in 0..=n / 2 {
                let outcome = (|| Ok(admissible_pairs(n, r, o)? == brute_admissible(n, r, o)?))();
                t.check(&format!("n={n} r={r} {o:?}"), outcome, || "fast and brute-force lists differ".into());
            }
        }
    }
    let printed = [(vec![1, 2], vec![4, 3]), (vec![2, 1], vec![4, 3]), (vec![3, 1], vec![4, 2])];
    let outcome = (|| {
        let expect = printed
            .iter()
            .map(|(i, j)| AdmissiblePair::new(i.clone(), j.clone(), Orientation::Plus, 4))
            .collect::<Result<Vec<_>>>()?;
        let mut got = admissible_pairs(4, 2, Orientation::Plus)?;
        got.sort();
        let mut expect = expect;
        expect.sort();
        Ok(got == expect)
    })();
    t.check("n=4 r=2 printed list", outcome, || "list differs from {1,2},{4,3}; {2,1},{4,3}; {3,1},{4,2}".into());
    Ok(())
}

pub fn modes(t: &mut Tally, p: &Resolved) -> Result<()> {
    let k = p.window;
    let ps = ps_plus_modes(1, 1, k)?;
    let pref = QRat::q().add(&QRat::q_pow(-2)).inv()?.neg();
    for m in 1..=k {
        let f = |a: i64, b: i64| Word::modes(&[ModeSymbol::f(a), ModeSymbol::f(b)]);
        let mut expect: Vec<(Word, QRat)> = Vec::new();
        let mut push = |w: Word, c: QRat| {
            if let Some(e) = expect.iter_mut().find(|(x, _)| *x == w) {
                e.1 = e.1.add(&c);
            } else {
                expect.push((w, c));
            }
        };
        push(f(m, 0), QRat::q());
        push(f(0, m), QRat::from_int(-1));
        push(f(1, m - 1), QRat::one());
        push(f(m - 1, 1), QRat::q_pow(-1).neg());
        expect.retain(|(_, c)| !c.is_zero());
        let mut got: Vec<(Word, QRat)> = ps
            .terms()
            .iter()
            .map(|(w, c)| (w.clone(), c.coeff(&[-(m as i32)])))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        got.sort_by(|a, b| a.0.cmp(&b.0));
        let mut want: Vec<(Word, QRat)> = expect.into_iter().map(|(w, c)| (w, c.mul(&pref))).collect();
        want.sort_by(|a, b| a.0.cmp(&b.0));
        t.check(&format!("P(s) z^-{m}"), Ok(got == want), || format!("got {got:?}"));
    }
    Ok(())
}

fn random_factored(s: &mut Sampler) -> Result<FactoredRational> {
    let n = s.int(1, 4) as usize;
    let mono: Vec<i32> = (0..n).map(|_| s.int(-2, 2) as i32).collect();
    let scalar = QRat::from_rat(s.rat()).mul(&QRat::q_pow(s.int(-2, 2) as i32));
    let mut fr = FactoredRational::monomial(n, mono, scalar);
    if n >= 2 {
        for _ in 0..s.int(0, 3) {
            let i = s.int(1, n as i64) as usize;
            let mut j = s.int(1, n as i64) as usize;
            if j == i {
                j = if i == n { 1 } else { i + 1 };
            }
            let u = if s.coin() { QRat::from_rat(s.rat()) } else { QRat::signed_q_pow(if s.coin() { 1 } else { -1 }, s.int(-3, 3) as i32) };
            let v = QRat::from_rat(s.rat());
            let m = [-2, -1, 1, 2][s.int(0, 3) as usize];
            fr = fr.times_binary(u, i, v, j, m)?;
        }
    }
    Ok(fr)
}

pub fn series(t: &mut Tally, p: &Resolved) -> Result<()> {
    let mut s = Sampler::new(p.seed);
    for trial in 0..200 {
        let depth = s.int(0, p.depth.max(0)) as i64;
        let outcome = random_factored(&mut s).and_then(|fr| {
            let short = fr.expand(depth)?;
            let long = fr.expand(depth + 4)?;
            let agree = match short.validity().finite() {
                Some(v) => short.agrees_up_to(&long, v),
                None => short == long,
            };
            Ok(reconstruction_holds(&fr, depth)? && agree)
        });
        t.check(&format!("random #{trial}"), outcome, || "expansion fails reconstruction or validity check".into());
    }
    Ok(())
}

pub fn rfactors(t: &mut Tally, p: &Resolved) -> Result<()> {
    let k = p.window;
    let dq = QRat::q().sub(&QRat::q_pow(-1));
    let outcome = r_factor(Orientation::Plus, 1, p.depth, k).map(|r| {
        let mut ok = r.len() == k as usize;
        for m in 1..=k {
            ok &= r.coeff(&Word::modes(&[ModeSymbol::e(-m)]), &Word::modes(&[ModeSymbol::f(m)])) == dq;
        }
        ok
    });
    t.check("R+ order 1", outcome, || format!("R+ is not (q-q^-1) Σ e_-n ⊗ f_n for 0<n≤{k}"));
    let outcome = r_factor(Orientation::Minus, 1, p.depth, k).map(|r| {
        let mut ok = r.len() == (k + 1) as usize;
        for m in 0..=k {
            ok &= r.coeff(&Word::modes(&[ModeSymbol::e(m)]), &Word::modes(&[ModeSymbol::f(-m)])) == dq;
        }
        ok
    });
    t.check("R- order 1", outcome, || format!("R- is not (q-q^-1) Σ e_n ⊗ f_-n for 0≤n≤{k}"));
    let c1 = dq.div(&QRat::q().add(&QRat::one()).add(&QRat::q_pow(-1)));
    t.check("c_1", c1.and_then(|c| Ok(cartan_coeff(1)?.value == c)), || "c_1 ≠ (q-q^-1)/(q+1+q^-1)".into());
    let mut s = Sampler::new(p.seed);
    for n in 1..=6i64 {
        for trial in 0..5 {
            let outcome = with_retries(&mut s, TRIES, |s| {
                let q0 = s.q0();
                let e = n as i32;
                let qn = num_traits::pow::Pow::pow(&q0, e);
                let d = &q0 - q0.recip();
                let sign = Rat::from_integer(if n % 2 == 1 { 1 } else { -1 }.into());
                let den = (&qn - qn.recip()) * (&qn + sign + qn.recip());
                if den.is_zero() {
                    return Err(crate::error::Error::PoleAtQ(q0.to_string()));
                }
                let direct = Rat::from_integer(n.into()) * &d * &d / den;
                Ok((cartan_coeff(n)?.value.eval(&q0)? == direct, q0))
            });
            let case = format!("c_{n} #{trial}");
            match outcome {
                Ok((ok, q0)) => t.check(&case, Ok(ok), || format!("mismatch at q={q0}")),
                Err(e) => t.record(&case, Err(e)),
            }
        }
    }
    Ok(())
}
