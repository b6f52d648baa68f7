use proptest::prelude::*;

use weightfn_core::blocks::{build_block, standard_row, BlockKind};
use weightfn_core::ncalg::{iota, nc_equal, ModeSymbol, NcExpr, Word};
use weightfn_core::projection::{
    all_admissible_pairs, is_admissible, mode_expand, pf_minus_modes, weight_minus_closed, weight_plus_closed,
    Orientation,
};
use weightfn_core::qfield::{normalize, rat, QPolynomial, QRat};
use weightfn_core::rmatrix::{r_factor, rbar_order, TensorExpr};
use weightfn_core::series::{reconstruction_holds, ExpansionSeries, FactoredRational};

fn qpoly() -> impl Strategy<Value = QPolynomial> {
    prop::collection::vec((-3i32..=3, -5i64..=5), 0..4).prop_map(|t| QPolynomial::from_int_terms(&t))
}

fn nonzero_qpoly() -> impl Strategy<Value = QPolynomial> {
    qpoly().prop_filter("nonzero", |p| !p.is_zero())
}

fn qrat() -> impl Strategy<Value = QRat> {
    (qpoly(), nonzero_qpoly()).prop_map(|(a, b)| normalize(a, b).unwrap())
}

fn small_rat() -> impl Strategy<Value = (i64, i64)> {
    (-9i64..=9, 1i64..=9)
}

fn mode() -> impl Strategy<Value = ModeSymbol> {
    (0..3u8, -4i64..=4).prop_map(|(f, k)| match f {
        0 => ModeSymbol::e(k),
        1 => ModeSymbol::f(k),
        _ => ModeSymbol::a(k),
    })
}

fn word() -> impl Strategy<Value = Word> {
    prop::collection::vec(mode(), 0..4).prop_map(|ms| Word::modes(&ms))
}

fn coeff(n: usize) -> impl Strategy<Value = ExpansionSeries> {
    (prop::collection::vec(-2i32..=2, n), -4i64..=4, -2i32..=2)
        .prop_map(move |(a, c, e)| ExpansionSeries::monomial(n, a, QRat::from_int(c).mul(&QRat::q_pow(e))))
}

fn nc(n: usize) -> impl Strategy<Value = NcExpr> {
    prop::collection::vec((word(), coeff(n)), 0..4).prop_map(move |ts| NcExpr::from_terms(n, ts).unwrap())
}

fn factored() -> impl Strategy<Value = FactoredRational> {
    let binary = (1usize..=4, 1usize..=4, -3i32..=3, small_rat(), prop::sample::select(vec![-2, -1, 1, 2]));
    (1usize..=4, prop::collection::vec(-2i32..=2, 4), small_rat(), prop::collection::vec(binary, 0..3)).prop_map(
        |(n, mono, (cn, cd), bins)| {
            let c = if cn == 0 { QRat::one() } else { QRat::from_rat(rat(cn, cd)) };
            let mut fr = FactoredRational::monomial(n, mono[..n].to_vec(), c);
            for (i, j, e, (vn, vd), m) in bins {
                let (i, j) = (i.min(n), j.min(n));
                if i == j || vn == 0 {
                    continue;
                }
                fr = fr.times_binary(QRat::q_pow(e), i, QRat::from_rat(rat(vn, vd)), j, m).unwrap();
            }
            fr
        },
    )
}

fn total_index(w: &Word) -> i64 {
    w.mode_symbols().map(|ms| ms.iter().map(|m| m.index.abs()).sum()).unwrap_or(i64::MAX)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalize_cancels(a in qpoly(), b in nonzero_qpoly(), c in nonzero_qpoly()) {
        prop_assert_eq!(normalize(a.mul(&c), b.mul(&c)).unwrap(), normalize(a, b).unwrap());
    }

    #[test]
    fn field_axioms(a in qrat(), b in qrat(), c in qrat()) {
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        if !a.is_zero() {
            prop_assert!(a.mul(&a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn eval_is_a_homomorphism(a in qrat(), b in qrat(), (n, d) in small_rat()) {
        prop_assume!(n != 0);
        let q0 = rat(n, d);
        if let (Ok(x), Ok(y)) = (a.eval(&q0), b.eval(&q0)) {
            if let Ok(s) = a.add(&b).eval(&q0) {
                prop_assert_eq!(s, &x + &y);
            }
            if let Ok(p) = a.mul(&b).eval(&q0) {
                prop_assert_eq!(p, &x * &y);
            }
        }
    }

    #[test]
    fn expansion_reconstructs(fr in factored(), depth in 0i64..=6) {
        prop_assert!(reconstruction_holds(&fr, depth).unwrap());
    }

    #[test]
    fn validity_is_sound(fr in factored(), depth in 0i64..=6) {
        let short = fr.expand(depth).unwrap();
        let long = fr.expand(depth + 5).unwrap();
        match short.validity().finite() {
            Some(v) => prop_assert!(short.agrees_up_to(&long, v)),
            None => prop_assert_eq!(short, long),
        }
    }

    #[test]
    fn scale_then_unscale(fr in factored(), i in 1usize..=4, e in -3i32..=3) {
        let i = i.min(fr.n());
        let c = QRat::signed_q_pow(-1, e);
        let back = fr.substitute_scale(i, &c).unwrap().substitute_scale(i, &c.inv().unwrap()).unwrap();
        prop_assert_eq!(back.expand(4).unwrap(), fr.expand(4).unwrap());
    }

    #[test]
    fn nc_mul_associative(a in nc(2), b in nc(2), c in nc(2)) {
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
    }

    #[test]
    fn nc_mul_bilinear(a in nc(2), b in nc(2), c in nc(2), s in qrat()) {
        let left = a.add(&b).unwrap().mul(&c).unwrap();
        prop_assert_eq!(left, a.mul(&c).unwrap().add(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.scale_q(&s).mul(&c).unwrap(), a.mul(&c).unwrap().scale_q(&s));
    }

    #[test]
    fn iota_is_multiplicative(a in nc(2), b in nc(2), inv in any::<bool>()) {
        let lhs = iota(&a.mul(&b).unwrap(), inv).unwrap();
        let rhs = iota(&a, inv).unwrap().mul(&iota(&b, inv).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn nc_equal_is_an_equivalence(a in nc(2), b in nc(2), bound in 0i64..4) {
        prop_assert!(nc_equal(&a, &a, bound).unwrap());
        prop_assert_eq!(nc_equal(&a, &b, bound).unwrap(), nc_equal(&b, &a, bound).unwrap());
        let c = a.clone();
        if nc_equal(&a, &b, bound).unwrap() {
            prop_assert!(nc_equal(&b, &c, bound).unwrap());
        }
    }

    #[test]
    fn json_round_trip(x in nc(3), s in coeff(2)) {
        let back: NcExpr = serde_json::from_str(&serde_json::to_string(&x).unwrap()).unwrap();
        prop_assert_eq!(back, x);
        let back: ExpansionSeries = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        prop_assert_eq!(back, s);
    }
}

fn poly2(terms: &[([i32; 2], QRat)]) -> ExpansionSeries {
    terms.iter().fold(ExpansionSeries::zero(2), |acc, (a, c)| acc.add(&ExpansionSeries::monomial(2, a.to_vec(), c.clone())).unwrap())
}

#[test]
fn iota_maps_ee_relation_to_ff() {
    let q = QRat::q;
    let one = QRat::one;
    let lin = |a: QRat, b: QRat| poly2(&[([1, 0], a), ([0, 1], b)]);
    // (z - q²w)(qz + w) and (q²z - w)(z + qw)
    let ee_left = lin(one(), QRat::q_pow(2).neg()).mul(&lin(q(), one())).unwrap();
    let ee_right = lin(QRat::q_pow(2), one().neg()).mul(&lin(one(), q())).unwrap();
    let clear = |s: &ExpansionSeries| s.invert_vars().shift(&[2, 2]).neg();
    assert_eq!(clear(&ee_left).terms(), ee_right.terms());
    assert_eq!(clear(&ee_right).terms(), ee_left.terms());
    let ez = Word::modes(&[ModeSymbol::e(3), ModeSymbol::e(-1)]);
    let x = NcExpr::term(2, ez, ee_left).unwrap();
    let y = iota(&x, true).unwrap();
    let fw = Word::modes(&[ModeSymbol::f(-3), ModeSymbol::f(1)]);
    assert_eq!(y.terms().keys().collect::<Vec<_>>(), vec![&fw]);
}

#[test]
fn blocks_are_homogeneous() {
    for n in 2..=4 {
        for kind in [BlockKind::Rho, BlockKind::Lambda, BlockKind::Mu, BlockKind::Nu] {
            for k in 1..n {
                let s = build_block(kind, &standard_row(n), k, n).unwrap().expand(4).unwrap();
                for a in s.terms().keys() {
                    assert_eq!(a.iter().sum::<i32>(), 0, "{kind:?} n={n} k={k} exponent {a:?}");
                }
            }
        }
    }
}

#[test]
fn enumerated_pairs_are_admissible() {
    for n in 1..=8 {
        for o in [Orientation::Plus, Orientation::Minus] {
            for p in all_admissible_pairs(n, o) {
                assert!(is_admissible(&p.i, &p.j, o, n), "{p:?}");
            }
        }
    }
}

#[test]
fn window_monotonicity() {
    for n in 1..=3 {
        for w in [weight_plus_closed(n, 3).unwrap(), weight_minus_closed(n, 3).unwrap()] {
            for k in 2..=4 {
                let keep = |x: &Word| total_index(x) <= k - 1;
                let big = mode_expand(&w, k).unwrap().filter_words(keep);
                let small = mode_expand(&w, k - 1).unwrap().filter_words(keep);
                assert_eq!(big.terms(), small.terms(), "n={n} K={k} {:?}", w.orientation);
            }
        }
    }
}

#[test]
fn mode_supports() {
    for n in 1..=3 {
        let plus = mode_expand(&weight_plus_closed(n, 2).unwrap(), 4).unwrap();
        for w in plus.terms().keys() {
            assert!(w.mode_symbols().unwrap().iter().all(|m| m.index >= 0), "{w}");
        }
    }
    let pf = pf_minus_modes(1, 1, 5).unwrap();
    for w in pf.terms().keys() {
        assert!(w.mode_symbols().unwrap().iter().all(|m| m.index <= 0), "{w}");
    }
}

fn f_side(t: &TensorExpr) -> Vec<i64> {
    let mut idx: Vec<i64> = t.terms.keys().flat_map(|(_, r)| r.mode_symbols().unwrap().into_iter().map(|m| m.index)).collect();
    idx.sort();
    idx
}

#[test]
fn r_factor_f_supports() {
    let plus = f_side(&r_factor(Orientation::Plus, 1, 3, 5).unwrap());
    assert_eq!(plus, (1..=5).collect::<Vec<_>>());
    let minus = f_side(&r_factor(Orientation::Minus, 1, 3, 5).unwrap());
    assert_eq!(minus, (-5..=0).collect::<Vec<_>>());
}

#[test]
fn rbar_sub_window() {
    for m in 1..=2 {
        for k in 1..=3 {
            let big = rbar_order(m, k + 1).unwrap();
            let small = rbar_order(m, k).unwrap();
            let within = |w: &Word| w.mode_symbols().unwrap().iter().all(|s| s.index.abs() <= k);
            let restricted: Vec<_> = big.terms.iter().filter(|((l, r), _)| within(l) && within(r)).collect();
            assert_eq!(restricted, small.terms.iter().collect::<Vec<_>>(), "m={m} K={k}");
        }
    }
}
