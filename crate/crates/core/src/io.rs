//! Versioned JSON documents and LaTeX output.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_traits::{One, Signed};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::blocks::{build_block, build_tilde_block, ArgList, BlockKind};
use crate::error::{Error, Result};
use crate::ncalg::{AbstractKind, AbstractSymbol, Family, ModeSymbol, NcExpr, Symbol, Twist, Word};
use crate::projection::{all_admissible_pairs, f_ij_row, s_row, tau_ij, AdmissiblePair, Orientation};
use crate::qfield::{QPolynomial, QRat, Rat};
use crate::rmatrix::{CartanCoeff, RFactor, TensorExpr};
use crate::series::{Bound, Domain, ExpVec, ExpansionSeries, FactoredRational};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SymbolRepr {
    Mode { family: Family, index: i64 },
    Abstract { kind: AbstractKind, var: usize, twist: Twist },
}

impl From<&Symbol> for SymbolRepr {
    fn from(s: &Symbol) -> Self {
        match *s {
            Symbol::Mode(m) => SymbolRepr::Mode { family: m.family, index: m.index },
            Symbol::Abstract(a) => SymbolRepr::Abstract { kind: a.kind, var: a.var, twist: a.twist },
        }
    }
}

impl SymbolRepr {
    fn into_symbol(self) -> Result<Symbol> {
        Ok(match self {
            SymbolRepr::Mode { family, index } => Symbol::Mode(ModeSymbol { family, index }),
            SymbolRepr::Abstract { kind, var, twist } => Symbol::Abstract(AbstractSymbol::new(kind, var, twist)?),
        })
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.symbols().iter().map(SymbolRepr::from).collect::<Vec<_>>().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let reprs = Vec::<SymbolRepr>::deserialize(d)?;
        let syms = reprs.into_iter().map(SymbolRepr::into_symbol).collect::<Result<Vec<_>>>().map_err(D::Error::custom)?;
        Word::new(syms).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum BoundRepr {
    Finite(i64),
    Exact(String),
}

fn bound_repr(b: Bound) -> BoundRepr {
    match b {
        Bound::Finite(v) => BoundRepr::Finite(v),
        Bound::Exact => BoundRepr::Exact("exact".into()),
    }
}

fn bound_from<E: serde::de::Error>(b: BoundRepr) -> std::result::Result<Bound, E> {
    match b {
        BoundRepr::Finite(v) => Ok(Bound::Finite(v)),
        BoundRepr::Exact(s) if s == "exact" => Ok(Bound::Exact),
        BoundRepr::Exact(s) => Err(E::custom(format!("bad validity {s:?}"))),
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    n: usize,
    domain: Domain,
    validity: BoundRepr,
    terms: Vec<(ExpVec, QRat)>,
}

impl Serialize for ExpansionSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesRepr {
            n: self.n(),
            domain: self.domain(),
            validity: bound_repr(self.validity()),
            terms: self.terms().iter().map(|(a, c)| (a.clone(), c.clone())).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExpansionSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = SeriesRepr::deserialize(d)?;
        ExpansionSeries::from_terms(r.n, r.domain, bound_from(r.validity)?, r.terms).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct NcTerm {
    word: Word,
    coeff: ExpansionSeries,
}

#[derive(Serialize, Deserialize)]
struct NcRepr {
    n: usize,
    validity: BoundRepr,
    terms: Vec<NcTerm>,
}

impl Serialize for NcExpr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        NcRepr {
            n: self.n(),
            validity: bound_repr(self.validity()),
            terms: self.terms().iter().map(|(w, c)| NcTerm { word: w.clone(), coeff: c.clone() }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for NcExpr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = NcRepr::deserialize(d)?;
        let v = bound_from(r.validity)?;
        let e = NcExpr::from_terms(r.n, r.terms.into_iter().map(|t| (t.word, t.coeff))).map_err(D::Error::custom)?;
        Ok(e.cap_validity(v))
    }
}

#[derive(Serialize, Deserialize)]
struct TensorTerm {
    left: Word,
    right: Word,
    coeff: QRat,
}

#[derive(Serialize, Deserialize)]
struct TensorRepr {
    order: usize,
    window: i64,
    terms: Vec<TensorTerm>,
}

impl Serialize for TensorExpr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TensorRepr {
            order: self.order,
            window: self.window,
            terms: self
                .terms
                .iter()
                .map(|((l, r), c)| TensorTerm { left: l.clone(), right: r.clone(), coeff: c.clone() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TensorExpr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = TensorRepr::deserialize(d)?;
        let mut t = TensorExpr::zero(r.order, r.window);
        for x in r.terms {
            t.insert_add(x.left, x.right, x.coeff);
        }
        Ok(t)
    }
}

/// Output of `weight`, optionally mode-expanded.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightDoc {
    pub schema: String,
    pub version: u32,
    pub orientation: Orientation,
    pub n: usize,
    pub depth: i64,
    pub window: Option<i64>,
    pub expr: NcExpr,
}

impl WeightDoc {
    pub fn new(orientation: Orientation, n: usize, depth: i64, window: Option<i64>, expr: NcExpr) -> Self {
        let schema = if window.is_some() { "modes" } else { "weight" };
        WeightDoc { schema: schema.into(), version: SCHEMA_VERSION, orientation, n, depth, window, expr }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorDoc {
    pub label: String,
    pub tensor: Option<TensorExpr>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartanDoc {
    pub n: i64,
    pub value: QRat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RmatrixDoc {
    pub schema: String,
    pub version: u32,
    pub order: usize,
    pub depth: i64,
    pub window: i64,
    pub factors: Vec<FactorDoc>,
    pub cartan: Vec<CartanDoc>,
}

impl RmatrixDoc {
    pub fn new(order: usize, depth: i64, window: i64, factors: &[RFactor], cartan: &[CartanCoeff]) -> Self {
        RmatrixDoc {
            schema: "rmatrix".into(),
            version: SCHEMA_VERSION,
            order,
            depth,
            window,
            factors: factors
                .iter()
                .map(|f| match f {
                    RFactor::Tensor { label, tensor } => FactorDoc { label: label.clone(), tensor: Some(tensor.clone()) },
                    RFactor::QHH => FactorDoc { label: f.label().into(), tensor: None },
                })
                .collect(),
            cartan: cartan.iter().map(|c| CartanDoc { n: c.n, value: c.value.clone() }).collect(),
        }
    }
}

pub fn to_json<T: Serialize>(x: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(x).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn from_json<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
}

// ---------------------------------------------------------------- LaTeX

fn latex_rat(c: &Rat) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("\\tfrac{{{}}}{{{}}}", c.numer(), c.denom())
    }
}

fn latex_qpow(e: i32) -> String {
    match e {
        0 => String::new(),
        1 => "q".into(),
        _ => format!("q^{{{e}}}"),
    }
}

/// Polynomial in q, highest power first.
pub fn latex_qpoly(p: &QPolynomial) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut terms: Vec<(i32, &Rat)> = p.terms().collect();
    terms.reverse();
    let mut out = String::new();
    for (k, (e, c)) in terms.into_iter().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let qp = latex_qpow(e);
        if qp.is_empty() {
            out.push_str(&latex_rat(&a));
        } else if a.is_one() {
            out.push_str(&qp);
        } else {
            out.push_str(&latex_rat(&a));
            out.push_str(&qp);
        }
    }
    out
}

fn single_term(p: &QPolynomial) -> bool {
    p.terms().count() == 1
}

/// Splits a scalar into (negative, body) with body empty for 1.
fn latex_scalar(c: &QRat) -> (bool, String) {
    let (mut num, den) = (c.num().clone(), c.den().clone());
    let mut neg = false;
    if single_term(&num) && num.leading_coeff().is_some_and(|c| c.is_negative()) {
        neg = true;
        num = num.neg();
    }
    let body = if den.is_one() {
        if num.is_one() {
            String::new()
        } else if single_term(&num) {
            latex_qpoly(&num)
        } else {
            format!("({})", latex_qpoly(&num))
        }
    } else {
        format!("\\dfrac{{{}}}{{{}}}", latex_qpoly(&num), latex_qpoly(&den))
    };
    (neg, body)
}

pub fn latex_qrat(c: &QRat) -> String {
    let (neg, body) = latex_scalar(c);
    let body = if body.is_empty() { "1".into() } else { body };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

fn latex_zmono(a: &[i32]) -> (String, String) {
    let mut up = String::new();
    let mut down = String::new();
    for (k, &e) in a.iter().enumerate() {
        let v = match e.abs() {
            0 => continue,
            1 => format!("z_{}", k + 1),
            m => format!("z_{}^{{{m}}}", k + 1),
        };
        if e > 0 {
            up.push_str(&v);
        } else {
            down.push_str(&v);
        }
    }
    (up, down)
}

fn ratio(i: usize, j: usize) -> String {
    format!("z_{j}/z_{i}")
}

/// Rational function written with ratios z_j/z_i in its binomial factors.
pub fn latex_factored(fr: &FactoredRational) -> String {
    if fr.is_zero() {
        return "0".into();
    }
    let mut mono = fr.monomial_exps().clone();
    let mut num = Vec::new();
    let mut den = Vec::new();
    for f in fr.factors() {
        mono[f.i - 1] += f.m;
        let (vneg, vbody) = latex_scalar(&f.v);
        let sign = if vneg { "-" } else { "+" };
        let text = format!("({} {sign} {}{})", 1, vbody, ratio(f.i, f.j));
        let text = text.replace("( 1", "(1");
        let power = |m: i32| if m.abs() == 1 { text.clone() } else { format!("{text}^{{{}}}", m.abs()) };
        if f.m > 0 {
            num.push(power(f.m));
        } else {
            den.push(power(f.m));
        }
    }
    let (neg, scalar) = latex_scalar(fr.scalar());
    let (up, down) = latex_zmono(&mono);
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(&scalar);
    if !down.is_empty() {
        let top = if up.is_empty() { "1".to_string() } else { up };
        let _ = write!(out, "\\dfrac{{{top}}}{{{down}}}");
    } else {
        out.push_str(&up);
    }
    match (num.is_empty(), den.is_empty()) {
        (true, true) => {
            if out.is_empty() || out == "-" {
                out.push('1');
            }
        }
        (false, true) => out.push_str(&num.concat()),
        (n_empty, false) => {
            let top = if n_empty { "1".to_string() } else { num.concat() };
            let _ = write!(out, "\\dfrac{{{top}}}{{{}}}", den.concat());
        }
    }
    out
}

fn latex_symbol(s: &Symbol) -> String {
    match s {
        Symbol::Mode(m) => format!("{}_{{{}}}", m.family.letter(), m.index),
        Symbol::Abstract(a) => {
            let arg = match a.twist {
                Twist::One => format!("z_{}", a.var),
                Twist::MinusQ => format!("-qz_{}", a.var),
                Twist::MinusQInv => format!("-q^{{-1}}z_{}", a.var),
            };
            match a.kind {
                AbstractKind::PfPlus => format!("f^+({arg})"),
                AbstractKind::PsPlus => format!("P(s({arg}))"),
                AbstractKind::PfMinus => format!("f^-({arg})"),
                AbstractKind::PsTildeMinus => format!("P^-(\\tilde s({arg}))"),
            }
        }
    }
}

fn latex_word(w: &Word) -> String {
    if w.is_empty() {
        return "1".into();
    }
    w.symbols().iter().map(latex_symbol).collect::<Vec<_>>().join(" ")
}

fn latex_series(s: &ExpansionSeries) -> String {
    let mut parts = Vec::new();
    for (a, c) in s.terms() {
        let (up, down) = latex_zmono(a);
        let z = match (up.is_empty(), down.is_empty()) {
            (true, true) => String::new(),
            (false, true) => up,
            (top, false) => format!("\\dfrac{{{}}}{{{down}}}", if top { "1".into() } else { up }),
        };
        let (neg, body) = latex_scalar(c);
        let body = if body.is_empty() && z.is_empty() { "1".into() } else { body };
        parts.push(format!("{}{body}{z}", if neg { "-" } else { "" }));
    }
    if parts.is_empty() {
        return "0".into();
    }
    let mut out = parts.join(" + ").replace("+ -", "- ");
    if let Bound::Finite(v) = s.validity() {
        let _ = write!(out, " + O_{{{v}}}");
    }
    out
}

/// Expanded expression: one aligned line per word.
pub fn latex_nc(x: &NcExpr) -> String {
    let mut out = String::from("\\begin{align*}\n");
    for (k, (w, c)) in x.terms().iter().enumerate() {
        let sep = if k + 1 < x.len() { " \\\\" } else { "" };
        let _ = writeln!(out, "&{}\\left({}\\right) {}{sep}", if k == 0 { "" } else { "+ " }, latex_series(c), latex_word(w));
    }
    if x.is_empty() {
        out.push_str("&0\n");
    }
    out.push_str("\\end{align*}\n");
    out
}

fn latex_set(v: &[usize]) -> String {
    if v.is_empty() {
        "\\emptyset".into()
    } else {
        format!("\\{{{}\\}}", v.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(","))
    }
}

fn zs(v: &[usize]) -> String {
    v.iter().map(|k| format!("z_{k}")).collect::<Vec<_>>().join(",")
}

fn latex_row_plus(args: &ArgList) -> String {
    if args.prefix.is_empty() {
        format!("z_{}", args.target)
    } else {
        format!("{};z_{}", zs(&args.prefix), args.target)
    }
}

fn latex_row_minus(args: &ArgList) -> String {
    if args.prefix.is_empty() {
        format!("z_{}", args.target)
    } else {
        format!("z_{};{}", args.target, zs(&args.prefix))
    }
}

fn all_z(n: usize) -> String {
    zs(&(1..=n).collect::<Vec<_>>())
}

fn coeff_term(fr: &FactoredRational, sym: &str) -> String {
    let body = latex_factored(&fr.clone().neg());
    if let Some(rest) = body.strip_prefix('-') {
        format!(" - {rest}{sym}")
    } else {
        format!(" + {body}{sym}")
    }
}

fn define_f(args: &ArgList, n: usize, o: Orientation) -> Result<String> {
    let mut s = match o {
        Orientation::Plus => format!("\\mathcal{{F}}({}) &= f^+(z_{})", latex_row_plus(args), args.target),
        Orientation::Minus => format!("\\tilde{{\\mathcal{{F}}}}({}) &= f^-(z_{})", latex_row_minus(args), args.target),
    };
    for &k in &args.prefix {
        let (fr, sym) = match o {
            Orientation::Plus => (build_block(BlockKind::Rho, args, k, n)?, format!("f^+(z_{k})")),
            Orientation::Minus => (build_tilde_block(BlockKind::Rho, args, k, n)?, format!("f^-(z_{k})")),
        };
        s.push_str(&coeff_term(&fr, &sym));
    }
    Ok(s)
}

fn define_s(args: &ArgList, n: usize, o: Orientation) -> Result<String> {
    let mut s = match o {
        Orientation::Plus => format!("\\mathcal{{S}}({}) &= P(s(z_{}))", latex_row_plus(args), args.target),
        Orientation::Minus => {
            format!("\\tilde{{\\mathcal{{S}}}}({}) &= P^-(\\tilde s(z_{}))", latex_row_minus(args), args.target)
        }
    };
    for &k in &args.prefix {
        let (fr, sym) = match o {
            Orientation::Plus => (build_block(BlockKind::Mu, args, k, n)?, format!("P(s(z_{k}))")),
            Orientation::Minus => (build_tilde_block(BlockKind::Mu, args, k, n)?, format!("P^-(\\tilde s(z_{k}))")),
        };
        s.push_str(&coeff_term(&fr, &sym));
    }
    for &k in &args.prefix {
        let (fr, sym) = match o {
            Orientation::Plus => (build_block(BlockKind::Nu, args, k, n)?, format!("P(s(-qz_{k}))")),
            Orientation::Minus => {
                (build_tilde_block(BlockKind::Nu, args, k, n)?, format!("P^-(\\tilde s(-q^{{-1}}z_{k}))"))
            }
        };
        s.push_str(&coeff_term(&fr, &sym));
    }
    Ok(s)
}

fn pair_label(p: &AdmissiblePair) -> String {
    format!("{{{},{}}}", latex_set(&p.i), latex_set(&p.j))
}

/// The weight function as a sum over admissible pairs, followed by the
/// definition of every block it uses.
pub fn latex_weight_structure(n: usize, o: Orientation) -> Result<String> {
    let z = all_z(n);
    let (tau, fname, sname) = match o {
        Orientation::Plus => ("\\tau", "\\mathcal{F}", "\\mathcal{S}"),
        Orientation::Minus => ("\\tilde\\tau", "\\tilde{\\mathcal{F}}", "\\tilde{\\mathcal{S}}"),
    };
    let lhs = match o {
        Orientation::Plus => format!("P({})", (1..=n).map(|k| format!("f(z_{k})")).collect::<String>()),
        Orientation::Minus => format!("P^-({})", (1..=n).map(|k| format!("f(z_{k})")).collect::<String>()),
    };
    let pairs = all_admissible_pairs(n, o);
    let mut summands = Vec::new();
    let mut defs: Vec<String> = Vec::new();
    let mut blocks: BTreeSet<(u8, Vec<usize>, usize)> = BTreeSet::new();
    let mut block_defs = Vec::new();
    for p in &pairs {
        let label = pair_label(p);
        let mut taus = String::new();
        for k in 1..=p.r() {
            let _ = write!(taus, "{tau}^{k}_{label}({z})");
            defs.push(format!("{tau}^{k}_{label}({z}) &= {}", latex_factored(&tau_ij(p, k)?)));
        }
        let mut fs = String::new();
        for l in p.complement() {
            let row = f_ij_row(p, l)?;
            let _ = write!(fs, "{fname}^{l}_{label}({z})");
            let text = match o {
                Orientation::Plus => latex_row_plus(&row),
                Orientation::Minus => latex_row_minus(&row),
            };
            defs.push(format!("{fname}^{l}_{label}({z}) &= {fname}({text})"));
            if blocks.insert((0, row.prefix.clone(), row.target)) {
                block_defs.push(define_f(&row, n, o)?);
            }
        }
        let mut ss = Vec::new();
        for k in 1..=p.r() {
            let row = s_row(p, k);
            let text = match o {
                Orientation::Plus => latex_row_plus(&row),
                Orientation::Minus => latex_row_minus(&row),
            };
            ss.push(format!("{sname}({text})"));
            if blocks.insert((1, row.prefix.clone(), row.target)) {
                block_defs.push(define_s(&row, n, o)?);
            }
        }
        let body = match o {
            Orientation::Plus => format!("{taus}{}{fs}", ss.concat()),
            Orientation::Minus => {
                ss.reverse();
                format!("{taus}{fs}{}", ss.concat())
            }
        };
        summands.push(body);
    }
    let mut out = String::new();
    let _ = writeln!(out, "\\begin{{align*}}");
    let _ = writeln!(out, "{lhs} &= {}", summands.join(" \\\\\n&+ "));
    let _ = writeln!(out, "\\end{{align*}}");
    let _ = writeln!(out, "\\begin{{align*}}");
    let all: Vec<String> = defs.into_iter().chain(block_defs).collect();
    let _ = writeln!(out, "{}", all.join(", \\\\\n"));
    let _ = writeln!(out, "\\end{{align*}}");
    Ok(out)
}

pub fn latex_tensor(t: &TensorExpr) -> String {
    let mut out = String::from("\\begin{align*}\n");
    let rows: Vec<String> = t
        .terms
        .iter()
        .map(|((l, r), c)| format!("&{} \\; {} \\otimes {}", latex_qrat(c), latex_word(l), latex_word(r)))
        .collect();
    if rows.is_empty() {
        out.push_str("&0\n");
    } else {
        out.push_str(&rows.join(" \\\\\n+"));
        out.push('\n');
    }
    out.push_str("\\end{align*}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projection::{mode_expand, weight_plus_closed};
    use crate::rmatrix::rbar_order;

    #[test]
    fn weight_round_trip() {
        let w = weight_plus_closed(3, 3).unwrap();
        let doc = WeightDoc::new(Orientation::Plus, 3, 3, None, w.expr.clone());
        let back: WeightDoc = from_json(&to_json(&doc).unwrap()).unwrap();
        assert_eq!(back, doc);
        let m = mode_expand(&w, 2).unwrap();
        let doc = WeightDoc::new(Orientation::Plus, 3, 3, Some(2), m);
        let back: WeightDoc = from_json(&to_json(&doc).unwrap()).unwrap();
        assert_eq!(back, doc);
    }

    #[test]
    fn tensor_round_trip() {
        let t = rbar_order(2, 1).unwrap();
        let back: TensorExpr = from_json(&to_json(&t).unwrap()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn qpoly_latex() {
        let p = QRat::q_pow(2).sub(&QRat::one());
        assert_eq!(latex_qrat(&p), "(q^{2} - 1)");
        assert_eq!(latex_qrat(&QRat::signed_q_pow(-1, -1)), "-q^{-1}");
    }

    #[test]
    fn structure_n2() {
        let s = latex_weight_structure(2, Orientation::Plus).unwrap();
        let flat: String = s.split_whitespace().collect();
        assert!(flat.contains(
            "P(f(z_1)f(z_2))&=\\mathcal{F}^1_{\\emptyset,\\emptyset}(z_1,z_2)\\mathcal{F}^2_{\\emptyset,\\emptyset}(z_1,z_2)\\\\&+\\tau^1_{\\{1\\},\\{2\\}}(z_1,z_2)\\mathcal{S}(z_1)"
        ), "{s}");
        assert!(flat.contains("\\mathcal{F}(z_1;z_2)&=f^+(z_2)"));
    }
}
