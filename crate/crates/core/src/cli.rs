//! Command-line front end.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::blocks::{build_block, build_tilde_block, residue_constants, ArgList, BlockKind};
use crate::cache::Cache;
use crate::error::{Error, Result};
use crate::io::{
    latex_factored, latex_nc, latex_qrat, latex_tensor, latex_weight_structure, to_json, RmatrixDoc, WeightDoc,
    SCHEMA_VERSION,
};
use crate::ncalg::Word;
use crate::projection::{
    f_block, f_tilde_block, mode_expand, s_block, s_tilde_block, tau_ij, weight_minus_closed, weight_plus_closed,
    AdmissiblePair, Orientation, WeightExpr,
};
use crate::rmatrix::{assemble_r, cartan_coeff, pair_degree, CartanCoeff, RFactor, TensorExpr};
use crate::verify::{run_suite, Params, Suite};

#[derive(Parser, Debug)]
#[command(name = "weightfn", version, about = "Exact weight functions and R-matrix factors for U_q(A_2^(2))")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Latex,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Sign {
    Plus,
    Minus,
}

impl From<Sign> for Orientation {
    fn from(s: Sign) -> Self {
        match s {
            Sign::Plus => Orientation::Plus,
            Sign::Minus => Orientation::Minus,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write output here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Projection of f(z_1)…f(z_n) as a combination of projected currents
    Weight {
        #[arg(value_enum)]
        sign: Sign,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        /// Expansion depth D
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(i64).range(0..))]
        depth: i64,
        /// Expand the projected currents into modes
        #[arg(long)]
        modes: bool,
        /// Mode window K
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(i64).range(1..))]
        window: i64,
        /// Cache directory (default: $WEIGHTFN_CACHE_DIR if set)
        #[arg(long)]
        cache_dir: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Truncated R-matrix factors and Cartan coefficients
    Rmatrix {
        #[arg(long, default_value_t = 1)]
        order: usize,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(i64).range(0..))]
        depth: i64,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(i64).range(0..))]
        window: i64,
        /// Number of Cartan coefficients to list (default: the window)
        #[arg(long)]
        cartan: Option<i64>,
        #[command(flatten)]
        common: Common,
    },
    /// Dump a single building block
    Blocks {
        #[arg(value_enum)]
        kind: BlockName,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        /// Ordinary arguments of the block, e.g. 1,2
        #[arg(long, value_delimiter = ',')]
        prefix: Vec<usize>,
        /// Distinguished argument
        #[arg(long)]
        target: Option<usize>,
        /// Variable index k of the block, or τ index
        #[arg(long)]
        k: Option<usize>,
        /// Use the P⁻ (tilde) variant
        #[arg(long)]
        tilde: bool,
        /// I of an admissible pair (for tau)
        #[arg(long = "i", value_delimiter = ',')]
        i_set: Vec<usize>,
        /// J of an admissible pair (for tau)
        #[arg(long = "j", value_delimiter = ',')]
        j_set: Vec<usize>,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(i64).range(0..))]
        depth: i64,
        #[command(flatten)]
        common: Common,
    },
    /// Run a verification suite; exits nonzero on any failure
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        depth: Option<i64>,
        #[arg(long)]
        window: Option<i64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        trials: Option<usize>,
        /// Write the JSON report here
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BlockName {
    Rho,
    Lambda,
    Mu,
    Nu,
    Tau,
    F,
    S,
    Residues,
}

fn emit(common: &Common, body: &str) -> Result<()> {
    match &common.out {
        Some(p) => fs::write(p, body).map_err(|e| Error::InvalidArgument(format!("{}: {e}", p.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn weight_doc(sign: Orientation, n: usize, depth: i64, window: Option<i64>, cache: Option<&Cache>) -> Result<WeightDoc> {
    let key = [
        ("schema", SCHEMA_VERSION.to_string()),
        ("sign", format!("{sign:?}")),
        ("n", n.to_string()),
        ("depth", depth.to_string()),
        ("window", window.map(|k| k.to_string()).unwrap_or_else(|| "-".into())),
    ];
    if let Some(doc) = cache.and_then(|c| c.load::<WeightDoc>(&key)) {
        return Ok(doc);
    }
    let w: WeightExpr = match sign {
        Orientation::Plus => weight_plus_closed(n, depth)?,
        Orientation::Minus => weight_minus_closed(n, depth)?,
    };
    let expr = match window {
        Some(k) => mode_expand(&w, k)?,
        None => w.expr,
    };
    let doc = WeightDoc::new(sign, n, depth, window, expr);
    if let Some(c) = cache {
        if let Err(e) = c.store(&key, &doc) {
            eprintln!("warning: could not write cache: {e}");
        }
    }
    Ok(doc)
}

fn text_weight(doc: &WeightDoc) -> String {
    let head = match doc.orientation {
        Orientation::Plus => "P",
        Orientation::Minus => "P-",
    };
    let args: String = (1..=doc.n).map(|k| format!("f(z{k})")).collect::<Vec<_>>().join(" ");
    let mut out = format!("# {head}({args})  depth={} validity={}", doc.depth, doc.expr.validity());
    if let Some(k) = doc.window {
        out.push_str(&format!(" window={k}"));
    }
    out.push('\n');
    out.push_str(&doc.expr.to_string());
    out.push('\n');
    out
}

fn sorted_rows(t: &TensorExpr) -> Vec<(&Word, &Word, &crate::qfield::QRat)> {
    let mut rows: Vec<_> = t.terms.iter().map(|((l, r), c)| (l, r, c)).collect();
    rows.sort_by(|a, b| pair_degree(a.0, a.1).cmp(&pair_degree(b.0, b.1)).then((a.0, a.1).cmp(&(b.0, b.1))));
    rows
}

fn text_rmatrix(factors: &[RFactor], cartan: &[CartanCoeff]) -> String {
    let mut out = String::new();
    for f in factors {
        match f {
            RFactor::QHH => out.push_str("== q^{h⊗h}\n"),
            RFactor::Tensor { label, tensor } => {
                out.push_str(&format!("== {label} ({} terms)\n", tensor.len()));
                for (l, r, c) in sorted_rows(tensor) {
                    out.push_str(&format!("{:>5}  {l} ⊗ {r}  :  {c}\n", pair_degree(l, r)));
                }
            }
        }
    }
    out.push_str("== Cartan coefficients\n");
    for c in cartan {
        out.push_str(&format!("c_{} = {}\n", c.n, c.value));
    }
    out
}

fn latex_rmatrix(factors: &[RFactor], cartan: &[CartanCoeff]) -> String {
    let mut out = String::new();
    for f in factors {
        match f {
            RFactor::QHH => out.push_str("% q^{h\\otimes h}\n"),
            RFactor::Tensor { label, tensor } => {
                out.push_str(&format!("% {label}\n"));
                out.push_str(&latex_tensor(tensor));
            }
        }
    }
    out.push_str("\\begin{align*}\n");
    let rows: Vec<String> = cartan.iter().map(|c| format!("c_{{{}}} &= {}", c.n, latex_qrat(&c.value))).collect();
    out.push_str(&rows.join(" \\\\\n"));
    out.push_str("\n\\end{align*}\n");
    out
}

fn block_output(
    kind: BlockName,
    n: usize,
    args: Option<ArgList>,
    k: Option<usize>,
    tilde: bool,
    pair: Option<AdmissiblePair>,
    depth: i64,
    format: Format,
) -> Result<String> {
    let need_args = || args.clone().ok_or_else(|| Error::InvalidArgument("--prefix and --target are required".into()));
    let need_k = || k.ok_or_else(|| Error::InvalidArgument("--k is required".into()));
    let rational = match kind {
        BlockName::Rho | BlockName::Lambda | BlockName::Mu | BlockName::Nu => {
            let bk = match kind {
                BlockName::Rho => BlockKind::Rho,
                BlockName::Lambda => BlockKind::Lambda,
                BlockName::Mu => BlockKind::Mu,
                _ => BlockKind::Nu,
            };
            let a = need_args()?;
            Some(if tilde { build_tilde_block(bk, &a, need_k()?, n)? } else { build_block(bk, &a, need_k()?, n)? })
        }
        BlockName::Tau => {
            let p = pair.ok_or_else(|| Error::InvalidArgument("--i and --j are required".into()))?;
            Some(tau_ij(&p, need_k()?)?)
        }
        _ => None,
    };
    if let Some(fr) = rational {
        let series = fr.expand(depth)?;
        return Ok(match format {
            Format::Latex => format!("{}\n", latex_factored(&fr)),
            Format::Text => format!("{}\n", series),
            Format::Json => to_json(&serde_json::json!({
                "schema": "block",
                "version": SCHEMA_VERSION,
                "kind": format!("{kind:?}").to_lowercase(),
                "n": n,
                "depth": depth,
                "latex": latex_factored(&fr),
                "expansion": series,
            }))?,
        });
    }
    match kind {
        BlockName::F | BlockName::S => {
            let a = need_args()?;
            let e = match (kind, tilde) {
                (BlockName::F, false) => f_block(&a, n, depth)?,
                (BlockName::F, true) => f_tilde_block(&a, n, depth)?,
                (_, false) => s_block(&a, n, depth)?,
                (_, true) => s_tilde_block(&a, n, depth)?,
            };
            Ok(match format {
                Format::Latex => latex_nc(&e),
                Format::Text => format!("{e}\n"),
                Format::Json => to_json(&serde_json::json!({
                    "schema": "block",
                    "version": SCHEMA_VERSION,
                    "kind": format!("{kind:?}").to_lowercase(),
                    "n": n,
                    "depth": depth,
                    "expr": e,
                }))?,
            })
        }
        _ => {
            let consts = residue_constants()?;
            Ok(match format {
                Format::Json => to_json(&serde_json::json!({
                    "schema": "residues",
                    "version": SCHEMA_VERSION,
                    "constants": consts.iter().map(|c| serde_json::json!({
                        "kernel": format!("{:?}", c.kind).to_lowercase(),
                        "pole": c.pole,
                        "value": c.value,
                    })).collect::<Vec<_>>(),
                }))?,
                Format::Latex => consts
                    .iter()
                    .map(|c| format!("\\mathrm{{{:?}}}_{{{}}} = {}\n", c.kind, latex_qrat(&c.pole), latex_qrat(&c.value)))
                    .collect(),
                Format::Text => consts.iter().map(|c| format!("{:?} at {}: {}\n", c.kind, c.pole, c.value)).collect(),
            })
        }
    }
}

pub fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Weight { sign, n, depth, modes, window, cache_dir, common } => {
            let n = n as usize;
            let o: Orientation = sign.into();
            if common.format == Format::Latex && !modes {
                emit(&common, &latex_weight_structure(n, o)?)?;
                return Ok(ExitCode::SUCCESS);
            }
            let cache = Cache::resolve(cache_dir.as_deref());
            let doc = weight_doc(o, n, depth, modes.then_some(window), cache.as_ref())?;
            let body = match common.format {
                Format::Json => to_json(&doc)?,
                Format::Text => text_weight(&doc),
                Format::Latex => latex_nc(&doc.expr),
            };
            emit(&common, &body)?;
        }
        Command::Rmatrix { order, depth, window, cartan, common } => {
            let factors = assemble_r(order, depth, window)?;
            let coeffs = (1..=cartan.unwrap_or(window)).map(cartan_coeff).collect::<Result<Vec<_>>>()?;
            let body = match common.format {
                Format::Json => to_json(&RmatrixDoc::new(order, depth, window, &factors, &coeffs))?,
                Format::Text => text_rmatrix(&factors, &coeffs),
                Format::Latex => latex_rmatrix(&factors, &coeffs),
            };
            emit(&common, &body)?;
        }
        Command::Blocks { kind, n, prefix, target, k, tilde, i_set, j_set, depth, common } => {
            let n = n as usize;
            let args = match target {
                Some(t) => Some(ArgList::new(prefix, t)?),
                None => None,
            };
            let pair = if i_set.is_empty() && j_set.is_empty() {
                None
            } else {
                let o = if tilde { Orientation::Minus } else { Orientation::Plus };
                Some(AdmissiblePair::new(i_set, j_set, o, n)?)
            };
            emit(&common, &block_output(kind, n, args, k, tilde, pair, depth, common.format)?)?;
        }
        Command::Verify { suite, n, depth, window, seed, trials, report } => {
            let r = run_suite(suite, &Params { n, depth, window, seed, trials });
            println!("suite {}: {} cases, {} failures", r.suite, r.cases, r.failures.len());
            for f in &r.failures {
                println!("  FAIL {}: {}", f.case, f.detail);
            }
            if let Some(p) = report {
                fs::write(&p, to_json(&r)?).map_err(|e| Error::InvalidArgument(format!("{}: {e}", p.display())))?;
            }
            if !r.passed() {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
