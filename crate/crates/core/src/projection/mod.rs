//! Weight-function projections: admissible pairs, closed formulas, the
//! recursive evaluator and mode expansion.

mod admissible;
mod closed;
mod modes;
mod recursive;

use serde::{Deserialize, Serialize};

use crate::ncalg::NcExpr;

pub use admissible::{admissible_pairs, all_admissible_pairs, is_admissible, AdmissiblePair};
pub use closed::{
    build_f_ij, build_tau_ij, f_block, f_ij_row, f_tilde_block, pair_term, s_block, s_row, s_tilde_block, tau_ij,
    weight_minus_closed, weight_plus_closed,
};
pub use modes::{
    mode_expand, pf_minus_modes, pf_plus_modes, ps_plus_modes, ps_tilde_minus_modes, star_projection, symbol_modes,
};
pub use recursive::{weight_plus_recursive, Recursion};


#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Plus,
    Minus,
}

/// Weight-function output over the abstract projection symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightExpr {
    pub expr: NcExpr,
    pub n: usize,
    pub depth: i64,
    pub orientation: Orientation,
}
