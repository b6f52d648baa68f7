//! Executable verification suites with JSON reports.

mod expr;
pub mod goldens;
mod sample;
mod suites;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::projection::{AdmissiblePair, Orientation};

pub use expr::parse_rational;
pub use sample::{with_retries, Sampler};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Goldens,
    Oracle,
    Interp,
    Kernels,
    Duality,
    Enumeration,
    Modes,
    Series,
    Rfactors,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Goldens,
        Suite::Oracle,
        Suite::Interp,
        Suite::Kernels,
        Suite::Duality,
        Suite::Enumeration,
        Suite::Modes,
        Suite::Series,
        Suite::Rfactors,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Goldens => "goldens",
            Suite::Oracle => "oracle",
            Suite::Interp => "interp",
            Suite::Kernels => "kernels",
            Suite::Duality => "duality",
            Suite::Enumeration => "enumeration",
            Suite::Modes => "modes",
            Suite::Series => "series",
            Suite::Rfactors => "rfactors",
        }
    }

    fn default_depth(self) -> i64 {
        match self {
            Suite::Goldens => 8,
            Suite::Series => 6,
            _ => 4,
        }
    }

    fn default_window(self) -> i64 {
        match self {
            Suite::Rfactors => 8,
            _ => 6,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite {s}")))
    }
}

/// Requested parameters; unset fields take per-suite defaults.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Params {
    pub n: Option<usize>,
    pub depth: Option<i64>,
    pub window: Option<i64>,
    pub seed: u64,
    pub trials: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolved {
    pub n: Option<usize>,
    pub depth: i64,
    pub window: i64,
    pub seed: u64,
    pub trials: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub case: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub cases: usize,
    pub failures: Vec<Failure>,
    pub params: Resolved,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Default)]
pub struct Tally {
    pub cases: usize,
    pub failures: Vec<Failure>,
}

impl Tally {
    /// `Ok(None)` is a pass; `Ok(Some(msg))` and errors are failures.
    pub fn record(&mut self, case: &str, outcome: Result<Option<String>>) {
        self.cases += 1;
        let detail = match outcome {
            Ok(None) => return,
            Ok(Some(msg)) => msg,
            Err(e) => format!("error: {e}"),
        };
        self.failures.push(Failure { case: case.to_string(), detail });
    }

    pub fn check(&mut self, case: &str, outcome: Result<bool>, detail: impl FnOnce() -> String) {
        let o = outcome.map(|ok| if ok { None } else { Some(detail()) });
        self.record(case, o);
    }
}

pub fn run_suite(suite: Suite, params: &Params) -> SuiteReport {
    let resolved = Resolved {
        n: params.n,
        depth: params.depth.unwrap_or(suite.default_depth()),
        window: params.window.unwrap_or(suite.default_window()),
        seed: params.seed,
        trials: params.trials.unwrap_or(20),
    };
    let mut tally = Tally::default();
    let outcome = match suite {
        Suite::Goldens => goldens::run(&mut tally, resolved.n, resolved.depth),
        Suite::Oracle => suites::oracle(&mut tally, &resolved),
        Suite::Interp => suites::interp(&mut tally, &resolved),
        Suite::Kernels => suites::kernels(&mut tally, &resolved),
        Suite::Duality => suites::duality(&mut tally, &resolved),
        Suite::Enumeration => suites::enumeration(&mut tally, &resolved),
        Suite::Modes => suites::modes(&mut tally, &resolved),
        Suite::Series => suites::series(&mut tally, &resolved),
        Suite::Rfactors => suites::rfactors(&mut tally, &resolved),
    };
    if let Err(e) = outcome {
        tally.record("setup", Err(e));
    }
    SuiteReport { suite, cases: tally.cases, failures: tally.failures, params: resolved }
}

/// Every ordered pair of disjoint index tuples of length r passing the
/// admissibility conditions, by exhaustive search.
pub fn brute_admissible(n: usize, r: usize, orientation: Orientation) -> Result<Vec<AdmissiblePair>> {
    if n > 10 {
        return Err(Error::InvalidArgument("brute force is limited to n ≤ 10".into()));
    }
    fn tuples(n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for x in 1..=n {
            if !cur.contains(&x) {
                cur.push(x);
                tuples(n, r, cur, out);
                cur.pop();
            }
        }
    }
    let mut all = Vec::new();
    tuples(n, r, &mut Vec::new(), &mut all);
    let mut out = Vec::new();
    for i in &all {
        for j in &all {
            if i.iter().any(|x| j.contains(x)) {
                continue;
            }
            let ok = match orientation {
                Orientation::Plus => j.windows(2).all(|w| w[0] > w[1]) && i.iter().zip(j).all(|(a, b)| b > a),
                Orientation::Minus => i.windows(2).all(|w| w[0] < w[1]) && i.iter().zip(j).all(|(a, b)| a < b),
            };
            if ok {
                out.push(AdmissiblePair::new(i.clone(), j.clone(), orientation, n)?);
            }
        }
    }
    out.sort();
    Ok(out)
}
