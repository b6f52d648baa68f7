use serde::{Deserialize, Serialize};

use super::Orientation;
use crate::error::{Error, Result};

/// Ordered index lists (I, J) with the admissibility conditions of their orientation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AdmissiblePair {
    pub i: Vec<usize>,
    pub j: Vec<usize>,
    pub orientation: Orientation,
    pub n: usize,
}

impl AdmissiblePair {
    pub fn empty(n: usize, orientation: Orientation) -> Self {
        AdmissiblePair { i: Vec::new(), j: Vec::new(), orientation, n }
    }

    pub fn new(i: Vec<usize>, j: Vec<usize>, orientation: Orientation, n: usize) -> Result<Self> {
        let p = AdmissiblePair { i, j, orientation, n };
        if !p.is_admissible() {
            return Err(Error::InvalidArgument(format!("({:?}, {:?}) is not {orientation:?}-admissible", p.i, p.j)));
        }
        Ok(p)
    }

    pub fn r(&self) -> usize {
        self.i.len()
    }

    pub fn contains(&self, k: usize) -> bool {
        self.i.contains(&k) || self.j.contains(&k)
    }

    /// Indices outside I ∪ J in increasing order.
    pub fn complement(&self) -> Vec<usize> {
        (1..=self.n).filter(|&k| !self.contains(k)).collect()
    }

    pub fn is_admissible(&self) -> bool {
        is_admissible(&self.i, &self.j, self.orientation, self.n)
    }
}

pub fn is_admissible(i: &[usize], j: &[usize], orientation: Orientation, n: usize) -> bool {
    if i.len() != j.len() {
        return false;
    }
    let all: Vec<usize> = i.iter().chain(j).copied().collect();
    if all.iter().any(|&k| k == 0 || k > n) {
        return false;
    }
    let mut sorted = all.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != all.len() {
        return false;
    }
    if i.iter().zip(j).any(|(a, b)| a >= b) {
        return false;
    }
    match orientation {
        Orientation::Plus => j.windows(2).all(|w| w[0] > w[1]),
        Orientation::Minus => i.windows(2).all(|w| w[0] < w[1]),
    }
}

/// All admissible pairs of cardinality `r`, sorted by (I, J).
pub fn admissible_pairs(n: usize, r: usize, orientation: Orientation) -> Result<Vec<AdmissiblePair>> {
    if 2 * r > n {
        return Err(Error::InvalidArgument(format!("cardinality {r} exceeds n/2 for n = {n}")));
    }
    let mut out = Vec::new();
    // the monotone list is chosen as a subset, the other one as an injective assignment
    for mono in subsets(n, r) {
        let (fixed, ordered): (Vec<usize>, bool) = match orientation {
            Orientation::Plus => (mono.iter().rev().copied().collect(), true),
            Orientation::Minus => (mono.clone(), false),
        };
        let free: Vec<usize> = (1..=n).filter(|k| !fixed.contains(k)).collect();
        let mut partial = Vec::with_capacity(r);
        assign(&fixed, &free, ordered, &mut partial, &mut |other| {
            let (i, j) = if ordered { (other.to_vec(), fixed.clone()) } else { (fixed.clone(), other.to_vec()) };
            out.push(AdmissiblePair { i, j, orientation, n });
        });
    }
    out.sort();
    Ok(out)
}

/// Every admissible pair of every cardinality, with r = 0 first.
pub fn all_admissible_pairs(n: usize, orientation: Orientation) -> Vec<AdmissiblePair> {
    (0..=n / 2).flat_map(|r| admissible_pairs(n, r, orientation).expect("r in range")).collect()
}

fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for k in start..=n {
            cur.push(k);
            go(k + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, n, r, &mut Vec::new(), &mut out);
    out
}

/// Fills `partial[ℓ]` from `free` so that it is below (`below = true`) or above `fixed[ℓ]`.
fn assign(fixed: &[usize], free: &[usize], below: bool, partial: &mut Vec<usize>, emit: &mut dyn FnMut(&[usize])) {
    let l = partial.len();
    if l == fixed.len() {
        emit(partial);
        return;
    }
    for &c in free {
        let ok = if below { c < fixed[l] } else { c > fixed[l] };
        if ok && !partial.contains(&c) {
            partial.push(c);
            assign(fixed, free, below, partial, emit);
            partial.pop();
        }
    }
}
