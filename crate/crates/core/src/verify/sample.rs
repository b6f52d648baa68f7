//! Seeded random rational points.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::qfield::Rat;

const MAX: i64 = 127;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.random_range(lo..=hi)
    }

    pub fn coin(&mut self) -> bool {
        self.rng.random_bool(0.5)
    }

    /// Nonzero rational with 7-bit numerator and denominator.
    pub fn rat(&mut self) -> Rat {
        loop {
            let p = self.int(-MAX, MAX);
            if p != 0 {
                let d = self.int(1, MAX);
                return Rat::new(BigInt::from(p), BigInt::from(d));
            }
        }
    }

    /// A value for q avoiding 0 and ±1.
    pub fn q0(&mut self) -> Rat {
        loop {
            let r = self.rat();
            let a = num_traits::Signed::abs(&r);
            if a != Rat::from_integer(1.into()) {
                return r;
            }
        }
    }

    /// `n` pairwise distinct nonzero rationals.
    pub fn distinct(&mut self, n: usize) -> Vec<Rat> {
        let mut out: Vec<Rat> = Vec::with_capacity(n);
        while out.len() < n {
            let r = self.rat();
            if !out.contains(&r) {
                out.push(r);
            }
        }
        out
    }
}

fn is_pole(e: &Error) -> bool {
    matches!(e, Error::PoleHit(_) | Error::PoleAtQ(_) | Error::DivisionByZero | Error::Singular)
}

/// Runs `f` on fresh samples until it avoids every pole, up to `tries` times.
pub fn with_retries<T, F>(s: &mut Sampler, tries: usize, mut f: F) -> Result<T>
where
    F: FnMut(&mut Sampler) -> Result<T>,
{
    let mut last = None;
    for _ in 0..tries {
        match f(s) {
            Err(e) if is_pole(&e) => last = Some(e),
            other => return other,
        }
    }
    Err(last.unwrap_or(Error::Singular))
}
