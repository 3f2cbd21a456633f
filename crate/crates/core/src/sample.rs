//! Deterministic sample families shared by the falsifiers and samplers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numeric::{Interval, Rational};

/// Random points are drawn from the grid `domain.lo + k * width / 2^RANDOM_GRID_BITS`.
pub const RANDOM_GRID_BITS: u32 = 20;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random grid point of `domain`.
pub fn random_point(rng: &mut ChaCha8Rng, domain: &Interval) -> Rational {
    let k: i64 = rng.gen_range(0..=(1i64 << RANDOM_GRID_BITS));
    grid_point(domain, k)
}

fn grid_point(domain: &Interval, k: i64) -> Rational {
    domain.lo() + domain.width() * Rational::from(k) * Rational::pow2(-i64::from(RANDOM_GRID_BITS))
}

/// A random pair `u < v` of grid points of `domain`. The domain must not be
/// a single point.
pub fn random_pair(rng: &mut ChaCha8Rng, domain: &Interval) -> (Rational, Rational) {
    loop {
        let a: i64 = rng.gen_range(0..=(1i64 << RANDOM_GRID_BITS));
        let b: i64 = rng.gen_range(0..=(1i64 << RANDOM_GRID_BITS));
        if a != b {
            return (grid_point(domain, a.min(b)), grid_point(domain, a.max(b)));
        }
    }
}

/// `count` subintervals of `domain`: the dyadic partition in level order
/// (the whole domain, its halves, its quarters, ...) interleaved with
/// seeded random pairs. Empty when the domain is a point.
pub fn subinterval_family(domain: &Interval, count: usize, seed: u64) -> Vec<(Rational, Rational)> {
    if domain.is_point() {
        return Vec::new();
    }
    let mut rng = rng(seed);
    let mut dyadic = DyadicLevels::new(domain.clone());
    (0..count)
        .map(|i| {
            if i % 2 == 0 {
                dyadic.next().expect("infinite")
            } else {
                random_pair(&mut rng, domain)
            }
        })
        .collect()
}

/// The dyadic partition of an interval, level by level.
pub struct DyadicLevels {
    domain: Interval,
    level: u32,
    index: u64,
}

impl DyadicLevels {
    pub fn new(domain: Interval) -> Self {
        DyadicLevels {
            domain,
            level: 0,
            index: 0,
        }
    }
}

impl Iterator for DyadicLevels {
    type Item = (Rational, Rational);

    fn next(&mut self) -> Option<Self::Item> {
        let step = self.domain.width() * Rational::pow2(-i64::from(self.level));
        let u = self.domain.lo() + &step * Rational::from(self.index as i64);
        let v = &u + &step;
        self.index += 1;
        if self.index == 1u64 << self.level {
            self.level += 1;
            self.index = 0;
        }
        Some((u, v))
    }
}
