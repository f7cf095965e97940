//! Seeded random point clouds and nested pairs for fuzzing.
//!
//! Coordinates come from a small integer lattice, a quarter-step lattice or
//! a continuous range, so both heavily tied and tie-free distance sets show
//! up.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::metric::PointCloud;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoordStyle {
    /// Integers `0..=9`.
    Integer,
    /// Multiples of 0.25 in `[0, 5]`.
    Quarter,
    /// Uniform in `[0, 10)`.
    Uniform,
}

impl CoordStyle {
    fn levels(self) -> Option<usize> {
        match self {
            CoordStyle::Integer => Some(10),
            CoordStyle::Quarter => Some(21),
            CoordStyle::Uniform => None,
        }
    }

    fn sample<R: Rng>(self, rng: &mut R) -> f64 {
        match self {
            CoordStyle::Integer => rng.random_range(0..=9) as f64,
            CoordStyle::Quarter => rng.random_range(0..=20) as f64 * 0.25,
            CoordStyle::Uniform => rng.random_range(0.0..10.0),
        }
    }
}

pub fn random_cloud_styled<R: Rng>(
    rng: &mut R,
    n: usize,
    dim: usize,
    style: CoordStyle,
) -> PointCloud {
    assert!(n >= 1 && dim >= 1);
    // lattices too small for n distinct points fall back to continuous values
    let style = match style.levels() {
        Some(l) if l.checked_pow(dim as u32).is_none_or(|cap| cap >= 2 * n) => style,
        Some(_) => CoordStyle::Uniform,
        None => style,
    };
    let mut seen = HashSet::new();
    let mut rows = Vec::with_capacity(n);
    while rows.len() < n {
        let p: Vec<f64> = (0..dim).map(|_| style.sample(rng)).collect();
        let key: Vec<u64> = p.iter().map(|x| x.to_bits()).collect();
        if seen.insert(key) {
            rows.push(p);
        }
    }
    PointCloud::new(rows).expect("rows are distinct and finite")
}

pub fn random_cloud<R: Rng>(rng: &mut R, n: usize, dim: usize) -> PointCloud {
    let style = match rng.random_range(0..3) {
        0 => CoordStyle::Integer,
        1 => CoordStyle::Quarter,
        _ => CoordStyle::Uniform,
    };
    random_cloud_styled(rng, n, dim, style)
}

/// A random `size`-point sub-cloud of `cloud`, in random order.
pub fn random_subcloud<R: Rng>(rng: &mut R, cloud: &PointCloud, size: usize) -> PointCloud {
    let mut idx: Vec<usize> = (0..cloud.len()).collect();
    idx.shuffle(rng);
    let rows = idx[..size]
        .iter()
        .map(|&i| cloud.point(i).to_vec())
        .collect();
    PointCloud::new(rows).expect("subset of a valid cloud")
}

/// One nested-pair fuzz instance.
#[derive(Clone, Debug)]
pub struct FuzzCase {
    pub seed: u64,
    pub x: PointCloud,
    pub y: PointCloud,
    pub k: usize,
}

/// Draws `Y` with at most `max_points` points in dimension 1 to 3, and `X` a
/// random subset of it with room for `(k+1)`-tuples. `k` is drawn from
/// `0..=2` unless fixed.
pub fn fuzz_case(seed: u64, max_points: usize, k: Option<usize>) -> FuzzCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = k.unwrap_or_else(|| rng.random_range(0..=2));
    let dim = rng.random_range(1..=3);
    let min_points = (k + 1).max(2);
    let ny = rng.random_range(min_points..=max_points.max(min_points));
    let nx = rng.random_range(k + 1..=ny);
    let y = random_cloud(&mut rng, ny, dim);
    let x = random_subcloud(&mut rng, &y, nx);
    FuzzCase { seed, x, y, k }
}
