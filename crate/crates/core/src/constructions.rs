//! Generators for extremal colorings and a seeded sampler of random Gallai
//! colorings.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{Color, ColoredCompleteGraph, ModelError, MAX_COLORS};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("half-length parameter m = {0} must be at least 2")]
    HalfLength(usize),
    #[error("color count k = {0} out of range 1..={MAX_COLORS}")]
    Colors(usize),
    #[error("m * 2^k overflows or exceeds the vertex limit {limit}")]
    TooLarge { limit: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Half-length `m` of the odd cycle `C_{2m+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OddCycleParam(usize);

impl OddCycleParam {
    pub fn new(m: usize) -> Result<Self, ConstructionError> {
        if m < 2 {
            Err(ConstructionError::HalfLength(m))
        } else {
            Ok(Self(m))
        }
    }

    pub fn m(self) -> usize {
        self.0
    }

    pub fn cycle_len(self) -> usize {
        2 * self.0 + 1
    }
}

/// `K_{4m}` split into two halves of `2m`: color 1 inside halves, color 2
/// across. Neither class contains `C_{2m+1}`.
pub fn odd_cycle_two_color_extremal(m: OddCycleParam) -> ColoredCompleteGraph {
    let half = 2 * m.m();
    ColoredCompleteGraph::from_fn(2 * half, 2, |i, j| if (i < half) == (j < half) { 1 } else { 2 })
        .expect("valid dimensions")
}

/// Upper bound on the vertex count of [`gallai_lower_bound`].
pub const CONSTRUCTION_MAX_VERTICES: usize = 1 << 16;

/// Iterated doubling on `m * 2^k` vertices: a monochromatic `K_{2m}` in
/// color 1, then `k - 1` rounds of two copies joined completely, round `i`
/// in color `i`. Vertex `v` lies in base block `v / 2m`; two blocks are joined
/// in color `2 + (highest differing bit of their indices)`.
pub fn gallai_lower_bound(m: OddCycleParam, k: usize) -> Result<ColoredCompleteGraph, ConstructionError> {
    if k == 0 || k > MAX_COLORS {
        return Err(ConstructionError::Colors(k));
    }
    let block = 2 * m.m();
    let n = u32::try_from(k - 1)
        .ok()
        .and_then(|e| 1usize.checked_shl(e))
        .and_then(|b| b.checked_mul(block))
        .filter(|&n| n <= CONSTRUCTION_MAX_VERTICES)
        .ok_or(ConstructionError::TooLarge {
            limit: CONSTRUCTION_MAX_VERTICES,
        })?;
    Ok(ColoredCompleteGraph::from_fn(n, k, |i, j| {
        let (bi, bj) = (i / block, j / block);
        if bi == bj {
            1
        } else {
            let level = usize::BITS - 1 - (bi ^ bj).leading_zeros();
            (level + 2) as Color
        }
    })?)
}

/// Knobs for [`random_gallai`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplerProfile {
    /// Mean of the part count, drawn geometrically on `2, 3, ...`.
    pub mean_parts: f64,
    /// Part counts are truncated to `2..=min(size, max_parts)`.
    pub max_parts: usize,
    /// Apply a random relabeling to the finished coloring.
    pub shuffle_labels: bool,
}

impl Default for SamplerProfile {
    fn default() -> Self {
        Self {
            mean_parts: 3.0,
            max_parts: 8,
            shuffle_labels: true,
        }
    }
}

/// Random Gallai coloring of `K_n` built by recursive random substitution.
/// Deterministic in all arguments.
pub fn random_gallai(
    n: usize,
    k: usize,
    seed: u64,
    profile: &SamplerProfile,
) -> Result<ColoredCompleteGraph, ConstructionError> {
    if k == 0 || k > MAX_COLORS {
        return Err(ConstructionError::Colors(k));
    }
    if n == 0 {
        return Err(ModelError::NoVertices.into());
    }
    let mut matrix = vec![0 as Color; n * n];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_block(&mut rng, 0, n, n, k, profile, &mut matrix);
    let mut labels: Vec<usize> = (0..n).collect();
    if profile.shuffle_labels {
        labels.shuffle(&mut rng);
    }
    Ok(ColoredCompleteGraph::from_fn(n, k, |i, j| {
        let (a, b) = (labels[i], labels[j]);
        matrix[a.min(b) * n + a.max(b)]
    })?)
}

fn sample_part_count<R: Rng>(rng: &mut R, size: usize, profile: &SamplerProfile) -> usize {
    let upper = size.min(profile.max_parts.max(2));
    if upper <= 2 {
        return 2;
    }
    // failures before the first success, success probability 1 / (mean - 1)
    let success = (1.0 / (profile.mean_parts - 1.0).max(1.0)).clamp(f64::MIN_POSITIVE, 1.0);
    loop {
        let mut p = 2;
        while p <= upper && !rng.random_bool(success) {
            p += 1;
        }
        if p <= upper {
            return p;
        }
    }
}

fn sample_block<R: Rng>(
    rng: &mut R,
    offset: usize,
    size: usize,
    n: usize,
    k: usize,
    profile: &SamplerProfile,
    matrix: &mut [Color],
) {
    if size < 2 {
        return;
    }
    let p = sample_part_count(rng, size, profile);
    let mut sizes = vec![1usize; p];
    for _ in 0..size - p {
        sizes[rng.random_range(0..p)] += 1;
    }
    let a = rng.random_range(1..=k) as Color;
    let b = if k == 1 {
        a
    } else {
        let mut b = rng.random_range(1..k) as Color;
        if b >= a {
            b += 1;
        }
        b
    };
    let mut starts = Vec::with_capacity(p + 1);
    let mut at = offset;
    for &s in &sizes {
        starts.push(at);
        at += s;
    }
    starts.push(at);
    for x in 0..p {
        for y in (x + 1)..p {
            let c = if rng.random_bool(0.5) { a } else { b };
            for u in starts[x]..starts[x + 1] {
                for v in starts[y]..starts[y + 1] {
                    matrix[u * n + v] = c;
                }
            }
        }
    }
    for x in 0..p {
        let sub_seed: u64 = rng.random();
        let mut sub = ChaCha8Rng::seed_from_u64(sub_seed);
        sample_block(&mut sub, starts[x], sizes[x], n, k, profile, matrix);
    }
}
