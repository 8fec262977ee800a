//! Multivariate block James-Stein shrinkage of detail coefficients.
//!
//! Each detail subband is tiled by axis-aligned hypercubes. A block `B` with
//! `|B|` coefficients and energy `S^2` is multiplied by
//! `(1 - lambda* |B| / (4 h(0)^2 n S^2))_+`, where `lambda*` solves
//! `lambda - ln(lambda) = 3`. Scaling coefficients pass through untouched.

use std::sync::OnceLock;

use crate::wavelet::{CoefficientPyramid, PyramidShape};

/// Solves `lambda - ln(lambda) = 3` on `(1, 10]` by bisection.
pub fn solve_lambda_star() -> f64 {
    let residual = |x: f64| x - x.ln() - 3.0;
    let (mut lo, mut hi) = (1.0f64, 10.0f64);
    while hi - lo > f64::EPSILON * hi {
        let mid = 0.5 * (lo + hi);
        if residual(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if residual(lo).abs() <= residual(hi).abs() {
        lo
    } else {
        hi
    }
}

/// Cached [`solve_lambda_star`].
pub fn lambda_star() -> f64 {
    static LAMBDA: OnceLock<f64> = OnceLock::new();
    *LAMBDA.get_or_init(solve_lambda_star)
}

/// Default target block cardinality `max(1, floor(ln n))`.
pub fn default_block_cardinality(n: usize) -> usize {
    ((n as f64).ln().floor() as usize).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShrinkageConfig {
    pub lambda_star: f64,
    /// Target block cardinality `L`.
    pub block_cardinality: usize,
    /// Total sample size.
    pub n: usize,
    /// `h(0)^{-2}`, estimated or known.
    pub h_inv_sq: f64,
}

impl ShrinkageConfig {
    pub fn new(n: usize, h_inv_sq: f64, block_cardinality: Option<usize>) -> Self {
        ShrinkageConfig {
            lambda_star: lambda_star(),
            block_cardinality: block_cardinality
                .unwrap_or_else(|| default_block_cardinality(n))
                .max(1),
            n,
            h_inv_sq,
        }
    }

    /// Shrinkage factor of a block with `cardinality` coefficients and
    /// energy `energy`; a block without energy is zeroed.
    pub fn factor(&self, cardinality: usize, energy: f64) -> f64 {
        if !(energy > 0.0) {
            return 0.0;
        }
        let threshold = self.lambda_star * cardinality as f64 * self.h_inv_sq;
        (1.0 - threshold / (4.0 * self.n as f64 * energy)).max(0.0)
    }
}

/// Axis-aligned hyper-rectangle of coefficient positions inside a subband.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub origin: Vec<usize>,
    pub extent: Vec<usize>,
}

impl Block {
    pub fn cardinality(&self) -> usize {
        self.extent.iter().product()
    }

    /// Flat row-major positions inside a subband of side `side`.
    pub fn positions(&self, side: usize) -> impl Iterator<Item = usize> + '_ {
        let q = self.extent.len();
        let mut digits = vec![0usize; q];
        (0..self.cardinality()).map(move |_| {
            let flat = digits
                .iter()
                .zip(&self.origin)
                .fold(0, |acc, (&d, &o)| acc * side + o + d);
            for (d, &e) in digits.iter_mut().zip(&self.extent).rev() {
                *d += 1;
                if *d < e {
                    break;
                }
                *d = 0;
            }
            flat
        })
    }
}

/// Block tiling of every detail subband of a pyramid shape.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPartition {
    pub shape: PyramidShape,
    /// Side of a full hypercube block, `max(1, floor(L^{1/q}))`.
    pub block_side: usize,
    /// `per_level[j - j0]`; every subband of a level shares the tiling.
    per_level: Vec<Vec<Block>>,
}

impl BlockPartition {
    pub fn blocks(&self, j: u32, _subband: usize) -> &[Block] {
        &self.per_level[(j - self.shape.j0) as usize]
    }

    pub fn block_count(&self) -> usize {
        self.per_level.iter().map(Vec::len).sum::<usize>() * self.shape.subbands()
    }
}

fn hypercube_side(cardinality: usize, q: usize) -> usize {
    let mut side = 1usize;
    while (side + 1)
        .checked_pow(q as u32)
        .is_some_and(|c| c <= cardinality)
    {
        side += 1;
    }
    side
}

pub fn partition_blocks(shape: PyramidShape, config: &ShrinkageConfig) -> BlockPartition {
    let q = shape.q;
    let target = config.block_cardinality.max(1);
    let block_side = hypercube_side(target, q);
    let per_level = shape
        .detail_levels()
        .map(|j| {
            let side = 1usize << j;
            if side.pow(q as u32) <= target {
                return vec![Block {
                    origin: vec![0; q],
                    extent: vec![side; q],
                }];
            }
            let starts: Vec<usize> = (0..side).step_by(block_side).collect();
            let mut blocks = Vec::with_capacity(starts.len().pow(q as u32));
            let mut digits = vec![0usize; q];
            loop {
                let origin: Vec<usize> = digits.iter().map(|&d| starts[d]).collect();
                let extent = origin.iter().map(|&o| block_side.min(side - o)).collect();
                blocks.push(Block { origin, extent });
                let mut carried = true;
                for d in digits.iter_mut().rev() {
                    *d += 1;
                    if *d < starts.len() {
                        carried = false;
                        break;
                    }
                    *d = 0;
                }
                if carried {
                    break;
                }
            }
            blocks
        })
        .collect();
    BlockPartition {
        shape,
        block_side,
        per_level,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelDiagnostics {
    pub level: u32,
    pub blocks: usize,
    pub zeroed: usize,
}

/// What the shrinkage rule did to the detail coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkageDiagnostics {
    pub levels: Vec<LevelDiagnostics>,
    /// Counts of block factors in `[0, 0.1), [0.1, 0.2), ..., [0.9, 1]`.
    pub factor_histogram: [usize; 10],
    pub min_factor: f64,
    pub max_factor: f64,
    pub mean_factor: f64,
}

impl ShrinkageDiagnostics {
    pub fn zeroed_blocks(&self) -> usize {
        self.levels.iter().map(|l| l.zeroed).sum()
    }

    pub fn total_blocks(&self) -> usize {
        self.levels.iter().map(|l| l.blocks).sum()
    }
}

pub fn shrink(
    pyramid: &CoefficientPyramid,
    partition: &BlockPartition,
    config: &ShrinkageConfig,
) -> CoefficientPyramid {
    shrink_with_diagnostics(pyramid, partition, config).0
}

pub fn shrink_with_diagnostics(
    pyramid: &CoefficientPyramid,
    partition: &BlockPartition,
    config: &ShrinkageConfig,
) -> (CoefficientPyramid, ShrinkageDiagnostics) {
    assert_eq!(
        pyramid.shape(),
        partition.shape,
        "block partition built for a different pyramid"
    );
    let mut out = pyramid.clone();
    let mut histogram = [0usize; 10];
    let (mut min_factor, mut max_factor, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
    let mut levels = Vec::new();
    for j in pyramid.shape().detail_levels() {
        let side = 1usize << j;
        let mut level = LevelDiagnostics {
            level: j,
            blocks: 0,
            zeroed: 0,
        };
        for i in 1..=pyramid.shape().subbands() {
            let band = out.subband_mut(j, i);
            for block in partition.blocks(j, i) {
                let energy: f64 = block.positions(side).map(|p| band[p] * band[p]).sum();
                let factor = config.factor(block.cardinality(), energy);
                for p in block.positions(side) {
                    band[p] *= factor;
                }
                level.blocks += 1;
                if factor == 0.0 {
                    level.zeroed += 1;
                }
                histogram[((factor * 10.0) as usize).min(9)] += 1;
                min_factor = min_factor.min(factor);
                max_factor = max_factor.max(factor);
                sum += factor;
            }
        }
        levels.push(level);
    }
    let total: usize = levels.iter().map(|l| l.blocks).sum();
    let diagnostics = ShrinkageDiagnostics {
        levels,
        factor_histogram: histogram,
        min_factor: if total == 0 { 1.0 } else { min_factor },
        max_factor: if total == 0 { 1.0 } else { max_factor },
        mean_factor: if total == 0 { 1.0 } else { sum / total as f64 },
    };
    (out, diagnostics)
}
