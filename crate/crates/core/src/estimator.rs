//! End-to-end estimate of `f` at the bin points `l / T`.
//!
//! bin -> medians `Q` -> `Q / sqrt(V)` -> forward DWT -> BlockJS -> inverse
//! DWT -> `* sqrt(V)` -> subtract the median-bias estimate.

use crate::error::{Error, Result};
use crate::grid::{bin_observations, plan_grid, BinnedData, GridDesign};
use crate::medians::{
    bias_correction, bin_medians, estimate_noise_level, MedianSummary, NoiseEstimate, NoiseRule,
};
use crate::shrinkage::{partition_blocks, shrink_with_diagnostics, ShrinkageConfig, ShrinkageDiagnostics};
use crate::tensor::GridTensor;
use crate::wavelet::{build_filter, dwt_qd, idwt_qd, FilterName};

/// Source of `h(0)^{-2}` for the shrinkage threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseMode {
    Estimate,
    Known(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorConfig {
    pub filter: FilterName,
    /// Primary level; defaults to the smallest level covering the filter
    /// support, capped at `J - 1`.
    pub j0: Option<u32>,
    /// Target block cardinality; defaults to `floor(ln n)`.
    pub block_cardinality: Option<usize>,
    pub noise_mode: NoiseMode,
    pub noise_rule: NoiseRule,
    pub shrinkage_enabled: bool,
    pub bias_correction: bool,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            filter: FilterName::Db4,
            j0: None,
            block_cardinality: None,
            noise_mode: NoiseMode::Estimate,
            noise_rule: NoiseRule::default(),
            shrinkage_enabled: true,
            bias_correction: true,
        }
    }
}

impl EstimatorConfig {
    pub fn primary_level(&self, design: &GridDesign) -> Result<u32> {
        let levels = design.levels;
        match self.j0 {
            Some(j0) if j0 > levels => Err(Error::BadPrimaryLevel { j0, levels }),
            Some(j0) => Ok(j0),
            None => Ok(build_filter(self.filter)
                .default_primary_level()
                .min(levels.saturating_sub(1))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub design: GridDesign,
    /// Estimates at the bin points `l / T`.
    pub f_hat: GridTensor,
    pub medians: MedianSummary,
    pub b_hat: f64,
    pub noise: NoiseEstimate,
    pub j0: u32,
    pub block_cardinality: usize,
    pub diagnostics: ShrinkageDiagnostics,
}

/// Fits from a row-major `n x q` coordinate array and its responses.
pub fn fit(u: &[f64], y: &[f64], q: usize, config: &EstimatorConfig) -> Result<FitResult> {
    let design = plan_grid(y.len(), q)?;
    let binned = bin_observations(u, y, &design)?;
    fit_binned(&binned, config)
}

pub fn fit_binned(binned: &BinnedData, config: &EstimatorConfig) -> Result<FitResult> {
    let design = binned.design;
    let medians = bin_medians(binned)?;
    let b_hat = if config.bias_correction {
        bias_correction(&medians).b_hat
    } else {
        0.0
    };
    let noise = match config.noise_mode {
        NoiseMode::Estimate => estimate_noise_level(&medians, &design, config.noise_rule)?,
        NoiseMode::Known(h_inv_sq) => NoiseEstimate::known(h_inv_sq, design.n),
    };

    let j0 = config.primary_level(&design)?;
    let filter = build_filter(config.filter);
    let root_v = (design.bin_count as f64).sqrt();
    let scaled = GridTensor::from_vec(
        design.q,
        design.bins_per_axis,
        medians.full.iter().map(|&m| m / root_v).collect(),
    )?;
    let coefficients = dwt_qd(&scaled, &filter, j0)?;
    let shrink_cfg = ShrinkageConfig::new(design.n, noise.h_inv_sq, config.block_cardinality);
    let partition = partition_blocks(coefficients.shape(), &shrink_cfg);
    let (shrunk, mut diagnostics) = shrink_with_diagnostics(&coefficients, &partition, &shrink_cfg);
    let kept = if config.shrinkage_enabled {
        shrunk
    } else {
        diagnostics.levels.iter_mut().for_each(|l| l.zeroed = 0);
        diagnostics.factor_histogram = [0; 10];
        diagnostics.factor_histogram[9] = diagnostics.total_blocks();
        diagnostics.min_factor = 1.0;
        diagnostics.max_factor = 1.0;
        diagnostics.mean_factor = 1.0;
        coefficients
    };
    let g_hat = idwt_qd(&kept, &filter)?;
    if !g_hat.same_shape(&scaled) {
        return Err(Error::ShapeMismatch(
            "reconstruction does not match the bin grid".into(),
        ));
    }
    let f_hat = g_hat.map(|v| v * root_v - b_hat);

    Ok(FitResult {
        design,
        f_hat,
        medians,
        b_hat,
        noise,
        j0,
        block_cardinality: shrink_cfg.block_cardinality,
        diagnostics,
    })
}

/// One bin point `l / T` and the estimate there.
#[derive(Debug, Clone, PartialEq)]
pub struct GridValue {
    pub point: Vec<f64>,
    pub value: f64,
}

/// Lists every bin point with its estimate in lexicographic bin order.
pub fn evaluate_on_grid(result: &FitResult, design: &GridDesign) -> Result<Vec<GridValue>> {
    if result.f_hat.q() != design.q || result.f_hat.side() != design.bins_per_axis {
        return Err(Error::ShapeMismatch(format!(
            "estimate is {}^{} but the design has {}^{} bins",
            result.f_hat.side(),
            result.f_hat.q(),
            design.bins_per_axis,
            design.q
        )));
    }
    Ok(result
        .f_hat
        .as_slice()
        .iter()
        .enumerate()
        .map(|(flat, &value)| GridValue {
            point: design.bin_point(flat),
            value,
        })
        .collect())
}
