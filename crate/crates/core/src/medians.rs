//! Bin medians, the half-bin bias correction and the noise-level estimate.

use crate::error::{Error, Result};
use crate::grid::{BinnedData, GridDesign};

/// Floor applied to a vanishing `h(0)^{-2}` estimate.
pub const NOISE_FLOOR: f64 = 1e-12;

/// Median of the chi-square distribution with one degree of freedom,
/// `Phi^{-1}(3/4)^2`.
pub const CHI2_1_MEDIAN: f64 = 0.454_936_423_119_572_8;

/// Sample median; even counts average the two middle order statistics.
pub fn sample_median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyBin {
            kind: "sample",
            index: 0,
        });
    }
    let mut buf = values.to_vec();
    Ok(median_in_place(&mut buf))
}

/// Median of a nonempty buffer, reordering it.
pub(crate) fn median_in_place(buf: &mut [f64]) -> f64 {
    let len = buf.len();
    let k = len / 2;
    let (lower, upper, _) = buf.select_nth_unstable_by(k, f64::total_cmp);
    let upper = *upper;
    if len % 2 == 1 {
        upper
    } else {
        let lower = lower.iter().copied().max_by(f64::total_cmp).unwrap();
        0.5 * (lower + upper)
    }
}

/// Medians of every bin (`Q_l`) and of every lower half-bin (`Q*_l`).
#[derive(Debug, Clone, PartialEq)]
pub struct MedianSummary {
    pub full: Vec<f64>,
    pub half: Vec<f64>,
}

pub fn bin_medians(data: &BinnedData) -> Result<MedianSummary> {
    let medians = |groups: &[Vec<f64>], kind: &'static str| -> Result<Vec<f64>> {
        groups
            .iter()
            .enumerate()
            .map(|(index, g)| {
                if g.is_empty() {
                    Err(Error::EmptyBin { kind, index })
                } else {
                    Ok(median_in_place(&mut g.clone()))
                }
            })
            .collect()
    };
    Ok(MedianSummary {
        full: medians(&data.bins, "bin")?,
        half: medians(&data.halfbins, "half-bin")?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasEstimate {
    pub b_hat: f64,
}

/// Global median-bias estimate: the average over all bins of `Q*_l - Q_l`.
pub fn bias_correction(medians: &MedianSummary) -> BiasEstimate {
    let sum: f64 = medians
        .half
        .iter()
        .zip(&medians.full)
        .map(|(h, f)| h - f)
        .sum();
    BiasEstimate {
        b_hat: sum / medians.full.len() as f64,
    }
}

/// How paired differences of neighbouring bin medians are aggregated into an
/// estimate of `h(0)^{-2}`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum NoiseRule {
    /// `2 kappa median_k(D_k^2) / median(chi2_1)`. Robust to the heavy
    /// tails that the median of a small bin still has under Cauchy noise.
    #[default]
    PairedMedian,
    /// `2 kappa mean_k(D_k^2)`.
    PairedMean,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseEstimate {
    /// Estimate of `h(0)^{-2}`.
    pub h_inv_sq: f64,
    /// Coefficient noise level `1 / (2 h(0) sqrt(n))`.
    pub sigma: f64,
    /// Set when the raw estimate fell below [`NOISE_FLOOR`] and was clamped.
    pub degenerate: bool,
}

impl NoiseEstimate {
    /// Noise estimate from a known value of `h(0)^{-2}`.
    pub fn known(h_inv_sq: f64, n: usize) -> Self {
        Self::from_raw(h_inv_sq, n)
    }

    fn from_raw(raw: f64, n: usize) -> Self {
        let degenerate = !(raw >= NOISE_FLOOR);
        let h_inv_sq = if degenerate { NOISE_FLOOR } else { raw };
        NoiseEstimate {
            h_inv_sq,
            sigma: h_inv_sq.sqrt() / (2.0 * (n as f64).sqrt()),
            degenerate,
        }
    }
}

/// Estimates `h(0)^{-2}` from differences `D_k = Q_{2k-1} - Q_{2k}` of
/// lexicographically consecutive bin medians.
///
/// `Var(Q_l) ~ 1 / (4 kappa h(0)^2)`, so `D_k` is roughly centred normal with
/// variance `1 / (2 kappa h(0)^2)` once differences of `f` are negligible.
pub fn estimate_noise_level(
    medians: &MedianSummary,
    design: &GridDesign,
    rule: NoiseRule,
) -> Result<NoiseEstimate> {
    let q = &medians.full;
    if q.len() < 2 {
        return Err(Error::BadShape(
            "noise estimation needs at least two bins".into(),
        ));
    }
    let mut squares: Vec<f64> = q
        .chunks_exact(2)
        .map(|pair| (pair[0] - pair[1]).powi(2))
        .collect();
    let kappa = design.kappa as f64;
    let raw = match rule {
        NoiseRule::PairedMean => {
            2.0 * kappa * squares.iter().sum::<f64>() / squares.len() as f64
        }
        NoiseRule::PairedMedian => 2.0 * kappa * median_in_place(&mut squares) / CHI2_1_MEDIAN,
    };
    Ok(NoiseEstimate::from_raw(raw, design.n))
}
