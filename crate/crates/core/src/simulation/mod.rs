//! Monte Carlo harness for the partial linear model
//! `Y = X' beta + f(U) + xi` on a complete equispaced grid.
//!
//! Every replication draws from its own ChaCha stream derived from
//! `(seed, n, replication)`, so results do not depend on scheduling.

mod distributions;
mod functions;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use distributions::{
    sample_elliptical, DesignDist, EllipticalFamily, EllipticalSampler, ErrorDist,
};
pub use functions::TestFunction;

use crate::error::{Error, Result};
use crate::estimator::{fit_binned, EstimatorConfig};
use crate::grid::{bin_observations, plan_grid, GridDesign};
use crate::medians::median_in_place;
use crate::tensor::GridTensor;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub q: usize,
    /// Dimension of the linear covariate `X`.
    pub p: usize,
    pub beta: Vec<f64>,
    pub design_dist: DesignDist,
    pub error_dist: ErrorDist,
    pub test_function: TestFunction,
    pub sample_sizes: Vec<usize>,
    pub replications: usize,
    pub seed: u64,
    /// Optional point for the pointwise risk series.
    pub u0: Option<Vec<f64>>,
}

impl SimulationConfig {
    pub fn new(q: usize, error_dist: ErrorDist, sample_sizes: Vec<usize>) -> Self {
        SimulationConfig {
            q,
            p: 0,
            beta: Vec::new(),
            design_dist: DesignDist::None,
            error_dist,
            test_function: TestFunction::ProductSine,
            sample_sizes,
            replications: 30,
            seed: 0,
            u0: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.q == 0 {
            return Err(Error::bad_value("q", "must be positive"));
        }
        if self.replications == 0 {
            return Err(Error::bad_value("replications", "must be at least 1"));
        }
        if self.sample_sizes.is_empty() {
            return Err(Error::bad_value("sample_sizes", "at least one sample size is required"));
        }
        for &n in &self.sample_sizes {
            plan_grid(n, self.q).map_err(|e| Error::bad_value("sample_sizes", e.to_string()))?;
        }
        if self.beta.len() != self.p {
            return Err(Error::bad_value(
                "beta",
                format!("expected {} coefficients, got {}", self.p, self.beta.len()),
            ));
        }
        if self.p > 0 && self.design_dist != DesignDist::None {
            self.design_sampler()?;
        }
        self.error_dist.validate()?;
        if let Some(u0) = &self.u0 {
            if u0.len() != self.q || u0.iter().any(|x| !(0.0..=1.0).contains(x)) {
                return Err(Error::bad_value("u0", format!("must be a point of [0, 1]^{}", self.q)));
            }
        }
        Ok(())
    }

    /// True when the responses carry no `X' beta` term.
    pub fn has_linear_part(&self) -> bool {
        self.p > 0 && self.design_dist != DesignDist::None && self.beta.iter().any(|&b| b != 0.0)
    }

    fn design_sampler(&self) -> Result<Option<EllipticalSampler>> {
        match &self.design_dist {
            DesignDist::None => Ok(None),
            _ if self.p == 0 => Ok(None),
            DesignDist::Elliptical { family, covariance } => {
                let sigma = match covariance {
                    Some(rows) => {
                        if rows.len() != self.p || rows.iter().any(|r| r.len() != self.p) {
                            return Err(Error::BadCovariance);
                        }
                        DMatrix::from_fn(self.p, self.p, |i, j| rows[i][j])
                    }
                    None => DMatrix::identity(self.p, self.p),
                };
                EllipticalSampler::new(*family, &sigma).map(Some)
            }
        }
    }

    /// Rate exponent `-2 alpha / (2 alpha + q)` for the nominal smoothness.
    pub fn target_slope(&self) -> f64 {
        let alpha = self.test_function.nominal_alpha();
        if alpha.is_infinite() {
            -1.0
        } else {
            -2.0 * alpha / (2.0 * alpha + self.q as f64)
        }
    }

    /// Warnings for nominal smoothness outside the range the rate results cover.
    pub fn smoothness_warnings(&self) -> Vec<String> {
        let alpha = self.test_function.nominal_alpha();
        let q = self.q as f64;
        let mut out = Vec::new();
        if alpha.is_finite() {
            if alpha <= q / 6.0 {
                out.push(format!("nominal alpha {alpha} does not exceed q/6 = {:.3}", q / 6.0));
            }
            let d = (alpha - q / 2.0).min(1.0);
            let rate = 2.0 * alpha / (2.0 * alpha + q);
            if 3.0 * d / (2.0 * q) <= rate {
                out.push(format!(
                    "3d/(2q) = {:.3} does not exceed 2alpha/(2alpha+q) = {rate:.3} (d from s = 2)",
                    3.0 * d / (2.0 * q)
                ));
            }
        }
        out
    }
}

/// One simulated sample on the full grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub design: GridDesign,
    /// Row-major `n x q` coordinates in lexicographic grid order.
    pub u: Vec<f64>,
    pub y: Vec<f64>,
    /// `f(U)` per observation.
    pub signal: Vec<f64>,
    /// `f` at the bin points `l / T`.
    pub truth: GridTensor,
}

impl Dataset {
    /// FNV-1a over the response bit patterns.
    pub fn checksum(&self) -> u64 {
        self.y.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, v| {
            v.to_bits()
                .to_le_bytes()
                .iter()
                .fold(h, |h, &b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
        })
    }
}

/// `f` evaluated at every bin point of a design.
pub fn truth_on_bins(f: TestFunction, design: &GridDesign) -> GridTensor {
    let t = design.bins_per_axis as f64;
    GridTensor::from_fn(design.q, design.bins_per_axis, |d| {
        let u: Vec<f64> = d.iter().map(|&l| (l + 1) as f64 / t).collect();
        f.evaluate(&u)
    })
}

pub fn generate_dataset<R: rand::Rng + ?Sized>(
    config: &SimulationConfig,
    n: usize,
    rng: &mut R,
) -> Result<Dataset> {
    let design = plan_grid(n, config.q)?;
    let sampler = config.design_sampler()?;
    let beta = DVector::from_column_slice(&config.beta);
    let u = design.grid_coordinates();
    let mut y = Vec::with_capacity(n);
    let mut signal = Vec::with_capacity(n);
    for point in u.chunks_exact(config.q) {
        let f = config.test_function.evaluate(point);
        let linear = match &sampler {
            Some(s) => s.sample(rng).dot(&beta),
            None => 0.0,
        };
        let xi = config.error_dist.sample(rng);
        signal.push(f);
        y.push(f + linear + xi);
    }
    Ok(Dataset {
        design,
        u,
        y,
        signal,
        truth: truth_on_bins(config.test_function, &design),
    })
}

/// Grid average of squared differences.
pub fn mise(f_hat: &GridTensor, f_true: &GridTensor) -> Result<f64> {
    if !f_hat.same_shape(f_true) {
        return Err(Error::ShapeMismatch(format!(
            "{}^{} vs {}^{}",
            f_hat.side(),
            f_hat.q(),
            f_true.side(),
            f_true.q()
        )));
    }
    let sum: f64 = f_hat
        .as_slice()
        .iter()
        .zip(f_true.as_slice())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(sum / f_hat.len() as f64)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent stream for replication `index` at sample size `n`.
pub fn replication_rng(seed: u64, n: usize, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(splitmix(splitmix(n as u64) ^ index as u64));
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationOutcome {
    pub mise: f64,
    /// Squared error at the bin containing `u0`, when configured.
    pub pointwise: Option<f64>,
    pub checksum: u64,
    pub h_inv_sq: f64,
    pub b_hat: f64,
    pub max_abs_response: f64,
    pub max_abs_median: f64,
    /// `mean(f_hat) - mean(f)` over the bin points.
    pub mean_offset: f64,
}

pub fn run_replication(
    sim: &SimulationConfig,
    est: &EstimatorConfig,
    n: usize,
    index: usize,
) -> Result<ReplicationOutcome> {
    let mut rng = replication_rng(sim.seed, n, index);
    let data = generate_dataset(sim, n, &mut rng)?;
    let binned = bin_observations(&data.u, &data.y, &data.design)?;
    let fit = fit_binned(&binned, est)?;
    let pointwise = sim.u0.as_ref().map(|u0| {
        let flat = data.design.bin_of_point(u0);
        (fit.f_hat.as_slice()[flat] - data.truth.as_slice()[flat]).powi(2)
    });
    let abs_max = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mean = |t: &GridTensor| t.as_slice().iter().sum::<f64>() / t.len() as f64;
    Ok(ReplicationOutcome {
        mise: mise(&fit.f_hat, &data.truth)?,
        pointwise,
        checksum: data.checksum(),
        h_inv_sq: fit.noise.h_inv_sq,
        b_hat: fit.b_hat,
        max_abs_response: abs_max(&data.y),
        max_abs_median: abs_max(&fit.medians.full),
        mean_offset: mean(&fit.f_hat) - mean(&data.truth),
    })
}

/// Runs `sim.replications` replications at `n` in parallel, in index order.
pub fn run_replications(
    sim: &SimulationConfig,
    est: &EstimatorConfig,
    n: usize,
) -> Result<Vec<ReplicationOutcome>> {
    (0..sim.replications)
        .into_par_iter()
        .map(|i| run_replication(sim, est, n, i))
        .collect()
}

/// Mean and standard error of the mean.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

/// Ordinary least-squares slope of `y` on `x`.
pub fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub n: usize,
    pub mean_mise: f64,
    pub se: f64,
    pub pointwise_mean: Option<f64>,
    pub pointwise_se: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateStudyReport {
    pub rows: Vec<RateRow>,
    /// OLS slope of `ln(mean MISE)` on `ln(n)`.
    pub slope: f64,
    pub pointwise_slope: Option<f64>,
    pub target_slope: f64,
    pub warnings: Vec<String>,
}

pub fn rate_study(sim: &SimulationConfig, est: &EstimatorConfig) -> Result<RateStudyReport> {
    sim.validate()?;
    if sim.sample_sizes.len() < 3 {
        return Err(Error::bad_value("sample_sizes", "a rate study needs at least 3 sample sizes"));
    }
    if sim.replications < 10 {
        return Err(Error::bad_value("replications", "a rate study needs at least 10 replications"));
    }
    let mut rows = Vec::with_capacity(sim.sample_sizes.len());
    for &n in &sim.sample_sizes {
        let outcomes = run_replications(sim, est, n)?;
        let mises: Vec<f64> = outcomes.iter().map(|o| o.mise).collect();
        let (mean_mise, se) = mean_and_se(&mises);
        let (pointwise_mean, pointwise_se) = if sim.u0.is_some() {
            let pw: Vec<f64> = outcomes.iter().filter_map(|o| o.pointwise).collect();
            let (m, s) = mean_and_se(&pw);
            (Some(m), Some(s))
        } else {
            (None, None)
        };
        rows.push(RateRow {
            n,
            mean_mise,
            se,
            pointwise_mean,
            pointwise_se,
        });
    }
    let log_n: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
    let log_mise: Vec<f64> = rows.iter().map(|r| r.mean_mise.ln()).collect();
    let pointwise_slope = sim.u0.as_ref().map(|_| {
        let log_pw: Vec<f64> = rows.iter().map(|r| r.pointwise_mean.unwrap().ln()).collect();
        ols_slope(&log_n, &log_pw)
    });
    Ok(RateStudyReport {
        slope: ols_slope(&log_n, &log_mise),
        pointwise_slope,
        target_slope: sim.target_slope(),
        warnings: sim.smoothness_warnings(),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingOutcome {
    /// Sample variance of `sqrt(4 kappa) h(0) median`.
    pub variance: f64,
    pub mean: f64,
    pub mean_se: f64,
    /// Variance of the normal coupling, 1.
    pub target: f64,
}

/// Compares sample medians of `kappa` errors with their normal coupling
/// `N(0, 1 / (4 kappa h(0)^2))`.
pub fn coupling_check<R: rand::Rng + ?Sized>(
    error_dist: ErrorDist,
    kappa: usize,
    repetitions: usize,
    rng: &mut R,
) -> Result<CouplingOutcome> {
    if kappa.is_multiple_of(2) {
        return Err(Error::bad_value("kappa", "must be odd"));
    }
    if repetitions < 2 {
        return Err(Error::bad_value("repetitions", "need at least 2 repetitions"));
    }
    let h0 = error_dist.density_at_zero()?;
    let scale = (4.0 * kappa as f64).sqrt() * h0;
    let mut buf = vec![0.0; kappa];
    let normalized: Vec<f64> = (0..repetitions)
        .map(|_| {
            buf.iter_mut().for_each(|v| *v = error_dist.sample(rng));
            scale * median_in_place(&mut buf)
        })
        .collect();
    let (mean, mean_se) = mean_and_se(&normalized);
    let k = repetitions as f64;
    let variance = normalized.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    Ok(CouplingOutcome {
        variance,
        mean,
        mean_se,
        target: 1.0,
    })
}
