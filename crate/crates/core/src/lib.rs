//! Robust, adaptive estimation of the nonparametric component of a
//! multivariate partial linear model `Y = X' beta + f(U) + xi`.
//!
//! Observations on an equispaced grid in `[0, 1]^q` are pooled into `T^q`
//! dyadic bins. Bin medians are insensitive to heavy-tailed `X' beta + xi`,
//! and behave like `f` plus Gaussian noise of variance `1 / (4 kappa h(0)^2)`.
//! A tensor-product wavelet transform of the medians is denoised with a
//! block James-Stein rule, inverted, and shifted by a half-bin estimate of the
//! median bias.
//!
//! ```no_run
//! use medshrink::estimator::{fit, EstimatorConfig};
//! use medshrink::grid::plan_grid;
//!
//! let design = plan_grid(4096, 2).unwrap();
//! let u = design.grid_coordinates();
//! let y: Vec<f64> = u.chunks(2).map(|p| (p[0] * 6.0).sin()).collect();
//! let result = fit(&u, &y, 2, &EstimatorConfig::default()).unwrap();
//! println!("{} bins, b_hat = {}", result.f_hat.len(), result.b_hat);
//! ```

pub mod config;
pub mod error;
pub mod estimator;
pub mod grid;
pub mod io;
pub mod medians;
pub mod shrinkage;
pub mod simulation;
pub mod tensor;
pub mod wavelet;

pub use error::{Error, Result};
pub use estimator::{evaluate_on_grid, fit, EstimatorConfig, FitResult, NoiseMode};
pub use grid::{bin_observations, plan_grid, BinnedData, GridDesign};
pub use tensor::GridTensor;
