use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const ORTHONORMALITY_TOL: f64 = 1e-12;
const MOMENT_TOL: f64 = 1e-10;

/// Daubechies extremal-phase filters supported by the estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FilterName {
    Haar,
    Db2,
    Db4,
}

impl FilterName {
    pub const ALL: [FilterName; 3] = [FilterName::Haar, FilterName::Db2, FilterName::Db4];

    pub fn as_str(self) -> &'static str {
        match self {
            FilterName::Haar => "haar",
            FilterName::Db2 => "db2",
            FilterName::Db4 => "db4",
        }
    }
}

impl fmt::Display for FilterName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FilterName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "haar" | "db1" => Ok(FilterName::Haar),
            "db2" => Ok(FilterName::Db2),
            "db4" => Ok(FilterName::Db4),
            _ => Err(Error::UnknownFilter(s.to_owned())),
        }
    }
}

// 50-digit spectral factorisation, rounded to double.
const DB4: [f64; 8] = [
    0.230_377_813_308_896_500_86,
    0.714_846_570_552_915_647_09,
    0.630_880_767_929_858_907_88,
    -0.027_983_769_416_859_854_211,
    -0.187_034_811_719_093_084_08,
    0.030_841_381_835_560_763_627,
    0.032_883_011_666_885_199_735,
    -0.010_597_401_785_069_032_105,
];

/// Orthonormal quadrature-mirror pair.
///
/// The high-pass taps are `g_k = (-1)^k h_{L-1-k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletFilter {
    pub name: FilterName,
    pub scaling: Vec<f64>,
    pub wavelet: Vec<f64>,
    pub vanishing_moments: u32,
}

impl WaveletFilter {
    pub fn len(&self) -> usize {
        self.scaling.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scaling.is_empty()
    }

    /// Smallest level whose dyadic length covers the filter support.
    pub fn default_primary_level(&self) -> u32 {
        self.len().next_power_of_two().trailing_zeros()
    }

    fn from_scaling(name: FilterName, scaling: Vec<f64>, vanishing_moments: u32) -> Self {
        let last = scaling.len() - 1;
        let wavelet = (0..scaling.len())
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * scaling[last - k]
            })
            .collect();
        WaveletFilter {
            name,
            scaling,
            wavelet,
            vanishing_moments,
        }
    }

    /// Checks orthonormality, normalisation and vanishing moments.
    pub fn verify(&self) -> std::result::Result<(), String> {
        let h = &self.scaling;
        let sum: f64 = h.iter().sum();
        if (sum - SQRT_2).abs() > ORTHONORMALITY_TOL {
            return Err(format!("sum of scaling taps is {sum}"));
        }
        for shift in 0..h.len().div_ceil(2) {
            let dot: f64 = h
                .iter()
                .zip(h.iter().skip(2 * shift))
                .map(|(a, b)| a * b)
                .sum();
            let expected = if shift == 0 { 1.0 } else { 0.0 };
            if (dot - expected).abs() > ORTHONORMALITY_TOL {
                return Err(format!("shift {shift} autocorrelation is {dot}"));
            }
        }
        for p in 0..self.vanishing_moments {
            let moment: f64 = self
                .wavelet
                .iter()
                .enumerate()
                .map(|(k, g)| (k as f64).powi(p as i32) * g)
                .sum();
            if moment.abs() > MOMENT_TOL {
                return Err(format!("moment {p} of the wavelet is {moment}"));
            }
        }
        Ok(())
    }
}

pub fn build_filter(name: FilterName) -> WaveletFilter {
    let filter = match name {
        FilterName::Haar => {
            WaveletFilter::from_scaling(name, vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2], 1)
        }
        FilterName::Db2 => {
            let s3 = 3f64.sqrt();
            let c = 4.0 * SQRT_2;
            WaveletFilter::from_scaling(
                name,
                vec![(1.0 + s3) / c, (3.0 + s3) / c, (3.0 - s3) / c, (1.0 - s3) / c],
                2,
            )
        }
        FilterName::Db4 => WaveletFilter::from_scaling(name, DB4.to_vec(), 4),
    };
    debug_assert_eq!(filter.verify(), Ok(()));
    filter
}

/// Looks a filter up by its textual name.
pub fn build_filter_named(name: &str) -> Result<WaveletFilter> {
    name.parse().map(build_filter)
}
