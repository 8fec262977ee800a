#![allow(dead_code)]

pub mod oracle;
pub mod properties;

use medshrink::tensor::GridTensor;
use medshrink::wavelet::{build_filter, dwt_qd, idwt_qd, FilterName};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Worst-case errors of one transform configuration over every `j0`.
#[derive(Debug, Clone)]
pub struct TransformCheck {
    pub q: usize,
    pub side: usize,
    pub filter: FilterName,
    pub round_trip: f64,
    pub parseval: f64,
    /// `None` when the tensor is too large for the dense oracle.
    pub oracle: Option<f64>,
    pub oracle_orthogonality: Option<f64>,
}

pub const ORACLE_MAX_ENTRIES: usize = 64;

pub fn check_transform(q: usize, side: usize, name: FilterName, seed: u64) -> TransformCheck {
    let filter = build_filter(name);
    let levels = side.trailing_zeros();
    let len = side.pow(q as u32);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let tensor = GridTensor::from_vec(q, side, x.clone()).unwrap();
    let energy: f64 = x.iter().map(|v| v * v).sum();

    let mut out = TransformCheck {
        q,
        side,
        filter: name,
        round_trip: 0.0,
        parseval: 0.0,
        oracle: None,
        oracle_orthogonality: None,
    };
    for j0 in 0..=levels {
        let pyr = dwt_qd(&tensor, &filter, j0).unwrap();
        let back = idwt_qd(&pyr, &filter).unwrap();
        let rt = back
            .as_slice()
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        out.round_trip = out.round_trip.max(rt);
        out.parseval = out.parseval.max((pyr.energy() - energy).abs() / energy);

        if len <= ORACLE_MAX_ENTRIES {
            let w = oracle::oracle_matrix(q, levels, j0, &filter);
            let expected = oracle::mat_vec(&w, &x);
            let diff = expected
                .iter()
                .zip(pyr.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            out.oracle = Some(out.oracle.unwrap_or(0.0).max(diff));
            let defect = oracle::orthogonality_defect(&w);
            out.oracle_orthogonality = Some(out.oracle_orthogonality.unwrap_or(0.0).max(defect));
        }
    }
    out
}

pub fn all_transform_checks() -> Vec<TransformCheck> {
    let mut checks = Vec::new();
    let mut seed = 0;
    for q in 1..=3 {
        for side in [4usize, 8, 16] {
            for name in FilterName::ALL {
                seed += 1;
                checks.push(check_transform(q, side, name, seed));
            }
        }
    }
    checks
}
