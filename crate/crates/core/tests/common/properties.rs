//! Randomized invariant suites, driven through `proptest`'s runner so the
//! acceptance binary and the regular test target can share them.

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use medshrink::estimator::{fit, fit_binned, EstimatorConfig, NoiseMode};
use medshrink::grid::{bin_observations, plan_grid, GridDesign};
use medshrink::medians::{bias_correction, bin_medians, estimate_noise_level, sample_median, NoiseRule};
use medshrink::shrinkage::{partition_blocks, shrink, ShrinkageConfig};
use medshrink::simulation::{run_replication, run_replications, ErrorDist, SimulationConfig};
use medshrink::tensor::GridTensor;
use medshrink::wavelet::{build_filter, dwt_qd, idwt_qd, CoefficientPyramid, FilterName, PyramidShape};

pub const CASES: u32 = 256;

pub struct Suite {
    pub name: &'static str,
    pub run: fn(u32) -> Result<(), String>,
}

pub fn suites() -> Vec<Suite> {
    vec![
        Suite { name: "binning partition, nesting and determinism", run: binning_partition },
        Suite { name: "median shift and scale equivariance", run: median_equivariance },
        Suite { name: "median breakdown", run: median_breakdown },
        Suite { name: "block partition coverage", run: partition_coverage },
        Suite { name: "shrinkage factor bounds and gross identity", run: shrink_bounds },
        Suite { name: "shrinkage factor monotone in block scale", run: shrink_monotone },
        Suite { name: "transform linearity, round trip and Parseval", run: transform_orthogonality },
        Suite { name: "estimator shift equivariance", run: estimator_shift },
        Suite { name: "estimator determinism", run: estimator_determinism },
        Suite { name: "seeded simulation determinism", run: simulation_determinism },
    ]
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        proptest::test_runner::TestRng::deterministic_rng(proptest::test_runner::RngAlgorithm::ChaCha),
    )
}

fn report<T: std::fmt::Debug>(r: Result<(), proptest::test_runner::TestError<T>>) -> Result<(), String> {
    r.map_err(|e| e.to_string())
}

/// A small grid size accepted by `plan_grid`, with its dimension.
fn small_design() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![
        Just((16usize, 1usize)),
        Just((64, 1)),
        Just((256, 1)),
        Just((256, 2)),
        Just((1024, 2)),
        Just((512, 3)),
    ]
}

fn dataset() -> impl Strategy<Value = (GridDesign, Vec<f64>, Vec<f64>)> {
    small_design().prop_flat_map(|(n, q)| {
        let design = plan_grid(n, q).unwrap();
        let u = design.grid_coordinates();
        proptest::collection::vec(-50.0f64..50.0, n).prop_map(move |y| (design, u.clone(), y))
    })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

fn binning_partition(cases: u32) -> Result<(), String> {
    report(runner(cases).run(&(dataset(), any::<u64>()), |((design, u, y), seed)| {
        let b = bin_observations(&u, &y, &design).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(b.bins.len(), design.bin_count);
        prop_assert_eq!(b.bins.iter().map(Vec::len).sum::<usize>(), y.len());

        // every observation lands in the bin its coordinates name
        let mut expected = vec![Vec::new(); design.bin_count];
        for (row, &v) in u.chunks(design.q).zip(&y) {
            expected[design.bin_of_point(row)].push(v);
        }
        for (got, want) in b.bins.iter().zip(expected.iter_mut()) {
            let mut got = got.clone();
            got.sort_by(f64::total_cmp);
            want.sort_by(f64::total_cmp);
            prop_assert_eq!(&got, want);
        }

        let per_axis = design.halfbin_points_per_axis();
        for (bin, half) in b.bins.iter().zip(&b.halfbins) {
            prop_assert!(half.iter().all(|v| bin.contains(v)));
            if design.points_per_axis % (2 * design.bins_per_axis) == 0 {
                prop_assert_eq!(half.len(), per_axis.pow(design.q as u32));
            }
        }

        // row order does not matter
        let mut order: Vec<usize> = (0..y.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let u2: Vec<f64> = order.iter().flat_map(|&i| u[i * design.q..(i + 1) * design.q].to_vec()).collect();
        let y2: Vec<f64> = order.iter().map(|&i| y[i]).collect();
        let b2 = bin_observations(&u2, &y2, &design).unwrap();
        prop_assert_eq!(b2, b);
        Ok(())
    }))
}

fn median_equivariance(cases: u32) -> Result<(), String> {
    let shift = -1e3f64..1e3;
    let scale = prop_oneof![-10.0f64..-0.1, 0.1f64..10.0];
    report(runner(cases).run(&(dataset(), shift, scale), |((design, u, y), c, s)| {
        let base = bin_medians(&bin_observations(&u, &y, &design).unwrap()).unwrap();
        let shifted_y: Vec<f64> = y.iter().map(|v| v + c).collect();
        let scaled_y: Vec<f64> = y.iter().map(|v| v * s).collect();
        let shifted = bin_medians(&bin_observations(&u, &shifted_y, &design).unwrap()).unwrap();
        let scaled = bin_medians(&bin_observations(&u, &scaled_y, &design).unwrap()).unwrap();
        for ((m, m_shift), m_scale) in base.full.iter().zip(&shifted.full).zip(&scaled.full) {
            prop_assert!(close(*m_shift, m + c, 1e-12), "{} + {} vs {}", m, c, m_shift);
            prop_assert!(close(*m_scale, m * s, 1e-12), "{} * {} vs {}", m, s, m_scale);
        }
        let b0 = bias_correction(&base).b_hat;
        let b1 = bias_correction(&shifted).b_hat;
        prop_assert!((b0 - b1).abs() <= 1e-9 * (1.0 + c.abs()));

        for rule in [NoiseRule::PairedMedian, NoiseRule::PairedMean] {
            let h0 = estimate_noise_level(&base, &design, rule).unwrap();
            let h1 = estimate_noise_level(&shifted, &design, rule).unwrap();
            let h2 = estimate_noise_level(&scaled, &design, rule).unwrap();
            if h0.degenerate {
                continue;
            }
            let abs_tol = 1e-9 * (1.0 + c.abs()).powi(2) * design.kappa as f64;
            prop_assert!((h0.h_inv_sq - h1.h_inv_sq).abs() <= abs_tol + 1e-9 * h0.h_inv_sq);
            prop_assert!(close(h2.h_inv_sq, s * s * h0.h_inv_sq, 1e-9));
        }
        Ok(())
    }))
}

fn median_breakdown(cases: u32) -> Result<(), String> {
    let clean = proptest::collection::vec(-1.0f64..1.0, 1..60);
    report(runner(cases).run(&(clean, any::<u64>(), any::<bool>()), |(clean, seed, positive)| {
        let k = clean.len();
        // fewer than half of the final sample may be outliers
        let outliers = k.saturating_sub(1);
        let bad = if positive { 1e300 } else { -1e300 };
        let mut sample = clean.clone();
        sample.extend(std::iter::repeat_n(bad, outliers));
        sample.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let m = sample_median(&sample).unwrap();
        let lo = clean.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = clean.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(m.is_finite() && lo <= m && m <= hi, "median {} outside [{}, {}]", m, lo, hi);
        Ok(())
    }))
}

fn pyramid_shape() -> impl Strategy<Value = PyramidShape> {
    (1usize..=3).prop_flat_map(|q| {
        let max_levels = match q {
            1 => 9u32,
            2 => 5,
            _ => 3,
        };
        (1..=max_levels).prop_flat_map(move |levels| {
            (0..levels).prop_map(move |j0| PyramidShape { q, j0, levels })
        })
    })
}

fn partition_coverage(cases: u32) -> Result<(), String> {
    report(runner(cases).run(&(pyramid_shape(), 1usize..40), |(shape, l)| {
        let cfg = ShrinkageConfig::new(1 << 12, 1.0, Some(l));
        let part = partition_blocks(shape, &cfg);
        for j in shape.detail_levels() {
            let side = 1usize << j;
            for i in 1..=shape.subbands() {
                let mut hits = vec![0u32; side.pow(shape.q as u32)];
                for block in part.blocks(j, i) {
                    prop_assert!(block.cardinality() >= 1);
                    let whole_band = side.pow(shape.q as u32) <= l;
                    prop_assert!(whole_band || block.cardinality() <= l);
                    for p in block.positions(side) {
                        hits[p] += 1;
                    }
                }
                prop_assert!(hits.iter().all(|&h| h == 1), "level {} subband {} not tiled exactly once", j, i);
            }
        }
        Ok(())
    }))
}

fn random_pyramid() -> impl Strategy<Value = CoefficientPyramid> {
    pyramid_shape().prop_flat_map(|shape| {
        proptest::collection::vec(-5.0f64..5.0, shape.total_len())
            .prop_map(move |flat| CoefficientPyramid::from_flat(shape, &flat).unwrap())
    })
}

fn shrink_bounds(cases: u32) -> Result<(), String> {
    let strategy = (random_pyramid(), 1usize..20, 1e-3f64..1e3, 16usize..1 << 16);
    report(runner(cases).run(&strategy, |(pyr, l, h_inv_sq, n)| {
        let cfg = ShrinkageConfig::new(n, h_inv_sq, Some(l));
        let part = partition_blocks(pyr.shape(), &cfg);
        let out = shrink(&pyr, &part, &cfg);
        prop_assert_eq!(&out.gross, &pyr.gross);
        for j in pyr.shape().detail_levels() {
            let side = 1usize << j;
            for i in 1..=pyr.shape().subbands() {
                let (before, after) = (pyr.subband(j, i), out.subband(j, i));
                for block in part.blocks(j, i) {
                    let mut factor = None;
                    for p in block.positions(side) {
                        let (y, t) = (before[p], after[p]);
                        prop_assert!(t.abs() <= y.abs());
                        prop_assert!(t == 0.0 || t.signum() == y.signum());
                        if y != 0.0 {
                            let f = t / y;
                            prop_assert!((0.0..=1.0).contains(&f));
                            match factor {
                                None => factor = Some(f),
                                Some(f0) => prop_assert!((f - f0).abs() <= 1e-12, "factor varies inside a block"),
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }))
}

fn shrink_monotone(cases: u32) -> Result<(), String> {
    let strategy = (
        proptest::collection::vec(-1.0f64..1.0, 1..32),
        1.0f64..100.0,
        1e-2f64..1e2,
        16usize..1 << 16,
    );
    report(runner(cases).run(&strategy, |(block, c, h_inv_sq, n)| {
        let cfg = ShrinkageConfig::new(n, h_inv_sq, Some(block.len()));
        let energy: f64 = block.iter().map(|v| v * v).sum();
        let f0 = cfg.factor(block.len(), energy);
        let f1 = cfg.factor(block.len(), energy * c * c);
        prop_assert!((0.0..=1.0).contains(&f0) && (0.0..=1.0).contains(&f1));
        prop_assert!(f1 >= f0, "scaling by {} lowered the factor from {} to {}", c, f0, f1);
        Ok(())
    }))
}

fn tensor_case() -> impl Strategy<Value = (usize, u32, u32, FilterName)> {
    let filter = prop_oneof![Just(FilterName::Haar), Just(FilterName::Db2), Just(FilterName::Db4)];
    ((1usize..=3), (2u32..=4), filter).prop_flat_map(|(q, levels, f)| (Just(q), Just(levels), 0..=levels, Just(f)))
}

fn transform_orthogonality(cases: u32) -> Result<(), String> {
    let strategy = tensor_case().prop_flat_map(|(q, levels, j0, f)| {
        let len = 1usize << (levels as usize * q);
        (
            Just((q, levels, j0, f)),
            proptest::collection::vec(-10.0f64..10.0, len),
            proptest::collection::vec(-10.0f64..10.0, len),
            -3.0f64..3.0,
            -3.0f64..3.0,
        )
    });
    report(runner(cases).run(&strategy, |((q, levels, j0, name), x, y, a, b)| {
        let filter = build_filter(name);
        let side = 1usize << levels;
        let tx = GridTensor::from_vec(q, side, x.clone()).unwrap();
        let ty = GridTensor::from_vec(q, side, y.clone()).unwrap();
        let combo: Vec<f64> = x.iter().zip(&y).map(|(u, v)| a * u + b * v).collect();
        let tc = GridTensor::from_vec(q, side, combo.clone()).unwrap();
        let px = dwt_qd(&tx, &filter, j0).unwrap();
        let py = dwt_qd(&ty, &filter, j0).unwrap();
        let pc = dwt_qd(&tc, &filter, j0).unwrap();
        prop_assert_eq!(pc.subband_count(), ((1 << q) - 1) * (levels - j0) as usize);
        for ((c, u), v) in pc.iter().zip(px.iter()).zip(py.iter()) {
            prop_assert!((c - (a * u + b * v)).abs() < 1e-10);
        }
        let back = idwt_qd(&px, &filter).unwrap();
        for (r, o) in back.as_slice().iter().zip(&x) {
            prop_assert!((r - o).abs() < 1e-10);
        }
        let energy: f64 = x.iter().map(|v| v * v).sum();
        prop_assert!((px.energy() - energy).abs() <= 1e-10 * energy.max(1e-300));
        Ok(())
    }))
}

fn estimator_shift(cases: u32) -> Result<(), String> {
    let filter = prop_oneof![Just(FilterName::Haar), Just(FilterName::Db2), Just(FilterName::Db4)];
    report(runner(cases).run(&(dataset(), -100.0f64..100.0, filter), |((design, u, y), c, name)| {
        let cfg = EstimatorConfig {
            filter: name,
            ..EstimatorConfig::default()
        };
        let base = fit(&u, &y, design.q, &cfg).unwrap();
        let shifted_y: Vec<f64> = y.iter().map(|v| v + c).collect();
        let shifted = fit(&u, &shifted_y, design.q, &cfg).unwrap();
        let tol = 1e-9 * (1.0 + c.abs() + 50.0);
        prop_assert!((base.b_hat - shifted.b_hat).abs() <= tol);
        for (f0, f1) in base.f_hat.as_slice().iter().zip(shifted.f_hat.as_slice()) {
            prop_assert!((f1 - (f0 + c)).abs() <= tol, "{} + {} vs {}", f0, c, f1);
        }
        Ok(())
    }))
}

fn estimator_determinism(cases: u32) -> Result<(), String> {
    let known = prop_oneof![Just(None), (0.1f64..10.0).prop_map(Some)];
    report(runner(cases).run(&(dataset(), known, any::<bool>()), |((design, u, y), known, mean_rule)| {
        let cfg = EstimatorConfig {
            noise_mode: known.map_or(NoiseMode::Estimate, NoiseMode::Known),
            noise_rule: if mean_rule { NoiseRule::PairedMean } else { NoiseRule::PairedMedian },
            ..EstimatorConfig::default()
        };
        let a = fit(&u, &y, design.q, &cfg).unwrap();
        let b = fit_binned(&bin_observations(&u, &y, &design).unwrap(), &cfg).unwrap();
        prop_assert_eq!(&a, &b);
        let bits = |t: &GridTensor| t.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&a.f_hat), bits(&b.f_hat));
        Ok(())
    }))
}

fn simulation_determinism(cases: u32) -> Result<(), String> {
    let dist = prop_oneof![
        Just(ErrorDist::Gaussian { scale: 1.0 }),
        Just(ErrorDist::Cauchy { scale: 1.0 }),
        Just(ErrorDist::StudentT { df: 3.0 }),
        Just(ErrorDist::ShiftedExponential),
    ];
    report(runner(cases).run(&(dist, any::<u64>(), 0usize..1000), |(dist, seed, index)| {
        let mut sim = SimulationConfig::new(2, dist, vec![256, 1024, 4096]);
        sim.seed = seed;
        sim.replications = 3;
        let est = EstimatorConfig::default();
        let a = run_replication(&sim, &est, 256, index).unwrap();
        let b = run_replication(&sim, &est, 256, index).unwrap();
        prop_assert_eq!(&a, &b);
        let other = run_replication(&sim, &est, 256, index + 1).unwrap();
        prop_assert_ne!(a.checksum, other.checksum);
        let parallel = run_replications(&sim, &est, 256).unwrap();
        for (i, p) in parallel.iter().enumerate() {
            prop_assert_eq!(p, &run_replication(&sim, &est, 256, i).unwrap());
        }
        Ok(())
    }))
}
