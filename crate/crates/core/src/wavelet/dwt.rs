//! Periodised pyramid algorithm, one axis at a time.
//!
//! One analysis step on a line `x` of even length `N` computes
//! `a_k = sum_i h_i x_{(2k + i) mod N}` and `d_k = sum_i g_i x_{(2k + i) mod N}`
//! for `k < N/2`, i.e. circular convolution keeping the even-indexed outputs.
//! The line is overwritten with `[a | d]`.

use super::filter::WaveletFilter;
use super::pyramid::{CoefficientPyramid, PyramidShape};
use crate::error::{Error, Result};
use crate::tensor::GridTensor;

fn analysis_step(line: &[f64], filter: &WaveletFilter, out: &mut [f64]) {
    let n = line.len();
    let half = n / 2;
    let (low, high) = out.split_at_mut(half);
    for k in 0..half {
        let mut a = 0.0;
        let mut d = 0.0;
        for (i, (h, g)) in filter.scaling.iter().zip(&filter.wavelet).enumerate() {
            let x = line[(2 * k + i) % n];
            a += h * x;
            d += g * x;
        }
        low[k] = a;
        high[k] = d;
    }
}

fn synthesis_step(coeffs: &[f64], filter: &WaveletFilter, out: &mut [f64]) {
    let n = coeffs.len();
    let (low, high) = coeffs.split_at(n / 2);
    out.fill(0.0);
    for k in 0..n / 2 {
        for (i, (h, g)) in filter.scaling.iter().zip(&filter.wavelet).enumerate() {
            out[(2 * k + i) % n] += h * low[k] + g * high[k];
        }
    }
}

/// Applies `step` to every line along `axis` inside the corner
/// `[0, active)^q` of a row-major buffer with side `full`.
fn for_each_line(
    buf: &mut [f64],
    q: usize,
    full: usize,
    active: usize,
    axis: usize,
    mut step: impl FnMut(&[f64], &mut [f64]),
) {
    let stride = full.pow((q - 1 - axis) as u32);
    let mut line = vec![0.0; active];
    let mut out = vec![0.0; active];
    let mut digits = vec![0usize; q];
    let lines = active.pow(q as u32 - 1);
    for _ in 0..lines {
        let base = digits.iter().fold(0, |acc, &d| acc * full + d);
        for (t, slot) in line.iter_mut().enumerate() {
            *slot = buf[base + t * stride];
        }
        step(&line, &mut out);
        for (t, &v) in out.iter().enumerate() {
            buf[base + t * stride] = v;
        }
        // advance over every axis except `axis`
        for (a, d) in digits.iter_mut().enumerate().rev() {
            if a == axis {
                continue;
            }
            *d += 1;
            if *d < active {
                break;
            }
            *d = 0;
        }
    }
}

/// Copies the hypercube `[offset, offset + side)` of a buffer with side
/// `full` into or out of a dense row-major block.
fn block_copy(buf: &mut [f64], q: usize, full: usize, offsets: &[usize], side: usize, block: &mut [f64], extract: bool) {
    let mut digits = vec![0usize; q];
    for slot in block.iter_mut() {
        let idx = digits
            .iter()
            .zip(offsets)
            .fold(0, |acc, (&d, &o)| acc * full + d + o);
        if extract {
            *slot = buf[idx];
        } else {
            buf[idx] = *slot;
        }
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d < side {
                break;
            }
            *d = 0;
        }
    }
}

fn subband_offsets(q: usize, subband: usize, side: usize) -> Vec<usize> {
    (0..q)
        .map(|axis| if subband >> axis & 1 == 1 { side } else { 0 })
        .collect()
}

fn dyadic_level(len: usize) -> Result<u32> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::BadLength(len));
    }
    Ok(len.trailing_zeros())
}

/// Forward transform of a `2^J`-per-axis tensor down to primary level `j0`.
pub fn dwt_qd(tensor: &GridTensor, filter: &WaveletFilter, j0: u32) -> Result<CoefficientPyramid> {
    let q = tensor.q();
    if q == 0 {
        return Err(Error::BadShape("zero-dimensional tensor".into()));
    }
    let full = tensor.side();
    let levels = dyadic_level(full).map_err(|_| {
        Error::BadShape(format!("axis length {full} is not a power of two"))
    })?;
    if j0 > levels {
        return Err(Error::BadPrimaryLevel { j0, levels });
    }
    let shape = PyramidShape { q, j0, levels };
    let mut pyramid = CoefficientPyramid::zeros(shape);
    let mut buf = tensor.as_slice().to_vec();

    for level in (j0 + 1..=levels).rev() {
        let active = 1usize << level;
        for axis in 0..q {
            for_each_line(&mut buf, q, full, active, axis, |line, out| {
                analysis_step(line, filter, out)
            });
        }
        let half = active / 2;
        for i in 1..=shape.subbands() {
            let offsets = subband_offsets(q, i, half);
            block_copy(&mut buf, q, full, &offsets, half, pyramid.subband_mut(level - 1, i), true);
        }
    }
    let gross_side = shape.gross_side();
    block_copy(&mut buf, q, full, &vec![0; q], gross_side, &mut pyramid.gross, true);
    Ok(pyramid)
}

/// Exact inverse of [`dwt_qd`].
pub fn idwt_qd(pyramid: &CoefficientPyramid, filter: &WaveletFilter) -> Result<GridTensor> {
    let shape = pyramid.shape();
    let q = shape.q;
    if pyramid.gross.len() != shape.gross_side().pow(q as u32)
        || pyramid.details.len() != (shape.levels - shape.j0) as usize
        || shape.detail_levels().zip(&pyramid.details).any(|(j, bands)| {
            bands.len() != shape.subbands()
                || bands.iter().any(|b| b.len() != 1 << (j as usize * q))
        })
    {
        return Err(Error::BadShape("inconsistent coefficient pyramid".into()));
    }
    let full = 1usize << shape.levels;
    let mut buf = vec![0.0; full.pow(q as u32)];
    let mut gross = pyramid.gross.clone();
    block_copy(&mut buf, q, full, &vec![0; q], shape.gross_side(), &mut gross, false);
    for j in shape.detail_levels() {
        let half = 1usize << j;
        for i in 1..=shape.subbands() {
            let offsets = subband_offsets(q, i, half);
            let mut band = pyramid.subband(j, i).to_vec();
            block_copy(&mut buf, q, full, &offsets, half, &mut band, false);
        }
        for axis in (0..q).rev() {
            for_each_line(&mut buf, q, full, 2 * half, axis, |line, out| {
                synthesis_step(line, filter, out)
            });
        }
    }
    GridTensor::from_vec(q, full, buf)
}

/// One-dimensional transform of a length-`2^J` signal.
pub fn dwt_1d_periodized(signal: &[f64], filter: &WaveletFilter, j0: u32) -> Result<CoefficientPyramid> {
    let levels = dyadic_level(signal.len())?;
    if j0 > levels {
        return Err(Error::BadPrimaryLevel { j0, levels });
    }
    let tensor = GridTensor::from_vec(1, signal.len(), signal.to_vec())?;
    dwt_qd(&tensor, filter, j0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavelet::filter::{build_filter, FilterName};

    fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn constant_signal_has_no_detail() {
        for name in FilterName::ALL {
            let f = build_filter(name);
            let p = dwt_1d_periodized(&[2.5; 32], &f, 1).unwrap();
            assert!(p.details.iter().flatten().flatten().all(|c| c.abs() < 1e-12));
            // each analysis stage multiplies a constant by sqrt(2)
            let expected = 2.5 * 2f64.powf(4.0 / 2.0);
            assert!(p.gross.iter().all(|c| (c - expected).abs() < 1e-12));
        }
    }

    #[test]
    fn two_by_two_haar_by_hand() {
        let f = build_filter(FilterName::Haar);
        let t = GridTensor::from_vec(2, 2, vec![3.0; 4]).unwrap();
        let p = dwt_qd(&t, &f, 0).unwrap();
        assert!((p.gross[0] - 6.0).abs() < 1e-14);
        assert!(p.details[0].iter().flatten().all(|c| c.abs() < 1e-14));

        // subband bit s marks a high pass on axis s: axis 0 is the slow index
        let t = GridTensor::from_vec(2, 2, vec![1.0, 1.0, -1.0, -1.0]).unwrap();
        let p = dwt_qd(&t, &f, 0).unwrap();
        assert!((p.subband(0, 1)[0] - 2.0).abs() < 1e-14);
        assert!(p.subband(0, 2)[0].abs() < 1e-14);
        assert!(p.subband(0, 3)[0].abs() < 1e-14);
    }

    #[test]
    fn round_trip_all_filters() {
        for name in FilterName::ALL {
            let f = build_filter(name);
            for q in 1..=3usize {
                for side in [2usize, 4, 8] {
                    let t = GridTensor::from_fn(q, side, |d| {
                        d.iter().enumerate().map(|(a, &x)| ((a + 1) * x * x) as f64).sum::<f64>().sin()
                    });
                    let levels = side.trailing_zeros();
                    for j0 in 0..=levels {
                        let p = dwt_qd(&t, &f, j0).unwrap();
                        let back = idwt_qd(&p, &f).unwrap();
                        assert!(max_abs_diff(back.as_slice(), t.as_slice()) < 1e-12);
                        let e_in: f64 = t.as_slice().iter().map(|v| v * v).sum();
                        assert!((p.energy() - e_in).abs() < 1e-12 * e_in);
                    }
                }
            }
        }
    }

    #[test]
    fn shape_errors() {
        let f = build_filter(FilterName::Haar);
        assert!(matches!(dwt_1d_periodized(&[1.0; 6], &f, 0), Err(Error::BadLength(6))));
        assert!(matches!(
            dwt_1d_periodized(&[1.0; 8], &f, 4),
            Err(Error::BadPrimaryLevel { j0: 4, levels: 3 })
        ));
        let t = GridTensor::zeros(2, 6);
        assert!(matches!(dwt_qd(&t, &f, 0), Err(Error::BadShape(_))));

        let p = dwt_qd(&GridTensor::zeros(2, 8), &f, 1).unwrap();
        let mut broken = p.clone();
        broken.details[0].pop();
        assert!(matches!(idwt_qd(&broken, &f), Err(Error::BadShape(_))));
    }
}
