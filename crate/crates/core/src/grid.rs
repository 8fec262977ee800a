//! Dyadic binning of an equispaced design on `[0, 1]^q`.
//!
//! A sample of size `n = (m + 1)^q` lives on the grid `{0, 1/m, ..., 1}^q`.
//! Each axis is cut into `T = 2^J` half-open intervals `((l - 1)/T, l/T]`,
//! with `J = floor(log2(n^{3/4}) / q)`, so the number of bins `V = T^q`
//! grows like `n^{3/4}` and every bin holds roughly `kappa = n / V`
//! observations.
//!
//! Bin indices are stored flat and 0-based in lexicographic order with the
//! first axis most significant; the 1-based multi-index `l` used in the
//! literature is `digits(flat) + 1`.

use crate::error::{Error, Result};

/// Absolute tolerance for recognising a coordinate as a multiple of `1/m`.
pub const GRID_TOLERANCE: f64 = 1e-9;

/// All derived sizes of the binning scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridDesign {
    /// Dimension of the covariate `U`.
    pub q: usize,
    /// Grid points per axis, `m + 1`.
    pub points_per_axis: usize,
    /// Total sample size `(m + 1)^q`.
    pub n: usize,
    /// Resolution exponent `J`.
    pub levels: u32,
    /// Bins per axis `T = 2^J`.
    pub bins_per_axis: usize,
    /// Total number of bins `V = T^q`.
    pub bin_count: usize,
    /// Planned observations per bin, `floor(n / V)`.
    pub kappa: usize,
    /// Planned observations per half-bin, `floor(n / (V 2^q))`.
    pub nu: usize,
}

impl GridDesign {
    /// Grid spacing denominator `m`.
    pub fn m(&self) -> usize {
        self.points_per_axis - 1
    }

    /// Number of grid points per axis kept in the lower half of each interval.
    pub fn halfbin_points_per_axis(&self) -> usize {
        self.points_per_axis / (2 * self.bins_per_axis)
    }

    /// 0-based axis bin of grid index `i` (coordinate `i / m`).
    ///
    /// Coordinate 0 belongs to no half-open interval and is put in the first
    /// bin.
    pub fn axis_bin(&self, i: usize) -> usize {
        let m = self.m();
        let t = self.bins_per_axis;
        // ceil(i T / m), the smallest l with i / m <= l / T
        let l = (i * t).div_ceil(m);
        l.max(1) - 1
    }

    /// Splits a flat bin index into its 0-based per-axis digits.
    pub fn bin_digits(&self, mut flat: usize) -> Vec<usize> {
        let mut digits = vec![0; self.q];
        for d in digits.iter_mut().rev() {
            *d = flat % self.bins_per_axis;
            flat /= self.bins_per_axis;
        }
        digits
    }

    /// Bin point `l / T` for a flat bin index (the upper corner of the bin).
    pub fn bin_point(&self, flat: usize) -> Vec<f64> {
        let t = self.bins_per_axis as f64;
        self.bin_digits(flat)
            .into_iter()
            .map(|d| (d + 1) as f64 / t)
            .collect()
    }

    /// Flat index of the bin containing `u`, using the same interval rule as
    /// [`bin_observations`]. Coordinates are clamped to `[0, 1]`.
    pub fn bin_of_point(&self, u: &[f64]) -> usize {
        let t = self.bins_per_axis;
        u.iter().fold(0, |acc, &x| {
            let l = (x.clamp(0.0, 1.0) * t as f64).ceil() as usize;
            acc * t + l.clamp(1, t) - 1
        })
    }

    /// Enumerates the full grid in lexicographic order as a flat row-major
    /// `n x q` coordinate array.
    pub fn grid_coordinates(&self) -> Vec<f64> {
        let m = self.m() as f64;
        let mut coords = Vec::with_capacity(self.n * self.q);
        let mut digits = vec![0usize; self.q];
        for _ in 0..self.n {
            coords.extend(digits.iter().map(|&i| i as f64 / m));
            increment(&mut digits, self.points_per_axis);
        }
        coords
    }
}

fn increment(digits: &mut [usize], base: usize) {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return;
        }
        *d = 0;
    }
}

/// Exact integer `q`-th root of `n`, if it exists.
fn integer_root(n: usize, q: usize) -> Option<usize> {
    let guess = (n as f64).powf(1.0 / q as f64).round() as usize;
    (guess.saturating_sub(1)..=guess + 1).find(|&r| {
        u32::try_from(q)
            .ok()
            .and_then(|e| r.checked_pow(e))
            .is_some_and(|p| p == n)
    })
}

/// Plans the binning scheme for a complete grid of `n = (m + 1)^q` points.
pub fn plan_grid(n: usize, q: usize) -> Result<GridDesign> {
    if q == 0 {
        return Err(Error::NonGridSampleSize { n, q });
    }
    let points_per_axis = match integer_root(n, q) {
        Some(r) if r >= 2 => r,
        _ => return Err(Error::NonGridSampleSize { n, q }),
    };

    // J is the largest integer with 2^{J q} <= n^{3/4}, i.e. 2^{4 J q} <= n^3.
    let cube = (n as u128)
        .checked_pow(3)
        .ok_or(Error::SampleSizeTooLarge { n })?;
    let mut levels = 0u32;
    loop {
        let exp = 4 * (levels as usize + 1) * q;
        if exp >= 128 || (1u128 << exp) > cube {
            break;
        }
        levels += 1;
    }

    let bins_per_axis = 1usize << levels;
    if bins_per_axis > points_per_axis {
        return Err(Error::DegenerateBinning {
            bins_per_axis,
            points_per_axis,
        });
    }
    let bin_count = bins_per_axis.pow(q as u32);
    Ok(GridDesign {
        q,
        points_per_axis,
        n,
        levels,
        bins_per_axis,
        bin_count,
        kappa: n / bin_count,
        nu: n / (bin_count << q),
    })
}

/// Responses grouped by bin and by lower half-bin.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedData {
    pub design: GridDesign,
    /// Responses per flat bin index, in lexicographic grid order.
    pub bins: Vec<Vec<f64>>,
    /// Responses of the lower half-bin of each bin, same indexing.
    pub halfbins: Vec<Vec<f64>>,
}

/// Assigns every observation of a complete grid to its bin and half-bin.
///
/// `u` is a row-major `n x q` coordinate array. Contents of each bin are
/// ordered by grid position, so permuting the input rows does not change the
/// result.
pub fn bin_observations(u: &[f64], y: &[f64], design: &GridDesign) -> Result<BinnedData> {
    let GridDesign { q, n, .. } = *design;
    if y.len() != n || u.len() != n * q {
        return Err(Error::IncompleteGrid(format!(
            "expected {n} observations of dimension {q}, got {} responses and {} coordinates",
            y.len(),
            u.len()
        )));
    }

    let m = design.m();
    let mf = m as f64;
    let mut by_grid: Vec<Option<f64>> = vec![None; n];
    for (row, (coords, &value)) in u.chunks_exact(q).zip(y).enumerate() {
        let mut flat = 0usize;
        for (axis, &c) in coords.iter().enumerate() {
            let scaled = c * mf;
            let i = scaled.round();
            if !(0.0..=mf).contains(&i) || (c - i / mf).abs() > GRID_TOLERANCE {
                return Err(Error::OffGridPoint {
                    row,
                    axis,
                    value: c,
                });
            }
            flat = flat * design.points_per_axis + i as usize;
        }
        if by_grid[flat].replace(value).is_some() {
            return Err(Error::IncompleteGrid(format!(
                "grid point of row {row} appears more than once"
            )));
        }
    }

    let axis_bin: Vec<usize> = (0..=m).map(|i| design.axis_bin(i)).collect();
    // first grid index of every axis interval
    let mut interval_start = vec![usize::MAX; design.bins_per_axis];
    for (i, &b) in axis_bin.iter().enumerate() {
        interval_start[b] = interval_start[b].min(i);
    }
    let half = design.halfbin_points_per_axis();
    let in_lower_half: Vec<bool> = axis_bin
        .iter()
        .enumerate()
        .map(|(i, &b)| i - interval_start[b] < half)
        .collect();

    let mut bins = vec![Vec::with_capacity(design.kappa + 1); design.bin_count];
    let mut halfbins = vec![Vec::with_capacity(design.nu + 1); design.bin_count];
    let mut digits = vec![0usize; q];
    for slot in by_grid {
        let value = slot.ok_or_else(|| {
            let point: Vec<String> = digits.iter().map(|d| format!("{d}/{m}")).collect();
            Error::IncompleteGrid(format!("missing grid point ({})", point.join(", ")))
        })?;
        let bin = digits
            .iter()
            .fold(0, |acc, &i| acc * design.bins_per_axis + axis_bin[i]);
        bins[bin].push(value);
        if digits.iter().all(|&i| in_lower_half[i]) {
            halfbins[bin].push(value);
        }
        increment(&mut digits, design.points_per_axis);
    }

    Ok(BinnedData {
        design: *design,
        bins,
        halfbins,
    })
}
