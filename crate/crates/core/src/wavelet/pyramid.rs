use crate::error::{Error, Result};

/// Levels and subband layout of a coefficient pyramid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PyramidShape {
    pub q: usize,
    /// Primary (coarsest) level `j0`.
    pub j0: u32,
    /// Finest level `J`; the source tensor has side `2^J`.
    pub levels: u32,
}

impl PyramidShape {
    /// Number of detail subbands per level, `2^q - 1`.
    pub fn subbands(&self) -> usize {
        (1 << self.q) - 1
    }

    pub fn gross_side(&self) -> usize {
        1 << self.j0
    }

    pub fn detail_levels(&self) -> std::ops::Range<u32> {
        self.j0..self.levels
    }

    /// Total number of coefficients, `2^{J q}`.
    pub fn total_len(&self) -> usize {
        1 << (self.levels as usize * self.q)
    }
}

/// Multiresolution wavelet coefficients of a `2^J`-per-axis tensor.
///
/// Detail subband `i` (1-based) at level `j` has side `2^j`; bit `s` of `i`
/// is set when axis `s` took the high-pass branch.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientPyramid {
    shape: PyramidShape,
    /// Scaling coefficients at `j0`, row-major with side `2^{j0}`.
    pub gross: Vec<f64>,
    /// `details[j - j0][i - 1]`, row-major with side `2^j`.
    pub details: Vec<Vec<Vec<f64>>>,
}

impl CoefficientPyramid {
    pub fn zeros(shape: PyramidShape) -> Self {
        let gross = vec![0.0; shape.gross_side().pow(shape.q as u32)];
        let details = shape
            .detail_levels()
            .map(|j| vec![vec![0.0; 1 << (j as usize * shape.q)]; shape.subbands()])
            .collect();
        CoefficientPyramid {
            shape,
            gross,
            details,
        }
    }

    pub fn shape(&self) -> PyramidShape {
        self.shape
    }

    pub fn q(&self) -> usize {
        self.shape.q
    }

    pub fn j0(&self) -> u32 {
        self.shape.j0
    }

    pub fn levels(&self) -> u32 {
        self.shape.levels
    }

    pub fn subband(&self, j: u32, i: usize) -> &[f64] {
        &self.details[(j - self.shape.j0) as usize][i - 1]
    }

    pub fn subband_mut(&mut self, j: u32, i: usize) -> &mut [f64] {
        &mut self.details[(j - self.shape.j0) as usize][i - 1]
    }

    /// Number of detail subbands stored.
    pub fn subband_count(&self) -> usize {
        self.details.iter().map(Vec::len).sum()
    }

    pub fn len(&self) -> usize {
        self.gross.len()
            + self
                .details
                .iter()
                .flatten()
                .map(Vec::len)
                .sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn energy(&self) -> f64 {
        self.iter().map(|c| c * c).sum()
    }

    /// All coefficients: gross block, then levels ascending, subbands ascending.
    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.gross
            .iter()
            .chain(self.details.iter().flatten().flatten())
            .copied()
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.iter().collect()
    }

    /// Inverse of [`CoefficientPyramid::to_flat`].
    pub fn from_flat(shape: PyramidShape, flat: &[f64]) -> Result<Self> {
        if flat.len() != shape.total_len() {
            return Err(Error::BadShape(format!(
                "{} coefficients for a pyramid of {}",
                flat.len(),
                shape.total_len()
            )));
        }
        let mut pyramid = CoefficientPyramid::zeros(shape);
        let mut rest = flat;
        let (g, tail) = rest.split_at(pyramid.gross.len());
        pyramid.gross.copy_from_slice(g);
        rest = tail;
        for band in pyramid.details.iter_mut().flatten() {
            let (head, tail) = rest.split_at(band.len());
            band.copy_from_slice(head);
            rest = tail;
        }
        Ok(pyramid)
    }
}

/// Besov sequence norm
/// `||theta_{j0}||_s + (sum_j (2^{j w} ||theta_j||_s)^t)^{1/t}` with
/// `w = alpha + q (1/2 - 1/s)`. `||theta_j||_s` pools all subbands of level
/// `j`; `t = infinity` takes the supremum over levels.
pub fn besov_sequence_norm(pyramid: &CoefficientPyramid, alpha: f64, s: f64, t: f64) -> Result<f64> {
    if !(s >= 1.0) || !(t >= 1.0) {
        return Err(Error::BadExponent(f64::NAN));
    }
    let q = pyramid.q() as f64;
    let w = alpha + q * (0.5 - 1.0 / s);
    if !(w > 0.0) {
        return Err(Error::BadExponent(w));
    }
    let s_norm = |values: &mut dyn Iterator<Item = f64>| -> f64 {
        if s.is_infinite() {
            values.fold(0.0, |m, v| m.max(v.abs()))
        } else {
            values.map(|v| v.abs().powf(s)).sum::<f64>().powf(1.0 / s)
        }
    };
    let gross = s_norm(&mut pyramid.gross.iter().copied());
    let weighted = pyramid
        .shape()
        .detail_levels()
        .zip(&pyramid.details)
        .map(|(j, bands)| 2f64.powf(j as f64 * w) * s_norm(&mut bands.iter().flatten().copied()));
    let detail = if t.is_infinite() {
        weighted.fold(0.0, f64::max)
    } else {
        weighted.map(|v| v.powf(t)).sum::<f64>().powf(1.0 / t)
    };
    Ok(gross + detail)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(q: usize, j0: u32, levels: u32) -> PyramidShape {
        PyramidShape { q, j0, levels }
    }

    #[test]
    fn zero_pyramid_layout() {
        let p = CoefficientPyramid::zeros(shape(2, 1, 4));
        assert_eq!(p.len(), 256);
        assert_eq!(p.subband_count(), 3 * 3);
        assert_eq!(p.subband(3, 2).len(), 64);
        assert_eq!(p.gross.len(), 4);
    }

    #[test]
    fn flat_round_trip() {
        let s = shape(3, 0, 2);
        let flat: Vec<f64> = (0..64).map(f64::from).collect();
        let p = CoefficientPyramid::from_flat(s, &flat).unwrap();
        assert_eq!(p.to_flat(), flat);
        assert_eq!(p.subband(1, 7), &flat[56..64]);
        assert!(CoefficientPyramid::from_flat(s, &flat[1..]).is_err());
    }

    #[test]
    fn besov_zero_and_gross_only() {
        let mut p = CoefficientPyramid::zeros(shape(2, 1, 3));
        assert_eq!(besov_sequence_norm(&p, 1.0, 2.0, 2.0).unwrap(), 0.0);
        p.gross = vec![3.0, 0.0, 4.0, 0.0];
        assert!((besov_sequence_norm(&p, 1.0, 2.0, 2.0).unwrap() - 5.0).abs() < 1e-15);
        assert!((besov_sequence_norm(&p, 1.5, 1.0, f64::INFINITY).unwrap() - 7.0).abs() < 1e-15);
    }

    #[test]
    fn besov_single_detail_by_hand() {
        let mut p = CoefficientPyramid::zeros(shape(1, 0, 3));
        p.subband_mut(2, 1)[1] = 1.0;
        // w = 1 + (1/2 - 1/2) = 1, level 2 weight 2^2
        assert!((besov_sequence_norm(&p, 1.0, 2.0, 2.0).unwrap() - 4.0).abs() < 1e-15);
        assert!((besov_sequence_norm(&p, 1.0, 2.0, f64::INFINITY).unwrap() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn besov_rejects_nonpositive_w() {
        let p = CoefficientPyramid::zeros(shape(2, 0, 2));
        // w = 0.5 + 2 (1/2 - 1) = -0.5
        assert!(matches!(
            besov_sequence_norm(&p, 0.5, 1.0, 2.0),
            Err(Error::BadExponent(_))
        ));
    }
}
