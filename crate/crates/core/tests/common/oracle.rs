//! Dense-matrix transform oracle.
//!
//! One analysis level on a side-`s` cube is the Kronecker power of the 1-D
//! step matrix, written out entry by entry from the filter taps. Coefficients
//! are then routed to subbands by digit arithmetic. Nothing here shares code
//! with the library's line-by-line pyramid.

use medshrink::wavelet::WaveletFilter;

pub type Matrix = Vec<Vec<f64>>;

/// `N x N` matrix of one periodised analysis step: rows `0..N/2` produce
/// `a_k = sum_i h_i x_{(2k+i) mod N}`, rows `N/2..N` the same with `g`.
pub fn step_matrix(h: &[f64], g: &[f64], n: usize) -> Matrix {
    let half = n / 2;
    let mut m = vec![vec![0.0; n]; n];
    for k in 0..half {
        for i in 0..h.len() {
            let col = (2 * k + i) % n;
            m[k][col] += h[i];
            m[half + k][col] += g[i];
        }
    }
    m
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, ca, rb, cb) = (a.len(), a[0].len(), b.len(), b[0].len());
    let mut out = vec![vec![0.0; ca * cb]; ra * rb];
    for i in 0..ra {
        for j in 0..ca {
            for k in 0..rb {
                for l in 0..cb {
                    out[i * rb + k][j * cb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn mat_vec(m: &Matrix, x: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

fn digits_of(mut flat: usize, side: usize, q: usize) -> Vec<usize> {
    let mut d = vec![0; q];
    for slot in d.iter_mut().rev() {
        *slot = flat % side;
        flat /= side;
    }
    d
}

fn flat_of(digits: &[usize], side: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * side + d)
}

/// Transforms a row-major tensor of side `2^levels` in dimension `q` down to
/// `j0`, returning coefficients as gross block, then levels ascending,
/// subbands ascending, each row-major.
pub fn oracle_transform(x: &[f64], q: usize, levels: u32, j0: u32, filter: &WaveletFilter) -> Vec<f64> {
    let mut approx = x.to_vec();
    // details_by_level[j] holds the 2^q - 1 subbands at level j
    let mut details_by_level: Vec<Vec<Vec<f64>>> = vec![Vec::new(); levels as usize];
    for j in (j0..levels).rev() {
        let side = 1usize << (j + 1);
        let half = side / 2;
        let a = step_matrix(&filter.scaling, &filter.wavelet, side);
        let mut k = a.clone();
        for _ in 1..q {
            k = kron(&k, &a);
        }
        let y = mat_vec(&k, &approx);
        let sub_len = half.pow(q as u32);
        let mut bands = vec![vec![0.0; sub_len]; 1 << q];
        for (flat, v) in y.into_iter().enumerate() {
            let d = digits_of(flat, side, q);
            let band: usize = d
                .iter()
                .enumerate()
                .map(|(axis, &di)| usize::from(di >= half) << axis)
                .sum();
            let inner: Vec<usize> = d.iter().map(|&di| di % half).collect();
            bands[band][flat_of(&inner, half)] = v;
        }
        approx = bands.remove(0);
        details_by_level[j as usize] = bands;
    }
    let mut out = approx;
    for j in j0..levels {
        for band in &details_by_level[j as usize] {
            out.extend_from_slice(band);
        }
    }
    out
}

/// Matrix whose column `c` is the oracle transform of the `c`-th unit vector.
pub fn oracle_matrix(q: usize, levels: u32, j0: u32, filter: &WaveletFilter) -> Matrix {
    let len = 1usize << (levels as usize * q);
    let mut m = vec![vec![0.0; len]; len];
    for c in 0..len {
        let mut e = vec![0.0; len];
        e[c] = 1.0;
        for (r, v) in oracle_transform(&e, q, levels, j0, filter).into_iter().enumerate() {
            m[r][c] = v;
        }
    }
    m
}

/// Largest entry of `|M' M - I|`.
pub fn orthogonality_defect(m: &Matrix) -> f64 {
    let n = m.len();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let dot: f64 = (0..n).map(|r| m[r][i] * m[r][j]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).abs());
        }
    }
    worst
}
