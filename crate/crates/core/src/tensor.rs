use crate::error::{Error, Result};

/// A dense hypercubic tensor with `side` entries along each of `q` axes,
/// stored row-major (first axis slowest).
#[derive(Debug, Clone, PartialEq)]
pub struct GridTensor {
    q: usize,
    side: usize,
    data: Vec<f64>,
}

impl GridTensor {
    pub fn zeros(q: usize, side: usize) -> Self {
        GridTensor {
            q,
            side,
            data: vec![0.0; side.pow(q as u32)],
        }
    }

    pub fn from_vec(q: usize, side: usize, data: Vec<f64>) -> Result<Self> {
        let expected = side
            .checked_pow(q as u32)
            .ok_or_else(|| Error::BadShape(format!("{side}^{q} overflows")))?;
        if data.len() != expected {
            return Err(Error::BadShape(format!(
                "{} values cannot fill a {side}^{q} tensor",
                data.len()
            )));
        }
        Ok(GridTensor { q, side, data })
    }

    pub fn from_fn(q: usize, side: usize, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let len = side.pow(q as u32);
        let mut digits = vec![0usize; q];
        let mut data = Vec::with_capacity(len);
        for flat in 0..len {
            let mut rest = flat;
            for d in digits.iter_mut().rev() {
                *d = rest % side;
                rest /= side;
            }
            data.push(f(&digits));
        }
        GridTensor { q, side, data }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn flat_index(&self, digits: &[usize]) -> usize {
        digits.iter().fold(0, |acc, &d| acc * self.side + d)
    }

    pub fn get(&self, digits: &[usize]) -> f64 {
        self.data[self.flat_index(digits)]
    }

    pub fn same_shape(&self, other: &GridTensor) -> bool {
        self.q == other.q && self.side == other.side
    }

    pub fn map(mut self, f: impl Fn(f64) -> f64) -> Self {
        self.data.iter_mut().for_each(|v| *v = f(*v));
        self
    }
}
