use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Per-axis step levels of [`TestFunction::Blocks`] on the cells
/// `((k - 1)/8, k/8]`; they sum to zero so the product integrates to zero.
const BLOCK_LEVELS: [f64; 8] = [0.0, 1.0, 1.0, -1.5, 0.0, 1.5, -0.5, -1.5];

/// Built-in mean functions on `[0, 1]^q`, all integrating to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestFunction {
    /// `prod_s sin(2 pi u_s)`.
    ProductSine,
    /// Tensor product of a centred piecewise-constant profile with jumps on
    /// the dyadic eighths.
    Blocks,
    Zero,
}

impl TestFunction {
    pub fn evaluate(&self, u: &[f64]) -> f64 {
        match self {
            TestFunction::ProductSine => u.iter().map(|&x| (TAU * x).sin()).product(),
            TestFunction::Blocks => u
                .iter()
                .map(|&x| {
                    let cell = (x.clamp(0.0, 1.0) * 8.0).ceil() as usize;
                    BLOCK_LEVELS[cell.clamp(1, 8) - 1]
                })
                .product(),
            TestFunction::Zero => 0.0,
        }
    }

    /// Smoothness label used for rate targets; not a verified Besov index.
    pub fn nominal_alpha(&self) -> f64 {
        match self {
            TestFunction::ProductSine => 2.0,
            TestFunction::Blocks => 1.0,
            TestFunction::Zero => f64::INFINITY,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            TestFunction::ProductSine => "sine",
            TestFunction::Blocks => "blocks",
            TestFunction::Zero => "zero",
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sine" | "product_sine" => Ok(TestFunction::ProductSine),
            "blocks" => Ok(TestFunction::Blocks),
            "zero" => Ok(TestFunction::Zero),
            _ => Err(Error::bad_value("test_function", format!("unknown test function `{s}`"))),
        }
    }
}
