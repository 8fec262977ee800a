//! Error and design distributions for the partial linear model.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Cauchy, ChiSquared, Distribution, Exp1, StandardNormal, StudentT};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Distribution of the additive errors `xi`. Every member has median 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ErrorDist {
    Gaussian { scale: f64 },
    Cauchy { scale: f64 },
    StudentT { df: f64 },
    Laplace { scale: f64 },
    /// Density `exp(-(x + ln 2))` on `x >= -ln 2`: median 0, `h(0) = 1/2`,
    /// `h'(0) = -1/2`.
    ShiftedExponential,
}

impl ErrorDist {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            ErrorDist::Gaussian { scale } => scale * rng.sample::<f64, _>(StandardNormal),
            ErrorDist::Cauchy { scale } => Cauchy::new(0.0, scale)
                .expect("validated scale")
                .sample(rng),
            ErrorDist::StudentT { df } => StudentT::new(df)
                .expect("validated degrees of freedom")
                .sample(rng),
            ErrorDist::Laplace { scale } => {
                let e: f64 = rng.sample(Exp1);
                if rng.gen::<bool>() {
                    scale * e
                } else {
                    -scale * e
                }
            }
            ErrorDist::ShiftedExponential => rng.sample::<f64, _>(Exp1) - LN_2,
        }
    }

    /// Error density at its median, `h(0)`.
    pub fn density_at_zero(&self) -> Result<f64> {
        let h0 = match *self {
            ErrorDist::Gaussian { scale } => 1.0 / (scale * (2.0 * PI).sqrt()),
            ErrorDist::Cauchy { scale } => 1.0 / (PI * scale),
            ErrorDist::StudentT { df } => {
                (ln_gamma((df + 1.0) / 2.0) - ln_gamma(df / 2.0)).exp() / (df * PI).sqrt()
            }
            ErrorDist::Laplace { scale } => 1.0 / (2.0 * scale),
            ErrorDist::ShiftedExponential => 0.5,
        };
        if h0.is_finite() && h0 > 0.0 {
            Ok(h0)
        } else {
            Err(Error::UnknownDensityValue(self.to_string()))
        }
    }

    pub fn is_symmetric(&self) -> bool {
        !matches!(self, ErrorDist::ShiftedExponential)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            ErrorDist::Gaussian { scale } => scale >= 0.0 && scale.is_finite(),
            ErrorDist::Cauchy { scale } | ErrorDist::Laplace { scale } => {
                scale > 0.0 && scale.is_finite()
            }
            ErrorDist::StudentT { df } => df > 0.0 && df.is_finite(),
            ErrorDist::ShiftedExponential => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::bad_value("error_dist", format!("invalid parameters in {self}")))
        }
    }
}

impl fmt::Display for ErrorDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErrorDist::Gaussian { scale } => write!(f, "gaussian({scale:?})"),
            ErrorDist::Cauchy { scale } => write!(f, "cauchy({scale:?})"),
            ErrorDist::StudentT { df } => write!(f, "student_t({df:?})"),
            ErrorDist::Laplace { scale } => write!(f, "laplace({scale:?})"),
            ErrorDist::ShiftedExponential => f.write_str("shifted_exponential"),
        }
    }
}

/// Splits `name(arg)` into the name and an optional numeric argument.
fn split_call(text: &str, key: &str) -> Result<(String, Option<f64>)> {
    let text = text.trim();
    let Some(open) = text.find('(') else {
        return Ok((text.to_ascii_lowercase(), None));
    };
    let inner = text[open + 1..]
        .strip_suffix(')')
        .ok_or_else(|| Error::bad_value(key, format!("unbalanced parentheses in `{text}`")))?;
    let arg = inner
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::bad_value(key, format!("`{inner}` is not a number")))?;
    Ok((text[..open].trim().to_ascii_lowercase(), Some(arg)))
}

impl FromStr for ErrorDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = split_call(s, "error_dist")?;
        let dist = match (name.as_str(), arg) {
            ("gaussian" | "normal", a) => ErrorDist::Gaussian { scale: a.unwrap_or(1.0) },
            ("cauchy", a) => ErrorDist::Cauchy { scale: a.unwrap_or(1.0) },
            ("laplace", a) => ErrorDist::Laplace { scale: a.unwrap_or(1.0) },
            ("student_t", Some(df)) => ErrorDist::StudentT { df },
            ("shifted_exponential", None) => ErrorDist::ShiftedExponential,
            _ => return Err(Error::bad_value("error_dist", format!("unknown distribution `{s}`"))),
        };
        dist.validate()?;
        Ok(dist)
    }
}

/// Elliptical family of the design vectors `X`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EllipticalFamily {
    Gaussian,
    StudentT { df: f64 },
    Cauchy,
    Laplace,
}

impl fmt::Display for EllipticalFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EllipticalFamily::Gaussian => f.write_str("gaussian"),
            EllipticalFamily::StudentT { df } => write!(f, "student_t({df:?})"),
            EllipticalFamily::Cauchy => f.write_str("cauchy"),
            EllipticalFamily::Laplace => f.write_str("laplace"),
        }
    }
}

/// Distribution of `X`: absent, or elliptical around 0 with scatter matrix
/// `covariance` (identity when `None`).
#[derive(Debug, Clone, PartialEq)]
pub enum DesignDist {
    None,
    Elliptical {
        family: EllipticalFamily,
        covariance: Option<Vec<Vec<f64>>>,
    },
}

impl DesignDist {
    pub fn parse_family(text: &str) -> Result<Self> {
        let (name, arg) = split_call(text, "design_dist")?;
        let family = match (name.as_str(), arg) {
            ("none", None) => return Ok(DesignDist::None),
            ("gaussian" | "normal", None) => EllipticalFamily::Gaussian,
            ("cauchy", None) => EllipticalFamily::Cauchy,
            ("laplace", None) => EllipticalFamily::Laplace,
            ("student_t", Some(df)) if df > 0.0 => EllipticalFamily::StudentT { df },
            _ => {
                return Err(Error::bad_value(
                    "design_dist",
                    format!("unknown design distribution `{text}`"),
                ))
            }
        };
        Ok(DesignDist::Elliptical {
            family,
            covariance: None,
        })
    }

    pub fn family_name(&self) -> String {
        match self {
            DesignDist::None => "none".into(),
            DesignDist::Elliptical { family, .. } => family.to_string(),
        }
    }
}

/// Draws from an elliptical distribution via `mu + A Z / sqrt(W)`-style
/// normal scale mixtures, `A A' = Sigma`.
#[derive(Debug, Clone)]
pub struct EllipticalSampler {
    family: EllipticalFamily,
    factor: DMatrix<f64>,
}

impl EllipticalSampler {
    pub fn new(family: EllipticalFamily, covariance: &DMatrix<f64>) -> Result<Self> {
        if !covariance.is_square() || covariance.nrows() == 0 {
            return Err(Error::BadCovariance);
        }
        let asymmetry = (covariance - covariance.transpose()).amax();
        if !(asymmetry <= 1e-12 * covariance.amax().max(1.0)) {
            return Err(Error::BadCovariance);
        }
        let factor = covariance
            .clone()
            .cholesky()
            .ok_or(Error::BadCovariance)?
            .l();
        Ok(EllipticalSampler { family, factor })
    }

    pub fn dimension(&self) -> usize {
        self.factor.nrows()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        let p = self.dimension();
        let z = DVector::from_fn(p, |_, _| rng.sample::<f64, _>(StandardNormal));
        let mixing = match self.family {
            EllipticalFamily::Gaussian => 1.0,
            EllipticalFamily::StudentT { df } => {
                let chi: f64 = ChiSquared::new(df).expect("validated df").sample(rng);
                (df / chi).sqrt()
            }
            EllipticalFamily::Cauchy => {
                let chi: f64 = ChiSquared::new(1.0).expect("df 1").sample(rng);
                chi.recip().sqrt()
            }
            EllipticalFamily::Laplace => rng.sample::<f64, _>(Exp1).sqrt(),
        };
        &self.factor * z * mixing
    }
}

/// Draws `count` vectors from an elliptical distribution.
pub fn sample_elliptical<R: Rng + ?Sized>(
    family: EllipticalFamily,
    covariance: &DMatrix<f64>,
    count: usize,
    rng: &mut R,
) -> Result<Vec<DVector<f64>>> {
    let sampler = EllipticalSampler::new(family, covariance)?;
    Ok((0..count).map(|_| sampler.sample(rng)).collect())
}
