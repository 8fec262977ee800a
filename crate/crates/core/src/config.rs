//! TOML run configuration shared by `simulate` and `rate-study`.
//!
//! ```toml
//! q = 2
//! sample_sizes = [4096, 16384, 65536]
//! error_dist = "cauchy(1.0)"
//! design_dist = "cauchy"          # or { family = "cauchy", covariance = [[1, 0], [0, 1]] }
//! p = 2
//! beta = [1.0, -0.5]
//! test_function = "sine"
//! replications = 30
//! seed = 7
//! wavelet = "db4"
//! noise_mode = "estimate"         # "known" or a number for h(0)^-2
//! u0 = [0.3, 0.7]
//! ```

use std::fmt::Write as _;
use std::path::Path;

use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::estimator::{EstimatorConfig, NoiseMode};
use crate::medians::NoiseRule;
use crate::simulation::{DesignDist, ErrorDist, SimulationConfig};

pub const KEYS: &[&str] = &[
    "q",
    "p",
    "beta",
    "design_dist",
    "error_dist",
    "test_function",
    "sample_sizes",
    "replications",
    "seed",
    "wavelet",
    "j0",
    "block_cardinality",
    "noise_mode",
    "noise_rule",
    "u0",
];

/// A validated configuration with defaults applied.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub simulation: SimulationConfig,
    pub estimator: EstimatorConfig,
}

fn bad(key: &str, message: impl Into<String>) -> Error {
    Error::bad_value(key, message)
}

fn as_usize(key: &str, v: &Value) -> Result<usize> {
    v.as_integer()
        .and_then(|i| usize::try_from(i).ok())
        .ok_or_else(|| bad(key, format!("expected a non-negative integer, got {v}")))
}

fn as_f64(key: &str, v: &Value) -> Result<f64> {
    v.as_float()
        .or_else(|| v.as_integer().map(|i| i as f64))
        .ok_or_else(|| bad(key, format!("expected a number, got {v}")))
}

fn as_str<'a>(key: &str, v: &'a Value) -> Result<&'a str> {
    v.as_str()
        .ok_or_else(|| bad(key, format!("expected a string, got {v}")))
}

fn as_array<'a>(key: &str, v: &'a Value) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| bad(key, format!("expected an array, got {v}")))
}

fn parse_design(v: &Value) -> Result<DesignDist> {
    const KEY: &str = "design_dist";
    match v {
        Value::String(s) => DesignDist::parse_family(s),
        Value::Table(t) => {
            if let Some(unknown) = t
                .keys()
                .find(|k| !["family", "covariance"].contains(&k.as_str()))
            {
                return Err(bad(KEY, format!("unknown field `{unknown}`")));
            }
            let family = t
                .get("family")
                .ok_or_else(|| bad(KEY, "missing `family`"))
                .and_then(|f| as_str(KEY, f))?;
            let mut design = DesignDist::parse_family(family)?;
            if let (DesignDist::Elliptical { covariance, .. }, Some(rows)) =
                (&mut design, t.get("covariance"))
            {
                let parsed = as_array(KEY, rows)?
                    .iter()
                    .map(|row| as_array(KEY, row)?.iter().map(|x| as_f64(KEY, x)).collect())
                    .collect::<Result<Vec<Vec<f64>>>>()?;
                *covariance = Some(parsed);
            }
            Ok(design)
        }
        other => Err(bad(KEY, format!("expected a string or table, got {other}"))),
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: Table = text
            .parse()
            .map_err(|e: toml::de::Error| bad("<file>", e.to_string()))?;
        if let Some(unknown) = table.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(Error::UnknownKey(unknown.clone()));
        }
        let get = |k: &str| table.get(k);
        let require = |k: &str| get(k).ok_or_else(|| bad(k, "required key is missing"));

        let q = as_usize("q", require("q")?)?;
        let sample_sizes = as_array("sample_sizes", require("sample_sizes")?)?
            .iter()
            .map(|v| as_usize("sample_sizes", v))
            .collect::<Result<Vec<_>>>()?;
        let error_dist: ErrorDist = as_str("error_dist", require("error_dist")?)?.parse()?;

        let mut sim = SimulationConfig::new(q, error_dist, sample_sizes);
        if let Some(v) = get("p") {
            sim.p = as_usize("p", v)?;
        }
        if let Some(v) = get("beta") {
            sim.beta = as_array("beta", v)?
                .iter()
                .map(|x| as_f64("beta", x))
                .collect::<Result<_>>()?;
        }
        if let Some(v) = get("design_dist") {
            sim.design_dist = parse_design(v)?;
        }
        if let Some(v) = get("test_function") {
            sim.test_function = as_str("test_function", v)?.parse()?;
        }
        if let Some(v) = get("replications") {
            sim.replications = as_usize("replications", v)?;
        }
        if let Some(v) = get("seed") {
            // TOML integers are signed; accept the full u64 range via wrapping
            sim.seed = v
                .as_integer()
                .map(|i| i as u64)
                .ok_or_else(|| bad("seed", format!("expected an integer, got {v}")))?;
        }
        if let Some(v) = get("u0") {
            sim.u0 = Some(
                as_array("u0", v)?
                    .iter()
                    .map(|x| as_f64("u0", x))
                    .collect::<Result<_>>()?,
            );
        }

        let mut est = EstimatorConfig::default();
        if let Some(v) = get("wavelet") {
            est.filter = as_str("wavelet", v)?
                .parse()
                .map_err(|e: Error| bad("wavelet", e.to_string()))?;
        }
        if let Some(v) = get("j0") {
            est.j0 = Some(as_usize("j0", v)? as u32);
        }
        if let Some(v) = get("block_cardinality") {
            let l = as_usize("block_cardinality", v)?;
            if l == 0 {
                return Err(bad("block_cardinality", "must be at least 1"));
            }
            est.block_cardinality = Some(l);
        }
        if let Some(v) = get("noise_rule") {
            est.noise_rule = match as_str("noise_rule", v)? {
                "paired_median" => NoiseRule::PairedMedian,
                "paired_mean" => NoiseRule::PairedMean,
                other => return Err(bad("noise_rule", format!("unknown rule `{other}`"))),
            };
        }
        if let Some(v) = get("noise_mode") {
            est.noise_mode = match v {
                Value::String(s) if s == "estimate" => NoiseMode::Estimate,
                Value::String(s) if s == "known" => {
                    if sim.has_linear_part() {
                        return Err(bad(
                            "noise_mode",
                            "`known` needs the error density at zero, unavailable with a linear part",
                        ));
                    }
                    let h0 = sim.error_dist.density_at_zero()?;
                    NoiseMode::Known(h0.powi(-2))
                }
                other => {
                    let h = as_f64("noise_mode", other)?;
                    if !(h > 0.0 && h.is_finite()) {
                        return Err(bad("noise_mode", "h(0)^-2 must be positive"));
                    }
                    NoiseMode::Known(h)
                }
            };
        }

        sim.validate()?;
        Ok(RunConfig {
            simulation: sim,
            estimator: est,
        })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// Canonical TOML with every default spelled out.
    pub fn to_toml_string(&self) -> String {
        let sim = &self.simulation;
        let est = &self.estimator;
        let floats = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x:?}"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let mut out = String::new();
        let _ = writeln!(out, "q = {}", sim.q);
        let _ = writeln!(out, "p = {}", sim.p);
        let _ = writeln!(out, "beta = [{}]", floats(&sim.beta));
        match &sim.design_dist {
            DesignDist::Elliptical {
                family,
                covariance: Some(rows),
            } => {
                let rows: Vec<String> = rows.iter().map(|r| format!("[{}]", floats(r))).collect();
                let _ = writeln!(
                    out,
                    "design_dist = {{ family = \"{family}\", covariance = [{}] }}",
                    rows.join(", ")
                );
            }
            other => {
                let _ = writeln!(out, "design_dist = \"{}\"", other.family_name());
            }
        }
        let _ = writeln!(out, "error_dist = \"{}\"", sim.error_dist);
        let _ = writeln!(out, "test_function = \"{}\"", sim.test_function);
        let sizes: Vec<String> = sim.sample_sizes.iter().map(usize::to_string).collect();
        let _ = writeln!(out, "sample_sizes = [{}]", sizes.join(", "));
        let _ = writeln!(out, "replications = {}", sim.replications);
        let _ = writeln!(out, "seed = {}", sim.seed as i64);
        if let Some(u0) = &sim.u0 {
            let _ = writeln!(out, "u0 = [{}]", floats(u0));
        }
        let _ = writeln!(out, "wavelet = \"{}\"", est.filter);
        if let Some(j0) = est.j0 {
            let _ = writeln!(out, "j0 = {j0}");
        }
        if let Some(l) = est.block_cardinality {
            let _ = writeln!(out, "block_cardinality = {l}");
        }
        match est.noise_mode {
            NoiseMode::Estimate => {
                let _ = writeln!(out, "noise_mode = \"estimate\"");
            }
            NoiseMode::Known(h) => {
                let _ = writeln!(out, "noise_mode = {h:?}");
            }
        }
        let rule = match est.noise_rule {
            NoiseRule::PairedMedian => "paired_median",
            NoiseRule::PairedMean => "paired_mean",
        };
        let _ = writeln!(out, "noise_rule = \"{rule}\"");
        out
    }
}
