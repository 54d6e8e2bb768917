//! JSON run configuration with strict field checking.

use std::fmt;
use std::path::PathBuf;

use qha_core::grid::{ConfigGrid, PhaseGrid};
use qha_core::hermite::{HermiteBasis, SYMPLECTIC_SCALE};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Result, RunError};
use crate::io::MeasureFile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Verify,
    Equivalence,
    Restriction,
    Growth,
    Diagnostics,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Verify => "verify",
            Experiment::Equivalence => "equivalence",
            Experiment::Restriction => "restriction",
            Experiment::Growth => "growth",
            Experiment::Diagnostics => "diagnostics",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Lebesgue/Schatten exponent; `"inf"` in JSON stands for `p = ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent(pub f64);

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Exponent;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Exponent, E> {
                Ok(Exponent(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Exponent, E> {
                Ok(Exponent(v as f64))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Exponent, E> {
                Ok(Exponent(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Exponent, E> {
                match v {
                    "inf" | "Infinity" | "infinity" => Ok(Exponent(f64::INFINITY)),
                    _ => Err(E::custom(format!("unknown exponent {v:?}"))),
                }
            }
        }
        d.deserialize_any(V)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        if self.0.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default = "default_format")]
    pub format: Format,
}

fn default_format() -> Format {
    Format::Json
}

/// Complete description of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub d: usize,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L_x")]
    pub l_x: f64,
    #[serde(rename = "N_x")]
    pub n_x: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub seed: u64,
    pub experiment: Experiment,
    pub p_grid: Vec<Exponent>,
    pub output: Output,
    /// Dilation of the Hermite basis; defaults to `(2π)^{−1/2}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hermite_scale: Option<f64>,
    /// Support radii for `equivalence` and `growth`.
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
    #[serde(default = "default_family_size")]
    pub family_size: usize,
    #[serde(default = "default_bootstrap")]
    pub bootstrap: usize,
    #[serde(default)]
    pub atom_clouds: usize,
    /// Measure for `restriction` and `diagnostics`; a 256-atom unit circle when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureFile>,
}

fn default_radii() -> Vec<f64> {
    vec![1.0, 2.0, 4.0]
}

fn default_family_size() -> usize {
    32
}

fn default_bootstrap() -> usize {
    1000
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            d: 1,
            l: 8.0,
            n: 256,
            l_x: 8.0,
            n_x: 256,
            m: 64,
            seed: 0,
            experiment: Experiment::Verify,
            p_grid: [1.0, 1.5, 2.0, 4.0, f64::INFINITY].into_iter().map(Exponent).collect(),
            output: Output { path: None, format: Format::Json },
            hermite_scale: None,
            radii: default_radii(),
            family_size: default_family_size(),
            bootstrap: default_bootstrap(),
            atom_clouds: 0,
            measure: None,
        }
    }
}

/// First line of `text` that carries `"field"` as a JSON key, else line 1.
fn locate(text: &str, field: &str) -> usize {
    let key = format!("\"{field}\"");
    text.lines()
        .position(|line| line.find(&key).is_some_and(|at| line[at + key.len()..].trim_start().starts_with(':')))
        .map_or(1, |i| i + 1)
}

fn backticked(msg: &str) -> Option<&str> {
    let start = msg.find('`')? + 1;
    let len = msg[start..].find('`')?;
    Some(&msg[start..start + len])
}

impl RunConfig {
    /// Parses and validates; every failure names a line and a field.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| {
            let msg = e.to_string();
            let field = if msg.contains("unknown field") || msg.contains("missing field") {
                backticked(&msg).unwrap_or("?").to_string()
            } else {
                "?".to_string()
            };
            RunError::Config { line: e.line().max(1), field, reason: msg }
        })?;
        cfg.validate().map_err(|(field, reason)| RunError::Config { line: locate(text, field), field: field.into(), reason })?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks every grid and exponent invariant without building any basis.
    pub fn validate(&self) -> std::result::Result<(), (&'static str, String)> {
        let core = |e: qha_core::Error| match e {
            qha_core::Error::Config { field, reason } => (field, reason),
            other => ("?", other.to_string()),
        };
        PhaseGrid::new(self.d, self.l, self.n).map_err(core)?;
        ConfigGrid::new(self.d, self.l_x, self.n_x).map_err(core)?;
        if self.l_x > self.l {
            return Err(("L_x", format!("must not exceed L = {}, got {}", self.l, self.l_x)));
        }
        if self.m == 0 {
            return Err(("M", "must be a positive integer".into()));
        }
        if self.p_grid.is_empty() {
            return Err(("p_grid", "must list at least one exponent".into()));
        }
        if let Some(p) = self.p_grid.iter().find(|p| p.0.is_nan() || p.0 < 1.0) {
            return Err(("p_grid", format!("exponents must be >= 1, got {p}")));
        }
        if let Some(s) = self.hermite_scale {
            if !(s.is_finite() && s > 0.0) {
                return Err(("hermite_scale", format!("must be positive and finite, got {s}")));
            }
        }
        if self.radii.is_empty() || self.radii.iter().any(|r| !(r.is_finite() && *r >= 1.0 && *r <= self.l / 2.0)) {
            return Err(("radii", format!("need at least one radius in [1, L/2 = {}]", self.l / 2.0)));
        }
        if self.family_size == 0 {
            return Err(("family_size", "must be positive".into()));
        }
        if self.bootstrap == 0 {
            return Err(("bootstrap", "must be positive".into()));
        }
        Ok(())
    }

    pub fn phase_grid(&self) -> Result<PhaseGrid> {
        Ok(PhaseGrid::new(self.d, self.l, self.n)?)
    }

    pub fn config_grid(&self) -> Result<ConfigGrid> {
        Ok(ConfigGrid::new(self.d, self.l_x, self.n_x)?)
    }

    pub fn basis(&self) -> Result<HermiteBasis> {
        Ok(HermiteBasis::with_scale(self.config_grid()?, self.m, self.hermite_scale.unwrap_or(SYMPLECTIC_SCALE))?)
    }

    pub fn exponents(&self) -> Vec<f64> {
        self.p_grid.iter().map(|p| p.0).collect()
    }
}
