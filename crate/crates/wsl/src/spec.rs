//! Manifold and sequence specification files.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use wsl_core::families::{self, LakzianParams};
use wsl_core::math::PI;
use wsl_core::sequence::Sequence;
use wsl_core::{ClosedForm, WarpingFunction};

use crate::expr::Expression;
use crate::CliError;

/// `{family, params}` or `{samples, domain_end}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ManifoldSpec {
    Family {
        family: String,
        #[serde(default)]
        params: Map<String, Value>,
    },
    Samples {
        samples: Vec<f64>,
        domain_end: f64,
    },
}

/// Extra data of a generated thin-spline sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LakzianSummary {
    pub delta: f64,
    pub l_spline: f64,
    pub epsilon: f64,
    pub s_neck: f64,
    pub s_delta: f64,
    pub s_equator: f64,
    /// Smallest `4 m_H′/r²` on a fine `r` grid; positive by construction.
    pub min_analytic_scalar: f64,
}

pub struct Built {
    pub warping: WarpingFunction,
    pub lakzian: Option<LakzianSummary>,
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T, CliError> {
    serde_json::from_str(text)
        .map_err(|e| CliError::Parse(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column())))
}

pub fn load_manifold(path: &Path) -> Result<(ManifoldSpec, String), CliError> {
    let text = read_text(path)?;
    Ok((parse_json(path, &text)?, text))
}

impl ManifoldSpec {
    pub fn build(&self) -> Result<Built, CliError> {
        match self {
            ManifoldSpec::Family { family, params } => build_family(family, params),
            ManifoldSpec::Samples { samples, domain_end } => {
                let p = families::custom_profile(samples.clone(), *domain_end)?;
                Ok(Built { warping: p.warping, lakzian: None })
            }
        }
    }
}

struct Params<'a> {
    family: &'a str,
    map: &'a Map<String, Value>,
}

impl Params<'_> {
    fn allow(&self, keys: &[&str]) -> Result<(), CliError> {
        for k in self.map.keys() {
            if !keys.contains(&k.as_str()) {
                return Err(CliError::Parse(format!(
                    "unknown parameter `{k}` for family `{}` (expected one of {keys:?})",
                    self.family
                )));
            }
        }
        Ok(())
    }

    fn num(&self, key: &str, default: Option<f64>) -> Result<f64, CliError> {
        match self.map.get(key) {
            Some(v) => v
                .as_f64()
                .ok_or_else(|| CliError::Parse(format!("parameter `{key}` of `{}` must be a number", self.family))),
            None => default.ok_or_else(|| CliError::Parse(format!("family `{}` needs parameter `{key}`", self.family))),
        }
    }

    fn int(&self, key: &str, default: Option<u64>) -> Result<u64, CliError> {
        let v = self.num(key, default.map(|d| d as f64))?;
        if v < 0.0 || v.fract() != 0.0 || v > u32::MAX as f64 {
            return Err(CliError::Parse(format!(
                "parameter `{key}` of `{}` must be a non-negative integer",
                self.family
            )));
        }
        Ok(v as u64)
    }

    fn text(&self, key: &str) -> Result<&str, CliError> {
        self.map
            .get(key)
            .and_then(Value::as_str)
            .ok_or_else(|| CliError::Parse(format!("family `{}` needs string parameter `{key}`", self.family)))
    }
}

pub const FAMILIES: [&str; 6] = ["round_sphere", "scaled_sine", "collapsing", "lakzian", "sine_series", "expression"];

pub fn build_family(family: &str, map: &Map<String, Value>) -> Result<Built, CliError> {
    let p = Params { family, map };
    let plain = |w: WarpingFunction| Ok(Built { warping: w, lakzian: None });
    match family {
        "round_sphere" => {
            p.allow(&["radius"])?;
            plain(families::round_sphere(p.num("radius", Some(1.0))?)?)
        }
        "scaled_sine" => {
            p.allow(&["amplitude", "radius"])?;
            plain(families::scaled_sine(p.num("amplitude", None)?, p.num("radius", Some(1.0))?)?)
        }
        "collapsing" => {
            p.allow(&["j"])?;
            plain(families::collapsing_family(p.int("j", None)? as u32)?)
        }
        "lakzian" => {
            p.allow(&["delta", "l_spline", "grid"])?;
            let params = LakzianParams {
                delta: p.num("delta", None)?,
                l_spline: p.num("l_spline", None)?,
                grid: p.int("grid", Some(8192))? as usize,
            };
            let lz = families::lakzian_family(params)?;
            let min_analytic_scalar =
                (1..=20_000).map(|i| lz.mass.scalar_curvature(i as f64 / 20_000.0)).fold(f64::INFINITY, f64::min);
            Ok(Built {
                lakzian: Some(LakzianSummary {
                    delta: params.delta,
                    l_spline: params.l_spline,
                    epsilon: lz.epsilon,
                    s_neck: lz.s_neck,
                    s_delta: lz.s_delta,
                    s_equator: lz.s_equator,
                    min_analytic_scalar,
                }),
                warping: lz.warping,
            })
        }
        "sine_series" => {
            p.allow(&["terms", "domain_end"])?;
            let terms: Vec<(f64, f64)> = serde_json::from_value(map.get("terms").cloned().unwrap_or(Value::Null))
                .map_err(|e| CliError::Parse(format!("sine_series terms must be [[a, w], ...]: {e}")))?;
            let form = ClosedForm::SineSeries { terms, domain_end: p.num("domain_end", Some(PI))? };
            plain(WarpingFunction::closed_form(form)?)
        }
        "expression" => {
            p.allow(&["f", "domain_end", "grid", "smooth"])?;
            let e = Expression::compile(p.text("f")?, "s")?;
            let l = p.num("domain_end", None)?;
            let n = p.int("grid", Some(4097))? as usize;
            if n < 8 {
                return Err(CliError::Parse("expression grid needs at least 8 nodes".into()));
            }
            let mut samples = Vec::with_capacity(n);
            for i in 0..n {
                let s = if i + 1 == n { l } else { l * i as f64 / (n - 1) as f64 };
                samples.push(e.eval(s)?);
            }
            let width = p.int("smooth", Some(0))? as usize;
            let samples = families::smooth_samples(&samples, width);
            Ok(Built { warping: families::custom_profile(samples, l)?.warping, lakzian: None })
        }
        other => Err(CliError::Parse(format!("unknown family `{other}` (known: {FAMILIES:?})"))),
    }
}

/// A parameter given per index, as a list or as a formula in `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Schedule {
    Values(Vec<f64>),
    Formula(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceSpec {
    pub family: String,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default)]
    pub schedule: BTreeMap<String, Schedule>,
    pub indices: Vec<u32>,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(default)]
    pub grid: Option<usize>,
}

impl SequenceSpec {
    pub fn member_params(&self, pos: usize) -> Result<Map<String, Value>, CliError> {
        let j = self.indices[pos];
        let mut map = self.params.clone();
        for (key, sched) in &self.schedule {
            let v = match sched {
                Schedule::Values(vals) => *vals.get(pos).ok_or_else(|| {
                    CliError::Parse(format!(
                        "schedule `{key}` has {} values for {} indices",
                        vals.len(),
                        self.indices.len()
                    ))
                })?,
                Schedule::Formula(text) => Expression::compile(text, "j")?.eval(j as f64)?,
            };
            let v = serde_json::Number::from_f64(v)
                .ok_or_else(|| CliError::Parse(format!("schedule `{key}` is not finite at j = {j}")))?;
            map.insert(key.clone(), Value::Number(v));
        }
        Ok(map)
    }

    pub fn build(&self) -> Result<Sequence, CliError> {
        use rayon::prelude::*;
        let members: Vec<WarpingFunction> = (0..self.indices.len())
            .into_par_iter()
            .map(|i| Ok(build_family(&self.family, &self.member_params(i)?)?.warping))
            .collect::<Result<_, CliError>>()?;
        let grid = self.grid.unwrap_or(wsl_core::sequence::DEFAULT_SEQUENCE_GRID);
        Ok(Sequence::with_grid(self.indices.clone(), members, self.d, grid)?)
    }
}
