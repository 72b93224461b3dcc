use std::io::Read;
use std::path::Path;

use anyhow::{bail, Context, Result};
use mcslab::presets::{self, Preset};
use mcslab::{
    Lottery, McsConfig, OracleConfig, PreferenceModel, ProblemSpec, PropGrids, PropId, Tolerance,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Everything a run can be configured with. Each subcommand reads the fields
/// it needs; command-line flags override the file.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<ProblemSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<PreferenceModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prop: Option<PropId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grids: Option<PropGrids>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<Tolerance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mcs: Option<McsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleRun>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchRun>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleRun {
    #[serde(default)]
    pub lotteries: Vec<Lottery>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<OracleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_error: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchRun {
    #[serde(default)]
    pub family: SearchFamily,
    #[serde(rename = "box")]
    pub param_box: Vec<(f64, f64)>,
    pub pairs: Vec<(f64, f64)>,
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_budget() -> usize {
    200
}

/// Parametrized problem family for the counterexample search.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchFamily {
    /// Quadratic portfolio with wealth as parameter, indexed by `(alpha, beta)`.
    #[default]
    Quadratic,
    /// A problem JSON in which the string `"{pK}"` stands for the `K`-th
    /// parameter, either as a whole value or inside a smooth-function name.
    Template(Value),
}

impl SearchFamily {
    pub fn build(&self, params: &[f64]) -> mcslab::Result<ProblemSpec> {
        match self {
            SearchFamily::Quadratic => presets::quadratic_family(params),
            SearchFamily::Template(t) => serde_json::from_value(fill_params(t, params))
                .map_err(|e| mcslab::Error::InvalidProblem(format!("search template: {e}"))),
        }
    }
}

fn fill_params(v: &Value, params: &[f64]) -> Value {
    match v {
        Value::String(s) => {
            let token = |k: usize| format!("{{p{k}}}");
            if let Some(k) = (0..params.len()).find(|&k| *s == token(k)) {
                return serde_json::json!(params[k]);
            }
            let mut out = s.clone();
            for (k, p) in params.iter().enumerate() {
                out = out.replace(&token(k), &p.to_string());
            }
            Value::String(out)
        }
        Value::Array(a) => Value::Array(a.iter().map(|x| fill_params(x, params)).collect()),
        Value::Object(o) => Value::Object(
            o.iter()
                .map(|(k, x)| (k.clone(), fill_params(x, params)))
                .collect(),
        ),
        other => other.clone(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

impl RunConfig {
    /// Reads a config file, or standard input when `path` is `-`.
    pub fn load(path: &Path) -> Result<Self> {
        let text = if path.as_os_str() == "-" {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .context("reading config from stdin")?;
            s
        } else {
            std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?
        };
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self =
            serde_json::from_str(text).map_err(|e| anyhow::anyhow!("schema error: {e}"))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if let Some(grid) = &self.theta_grid {
            ascending("theta_grid", grid)?;
        }
        if let Some(g) = &self.grids {
            ascending("grids.theta_grid", &g.theta_grid)?;
        }
        if let Some(z) = self.oracle.as_ref().and_then(|o| o.z_grid.as_ref()) {
            ascending("oracle.z_grid", z)?;
        }
        if let Some(p) = &self.problem {
            p.validate()?;
        }
        Ok(())
    }

    pub fn preset(&self) -> Result<Option<Preset>> {
        Ok(self.preset.as_deref().map(presets::preset).transpose()?)
    }

    /// The problem and its parameter grid, from explicit fields first and
    /// the preset second.
    pub fn problem_and_grid(&self) -> Result<(ProblemSpec, Vec<f64>)> {
        let preset = self.preset()?;
        let problem = match (&self.problem, &preset) {
            (Some(p), _) => p.clone(),
            (None, Some(p)) => p.problem.clone(),
            (None, None) => bail!("schema error: a `problem` or a `preset` is required"),
        };
        let grid = match (&self.theta_grid, &preset) {
            (Some(g), _) => g.clone(),
            (None, Some(p)) => p.theta_grid.clone(),
            (None, None) => bail!("schema error: `theta_grid` is required"),
        };
        ascending("theta_grid", &grid)?;
        Ok((problem, grid))
    }
}

fn ascending(name: &str, grid: &[f64]) -> Result<()> {
    if grid.iter().any(|v| !v.is_finite()) {
        bail!("schema error: `{name}` has non-finite entries");
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        bail!("schema error: `{name}` must be strictly ascending");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_fields_are_rejected() {
        let err = RunConfig::parse(r#"{"preset": "quadratic-dara", "thetas": [1]}"#).unwrap_err();
        assert!(err.to_string().contains("schema error"));
    }

    #[test]
    fn descending_grid_is_rejected() {
        assert!(RunConfig::parse(r#"{"theta_grid": [2, 1]}"#).is_err());
    }

    #[test]
    fn template_parameters() {
        let fam = SearchFamily::Template(serde_json::json!({
            "kind": "portfolio-wealth", "r": 1.0,
            "returns": {"support": [0.5, 2.0], "probs": [0.5, 0.5]},
            "model": {"kind": "eu", "u": "crra:{p0}:0.1"}
        }));
        assert!(fam.build(&[2.0]).is_ok());
        let fam = SearchFamily::Template(serde_json::json!({
            "kind": "portfolio-wealth", "r": 1.0,
            "returns": {"support": [0.5, 2.0], "probs": [0.5, 0.5]},
            "model": {"kind": "quadratic", "alpha": "{p0}", "beta": "{p1}"}
        }));
        let a = serde_json::to_value(fam.build(&[0.42, 0.57]).unwrap()).unwrap();
        let b = serde_json::to_value(presets::quadratic_family(&[0.42, 0.57]).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
