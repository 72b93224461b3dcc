//! Model-free Gateaux derivatives.
//!
//! The oracle only calls `V`. Along the mixture path `(1 - t) F + t delta_z`
//! the difference quotient tends to `u(z, F) - E_F u(., F)`, the local
//! utility centered at `F`; comparisons are therefore made modulo constants.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ambiguity::AmbiguityModel;
use crate::error::{Error, Result};
use crate::lottery::Lottery;
use crate::preferences::PreferenceModel;

/// Mixture weights and extrapolation settings of the oracle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConfig")]
pub struct OracleConfig {
    steps: Vec<f64>,
    extrapolate: bool,
    order: usize,
}

#[derive(Deserialize)]
struct RawConfig {
    steps: Vec<f64>,
    #[serde(default = "yes")]
    extrapolate: bool,
    #[serde(default = "one")]
    order: usize,
}

fn yes() -> bool {
    true
}

fn one() -> usize {
    1
}

impl TryFrom<RawConfig> for OracleConfig {
    type Error = Error;

    fn try_from(r: RawConfig) -> Result<Self> {
        OracleConfig::new(r.steps, r.extrapolate)?.with_order(r.order)
    }
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            steps: vec![1e-3, 5e-4, 2.5e-4],
            extrapolate: true,
            order: 1,
        }
    }
}

impl OracleConfig {
    pub fn new(steps: Vec<f64>, extrapolate: bool) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::OracleConfig("no steps".into()));
        }
        if let Some(t) = steps.iter().find(|&&t| !(t > 0.0 && t <= 0.1)) {
            return Err(Error::OracleConfig(format!("step {t} outside (0, 0.1]")));
        }
        if steps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::OracleConfig(
                "steps must be strictly descending".into(),
            ));
        }
        Ok(Self {
            steps,
            extrapolate,
            order: 1,
        })
    }

    /// Number of leading error terms removed by extrapolation, using the
    /// `order + 1` smallest steps.
    pub fn with_order(mut self, order: usize) -> Result<Self> {
        if order == 0 || order >= self.steps.len().max(2) {
            return Err(Error::OracleConfig(format!(
                "extrapolation order {order} needs between 1 and {} steps",
                self.steps.len().saturating_sub(1)
            )));
        }
        self.order = order;
        Ok(self)
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    pub fn extrapolate(&self) -> bool {
        self.extrapolate
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Combine quotients `q[i]` taken at abscissae `x[i]` (step or squared
    /// step) into the limit at zero.
    fn combine(&self, x: &[f64], q: &[f64]) -> f64 {
        let n = q.len();
        if !self.extrapolate || n == 1 {
            return q[n - 1];
        }
        let k = (self.order + 1).min(n);
        neville_at_zero(&x[n - k..], &q[n - k..])
    }
}

/// Value at 0 of the polynomial interpolating `(x_i, y_i)`.
fn neville_at_zero(x: &[f64], y: &[f64]) -> f64 {
    let mut p = y.to_vec();
    let n = p.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (x[i + m] * p[i] - x[i] * p[i + 1]) / (x[i + m] - x[i]);
        }
    }
    p[0]
}

/// `[V((1 - t) F + t delta_z) - V(F)] / t`.
pub fn raw_quotient(model: &PreferenceModel, z: f64, f: &Lottery, t: f64) -> Result<f64> {
    let base = model.evaluate(f)?;
    quotient(model, z, f, t, base)
}

fn quotient(model: &PreferenceModel, z: f64, f: &Lottery, t: f64, base: f64) -> Result<f64> {
    let moved = f.mix(&Lottery::degenerate(z), t)?;
    let v = model.evaluate(&moved)?;
    let q = (v - base) / t;
    if q.is_finite() {
        Ok(q)
    } else {
        Err(Error::NonFinite(format!("Gateaux quotient at t = {t}")))
    }
}

/// Numeric centered local utility `u(z, F) - E_F u(., F)`.
pub fn gateaux_local(
    model: &PreferenceModel,
    z: f64,
    f: &Lottery,
    cfg: &OracleConfig,
) -> Result<f64> {
    model.domain().check(z)?;
    let base = model.evaluate(f)?;
    let q = cfg
        .steps
        .iter()
        .map(|&t| quotient(model, z, f, t, base))
        .collect::<Result<Vec<_>>>()?;
    Ok(cfg.combine(&cfg.steps, &q))
}

/// Analytic local utility centered at `F`.
pub fn centered_local(model: &PreferenceModel, z: f64, f: &Lottery) -> Result<f64> {
    let mean = f
        .iter()
        .map(|(s, p)| Ok(p * model.local_utility(s, f)?))
        .sum::<Result<f64>>()?;
    Ok(model.local_utility(z, f)? - mean)
}

/// Largest `|analytic - numeric|` over `z_grid`, both centered.
pub fn oracle_compare(
    model: &PreferenceModel,
    f: &Lottery,
    z_grid: &[f64],
    cfg: &OracleConfig,
) -> Result<f64> {
    z_grid
        .par_iter()
        .map(|&z| Ok((centered_local(model, z, f)? - gateaux_local(model, z, f, cfg)?).abs()))
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// Numeric derivative of `I(gamma; theta)` in the utility of state `s`, by
/// central differences with steps `cfg.steps` and extrapolation in `h^2`.
pub fn act_local(
    model: &AmbiguityModel,
    s: f64,
    gamma: &dyn Fn(f64) -> f64,
    theta: Option<f64>,
    cfg: &OracleConfig,
) -> Result<f64> {
    let bump = |h: f64| {
        move |t: f64| {
            if (t - s).abs() <= crate::lottery::MERGE_TOL {
                gamma(t) + h
            } else {
                gamma(t)
            }
        }
    };
    let q = cfg
        .steps
        .iter()
        .map(|&h| {
            let up = model.evaluate_utilities(&bump(h), theta)?;
            let down = model.evaluate_utilities(&bump(-h), theta)?;
            Ok((up - down) / (2.0 * h))
        })
        .collect::<Result<Vec<_>>>()?;
    let x: Vec<f64> = cfg.steps.iter().map(|h| h * h).collect();
    Ok(cfg.combine(&x, &q))
}

/// Largest `|analytic - numeric|` local utility over the model's states.
pub fn act_compare(
    model: &AmbiguityModel,
    gamma: &dyn Fn(f64) -> f64,
    theta: Option<f64>,
    cfg: &OracleConfig,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for s in model.states() {
        let a = model.local_utility_utilities(s, gamma, theta)?;
        worst = worst.max((a - act_local(model, s, gamma, theta, cfg)?).abs());
    }
    Ok(worst)
}
