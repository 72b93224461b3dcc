//! Decision environments: an action `x`, a parameter `theta` and the
//! objective `U(x, theta)` they induce.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ambiguity::AmbiguityModel;
use crate::conditions::{check_axis, GridFn, Tolerance};
use crate::error::{Error, Result};
use crate::lottery::{Lottery, LotteryFamily, OutcomeDomain};
use crate::mcs::{argmax_set, is_quasiconcave, ArgmaxConfig};
use crate::preferences::{ModelFamily, PreferenceModel};

/// Step of the central differences taken in `x` by [`build_surface`].
pub const SURFACE_STEP: f64 = 1e-5;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProblemSpec {
    /// `theta` indexes risk attitudes; outcome `w r + x (s - r)`.
    PortfolioRiskAversion {
        w: f64,
        r: f64,
        returns: Lottery,
        family: ModelFamily,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x_max: Option<f64>,
    },
    /// `theta` is initial wealth `w`.
    PortfolioWealth {
        r: f64,
        returns: Lottery,
        model: PreferenceModel,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x_max: Option<f64>,
    },
    /// Two-period saving under a zero-mean second-period risk `eps`.
    Precautionary {
        w: f64,
        eps: Lottery,
        family: ModelFamily,
        variant: PrecautionaryVariant,
    },
    /// `theta` moves the distribution `g(.; theta)` of the risky return.
    SignalPortfolio {
        w: f64,
        r: f64,
        family: LotteryFamily,
        model: PreferenceModel,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x_max: Option<f64>,
    },
    /// Portfolio choice under smooth ambiguity over the return distribution.
    AmbiguityPortfolio {
        #[serde(default)]
        w: f64,
        r: f64,
        model: AmbiguityModel,
        variant: AmbiguityVariant,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x_max: Option<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PrecautionaryVariant {
    /// Choose saving `y`: `V(delta_{w - y})` today plus `V(F_{y + eps})`.
    Saving,
    /// Choose exposure `x` to `s` maximizing `-dV(F_{y + x s}) / dy`.
    Kimball {
        y: f64,
        s: Lottery,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x_max: Option<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AmbiguityVariant {
    /// `theta` is the attitude parameter.
    Attitude {
        #[serde(default)]
        w: Option<f64>,
    },
    /// `theta` is wealth; the attitude parameter is fixed.
    Wealth {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        attitude_theta: Option<f64>,
    },
}

/// The problem with its parameter fixed and models resolved.
pub struct Instance<'a> {
    spec: &'a ProblemSpec,
    theta: f64,
    model: Option<PreferenceModel>,
    states: Option<Lottery>,
    eps_override: Option<Lottery>,
}

/// How `x` maps a return state `s` into an outcome.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Portfolio {
    pub w: f64,
    pub r: f64,
}

impl Portfolio {
    pub fn outcome(&self, s: f64, x: f64) -> f64 {
        self.w * self.r + x * (s - self.r)
    }

    /// Largest `x` with every outcome of `states` inside `domain`.
    pub fn cap(&self, states: &[f64], domain: OutcomeDomain) -> Result<f64> {
        let base = self.w * self.r;
        if !domain.contains(base) {
            return Err(Error::InvalidProblem(format!(
                "safe outcome w r = {base} lies outside the outcome domain"
            )));
        }
        let mut cap = f64::INFINITY;
        for &s in states {
            let slope = s - self.r;
            if slope < 0.0 {
                cap = cap.min((base - domain.lower()) / -slope);
            } else if slope > 0.0 {
                cap = cap.min((domain.upper() - base) / slope);
            }
        }
        Ok(cap)
    }
}

fn portfolio_domain(
    p: Portfolio,
    x_max: Option<f64>,
    states: &[f64],
    domain: OutcomeDomain,
) -> Result<(f64, f64)> {
    let hi = x_max.unwrap_or(p.w).min(p.cap(states, domain)?);
    if !(hi > 0.0) {
        return Err(Error::InvalidProblem(format!(
            "empty action domain [0, {hi}]"
        )));
    }
    Ok((0.0, hi))
}

impl ProblemSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ProblemSpec::PortfolioRiskAversion { .. } => "portfolio-risk-aversion",
            ProblemSpec::PortfolioWealth { .. } => "portfolio-wealth",
            ProblemSpec::Precautionary { .. } => "precautionary",
            ProblemSpec::SignalPortfolio { .. } => "signal-portfolio",
            ProblemSpec::AmbiguityPortfolio { .. } => "ambiguity-portfolio",
        }
    }

    /// Checks the structural assumptions of the environment.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidProblem(m));
        let check_returns = |r: f64, returns: &Lottery| -> Result<()> {
            if !(r > 0.0) {
                return bad(format!("safe return r = {r} must be positive"));
            }
            if returns.min() < 0.0 {
                return bad("risky returns must be nonnegative".into());
            }
            Ok(())
        };
        match self {
            ProblemSpec::PortfolioRiskAversion { w, r, returns, .. } => {
                check_returns(*r, returns)?;
                if !(*w > 0.0) {
                    return bad(format!("wealth w = {w} must be positive"));
                }
                premium(returns.mean(), *r)
            }
            ProblemSpec::PortfolioWealth { r, returns, .. } => {
                check_returns(*r, returns)?;
                premium(returns.mean(), *r)
            }
            ProblemSpec::SignalPortfolio { w, r, .. } => {
                if !(*w > 0.0 && *r > 0.0) {
                    return bad(format!("w = {w} and r = {r} must be positive"));
                }
                Ok(())
            }
            ProblemSpec::AmbiguityPortfolio { r, model, .. } => {
                if !(*r > 0.0) {
                    return bad(format!("safe return r = {r} must be positive"));
                }
                if model.states().first().is_some_and(|&s| s < 0.0) {
                    return bad("risky returns must be nonnegative".into());
                }
                let mean: f64 = model
                    .prior_table()
                    .iter()
                    .map(|(_, pi, f)| pi * f.mean())
                    .sum();
                premium(mean, *r)
            }
            ProblemSpec::Precautionary {
                w, eps, variant, ..
            } => {
                if !(*w > 0.0) {
                    return bad(format!("wealth w = {w} must be positive"));
                }
                if eps.mean().abs() > 1e-12 {
                    return bad(format!("risk eps has mean {} instead of zero", eps.mean()));
                }
                if let PrecautionaryVariant::Kimball { s, .. } = variant {
                    if !(s.mean() > 0.0) {
                        return bad(format!(
                            "risk s has mean {} but must have a positive mean",
                            s.mean()
                        ));
                    }
                }
                Ok(())
            }
        }
    }

    /// Resolves the models and distributions that depend on `theta`.
    pub fn at(&self, theta: f64) -> Result<Instance<'_>> {
        if !theta.is_finite() {
            return Err(Error::InvalidProblem(format!(
                "parameter {theta} is not finite"
            )));
        }
        let (model, states) = match self {
            ProblemSpec::PortfolioRiskAversion { family, .. }
            | ProblemSpec::Precautionary { family, .. } => (Some(family.at(theta)?), None),
            ProblemSpec::PortfolioWealth { model, .. } => (Some(model.clone()), None),
            ProblemSpec::SignalPortfolio { family, model, .. } => {
                (Some(model.clone()), Some(family.at(theta)?))
            }
            ProblemSpec::AmbiguityPortfolio { .. } => (None, None),
        };
        Ok(Instance {
            spec: self,
            theta,
            model,
            states,
            eps_override: None,
        })
    }

    pub fn objective(&self, x: f64, theta: f64) -> Result<f64> {
        self.at(theta)?.objective(x)
    }

    pub fn action_domain(&self, theta: f64) -> Result<(f64, f64)> {
        self.at(theta)?.action_domain()
    }

    /// Safe return and the wealth that applies at `theta`, for the portfolio
    /// environments.
    pub fn portfolio(&self, theta: f64) -> Option<Portfolio> {
        match *self {
            ProblemSpec::PortfolioRiskAversion { w, r, .. }
            | ProblemSpec::SignalPortfolio { w, r, .. } => Some(Portfolio { w, r }),
            ProblemSpec::PortfolioWealth { r, .. } => Some(Portfolio { w: theta, r }),
            ProblemSpec::AmbiguityPortfolio {
                w, r, ref variant, ..
            } => Some(Portfolio {
                w: match variant {
                    AmbiguityVariant::Attitude { w: Some(w) } => *w,
                    AmbiguityVariant::Attitude { w: None } => w,
                    AmbiguityVariant::Wealth { .. } => theta,
                },
                r,
            }),
            ProblemSpec::Precautionary { .. } => None,
        }
    }

    /// Distribution of the excess `t = x (s - r)` for the portfolio problems
    /// whose return distribution does not move with `theta`.
    pub fn excess_lottery(&self, x: f64) -> Result<Lottery> {
        match self {
            ProblemSpec::PortfolioRiskAversion { r, returns, .. }
            | ProblemSpec::PortfolioWealth { r, returns, .. } => {
                returns.pushforward(|s| x * (s - r))
            }
            _ => Err(self.missing("H(t; x)")),
        }
    }

    fn missing(&self, what: &str) -> Error {
        Error::InvalidProblem(format!("{} problems do not expose {what}", self.kind()))
    }

    /// Samples `H(t; x) = P(x (s - r) <= t)` over `(x, t)`. Every `x` must be
    /// positive.
    pub fn h_samples(&self, x_grid: &[f64], t_grid: &[f64]) -> Result<GridFn> {
        self.excess_samples(x_grid, t_grid, |l, t| l.cdf(t))
    }

    /// Probability mass of `x (s - r)` at `t`.
    pub fn pmf_samples(&self, x_grid: &[f64], t_grid: &[f64]) -> Result<GridFn> {
        self.excess_samples(x_grid, t_grid, |l, t| l.mass_at(t))
    }

    /// `int_{-inf}^t H(tau; x) d tau`.
    pub fn integrated_h_samples(&self, x_grid: &[f64], t_grid: &[f64]) -> Result<GridFn> {
        self.excess_samples(x_grid, t_grid, |l, t| l.integrated_cdf(t))
    }

    fn excess_samples(
        &self,
        x_grid: &[f64],
        t_grid: &[f64],
        f: impl Fn(&Lottery, f64) -> f64,
    ) -> Result<GridFn> {
        check_axis(x_grid)?;
        check_axis(t_grid)?;
        if x_grid[0] <= 0.0 {
            return Err(Error::InvalidGrid("H(t; x) needs x > 0".into()));
        }
        let lotteries = x_grid
            .iter()
            .map(|&x| self.excess_lottery(x))
            .collect::<Result<Vec<_>>>()?;
        let values = lotteries
            .iter()
            .flat_map(|l| t_grid.iter().map(|&t| f(l, t)).collect::<Vec<_>>())
            .collect();
        GridFn::new(vec![x_grid.to_vec(), t_grid.to_vec()], values)
    }
}

fn premium(mean: f64, r: f64) -> Result<()> {
    if mean > r {
        Ok(())
    } else {
        Err(Error::InvalidProblem(format!(
            "expected return {mean} does not exceed the safe return {r}"
        )))
    }
}

impl Instance<'_> {
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// The preference model in force at this parameter, if the problem has
    /// one (ambiguity problems carry an act-based model instead).
    pub fn model(&self) -> Option<&PreferenceModel> {
        self.model.as_ref()
    }

    fn pref(&self) -> &PreferenceModel {
        self.model
            .as_ref()
            .expect("preference model resolved in ProblemSpec::at")
    }

    /// Return distribution in force: fixed returns or `g(.; theta)`.
    pub fn return_lottery(&self) -> Option<&Lottery> {
        match self.spec {
            ProblemSpec::PortfolioRiskAversion { returns, .. }
            | ProblemSpec::PortfolioWealth { returns, .. } => Some(returns),
            ProblemSpec::SignalPortfolio { .. } => self.states.as_ref(),
            _ => None,
        }
    }

    /// Outcome lottery `F(.; x, theta)` of the portfolio problems.
    pub fn outcome_lottery(&self, x: f64) -> Result<Lottery> {
        let p = self
            .spec
            .portfolio(self.theta)
            .ok_or_else(|| self.spec.missing("an outcome lottery"))?;
        let returns = self
            .return_lottery()
            .ok_or_else(|| self.spec.missing("an outcome lottery"))?;
        returns.pushforward(|s| p.outcome(s, x))
    }

    pub fn action_domain(&self) -> Result<(f64, f64)> {
        match self.spec {
            ProblemSpec::PortfolioRiskAversion { x_max, .. }
            | ProblemSpec::PortfolioWealth { x_max, .. }
            | ProblemSpec::SignalPortfolio { x_max, .. } => {
                let p = self.spec.portfolio(self.theta).expect("portfolio problem");
                let states = self.return_lottery().expect("portfolio returns").support();
                portfolio_domain(p, *x_max, states, self.pref().domain())
            }
            ProblemSpec::AmbiguityPortfolio { model, x_max, .. } => {
                let p = self.spec.portfolio(self.theta).expect("portfolio problem");
                portfolio_domain(p, *x_max, &model.states(), model.domain())
            }
            ProblemSpec::Precautionary {
                w, eps, variant, ..
            } => {
                let d = self.pref().domain();
                let (lo, hi) = match variant {
                    PrecautionaryVariant::Saving => (
                        (d.lower() - eps.min()).max(0.0),
                        (w - d.lower()).min(d.upper() - eps.max()).min(*w),
                    ),
                    PrecautionaryVariant::Kimball { y, s, x_max } => {
                        let h = kimball_step(*y);
                        let mut cap = x_max.unwrap_or(f64::INFINITY);
                        for &v in s.support() {
                            if v < 0.0 {
                                cap = cap.min((y - h - d.lower()) / -v);
                            } else if v > 0.0 {
                                cap = cap.min((d.upper() - y - h) / v);
                            }
                        }
                        (0.0, cap)
                    }
                };
                if !(hi > lo) || !hi.is_finite() {
                    return Err(Error::InvalidProblem(format!(
                        "empty or unbounded action domain [{lo}, {hi}]"
                    )));
                }
                Ok((lo, hi))
            }
        }
    }

    /// `U(x, theta)`.
    pub fn objective(&self, x: f64) -> Result<f64> {
        match self.spec {
            ProblemSpec::PortfolioRiskAversion { .. }
            | ProblemSpec::PortfolioWealth { .. }
            | ProblemSpec::SignalPortfolio { .. } => {
                self.pref().evaluate(&self.outcome_lottery(x)?)
            }
            ProblemSpec::AmbiguityPortfolio { model, variant, .. } => {
                let p = self.spec.portfolio(self.theta).expect("portfolio problem");
                let theta = match variant {
                    AmbiguityVariant::Attitude { .. } => Some(self.theta),
                    AmbiguityVariant::Wealth { attitude_theta } => *attitude_theta,
                };
                model.evaluate_act(&|s| p.outcome(s, x), theta)
            }
            ProblemSpec::Precautionary {
                w, eps, variant, ..
            } => {
                let m = self.pref();
                match variant {
                    PrecautionaryVariant::Saving => {
                        let eps = self.eps_override.as_ref().unwrap_or(eps);
                        Ok(m.first_period_value(w - x)? + m.evaluate(&eps.shift(x))?)
                    }
                    PrecautionaryVariant::Kimball { y, s, .. } => {
                        let h = kimball_step(*y);
                        let at = |yy: f64| m.evaluate(&s.pushforward(|v| yy + x * v)?);
                        Ok(-(at(y + h)? - at(y - h)?) / (2.0 * h))
                    }
                }
            }
        }
    }
}

fn kimball_step(y: f64) -> f64 {
    1e-4 * y.abs().max(1.0)
}

/// `U` sampled on an `(x, theta)` grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSurface {
    pub x_grid: Vec<f64>,
    pub theta_grid: Vec<f64>,
    /// `values[i][k] = U(x_i, theta_k)`.
    pub values: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u1_values: Option<Vec<Vec<f64>>>,
}

impl ObjectiveSurface {
    pub fn to_grid_fn(&self) -> Result<GridFn> {
        GridFn::new(
            vec![self.x_grid.clone(), self.theta_grid.clone()],
            self.values.iter().flatten().copied().collect(),
        )
    }
}

/// Evaluates `U` (and optionally `dU/dx`) on the grid, in parallel over cells.
pub fn build_surface(
    spec: &ProblemSpec,
    x_grid: &[f64],
    theta_grid: &[f64],
    with_u1: bool,
) -> Result<ObjectiveSurface> {
    if x_grid.is_empty() || theta_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    check_axis(x_grid)?;
    check_axis(theta_grid)?;
    let instances = theta_grid
        .iter()
        .map(|&t| spec.at(t))
        .collect::<Result<Vec<_>>>()?;
    let cells: Vec<(usize, usize)> = (0..x_grid.len())
        .flat_map(|i| (0..theta_grid.len()).map(move |k| (i, k)))
        .collect();
    let evaluated = cells
        .par_iter()
        .map(|&(i, k)| {
            let inst = &instances[k];
            let x = x_grid[i];
            let v = inst.objective(x)?;
            let d = if with_u1 {
                Some(central_x(inst, x, v)?)
            } else {
                None
            };
            Ok((v, d))
        })
        .collect::<Result<Vec<_>>>()?;
    let nt = theta_grid.len();
    let values = evaluated
        .chunks(nt)
        .map(|row| row.iter().map(|c| c.0).collect())
        .collect();
    let u1_values = with_u1.then(|| {
        evaluated
            .chunks(nt)
            .map(|row| row.iter().map(|c| c.1.unwrap()).collect())
            .collect()
    });
    Ok(ObjectiveSurface {
        x_grid: x_grid.to_vec(),
        theta_grid: theta_grid.to_vec(),
        values,
        u1_values,
    })
}

/// Central difference in `x`, one-sided where a neighbour leaves the domain.
fn central_x(inst: &Instance<'_>, x: f64, at_x: f64) -> Result<f64> {
    let h = SURFACE_STEP;
    match (inst.objective(x + h), inst.objective(x - h)) {
        (Ok(up), Ok(down)) => Ok((up - down) / (2.0 * h)),
        (Ok(up), Err(_)) => Ok((up - at_x) / h),
        (Err(_), Ok(down)) => Ok((at_x - down) / h),
        (Err(e), Err(_)) => Err(e),
    }
}

/// Optimal saving with and without the second-period risk.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrecautionaryOutcome {
    pub y_with_risk: f64,
    pub y_without: f64,
    pub positive: bool,
    /// Both saving objectives passed the sampled quasiconcavity check.
    pub quasiconcave: bool,
}

/// Tolerance of the "saving does not fall" comparison.
pub const MOTIVE_TOL: f64 = 1e-6;

/// Solves the saving problem at `theta` with `eps` and with no risk, over the
/// same saving interval.
pub fn precautionary_motive(spec: &ProblemSpec, theta: f64) -> Result<PrecautionaryOutcome> {
    let ProblemSpec::Precautionary {
        variant: PrecautionaryVariant::Saving,
        ..
    } = spec
    else {
        return Err(Error::InvalidProblem(
            "the precautionary motive needs the saving variant".into(),
        ));
    };
    spec.validate()?;
    let risky = spec.at(theta)?;
    let (lo, hi) = risky.action_domain()?;
    let mut safe = spec.at(theta)?;
    safe.eps_override = Some(Lottery::degenerate(0.0));
    let cfg = ArgmaxConfig::default();
    let solve = |inst: &Instance<'_>| -> Result<(f64, bool)> {
        let f = |y: f64| inst.objective(y);
        let set = argmax_set(f, (lo, hi), &cfg)?;
        let qc = is_quasiconcave(f, (lo, hi), 1024, &Tolerance::default())?.holds();
        Ok((set.representative(), qc))
    };
    let (y_with_risk, qa) = solve(&risky)?;
    let (y_without, qb) = solve(&safe)?;
    Ok(PrecautionaryOutcome {
        y_with_risk,
        y_without,
        positive: y_with_risk >= y_without - MOTIVE_TOL,
        quasiconcave: qa && qb,
    })
}
