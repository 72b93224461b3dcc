//! Smooth ambiguity preferences over acts.
//!
//! An act assigns an outcome `kappa(s)` to every state. The agent entertains
//! priors `F(.; lambda)` over states, weighs them with a second-order belief
//! `Pi` over `lambda`, and evaluates
//! `I(gamma; theta) = sum_lambda pi(lambda) phi(E_lambda gamma, theta)` with
//! `gamma = u o kappa`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lottery::{Lottery, LotteryFamily, OutcomeDomain};
use crate::smooth::SmoothFn;

type AttitudeFn = Arc<dyn Fn(f64, f64, u8) -> f64 + Send + Sync>;

/// Ambiguity attitude `phi(v, theta)`.
#[derive(Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Attitude {
    /// `-exp(-v / theta)`; larger `theta` is less ambiguity averse.
    NegExp,
    /// A `theta`-free attitude.
    Fixed(SmoothFn),
    /// `(v, theta, k) -> d^k phi / dv^k`.
    #[serde(skip)]
    Custom(AttitudeFn),
}

impl fmt::Debug for Attitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Attitude::NegExp => write!(f, "NegExp"),
            Attitude::Fixed(g) => write!(f, "Fixed({g})"),
            Attitude::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl Attitude {
    pub fn needs_theta(&self) -> bool {
        !matches!(self, Attitude::Fixed(_))
    }

    /// `d^k phi(v, theta) / dv^k`; `theta` is ignored by fixed attitudes.
    pub fn deriv(&self, k: u8, v: f64, theta: f64) -> f64 {
        match self {
            Attitude::NegExp => -(-1.0 / theta).powi(k as i32) * (-v / theta).exp(),
            Attitude::Fixed(g) => g.deriv(k, v),
            Attitude::Custom(f) => f(v, theta, k),
        }
    }
}

/// Smooth ambiguity preferences with a finite grid of priors.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawAmbiguity", into = "RawAmbiguity")]
pub struct AmbiguityModel {
    attitude: Attitude,
    priors: LotteryFamily,
    second_order: Lottery,
    u: SmoothFn,
    domain: OutcomeDomain,
    // (lambda, pi(lambda), F(.; lambda)) for every atom of the second-order belief.
    resolved: Vec<(f64, f64, Lottery)>,
}

#[derive(Serialize, Deserialize)]
struct RawAmbiguity {
    attitude: Attitude,
    priors: LotteryFamily,
    second_order: Lottery,
    u: SmoothFn,
    #[serde(default)]
    domain: OutcomeDomain,
}

impl TryFrom<RawAmbiguity> for AmbiguityModel {
    type Error = Error;

    fn try_from(r: RawAmbiguity) -> Result<Self> {
        AmbiguityModel::new(r.attitude, r.priors, r.second_order, r.u, r.domain)
    }
}

impl From<AmbiguityModel> for RawAmbiguity {
    fn from(m: AmbiguityModel) -> Self {
        RawAmbiguity {
            attitude: m.attitude,
            priors: m.priors,
            second_order: m.second_order,
            u: m.u,
            domain: m.domain,
        }
    }
}

impl AmbiguityModel {
    pub fn new(
        attitude: Attitude,
        priors: LotteryFamily,
        second_order: Lottery,
        u: SmoothFn,
        domain: OutcomeDomain,
    ) -> Result<Self> {
        let n = 201;
        let zs: Vec<f64> = (0..n)
            .map(|i| domain.lower() + (domain.upper() - domain.lower()) * i as f64 / (n - 1) as f64)
            .collect();
        if !u.is_increasing_on(&zs) {
            return Err(Error::InvalidModel(format!(
                "u = {u} is not strictly increasing"
            )));
        }
        let resolved = second_order
            .iter()
            .map(|(lambda, pi)| Ok((lambda, pi, priors.at(lambda)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            attitude,
            priors,
            second_order,
            u,
            domain,
            resolved,
        })
    }

    pub fn attitude(&self) -> &Attitude {
        &self.attitude
    }

    pub fn priors(&self) -> &LotteryFamily {
        &self.priors
    }

    pub fn second_order(&self) -> &Lottery {
        &self.second_order
    }

    pub fn bernoulli(&self) -> &SmoothFn {
        &self.u
    }

    pub fn domain(&self) -> OutcomeDomain {
        self.domain
    }

    /// Union of the prior supports, ascending.
    pub fn states(&self) -> Vec<f64> {
        let all: Vec<(f64, f64)> = self
            .resolved
            .iter()
            .flat_map(|(_, _, f)| f.iter())
            .collect();
        Lottery::new(all.iter().map(|&(s, _)| (s, 1.0 / all.len() as f64)))
            .map(|l| l.support().to_vec())
            .unwrap_or_default()
    }

    /// `(lambda, pi(lambda), F(.; lambda))` triples.
    pub fn prior_table(&self) -> &[(f64, f64, Lottery)] {
        &self.resolved
    }

    fn theta(&self, theta: Option<f64>) -> Result<f64> {
        match theta {
            Some(t) => Ok(t),
            None if self.attitude.needs_theta() => Err(Error::MissingTheta),
            None => Ok(f64::NAN),
        }
    }

    /// `I(gamma; theta)` for an act given directly in utils.
    pub fn evaluate_utilities(
        &self,
        gamma: &dyn Fn(f64) -> f64,
        theta: Option<f64>,
    ) -> Result<f64> {
        let th = self.theta(theta)?;
        let v: f64 = self
            .resolved
            .iter()
            .map(|(_, pi, f)| pi * self.attitude.deriv(0, f.expectation(gamma), th))
            .sum();
        finite(v)
    }

    /// `I(u o kappa; theta)`.
    pub fn evaluate_act(&self, kappa: &dyn Fn(f64) -> f64, theta: Option<f64>) -> Result<f64> {
        self.check_act(kappa)?;
        self.evaluate_utilities(&|s| self.u.value(kappa(s)), theta)
    }

    /// Local utility at state `s` for an act given in utils:
    /// `sum_lambda phi_1(E_lambda gamma, theta) f(s; lambda) pi(lambda)`.
    pub fn local_utility_utilities(
        &self,
        s: f64,
        gamma: &dyn Fn(f64) -> f64,
        theta: Option<f64>,
    ) -> Result<f64> {
        let th = self.theta(theta)?;
        let v: f64 = self
            .resolved
            .iter()
            .map(|(_, pi, f)| self.attitude.deriv(1, f.expectation(gamma), th) * f.mass_at(s) * pi)
            .sum();
        finite(v)
    }

    /// Local utility at state `s` of the act `u o kappa`.
    pub fn local_utility(
        &self,
        s: f64,
        kappa: &dyn Fn(f64) -> f64,
        theta: Option<f64>,
    ) -> Result<f64> {
        self.check_act(kappa)?;
        self.local_utility_utilities(s, &|t| self.u.value(kappa(t)), theta)
    }

    fn check_act(&self, kappa: &dyn Fn(f64) -> f64) -> Result<()> {
        for (_, _, f) in &self.resolved {
            for &s in f.support() {
                self.domain.check(kappa(s))?;
            }
        }
        Ok(())
    }
}

fn finite(v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(format!("ambiguity value {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(attitude: Attitude) -> AmbiguityModel {
        let base = Lottery::new([(0.5, 0.3), (1.0, 0.4), (2.0, 0.3)]).unwrap();
        let pi = Lottery::new([(-1.0, 0.5), (1.0, 0.5)]).unwrap();
        AmbiguityModel::new(
            attitude,
            LotteryFamily::Tilt { base },
            pi,
            "log-shift:0.1".parse().unwrap(),
            OutcomeDomain::default(),
        )
        .unwrap()
    }

    #[test]
    fn neg_exp_attitude_derivatives() {
        let a = Attitude::NegExp;
        let (v, th) = (0.7f64, 1.3f64);
        let e = (-v / th).exp();
        assert!((a.deriv(0, v, th) + e).abs() < 1e-15);
        assert!((a.deriv(1, v, th) - e / th).abs() < 1e-15);
        assert!((a.deriv(2, v, th) + e / (th * th)).abs() < 1e-15);
    }

    #[test]
    fn linear_attitude_reduces_to_expected_utility() {
        let m = model(Attitude::Fixed(SmoothFn::Identity));
        let kappa = |s: f64| 1.0 + 0.5 * (s - 1.0);
        let mut eu = 0.0;
        for (_, pi, f) in m.prior_table() {
            eu += pi * f.expectation(|s| (kappa(s) + 0.1).ln());
        }
        assert!((m.evaluate_act(&kappa, None).unwrap() - eu).abs() < 1e-14);
        // Local utility is then the mixed state probability.
        for s in m.states() {
            let mixed: f64 = m
                .prior_table()
                .iter()
                .map(|(_, pi, f)| pi * f.mass_at(s))
                .sum();
            assert!((m.local_utility(s, &kappa, None).unwrap() - mixed).abs() < 1e-15);
        }
    }

    #[test]
    fn theta_required_for_neg_exp() {
        let m = model(Attitude::NegExp);
        assert_eq!(m.evaluate_act(&|s| s, None), Err(Error::MissingTheta));
        assert!(m.evaluate_act(&|s| s, Some(1.0)).is_ok());
    }

    #[test]
    fn states_are_union_of_supports() {
        assert_eq!(model(Attitude::NegExp).states(), vec![0.5, 1.0, 2.0]);
    }

    #[test]
    fn json_round_trip() {
        let m = model(Attitude::NegExp);
        let v = serde_json::to_value(&m).unwrap();
        assert_eq!(v["attitude"], "neg-exp");
        let back: AmbiguityModel = serde_json::from_value(v).unwrap();
        assert_eq!(back.states(), m.states());
    }
}
