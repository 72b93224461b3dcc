//! Preference functionals over lotteries and their local utilities.
//!
//! Every model exposes `V(F)`, the local utility `u(z, F)` and its outcome
//! derivatives `u_k(z, F)` for `k = 1, 2, 3`, all in closed form.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::lottery::{Lottery, OutcomeDomain};
use crate::smooth::SmoothFn;

/// Value gap below which two induced actions count as tied.
pub const INDUCED_TIE_TOL: f64 = 1e-10;

/// Declared smoothness class of a preference functional.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Differentiability {
    Gateaux,
    Hadamard,
}

type PayoffFn = Arc<dyn Fn(f64, f64, u8) -> f64 + Send + Sync>;

/// Payoff `phi(z, a)` of an induced preference functional.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InducedPayoff {
    /// `first(endowment - a) + second(a + z)`: the action is chosen before
    /// the outcome `z` resolves.
    Consumption {
        first: SmoothFn,
        second: SmoothFn,
        endowment: f64,
    },
    /// `(z, a, k) -> d^k phi / dz^k`.
    #[serde(skip)]
    Custom(PayoffFn),
}

impl fmt::Debug for InducedPayoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InducedPayoff::Consumption {
                first,
                second,
                endowment,
            } => write!(f, "Consumption({first}, {second}, {endowment})"),
            InducedPayoff::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl PartialEq for InducedPayoff {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (
                InducedPayoff::Consumption {
                    first: a,
                    second: b,
                    endowment: c,
                },
                InducedPayoff::Consumption {
                    first: d,
                    second: e,
                    endowment: f,
                },
            ) => a == d && b == e && c == f,
            (InducedPayoff::Custom(a), InducedPayoff::Custom(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

impl InducedPayoff {
    /// `d^k phi(z, a) / dz^k`.
    pub fn deriv(&self, k: u8, z: f64, a: f64) -> f64 {
        match self {
            InducedPayoff::Consumption {
                first,
                second,
                endowment,
            } => {
                let later = second.deriv(k, a + z);
                if k == 0 {
                    first.value(endowment - a) + later
                } else {
                    later
                }
            }
            InducedPayoff::Custom(f) => f(z, a, k),
        }
    }
}

/// One component `(coefficient, mass)` of a CARA mixture.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaraComponent {
    pub coef: f64,
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelSpec {
    /// Expected utility with Bernoulli utility `u`.
    Eu { u: SmoothFn },
    /// Rank dependent utility with probability weighting `omega` applied to
    /// the CDF.
    Rdu { omega: SmoothFn, u: SmoothFn },
    /// `E R + (E S)^2 / 2` with `R, S` the exponential integrals of rates
    /// `alpha` and `beta`.
    Quadratic { alpha: f64, beta: f64 },
    /// `E R + (E S)^2 / 2` for arbitrary smooth `R` and `S`.
    QuadraticGeneral { r: SmoothFn, s: SmoothFn },
    /// Two-period Kreps-Porteus: first-period `nu(c)`, second-period
    /// `phi(E u)`.
    KrepsPorteus {
        nu: SmoothFn,
        phi: SmoothFn,
        u: SmoothFn,
    },
    /// `sum_a mass_a / a ln E e^{a z}`.
    CaraMixture { components: Vec<CaraComponent> },
    /// `max_a E phi(z, a)` over a finite action grid.
    Induced {
        payoff: InducedPayoff,
        actions: Vec<f64>,
    },
    /// EU form of multiplier preferences on an outcome lottery:
    /// `-E exp(-u(z) / mu)`.
    Multiplier { mu: f64, u: SmoothFn },
}

/// A preference functional together with its outcome domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel", into = "RawModel")]
pub struct PreferenceModel {
    spec: ModelSpec,
    domain: OutcomeDomain,
}

#[derive(Serialize, Deserialize)]
struct RawModel {
    #[serde(flatten)]
    spec: ModelSpec,
    #[serde(default)]
    domain: OutcomeDomain,
}

impl TryFrom<RawModel> for PreferenceModel {
    type Error = Error;

    fn try_from(raw: RawModel) -> Result<Self> {
        PreferenceModel::with_domain(raw.spec, raw.domain)
    }
}

impl From<PreferenceModel> for RawModel {
    fn from(m: PreferenceModel) -> Self {
        RawModel {
            spec: m.spec,
            domain: m.domain,
        }
    }
}

/// The tie-broken maximizer of an induced functional.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InducedChoice {
    pub action: f64,
    pub value: f64,
    /// Gap to the best competing action (`inf` with a single action).
    pub margin: f64,
    pub runner_up: Option<f64>,
}

impl InducedChoice {
    pub fn is_ambiguous(&self) -> bool {
        self.margin <= INDUCED_TIE_TOL
    }
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn check_increasing(name: &str, f: &SmoothFn, pts: &[f64]) -> Result<()> {
    if f.is_increasing_on(pts) {
        Ok(())
    } else {
        Err(Error::InvalidModel(format!(
            "{name} = {f} is not strictly increasing"
        )))
    }
}

impl PreferenceModel {
    pub fn new(spec: ModelSpec) -> Result<Self> {
        Self::with_domain(spec, OutcomeDomain::default())
    }

    pub fn with_domain(spec: ModelSpec, domain: OutcomeDomain) -> Result<Self> {
        let m = Self { spec, domain };
        m.validate()?;
        Ok(m)
    }

    pub fn eu(u: SmoothFn) -> Result<Self> {
        Self::new(ModelSpec::Eu { u })
    }

    pub fn rdu(omega: SmoothFn, u: SmoothFn) -> Result<Self> {
        Self::new(ModelSpec::Rdu { omega, u })
    }

    pub fn quadratic(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(ModelSpec::Quadratic { alpha, beta })
    }

    pub fn cara_mixture(components: &[(f64, f64)]) -> Result<Self> {
        Self::new(ModelSpec::CaraMixture {
            components: components
                .iter()
                .map(|&(coef, mass)| CaraComponent { coef, mass })
                .collect(),
        })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn domain(&self) -> OutcomeDomain {
        self.domain
    }

    pub fn kind(&self) -> &'static str {
        match self.spec {
            ModelSpec::Eu { .. } => "eu",
            ModelSpec::Rdu { .. } => "rdu",
            ModelSpec::Quadratic { .. } => "quadratic",
            ModelSpec::QuadraticGeneral { .. } => "quadratic-general",
            ModelSpec::KrepsPorteus { .. } => "kreps-porteus",
            ModelSpec::CaraMixture { .. } => "cara-mixture",
            ModelSpec::Induced { .. } => "induced",
            ModelSpec::Multiplier { .. } => "multiplier",
        }
    }

    /// Induced functionals are only declared Gateaux: the maximizing action
    /// can switch along a path. Every other model is Hadamard.
    pub fn differentiability(&self) -> Differentiability {
        match self.spec {
            ModelSpec::Induced { .. } => Differentiability::Gateaux,
            _ => Differentiability::Hadamard,
        }
    }

    fn validate(&self) -> Result<()> {
        let zs = grid(self.domain.lower(), self.domain.upper(), 201);
        match &self.spec {
            ModelSpec::Eu { u } | ModelSpec::Multiplier { u, .. } => {
                check_increasing("u", u, &zs)?;
                if let ModelSpec::Multiplier { mu, .. } = self.spec {
                    if !(mu > 0.0) {
                        return Err(Error::InvalidModel(format!(
                            "multiplier mu = {mu} must be > 0"
                        )));
                    }
                }
            }
            ModelSpec::Rdu { omega, u } => {
                check_increasing("u", u, &zs)?;
                let ps = grid(0.0, 1.0, 201);
                if omega.value(0.0).abs() > 1e-12 || (omega.value(1.0) - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidModel(format!(
                        "omega = {omega} must map 0 to 0 and 1 to 1"
                    )));
                }
                if !ps.windows(2).all(|w| omega.value(w[1]) > omega.value(w[0])) {
                    return Err(Error::InvalidModel(format!(
                        "omega = {omega} is not strictly increasing"
                    )));
                }
                if !ps
                    .iter()
                    .all(|&p| omega.d1(p).is_finite() && omega.d1(p) >= 0.0)
                {
                    return Err(Error::InvalidModel(format!(
                        "omega = {omega} has an unbounded or negative derivative on [0, 1]"
                    )));
                }
            }
            ModelSpec::Quadratic { alpha, beta } => {
                if !(*alpha > 0.0 && *beta > 0.0) {
                    return Err(Error::InvalidModel(format!(
                        "quadratic rates must be positive, got alpha = {alpha}, beta = {beta}"
                    )));
                }
            }
            ModelSpec::QuadraticGeneral { r, s } => {
                check_increasing("R", r, &zs)?;
                check_increasing("S", s, &zs)?;
            }
            ModelSpec::KrepsPorteus { nu, u, .. } => {
                check_increasing("u", u, &zs)?;
                check_increasing("nu", nu, &zs)?;
            }
            ModelSpec::CaraMixture { components } => {
                if components.is_empty() {
                    return Err(Error::InvalidModel("empty CARA mixture".into()));
                }
                let mut total = 0.0;
                for c in components {
                    if c.coef == 0.0 || !c.coef.is_finite() || !(c.mass > 0.0) {
                        return Err(Error::InvalidModel(format!(
                            "CARA component ({}, {}) needs a non-zero coefficient and positive mass",
                            c.coef, c.mass
                        )));
                    }
                    total += c.mass;
                }
                if (total - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidModel(format!("CARA masses sum to {total}")));
                }
            }
            ModelSpec::Induced { actions, .. } => {
                if actions.is_empty() {
                    return Err(Error::InvalidModel("induced model has no actions".into()));
                }
            }
        }
        Ok(())
    }

    fn check_lottery(&self, f: &Lottery) -> Result<()> {
        self.domain.check_lottery(f)
    }

    /// `V(F)`.
    pub fn evaluate(&self, f: &Lottery) -> Result<f64> {
        self.check_lottery(f)?;
        let v = match &self.spec {
            ModelSpec::Eu { u } => f.expectation(|z| u.value(z)),
            ModelSpec::Rdu { omega, u } => {
                let mut prev = omega.value(0.0);
                let mut acc = 0.0;
                for (z, cum) in f.support().iter().zip(f.cumulative()) {
                    let w = omega.value(cum);
                    acc += u.value(*z) * (w - prev);
                    prev = w;
                }
                acc
            }
            ModelSpec::Quadratic { .. } | ModelSpec::QuadraticGeneral { .. } => {
                let (r, s) = self.quadratic_parts();
                let es = f.expectation(|z| s.value(z));
                f.expectation(|z| r.value(z)) + 0.5 * es * es
            }
            ModelSpec::KrepsPorteus { phi, u, .. } => phi.value(f.expectation(|z| u.value(z))),
            ModelSpec::CaraMixture { components } => components
                .iter()
                .map(|c| c.mass * log_mgf(f, c.coef) / c.coef)
                .sum(),
            ModelSpec::Induced { .. } => self.induced_choice(f)?.value,
            ModelSpec::Multiplier { mu, u } => -f.expectation(|z| (-u.value(z) / mu).exp()),
        };
        finite(v, "V(F)")
    }

    /// Value of a certain first-period consumption `c` in two-period
    /// problems: `nu(c)` for Kreps-Porteus, `V(delta_c)` otherwise.
    pub fn first_period_value(&self, c: f64) -> Result<f64> {
        match &self.spec {
            ModelSpec::KrepsPorteus { nu, .. } => {
                self.domain.check(c)?;
                finite(nu.value(c), "nu(c)")
            }
            _ => self.evaluate(&Lottery::degenerate(c)),
        }
    }

    /// `u(z, F)`.
    pub fn local_utility(&self, z: f64, f: &Lottery) -> Result<f64> {
        self.local_deriv(z, f, 0)
    }

    /// `d^k u(z, F) / dz^k` for `k` in 1..=3. At atoms of a rank dependent
    /// model the right limit is returned.
    pub fn local_utility_deriv(&self, z: f64, f: &Lottery, k: u8) -> Result<f64> {
        if !(1..=3).contains(&k) {
            return Err(Error::DerivativeOrder(k));
        }
        self.local_deriv(z, f, k)
    }

    fn local_deriv(&self, z: f64, f: &Lottery, k: u8) -> Result<f64> {
        self.domain.check(z)?;
        self.check_lottery(f)?;
        let v = match &self.spec {
            ModelSpec::Eu { u } => u.deriv(k, z),
            ModelSpec::Rdu { omega, u } => {
                if k == 0 {
                    rdu_local(omega, u, self.domain.lower(), z, f)
                } else {
                    omega.d1(f.cdf(z)) * u.deriv(k, z)
                }
            }
            ModelSpec::Quadratic { .. } | ModelSpec::QuadraticGeneral { .. } => {
                let (r, s) = self.quadratic_parts();
                let es = f.expectation(|t| s.value(t));
                r.deriv(k, z) + s.deriv(k, z) * es
            }
            ModelSpec::KrepsPorteus { phi, u, .. } => {
                u.deriv(k, z) * phi.d1(f.expectation(|t| u.value(t)))
            }
            ModelSpec::CaraMixture { components } => components
                .iter()
                .map(|c| {
                    let lm = log_mgf(f, c.coef);
                    c.mass * c.coef.powi(k as i32 - 1) * (c.coef * z - lm).exp()
                })
                .sum(),
            ModelSpec::Induced { payoff, .. } => {
                let choice = self.induced_choice(f)?;
                if choice.is_ambiguous() {
                    return Err(Error::AmbiguousMaximizer {
                        first: choice.action,
                        second: choice.runner_up.unwrap_or(choice.action),
                        gap: choice.margin,
                    });
                }
                payoff.deriv(k, z, choice.action)
            }
            ModelSpec::Multiplier { mu, u } => {
                let e = (-u.value(z) / mu).exp();
                let (u1, u2, u3) = (u.d1(z), u.d2(z), u.d3(z));
                match k {
                    0 => -e,
                    1 => e * u1 / mu,
                    2 => e * (u2 / mu - u1 * u1 / (mu * mu)),
                    _ => e * (u3 / mu - 3.0 * u1 * u2 / (mu * mu) + u1.powi(3) / mu.powi(3)),
                }
            }
        };
        finite(v, "local utility")
    }

    /// Maximizing action of an induced model, ties broken toward the
    /// smallest action.
    pub fn induced_choice(&self, f: &Lottery) -> Result<InducedChoice> {
        let ModelSpec::Induced { payoff, actions } = &self.spec else {
            return Err(Error::InvalidModel(format!(
                "{} model has no induced action",
                self.kind()
            )));
        };
        let mut scored: Vec<(f64, f64)> = actions
            .iter()
            .map(|&a| (a, f.expectation(|z| payoff.deriv(0, z, a))))
            .collect();
        scored.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut best = scored[0];
        for &(a, v) in &scored[1..] {
            if v > best.1 {
                best = (a, v);
            }
        }
        let runner = scored
            .iter()
            .filter(|(a, _)| *a != best.0)
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .copied();
        Ok(InducedChoice {
            action: best.0,
            value: best.1,
            margin: runner.map_or(f64::INFINITY, |r| best.1 - r.1),
            runner_up: runner.map(|r| r.0),
        })
    }

    fn quadratic_parts(&self) -> (SmoothFn, SmoothFn) {
        match &self.spec {
            ModelSpec::Quadratic { alpha, beta } => {
                (SmoothFn::ExpCara(*alpha), SmoothFn::ExpCara(*beta))
            }
            ModelSpec::QuadraticGeneral { r, s } => (r.clone(), s.clone()),
            _ => unreachable!("quadratic_parts on non-quadratic model"),
        }
    }
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(format!("{what} = {v}")))
    }
}

/// `ln E e^{a X}`, stabilized by the largest exponent.
fn log_mgf(f: &Lottery, a: f64) -> f64 {
    let top = f
        .support()
        .iter()
        .map(|z| a * z)
        .fold(f64::NEG_INFINITY, f64::max);
    top + f.expectation(|z| (a * z - top).exp()).ln()
}

/// `int_{lower}^{z} omega_1(F(t)) du(t)`, exact for step CDFs.
fn rdu_local(omega: &SmoothFn, u: &SmoothFn, lower: f64, z: f64, f: &Lottery) -> f64 {
    let mut acc = 0.0;
    let mut left = lower;
    let mut level = 0.0;
    for (x, cum) in f.support().iter().zip(f.cumulative()) {
        if *x > z {
            break;
        }
        if *x > left {
            acc += omega.d1(level) * (u.value(*x) - u.value(left));
            left = *x;
        }
        level = cum;
    }
    if z > left {
        acc += omega.d1(level) * (u.value(z) - u.value(left));
    }
    acc
}

/// A one-parameter family `theta -> PreferenceModel`.
#[derive(Clone)]
#[allow(clippy::large_enum_variant)]
pub enum ModelFamily {
    Fixed(PreferenceModel),
    /// JSON model whose strings may contain the tokens `{theta}`,
    /// `{inv_theta}` and `{neg_theta}`.
    Template(Value),
    Custom(Arc<dyn Fn(f64) -> Result<PreferenceModel> + Send + Sync>),
}

impl fmt::Debug for ModelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelFamily::Fixed(m) => write!(f, "Fixed({m:?})"),
            ModelFamily::Template(v) => write!(f, "Template({v})"),
            ModelFamily::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl ModelFamily {
    pub fn at(&self, theta: f64) -> Result<PreferenceModel> {
        match self {
            ModelFamily::Fixed(m) => Ok(m.clone()),
            ModelFamily::Template(t) => {
                let v = substitute(t, theta);
                serde_json::from_value(v)
                    .map_err(|e| Error::InvalidModel(format!("template at theta = {theta}: {e}")))
            }
            ModelFamily::Custom(f) => f(theta),
        }
    }
}

fn substitute(v: &Value, theta: f64) -> Value {
    match v {
        Value::String(s) if s.contains('{') => {
            let out = s
                .replace("{theta}", &theta.to_string())
                .replace("{inv_theta}", &(1.0 / theta).to_string())
                .replace("{neg_theta}", &(-theta).to_string());
            let whole = matches!(s.as_str(), "{theta}" | "{inv_theta}" | "{neg_theta}");
            match out.parse::<f64>() {
                Ok(x) if whole => {
                    serde_json::Number::from_f64(x).map_or(Value::String(out), Value::Number)
                }
                _ => Value::String(out),
            }
        }
        Value::Array(a) => Value::Array(a.iter().map(|x| substitute(x, theta)).collect()),
        Value::Object(o) => Value::Object(
            o.iter()
                .map(|(k, x)| (k.clone(), substitute(x, theta)))
                .collect(),
        ),
        other => other.clone(),
    }
}

impl Serialize for ModelFamily {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(1))?;
        match self {
            ModelFamily::Fixed(m) => map.serialize_entry("fixed", m)?,
            ModelFamily::Template(t) => map.serialize_entry("template", t)?,
            ModelFamily::Custom(_) => {
                return Err(serde::ser::Error::custom(
                    "custom model family has no JSON form",
                ))
            }
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for ModelFamily {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(rename_all = "kebab-case")]
        #[allow(clippy::large_enum_variant)]
        enum Repr {
            Fixed(PreferenceModel),
            Template(Value),
        }
        Ok(match Repr::deserialize(deserializer)? {
            Repr::Fixed(m) => ModelFamily::Fixed(m),
            Repr::Template(t) => ModelFamily::Template(t),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sf(s: &str) -> SmoothFn {
        s.parse().unwrap()
    }

    fn two_point() -> Lottery {
        Lottery::new([(0.5, 0.5), (2.0, 0.5)]).unwrap()
    }

    #[test]
    fn eu_evaluate_and_locality() {
        let m = PreferenceModel::eu(SmoothFn::Identity).unwrap();
        assert_eq!(m.evaluate(&two_point()).unwrap(), 1.25);
        let ln = PreferenceModel::eu(sf("log1p")).unwrap();
        for f in [two_point(), Lottery::degenerate(3.0)] {
            assert_eq!(ln.local_utility(1.5, &f).unwrap(), 2.5f64.ln());
            assert_eq!(ln.local_utility_deriv(1.5, &f, 1).unwrap(), 1.0 / 2.5);
        }
    }

    #[test]
    fn rdu_stieltjes_sum() {
        let m = PreferenceModel::rdu(sf("power:2"), SmoothFn::Identity).unwrap();
        let f = Lottery::new([(0.0, 0.5), (1.0, 0.5)]).unwrap();
        assert!((m.evaluate(&f).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn rdu_identity_weight_is_eu() {
        let u = sf("log-shift:0.1");
        let rdu = PreferenceModel::rdu(SmoothFn::Identity, u.clone()).unwrap();
        let eu = PreferenceModel::eu(u.clone()).unwrap();
        let f = Lottery::new([(0.3, 0.2), (1.1, 0.5), (4.0, 0.3)]).unwrap();
        assert!((rdu.evaluate(&f).unwrap() - eu.evaluate(&f).unwrap()).abs() < 1e-14);
        for z in [0.0, 0.3, 0.7, 1.1, 2.5, 4.0, 9.0] {
            let diff = rdu.local_utility(z, &f).unwrap() - (u.value(z) - u.value(0.0));
            assert!(diff.abs() < 1e-13, "z = {z}: {diff}");
        }
    }

    #[test]
    fn rdu_first_derivative_uses_right_limit() {
        let m = PreferenceModel::rdu(sf("dual-power:2"), sf("log-shift:0.1")).unwrap();
        let f = Lottery::new([(1.0, 0.5), (2.0, 0.5)]).unwrap();
        // omega_1(p) = 2 (1 - p); F(1) = 0.5 at the atom.
        let d = m.local_utility_deriv(1.0, &f, 1).unwrap();
        assert!((d - 1.0 / 1.1).abs() < 1e-14);
        let below = m.local_utility_deriv(0.5, &f, 1).unwrap();
        assert!((below - 2.0 / 0.6).abs() < 1e-14);
    }

    #[test]
    fn quadratic_closed_forms() {
        let m = PreferenceModel::quadratic(1.0, 1.0).unwrap();
        let d1 = Lottery::degenerate(1.0);
        let e = 1.0 - (-1.0f64).exp();
        assert!((m.evaluate(&d1).unwrap() - (e + 0.5 * e * e)).abs() < 1e-14);
        assert!((m.evaluate(&d1).unwrap() - 0.83191).abs() < 1e-5);
        assert!((m.local_utility(1.0, &d1).unwrap() - 1.03169).abs() < 1e-5);
    }

    #[test]
    fn quadratic_risk_aversion_ratio_matches_closed_form() {
        let (alpha, beta) = (0.42, 0.57);
        let m = PreferenceModel::quadratic(alpha, beta).unwrap();
        let tt = Lottery::new([(-0.4, 0.3), (0.2, 0.3), (0.9, 0.4)]).unwrap();
        for y in [1.0, 1.7, 2.4] {
            for t in [-0.2, 0.3, 0.8] {
                let f = tt.shift(y);
                let z = y + t;
                let ratio = -m.local_utility_deriv(z, &f, 2).unwrap()
                    / m.local_utility_deriv(z, &f, 1).unwrap();
                let es = tt.expectation(|tau| (1.0 - (-beta * (y + tau)).exp()) / beta);
                let closed = beta + (alpha - beta) / (1.0 + ((alpha - beta) * z).exp() * es);
                assert!((ratio - closed).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cara_mixture_local_utility_is_wealth_invariant() {
        let m = PreferenceModel::cara_mixture(&[(-0.5, 0.5), (-1.5, 0.5)]).unwrap();
        let tt = Lottery::new([(-0.5, 0.5), (1.0, 0.5)]).unwrap();
        let t = 0.25;
        let base = m.local_utility(1.0 + t, &tt.shift(1.0)).unwrap();
        for y in [1.5, 2.0, 3.0, 5.0] {
            let v = m.local_utility(y + t, &tt.shift(y)).unwrap();
            assert!((v - base).abs() <= 1e-10);
        }
    }

    #[test]
    fn kreps_porteus_local_utility() {
        let m = PreferenceModel::new(ModelSpec::KrepsPorteus {
            nu: sf("log-shift:0.1"),
            phi: sf("neg-power:1.5"),
            u: sf("neg-exp"),
        })
        .unwrap();
        let f = Lottery::new([(0.5, 0.5), (1.5, 0.5)]).unwrap();
        let eu = f.expectation(|z| -(-z).exp());
        let expect = -(-1.0f64).exp() * 1.5 * (-eu).sqrt();
        assert!((m.local_utility(1.0, &f).unwrap() - expect).abs() < 1e-14);
        assert!((m.first_period_value(1.0).unwrap() - 1.1f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn induced_ties_are_flagged() {
        let m = PreferenceModel::new(ModelSpec::Induced {
            payoff: InducedPayoff::Consumption {
                first: SmoothFn::Identity,
                second: SmoothFn::Identity,
                endowment: 1.0,
            },
            actions: vec![0.0, 0.5, 1.0],
        })
        .unwrap();
        let f = Lottery::degenerate(1.0);
        let choice = m.induced_choice(&f).unwrap();
        assert_eq!(choice.action, 0.0);
        assert!(choice.is_ambiguous());
        assert!(matches!(
            m.local_utility(1.0, &f),
            Err(Error::AmbiguousMaximizer { .. })
        ));
        assert_eq!(m.evaluate(&f).unwrap(), 2.0);
    }

    #[test]
    fn errors() {
        let m = PreferenceModel::eu(SmoothFn::Identity).unwrap();
        assert_eq!(
            m.local_utility_deriv(1.0, &Lottery::degenerate(1.0), 4),
            Err(Error::DerivativeOrder(4))
        );
        assert!(matches!(
            m.evaluate(&Lottery::degenerate(11.0)),
            Err(Error::OutOfDomain { .. })
        ));
        assert!(PreferenceModel::quadratic(0.0, 1.0).is_err());
        assert!(PreferenceModel::rdu(sf("power:0.5"), SmoothFn::Identity).is_err());
        assert!(PreferenceModel::cara_mixture(&[(0.5, 0.4), (1.5, 0.4)]).is_err());
        assert!(PreferenceModel::cara_mixture(&[(0.0, 1.0)]).is_err());
    }

    #[test]
    fn json_model_specs() {
        let m: PreferenceModel =
            serde_json::from_str(r#"{"kind":"rdu","omega":"power:2","u":"log1p"}"#).unwrap();
        assert_eq!(m.kind(), "rdu");
        assert_eq!(m.domain(), OutcomeDomain::default());
        let back: PreferenceModel =
            serde_json::from_value(serde_json::to_value(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        let q: PreferenceModel = serde_json::from_str(
            r#"{"kind":"quadratic","alpha":0.42,"beta":0.57,"domain":[0,20]}"#,
        )
        .unwrap();
        assert_eq!(q.domain().upper(), 20.0);
        assert!(serde_json::from_str::<PreferenceModel>(
            r#"{"kind":"quadratic","alpha":-1,"beta":1}"#
        )
        .is_err());
    }

    #[test]
    fn template_family_substitutes_theta() {
        let fam: ModelFamily = serde_json::from_str(
            r#"{"template":{"kind":"rdu","omega":"power:{theta}","u":"crra:{inv_theta}:0.1"}}"#,
        )
        .unwrap();
        let m = fam.at(2.0).unwrap();
        assert_eq!(
            m.spec(),
            &ModelSpec::Rdu {
                omega: SmoothFn::Power(2.0),
                u: SmoothFn::Crra {
                    rho: 0.5,
                    shift: 0.1
                }
            }
        );
        let q: ModelFamily = serde_json::from_str(
            r#"{"template":{"kind":"quadratic","alpha":"{theta}","beta":0.5}}"#,
        )
        .unwrap();
        assert_eq!(
            q.at(1.5).unwrap().spec(),
            &ModelSpec::Quadratic {
                alpha: 1.5,
                beta: 0.5
            }
        );
    }
}
