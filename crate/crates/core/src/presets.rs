//! Embedded problem instances.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::lottery::Lottery;
use crate::preferences::PreferenceModel;
use crate::problems::ProblemSpec;
use crate::propositions::PropId;

/// A named problem with the parameter grid it is meant to be solved on and
/// the proposition whose hypotheses it is meant to exercise, if any.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Preset {
    pub name: String,
    pub description: String,
    pub problem: ProblemSpec,
    pub theta_grid: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prop: Option<PropId>,
}

pub const NAMES: [&str; 11] = [
    "footnote-counterexample",
    "quadratic-dara",
    "chew-rdu-portfolio",
    "cara-mixture-wealth",
    "signal-portfolio",
    "multiplier-signal",
    "gollier-ambiguity",
    "ambiguity-wealth",
    "kimball-precautionary",
    "kreps-porteus-precautionary",
    "rdu-precautionary",
];

fn two_point_returns() -> serde_json::Value {
    json!({"support": [0.5, 2.0], "probs": [0.5, 0.5]})
}

fn three_point_returns() -> serde_json::Value {
    json!({"support": [0.5, 1.0, 2.0], "probs": [0.3, 0.4, 0.3]})
}

fn body(name: &str) -> Option<(&'static str, serde_json::Value, Vec<f64>, Option<PropId>)> {
    let fives = vec![1.0, 1.25, 1.5, 1.75, 2.0];
    Some(match name {
        "footnote-counterexample" => (
            "Quadratic(0.42, 0.57) portfolio with wealth as parameter; investment falls between w = 1.86 and w = 2.49.",
            json!({
                "kind": "portfolio-wealth", "r": 1.0, "returns": two_point_returns(),
                "model": {"kind": "quadratic", "alpha": 0.42, "beta": 0.57}
            }),
            vec![1.86, 2.49],
            Some(PropId::P1),
        ),
        "quadratic-dara" => (
            "Quadratic(1, 0.5) portfolio with wealth as parameter; decreasing absolute risk aversion along shifts.",
            json!({
                "kind": "portfolio-wealth", "r": 1.0, "returns": two_point_returns(),
                "model": {"kind": "quadratic", "alpha": 1.0, "beta": 0.5}
            }),
            vec![0.5, 1.0, 1.5, 2.0, 2.5, 3.0],
            Some(PropId::P1),
        ),
        "chew-rdu-portfolio" => (
            "Rank-dependent portfolio with weighting p^theta and utility (z + 0.1)^(1 - 1/theta) / (1 - 1/theta); larger theta is less risk averse.",
            json!({
                "kind": "portfolio-risk-aversion", "w": 1.0, "r": 1.0,
                "returns": {"support": [0.5, 2.0], "probs": [0.6, 0.4]},
                "family": {"template": {"kind": "rdu", "omega": "power:{theta}", "u": "crra:{inv_theta}:0.1"}}
            }),
            fives,
            Some(PropId::P1),
        ),
        "cara-mixture-wealth" => (
            "Mixture of CARA certainty equivalents; the optimal investment does not depend on wealth.",
            json!({
                "kind": "portfolio-wealth", "r": 1.0, "returns": two_point_returns(),
                "model": {"kind": "cara-mixture", "components": [
                    {"coef": -0.5, "mass": 0.5}, {"coef": -1.5, "mass": 0.5}
                ]}
            }),
            vec![1.0, 1.5, 2.0, 2.5, 3.0],
            Some(PropId::P1),
        ),
        "signal-portfolio" => (
            "CRRA(3) investor; the return distribution is an exponential tilt of a three-point base by theta.",
            json!({
                "kind": "signal-portfolio", "w": 1.0, "r": 1.0,
                "family": {"tilt": {"base": three_point_returns()}},
                "model": {"kind": "eu", "u": "crra:3:0.1"}
            }),
            vec![-1.0, -0.5, 0.0, 0.5, 1.0],
            Some(PropId::A1),
        ),
        "multiplier-signal" => (
            "Multiplier preferences (mu = 1, log utility) around a tilted reference return distribution.",
            json!({
                "kind": "signal-portfolio", "w": 1.0, "r": 1.0,
                "family": {"tilt": {"base": three_point_returns()}},
                "model": {"kind": "multiplier", "mu": 1.0, "u": "log-shift:0.1"}
            }),
            vec![-1.0, -0.5, 0.0, 0.5, 1.0],
            Some(PropId::A1),
        ),
        "gollier-ambiguity" => (
            "Smooth ambiguity over two tilted priors with attitude -exp(-v / theta); larger theta is less ambiguity averse.",
            json!({
                "kind": "ambiguity-portfolio", "w": 1.0, "r": 1.0,
                "model": {
                    "attitude": "neg-exp",
                    "priors": {"tilt": {"base": three_point_returns()}},
                    "second_order": {"support": [-1.0, 1.0], "probs": [0.5, 0.5]},
                    "u": "log-shift:0.1"
                },
                "variant": {"kind": "attitude"}
            }),
            vec![0.25, 0.5, 1.0, 2.0, 4.0],
            Some(PropId::B4),
        ),
        "ambiguity-wealth" => (
            "Smooth ambiguity with constant ambiguity aversion and log utility; wealth is the parameter.",
            json!({
                "kind": "ambiguity-portfolio", "r": 1.0,
                "model": {
                    "attitude": "neg-exp",
                    "priors": {"tilt": {"base": three_point_returns()}},
                    "second_order": {"support": [-1.0, 1.0], "probs": [0.5, 0.5]},
                    "u": "log-shift:0.1"
                },
                "variant": {"kind": "wealth", "attitude_theta": 1.0}
            }),
            vec![0.5, 1.0, 1.5, 2.0, 2.5],
            Some(PropId::B5),
        ),
        "kimball-precautionary" => (
            "Exposure to a background risk chosen to maximize the marginal value of wealth; EU with CRRA 1/theta.",
            json!({
                "kind": "precautionary", "w": 4.0,
                "eps": {"support": [0.0], "probs": [1.0]},
                "family": {"template": {"kind": "eu", "u": "crra:{inv_theta}:0.1"}},
                "variant": {"kind": "kimball", "y": 2.0, "s": {"support": [-1.0, 1.5], "probs": [0.5, 0.5]}}
            }),
            vec![1.0, 1.25, 1.5, 1.75, 2.0],
            None,
        ),
        "kreps-porteus-precautionary" => (
            "Two-period saving with first-period ln(0.1 + c), second-period -exp(-z) aggregated by -(-v)^1.5.",
            json!({
                "kind": "precautionary", "w": 2.0,
                "eps": {"support": [-0.5, 0.5], "probs": [0.5, 0.5]},
                "family": {"fixed": {"kind": "kreps-porteus", "nu": "log-shift:0.1", "phi": "neg-power:1.5", "u": "neg-exp"}},
                "variant": {"kind": "saving"}
            }),
            vec![0.0],
            None,
        ),
        "rdu-precautionary" => (
            "Two-period saving with rank-dependent preferences 1 - (1 - p)^2 and ln(z + 0.1).",
            json!({
                "kind": "precautionary", "w": 2.0,
                "eps": {"support": [-0.5, 0.5], "probs": [0.5, 0.5]},
                "family": {"fixed": {"kind": "rdu", "omega": "dual-power:2", "u": "log-shift:0.1"}},
                "variant": {"kind": "saving"}
            }),
            vec![0.0],
            None,
        ),
        _ => return None,
    })
}

/// Looks up an embedded preset by name.
pub fn preset(name: &str) -> Result<Preset> {
    let (description, problem, theta_grid, prop) =
        body(name).ok_or_else(|| Error::UnknownPreset(name.to_string()))?;
    let problem: ProblemSpec = serde_json::from_value(problem)
        .map_err(|e| Error::InvalidProblem(format!("preset {name}: {e}")))?;
    problem.validate()?;
    Ok(Preset {
        name: name.to_string(),
        description: description.to_string(),
        problem,
        theta_grid,
        prop,
    })
}

pub fn all() -> Vec<Preset> {
    NAMES
        .iter()
        .map(|n| preset(n).expect("embedded presets are valid"))
        .collect()
}

/// Quadratic portfolio with wealth as parameter, indexed by `(alpha, beta)`.
pub fn quadratic_family(params: &[f64]) -> Result<ProblemSpec> {
    let &[alpha, beta] = params else {
        return Err(Error::InvalidProblem(format!(
            "quadratic family takes (alpha, beta), got {} values",
            params.len()
        )));
    };
    let spec = ProblemSpec::PortfolioWealth {
        r: 1.0,
        returns: Lottery::new([(0.5, 0.5), (2.0, 0.5)])?,
        model: PreferenceModel::quadratic(alpha, beta)?,
        x_max: None,
    };
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_loads() {
        let all = all();
        assert_eq!(all.len(), NAMES.len());
        for p in &all {
            assert!(!p.theta_grid.is_empty());
            let json = serde_json::to_string(p).unwrap();
            let back: Preset = serde_json::from_str(&json).unwrap();
            assert_eq!(back.name, p.name);
        }
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(preset("nope"), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn quadratic_family_arity() {
        assert!(quadratic_family(&[0.42, 0.57]).is_ok());
        assert!(quadratic_family(&[0.42]).is_err());
    }
}
