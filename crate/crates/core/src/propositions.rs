//! Hypotheses of the comparative-statics propositions, checked on grids.
//!
//! Each [`PropId`] names a set of sufficient conditions for a conclusion
//! about the objective `U(x, theta)`: `U_1` single crossing in `theta`,
//! `U` single crossing in `(x; theta)`, or `U` supermodular. The checker
//! samples the ingredients the problem exposes (the state distribution `H`
//! induced by the action, its density, local utilities along the relevant
//! lotteries) and returns one composite [`ConditionReport`] whose components
//! are the individual hypotheses.
//!
//! Portfolio problems use the excess return `t = x (s - r)` as the state, so
//! that `H(t; x) = F_s(t / x + r)` and outcomes are `w r + t`. "Almost
//! everywhere" qualifiers are implemented by sampling the half-open support
//! hull of the relevant lotteries and leaving out their atoms, where local
//! utility derivatives of rank-dependent models jump.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ambiguity::AmbiguityModel;
use crate::conditions::{
    check_axis, is_log_spm, is_monotone, is_nonnegative, is_nonpositive, is_sc2, is_sc2_masked,
    is_supermodular, Check, ConditionReport, GridFn, Tolerance, Witness,
};
use crate::error::{Error, Result};
use crate::lottery::Lottery;
use crate::preferences::{Differentiability, PreferenceModel};
use crate::problems::{AmbiguityVariant, Instance, ProblemSpec};
use crate::quadrature::gauss_legendre_unit;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PropId {
    P1,
    P2a,
    P2b,
    #[serde(rename = "P3.1")]
    P3_1,
    #[serde(rename = "P3.2")]
    P3_2,
    #[serde(rename = "P3.3")]
    P3_3,
    P4,
    A1,
    A2,
    A3,
    A4,
    B4,
    B5,
}

/// What a proposition concludes about the objective.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Conclusion {
    U1Sc1,
    USc2,
    USupermodular,
}

impl Conclusion {
    pub fn label(self) -> &'static str {
        match self {
            Conclusion::U1Sc1 => "U1 SC1 in theta",
            Conclusion::USc2 => "U SC2 in (x; theta)",
            Conclusion::USupermodular => "U supermodular in (x, theta)",
        }
    }
}

impl PropId {
    pub const ALL: [PropId; 13] = [
        PropId::P1,
        PropId::P2a,
        PropId::P2b,
        PropId::P3_1,
        PropId::P3_2,
        PropId::P3_3,
        PropId::P4,
        PropId::A1,
        PropId::A2,
        PropId::A3,
        PropId::A4,
        PropId::B4,
        PropId::B5,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PropId::P1 => "P1",
            PropId::P2a => "P2a",
            PropId::P2b => "P2b",
            PropId::P3_1 => "P3.1",
            PropId::P3_2 => "P3.2",
            PropId::P3_3 => "P3.3",
            PropId::P4 => "P4",
            PropId::A1 => "A1",
            PropId::A2 => "A2",
            PropId::A3 => "A3",
            PropId::A4 => "A4",
            PropId::B4 => "B4",
            PropId::B5 => "B5",
        }
    }

    pub fn conclusion(self) -> Conclusion {
        match self {
            PropId::P1 | PropId::P2a | PropId::P2b | PropId::A1 | PropId::B4 | PropId::B5 => {
                Conclusion::U1Sc1
            }
            PropId::P3_1 | PropId::P3_2 | PropId::P3_3 | PropId::A2 | PropId::A3 => {
                Conclusion::USc2
            }
            PropId::P4 | PropId::A4 => Conclusion::USupermodular,
        }
    }

    /// A single-crossing derivative yields monotone maximizers only for
    /// objectives quasiconcave in `x`.
    pub fn needs_quasiconcavity(self) -> bool {
        self.conclusion() == Conclusion::U1Sc1
    }
}

impl fmt::Display for PropId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PropId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PropId::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidGrid(format!("unknown proposition `{s}`")))
    }
}

/// Sampling grids for [`check_proposition`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PropGrids {
    pub theta_grid: Vec<f64>,
    /// Actions; defaults to `n_x` interior points of the common action
    /// domain. Nonpositive actions are dropped.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_grid: Option<Vec<f64>>,
    pub n_x: usize,
    /// Points per continuous state or outcome axis.
    pub n_states: usize,
    /// Mixture weights of the path between two lotteries; defaults to the
    /// 32 Gauss-Legendre nodes on `[0, 1]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_grid: Option<Vec<f64>>,
    /// Index pairs `(i, j)`, `i < j`, into the action grid; defaults to all.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<(usize, usize)>>,
}

impl Default for PropGrids {
    fn default() -> Self {
        Self {
            theta_grid: Vec::new(),
            x_grid: None,
            n_x: 8,
            n_states: 48,
            alpha_grid: None,
            pairs: None,
        }
    }
}

impl PropGrids {
    pub fn new(theta_grid: Vec<f64>) -> Self {
        Self {
            theta_grid,
            ..Self::default()
        }
    }
}

fn missing(prop: PropId, ingredient: &str) -> Error {
    Error::MissingIngredient {
        prop: prop.to_string(),
        ingredient: ingredient.to_string(),
    }
}

/// Checks every hypothesis of `prop` for `spec` on `grids`.
pub fn check_proposition(
    spec: &ProblemSpec,
    prop: PropId,
    grids: &PropGrids,
    tol: &Tolerance,
) -> Result<ConditionReport> {
    if grids.theta_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    check_axis(&grids.theta_grid)?;
    if grids.n_states < 3 {
        return Err(Error::InvalidGrid("n_states must be at least 3".into()));
    }
    let applicable = match spec {
        ProblemSpec::PortfolioRiskAversion { .. } | ProblemSpec::PortfolioWealth { .. } => {
            matches!(
                prop,
                PropId::P1
                    | PropId::P2a
                    | PropId::P2b
                    | PropId::P3_1
                    | PropId::P3_2
                    | PropId::P3_3
                    | PropId::P4
            )
        }
        ProblemSpec::SignalPortfolio { .. } => {
            matches!(prop, PropId::A1 | PropId::A2 | PropId::A3 | PropId::A4)
        }
        ProblemSpec::AmbiguityPortfolio { variant, .. } => matches!(
            (prop, variant),
            (PropId::B4, AmbiguityVariant::Attitude { .. })
                | (PropId::B5, AmbiguityVariant::Wealth { .. })
        ),
        ProblemSpec::Precautionary { .. } => false,
    };
    if !applicable {
        let need = match prop {
            PropId::A1 | PropId::A2 | PropId::A3 | PropId::A4 => {
                "a parameter-dependent return distribution g(s; theta)"
            }
            PropId::B4 => "a smooth-ambiguity attitude parameter",
            PropId::B5 => "a smooth-ambiguity portfolio with wealth as parameter",
            _ => "an action-dependent state distribution H(s; x)",
        };
        return Err(missing(prop, &format!("{need} ({} problem)", spec.kind())));
    }
    let ctx = Ctx::new(spec, prop, grids, tol)?;
    let components = match spec {
        ProblemSpec::PortfolioRiskAversion { returns, r, .. }
        | ProblemSpec::PortfolioWealth { returns, r, .. } => Portfolio {
            ctx: &ctx,
            returns,
            r: *r,
        }
        .check()?,
        ProblemSpec::SignalPortfolio { .. } => Signal { ctx: &ctx }.check()?,
        ProblemSpec::AmbiguityPortfolio { model, .. } => Smooth { ctx: &ctx, model }.check()?,
        ProblemSpec::Precautionary { .. } => unreachable!("rejected above"),
    };
    Ok(ConditionReport::all_of(prop.as_str(), components)
        .with_conclusion(prop.conclusion().label()))
}

struct Ctx<'a> {
    spec: &'a ProblemSpec,
    prop: PropId,
    tol: &'a Tolerance,
    thetas: Vec<f64>,
    insts: Vec<Instance<'a>>,
    xs: Vec<f64>,
    alphas: Vec<f64>,
    pairs: Vec<(usize, usize)>,
    n: usize,
}

impl<'a> Ctx<'a> {
    fn new(
        spec: &'a ProblemSpec,
        prop: PropId,
        grids: &PropGrids,
        tol: &'a Tolerance,
    ) -> Result<Self> {
        let thetas = grids.theta_grid.clone();
        let insts = thetas
            .iter()
            .map(|&t| spec.at(t))
            .collect::<Result<Vec<_>>>()?;
        let hi = insts
            .iter()
            .map(|i| i.action_domain().map(|d| d.1))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        let xs: Vec<f64> = match &grids.x_grid {
            Some(xs) => {
                let xs: Vec<f64> = xs.iter().copied().filter(|&x| x > 0.0).collect();
                if let Some(&x) = xs.iter().find(|&&x| x > hi) {
                    return Err(Error::InvalidGrid(format!(
                        "action {x} lies outside the action domain [0, {hi}]"
                    )));
                }
                xs
            }
            None => (1..=grids.n_x)
                .map(|k| hi * k as f64 / (grids.n_x + 1) as f64)
                .collect(),
        };
        if xs.len() < 2 {
            return Err(Error::InvalidGrid(
                "at least two positive actions are needed".into(),
            ));
        }
        check_axis(&xs)?;
        let alphas = match &grids.alpha_grid {
            Some(a) => {
                check_axis(a)?;
                if a.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
                    return Err(Error::InvalidGrid(
                        "mixture weights must lie in [0, 1]".into(),
                    ));
                }
                a.clone()
            }
            None => gauss_legendre_unit(32).0,
        };
        let pairs = match &grids.pairs {
            Some(p) => {
                if let Some(&(i, j)) = p.iter().find(|&&(i, j)| !(i < j && j < xs.len())) {
                    return Err(Error::InvalidGrid(format!(
                        "action pair ({i}, {j}) is not an ordered pair of grid indices"
                    )));
                }
                p.clone()
            }
            None => (0..xs.len())
                .flat_map(|i| (i + 1..xs.len()).map(move |j| (i, j)))
                .collect(),
        };
        Ok(Self {
            spec,
            prop,
            tol,
            thetas,
            insts,
            xs,
            alphas,
            pairs,
            n: grids.n_states,
        })
    }

    fn model(&self, k: usize) -> &PreferenceModel {
        self.insts[k]
            .model()
            .expect("problem with a preference model")
    }

    fn differentiability(&self, need: Differentiability) -> ConditionReport {
        let models: Vec<&PreferenceModel> = (0..self.insts.len()).map(|k| self.model(k)).collect();
        match need {
            Differentiability::Hadamard => {
                let bad = models
                    .iter()
                    .find(|m| m.differentiability() != Differentiability::Hadamard);
                ConditionReport::declared(
                    "preferences Hadamard differentiable",
                    bad.is_none(),
                    &match bad {
                        Some(m) => {
                            format!("{} preferences are only Gateaux differentiable", m.kind())
                        }
                        None => format!(
                            "{} preferences are Hadamard differentiable",
                            models[0].kind()
                        ),
                    },
                )
            }
            Differentiability::Gateaux => ConditionReport::declared(
                "preferences Gateaux differentiable",
                true,
                &format!(
                    "{} preferences are Gateaux differentiable",
                    models[0].kind()
                ),
            ),
        }
    }
}

/// `n` points spread over `[a, b)` with the listed atoms removed.
fn hull_grid(a: f64, b: f64, n: usize, atoms: &[f64]) -> Vec<f64> {
    let scale = a.abs().max(b.abs()).max(1.0);
    (0..n)
        .map(|k| a + (b - a) * k as f64 / n as f64)
        .filter(|&t| !atoms.iter().any(|&z| (t - z).abs() <= 1e-12 * scale))
        .collect()
}

fn union_sorted(values: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.into_iter().collect();
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(1.0));
    v
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (a, b) = if b > a { (a, b) } else { (a - 1.0, a + 1.0) };
    (0..n)
        .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
        .collect()
}

/// `g(p, .)` is nondecreasing in first-order stochastic dominance along
/// axis 0 of a CDF sample over `(p, t)`.
fn fosd_increasing(name: &str, cdf: &GridFn, tol: &Tolerance) -> ConditionReport {
    let shape = cdf.shape();
    for i in 0..shape[0] {
        for j in i + 1..shape[0] {
            for k in 0..shape[1] {
                if cdf.get(&[j, k]) > cdf.get(&[i, k]) + tol.abs {
                    let w = Witness::on(Check::Fosd, cdf, vec![vec![j, k], vec![i, k]]);
                    return ConditionReport::new(name, shape, None, Some(w));
                }
            }
        }
    }
    ConditionReport::new(name, shape, None, None)
}

fn equal_means(
    name: &str,
    xs: &[f64],
    means: &[f64],
    pairs: &[(usize, usize)],
    tol: &Tolerance,
) -> Result<ConditionReport> {
    let g = GridFn::new(vec![xs.to_vec()], means.to_vec())?;
    let hit = pairs.iter().find(|&&(i, j)| {
        (means[i] - means[j]).abs() > tol.slack(means[i].abs().max(means[j].abs()))
    });
    let margin = pairs
        .iter()
        .map(|&(i, j)| -(means[i] - means[j]).abs())
        .fold(None, |acc: Option<f64>, m| {
            Some(acc.map_or(m, |a| a.min(m)))
        });
    let witness = hit.map(|&(i, j)| Witness::on(Check::EqualMeans, &g, vec![vec![i], vec![j]]));
    Ok(ConditionReport::new(name, g.shape(), margin, witness))
}

/// Local-utility field requested from a model: `u`, `u_1` or `-u_11`
/// style transforms, all evaluated at an outcome and a lottery.
#[derive(Clone, Copy, PartialEq)]
enum Field {
    Level,
    D1,
    D2,
}

impl Field {
    fn eval(self, m: &PreferenceModel, z: f64, f: &Lottery) -> Result<f64> {
        match self {
            Field::Level => m.local_utility(z, f),
            Field::D1 => m.local_utility_deriv(z, f, 1),
            Field::D2 => m.local_utility_deriv(z, f, 2),
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Field::Level => "v",
            Field::D1 => "v1",
            Field::D2 => "-v11",
        }
    }

    /// The sign requirement and the log-spm check of the field.
    fn checks(self, g: &GridFn, tol: &Tolerance) -> Result<Vec<ConditionReport>> {
        Ok(match self {
            Field::D2 => {
                let neg = g.map(|v| -v)?;
                vec![
                    is_nonpositive(g, tol)?.renamed("v11 <= 0"),
                    is_log_spm(&neg, tol)?,
                ]
            }
            _ => vec![
                is_nonnegative(g, tol)?.renamed(&format!("{} >= 0", self.symbol())),
                is_log_spm(g, tol)?,
            ],
        })
    }
}

struct Portfolio<'c, 'a> {
    ctx: &'c Ctx<'a>,
    returns: &'a Lottery,
    r: f64,
}

impl Portfolio<'_, '_> {
    fn atoms(&self, x: f64) -> Vec<f64> {
        self.returns
            .support()
            .iter()
            .map(|s| x * (s - self.r))
            .collect()
    }

    fn hull(&self, x: f64) -> (f64, f64) {
        (
            x * (self.returns.min() - self.r),
            x * (self.returns.max() - self.r),
        )
    }

    /// Excess-return grid on the hull of `x_hi`, without the atoms of any
    /// action in `with_atoms`.
    fn t_grid(&self, x_hi: f64, with_atoms: &[f64]) -> Vec<f64> {
        let (a, b) = self.hull(x_hi);
        let atoms: Vec<f64> = with_atoms.iter().flat_map(|&x| self.atoms(x)).collect();
        hull_grid(a, b, self.ctx.n, &atoms)
    }

    fn wealth(&self, k: usize) -> f64 {
        self.ctx
            .spec
            .portfolio(self.ctx.thetas[k])
            .expect("portfolio problem")
            .w
    }

    fn check(&self) -> Result<Vec<ConditionReport>> {
        let c = self.ctx;
        let tol = c.tol;
        Ok(match c.prop {
            PropId::P1 => vec![
                c.differentiability(Differentiability::Hadamard),
                self.h_sc2()?,
                self.per_action(Field::D1)?,
            ],
            PropId::P2a => vec![
                c.differentiability(Differentiability::Hadamard),
                self.pmf_sc2()?,
                self.per_action(Field::Level)?,
            ],
            PropId::P2b => vec![
                c.differentiability(Differentiability::Hadamard),
                self.integrated_h_sc2()?,
                self.equal_means()?,
                self.per_action(Field::D2)?,
            ],
            PropId::P3_1 => vec![
                c.differentiability(Differentiability::Gateaux),
                self.pmf_sc2()?,
                self.along_paths(Field::Level)?,
            ],
            PropId::P3_2 => vec![
                c.differentiability(Differentiability::Gateaux),
                self.h_sc2()?,
                self.along_paths(Field::D1)?,
            ],
            PropId::P3_3 => vec![
                c.differentiability(Differentiability::Gateaux),
                self.integrated_h_sc2()?,
                self.equal_means()?,
                self.along_paths(Field::D2)?,
            ],
            PropId::P4 => {
                let t = self.t_grid(c.xs[c.xs.len() - 1], &[]);
                let h = c.spec.h_samples(&c.xs, &t)?;
                vec![
                    c.differentiability(Differentiability::Gateaux),
                    fosd_increasing("H(.; x) increasing in x (FOSD)", &h, tol),
                    self.path_supermodular()?,
                ]
            }
            _ => unreachable!("portfolio propositions"),
        })
    }

    fn h_sc2(&self) -> Result<ConditionReport> {
        let c = self.ctx;
        let xs = &c.xs;
        let t = self.t_grid(xs[xs.len() - 1], &[]);
        let h = c.spec.h_samples(xs, &t)?;
        let scale = |x: f64| self.hull(x).0.abs().max(self.hull(x).1.abs()).max(1.0);
        let admit = |i: usize, j: usize, k: usize| {
            let (a, b) = self.hull(xs[j]);
            let tk = t[k];
            tk >= a
                && tk < b
                && ![xs[i], xs[j]].iter().any(|&x| {
                    self.atoms(x)
                        .iter()
                        .any(|&z| (tk - z).abs() <= 1e-12 * scale(x))
                })
        };
        Ok(is_sc2_masked(&h, c.tol, true, admit)?.renamed("H SC2 in (-x; s) a.e."))
    }

    fn pmf_sc2(&self) -> Result<ConditionReport> {
        let c = self.ctx;
        let t = union_sorted(c.xs.iter().flat_map(|&x| self.atoms(x)));
        Ok(is_sc2(&c.spec.pmf_samples(&c.xs, &t)?, c.tol)?.renamed("h SC2 in (x; s)"))
    }

    fn integrated_h_sc2(&self) -> Result<ConditionReport> {
        let c = self.ctx;
        let (a, b) = self.hull(c.xs[c.xs.len() - 1]);
        let t = linspace(a, b, c.n);
        let g = c.spec.integrated_h_samples(&c.xs, &t)?;
        // Both integrals vanish identically below the support of H(.; x_hat).
        let admit = |_: usize, j: usize, k: usize| t[k] > self.hull(c.xs[j]).0;
        Ok(is_sc2_masked(&g, c.tol, true, admit)?.renamed("integrated H SC2 in (-x; s)"))
    }

    fn equal_means(&self) -> Result<ConditionReport> {
        let c = self.ctx;
        let means =
            c.xs.iter()
                .map(|&x| c.spec.excess_lottery(x).map(|l| l.mean()))
                .collect::<Result<Vec<_>>>()?;
        equal_means("equal means across actions", &c.xs, &means, &c.pairs, c.tol)
    }

    /// Sign and log-spm of the field in `(s, theta)`, at every action.
    fn per_action(&self, field: Field) -> Result<ConditionReport> {
        let c = self.ctx;
        let reports =
            c.xs.par_iter()
                .map(|&x| {
                    let t = self.t_grid(x, &[x]);
                    let lotteries = (0..c.thetas.len())
                        .map(|k| c.insts[k].outcome_lottery(x))
                        .collect::<Result<Vec<_>>>()?;
                    let g = GridFn::try_from_fn(vec![t, c.thetas.clone()], |p| {
                        let k = c
                            .thetas
                            .iter()
                            .position(|&th| th == p[1])
                            .expect("theta on grid");
                        field.eval(c.model(k), self.wealth(k) * self.r + p[0], &lotteries[k])
                    })?;
                    Ok(field
                        .checks(&g, c.tol)?
                        .into_iter()
                        .map(|r| r.with_note(format!("x = {x}")))
                        .collect::<Vec<_>>())
                })
                .collect::<Result<Vec<_>>>()?;
        let (signs, spms): (Vec<_>, Vec<_>) = reports
            .into_iter()
            .map(|mut v| (v.remove(0), v.remove(0)))
            .unzip();
        let sym = field.symbol();
        Ok(ConditionReport::all_of(
            &format!("{sym} sign and log-spm in (s, theta) for every x"),
            vec![
                ConditionReport::all_of(&format!("{sym} sign for every x"), signs),
                ConditionReport::all_of(&format!("{sym} log-spm in (s, theta) for every x"), spms),
            ],
        ))
    }

    /// The field on `(s, theta, alpha)` along the mixture path between the
    /// outcome lotteries of every action pair.
    fn path_field(&self, field: Field, i: usize, j: usize) -> Result<GridFn> {
        let c = self.ctx;
        let (x, xh) = (c.xs[i], c.xs[j]);
        let t = self.t_grid(xh, &[x, xh]);
        let ends = (0..c.thetas.len())
            .map(|k| {
                Ok((
                    c.insts[k].outcome_lottery(x)?,
                    c.insts[k].outcome_lottery(xh)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut values = Vec::with_capacity(t.len() * c.thetas.len() * c.alphas.len());
        for &tt in &t {
            for (k, (from, to)) in ends.iter().enumerate() {
                for &a in &c.alphas {
                    let f = from.mix(to, a)?;
                    values.push(field.eval(c.model(k), self.wealth(k) * self.r + tt, &f)?);
                }
            }
        }
        GridFn::new(vec![t, c.thetas.clone(), c.alphas.clone()], values)
    }

    fn along_paths(&self, field: Field) -> Result<ConditionReport> {
        let c = self.ctx;
        let reports = c
            .pairs
            .par_iter()
            .map(|&(i, j)| {
                let g = self.path_field(field, i, j)?;
                Ok(field
                    .checks(&g, c.tol)?
                    .into_iter()
                    .map(|r| r.with_note(format!("x = {}, x_hat = {}", c.xs[i], c.xs[j])))
                    .collect::<Vec<_>>())
            })
            .collect::<Result<Vec<_>>>()?;
        let sym = field.symbol();
        Ok(ConditionReport::all_of(
            &format!("{sym} sign and log-spm in (s, theta, alpha) for every x_hat > x"),
            reports.into_iter().flatten().collect(),
        ))
    }

    fn path_supermodular(&self) -> Result<ConditionReport> {
        let c = self.ctx;
        let reports = c
            .pairs
            .par_iter()
            .map(|&(i, j)| {
                let g = self.path_field(Field::Level, i, j)?;
                let shape = g.shape();
                let (t, th) = (g.axes()[0].clone(), g.axes()[1].clone());
                let slices = (0..shape[2])
                    .map(|a| {
                        let slice = GridFn::from_fn(vec![t.clone(), th.clone()], |p| {
                            let ti = t.iter().position(|&v| v == p[0]).unwrap();
                            let ki = th.iter().position(|&v| v == p[1]).unwrap();
                            g.get(&[ti, ki, a])
                        })?;
                        Ok(is_supermodular(&slice, c.tol)?.with_note(format!(
                            "x = {}, x_hat = {}, alpha = {}",
                            c.xs[i], c.xs[j], c.alphas[a]
                        )))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(ConditionReport::all_of(
                    &format!(
                        "v supermodular in (s, theta) at x = {}, x_hat = {}",
                        c.xs[i], c.xs[j]
                    ),
                    slices,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ConditionReport::all_of(
            "v supermodular in (s, theta) for every x_hat > x and alpha",
            reports,
        ))
    }
}

/// Return distribution moved by the parameter; the action moves outcomes
/// `kappa(s, x) = w r + x (s - r)`.
struct Signal<'c, 'a> {
    ctx: &'c Ctx<'a>,
}

impl Signal<'_, '_> {
    fn params(&self) -> (f64, f64) {
        match self.ctx.spec {
            ProblemSpec::SignalPortfolio { w, r, .. } => (*w, *r),
            _ => unreachable!("signal portfolio"),
        }
    }

    fn kappa(&self, s: f64, x: f64) -> f64 {
        let (w, r) = self.params();
        w * r + x * (s - r)
    }

    fn returns(&self, k: usize) -> &Lottery {
        self.ctx.insts[k]
            .return_lottery()
            .expect("signal portfolio returns")
    }

    fn states(&self) -> Vec<f64> {
        union_sorted((0..self.ctx.thetas.len()).flat_map(|k| self.returns(k).support().to_vec()))
    }

    fn check(&self) -> Result<Vec<ConditionReport>> {
        let c = self.ctx;
        Ok(match c.prop {
            PropId::A1 => vec![
                c.differentiability(Differentiability::Hadamard),
                self.g_log_spm()?,
                self.kappa_conditions()?,
                self.u1_per_action()?,
            ],
            PropId::A2 => vec![
                c.differentiability(Differentiability::Gateaux),
                self.g_log_spm()?,
                self.level_path_log_spm()?,
            ],
            PropId::A3 => vec![
                c.differentiability(Differentiability::Gateaux),
                self.g_log_spm()?,
                self.kappa_conditions()?,
                self.u1_paths()?,
            ],
            PropId::A4 => vec![
                c.differentiability(Differentiability::Gateaux),
                self.g_fosd()?,
                self.theta_path_supermodular()?,
            ],
            _ => unreachable!("signal propositions"),
        })
    }

    fn g_log_spm(&self) -> Result<ConditionReport> {
        let c = self.ctx;
        let states = self.states();
        let g = GridFn::from_fn(vec![states, c.thetas.clone()], |p| {
            let k = c.thetas.iter().position(|&t| t == p[1]).unwrap();
            self.returns(k).mass_at(p[0])
        })?;
        Ok(is_log_spm(&g, c.tol)?.renamed("g(s; theta) log-spm"))
    }

    fn g_fosd(&self) -> Result<ConditionReport> {
        let c = self.ctx;
        let cdf = GridFn::from_fn(vec![c.thetas.clone(), self.states()], |p| {
            let k = c.thetas.iter().position(|&t| t == p[0]).unwrap();
            self.returns(k).cdf(p[1])
        })?;
        Ok(fosd_increasing(
            "G(.; theta) increasing in theta (FOSD)",
            &cdf,
            c.tol,
        ))
    }

    fn kappa_conditions(&self) -> Result<ConditionReport> {
        let c = self.ctx;
        let states = self.states();
        let k = GridFn::from_fn(vec![c.xs.clone(), states.clone()], |p| {
            self.kappa(p[1], p[0])
        })?;
        let mut comps = vec![is_sc2(&k, c.tol)?.renamed("kappa SC2 in (x; s)")];
        for &x in &c.xs {
            let slice = GridFn::from_fn1(states.clone(), |s| self.kappa(s, x))?;
            comps.push(
                is_monotone(&slice, true, c.tol)?
                    .renamed("kappa increasing in s")
                    .with_note(format!("x = {x}")),
            );
        }
        Ok(ConditionReport::all_of(
            "kappa increasing in s and SC2 in (x; s)",
            comps,
        ))
    }

    fn outcome_atoms(&self, x: f64) -> Vec<f64> {
        self.states().iter().map(|&s| self.kappa(s, x)).collect()
    }

    fn z_grid(&self, x_hi: f64, with_atoms: &[f64]) -> Vec<f64> {
        let s = self.states();
        let atoms: Vec<f64> = with_atoms
            .iter()
            .flat_map(|&x| self.outcome_atoms(x))
            .collect();
        hull_grid(
            self.kappa(s[0], x_hi),
            self.kappa(s[s.len() - 1], x_hi),
            self.ctx.n,
            &atoms,
        )
    }

    /// `u1(z, F(.; x, theta))`: positive, and log-spm in `(z, theta)`.
    fn u1_per_action(&self) -> Result<ConditionReport> {
        let c = self.ctx;
        let (signs, spms): (Vec<_>, Vec<_>) =
            c.xs.par_iter()
                .map(|&x| {
                    let z = self.z_grid(x, &[x]);
                    let fs = (0..c.thetas.len())
                        .map(|k| c.insts[k].outcome_lottery(x))
                        .collect::<Result<Vec<_>>>()?;
                    let g = GridFn::try_from_fn(vec![z, c.thetas.clone()], |p| {
                        let k = c.thetas.iter().position(|&t| t == p[1]).unwrap();
                        c.model(k).local_utility_deriv(p[0], &fs[k], 1)
                    })?;
                    let note = format!("x = {x}");
                    Ok((
                        is_nonnegative(&g, c.tol)?
                            .renamed("u increasing in z")
                            .with_note(note.clone()),
                        is_log_spm(&g, c.tol)?
                            .renamed("u1(z, F(.; x, theta)) log-spm in (z, theta)")
                            .with_note(note),
                    ))
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .unzip();
        Ok(ConditionReport::all_of(
            "u increasing and u1 log-spm in (z, F) for every x",
            vec![
                ConditionReport::all_of("u increasing in z for every x", signs),
                ConditionReport::all_of("u1 log-spm in (z, theta) for every x", spms),
            ],
        ))
    }

    fn u1_paths(&self) -> Result<ConditionReport> {
        let c = self.ctx;
        let reports = c
            .pairs
            .par_iter()
            .map(|&(i, j)| {
                let (x, xh) = (c.xs[i], c.xs[j]);
                let z = self.z_grid(xh, &[x, xh]);
                let ends = (0..c.thetas.len())
                    .map(|k| {
                        Ok((
                            c.insts[k].outcome_lottery(x)?,
                            c.insts[k].outcome_lottery(xh)?,
                        ))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let mut values = Vec::new();
                for &zz in &z {
                    for &a in &c.alphas {
                        for (k, (from, to)) in ends.iter().enumerate() {
                            let f = from.mix(to, a)?;
                            values.push(c.model(k).local_utility_deriv(zz, &f, 1)?);
                        }
                    }
                }
                let g = GridFn::new(vec![z, c.alphas.clone(), c.thetas.clone()], values)?;
                let note = format!("x = {x}, x_hat = {xh}");
                Ok(vec![
                    is_nonnegative(&g, c.tol)?
                        .renamed("u increasing in z")
                        .with_note(note.clone()),
                    is_log_spm(&g, c.tol)?
                        .renamed("u1 log-spm in (z, alpha, theta)")
                        .with_note(note),
                ])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ConditionReport::all_of(
            "u1(z, F_alpha(theta)) positive and log-spm in (z, alpha, theta) for every x_hat > x",
            reports.into_iter().flatten().collect(),
        ))
    }

    /// `u(kappa(s, x'), F_alpha(theta))` on `(s, x', alpha, theta)` with
    /// `x'` in `{x, x_hat}`.
    fn level_path_log_spm(&self) -> Result<ConditionReport> {
        let c = self.ctx;
        let states = self.states();
        let reports = c
            .pairs
            .par_iter()
            .map(|&(i, j)| {
                let (x, xh) = (c.xs[i], c.xs[j]);
                let ends = (0..c.thetas.len())
                    .map(|k| {
                        Ok((
                            c.insts[k].outcome_lottery(x)?,
                            c.insts[k].outcome_lottery(xh)?,
                        ))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let mut values = Vec::new();
                for &s in &states {
                    for &xp in &[x, xh] {
                        for &a in &c.alphas {
                            for (k, (from, to)) in ends.iter().enumerate() {
                                let f = from.mix(to, a)?;
                                values.push(c.model(k).local_utility(self.kappa(s, xp), &f)?);
                            }
                        }
                    }
                }
                let g = GridFn::new(
                    vec![
                        states.clone(),
                        vec![x, xh],
                        c.alphas.clone(),
                        c.thetas.clone(),
                    ],
                    values,
                )?;
                Ok(is_log_spm(&g, c.tol)?.with_note(format!("x = {x}, x_hat = {xh}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ConditionReport::all_of(
            "u(kappa(s, x'), F_alpha(theta)) log-spm in (s, x', alpha, theta) for every x_hat > x",
            reports,
        ))
    }

    /// `u(kappa(s, x), P_alpha(x))` supermodular in `(s, x)`, where
    /// `P_alpha` mixes the outcome lotteries at two parameters.
    fn theta_path_supermodular(&self) -> Result<ConditionReport> {
        let c = self.ctx;
        let states = self.states();
        let nt = c.thetas.len();
        let theta_pairs: Vec<(usize, usize)> = (0..nt)
            .flat_map(|i| (i + 1..nt).map(move |j| (i, j)))
            .collect();
        let reports = theta_pairs
            .par_iter()
            .map(|&(i, j)| {
                let ends =
                    c.xs.iter()
                        .map(|&x| {
                            Ok((
                                c.insts[i].outcome_lottery(x)?,
                                c.insts[j].outcome_lottery(x)?,
                            ))
                        })
                        .collect::<Result<Vec<_>>>()?;
                let model_lo = c.model(i);
                let slices = c
                    .alphas
                    .iter()
                    .map(|&a| {
                        let g = GridFn::try_from_fn(vec![states.clone(), c.xs.clone()], |p| {
                            let xi = c.xs.iter().position(|&v| v == p[1]).unwrap();
                            let f = ends[xi].0.mix(&ends[xi].1, a)?;
                            model_lo.local_utility(self.kappa(p[0], p[1]), &f)
                        })?;
                        Ok(is_supermodular(&g, c.tol)?.with_note(format!("alpha = {a}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(ConditionReport::all_of(
                    &format!(
                        "v supermodular in (s, x) at theta = {}, theta_hat = {}",
                        c.thetas[i], c.thetas[j]
                    ),
                    slices,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ConditionReport::all_of(
            "v(s, x, alpha) supermodular in (s, x) for every theta_hat > theta and alpha",
            reports,
        ))
    }
}

/// Portfolio choice under smooth ambiguity.
struct Smooth<'c, 'a> {
    ctx: &'c Ctx<'a>,
    model: &'a AmbiguityModel,
}

impl Smooth<'_, '_> {
    fn check(&self) -> Result<Vec<ConditionReport>> {
        let c = self.ctx;
        let mut comps = vec![
            ConditionReport::declared(
                "preferences Hadamard differentiable",
                true,
                "smooth ambiguity preferences with differentiable attitude and utility",
            ),
            self.kappa_sc2()?,
            self.f_log_spm()?,
        ];
        match c.prop {
            PropId::B4 => comps.push(self.attitude_log_spm()?),
            PropId::B5 => comps.extend(self.decreasing_aversion()?),
            _ => unreachable!("ambiguity propositions"),
        }
        Ok(comps)
    }

    fn wealth(&self, k: usize) -> f64 {
        self.ctx
            .spec
            .portfolio(self.ctx.thetas[k])
            .expect("ambiguity portfolio")
            .w
    }

    fn r(&self) -> f64 {
        self.ctx
            .spec
            .portfolio(self.ctx.thetas[0])
            .expect("ambiguity portfolio")
            .r
    }

    fn kappa_sc2(&self) -> Result<ConditionReport> {
        let c = self.ctx;
        let (w, r) = (self.wealth(0), self.r());
        let g = GridFn::from_fn(vec![c.xs.clone(), self.model.states()], |p| {
            w * r + p[0] * (p[1] - r)
        })?;
        Ok(is_sc2(&g, c.tol)?.renamed("kappa SC2 in (x; s)"))
    }

    fn f_log_spm(&self) -> Result<ConditionReport> {
        let c = self.ctx;
        let table = self.model.prior_table();
        let lambdas: Vec<f64> = table.iter().map(|e| e.0).collect();
        let g = GridFn::from_fn(vec![self.model.states(), lambdas.clone()], |p| {
            let l = lambdas.iter().position(|&v| v == p[1]).unwrap();
            table[l].2.mass_at(p[0])
        })?;
        Ok(is_log_spm(&g, c.tol)?.renamed("f(s; lambda) log-spm"))
    }

    /// Range of the prior expected utilities `E_lambda u(kappa(s, x))` over
    /// the action and parameter grids.
    fn value_range(&self) -> (f64, f64) {
        let c = self.ctx;
        let u = self.model.bernoulli();
        let r = self.r();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for k in 0..c.thetas.len() {
            let w = self.wealth(k);
            for &x in &c.xs {
                for (_, _, f) in self.model.prior_table() {
                    let v = f.expectation(|s| u.value(w * r + x * (s - r)));
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
        }
        (lo, hi)
    }

    fn attitude_log_spm(&self) -> Result<ConditionReport> {
        let c = self.ctx;
        let (lo, hi) = self.value_range();
        let att = self.model.attitude();
        let g = GridFn::from_fn(vec![linspace(lo, hi, c.n), c.thetas.clone()], |p| {
            att.deriv(1, p[0], p[1])
        })?;
        Ok(is_log_spm(&g, c.tol)?.renamed("phi_1(v, theta) log-spm in (v, theta)"))
    }

    fn decreasing_aversion(&self) -> Result<Vec<ConditionReport>> {
        let c = self.ctx;
        let u = self.model.bernoulli();
        let r = self.r();
        let states = self.model.states();
        let (s_lo, s_hi) = (states[0], states[states.len() - 1]);
        let x_hi = c.xs[c.xs.len() - 1];
        let w_lo = self.wealth(0);
        let w_hi = self.wealth(c.thetas.len() - 1);
        let z_lo = (w_lo * r + x_hi * (s_lo - r)).min(w_lo * r);
        let z_hi = (w_hi * r + x_hi * (s_hi - r)).max(w_hi * r);
        let ara = GridFn::from_fn1(linspace(z_lo, z_hi, c.n), |z| -u.d2(z) / u.d1(z))?;
        let theta = match c.spec {
            ProblemSpec::AmbiguityPortfolio {
                variant: AmbiguityVariant::Wealth { attitude_theta },
                ..
            } => attitude_theta.unwrap_or(f64::NAN),
            _ => f64::NAN,
        };
        let (lo, hi) = self.value_range();
        let att = self.model.attitude();
        let aaa = GridFn::from_fn1(linspace(lo, hi, c.n), |v| {
            -att.deriv(2, v, theta) / att.deriv(1, v, theta)
        })?;
        Ok(vec![
            is_monotone(&ara, false, c.tol)?.renamed("-u11 / u1 decreasing in z"),
            is_monotone(&aaa, false, c.tol)?.renamed("-phi_11 / phi_1 decreasing in v"),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preferences::ModelFamily;

    fn returns() -> Lottery {
        Lottery::new([(0.5, 0.5), (2.0, 0.5)]).unwrap()
    }

    fn wealth_problem(alpha: f64, beta: f64) -> ProblemSpec {
        ProblemSpec::PortfolioWealth {
            r: 1.0,
            returns: returns(),
            model: PreferenceModel::quadratic(alpha, beta).unwrap(),
            x_max: None,
        }
    }

    fn grids() -> PropGrids {
        PropGrids {
            n_x: 4,
            n_states: 24,
            ..PropGrids::new(vec![1.0, 1.5, 2.0, 2.5, 3.0])
        }
    }

    #[test]
    fn ids_round_trip() {
        for p in PropId::ALL {
            assert_eq!(p.as_str().parse::<PropId>().unwrap(), p);
            let json = serde_json::to_string(&p).unwrap();
            assert_eq!(json, format!("\"{}\"", p.as_str()));
        }
        assert!("P9".parse::<PropId>().is_err());
    }

    #[test]
    fn p1_quadratic_follows_d_dara() {
        let tol = Tolerance::default();
        let ok = check_proposition(&wealth_problem(1.0, 0.5), PropId::P1, &grids(), &tol).unwrap();
        assert!(ok.holds(), "{:#?}", ok.failing_leaves());
        assert_eq!(ok.conclusion.as_deref(), Some("U1 SC1 in theta"));
        let bad =
            check_proposition(&wealth_problem(0.42, 0.57), PropId::P1, &grids(), &tol).unwrap();
        assert!(!bad.holds());
        let leaves = bad.failing_leaves();
        assert!(
            leaves.iter().all(|l| l.name.contains("log-spm")),
            "{leaves:#?}"
        );
        assert!(bad.witness.as_ref().unwrap().violates(&tol));
    }

    #[test]
    fn h_sc2_holds_for_portfolios() {
        let tol = Tolerance::default();
        let r = check_proposition(&wealth_problem(1.0, 0.5), PropId::P1, &grids(), &tol).unwrap();
        let h = r
            .components
            .iter()
            .find(|c| c.name.starts_with("H SC2"))
            .unwrap();
        assert!(h.holds());
    }

    #[test]
    fn spreads_fail_density_and_dominance_conditions() {
        let tol = Tolerance::default();
        let p = wealth_problem(1.0, 0.5);
        for prop in [PropId::P2a, PropId::P2b, PropId::P4] {
            let rep = check_proposition(&p, prop, &grids(), &tol).unwrap();
            assert!(!rep.holds(), "{prop}");
        }
    }

    #[test]
    fn rdu_risk_aversion_family_satisfies_p1() {
        let family: ModelFamily = serde_json::from_value(serde_json::json!({
            "template": {"kind": "rdu", "omega": "power:{theta}", "u": "crra:{inv_theta}:0.1"}
        }))
        .unwrap();
        let spec = ProblemSpec::PortfolioRiskAversion {
            w: 1.0,
            r: 1.0,
            returns: returns(),
            family,
            x_max: None,
        };
        let g = PropGrids {
            n_x: 4,
            n_states: 24,
            ..PropGrids::new(vec![1.0, 1.25, 1.5, 1.75, 2.0])
        };
        let rep = check_proposition(&spec, PropId::P1, &g, &Tolerance::default()).unwrap();
        assert!(rep.holds(), "{:#?}", rep.failing_leaves());
    }

    #[test]
    fn wrong_problem_is_a_missing_ingredient() {
        let r = check_proposition(
            &wealth_problem(1.0, 0.5),
            PropId::A1,
            &grids(),
            &Tolerance::default(),
        );
        assert!(matches!(r, Err(Error::MissingIngredient { .. })));
        let r = check_proposition(
            &wealth_problem(1.0, 0.5),
            PropId::B4,
            &grids(),
            &Tolerance::default(),
        );
        assert!(matches!(r, Err(Error::MissingIngredient { .. })));
    }

    #[test]
    fn nonpositive_actions_are_dropped() {
        let mut g = grids();
        g.x_grid = Some(vec![0.0, 0.5, 1.0]);
        let r = check_proposition(
            &wealth_problem(1.0, 0.5),
            PropId::P1,
            &g,
            &Tolerance::default(),
        )
        .unwrap();
        assert!(r.holds());
        g.x_grid = Some(vec![0.0, 0.5]);
        assert!(check_proposition(
            &wealth_problem(1.0, 0.5),
            PropId::P1,
            &g,
            &Tolerance::default()
        )
        .is_err());
    }

    #[test]
    fn hull_grid_skips_atoms() {
        let g = hull_grid(-1.0, 1.0, 4, &[-1.0, 0.0]);
        assert_eq!(g, vec![-0.5, 0.5]);
    }
}
