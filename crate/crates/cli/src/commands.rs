use anyhow::{bail, Context, Result};
use mcslab::mcs::{format_sig, search_counterexample, FoundInstance, McsEntry};
use mcslab::oracle::oracle_compare;
use mcslab::presets::{self, Preset};
use mcslab::problems::{precautionary_motive, PrecautionaryOutcome, PrecautionaryVariant};
use mcslab::{
    check_proposition, verify_mcs, ConditionReport, Lottery, McsConfig, McsPath, OracleConfig,
    PreferenceModel, ProblemSpec, PropGrids, PropId, Tolerance,
};
use serde::Serialize;

use crate::config::{Format, RunConfig, SearchFamily, SearchRun};
use crate::Report;

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn csv_rows(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn opt_num(v: Option<f64>, digits: usize) -> String {
    v.map(|v| format_sig(v, digits)).unwrap_or_default()
}

pub fn check(cfg: &RunConfig, prop: Option<PropId>, format: Format) -> Result<Report> {
    let preset = cfg.preset()?;
    let (problem, theta_grid) = cfg.problem_and_grid()?;
    let prop = prop
        .or(cfg.prop)
        .or(preset.as_ref().and_then(|p| p.prop))
        .context("schema error: `check` needs a proposition (--prop or `prop`)")?;
    let mut grids = cfg
        .grids
        .clone()
        .unwrap_or_else(|| PropGrids::new(theta_grid.clone()));
    if grids.theta_grid.is_empty() || cfg.theta_grid.is_some() {
        grids.theta_grid = theta_grid;
    }
    let tol = cfg.tol.unwrap_or_default();
    let report = check_proposition(&problem, prop, &grids, &tol)?;
    let text = match format {
        Format::Json => json(&report)?,
        Format::Csv => report_csv(&report)?,
    };
    Ok(Report {
        text,
        violated: !report.holds(),
    })
}

fn report_csv(report: &ConditionReport) -> Result<String> {
    fn walk(r: &ConditionReport, depth: usize, rows: &mut Vec<Vec<String>>) {
        rows.push(vec![
            depth.to_string(),
            r.name.clone(),
            serde_json::to_value(r.verdict)
                .ok()
                .and_then(|v| v.as_str().map(String::from))
                .unwrap_or_default(),
            opt_num(r.margin, 17),
            r.note.clone().unwrap_or_default(),
        ]);
        for c in &r.components {
            walk(c, depth + 1, rows);
        }
    }
    let mut rows = Vec::new();
    walk(report, 0, &mut rows);
    csv_rows(&["depth", "name", "verdict", "margin", "note"], rows)
}

fn mcs_config(cfg: &RunConfig, exhaustive: bool, x_tol: Option<f64>) -> McsConfig {
    let mut mcs = cfg.mcs.unwrap_or_default();
    mcs.exhaustive |= exhaustive;
    if let Some(t) = x_tol {
        mcs.x_tol = t;
    }
    mcs
}

pub fn solve(cfg: &RunConfig, format: Format, digits: usize) -> Result<Report> {
    let (problem, grid) = cfg.problem_and_grid()?;
    let path = verify_mcs(&problem, &grid, &mcs_config(cfg, false, None))?;
    let text = match format {
        Format::Json => json::<Vec<McsEntry>>(&path.entries)?,
        Format::Csv => path.to_csv(digits),
    };
    Ok(Report {
        text,
        violated: false,
    })
}

pub fn verify(
    cfg: &RunConfig,
    exhaustive: bool,
    x_tol: Option<f64>,
    format: Format,
    digits: usize,
) -> Result<Report> {
    let (problem, grid) = cfg.problem_and_grid()?;
    let path = verify_mcs(&problem, &grid, &mcs_config(cfg, exhaustive, x_tol))?;
    Ok(Report {
        text: render_path(&path, format, digits)?,
        violated: !path.is_monotone(),
    })
}

fn render_path(path: &McsPath, format: Format, digits: usize) -> Result<String> {
    match format {
        Format::Json => json(path),
        Format::Csv => Ok(path.to_csv(digits)),
    }
}

#[derive(Serialize)]
struct OracleCase {
    label: String,
    model: String,
    max_error: f64,
}

#[derive(Serialize)]
struct OracleOutcome {
    max_error: f64,
    threshold: f64,
    pass: bool,
    config: OracleConfig,
    cases: Vec<OracleCase>,
}

/// Twenty points spanning the support of `f`.
fn default_z_grid(f: &Lottery) -> Vec<f64> {
    let (lo, hi) = (f.min(), f.max());
    if hi == lo {
        return vec![lo];
    }
    (0..20).map(|i| lo + (hi - lo) * i as f64 / 19.0).collect()
}

pub fn oracle_check(
    cfg: &RunConfig,
    max_error: Option<f64>,
    format: Format,
    digits: usize,
) -> Result<Report> {
    let run = cfg.oracle.clone().unwrap_or_default();
    let ocfg = run.config.clone().unwrap_or_default();
    let threshold = max_error.or(run.max_error).unwrap_or(1e-5);
    let mut cases: Vec<(String, PreferenceModel, Lottery)> = Vec::new();
    if let Some(model) = &cfg.model {
        if run.lotteries.is_empty() {
            bail!("schema error: `oracle.lotteries` is required with an explicit `model`");
        }
        for (i, f) in run.lotteries.iter().enumerate() {
            cases.push((format!("lottery {i}"), model.clone(), f.clone()));
        }
    } else {
        let (problem, grid) = cfg.problem_and_grid()?;
        for theta in grid {
            let inst = problem.at(theta)?;
            let model = inst
                .model()
                .with_context(|| {
                    format!(
                        "{} problems carry no preference functional to differentiate",
                        problem.kind()
                    )
                })?
                .clone();
            let (lo, hi) = inst.action_domain()?;
            let lotteries = if run.lotteries.is_empty() {
                vec![inst.outcome_lottery(0.5 * (lo + hi))?]
            } else {
                run.lotteries.clone()
            };
            for (i, f) in lotteries.into_iter().enumerate() {
                cases.push((format!("theta = {theta}, lottery {i}"), model.clone(), f));
            }
        }
    }
    let cases = cases
        .into_iter()
        .map(|(label, model, f)| {
            let z = run.z_grid.clone().unwrap_or_else(|| default_z_grid(&f));
            let err = oracle_compare(&model, &f, &z, &ocfg).with_context(|| label.clone())?;
            Ok(OracleCase {
                label,
                model: model.kind().to_string(),
                max_error: err,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max = cases.iter().map(|c| c.max_error).fold(0.0, f64::max);
    let outcome = OracleOutcome {
        max_error: max,
        threshold,
        pass: max <= threshold,
        config: ocfg,
        cases,
    };
    let text = match format {
        Format::Json => json(&outcome)?,
        Format::Csv => csv_rows(
            &["label", "model", "max_error"],
            outcome.cases.iter().map(|c| {
                vec![
                    c.label.clone(),
                    c.model.clone(),
                    format_sig(c.max_error, digits),
                ]
            }),
        )?,
    };
    Ok(Report {
        text,
        violated: !outcome.pass,
    })
}

pub struct SearchOpts {
    pub budget: Option<usize>,
    pub seed: Option<u64>,
    pub ranges: Vec<(f64, f64)>,
    pub pairs: Vec<(f64, f64)>,
}

#[derive(Serialize)]
struct SearchOutcome {
    budget: usize,
    seed: u64,
    found: Option<FoundInstance>,
}

pub fn search(cfg: &RunConfig, opts: SearchOpts, format: Format, digits: usize) -> Result<Report> {
    let base = cfg.search.clone();
    let family = base.as_ref().map(|s| s.family.clone()).unwrap_or_default();
    let param_box = match (&opts.ranges[..], &base, &family) {
        ([_, ..], _, _) => opts.ranges.clone(),
        ([], Some(s), _) => s.param_box.clone(),
        ([], None, SearchFamily::Quadratic) => vec![(0.1, 2.0), (0.1, 2.0)],
        ([], None, SearchFamily::Template(_)) => {
            bail!("schema error: a template family needs parameter ranges")
        }
    };
    let pairs = if !opts.pairs.is_empty() {
        opts.pairs.clone()
    } else if let Some(s) = &base {
        s.pairs.clone()
    } else {
        let grid = cfg
            .theta_grid
            .clone()
            .or(cfg.preset()?.map(|p| p.theta_grid))
            .context(
                "schema error: `search` needs parameter pairs (--pair, `search.pairs` or a grid)",
            )?;
        grid.windows(2).map(|w| (w[0], w[1])).collect()
    };
    let run = SearchRun {
        family,
        param_box,
        pairs,
        budget: opts
            .budget
            .or(base.as_ref().map(|s| s.budget))
            .unwrap_or(200),
        seed: opts.seed.or(base.as_ref().map(|s| s.seed)).unwrap_or(0),
    };
    let mcs = mcs_config(cfg, false, None);
    let found = search_counterexample(
        |p| run.family.build(p),
        &run.param_box,
        &run.pairs,
        run.budget,
        run.seed,
        &mcs,
    )?;
    let violated = found.is_some();
    let outcome = SearchOutcome {
        budget: run.budget,
        seed: run.seed,
        found,
    };
    let text = match format {
        Format::Json => json(&outcome)?,
        Format::Csv => {
            let rows = outcome.found.iter().map(|f| {
                let v = f
                    .path
                    .violation
                    .expect("a found instance carries its violation");
                let params = f
                    .params
                    .iter()
                    .map(|p| format_sig(*p, digits))
                    .collect::<Vec<_>>()
                    .join(";");
                let nums = [v.theta, v.theta_hat, v.x, v.x_hat].map(|x| format_sig(x, digits));
                [vec![f.index.to_string(), params], nums.to_vec()].concat()
            });
            csv_rows(
                &["index", "params", "theta", "theta_hat", "x", "x_hat"],
                rows,
            )?
        }
    };
    Ok(Report { text, violated })
}

#[derive(Serialize)]
struct Reproduction<'a> {
    preset: &'a str,
    description: &'a str,
    path: McsPath,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<ConditionReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    motive: Vec<Motive>,
}

#[derive(Serialize)]
struct Motive {
    theta: f64,
    #[serde(flatten)]
    outcome: PrecautionaryOutcome,
}

#[derive(Serialize)]
struct Listing<'a> {
    name: &'a str,
    description: &'a str,
    prop: Option<PropId>,
}

pub fn reproduce(name: &str, exhaustive: bool, format: Format, digits: usize) -> Result<Report> {
    if name == "list" {
        let all = presets::all();
        let text = match format {
            Format::Json => json(
                &all.iter()
                    .map(|p| Listing {
                        name: &p.name,
                        description: &p.description,
                        prop: p.prop,
                    })
                    .collect::<Vec<_>>(),
            )?,
            Format::Csv => csv_rows(
                &["name", "prop", "description"],
                all.iter().map(|p| {
                    vec![
                        p.name.clone(),
                        p.prop.map(|p| p.to_string()).unwrap_or_default(),
                        p.description.clone(),
                    ]
                }),
            )?,
        };
        return Ok(Report {
            text,
            violated: false,
        });
    }
    let Preset {
        name,
        description,
        problem,
        theta_grid,
        prop,
    } = presets::preset(name)?;
    let mcs = McsConfig {
        exhaustive,
        ..McsConfig::default()
    };
    let path = verify_mcs(&problem, &theta_grid, &mcs)?;
    let report = prop
        .map(|p| {
            check_proposition(
                &problem,
                p,
                &PropGrids::new(theta_grid.clone()),
                &Tolerance::default(),
            )
        })
        .transpose()?;
    let motive = match &problem {
        ProblemSpec::Precautionary {
            variant: PrecautionaryVariant::Saving,
            ..
        } => theta_grid
            .iter()
            .map(|&theta| {
                Ok(Motive {
                    theta,
                    outcome: precautionary_motive(&problem, theta)?,
                })
            })
            .collect::<Result<Vec<_>>>()?,
        _ => Vec::new(),
    };
    let violated = !path.is_monotone()
        || report.as_ref().is_some_and(|r| !r.holds())
        || motive.iter().any(|m| !m.outcome.positive);
    let text = match format {
        Format::Json => json(&Reproduction {
            preset: &name,
            description: &description,
            path,
            report,
            motive,
        })?,
        Format::Csv => path.to_csv(digits),
    };
    Ok(Report { text, violated })
}
