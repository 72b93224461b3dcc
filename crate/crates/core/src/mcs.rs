//! Maximizer sets, the strong set order and monotonicity checks along
//! parameter grids.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conditions::{check_axis, Check, ConditionReport, GridFn, Tolerance, Witness};
use crate::error::{Error, Result};
use crate::problems::ProblemSpec;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ArgmaxConfig {
    /// Number of coarse intervals; the scan evaluates `coarse_n + 1` points.
    pub coarse_n: usize,
    pub refine_tol: f64,
    /// Relative tie tolerance, scaled by `max(1, |max value|)`.
    pub value_tol: f64,
    /// At most this many coarse local maxima are refined.
    pub max_refine: usize,
}

impl Default for ArgmaxConfig {
    fn default() -> Self {
        Self {
            coarse_n: 512,
            refine_tol: 1e-8,
            value_tol: 1e-9,
            max_refine: 64,
        }
    }
}

/// Maximizers of a scalar function on an interval.
///
/// With `interval` set, `points` holds the two ends of a plateau of
/// maximizers. Otherwise the maximizers are the listed points; the ends of
/// any plateau that coexists with isolated maximizers are listed as points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArgmaxSet {
    pub points: Vec<f64>,
    pub value: f64,
    pub interval: bool,
}

impl ArgmaxSet {
    pub fn lo(&self) -> f64 {
        self.points[0]
    }

    pub fn hi(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// The smallest maximizer.
    pub fn representative(&self) -> f64 {
        self.lo()
    }

    /// Whether `x` belongs to the set up to `x_tol`.
    pub fn contains(&self, x: f64, x_tol: f64) -> bool {
        if self.interval {
            x >= self.lo() - x_tol && x <= self.hi() + x_tol
        } else {
            self.points.iter().any(|&p| (p - x).abs() <= x_tol)
        }
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

fn eval<F: Fn(f64) -> Result<f64>>(f: &F, x: f64) -> Result<f64> {
    let v = f(x)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(format!("objective is {v} at x = {x}")))
    }
}

fn golden<F: Fn(f64) -> Result<f64>>(
    f: &F,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (eval(f, c)?, eval(f, d)?);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(f, c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(f, d)?;
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

/// Last point of `[inside, outside]` (in either orientation) where
/// `f >= floor`, located by bisection.
fn plateau_edge<F: Fn(f64) -> Result<f64>>(
    f: &F,
    mut inside: f64,
    mut outside: f64,
    floor: f64,
    tol: f64,
) -> Result<f64> {
    while (outside - inside).abs() > tol {
        let mid = 0.5 * (inside + outside);
        if eval(f, mid)? >= floor {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    Ok(inside)
}

/// Coarse scan, golden-section refinement of the best local maxima, and
/// plateau detection.
pub fn argmax_set<F>(f: F, domain: (f64, f64), cfg: &ArgmaxConfig) -> Result<ArgmaxSet>
where
    F: Fn(f64) -> Result<f64>,
{
    let (lo, hi) = domain;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidDomain {
            lower: lo,
            upper: hi,
        });
    }
    if cfg.coarse_n < 2 || !(cfg.refine_tol > 0.0) || !(cfg.value_tol >= 0.0) {
        return Err(Error::InvalidGrid(
            "argmax configuration needs coarse_n >= 2 and positive tolerances".into(),
        ));
    }
    let n = cfg.coarse_n;
    let xs: Vec<f64> = (0..=n)
        .map(|i| {
            if i == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / n as f64
            }
        })
        .collect();
    let vs = xs
        .iter()
        .map(|&x| eval(&f, x))
        .collect::<Result<Vec<_>>>()?;

    let mut peaks: Vec<usize> = (0..=n)
        .filter(|&i| (i == 0 || vs[i] >= vs[i - 1]) && (i == n || vs[i] >= vs[i + 1]))
        .collect();
    peaks.sort_by(|&a, &b| vs[b].total_cmp(&vs[a]).then(a.cmp(&b)));
    peaks.truncate(cfg.max_refine.max(1));

    let mut candidates = Vec::with_capacity(peaks.len());
    for &i in &peaks {
        let a = xs[i.saturating_sub(1)];
        let b = xs[(i + 1).min(n)];
        let (gx, gv) = golden(&f, a, b, cfg.refine_tol)?;
        candidates.push(if gv > vs[i] { (gx, gv) } else { (xs[i], vs[i]) });
    }
    let best = candidates
        .iter()
        .map(|c| c.1)
        .chain(vs.iter().copied())
        .fold(f64::NEG_INFINITY, f64::max);
    let floor = best - cfg.value_tol * best.abs().max(1.0);

    let mut plateaus: Vec<(f64, f64)> = Vec::new();
    let mut i = 0;
    while i <= n {
        if vs[i] < floor {
            i += 1;
            continue;
        }
        let start = i;
        while i < n && vs[i + 1] >= floor {
            i += 1;
        }
        if i > start {
            let left = if start == 0 {
                lo
            } else {
                plateau_edge(&f, xs[start], xs[start - 1], floor, cfg.refine_tol)?
            };
            let right = if i == n {
                hi
            } else {
                plateau_edge(&f, xs[i], xs[i + 1], floor, cfg.refine_tol)?
            };
            plateaus.push((left, right));
        }
        i += 1;
    }

    let merge = 10.0 * cfg.refine_tol;
    let mut isolated: Vec<(f64, f64)> = candidates
        .into_iter()
        .filter(|&(x, v)| {
            v >= floor
                && !plateaus
                    .iter()
                    .any(|&(a, b)| x >= a - merge && x <= b + merge)
        })
        .collect();
    isolated.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut points: Vec<(f64, f64)> = Vec::new();
    for (x, v) in isolated {
        match points.last_mut() {
            Some(last) if x - last.0 <= merge => {
                if v > last.1 {
                    *last = (x, v);
                }
            }
            _ => points.push((x, v)),
        }
    }

    if points.is_empty() && plateaus.len() == 1 {
        let (a, b) = plateaus[0];
        return Ok(ArgmaxSet {
            points: if b > a { vec![a, b] } else { vec![a] },
            value: best,
            interval: b > a,
        });
    }
    let mut all: Vec<f64> = points
        .iter()
        .map(|p| p.0)
        .chain(plateaus.iter().flat_map(|&(a, b)| [a, b]))
        .collect();
    all.sort_by(f64::total_cmp);
    all.dedup();
    Ok(ArgmaxSet {
        points: all,
        value: best,
        interval: false,
    })
}

/// `A <= B` in the strong set order, up to `x_tol`.
pub fn strong_set_leq(a: &ArgmaxSet, b: &ArgmaxSet, x_tol: f64) -> bool {
    strong_set_witness(a, b, x_tol).is_none()
}

fn strong_set_witness(a: &ArgmaxSet, b: &ArgmaxSet, x_tol: f64) -> Option<(f64, f64)> {
    for &xa in &a.points {
        for &xb in &b.points {
            if xa >= xb + x_tol && !(a.contains(xb, x_tol) && b.contains(xa, x_tol)) {
                return Some((xa, xb));
            }
        }
    }
    None
}

/// Samples `f` at `n` evenly spaced points and checks that the sequence
/// rises then falls, plateaus allowed.
pub fn is_quasiconcave<F>(
    f: F,
    domain: (f64, f64),
    n: usize,
    tol: &Tolerance,
) -> Result<ConditionReport>
where
    F: Fn(f64) -> Result<f64>,
{
    let (lo, hi) = domain;
    if n < 3 || !(lo < hi) {
        return Err(Error::InvalidGrid(format!(
            "quasiconcavity scan needs n >= 3 on a proper interval, got n = {n} on [{lo}, {hi}]"
        )));
    }
    let xs: Vec<f64> = (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect();
    let g = GridFn::try_from_fn(vec![xs], |p| eval(&f, p[0]))?;
    let v = g.values();
    let mut suffix = vec![n - 1; n];
    for j in (0..n - 1).rev() {
        suffix[j] = if v[j] > v[suffix[j + 1]] {
            j
        } else {
            suffix[j + 1]
        };
    }
    let mut margin: Option<f64> = None;
    let mut witness = None;
    let mut prefix = 0;
    for j in 1..n - 1 {
        if v[j - 1] > v[prefix] {
            prefix = j - 1;
        }
        let k = suffix[j + 1];
        let (left, right) = (v[prefix], v[k]);
        let slack = (v[j] - left).max(v[j] - right);
        margin = Some(margin.map_or(slack, |m: f64| m.min(slack)));
        if witness.is_none()
            && v[j] < left - tol.slack(left.abs())
            && right > v[j] + tol.slack(v[j].abs())
        {
            witness = Some(Witness::on(
                Check::Quasiconcave,
                &g,
                vec![vec![prefix], vec![j], vec![k]],
            ));
        }
    }
    Ok(ConditionReport::new(
        "quasiconcave",
        vec![n],
        margin,
        witness,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct McsConfig {
    pub argmax: ArgmaxConfig,
    pub x_tol: f64,
    /// Compare every pair of grid parameters, not only neighbours.
    pub exhaustive: bool,
}

impl Default for McsConfig {
    fn default() -> Self {
        Self {
            argmax: ArgmaxConfig::default(),
            x_tol: 1e-6,
            exhaustive: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum McsVerdict {
    Monotone,
    Violated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McsEntry {
    pub theta: f64,
    pub argmax: ArgmaxSet,
}

/// A failing comparison: `x` is optimal at `theta`, `x_hat < x` at
/// `theta_hat > theta`, and the swap required by the strong set order fails.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McsViolation {
    pub theta: f64,
    pub theta_hat: f64,
    pub x: f64,
    pub x_hat: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McsPath {
    pub entries: Vec<McsEntry>,
    pub verdict: McsVerdict,
    pub violation: Option<McsViolation>,
    pub x_tol: f64,
}

impl McsPath {
    /// Orders the comparisons and records the first failure.
    pub fn from_entries(entries: Vec<McsEntry>, x_tol: f64, exhaustive: bool) -> Self {
        let n = entries.len();
        let pairs: Vec<(usize, usize)> = if exhaustive {
            (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .collect()
        } else {
            (1..n).map(|j| (j - 1, j)).collect()
        };
        let violation = pairs.into_iter().find_map(|(i, j)| {
            strong_set_witness(&entries[i].argmax, &entries[j].argmax, x_tol).map(|(x, x_hat)| {
                McsViolation {
                    theta: entries[i].theta,
                    theta_hat: entries[j].theta,
                    x,
                    x_hat,
                }
            })
        });
        Self {
            verdict: if violation.is_some() {
                McsVerdict::Violated
            } else {
                McsVerdict::Monotone
            },
            entries,
            violation,
            x_tol,
        }
    }

    pub fn is_monotone(&self) -> bool {
        self.verdict == McsVerdict::Monotone
    }

    pub fn argmax_at(&self, theta: f64) -> Option<&ArgmaxSet> {
        self.entries
            .iter()
            .find(|e| e.theta == theta)
            .map(|e| &e.argmax)
    }

    /// `theta,x_lo,x_hi,value` rows with `digits` significant digits.
    pub fn to_csv(&self, digits: usize) -> String {
        let mut out = String::from("theta,x_lo,x_hi,value\n");
        for e in &self.entries {
            let row = [e.theta, e.argmax.lo(), e.argmax.hi(), e.argmax.value]
                .map(|v| format_sig(v, digits));
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Formats `v` with `digits` significant digits, in positional notation
/// when the exponent is moderate.
pub fn format_sig(v: f64, digits: usize) -> String {
    let digits = digits.clamp(1, 17);
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { v.to_string() };
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..16).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.*e}", digits - 1)
    }
}

/// Solves the problem at every grid parameter and compares consecutive
/// maximizer sets (every pair when `cfg.exhaustive`).
pub fn verify_mcs(spec: &ProblemSpec, theta_grid: &[f64], cfg: &McsConfig) -> Result<McsPath> {
    if theta_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    check_axis(theta_grid)?;
    let entries = theta_grid
        .par_iter()
        .map(|&theta| {
            let inst = spec.at(theta)?;
            let domain = inst.action_domain()?;
            let argmax = argmax_set(|x| inst.objective(x), domain, &cfg.argmax)?;
            Ok(McsEntry { theta, argmax })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(McsPath::from_entries(entries, cfg.x_tol, cfg.exhaustive))
}

/// A parameter draw whose maximizer path is not monotone.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FoundInstance {
    /// Position of the draw in the quasi-random sequence.
    pub index: usize,
    pub params: Vec<f64>,
    pub problem: ProblemSpec,
    pub path: McsPath,
}

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as f64;
    let (mut inv, mut f) = (0.0, 1.0 / b);
    while i > 0 {
        inv += f * (i % base as u64) as f64;
        i /= base as u64;
        f /= b;
    }
    inv
}

/// Point `index` of a Halton sequence in the box, shifted modulo one by a
/// random offset drawn from `seed`.
pub fn halton_point(index: usize, bounds: &[(f64, f64)], offsets: &[f64]) -> Vec<f64> {
    bounds
        .iter()
        .zip(offsets)
        .zip(PRIMES)
        .map(|((&(lo, hi), &u), p)| {
            let h = (radical_inverse(index as u64 + 1, p) + u).fract();
            lo + (hi - lo) * h
        })
        .collect()
}

/// Scans `budget` quasi-random parameter draws and returns the first (in
/// sequence order) whose problem violates monotonicity on one of the
/// parameter pairs. Draws for which `family` fails or the problem does not
/// validate are skipped.
pub fn search_counterexample<F>(
    family: F,
    param_box: &[(f64, f64)],
    theta_pairs: &[(f64, f64)],
    budget: usize,
    seed: u64,
    cfg: &McsConfig,
) -> Result<Option<FoundInstance>>
where
    F: Fn(&[f64]) -> Result<ProblemSpec> + Sync,
{
    if budget == 0 {
        return Err(Error::Search("budget must be at least 1".into()));
    }
    if param_box.is_empty() || param_box.len() > PRIMES.len() {
        return Err(Error::Search(format!(
            "parameter box must have 1 to {} dimensions",
            PRIMES.len()
        )));
    }
    if let Some(&(lo, hi)) = param_box
        .iter()
        .find(|&&(lo, hi)| !(lo <= hi) || !lo.is_finite() || !hi.is_finite())
    {
        return Err(Error::Search(format!(
            "invalid parameter range [{lo}, {hi}]"
        )));
    }
    if theta_pairs.is_empty() || theta_pairs.iter().any(|&(a, b)| !(a < b)) {
        return Err(Error::Search(
            "parameter pairs must be nonempty with theta < theta_hat".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offsets: Vec<f64> = param_box.iter().map(|_| rng.gen::<f64>()).collect();
    Ok((0..budget).into_par_iter().find_map_first(|index| {
        let params = halton_point(index, param_box, &offsets);
        let problem = family(&params).ok()?;
        problem.validate().ok()?;
        theta_pairs.iter().find_map(|&(a, b)| {
            let path = verify_mcs(&problem, &[a, b], cfg).ok()?;
            (!path.is_monotone()).then(|| FoundInstance {
                index,
                params: params.clone(),
                problem: problem.clone(),
                path,
            })
        })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ok<F: Fn(f64) -> f64>(f: F) -> impl Fn(f64) -> Result<f64> {
        move |x| Ok(f(x))
    }

    fn set(points: &[f64]) -> ArgmaxSet {
        ArgmaxSet {
            points: points.to_vec(),
            value: 0.0,
            interval: false,
        }
    }

    #[test]
    fn argmax_examples() {
        let cfg = ArgmaxConfig::default();
        let a = argmax_set(ok(|x| -(x - 0.3) * (x - 0.3)), (0.0, 1.0), &cfg).unwrap();
        assert_eq!(a.points.len(), 1);
        assert!((a.lo() - 0.3).abs() < 1e-6);
        let c = argmax_set(ok(|_| 2.0), (0.0, 1.0), &cfg).unwrap();
        assert!(c.interval);
        assert_eq!(c.points, vec![0.0, 1.0]);
        let b = argmax_set(ok(|x| x), (0.0, 1.0), &cfg).unwrap();
        assert_eq!(b.points, vec![1.0]);
        assert!(!b.interval);
    }

    #[test]
    fn argmax_two_peaks_and_plateau() {
        let cfg = ArgmaxConfig::default();
        let two = argmax_set(ok(|x: f64| (x - 0.5).powi(2)), (0.0, 1.0), &cfg).unwrap();
        assert_eq!(two.points, vec![0.0, 1.0]);
        assert!(!two.interval);
        let flat = argmax_set(
            ok(|x: f64| -(x - 0.6).max(0.0) - (0.2 - x).max(0.0)),
            (0.0, 1.0),
            &cfg,
        )
        .unwrap();
        assert!(flat.interval);
        assert!(
            (flat.lo() - 0.2).abs() < 1e-6 && (flat.hi() - 0.6).abs() < 1e-6,
            "{flat:?}"
        );
    }

    #[test]
    fn argmax_rejects_non_finite() {
        let r = argmax_set(
            ok(|x| if x > 0.5 { f64::NAN } else { x }),
            (0.0, 1.0),
            &ArgmaxConfig::default(),
        );
        assert!(matches!(r, Err(Error::NonFinite(_))));
    }

    #[test]
    fn strong_set_examples() {
        assert!(strong_set_leq(&set(&[1.0]), &set(&[2.0]), 1e-6));
        assert!(!strong_set_leq(&set(&[1.0, 3.0]), &set(&[2.0]), 1e-6));
        assert!(strong_set_leq(&set(&[1.0, 2.0]), &set(&[1.0, 2.0]), 1e-6));
        assert!(!strong_set_leq(&set(&[2.0]), &set(&[1.0]), 1e-6));
        let i = |a: f64, b: f64| ArgmaxSet {
            points: vec![a, b],
            value: 0.0,
            interval: true,
        };
        assert!(strong_set_leq(&i(0.0, 1.0), &i(0.5, 2.0), 1e-6));
        assert!(!strong_set_leq(&i(0.0, 3.0), &i(0.5, 2.0), 1e-6));
        assert!(!strong_set_leq(&i(0.6, 1.0), &i(0.5, 2.0), 1e-6));
    }

    #[test]
    fn quasiconcavity_examples() {
        let tol = Tolerance::default();
        assert!(
            is_quasiconcave(ok(|x| -(x - 0.5) * (x - 0.5)), (0.0, 1.0), 1024, &tol)
                .unwrap()
                .holds()
        );
        let r = is_quasiconcave(ok(|x: f64| (6.0 * x).sin()), (0.0, 3.0), 1024, &tol).unwrap();
        assert!(!r.holds());
        let w = r.witness.unwrap();
        assert!(w.violates(&tol));
        assert!(is_quasiconcave(ok(|x| x), (0.0, 1.0), 1024, &tol)
            .unwrap()
            .holds());
        assert!(
            is_quasiconcave(ok(|x: f64| -x.exp()), (0.0, 1.0), 1024, &tol)
                .unwrap()
                .holds()
        );
    }

    #[test]
    fn csv_and_formatting() {
        assert_eq!(format_sig(0.944, 17), "0.94399999999999995");
        assert_eq!(format_sig(1.86, 3), "1.86");
        assert_eq!(format_sig(0.0, 17), "0");
        assert_eq!(format_sig(1.5e-9, 3), "1.50e-9");
        let path = McsPath::from_entries(
            vec![
                McsEntry {
                    theta: 1.0,
                    argmax: set(&[0.5]),
                },
                McsEntry {
                    theta: 2.0,
                    argmax: set(&[0.4]),
                },
            ],
            1e-6,
            false,
        );
        assert_eq!(path.verdict, McsVerdict::Violated);
        assert_eq!(path.violation.unwrap().x, 0.5);
        assert_eq!(
            path.to_csv(3),
            "theta,x_lo,x_hi,value\n1.00,0.500,0.500,0\n2.00,0.400,0.400,0\n"
        );
    }

    #[test]
    fn exhaustive_pairs_catch_non_adjacent_failures() {
        let a = ArgmaxSet {
            points: vec![0.0, 1.0],
            value: 0.0,
            interval: false,
        };
        let b = ArgmaxSet {
            points: vec![0.0, 1.0],
            value: 0.0,
            interval: false,
        };
        let entries = vec![
            McsEntry {
                theta: 0.0,
                argmax: set(&[0.7]),
            },
            McsEntry {
                theta: 1.0,
                argmax: a,
            },
            McsEntry {
                theta: 2.0,
                argmax: b,
            },
        ];
        let adj = McsPath::from_entries(entries.clone(), 1e-6, false);
        let all = McsPath::from_entries(entries, 1e-6, true);
        assert!(!adj.is_monotone());
        assert!(!all.is_monotone());
        let chain = vec![
            McsEntry {
                theta: 0.0,
                argmax: set(&[0.5]),
            },
            McsEntry {
                theta: 1.0,
                argmax: set(&[0.4, 0.9]),
            },
            McsEntry {
                theta: 2.0,
                argmax: set(&[0.45]),
            },
        ];
        assert!(!McsPath::from_entries(chain.clone(), 1e-6, true).is_monotone());
    }

    #[test]
    fn halton_points_stay_in_box() {
        let b = [(0.1, 2.0), (-1.0, 1.0)];
        for i in 0..200 {
            let p = halton_point(i, &b, &[0.3, 0.9]);
            assert!(p[0] >= 0.1 && p[0] < 2.0 && p[1] >= -1.0 && p[1] < 1.0);
        }
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(3, 2), 0.75);
    }

    #[test]
    fn zero_budget_is_an_error() {
        let r = search_counterexample(
            |_| Err(Error::EmptyGrid),
            &[(0.0, 1.0)],
            &[(1.0, 2.0)],
            0,
            1,
            &McsConfig::default(),
        );
        assert!(matches!(r, Err(Error::Search(_))));
    }
}
