//! Grid checkers for order and shape hypotheses.
//!
//! Every checker returns a [`ConditionReport`]. A verdict of
//! [`Verdict::HoldsOnGrid`] certifies the property only at the sampled
//! points. A failing report carries a [`Witness`]: the grid indices and the
//! values that violate the defining inequality, enough to re-evaluate it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lottery::Lottery;
use crate::preferences::{ModelSpec, PreferenceModel};

/// Sign and rectangle tolerances.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Absolute slack for sign classifications and for every inequality.
    pub abs: f64,
    /// Relative slack for product/sum/ratio comparisons.
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-9,
            rel: 1e-7,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    /// Allowed slack when comparing quantities of magnitude `scale`.
    pub fn slack(&self, scale: f64) -> f64 {
        self.abs + self.rel * scale.abs()
    }

    fn sign(&self, v: f64) -> i8 {
        if v > self.abs {
            1
        } else if v < -self.abs {
            -1
        } else {
            0
        }
    }
}

/// A real function sampled on the product of 1 to 4 ascending axes.
/// Values are stored row-major with the last axis varying fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid")]
pub struct GridFn {
    axes: Vec<Vec<f64>>,
    values: Vec<f64>,
}

#[derive(Deserialize)]
struct RawGrid {
    axes: Vec<Vec<f64>>,
    values: Vec<f64>,
}

impl TryFrom<RawGrid> for GridFn {
    type Error = Error;

    fn try_from(r: RawGrid) -> Result<Self> {
        GridFn::new(r.axes, r.values)
    }
}

/// Checks that `axis` is nonempty, finite and strictly ascending.
pub fn check_axis(axis: &[f64]) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::InvalidGrid("empty axis".into()));
    }
    if axis.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidGrid("non-finite grid point".into()));
    }
    if axis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("axis is not strictly ascending".into()));
    }
    Ok(())
}

impl GridFn {
    pub fn new(axes: Vec<Vec<f64>>, values: Vec<f64>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 4 {
            return Err(Error::InvalidGrid(format!(
                "{} axes; 1 to 4 supported",
                axes.len()
            )));
        }
        for a in &axes {
            check_axis(a)?;
        }
        let n: usize = axes.iter().map(Vec::len).product();
        if values.len() != n {
            return Err(Error::InvalidGrid(format!(
                "{} values for a grid of {n} points",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "non-finite value at flat index {i}"
            )));
        }
        Ok(Self { axes, values })
    }

    /// Samples `f` at every grid point (coordinates in axis order).
    pub fn from_fn<F: Fn(&[f64]) -> f64>(axes: Vec<Vec<f64>>, f: F) -> Result<Self> {
        Self::try_from_fn(axes, |p| Ok(f(p)))
    }

    pub fn try_from_fn<F: Fn(&[f64]) -> Result<f64>>(axes: Vec<Vec<f64>>, f: F) -> Result<Self> {
        let shape: Vec<usize> = axes.iter().map(Vec::len).collect();
        let n: usize = shape.iter().product();
        let mut values = Vec::with_capacity(n);
        let mut point = vec![0.0; axes.len()];
        for flat in 0..n {
            let idx = unravel(&shape, flat);
            for (k, &i) in idx.iter().enumerate() {
                point[k] = axes[k][i];
            }
            values.push(f(&point)?);
        }
        Self::new(axes, values)
    }

    pub fn from_fn1<F: Fn(f64) -> f64>(axis: Vec<f64>, f: F) -> Result<Self> {
        Self::from_fn(vec![axis], |p| f(p[0]))
    }

    pub fn from_fn2<F: Fn(f64, f64) -> f64>(a: Vec<f64>, b: Vec<f64>, f: F) -> Result<Self> {
        Self::from_fn(vec![a, b], |p| f(p[0], p[1]))
    }

    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Vec::len).collect()
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.values[ravel(&self.shape(), idx)]
    }

    /// Coordinates of a grid index.
    pub fn point(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter()
            .enumerate()
            .map(|(k, &i)| self.axes[k][i])
            .collect()
    }

    /// Elementwise transform.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Result<Self> {
        Self::new(
            self.axes.clone(),
            self.values.iter().map(|&v| f(v)).collect(),
        )
    }

    /// The same function with axis `k` reversed (`x -> -x`).
    pub fn reverse_axis(&self, k: usize) -> Self {
        let shape = self.shape();
        let mut axes = self.axes.clone();
        axes[k] = self.axes[k].iter().rev().map(|v| -v).collect();
        let values = (0..self.values.len())
            .map(|flat| {
                let mut idx = unravel(&shape, flat);
                idx[k] = shape[k] - 1 - idx[k];
                self.values[ravel(&shape, &idx)]
            })
            .collect();
        Self { axes, values }
    }

    fn expect_dims(&self, dims: &[usize], what: &str) -> Result<()> {
        if dims.contains(&self.dims()) {
            Ok(())
        } else {
            Err(Error::InvalidGrid(format!(
                "{what} expects {dims:?}-D grids, got {}-D",
                self.dims()
            )))
        }
    }
}

fn unravel(shape: &[usize], mut flat: usize) -> Vec<usize> {
    let mut idx = vec![0; shape.len()];
    for k in (0..shape.len()).rev() {
        idx[k] = flat % shape[k];
        flat /= shape[k];
    }
    idx
}

fn ravel(shape: &[usize], idx: &[usize]) -> usize {
    idx.iter().zip(shape).fold(0, |acc, (&i, &n)| acc * n + i)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    HoldsOnGrid,
    Fails,
}

/// The inequality a witness violates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    /// `points = [i, j]`, a sign pattern `g[i] >= 0 > g[j]` or `g[i] > 0 >= g[j]`.
    Sc1,
    /// `points = [a0, a1, b0, b1]`; differences `g[a1] - g[a0]` and
    /// `g[b1] - g[b0]` break single crossing. Also used for interval
    /// dominance.
    Sc2,
    IntervalDominance,
    /// `points = [lo, hi, m1, m2]`, `g[lo] g[hi] < g[m1] g[m2]`.
    LogSpm,
    /// `points = [p]`, `g[p] < 0` where nonnegativity is required.
    Negative,
    /// `points = [p]`, `g[p] > 0` where nonpositivity is required.
    Positive,
    /// `points = [lo, hi, m1, m2]`, `g[lo] + g[hi] < g[m1] + g[m2]`.
    Supermodular,
    /// `points = [i, j]`; `values = [f_i, g_i, f_j, g_j]` (roles swapped
    /// when `flipped`).
    SignedRatio,
    /// `points = [i, i+1, i+2]`, slopes decrease.
    Convex,
    /// `points = [i, j]`, `g[j] > g[i]` on a function required nonincreasing
    /// (or the mirror image for nondecreasing).
    Monotone,
    /// `points = [[lottery, t, y_i], [lottery, t, y_j]]`, risk aversion
    /// measure rises from `values[0]` to `values[1]`.
    DDara,
    /// `points = [i, j, k]`: `g` falls from `i` to `j` then rises at `k`.
    Quasiconcave,
    /// Pair of grid indices whose lotteries are not ordered as required.
    Fosd,
    /// Pair of grid indices whose means differ.
    EqualMeans,
    /// A declared model property; no numeric witness.
    Declared,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub check: Check,
    pub points: Vec<Vec<usize>>,
    pub coords: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub flipped: bool,
}

impl Witness {
    pub(crate) fn on(check: Check, g: &GridFn, points: Vec<Vec<usize>>) -> Self {
        Self {
            check,
            coords: points.iter().map(|p| g.point(p)).collect(),
            values: points.iter().map(|p| g.get(p)).collect(),
            points,
            flipped: false,
        }
    }

    /// Re-evaluates the violated inequality from the recorded values.
    pub fn violates(&self, tol: &Tolerance) -> bool {
        let v = &self.values;
        match self.check {
            Check::Sc1 => sc1_pair_violates(tol.sign(v[0]), tol.sign(v[1])),
            Check::Sc2 | Check::IntervalDominance => {
                sc1_pair_violates(tol.sign(v[1] - v[0]), tol.sign(v[3] - v[2]))
            }
            Check::LogSpm => {
                let (lhs, rhs) = (v[0] * v[1], v[2] * v[3]);
                lhs < rhs - tol.slack(lhs.abs().max(rhs.abs()))
            }
            Check::Supermodular => {
                let (lhs, rhs) = (v[0] + v[1], v[2] + v[3]);
                lhs < rhs - tol.slack(lhs.abs().max(rhs.abs()))
            }
            Check::Negative => v[0] < -tol.abs,
            Check::Positive => v[0] > tol.abs,
            Check::SignedRatio => {
                let (r0, r1) = (-v[1] / v[0], -v[3] / v[2]);
                v[1] < -tol.abs
                    && v[0] > tol.abs
                    && v[2] > tol.abs
                    && r0 < r1 - tol.slack(r0.max(r1))
            }
            Check::Convex => {
                let (x, y) = (&self.coords, v);
                let s0 = (y[1] - y[0]) / (x[1][0] - x[0][0]);
                let s1 = (y[2] - y[1]) / (x[2][0] - x[1][0]);
                s1 < s0 - tol.slack(s0.abs().max(s1.abs()))
            }
            Check::Monotone | Check::DDara => {
                let (a, b) = if self.flipped {
                    (v[1], v[0])
                } else {
                    (v[0], v[1])
                };
                b > a + tol.slack(a.abs().max(b.abs()))
            }
            Check::Quasiconcave => {
                v[1] < v[0] - tol.slack(v[0].abs()) && v[2] > v[1] + tol.slack(v[1].abs())
            }
            Check::Fosd | Check::EqualMeans => v.len() >= 2 && (v[0] - v[1]).abs() > 0.0,
            Check::Declared => true,
        }
    }

    /// Re-reads the values from `g` at the recorded indices and re-evaluates.
    pub fn reproduces(&self, g: &GridFn, tol: &Tolerance) -> bool {
        let fresh = Witness {
            values: self.points.iter().map(|p| g.get(p)).collect(),
            ..self.clone()
        };
        fresh.values == self.values && fresh.violates(tol)
    }
}

/// Verdict of a grid check, or of a proposition composed of several checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub name: String,
    pub verdict: Verdict,
    /// Smallest slack of the defining inequality over the grid, when defined.
    pub margin: Option<f64>,
    pub witness: Option<Witness>,
    /// Grid resolution per axis.
    pub grid: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conclusion: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<ConditionReport>,
}

impl ConditionReport {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::HoldsOnGrid
    }

    pub(crate) fn new(
        name: &str,
        grid: Vec<usize>,
        margin: Option<f64>,
        witness: Option<Witness>,
    ) -> Self {
        Self {
            name: name.to_string(),
            verdict: if witness.is_some() {
                Verdict::Fails
            } else {
                Verdict::HoldsOnGrid
            },
            margin,
            witness,
            grid,
            conclusion: None,
            note: None,
            components: Vec::new(),
        }
    }

    /// A report that holds iff every component holds; the witness of the
    /// first failing component is surfaced.
    pub fn all_of(name: &str, components: Vec<ConditionReport>) -> Self {
        let failing = components.iter().find(|c| !c.holds());
        let margin = components
            .iter()
            .filter_map(|c| c.margin)
            .fold(None, |acc: Option<f64>, m| {
                Some(acc.map_or(m, |a| a.min(m)))
            });
        Self {
            name: name.to_string(),
            verdict: if failing.is_some() {
                Verdict::Fails
            } else {
                Verdict::HoldsOnGrid
            },
            margin,
            witness: failing.and_then(|c| c.witness.clone()),
            grid: Vec::new(),
            conclusion: None,
            note: failing.map(|c| format!("first failing hypothesis: {}", c.name)),
            components,
        }
    }

    /// A report for a property that is declared rather than sampled.
    pub fn declared(name: &str, holds: bool, note: &str) -> Self {
        let mut r = Self::new(
            name,
            Vec::new(),
            None,
            (!holds).then(|| Witness {
                check: Check::Declared,
                points: Vec::new(),
                coords: Vec::new(),
                values: Vec::new(),
                flipped: false,
            }),
        );
        r.note = Some(note.to_string());
        r
    }

    pub fn renamed(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn with_conclusion(mut self, conclusion: &str) -> Self {
        self.conclusion = Some(conclusion.to_string());
        self
    }

    /// Depth-first list of failing leaf reports.
    pub fn failing_leaves(&self) -> Vec<&ConditionReport> {
        if self.components.is_empty() {
            if self.holds() {
                vec![]
            } else {
                vec![self]
            }
        } else {
            self.components
                .iter()
                .flat_map(|c| c.failing_leaves())
                .collect()
        }
    }
}

fn min_opt(acc: &mut Option<f64>, v: f64) {
    *acc = Some(acc.map_or(v, |a| a.min(v)));
}

fn sc1_pair_violates(ci: i8, cj: i8) -> bool {
    (ci >= 0 && cj < 0) || (ci > 0 && cj <= 0)
}

fn sc1_pair_violates_weak(ci: i8, cj: i8) -> bool {
    ci >= 0 && cj < 0
}

/// First offending `(i, j)` of a sign sequence, `j` chosen with the smallest
/// value among the violators of `i`.
fn sc1_scan(vals: &[f64], tol: &Tolerance, strict: bool) -> (Option<(usize, usize)>, Option<f64>) {
    let classes: Vec<i8> = vals.iter().map(|&v| tol.sign(v)).collect();
    let bad = if strict {
        sc1_pair_violates
    } else {
        sc1_pair_violates_weak
    };
    let mut margin = None;
    if let Some(first) = classes.iter().position(|&c| c >= 0) {
        for &v in &vals[first..] {
            min_opt(&mut margin, v);
        }
    }
    for i in 0..vals.len() {
        if classes[i] < 0 {
            continue;
        }
        let j = (i + 1..vals.len())
            .filter(|&j| bad(classes[i], classes[j]))
            .min_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        if let Some(j) = j {
            return (Some((i, j)), margin);
        }
    }
    (None, margin)
}

/// Single crossing from below: `g(s) >= (>) 0` implies `g(s') >= (>) 0` for
/// every `s' > s`.
pub fn is_sc1(g: &GridFn, tol: &Tolerance) -> Result<ConditionReport> {
    sc1_impl(g, tol, true)
}

/// Single crossing without the strict clause: only `g(s) >= 0` implies
/// `g(s') >= 0` is enforced.
pub fn is_sc1_weak(g: &GridFn, tol: &Tolerance) -> Result<ConditionReport> {
    sc1_impl(g, tol, false)
}

fn sc1_impl(g: &GridFn, tol: &Tolerance, strict: bool) -> Result<ConditionReport> {
    g.expect_dims(&[1], "is_sc1")?;
    let (hit, margin) = sc1_scan(g.values(), tol, strict);
    let witness = hit.map(|(i, j)| Witness::on(Check::Sc1, g, vec![vec![i], vec![j]]));
    Ok(ConditionReport::new("SC1", g.shape(), margin, witness))
}

/// SC2 in `(x; s)` for `g` over `(x, s)`: every difference
/// `g(x_hat, .) - g(x, .)` with `x_hat > x` is SC1.
pub fn is_sc2(g: &GridFn, tol: &Tolerance) -> Result<ConditionReport> {
    is_sc2_masked(g, tol, false, |_, _, _| true)
}

/// SC2 in `(-x; s)`: the differences `g(x, .) - g(x_hat, .)` are SC1.
pub fn is_sc2_neg_x(g: &GridFn, tol: &Tolerance) -> Result<ConditionReport> {
    is_sc2_masked(g, tol, true, |_, _, _| true)
}

/// SC2 restricted to the second-axis indices `k` with `admit(i, j, k)` for
/// the first-axis pair `i < j`. Used for properties that only need to hold
/// almost everywhere.
pub fn is_sc2_masked<A>(
    g: &GridFn,
    tol: &Tolerance,
    neg_x: bool,
    admit: A,
) -> Result<ConditionReport>
where
    A: Fn(usize, usize, usize) -> bool,
{
    g.expect_dims(&[2], "is_sc2")?;
    let witness = difference_scan(g, tol, Check::Sc2, neg_x, true, admit);
    let name = if neg_x { "SC2 in (-x; s)" } else { "SC2" };
    Ok(ConditionReport::new(name, g.shape(), None, witness))
}

/// Interval dominance order in `(x; theta)` for `g` over `(x, theta)`.
pub fn interval_dominance(g: &GridFn, tol: &Tolerance) -> Result<ConditionReport> {
    g.expect_dims(&[2], "interval_dominance")?;
    let top =
        |i: usize, j: usize, k: usize| (i..=j).all(|m| g.get(&[j, k]) >= g.get(&[m, k]) - tol.abs);
    let witness = difference_scan(g, tol, Check::IntervalDominance, false, false, top);
    Ok(ConditionReport::new(
        "interval dominance",
        g.shape(),
        None,
        witness,
    ))
}

/// For each pair `i < j` on axis 0, forms `d(k) = g[hi, k] - g[lo, k]` and
/// requires `d(k) >= (>) 0 => d(l) >= (>) 0` for admitted `k < l`.
fn difference_scan<A>(
    g: &GridFn,
    tol: &Tolerance,
    check: Check,
    neg_x: bool,
    mask_later: bool,
    admit: A,
) -> Option<Witness>
where
    A: Fn(usize, usize, usize) -> bool,
{
    let shape = g.shape();
    let (nx, ns) = (shape[0], shape[1]);
    for i in 0..nx {
        for j in i + 1..nx {
            let (lo, hi) = if neg_x { (j, i) } else { (i, j) };
            let d: Vec<f64> = (0..ns).map(|k| g.get(&[hi, k]) - g.get(&[lo, k])).collect();
            let ok: Vec<bool> = (0..ns).map(|k| admit(i, j, k)).collect();
            // worst[k]: index of the smallest difference among eligible l > k.
            let mut worst = vec![None; ns];
            let mut best: Option<usize> = None;
            for k in (0..ns).rev() {
                worst[k] = best;
                if (!mask_later || ok[k]) && best.is_none_or(|b| d[k] <= d[b]) {
                    best = Some(k);
                }
            }
            for k in (0..ns).filter(|&k| ok[k]) {
                let ck = tol.sign(d[k]);
                if ck < 0 {
                    continue;
                }
                if let Some(l) = worst[k] {
                    if sc1_pair_violates(ck, tol.sign(d[l])) {
                        let pts = vec![vec![lo, k], vec![hi, k], vec![lo, l], vec![hi, l]];
                        return Some(Witness::on(check, g, pts));
                    }
                }
            }
        }
    }
    None
}

fn first_below(g: &GridFn, bound: f64) -> Option<Witness> {
    let shape = g.shape();
    g.values()
        .iter()
        .position(|&v| v < bound)
        .map(|flat| Witness::on(Check::Negative, g, vec![unravel(&shape, flat)]))
}

/// `g >= 0` up to the absolute tolerance.
pub fn is_nonnegative(g: &GridFn, tol: &Tolerance) -> Result<ConditionReport> {
    let margin = g.values().iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ConditionReport::new(
        ">= 0",
        g.shape(),
        Some(margin),
        first_below(g, -tol.abs),
    ))
}

/// `g <= 0` up to the absolute tolerance.
pub fn is_nonpositive(g: &GridFn, tol: &Tolerance) -> Result<ConditionReport> {
    let shape = g.shape();
    let margin = -g.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let witness = g
        .values()
        .iter()
        .position(|&v| v > tol.abs)
        .map(|flat| Witness::on(Check::Positive, g, vec![unravel(&shape, flat)]));
    Ok(ConditionReport::new(
        "<= 0",
        g.shape(),
        Some(margin),
        witness,
    ))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Combine {
    Product,
    Sum,
}

/// Scans the rectangles of every coordinate pair in every slice of the
/// remaining axes. Rectangles are adjacent cells unless `all_pairs`.
fn rectangle_scan(
    g: &GridFn,
    tol: &Tolerance,
    op: Combine,
    all_pairs: bool,
) -> (Option<f64>, Option<Witness>) {
    let shape = g.shape();
    let n = g.dims();
    let check = if op == Combine::Product {
        Check::LogSpm
    } else {
        Check::Supermodular
    };
    let mut margin = None;
    for a in 0..n {
        for b in a + 1..n {
            for flat in 0..g.values.len() {
                let base = unravel(&shape, flat);
                if base[a] != 0 || base[b] != 0 {
                    continue;
                }
                for i in 0..shape[a] {
                    let i_hi: Vec<usize> = if all_pairs {
                        (i + 1..shape[a]).collect()
                    } else {
                        (i + 1..(i + 2).min(shape[a])).collect()
                    };
                    for &i2 in &i_hi {
                        for j in 0..shape[b] {
                            let j_hi = if all_pairs {
                                j + 1..shape[b]
                            } else {
                                j + 1..(j + 2).min(shape[b])
                            };
                            for j2 in j_hi {
                                let at = |x: usize, y: usize| {
                                    let mut p = base.clone();
                                    p[a] = x;
                                    p[b] = y;
                                    p
                                };
                                let pts = [at(i, j), at(i2, j2), at(i2, j), at(i, j2)];
                                if let Some(w) = rectangle(g, tol, op, check, &pts, &mut margin) {
                                    return (margin, Some(w));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    (margin, None)
}

fn rectangle(
    g: &GridFn,
    tol: &Tolerance,
    op: Combine,
    check: Check,
    pts: &[Vec<usize>; 4],
    margin: &mut Option<f64>,
) -> Option<Witness> {
    let v: Vec<f64> = pts.iter().map(|p| g.get(p)).collect();
    let (lhs, rhs) = match op {
        Combine::Product => (v[0] * v[1], v[2] * v[3]),
        Combine::Sum => (v[0] + v[1], v[2] + v[3]),
    };
    min_opt(margin, lhs - rhs);
    (lhs < rhs - tol.slack(lhs.abs().max(rhs.abs()))).then(|| Witness::on(check, g, pts.to_vec()))
}

/// Every pair of lattice points `p, q`: `g(p v q) g(p ^ q) >= g(p) g(q)`.
fn lattice_scan(g: &GridFn, tol: &Tolerance) -> (Option<f64>, Option<Witness>) {
    let shape = g.shape();
    let n = g.values.len();
    let mut margin = None;
    for p in 0..n {
        let ip = unravel(&shape, p);
        for q in p + 1..n {
            let iq = unravel(&shape, q);
            let le = ip.iter().zip(&iq).all(|(a, b)| a <= b);
            let ge = ip.iter().zip(&iq).all(|(a, b)| a >= b);
            if le || ge {
                continue;
            }
            let join: Vec<usize> = ip.iter().zip(&iq).map(|(a, b)| *a.max(b)).collect();
            let meet: Vec<usize> = ip.iter().zip(&iq).map(|(a, b)| *a.min(b)).collect();
            let pts = [meet, join, ip.clone(), iq];
            if let Some(w) = rectangle(g, tol, Combine::Product, Check::LogSpm, &pts, &mut margin) {
                return (margin, Some(w));
            }
        }
    }
    (margin, None)
}

/// Log-supermodularity on the grid lattice: `g >= 0` and
/// `g(p v q) g(p ^ q) >= g(p) g(q)`.
///
/// Strictly positive slices are checked on adjacent cells, which implies the
/// inequality for every rectangle. Slices containing zeros fall back to every
/// rectangle, and grids of three or more axes with zeros to the full lattice.
pub fn is_log_spm(g: &GridFn, tol: &Tolerance) -> Result<ConditionReport> {
    g.expect_dims(&[2, 3, 4], "is_log_spm")?;
    if let Some(w) = first_below(g, -tol.abs) {
        return Ok(ConditionReport::new("log-spm", g.shape(), None, Some(w)));
    }
    let has_zero = g.values().iter().any(|&v| v <= tol.abs);
    let (margin, witness) = match (has_zero, g.dims()) {
        (false, _) => rectangle_scan(g, tol, Combine::Product, false),
        (true, 2) => rectangle_scan(g, tol, Combine::Product, true),
        (true, _) => lattice_scan(g, tol),
    };
    Ok(ConditionReport::new("log-spm", g.shape(), margin, witness))
}

/// Supermodularity on the grid lattice (adjacent rectangles in every
/// coordinate pair).
pub fn is_supermodular(g: &GridFn, tol: &Tolerance) -> Result<ConditionReport> {
    g.expect_dims(&[2, 3, 4], "is_supermodular")?;
    let (margin, witness) = rectangle_scan(g, tol, Combine::Sum, false);
    Ok(ConditionReport::new(
        "supermodular",
        g.shape(),
        margin,
        witness,
    ))
}

/// Signed-ratio monotonicity of `(f, g)`: wherever `g(s) < 0 < f(s)`, the
/// ratio `-g/f` at `s` is at least its value at every later state where `f`
/// is positive; and the same with the roles of `f` and `g` exchanged.
pub fn signed_ratio_monotone(f: &GridFn, g: &GridFn, tol: &Tolerance) -> Result<ConditionReport> {
    f.expect_dims(&[1], "signed_ratio_monotone")?;
    if f.axes() != g.axes() {
        return Err(Error::InvalidGrid(
            "signed_ratio_monotone needs f and g on the same grid".into(),
        ));
    }
    let mut margin = None;
    for (pos, neg, flipped) in [(f, g, false), (g, f, true)] {
        let (p, q) = (pos.values(), neg.values());
        let n = p.len();
        for i in 0..n {
            if !(q[i] < -tol.abs && p[i] > tol.abs) {
                continue;
            }
            let r0 = -q[i] / p[i];
            for j in i + 1..n {
                if p[j] <= tol.abs {
                    continue;
                }
                let r1 = -q[j] / p[j];
                min_opt(&mut margin, r0 - r1);
                if r0 < r1 - tol.slack(r0.max(r1)) {
                    let witness = Witness {
                        check: Check::SignedRatio,
                        points: vec![vec![i], vec![j]],
                        coords: vec![f.point(&[i]), f.point(&[j])],
                        values: vec![p[i], q[i], p[j], q[j]],
                        flipped,
                    };
                    return Ok(ConditionReport::new(
                        "signed-ratio monotone",
                        f.shape(),
                        margin,
                        Some(witness),
                    ));
                }
            }
        }
    }
    Ok(ConditionReport::new(
        "signed-ratio monotone",
        f.shape(),
        margin,
        None,
    ))
}

/// Convexity of a 1-D sample: consecutive slopes are nondecreasing.
pub fn is_convex(g: &GridFn, tol: &Tolerance) -> Result<ConditionReport> {
    g.expect_dims(&[1], "is_convex")?;
    let (x, y) = (&g.axes()[0], g.values());
    let mut margin = None;
    for i in 0..y.len().saturating_sub(2) {
        let s0 = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
        let s1 = (y[i + 2] - y[i + 1]) / (x[i + 2] - x[i + 1]);
        min_opt(&mut margin, s1 - s0);
        if s1 < s0 - tol.slack(s0.abs().max(s1.abs())) {
            let w = Witness::on(Check::Convex, g, vec![vec![i], vec![i + 1], vec![i + 2]]);
            return Ok(ConditionReport::new("convex", g.shape(), margin, Some(w)));
        }
    }
    Ok(ConditionReport::new("convex", g.shape(), margin, None))
}

/// Monotonicity of a 1-D sample, compared over all pairs `i < j`.
pub fn is_monotone(g: &GridFn, nondecreasing: bool, tol: &Tolerance) -> Result<ConditionReport> {
    g.expect_dims(&[1], "is_monotone")?;
    let name = if nondecreasing {
        "nondecreasing"
    } else {
        "nonincreasing"
    };
    let (margin, hit) = monotone_scan(g.values(), nondecreasing, tol);
    let witness = hit.map(|(i, j)| {
        let mut w = Witness::on(Check::Monotone, g, vec![vec![i], vec![j]]);
        w.flipped = nondecreasing;
        w
    });
    Ok(ConditionReport::new(name, g.shape(), margin, witness))
}

/// Pair `(i, j)`, `i < j`, breaking monotonicity the most at the first
/// offending `j`.
fn monotone_scan(
    v: &[f64],
    nondecreasing: bool,
    tol: &Tolerance,
) -> (Option<f64>, Option<(usize, usize)>) {
    let sgn = if nondecreasing { -1.0 } else { 1.0 };
    let mut margin = None;
    let mut low = 0usize;
    for j in 1..v.len() {
        // For nonincreasing sequences v[j] must not exceed the running minimum.
        if sgn * v[j - 1] < sgn * v[low] {
            low = j - 1;
        }
        let gap = sgn * (v[low] - v[j]);
        min_opt(&mut margin, gap);
        if gap < -tol.slack(v[low].abs().max(v[j].abs())) {
            return (margin, Some((low, j)));
        }
    }
    (margin, None)
}

/// D-DARA: `-u11 / u1` evaluated at `(y + t, F shifted by y)` is
/// nonincreasing in `y` for every `t` and base lottery.
pub fn check_d_dara(
    model: &PreferenceModel,
    y_grid: &[f64],
    t_grid: &[f64],
    bases: &[Lottery],
    tol: &Tolerance,
) -> Result<ConditionReport> {
    check_axis(y_grid)?;
    check_axis(t_grid)?;
    if bases.is_empty() {
        return Err(Error::InvalidGrid("no base lotteries".into()));
    }
    let mut margin: Option<f64> = None;
    for (b, base) in bases.iter().enumerate() {
        for (ti, &t) in t_grid.iter().enumerate() {
            let rho = y_grid
                .iter()
                .map(|&y| {
                    let (z, f) = (y + t, base.shift(y));
                    let u1 = model.local_utility_deriv(z, &f, 1)?;
                    if u1 <= 0.0 {
                        return Err(Error::NonMonotone { z, value: u1 });
                    }
                    Ok(-model.local_utility_deriv(z, &f, 2)? / u1)
                })
                .collect::<Result<Vec<_>>>()?;
            let (m, hit) = monotone_scan(&rho, false, tol);
            if let Some(m) = m {
                min_opt(&mut margin, m);
            }
            if let Some((i, j)) = hit {
                let witness = Witness {
                    check: Check::DDara,
                    points: vec![vec![b, ti, i], vec![b, ti, j]],
                    coords: vec![vec![b as f64, t, y_grid[i]], vec![b as f64, t, y_grid[j]]],
                    values: vec![rho[i], rho[j]],
                    flipped: false,
                };
                let grid = vec![bases.len(), t_grid.len(), y_grid.len()];
                return Ok(ConditionReport::new("D-DARA", grid, margin, Some(witness)));
            }
        }
    }
    Ok(ConditionReport::new(
        "D-DARA",
        vec![bases.len(), t_grid.len(), y_grid.len()],
        margin,
        None,
    ))
}

/// Risk aversion `-u11 / u1` at `(y + t, F shifted by y)`; used to
/// re-evaluate D-DARA witnesses.
pub fn risk_aversion_along_shift(
    model: &PreferenceModel,
    y: f64,
    t: f64,
    base: &Lottery,
) -> Result<f64> {
    let f = base.shift(y);
    Ok(-model.local_utility_deriv(y + t, &f, 2)? / model.local_utility_deriv(y + t, &f, 1)?)
}

/// Prudence measure `eta = -(d u11 / dy) / (d u1 / dy)` along
/// `y -> (y + t, F shifted by y)`.
pub fn prudence_measure(model: &PreferenceModel, y: f64, t: f64, base: &Lottery) -> Result<f64> {
    let analytic = matches!(model.spec(), ModelSpec::Eu { .. } | ModelSpec::Rdu { .. });
    if matches!(model.spec(), ModelSpec::CaraMixture { .. }) {
        return Err(Error::DegenerateMeasure(0.0));
    }
    let (num, den) = if analytic {
        // The probability weight on the rank of t does not move with y, so
        // the total derivatives are the outcome partials.
        let f = base.shift(y);
        (
            model.local_utility_deriv(y + t, &f, 3)?,
            model.local_utility_deriv(y + t, &f, 2)?,
        )
    } else {
        let h = 1e-4 * y.abs().max(1.0);
        let at = |yy: f64, k: u8| model.local_utility_deriv(yy + t, &base.shift(yy), k);
        (
            (at(y + h, 2)? - at(y - h, 2)?) / (2.0 * h),
            (at(y + h, 1)? - at(y - h, 1)?) / (2.0 * h),
        )
    };
    if den.abs() < 1e-12 {
        return Err(Error::DegenerateMeasure(den.abs()));
    }
    Ok(-num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lin(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn sc1_cases() {
        let s = lin(0.0, 2.0, 21);
        assert!(
            is_sc1(&GridFn::from_fn1(s.clone(), |s| s - 1.0).unwrap(), &tol())
                .unwrap()
                .holds()
        );
        let r = is_sc1(&GridFn::from_fn1(s.clone(), |s| 1.0 - s).unwrap(), &tol()).unwrap();
        assert!(!r.holds());
        let w = r.witness.unwrap();
        assert_eq!(w.coords, vec![vec![0.0], vec![2.0]]);
        assert!(is_sc1(&GridFn::from_fn1(s, |_| -1.0).unwrap(), &tol())
            .unwrap()
            .holds());
    }

    #[test]
    fn strict_clause_distinguishes_weak_variant() {
        // Positive then zero: breaks only the strict implication.
        let g = GridFn::new(vec![vec![0.0, 1.0, 2.0]], vec![-1.0, 1.0, 0.0]).unwrap();
        assert!(!is_sc1(&g, &tol()).unwrap().holds());
        assert!(is_sc1_weak(&g, &tol()).unwrap().holds());
    }

    #[test]
    fn sc2_cases() {
        let a = lin(-1.0, 1.0, 11);
        let g = GridFn::from_fn2(a.clone(), a.clone(), |x, s| x * s).unwrap();
        assert!(is_sc2(&g, &tol()).unwrap().holds());
        let h = GridFn::from_fn2(a.clone(), a.clone(), |x, s| -x * s).unwrap();
        let r = is_sc2(&h, &tol()).unwrap();
        assert!(!r.holds());
        assert!(r.witness.as_ref().unwrap().reproduces(&h, &tol()));
        assert!(is_sc2_neg_x(&h, &tol()).unwrap().holds());
    }

    #[test]
    fn log_spm_cases() {
        let a = lin(0.0, 1.0, 11);
        let up = GridFn::from_fn2(a.clone(), a.clone(), |s, t| (s * t).exp()).unwrap();
        assert!(is_log_spm(&up, &tol()).unwrap().holds());
        let down = GridFn::from_fn2(a.clone(), a.clone(), |s, t| (-s * t).exp()).unwrap();
        let r = is_log_spm(&down, &tol()).unwrap();
        assert!(!r.holds());
        assert!(r.witness.unwrap().reproduces(&down, &tol()));
        let one = GridFn::from_fn2(a.clone(), a, |_, _| 1.0).unwrap();
        let r = is_log_spm(&one, &tol()).unwrap();
        assert!(r.holds());
        assert_eq!(r.margin, Some(0.0));
    }

    #[test]
    fn log_spm_with_zeros_uses_full_rectangles() {
        // Indicator of s <= t is log-spm; an indicator of s + t <= 1 is not.
        let a = lin(0.0, 1.0, 6);
        let ok =
            GridFn::from_fn2(a.clone(), a.clone(), |s, t| if s <= t { 1.0 } else { 0.0 }).unwrap();
        assert!(is_log_spm(&ok, &tol()).unwrap().holds());
        let bad = GridFn::from_fn2(
            a.clone(),
            a.clone(),
            |s, t| if s + t <= 1.0 { 1.0 } else { 0.0 },
        )
        .unwrap();
        assert!(!is_log_spm(&bad, &tol()).unwrap().holds());
        let three = GridFn::from_fn(vec![a.clone(), a.clone(), a], |p| {
            if p[0] <= p[1] && p[1] <= p[2] {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        assert!(is_log_spm(&three, &tol()).unwrap().holds());
    }

    #[test]
    fn log_spm_negative_value_fails() {
        let g = GridFn::new(
            vec![vec![0.0, 1.0], vec![0.0, 1.0]],
            vec![1.0, 1.0, 1.0, -1.0],
        )
        .unwrap();
        let r = is_log_spm(&g, &tol()).unwrap();
        assert_eq!(r.witness.unwrap().check, Check::Negative);
    }

    #[test]
    fn supermodular_cases() {
        let a = lin(0.0, 1.0, 7);
        let g = |f: fn(f64, f64) -> f64| GridFn::from_fn2(a.clone(), a.clone(), f).unwrap();
        assert!(is_supermodular(&g(|s, t| s * t), &tol()).unwrap().holds());
        assert!(!is_supermodular(&g(|s, t| -s * t), &tol()).unwrap().holds());
        let r = is_supermodular(&g(|s, t| s + t), &tol()).unwrap();
        assert!(r.holds());
        assert!(r.margin.unwrap().abs() < 1e-15);
    }

    #[test]
    fn signed_ratio_cases() {
        let s = lin(0.0, 1.0, 21);
        let f = GridFn::from_fn1(s.clone(), |s| s).unwrap();
        assert!(signed_ratio_monotone(&f, &f, &tol()).unwrap().holds());
        let one = GridFn::from_fn1(s.clone(), |_| 1.0).unwrap();
        let g = GridFn::from_fn1(s.clone(), |s| s - 0.5).unwrap();
        assert!(signed_ratio_monotone(&one, &g, &tol()).unwrap().holds());
        let sq = GridFn::from_fn1(s, |s| -(s - 0.5) * (s - 0.5)).unwrap();
        let r = signed_ratio_monotone(&one, &sq, &tol()).unwrap();
        assert!(!r.holds());
        assert!(r.witness.unwrap().violates(&tol()));
    }

    #[test]
    fn interval_dominance_cases() {
        let x = lin(0.0, 1.0, 21);
        let g = GridFn::from_fn2(x, vec![0.0, 1.0], |x, t| -(x - 1.0 + t).powi(2)).unwrap();
        let r = interval_dominance(&g, &tol()).unwrap();
        assert!(!r.holds());
        assert!(r.witness.unwrap().reproduces(&g, &tol()));
        let x = lin(0.0, 1.0, 21);
        let up = GridFn::from_fn2(x, vec![0.0, 0.5, 1.0], |x, t| -(x - t).powi(2)).unwrap();
        assert!(interval_dominance(&up, &tol()).unwrap().holds());
    }

    #[test]
    fn convexity_and_monotonicity() {
        let x = lin(-1.0, 1.0, 21);
        assert!(
            is_convex(&GridFn::from_fn1(x.clone(), |x| x * x).unwrap(), &tol())
                .unwrap()
                .holds()
        );
        let c = is_convex(&GridFn::from_fn1(x.clone(), |x| -x * x).unwrap(), &tol()).unwrap();
        assert!(c.witness.unwrap().violates(&tol()));
        let inc = GridFn::from_fn1(x.clone(), |x| x).unwrap();
        assert!(is_monotone(&inc, true, &tol()).unwrap().holds());
        let r = is_monotone(&inc, false, &tol()).unwrap();
        assert!(r.witness.unwrap().reproduces(&inc, &tol()));
        let dec = GridFn::from_fn1(x, |x| -x).unwrap();
        let r = is_monotone(&dec, true, &tol()).unwrap();
        assert!(r.witness.unwrap().reproduces(&dec, &tol()));
    }

    fn dara_bases() -> Vec<Lottery> {
        vec![
            Lottery::new([(0.0, 0.5), (1.0, 0.5)]).unwrap(),
            Lottery::new([(0.2, 0.3), (0.8, 0.7)]).unwrap(),
        ]
    }

    #[test]
    fn d_dara_quadratic_iff() {
        let ys = lin(0.0, 3.0, 31);
        let ts = [0.0, 0.5, 1.0];
        let dara = |a, b| {
            check_d_dara(
                &PreferenceModel::quadratic(a, b).unwrap(),
                &ys,
                &ts,
                &dara_bases(),
                &tol(),
            )
            .unwrap()
        };
        assert!(dara(1.0, 0.5).holds());
        let r = dara(0.42, 0.57);
        assert!(!r.holds());
        let w = r.witness.unwrap();
        assert!(w.violates(&tol()));
        let m = PreferenceModel::quadratic(0.42, 0.57).unwrap();
        let base = &dara_bases()[w.points[0][0]];
        let again: Vec<f64> = w
            .coords
            .iter()
            .map(|c| risk_aversion_along_shift(&m, c[2], c[1], base).unwrap())
            .collect();
        assert_eq!(again, w.values);
    }

    #[test]
    fn d_dara_cara_mixture_is_flat() {
        let m = PreferenceModel::cara_mixture(&[(-0.5, 0.5), (-1.5, 0.5)]).unwrap();
        let r = check_d_dara(
            &m,
            &lin(0.0, 3.0, 31),
            &[0.0, 0.5, 1.0],
            &dara_bases(),
            &tol(),
        )
        .unwrap();
        assert!(r.holds());
        assert!(r.margin.unwrap().abs() < 1e-9);
    }

    #[test]
    fn d_dara_reports_non_monotone_utility() {
        // omega_1(1) = 0: the local utility is flat above the top atom.
        let m = PreferenceModel::rdu(
            "dual-power:2".parse().unwrap(),
            "log-shift:0.1".parse().unwrap(),
        )
        .unwrap();
        let r = check_d_dara(&m, &[0.0, 1.0], &[1.0], &dara_bases(), &tol());
        assert!(matches!(r, Err(Error::NonMonotone { .. })), "{r:?}");
    }

    #[test]
    fn prudence_measure_cases() {
        let log = PreferenceModel::with_domain(
            ModelSpec::Eu {
                u: "log-shift:0".parse().unwrap(),
            },
            crate::lottery::OutcomeDomain::new(0.01, 10.0).unwrap(),
        );
        {
            let m = log.unwrap();
            let f = Lottery::new([(0.0, 0.5), (0.5, 0.5)]).unwrap();
            let eta = prudence_measure(&m, 0.5, 0.5, &f).unwrap();
            assert!((eta - 2.0).abs() < 1e-12, "{eta}");
        }
        let m = PreferenceModel::cara_mixture(&[(0.5, 0.5), (1.5, 0.5)]).unwrap();
        assert!(matches!(
            prudence_measure(&m, 1.0, 0.0, &dara_bases()[0]),
            Err(Error::DegenerateMeasure(_))
        ));
        let rdu = PreferenceModel::rdu(
            "dual-power:2".parse().unwrap(),
            "log-shift:0.1".parse().unwrap(),
        )
        .unwrap();
        for y in lin(0.5, 3.0, 6) {
            for t in [0.0, 0.3] {
                assert!(prudence_measure(&rdu, y, t, &dara_bases()[1]).unwrap() >= 0.0);
            }
        }
        let q = PreferenceModel::quadratic(1.0, 0.5).unwrap();
        let eta = prudence_measure(&q, 1.0, 0.5, &dara_bases()[0]).unwrap();
        assert!(eta.is_finite());
    }

    #[test]
    fn grid_validation() {
        assert!(GridFn::new(vec![vec![0.0, 0.0]], vec![1.0, 1.0]).is_err());
        assert!(GridFn::new(vec![vec![0.0, 1.0]], vec![1.0]).is_err());
        assert!(GridFn::new(vec![vec![0.0, 1.0]], vec![1.0, f64::NAN]).is_err());
        assert!(GridFn::new(vec![], vec![]).is_err());
        let g = GridFn::from_fn2(vec![0.0, 1.0], vec![0.0, 1.0, 2.0], |x, s| x + 10.0 * s).unwrap();
        assert_eq!(g.get(&[1, 2]), 21.0);
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(serde_json::from_str::<GridFn>(&json).unwrap(), g);
        let r = g.reverse_axis(0);
        assert_eq!(r.axes()[0], vec![-1.0, -0.0]);
        assert_eq!(r.get(&[0, 2]), 21.0);
    }

    fn small_grid() -> impl Strategy<Value = GridFn> {
        (2usize..6, 2usize..7).prop_flat_map(|(nx, ns)| {
            proptest::collection::vec(-3i8..=3, nx * ns).prop_map(move |v| {
                let ax = (0..nx).map(|i| i as f64).collect();
                let sx = (0..ns).map(|i| i as f64).collect();
                GridFn::new(vec![ax, sx], v.into_iter().map(f64::from).collect()).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn sc2_implies_interval_dominance(g in small_grid()) {
            if is_sc2(&g, &tol()).unwrap().holds() {
                prop_assert!(interval_dominance(&g, &tol()).unwrap().holds());
            }
        }

        #[test]
        fn failing_witnesses_reproduce(g in small_grid()) {
            for r in [
                is_sc2(&g, &tol()).unwrap(),
                is_sc2_neg_x(&g, &tol()).unwrap(),
                interval_dominance(&g, &tol()).unwrap(),
                is_log_spm(&g, &tol()).unwrap(),
                is_supermodular(&g, &tol()).unwrap(),
            ] {
                if let Some(w) = r.witness {
                    prop_assert!(w.reproduces(&g, &tol()), "{:?}", w);
                }
            }
            let row = GridFn::new(vec![g.axes()[1].clone()], g.values()[..g.shape()[1]].to_vec()).unwrap();
            for r in [is_sc1(&row, &tol()).unwrap(), is_convex(&row, &tol()).unwrap(), is_monotone(&row, true, &tol()).unwrap()] {
                if let Some(w) = r.witness {
                    prop_assert!(w.reproduces(&row, &tol()));
                }
            }
        }

        #[test]
        fn exponential_family_log_spm_matches_mixed_partial(c in -2.0f64..2.0, a in -1.0f64..1.0, b in -1.0f64..1.0) {
            // log g = a s^2 + b t^2 + c s t has mixed partial c.
            let ax = lin(0.0, 1.0, 9);
            let g = GridFn::from_fn2(ax.clone(), ax, |s, t| (a * s * s + b * t * t + c * s * t).exp()).unwrap();
            let holds = is_log_spm(&g, &tol()).unwrap().holds();
            if c > 1e-3 { prop_assert!(holds); }
            if c < -1e-3 { prop_assert!(!holds); }
        }

        #[test]
        fn log_spm_agrees_with_supermodular_log(k in 0.1f64..3.0) {
            let ax = lin(0.0, 1.0, 8);
            let g = GridFn::from_fn2(ax.clone(), ax, |s, t| (k * s * t).exp()).unwrap();
            prop_assert!(is_log_spm(&g, &tol()).unwrap().holds());
            prop_assert!(is_supermodular(&g.map(f64::ln).unwrap(), &tol()).unwrap().holds());
        }
    }
}
