//! Finite-support monetary lotteries.
//!
//! A [`Lottery`] is a probability distribution with finitely many atoms. Its
//! CDF is the right-continuous step function `F(z) = P(X <= z)`, so every
//! integral against a lottery is an exact finite sum.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used when merging nearly equal outcomes.
pub const MERGE_TOL: f64 = 1e-12;
/// Tolerance on the probability sum accepted by [`Lottery::new`].
pub const SUM_TOL: f64 = 1e-9;
/// Tolerance of the stochastic dominance comparisons.
pub const DOMINANCE_TOL: f64 = 1e-12;

/// Compact outcome interval `[lower, upper]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct OutcomeDomain {
    lower: f64,
    upper: f64,
}

impl OutcomeDomain {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite() && lower < upper) {
            return Err(Error::InvalidDomain { lower, upper });
        }
        Ok(Self { lower, upper })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn contains(&self, z: f64) -> bool {
        z >= self.lower - MERGE_TOL && z <= self.upper + MERGE_TOL
    }

    pub fn check(&self, z: f64) -> Result<()> {
        if self.contains(z) {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                z,
                lower: self.lower,
                upper: self.upper,
            })
        }
    }

    pub fn check_lottery(&self, f: &Lottery) -> Result<()> {
        self.check(f.min())?;
        self.check(f.max())
    }
}

impl Default for OutcomeDomain {
    fn default() -> Self {
        Self {
            lower: 0.0,
            upper: 10.0,
        }
    }
}

impl TryFrom<[f64; 2]> for OutcomeDomain {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        Self::new(v[0], v[1])
    }
}

impl From<OutcomeDomain> for [f64; 2] {
    fn from(d: OutcomeDomain) -> Self {
        [d.lower, d.upper]
    }
}

/// A finite-support probability distribution over monetary outcomes.
///
/// Invariants: the support is strictly ascending, probabilities are positive
/// and sum to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLottery", into = "RawLottery")]
pub struct Lottery {
    support: Vec<f64>,
    probs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawLottery {
    support: Vec<f64>,
    probs: Vec<f64>,
}

impl TryFrom<RawLottery> for Lottery {
    type Error = Error;

    fn try_from(raw: RawLottery) -> Result<Self> {
        if raw.support.len() != raw.probs.len() {
            return Err(Error::InvalidModel(format!(
                "lottery has {} outcomes but {} probabilities",
                raw.support.len(),
                raw.probs.len()
            )));
        }
        Lottery::new(raw.support.into_iter().zip(raw.probs))
    }
}

impl From<Lottery> for RawLottery {
    fn from(l: Lottery) -> Self {
        RawLottery {
            support: l.support,
            probs: l.probs,
        }
    }
}

impl Lottery {
    /// Builds a lottery from `(outcome, probability)` pairs, sorting, merging
    /// duplicates and renormalizing the probabilities to sum to exactly one.
    pub fn new<I>(points: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut pts: Vec<(f64, f64)> = Vec::new();
        let mut sum = 0.0;
        for (z, p) in points {
            if !z.is_finite() || !p.is_finite() {
                return Err(Error::NonFiniteLottery);
            }
            if p < 0.0 {
                return Err(Error::NegativeProbability {
                    outcome: z,
                    prob: p,
                });
            }
            sum += p;
            pts.push((z, p));
        }
        if pts.is_empty() {
            return Err(Error::EmptySupport);
        }
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::ProbabilitySum { sum });
        }
        Ok(Self::from_unnormalized(pts))
    }

    /// Sorts, merges and renormalizes. Caller guarantees non-negative finite
    /// weights with positive total.
    fn from_unnormalized(mut pts: Vec<(f64, f64)>) -> Self {
        pts.retain(|&(_, p)| p > 0.0);
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut support: Vec<f64> = Vec::with_capacity(pts.len());
        let mut probs: Vec<f64> = Vec::with_capacity(pts.len());
        for (z, p) in pts {
            match support.last() {
                Some(&last) if (z - last).abs() <= MERGE_TOL => {
                    *probs.last_mut().unwrap() += p;
                }
                _ => {
                    support.push(z);
                    probs.push(p);
                }
            }
        }
        let total: f64 = probs.iter().sum();
        for p in &mut probs {
            *p /= total;
        }
        Self { support, probs }
    }

    /// Point mass at `z`.
    pub fn degenerate(z: f64) -> Self {
        Self {
            support: vec![z],
            probs: vec![1.0],
        }
    }

    /// Equiprobable lottery over the given outcomes.
    pub fn uniform(outcomes: &[f64]) -> Result<Self> {
        let p = 1.0 / outcomes.len().max(1) as f64;
        Self::new(outcomes.iter().map(|&z| (z, p)))
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.support.iter().copied().zip(self.probs.iter().copied())
    }

    pub fn min(&self) -> f64 {
        self.support[0]
    }

    pub fn max(&self) -> f64 {
        *self.support.last().unwrap()
    }

    /// `F(z) = P(X <= z)`.
    pub fn cdf(&self, z: f64) -> f64 {
        let k = self.support.partition_point(|&s| s <= z);
        if k == self.support.len() {
            1.0
        } else {
            self.probs[..k].iter().sum()
        }
    }

    /// Cumulative probabilities `F(z_i)` at each support point.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let n = self.probs.len();
        let mut out: Vec<f64> = self
            .probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        out[n - 1] = 1.0;
        out
    }

    pub fn expectation<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        self.iter().map(|(z, p)| p * g(z)).sum()
    }

    pub fn mean(&self) -> f64 {
        self.expectation(|z| z)
    }

    /// `(1 - a) F + a G`.
    pub fn mix(&self, other: &Lottery, a: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) || a.is_nan() {
            return Err(Error::MixWeight(a));
        }
        if a == 0.0 {
            return Ok(self.clone());
        }
        if a == 1.0 {
            return Ok(other.clone());
        }
        let pts = self
            .iter()
            .map(|(z, p)| (z, (1.0 - a) * p))
            .chain(other.iter().map(|(z, p)| (z, a * p)))
            .collect();
        Ok(Self::from_unnormalized(pts))
    }

    /// Distribution of `X + c`.
    pub fn shift(&self, c: f64) -> Self {
        Self {
            support: self.support.iter().map(|z| z + c).collect(),
            probs: self.probs.clone(),
        }
    }

    /// Image lottery of `m(X)`; equal images are merged.
    pub fn pushforward<M: Fn(f64) -> f64>(&self, m: M) -> Result<Self> {
        let pts: Vec<(f64, f64)> = self.iter().map(|(z, p)| (m(z), p)).collect();
        if pts.iter().any(|(z, _)| !z.is_finite()) {
            return Err(Error::NonFiniteLottery);
        }
        Ok(Self::from_unnormalized(pts))
    }

    /// `E (z - X)^+`, the first iterated integral of the CDF.
    pub fn integrated_cdf(&self, z: f64) -> f64 {
        self.iter().map(|(s, p)| p * (z - s).max(0.0)).sum()
    }

    /// `E ((z - X)^+)^2 / 2`, the second iterated integral of the CDF.
    pub fn twice_integrated_cdf(&self, z: f64) -> f64 {
        self.iter()
            .map(|(s, p)| {
                let d = (z - s).max(0.0);
                0.5 * p * d * d
            })
            .sum()
    }

    /// Does `self` dominate `other` in the stochastic order of the given
    /// degree (1, 2 or 3)?
    pub fn dominates(&self, other: &Lottery, order: u8) -> Result<bool> {
        let grid = evaluation_grid(self, other);
        let tol = DOMINANCE_TOL;
        match order {
            1 => Ok(grid.iter().all(|&z| self.cdf(z) <= other.cdf(z) + tol)),
            2 => Ok(grid
                .iter()
                .all(|&z| self.integrated_cdf(z) <= other.integrated_cdf(z) + tol)),
            3 => {
                if self.mean() < other.mean() - tol {
                    return Ok(false);
                }
                let d1 = |z: f64| self.integrated_cdf(z) - other.integrated_cdf(z);
                let d2 = |z: f64| self.twice_integrated_cdf(z) - other.twice_integrated_cdf(z);
                if grid.iter().any(|&z| d2(z) > tol) {
                    return Ok(false);
                }
                // d2 is quadratic between knots; its interior extremum sits
                // where the piecewise-linear d1 vanishes.
                for w in grid.windows(2) {
                    let (a, b) = (w[0], w[1]);
                    let (da, db) = (d1(a), d1(b));
                    if da * db < 0.0 {
                        let root = a + (b - a) * da / (da - db);
                        if d2(root) > tol {
                            return Ok(false);
                        }
                    }
                }
                Ok(true)
            }
            k => Err(Error::DominanceOrder(k)),
        }
    }
}

/// Union of both supports plus midpoints and one point past the maximum.
fn evaluation_grid(f: &Lottery, g: &Lottery) -> Vec<f64> {
    let mut knots: Vec<f64> = f.support.iter().chain(g.support.iter()).copied().collect();
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let mut grid = Vec::with_capacity(2 * knots.len() + 1);
    for w in knots.windows(2) {
        grid.push(w[0]);
        grid.push(0.5 * (w[0] + w[1]));
    }
    let last = *knots.last().unwrap();
    grid.push(last);
    grid.push(last + 1.0);
    grid
}

impl Lottery {
    /// Probability mass at `z` (atoms within [`MERGE_TOL`] count).
    pub fn mass_at(&self, z: f64) -> f64 {
        let i = self.support.partition_point(|&s| s < z - MERGE_TOL);
        match self.support.get(i) {
            Some(&s) if (s - z).abs() <= MERGE_TOL => self.probs[i],
            _ => 0.0,
        }
    }
}

type LotteryFn = Arc<dyn Fn(f64) -> Result<Lottery> + Send + Sync>;

/// A one-parameter family of lotteries `theta -> G(.; theta)`.
#[derive(Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LotteryFamily {
    Fixed(Lottery),
    /// Exponential tilt `g(s; theta) ∝ p(s) e^{theta s}`; log-supermodular
    /// in `(s, theta)` by construction.
    Tilt {
        base: Lottery,
    },
    /// `(1 - theta) low + theta high` for `theta` in `[0, 1]`.
    Mixture {
        low: Lottery,
        high: Lottery,
    },
    #[serde(skip)]
    Custom(LotteryFn),
}

impl fmt::Debug for LotteryFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LotteryFamily::Fixed(l) => write!(f, "Fixed({l:?})"),
            LotteryFamily::Tilt { base } => write!(f, "Tilt({base:?})"),
            LotteryFamily::Mixture { low, high } => write!(f, "Mixture({low:?}, {high:?})"),
            LotteryFamily::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl LotteryFamily {
    pub fn custom<F>(f: F) -> Self
    where
        F: Fn(f64) -> Result<Lottery> + Send + Sync + 'static,
    {
        LotteryFamily::Custom(Arc::new(f))
    }

    pub fn at(&self, theta: f64) -> Result<Lottery> {
        match self {
            LotteryFamily::Fixed(l) => Ok(l.clone()),
            LotteryFamily::Tilt { base } => {
                let top = base
                    .support
                    .iter()
                    .map(|s| theta * s)
                    .fold(f64::NEG_INFINITY, f64::max);
                let pts = base
                    .iter()
                    .map(|(s, p)| (s, p * (theta * s - top).exp()))
                    .collect();
                Ok(Self::normalized(pts)?)
            }
            LotteryFamily::Mixture { low, high } => low.mix(high, theta),
            LotteryFamily::Custom(f) => f(theta),
        }
    }

    fn normalized(pts: Vec<(f64, f64)>) -> Result<Lottery> {
        if pts.iter().any(|(z, p)| !z.is_finite() || !p.is_finite()) {
            return Err(Error::NonFiniteLottery);
        }
        let total: f64 = pts.iter().map(|(_, p)| p).sum();
        if !(total > 0.0) {
            return Err(Error::EmptySupport);
        }
        Ok(Lottery::from_unnormalized(
            pts.into_iter().map(|(z, p)| (z, p / total)).collect(),
        ))
    }
}
