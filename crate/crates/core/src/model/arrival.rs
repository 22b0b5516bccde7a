use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const PMF_TOL: f64 = 1e-12;

/// A finitely supported law on the nonnegative integers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PmfSpec", into = "PmfSpec")]
pub struct Pmf {
    values: Vec<i64>,
    probs: Vec<f64>,
    cdf: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct PmfSpec {
    values: Vec<i64>,
    probs: Vec<f64>,
}

impl TryFrom<PmfSpec> for Pmf {
    type Error = Error;
    fn try_from(spec: PmfSpec) -> Result<Self> {
        Pmf::new(spec.values, spec.probs)
    }
}

impl From<Pmf> for PmfSpec {
    fn from(p: Pmf) -> Self {
        PmfSpec { values: p.values, probs: p.probs }
    }
}

fn cumulative(probs: &[f64]) -> Vec<f64> {
    probs
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect()
}

fn check_probs(probs: &[f64]) -> Result<()> {
    if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::InvalidModel("probabilities must be finite and nonnegative".into()));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > PMF_TOL {
        return Err(Error::InvalidModel(format!("probabilities sum to {total}, not 1")));
    }
    Ok(())
}

impl Pmf {
    pub fn new(values: Vec<i64>, probs: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.len() != probs.len() {
            return Err(Error::InvalidModel(
                "pmf needs matching, nonempty value and probability lists".into(),
            ));
        }
        if values.iter().any(|v| *v < 0) {
            return Err(Error::InvalidModel("pmf support must be nonnegative".into()));
        }
        check_probs(&probs)?;
        let cdf = cumulative(&probs);
        Ok(Self { values, probs, cdf })
    }

    pub fn point(value: i64) -> Result<Self> {
        Self::new(vec![value], vec![1.0])
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        Self::two_point(1, p)
    }

    /// `height` with probability `p`, zero otherwise.
    pub fn two_point(height: i64, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidModel(format!("probability {p} outside [0, 1]")));
        }
        Self::new(vec![0, height], vec![1.0 - p, p])
    }

    pub fn binomial(trials: u32, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidModel(format!("probability {p} outside [0, 1]")));
        }
        let mut probs = Vec::with_capacity(trials as usize + 1);
        let mut coeff = 1.0_f64;
        for k in 0..=trials {
            if k > 0 {
                coeff *= f64::from(trials - k + 1) / f64::from(k);
            }
            probs.push(coeff * p.powi(k as i32) * (1.0 - p).powi((trials - k) as i32));
        }
        // renormalize away rounding so the sum check is exact
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|q| *q /= total);
        Self::new((0..=i64::from(trials)).collect(), probs)
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().zip(&self.probs).map(|(v, p)| *v as f64 * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.values
            .iter()
            .zip(&self.probs)
            .map(|(v, p)| p * (*v as f64 - m).powi(2))
            .sum()
    }

    pub fn max(&self) -> i64 {
        self.values
            .iter()
            .zip(&self.probs)
            .filter(|(_, p)| **p > 0.0)
            .map(|(v, _)| *v)
            .max()
            .unwrap_or(0)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        let u: f64 = rng.random();
        let idx = self.cdf.iter().position(|c| *c > u).unwrap_or(self.values.len() - 1);
        self.values[idx]
    }
}

/// A joint law for correlated per-queue arrivals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "JointSpec", into = "JointSpec")]
pub struct JointPmf {
    outcomes: Vec<Vec<i64>>,
    probs: Vec<f64>,
    cdf: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct JointSpec {
    outcomes: Vec<Vec<i64>>,
    probs: Vec<f64>,
}

impl TryFrom<JointSpec> for JointPmf {
    type Error = Error;
    fn try_from(spec: JointSpec) -> Result<Self> {
        JointPmf::new(spec.outcomes, spec.probs)
    }
}

impl From<JointPmf> for JointSpec {
    fn from(p: JointPmf) -> Self {
        JointSpec { outcomes: p.outcomes, probs: p.probs }
    }
}

impl JointPmf {
    pub fn new(outcomes: Vec<Vec<i64>>, probs: Vec<f64>) -> Result<Self> {
        if outcomes.is_empty() || outcomes.len() != probs.len() {
            return Err(Error::InvalidModel("joint pmf needs matching nonempty lists".into()));
        }
        let n = outcomes[0].len();
        if n == 0 || outcomes.iter().any(|o| o.len() != n || o.iter().any(|v| *v < 0)) {
            return Err(Error::InvalidModel(
                "joint pmf outcomes must be nonnegative vectors of one common length".into(),
            ));
        }
        check_probs(&probs)?;
        let cdf = cumulative(&probs);
        Ok(Self { outcomes, probs, cdf })
    }

    pub fn dim(&self) -> usize {
        self.outcomes[0].len()
    }

    pub fn outcomes(&self) -> &[Vec<i64>] {
        &self.outcomes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// Arrival law of a generalized switch (per queue) or a load balancer (one stream).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArrivalModel {
    /// Independent arrivals to each queue.
    Independent(Vec<Pmf>),
    /// Arrivals to all queues drawn jointly.
    Joint(JointPmf),
    /// One scalar stream, routed by a dispatcher.
    Stream(Pmf),
}

/// One slot's arrivals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArrivalDraw {
    Vector(Vec<i64>),
    Scalar(i64),
}

impl ArrivalModel {
    pub fn independent(pmfs: Vec<Pmf>) -> Result<Self> {
        if pmfs.is_empty() {
            return Err(Error::InvalidModel("need at least one queue".into()));
        }
        Ok(Self::Independent(pmfs))
    }

    /// Number of components of a draw (1 for a stream).
    pub fn dim(&self) -> usize {
        match self {
            Self::Independent(p) => p.len(),
            Self::Joint(j) => j.dim(),
            Self::Stream(_) => 1,
        }
    }

    pub fn a_max(&self) -> i64 {
        match self {
            Self::Independent(p) => p.iter().map(Pmf::max).max().unwrap_or(0),
            Self::Joint(j) => j
                .outcomes
                .iter()
                .zip(&j.probs)
                .filter(|(_, p)| **p > 0.0)
                .flat_map(|(o, _)| o.iter().copied())
                .max()
                .unwrap_or(0),
            Self::Stream(p) => p.max(),
        }
    }

    pub fn mean(&self) -> Vec<f64> {
        match self {
            Self::Independent(p) => p.iter().map(Pmf::mean).collect(),
            Self::Joint(j) => {
                let mut m = vec![0.0; j.dim()];
                for (o, p) in j.outcomes.iter().zip(&j.probs) {
                    for (mi, oi) in m.iter_mut().zip(o) {
                        *mi += p * *oi as f64;
                    }
                }
                m
            }
            Self::Stream(p) => vec![p.mean()],
        }
    }

    /// Covariance matrix of one draw (1×1 for a stream).
    pub fn covariance(&self) -> DMatrix<f64> {
        match self {
            Self::Independent(p) => {
                DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                    p.len(),
                    p.iter().map(Pmf::variance),
                ))
            }
            Self::Joint(j) => {
                let n = j.dim();
                let m = self.mean();
                let mut cov = DMatrix::zeros(n, n);
                for (o, p) in j.outcomes.iter().zip(&j.probs) {
                    for r in 0..n {
                        for c in 0..n {
                            cov[(r, c)] += p * (o[r] as f64 - m[r]) * (o[c] as f64 - m[c]);
                        }
                    }
                }
                cov
            }
            Self::Stream(p) => DMatrix::from_element(1, 1, p.variance()),
        }
    }

    /// Writes one per-queue draw into `out`. A stream writes its scalar into `out[0]`.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [i64]) {
        match self {
            Self::Independent(pmfs) => {
                for (o, p) in out.iter_mut().zip(pmfs) {
                    *o = p.sample(rng);
                }
            }
            Self::Joint(j) => {
                let u: f64 = rng.random();
                let idx = j.cdf.iter().position(|c| *c > u).unwrap_or(j.outcomes.len() - 1);
                out.copy_from_slice(&j.outcomes[idx]);
            }
            Self::Stream(p) => out[0] = p.sample(rng),
        }
    }
}

/// Draws one slot of arrivals.
pub fn sample_arrivals<R: Rng + ?Sized>(model: &ArrivalModel, rng: &mut R) -> ArrivalDraw {
    match model {
        ArrivalModel::Stream(p) => ArrivalDraw::Scalar(p.sample(rng)),
        other => {
            let mut out = vec![0; other.dim()];
            other.sample_into(rng, &mut out);
            ArrivalDraw::Vector(out)
        }
    }
}

/// Parametric family used to hit a requested arrival mean.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ArrivalFamily {
    /// `{0, height}` with the mass split to match the mean.
    Bernoulli {
        #[serde(default = "one")]
        height: i64,
    },
    /// Binomial with a fixed number of trials.
    Binomial { trials: u32 },
}

fn one() -> i64 {
    1
}

impl ArrivalFamily {
    pub fn max(&self) -> i64 {
        match *self {
            Self::Bernoulli { height } => height,
            Self::Binomial { trials } => i64::from(trials),
        }
    }

    pub fn with_mean(&self, mean: f64) -> Result<Pmf> {
        let cap = self.max() as f64;
        if !(mean.is_finite() && (0.0..=cap).contains(&mean)) || cap <= 0.0 {
            return Err(Error::InvalidTarget(format!("mean {mean} outside [0, {cap}]")));
        }
        match *self {
            Self::Bernoulli { height } => Pmf::two_point(height, mean / cap),
            Self::Binomial { trials } => Pmf::binomial(trials, mean / cap),
        }
    }
}

/// Where the heavy-traffic sequence is anchored.
#[derive(Clone, Debug, PartialEq)]
pub enum HeavyTrafficTarget {
    /// Per-queue mean `(1 − ε)ν` for a boundary direction `ν`.
    Switch { nu: Vec<f64> },
    /// Stream mean `μ_Σ − ε`.
    LoadBalance { mu_sigma: f64 },
}

/// Arrival law scaled to a heavy-traffic parameter, with its covariance.
#[derive(Clone, Debug)]
pub struct ScaledArrivals {
    pub eps: f64,
    pub model: ArrivalModel,
    pub mean: Vec<f64>,
    pub covariance: DMatrix<f64>,
}

/// Builds the arrival law of the `ε`-th system in the heavy-traffic sequence.
pub fn scale_to_heavy_traffic(
    family: &ArrivalFamily,
    target: &HeavyTrafficTarget,
    eps: f64,
) -> Result<ScaledArrivals> {
    let model = match target {
        HeavyTrafficTarget::Switch { nu } => {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(Error::InvalidTarget(format!("eps {eps} must lie in (0, 1)")));
            }
            if nu.is_empty() || nu.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::InvalidTarget("nu must be a nonnegative vector".into()));
            }
            let pmfs = nu
                .iter()
                .map(|v| family.with_mean((1.0 - eps) * v))
                .collect::<Result<Vec<_>>>()?;
            ArrivalModel::Independent(pmfs)
        }
        HeavyTrafficTarget::LoadBalance { mu_sigma } => {
            if !(eps > 0.0 && eps < *mu_sigma) {
                return Err(Error::InvalidTarget(format!(
                    "eps {eps} must lie in (0, {mu_sigma})"
                )));
            }
            ArrivalModel::Stream(family.with_mean(mu_sigma - eps)?)
        }
    };
    Ok(ScaledArrivals { eps, mean: model.mean(), covariance: model.covariance(), model })
}
