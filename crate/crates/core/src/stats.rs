//! Batch-means output analysis with compensated accumulation.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Point estimate with a 95% confidence half-width.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub half_width: f64,
}

impl Estimate {
    pub fn new(mean: f64, half_width: f64) -> Self {
        Self { mean, half_width }
    }

    pub fn contains(&self, x: f64, widths: f64) -> bool {
        (self.mean - x).abs() <= widths * self.half_width
    }
}

/// `t_{0.975, dof}`.
pub fn t_quantile_975(dof: usize) -> f64 {
    StudentsT::new(0.0, 1.0, dof as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(0.975)
}

/// Mean of batch averages and the t-based half-width
/// `t_{0.975, B−1} · sd(batch means) / √B`.
pub fn batch_means(batch_values: &[f64]) -> Result<Estimate> {
    let b = batch_values.len();
    if b < 2 {
        return Err(Error::InvalidInput(format!("batch means needs >= 2 batches, got {b}")));
    }
    let mean = batch_values.iter().sum::<f64>() / b as f64;
    let var = batch_values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (b - 1) as f64;
    let half_width = if var > 0.0 { t_quantile_975(b - 1) * (var / b as f64).sqrt() } else { 0.0 };
    Ok(Estimate { mean, half_width })
}

/// Splits a raw series into `batches` equal batches (trailing remainder dropped).
pub fn batch_means_series(series: &[f64], batches: usize) -> Result<Estimate> {
    if batches < 2 || series.len() < batches {
        return Err(Error::InvalidInput(format!(
            "{} samples cannot form {batches} batches",
            series.len()
        )));
    }
    let len = series.len() / batches;
    let values: Vec<f64> = series
        .chunks_exact(len)
        .take(batches)
        .map(|c| {
            let mut s = CompensatedSum::default();
            c.iter().for_each(|v| s.add(*v));
            s.value() / len as f64
        })
        .collect();
    batch_means(&values)
}

/// Streaming accumulator: one compensated sum per batch.
#[derive(Clone, Debug)]
pub struct BatchAccumulator {
    sums: Vec<CompensatedSum>,
    counts: Vec<u64>,
}

impl BatchAccumulator {
    pub fn new(batches: usize) -> Self {
        Self { sums: vec![CompensatedSum::default(); batches], counts: vec![0; batches] }
    }

    #[inline]
    pub fn add(&mut self, batch: usize, x: f64) {
        self.sums[batch].add(x);
        self.counts[batch] += 1;
    }

    pub fn batch_values(&self) -> Vec<f64> {
        self.sums
            .iter()
            .zip(&self.counts)
            .map(|(s, c)| if *c > 0 { s.value() / *c as f64 } else { 0.0 })
            .collect()
    }

    pub fn total_count(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn estimate(&self) -> Result<Estimate> {
        batch_means(&self.batch_values())
    }
}

/// Ratio estimator `Σ numerator / Σ denominator` over batches (pooled), with
/// a batch-means half-width on the per-batch ratios.
#[derive(Clone, Debug)]
pub struct RatioAccumulator {
    num: Vec<u64>,
    den: Vec<u64>,
}

impl RatioAccumulator {
    pub fn new(batches: usize) -> Self {
        Self { num: vec![0; batches], den: vec![0; batches] }
    }

    #[inline]
    pub fn add(&mut self, batch: usize, hit: bool) {
        self.den[batch] += 1;
        self.num[batch] += u64::from(hit);
    }

    pub fn trials(&self) -> u64 {
        self.den.iter().sum()
    }

    pub fn estimate(&self) -> Estimate {
        let trials = self.trials();
        if trials == 0 {
            return Estimate::new(f64::NAN, f64::NAN);
        }
        let mean = self.num.iter().sum::<u64>() as f64 / trials as f64;
        let ratios: Vec<f64> = self
            .num
            .iter()
            .zip(&self.den)
            .filter(|(_, d)| **d > 0)
            .map(|(n, d)| *n as f64 / *d as f64)
            .collect();
        let hw = batch_means(&ratios).map(|e| e.half_width).unwrap_or(f64::NAN);
        Estimate::new(mean, hw)
    }
}
