use super::record::{DriftEstimates, MomentEstimate, PiHat, SimRecord};
use super::RunConfig;
use crate::error::Result;
use crate::stats::{BatchAccumulator, CompensatedSum, RatioAccumulator};

/// Per-slot observations fed to the collector.
pub(crate) struct SlotProbe<'a> {
    pub q: &'a [i64],
    pub a: &'a [i64],
    pub s: &'a [i64],
    pub u: &'a [i64],
    pub qw: f64,
    /// `⟨q, c_ℓ⟩` for each tight facet.
    pub qc: &'a [f64],
    /// `T1, T2, T3, T4` for this slot.
    pub drift: [f64; 4],
    pub perp_k: f64,
    pub perp_h: f64,
}

pub(crate) struct Collector {
    batch_len: u64,
    orders: Vec<u32>,
    qw: BatchAccumulator,
    qc: Vec<BatchAccumulator>,
    sum_q: BatchAccumulator,
    mean_q: Vec<CompensatedSum>,
    drift: [BatchAccumulator; 4],
    gap: BatchAccumulator,
    perp_k: Vec<BatchAccumulator>,
    perp_h: Vec<BatchAccumulator>,
    flow: Vec<BatchAccumulator>,
    pi: Vec<(usize, usize, RatioAccumulator)>,
    head: (CompensatedSum, u64),
    tail: (CompensatedSum, u64),
    decile: u64,
    horizon: u64,
    count: u64,
}

impl Collector {
    pub fn new(cfg: &RunConfig, n: usize, facets: usize, pi_pairs: Vec<(usize, usize)>) -> Self {
        let b = cfg.batches;
        let acc = || BatchAccumulator::new(b);
        let horizon = cfg.batch_len() * b as u64;
        Self {
            batch_len: cfg.batch_len(),
            orders: cfg.moment_orders.clone(),
            qw: acc(),
            qc: (0..facets).map(|_| acc()).collect(),
            sum_q: acc(),
            mean_q: vec![CompensatedSum::default(); n],
            drift: [acc(), acc(), acc(), acc()],
            gap: acc(),
            perp_k: cfg.moment_orders.iter().map(|_| acc()).collect(),
            perp_h: cfg.moment_orders.iter().map(|_| acc()).collect(),
            flow: (0..n).map(|_| acc()).collect(),
            pi: pi_pairs.into_iter().map(|(m, l)| (m, l, RatioAccumulator::new(b))).collect(),
            head: (CompensatedSum::default(), 0),
            tail: (CompensatedSum::default(), 0),
            decile: (horizon / 10).max(1),
            horizon,
            count: 0,
        }
    }

    pub fn slots(&self) -> u64 {
        self.horizon
    }

    #[inline]
    pub fn record(&mut self, p: &SlotProbe<'_>, pi_hits: impl Fn(usize, usize) -> Option<bool>) {
        let batch = (self.count / self.batch_len) as usize;
        self.qw.add(batch, p.qw);
        for (acc, v) in self.qc.iter_mut().zip(p.qc) {
            acc.add(batch, *v);
        }
        let total: i64 = p.q.iter().sum();
        self.sum_q.add(batch, total as f64);
        for (acc, v) in self.mean_q.iter_mut().zip(p.q) {
            acc.add(*v as f64);
        }
        for (acc, v) in self.drift.iter_mut().zip(p.drift) {
            acc.add(batch, v);
        }
        let [t1, t2, t3, t4] = p.drift;
        self.gap.add(batch, t1 - (t2 - t3 + t4));
        for (i, r) in self.orders.iter().enumerate() {
            self.perp_k[i].add(batch, p.perp_k.powi(*r as i32));
            self.perp_h[i].add(batch, p.perp_h.powi(*r as i32));
        }
        for i in 0..p.q.len() {
            self.flow[i].add(batch, (p.a[i] - (p.s[i] - p.u[i])) as f64);
        }
        for (m, l, acc) in &mut self.pi {
            if let Some(hit) = pi_hits(*m, *l) {
                acc.add(batch, hit);
            }
        }
        if self.count < self.decile {
            self.head.0.add(total as f64);
            self.head.1 += 1;
        }
        if self.count >= self.horizon - self.decile {
            self.tail.0.add(total as f64);
            self.tail.1 += 1;
        }
        self.count += 1;
    }

    pub fn finish(self, burn_in: u64) -> Result<SimRecord> {
        let n_slots = self.count.max(1) as f64;
        let t = self
            .drift
            .iter()
            .map(BatchAccumulator::estimate)
            .collect::<Result<Vec<_>>>()?;
        let combined = t.iter().map(|e| e.half_width * e.half_width).sum::<f64>().sqrt();
        let moments = |accs: &[BatchAccumulator]| -> Result<Vec<MomentEstimate>> {
            self.orders
                .iter()
                .zip(accs)
                .map(|(r, a)| Ok(MomentEstimate { order: *r, estimate: a.estimate()? }))
                .collect()
        };
        let head = self.head.0.value() / self.head.1.max(1) as f64;
        let tail = self.tail.0.value() / self.tail.1.max(1) as f64;
        let mut warnings = Vec::new();
        if tail > 10.0 * head && tail > 1.0 {
            warnings.push(format!(
                "diverging run: last-decile mean total queue {tail:.3} vs first-decile {head:.3}"
            ));
        }
        Ok(SimRecord {
            slots_used: self.count,
            burn_in,
            mean_qw: self.qw.estimate()?,
            mean_qc: self.qc.iter().map(BatchAccumulator::estimate).collect::<Result<Vec<_>>>()?,
            mean_sum_q: self.sum_q.estimate()?,
            mean_q: self.mean_q.iter().map(|s| s.value() / n_slots).collect(),
            drift: DriftEstimates {
                t1: t[0],
                t2: t[1],
                t3: t[2],
                t4: t[3],
                gap: self.gap.estimate()?,
                combined_half_width: combined,
            },
            perp_k: moments(&self.perp_k)?,
            perp_h: moments(&self.perp_h)?,
            pi_hat: self
                .pi
                .iter()
                .map(|(m, l, acc)| PiHat {
                    state: *m,
                    facet: *l,
                    estimate: acc.estimate(),
                    slots: acc.trials(),
                })
                .collect(),
            flow_balance: self
                .flow
                .iter()
                .map(BatchAccumulator::estimate)
                .collect::<Result<Vec<_>>>()?,
            warnings,
        })
    }
}
