use serde::Serialize;

/// Queue lengths at the start of a slot.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SystemState {
    pub q: Vec<i64>,
    pub slot: u64,
}

impl SystemState {
    pub fn empty(n: usize) -> Self {
        Self { q: vec![0; n], slot: 0 }
    }
}

/// Everything that happened in one slot.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepOutcome {
    pub a: Vec<i64>,
    pub m: usize,
    pub s: Vec<i64>,
    pub u: Vec<i64>,
    pub q_next: Vec<i64>,
}

impl StepOutcome {
    /// Checks the queue recursion, complementary slackness `q⁺·u = 0`, and `0 ≤ u ≤ s`.
    pub fn is_consistent(&self, q: &[i64]) -> bool {
        (0..q.len()).all(|i| {
            self.q_next[i] == q[i] + self.a[i] - self.s[i] + self.u[i]
                && self.q_next[i] * self.u[i] == 0
                && 0 <= self.u[i]
                && self.u[i] <= self.s[i]
                && self.q_next[i] >= 0
        })
    }
}

/// One application of `q⁺ = max(q + a − s, 0)`, returning `(q⁺, u)`.
pub fn step(q: &[i64], a: &[i64], s: &[i64]) -> (Vec<i64>, Vec<i64>) {
    let mut next = q.to_vec();
    let mut u = vec![0; q.len()];
    step_in_place(&mut next, a, s, &mut u);
    (next, u)
}

/// In-place variant used by the simulator. `q` becomes `q⁺`, `u` receives the unused service.
#[inline]
pub fn step_in_place(q: &mut [i64], a: &[i64], s: &[i64], u: &mut [i64]) {
    assert!(
        q.len() == a.len() && q.len() == s.len() && q.len() == u.len(),
        "dimension mismatch in queue update"
    );
    for i in 0..q.len() {
        let raw = q[i] + a[i] - s[i];
        if raw >= 0 {
            q[i] = raw;
            u[i] = 0;
        } else {
            q[i] = 0;
            u[i] = -raw;
        }
    }
}
