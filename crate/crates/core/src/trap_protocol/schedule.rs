use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// p(τ) = 10τ³ − 15τ⁴ + 6τ⁵ and its first two derivatives.
pub fn quintic(tau: f64) -> (f64, f64, f64) {
    let t2 = tau * tau;
    (
        t2 * tau * (10.0 - 15.0 * tau + 6.0 * t2),
        30.0 * t2 * (1.0 - 2.0 * tau + t2),
        60.0 * tau * (1.0 - 3.0 * tau + 2.0 * t2),
    )
}

/// s(t) = s0 + (sf − s0) p(t/tf), clamped to its end values outside [0, tf].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub s0: f64,
    pub sf: f64,
    pub tf: f64,
}

pub fn make_quintic(s0: f64, sf: f64, tf: f64) -> Result<Schedule> {
    if !(tf > 0.0) || !tf.is_finite() {
        return Err(Error::InvalidSchedule(format!("duration tf = {tf} must be positive")));
    }
    if !s0.is_finite() || !sf.is_finite() {
        return Err(Error::InvalidSchedule(format!("non-finite end points {s0}, {sf}")));
    }
    Ok(Schedule { s0, sf, tf })
}

impl Schedule {
    pub fn constant(s: f64, tf: f64) -> Result<Self> {
        make_quintic(s, s, tf)
    }

    fn eval(&self, t: f64) -> (f64, f64, f64) {
        let tau = (t / self.tf).clamp(0.0, 1.0);
        let (p, dp, ddp) = quintic(tau);
        let d = self.sf - self.s0;
        (self.s0 + d * p, d * dp / self.tf, d * ddp / (self.tf * self.tf))
    }

    pub fn value(&self, t: f64) -> f64 {
        self.eval(t).0
    }

    pub fn d1(&self, t: f64) -> f64 {
        self.eval(t).1
    }

    pub fn d2(&self, t: f64) -> f64 {
        self.eval(t).2
    }

    /// (s, ṡ, s̈) at once.
    pub fn jet(&self, t: f64) -> (f64, f64, f64) {
        self.eval(t)
    }

    /// Smallest value over [0, tf]; p is monotone, so it sits at an end.
    pub fn min(&self) -> f64 {
        self.s0.min(self.sf)
    }
}

/// Uniform grid of `n` points on [0, tf] (n ≥ 2).
pub fn time_grid(tf: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|k| tf * k as f64 / (n - 1) as f64).collect()
}
