//! Adaptive sample size, uniform index sampling and hypothesis budgets.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Generator used for every random draw in the crate.
pub type SeededRng = rand_chacha::ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    use rand::SeedableRng;
    SeededRng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerParams {
    /// Steepness of the logistic curve.
    pub omega: f64,
    /// Inflection point of the logistic curve.
    pub mu: f64,
    pub q_min: usize,
    pub q_max: usize,
    /// Confidence of drawing at least one outlier-free sample.
    pub nu: f64,
    pub budget_cap: u64,
}

impl SamplerParams {
    pub const DEFAULT_BUDGET_CAP: u64 = 1_000_000;

    /// Defaults for a given minimal sample size: `omega = 20`, `mu = 0.75`,
    /// `q_max = 4 q_min`, `nu = 0.99`.
    pub fn for_minimal(q_min: usize) -> Self {
        Self {
            omega: 20.0,
            mu: 0.75,
            q_min,
            q_max: 4 * q_min,
            nu: 0.99,
            budget_cap: Self::DEFAULT_BUDGET_CAP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return bad(format!("omega must be positive, got {}", self.omega));
        }
        if !(self.mu > 0.0 && self.mu < 1.0) {
            return bad(format!("mu must lie in (0, 1), got {}", self.mu));
        }
        if self.q_min == 0 || self.q_min > self.q_max {
            return bad(format!("need 1 <= q_min <= q_max, got {} and {}", self.q_min, self.q_max));
        }
        if !(self.nu > 0.0 && self.nu < 1.0) {
            return bad(format!("nu must lie in (0, 1), got {}", self.nu));
        }
        if self.budget_cap == 0 {
            return bad("budget cap must be positive".into());
        }
        Ok(())
    }

    pub fn lambda(&self, eps: f64) -> f64 {
        logistic(eps, self.omega, self.mu)
    }

    /// Interpolates between `q_min` and `q_max` by the logistic weight,
    /// rounds half up and clamps to `[q_min, min(q_max, subset_size)]`.
    pub fn sample_size(&self, eps: f64, subset_size: usize) -> usize {
        let lam = self.lambda(eps.clamp(0.0, 1.0));
        let q = (1.0 - lam) * self.q_min as f64 + lam * self.q_max as f64;
        let q = (q + 0.5).floor() as usize;
        let upper = self.q_max.min(subset_size).max(self.q_min);
        q.clamp(self.q_min, upper)
    }

    /// Hypotheses to draw from one subset given its observed inlier ratio,
    /// assuming minimal samples.
    pub fn hypothesis_budget(&self, eps_observed: f64) -> u64 {
        max_hypotheses(eps_observed.clamp(0.0, 1.0).powi(self.q_min as i32), self.nu, self.budget_cap)
    }
}

/// Number of distinct `q`-subsets of `len` items, saturating at `u64::MAX`.
pub fn distinct_samples(len: usize, q: usize) -> u64 {
    if q > len {
        return 0;
    }
    let k = q.min(len - q) as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (len as u128 - i) / (i + 1);
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// `1 / (1 + exp(-omega (eps - mu)))`.
pub fn logistic(eps: f64, omega: f64, mu: f64) -> f64 {
    1.0 / (1.0 + (-omega * (eps - mu)).exp())
}

/// `ceil(log(1 - nu) / log(1 - p))` capped at `cap`, where `p` is the
/// probability that one sample is outlier-free. `p = 0` (or a value small
/// enough that the ratio overflows) returns `cap`; `p = 1` returns 1.
pub fn max_hypotheses(p: f64, nu: f64, cap: u64) -> u64 {
    if !(p > 0.0) {
        return cap;
    }
    if p >= 1.0 {
        return 1;
    }
    let denom = (-p).ln_1p();
    if denom >= 0.0 {
        return cap;
    }
    let m = ((1.0 - nu).ln() / denom).ceil();
    if !m.is_finite() || m >= cap as f64 {
        cap
    } else {
        (m as u64).max(1)
    }
}

/// `q` distinct indices in `0..subset_len`, uniform without replacement.
pub fn draw_sample<R: Rng + ?Sized>(rng: &mut R, subset_len: usize, q: usize) -> Vec<usize> {
    assert!(q <= subset_len, "sample of {q} from a subset of {subset_len}");
    rand::seq::index::sample(rng, subset_len, q).into_vec()
}
