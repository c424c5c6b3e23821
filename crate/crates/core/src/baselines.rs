//! RANSAC and PROSAC reference estimators.
//!
//! Both draw minimal samples, keep the hypothesis with the most inliers and
//! stop at `L = ceil(log(1 - nu) / log(1 - eps^m))` for the best inlier
//! ratio `eps`, or at the iteration ceiling. They produce the same report as
//! the adaptive estimator so benchmark code can treat all three uniformly.

use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{update_max_iterations, EstimationReport, Termination};
use crate::geometry::{count_inliers, Model, ModelKind, ResidualConfig};
use crate::ranking::{build_ranked_problem, Correspondence, QualityMap};
use crate::sampler::{draw_sample, seeded_rng, SamplerParams, SeededRng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineConfig {
    pub residual: ResidualConfig,
    pub nu: f64,
    pub max_iterations: usize,
    pub budget_cap: u64,
    pub seed: u64,
    /// PROSAC's `T_N`: the number of samples after which PROSAC draws
    /// uniformly from the whole set.
    pub prosac_growth_max_samples: u64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            residual: ResidualConfig::default(),
            nu: 0.99,
            max_iterations: 100_000,
            budget_cap: SamplerParams::DEFAULT_BUDGET_CAP,
            seed: 0,
            prosac_growth_max_samples: 200_000,
        }
    }
}

impl BaselineConfig {
    pub fn validate(&self) -> Result<()> {
        self.residual.validate()?;
        if !(self.nu > 0.0 && self.nu < 1.0) {
            return Err(Error::InvalidConfig(format!("nu must lie in (0, 1), got {}", self.nu)));
        }
        if self.max_iterations == 0 || self.budget_cap == 0 {
            return Err(Error::InvalidConfig("iteration limits must be positive".into()));
        }
        if self.prosac_growth_max_samples == 0 {
            return Err(Error::InvalidConfig("PROSAC T_N must be positive".into()));
        }
        Ok(())
    }
}

/// Uniform minimal samples over the whole set.
pub fn ransac_estimate(
    corrs: &[Correspondence],
    kind: ModelKind,
    cfg: &BaselineConfig,
) -> Result<EstimationReport> {
    let m = kind.minimal_sample_size();
    let n = corrs.len();
    let identity: Vec<usize> = (0..n).collect();
    minimal_sample_loop(corrs, &identity, kind, cfg, |rng| draw_sample(rng, n, m))
}

/// Minimal samples from a ranked prefix that grows on PROSAC's schedule.
pub fn prosac_estimate(
    corrs: &[Correspondence],
    kind: ModelKind,
    quality: impl Into<QualityMap>,
    cfg: &BaselineConfig,
) -> Result<EstimationReport> {
    let m = kind.minimal_sample_size();
    let problem = build_ranked_problem(corrs, quality, m)?;
    let mut schedule = ProsacSchedule::new(m, problem.len(), cfg.prosac_growth_max_samples);
    minimal_sample_loop(problem.ordered(), problem.source_index(), kind, cfg, |rng| schedule.next_sample(rng))
}

/// Growth function of PROSAC.
///
/// `T_n` is the expected number of samples drawn only from the top `n`
/// among `T_N` samples; `T'_n` is its integer counterpart. When the sample
/// counter exceeds `T'_n` the prefix grows by one. While the prefix is still
/// growing every sample contains its newest member plus `m - 1` uniformly
/// chosen older ones.
#[derive(Debug, Clone)]
pub struct ProsacSchedule {
    m: usize,
    total: usize,
    n: usize,
    t: u64,
    t_n: f64,
    t_n_prime: u64,
}

impl ProsacSchedule {
    pub fn new(m: usize, total: usize, growth_max_samples: u64) -> Self {
        let mut t_n = growth_max_samples as f64;
        for i in 0..m {
            t_n *= (m - i) as f64 / (total - i) as f64;
        }
        Self { m, total, n: m, t: 0, t_n, t_n_prime: 1 }
    }

    /// Current prefix length.
    pub fn prefix_len(&self) -> usize {
        self.n
    }

    pub fn next_sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Vec<usize> {
        self.t += 1;
        while self.t > self.t_n_prime && self.n < self.total {
            let next = self.t_n * (self.n + 1) as f64 / (self.n + 1 - self.m) as f64;
            self.t_n_prime += (next - self.t_n).ceil().max(0.0) as u64;
            self.t_n = next;
            self.n += 1;
        }
        if self.t_n_prime < self.t {
            draw_sample(rng, self.n, self.m)
        } else {
            let mut s = draw_sample(rng, self.n - 1, self.m - 1);
            s.push(self.n - 1);
            s
        }
    }
}

fn minimal_sample_loop<F>(
    ordered: &[Correspondence],
    source_index: &[usize],
    kind: ModelKind,
    cfg: &BaselineConfig,
    mut next_sample: F,
) -> Result<EstimationReport>
where
    F: FnMut(&mut SeededRng) -> Vec<usize>,
{
    let start = Instant::now();
    cfg.validate()?;
    let m = kind.minimal_sample_size();
    let n = ordered.len();
    if n < m {
        return Err(Error::NotEnoughCorrespondences { needed: m, got: n });
    }
    let mut rng = seeded_rng(cfg.seed);

    let mut best: Option<Model> = None;
    let mut best_count = 0usize;
    let mut best_mask = Vec::new();
    let mut bound_l = cfg.budget_cap;
    let mut history = Vec::new();
    let mut termination = Termination::GlobalCeiling;
    let mut sample = Vec::with_capacity(m);

    for iteration in 1..=cfg.max_iterations {
        if best.is_some() && iteration as u64 > bound_l {
            termination = Termination::MaxIterationsL;
            break;
        }
        let indices = next_sample(&mut rng);
        sample.clear();
        sample.extend(indices.iter().map(|&i| ordered[i]));
        if let Ok(model) = kind.solve(&sample) {
            let (count, mask) = count_inliers(&model, ordered, &cfg.residual);
            if best.is_none() || count > best_count {
                bound_l = update_max_iterations(count as f64 / n as f64, m, cfg.nu, cfg.budget_cap);
                best = Some(model);
                best_count = count;
                best_mask = mask;
            }
        }
        history.push(best_count as f64 / n as f64);
    }

    let best_model = best.ok_or(Error::NoModelFound)?;
    let mut inlier_mask = vec![false; n];
    for (&src, &m) in source_index.iter().zip(&best_mask) {
        inlier_mask[src] = m;
    }
    Ok(EstimationReport {
        best_model,
        best_inlier_ratio: best_count as f64 / n as f64,
        inlier_count: best_count,
        inlier_mask,
        iterations_executed: history.len(),
        epsilon_history: history,
        termination,
        wall_time: start.elapsed(),
        subset_trace: Vec::new(),
    })
}
