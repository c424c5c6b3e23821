//! The adaptive non-minimal hypothesize-and-verify loop.
//!
//! Each iteration draws a sample from the current ranked prefix, sized by
//! the filtered inlier ratio of that prefix, solves a model and scores it
//! over every correspondence. The estimator moves to the next prefix once
//! it has drawn as many hypotheses as the prefix's observed inlier ratio
//! warrants, and stops on the adaptive iteration bound, on a flat
//! inlier-ratio history, or on the global ceiling.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::{FilterParams, FilterState};
use crate::geometry::{count_inliers, Model, ModelKind, ResidualConfig};
use crate::ranking::{build_ranked_problem, Correspondence, QualityMap, RankedProblem};
use crate::sampler::{distinct_samples, draw_sample, max_hypotheses, seeded_rng, SamplerParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// The inlier-ratio history flattened out.
    EarlyStop,
    /// Reached the adaptive bound derived from the best inlier ratio.
    MaxIterationsL,
    /// Reached the configured iteration ceiling.
    GlobalCeiling,
    /// The only remaining sample is the full set, already evaluated.
    Exhausted,
}

impl Termination {
    pub const fn name(self) -> &'static str {
        match self {
            Termination::EarlyStop => "early_stop",
            Termination::MaxIterationsL => "max_iterations_l",
            Termination::GlobalCeiling => "global_ceiling",
            Termination::Exhausted => "exhausted",
        }
    }
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Sampler settings that do not depend on the model kind. The minimal size
/// comes from the model, `q_max = q_max_factor * q_min`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingConfig {
    pub omega: f64,
    pub mu: f64,
    pub q_max_factor: usize,
    pub nu: f64,
    pub budget_cap: u64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            omega: 20.0,
            mu: 0.75,
            q_max_factor: 4,
            nu: 0.99,
            budget_cap: SamplerParams::DEFAULT_BUDGET_CAP,
        }
    }
}

impl SamplingConfig {
    pub fn params_for(&self, q_min: usize) -> SamplerParams {
        SamplerParams {
            omega: self.omega,
            mu: self.mu,
            q_min,
            q_max: q_min * self.q_max_factor.max(1),
            nu: self.nu,
            budget_cap: self.budget_cap,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnsacConfig {
    pub filter: FilterParams,
    pub sampling: SamplingConfig,
    pub residual: ResidualConfig,
    /// Fraction of the adaptive bound used as the termination window.
    pub tau: f64,
    /// Mean inlier-ratio increment below which the loop stops early.
    pub gamma: f64,
    pub early_termination: bool,
    /// Stop once the iteration count reaches the bound implied by the best
    /// inlier ratio. Disable to study convergence up to `max_iterations`.
    pub adaptive_max_iterations: bool,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for AnsacConfig {
    fn default() -> Self {
        Self {
            filter: FilterParams::default(),
            sampling: SamplingConfig::default(),
            residual: ResidualConfig::default(),
            tau: 0.01,
            gamma: 0.001,
            early_termination: true,
            adaptive_max_iterations: true,
            max_iterations: 100_000,
            seed: 0,
        }
    }
}

impl AnsacConfig {
    pub fn validate(&self, q_min: usize) -> Result<()> {
        self.filter.validate()?;
        self.sampling.params_for(q_min).validate()?;
        self.residual.validate()?;
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(Error::InvalidConfig(format!("tau must lie in (0, 1), got {}", self.tau)));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidConfig(format!("gamma must be positive, got {}", self.gamma)));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

/// Filter state when the estimator left a subset (or stopped inside it).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubsetTrace {
    pub subset: usize,
    pub len: usize,
    pub prior: f64,
    pub estimate: f64,
    pub observed: f64,
    pub hypotheses: u64,
}

#[derive(Debug, Clone)]
pub struct EstimationReport {
    pub best_model: Model,
    pub best_inlier_ratio: f64,
    pub inlier_count: usize,
    /// In input order.
    pub inlier_mask: Vec<bool>,
    pub iterations_executed: usize,
    /// Best overall inlier ratio after each iteration.
    pub epsilon_history: Vec<f64>,
    pub termination: Termination,
    pub wall_time: Duration,
    /// Per-subset filter trace; empty for the baselines.
    pub subset_trace: Vec<SubsetTrace>,
}

impl EstimationReport {
    /// First iteration (1-based) at which the best inlier ratio reached
    /// `target`.
    pub fn iterations_to_reach(&self, target: f64) -> Option<usize> {
        self.epsilon_history.iter().position(|&e| e >= target).map(|i| i + 1)
    }
}

/// What the estimator did in one iteration. Sample indices point into the
/// ranked list.
#[derive(Debug, Clone, Copy)]
pub struct IterationEvent<'a> {
    pub iteration: usize,
    pub subset: usize,
    pub subset_len: usize,
    pub epsilon: f64,
    pub sample: &'a [usize],
}

/// `ceil(log(1 - nu) / log(1 - eps^m))`, capped.
pub fn update_max_iterations(eps: f64, m: usize, nu: f64, cap: u64) -> u64 {
    max_hypotheses(eps.clamp(0.0, 1.0).powi(m as i32), nu, cap)
}

/// True when the mean of the last `T = max(1, round(tau L))` increments of
/// the history is below `gamma` and some hypothesis has been accepted.
pub fn check_termination(history: &[f64], max_iterations_l: u64, tau: f64, gamma: f64) -> bool {
    let window = ((tau * max_iterations_l as f64).round() as usize).max(1);
    let Some(&last) = history.last() else {
        return false;
    };
    if history.len() <= window || !(last > 0.0) {
        return false;
    }
    let first = history[history.len() - 1 - window];
    (last - first) / (window as f64) < gamma
}

pub fn ansac_estimate(
    corrs: &[Correspondence],
    kind: ModelKind,
    quality: impl Into<QualityMap>,
    cfg: &AnsacConfig,
) -> Result<EstimationReport> {
    let problem = build_ranked_problem(corrs, quality, kind.minimal_sample_size())?;
    ansac_estimate_ranked(&problem, kind, cfg)
}

pub fn ansac_estimate_ranked(
    problem: &RankedProblem,
    kind: ModelKind,
    cfg: &AnsacConfig,
) -> Result<EstimationReport> {
    ansac_estimate_observed(problem, kind, cfg, |_| {})
}

/// Runs the loop, reporting every drawn sample to `observer`.
pub fn ansac_estimate_observed<F>(
    problem: &RankedProblem,
    kind: ModelKind,
    cfg: &AnsacConfig,
    mut observer: F,
) -> Result<EstimationReport>
where
    F: FnMut(&IterationEvent<'_>),
{
    let start = Instant::now();
    let m = kind.minimal_sample_size();
    if problem.minimal_size() != m {
        return Err(Error::InvalidConfig(format!(
            "ranked problem built for minimal size {}, model needs {m}",
            problem.minimal_size()
        )));
    }
    cfg.validate(m)?;
    let n = problem.len();
    if n < m {
        return Err(Error::NotEnoughCorrespondences { needed: m, got: n });
    }

    let sampler = cfg.sampling.params_for(m);
    let priors = problem.priors();
    let ordered = problem.ordered();
    let last_subset = problem.subset_count() - 1;
    let mut rng = seeded_rng(cfg.seed);

    let mut s = 0usize;
    let mut state = FilterState::new(priors[0], &cfg.filter);
    let mut eps_observed = state.epsilon;
    let mut drawn_in_subset = 0u64;

    let mut best: Option<Model> = None;
    let mut best_count = 0usize;
    let mut best_mask: Vec<bool> = Vec::new();
    // best_prefix[k] = inliers of the best model among the top k
    let mut best_prefix: Vec<usize> = Vec::new();
    let mut bound_l = cfg.sampling.budget_cap;

    let mut history = Vec::new();
    let mut trace = Vec::new();
    let mut termination = Termination::GlobalCeiling;
    let mut sample = Vec::with_capacity(sampler.q_max);

    for iteration in 1..=cfg.max_iterations {
        if cfg.adaptive_max_iterations && best.is_some() && iteration as u64 > bound_l {
            termination = Termination::MaxIterationsL;
            break;
        }
        let subset_len = problem.subset_len(s);
        let q = sampler.sample_size(state.epsilon, subset_len);
        let indices = draw_sample(&mut rng, subset_len, q);
        observer(&IterationEvent { iteration, subset: s, subset_len, epsilon: state.epsilon, sample: &indices });

        sample.clear();
        sample.extend(indices.iter().map(|&i| ordered[i]));
        if let Ok(model) = kind.solve(&sample) {
            let (count, mask) = count_inliers(&model, ordered, &cfg.residual);
            if best.is_none() || count > best_count {
                best_prefix = prefix_counts(&mask);
                eps_observed = best_prefix[subset_len] as f64 / subset_len as f64;
                bound_l = update_max_iterations(count as f64 / n as f64, m, cfg.sampling.nu, cfg.sampling.budget_cap);
                best = Some(model);
                best_count = count;
                best_mask = mask;
            }
        }
        history.push(best_count as f64 / n as f64);
        drawn_in_subset += 1;

        let full_set_drawn = s == last_subset && q == subset_len;
        let mut switched = false;
        let budget = sampler.hypothesis_budget(eps_observed).min(distinct_samples(subset_len, q));
        if drawn_in_subset >= budget && s < last_subset {
            trace.push(SubsetTrace {
                subset: s,
                len: subset_len,
                prior: priors[s],
                estimate: state.epsilon,
                observed: eps_observed,
                hypotheses: drawn_in_subset,
            });
            s += 1;
            drawn_in_subset = 0;
            switched = true;
            // score the best hypothesis on the grown subset
            if best.is_some() {
                let len = problem.subset_len(s);
                eps_observed = best_prefix[len] as f64 / len as f64;
            }
        }
        state = state
            .predict(priors[s], switched, &cfg.filter)
            .update(eps_observed, &cfg.filter);

        if full_set_drawn {
            termination = Termination::Exhausted;
            break;
        }
        if cfg.early_termination && check_termination(&history, bound_l, cfg.tau, cfg.gamma) {
            termination = Termination::EarlyStop;
            break;
        }
    }

    let best_model = best.ok_or(Error::NoModelFound)?;
    trace.push(SubsetTrace {
        subset: s,
        len: problem.subset_len(s),
        prior: priors[s],
        estimate: state.epsilon,
        observed: eps_observed,
        hypotheses: drawn_in_subset,
    });

    Ok(EstimationReport {
        best_model,
        best_inlier_ratio: best_count as f64 / n as f64,
        inlier_count: best_count,
        inlier_mask: problem.to_input_order(&best_mask),
        iterations_executed: history.len(),
        epsilon_history: history,
        termination,
        wall_time: start.elapsed(),
        subset_trace: trace,
    })
}

pub(crate) fn prefix_counts(mask: &[bool]) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.len() + 1);
    out.push(0);
    let mut acc = 0;
    for &m in mask {
        acc += m as usize;
        out.push(acc);
    }
    out
}
