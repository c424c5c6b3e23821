//! Monte-Carlo benchmark over synthetic problems.
//!
//! Trial `i` generates one problem from `seed + i` and runs every requested
//! estimator on it, so estimators are compared on paired problems. Rows are
//! ordered by trial then estimator whether trials ran in parallel or not.
//! Wall times are kept out of the trial CSV so that it is byte-reproducible;
//! they go to a separate timings file and into the summary.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{prosac_estimate, ransac_estimate, BaselineConfig};
use crate::error::{Error, Result};
use crate::estimator::{ansac_estimate, AnsacConfig, EstimationReport};
use crate::synthdata::{generate, SynthProblem, SynthSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorName {
    Ansac,
    Ransac,
    Prosac,
}

impl EstimatorName {
    pub const ALL: [EstimatorName; 3] = [EstimatorName::Ansac, EstimatorName::Ransac, EstimatorName::Prosac];

    pub const fn name(self) -> &'static str {
        match self {
            EstimatorName::Ansac => "ansac",
            EstimatorName::Ransac => "ransac",
            EstimatorName::Prosac => "prosac",
        }
    }

    /// Parses a comma-separated list such as `ansac,ransac`.
    pub fn parse_list(s: &str) -> Result<Vec<Self>> {
        let list = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<_>>>()?;
        if list.is_empty() {
            return Err(Error::InvalidConfig("no estimators given".into()));
        }
        Ok(list)
    }
}

impl std::fmt::Display for EstimatorName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for EstimatorName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ansac" => Ok(EstimatorName::Ansac),
            "ransac" => Ok(EstimatorName::Ransac),
            "prosac" => Ok(EstimatorName::Prosac),
            other => Err(Error::InvalidConfig(format!(
                "unknown estimator '{other}' (valid: ansac, ransac, prosac)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    /// Problem template; the seed of trial `i` is `problem.seed + i`.
    pub problem: SynthSpec,
    pub trials: usize,
    pub estimators: Vec<EstimatorName>,
    pub ansac: AnsacConfig,
    pub baseline: BaselineConfig,
    /// A trial succeeds when its model error is below this many pixels.
    pub success_threshold: f64,
    /// Convergence is reported as the fraction `target_fraction * planted
    /// inlier ratio` of the best inlier ratio.
    pub target_fraction: f64,
    pub grid: Vec<usize>,
    pub parallel: bool,
}

impl BenchConfig {
    pub fn new(problem: SynthSpec, trials: usize, estimators: Vec<EstimatorName>) -> Self {
        let ansac = AnsacConfig::default();
        Self {
            problem,
            trials,
            estimators,
            success_threshold: 2.0 * ansac.residual.inlier_threshold,
            ansac,
            baseline: BaselineConfig::default(),
            target_fraction: 0.9,
            grid: default_grid(1000),
            parallel: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.estimators.is_empty() {
            return Err(Error::InvalidConfig("no estimators given".into()));
        }
        if !(self.success_threshold > 0.0) {
            return Err(Error::InvalidConfig("success threshold must be positive".into()));
        }
        self.problem.validate()?;
        self.ansac.validate(self.problem.kind.minimal_sample_size())?;
        self.baseline.validate()
    }
}

/// `1, 2, 3, ...` growing geometrically by about 25% up to `max`.
pub fn default_grid(max: usize) -> Vec<usize> {
    let mut grid = Vec::new();
    let mut g = 1.0f64;
    while (g.round() as usize) <= max {
        let v = g.round() as usize;
        if grid.last() != Some(&v) {
            grid.push(v);
        }
        g = (g * 1.25).max(g + 1.0);
    }
    grid
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialResult {
    pub estimator: EstimatorName,
    pub trial: usize,
    pub seed: u64,
    pub n: usize,
    pub planted_inlier_ratio: f64,
    pub inlier_ratio: f64,
    pub inlier_count: usize,
    pub iterations: usize,
    pub iterations_to_target: Option<usize>,
    pub termination: String,
    pub model_error: Option<f64>,
    pub success: bool,
    #[serde(skip)]
    pub wall_time_s: f64,
    #[serde(skip)]
    pub epsilon_history: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceCurve {
    pub iterations: Vec<usize>,
    pub mean_inlier_ratio: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimatorSummary {
    pub estimator: EstimatorName,
    pub trials: usize,
    pub median_iterations: f64,
    /// Censored trials (target never reached) count as infinitely slow.
    pub median_iterations_to_target: Option<f64>,
    pub median_wall_time_s: f64,
    pub median_model_error: Option<f64>,
    pub mean_inlier_ratio: f64,
    pub success_threshold: f64,
    pub success_rate: f64,
    pub convergence: ConvergenceCurve,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchSummary {
    pub problem: SynthSpec,
    pub trials: usize,
    pub target_fraction: f64,
    pub estimators: Vec<EstimatorSummary>,
}

#[derive(Debug, Clone)]
pub struct BenchOutcome {
    pub rows: Vec<TrialResult>,
    pub summary: BenchSummary,
}

pub fn run_bench(cfg: &BenchConfig) -> Result<BenchOutcome> {
    cfg.validate()?;
    let per_trial: Vec<Result<Vec<TrialResult>>> = if cfg.parallel {
        (0..cfg.trials).into_par_iter().map(|t| run_trial(cfg, t)).collect()
    } else {
        (0..cfg.trials).map(|t| run_trial(cfg, t)).collect()
    };
    let mut rows = Vec::with_capacity(cfg.trials * cfg.estimators.len());
    for trial in per_trial {
        rows.extend(trial?);
    }
    let summary = summarize(cfg, &rows);
    Ok(BenchOutcome { rows, summary })
}

/// Generates problem `trial` and runs every configured estimator on it.
pub fn run_trial(cfg: &BenchConfig, trial: usize) -> Result<Vec<TrialResult>> {
    let seed = cfg.problem.seed.wrapping_add(trial as u64);
    let problem = generate(&SynthSpec { seed, ..cfg.problem })?;
    // decorrelate the estimator stream from the generator stream
    let run_seed = seed ^ 0x9e37_79b9_7f4a_7c15;
    cfg.estimators
        .iter()
        .map(|&est| {
            let outcome = run_estimator(est, &problem, cfg, run_seed);
            Ok(trial_row(est, trial, seed, &problem, cfg, outcome))
        })
        .collect()
}

pub fn run_estimator(
    est: EstimatorName,
    problem: &SynthProblem,
    cfg: &BenchConfig,
    seed: u64,
) -> Result<EstimationReport> {
    let kind = cfg.problem.kind;
    let quality = SynthProblem::QUALITY_KIND;
    match est {
        EstimatorName::Ansac => ansac_estimate(&problem.corrs, kind, quality, &AnsacConfig { seed, ..cfg.ansac }),
        EstimatorName::Ransac => ransac_estimate(&problem.corrs, kind, &BaselineConfig { seed, ..cfg.baseline }),
        EstimatorName::Prosac => {
            prosac_estimate(&problem.corrs, kind, quality, &BaselineConfig { seed, ..cfg.baseline })
        }
    }
}

fn trial_row(
    estimator: EstimatorName,
    trial: usize,
    seed: u64,
    problem: &SynthProblem,
    cfg: &BenchConfig,
    outcome: Result<EstimationReport>,
) -> TrialResult {
    let planted = problem.inlier_count() as f64 / problem.corrs.len() as f64;
    let mut row = TrialResult {
        estimator,
        trial,
        seed,
        n: problem.corrs.len(),
        planted_inlier_ratio: planted,
        inlier_ratio: 0.0,
        inlier_count: 0,
        iterations: 0,
        iterations_to_target: None,
        termination: "no_model".into(),
        model_error: None,
        success: false,
        wall_time_s: 0.0,
        epsilon_history: Vec::new(),
    };
    if let Ok(report) = outcome {
        let error = problem.model_error(&report.best_model);
        row.inlier_ratio = report.best_inlier_ratio;
        row.inlier_count = report.inlier_count;
        row.iterations = report.iterations_executed;
        row.iterations_to_target = report.iterations_to_reach(cfg.target_fraction * planted);
        row.termination = report.termination.to_string();
        row.model_error = Some(error);
        row.success = error < cfg.success_threshold;
        row.wall_time_s = report.wall_time.as_secs_f64();
        row.epsilon_history = report.epsilon_history;
    }
    row
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let k = values.len();
    Some(if k % 2 == 1 { values[k / 2] } else { 0.5 * (values[k / 2 - 1] + values[k / 2]) })
}

/// Best inlier ratio at each grid iteration, carrying the last value
/// forward past the end of the run.
pub fn resample_history(history: &[f64], grid: &[usize]) -> Vec<f64> {
    grid.iter()
        .map(|&g| match history.len() {
            0 => 0.0,
            len => history[g.clamp(1, len) - 1],
        })
        .collect()
}

pub fn summarize(cfg: &BenchConfig, rows: &[TrialResult]) -> BenchSummary {
    let estimators = cfg
        .estimators
        .iter()
        .map(|&est| {
            let mine: Vec<&TrialResult> = rows.iter().filter(|r| r.estimator == est).collect();
            let k = mine.len().max(1) as f64;
            let mut iters: Vec<f64> = mine.iter().map(|r| r.iterations as f64).collect();
            let mut to_target: Vec<f64> = mine
                .iter()
                .map(|r| r.iterations_to_target.map_or(f64::INFINITY, |v| v as f64))
                .collect();
            let mut times: Vec<f64> = mine.iter().map(|r| r.wall_time_s).collect();
            let mut errors: Vec<f64> = mine.iter().filter_map(|r| r.model_error).collect();
            let mut curve = vec![0.0; cfg.grid.len()];
            for r in &mine {
                for (acc, v) in curve.iter_mut().zip(resample_history(&r.epsilon_history, &cfg.grid)) {
                    *acc += v / k;
                }
            }
            EstimatorSummary {
                estimator: est,
                trials: mine.len(),
                median_iterations: median(&mut iters).unwrap_or(0.0),
                median_iterations_to_target: median(&mut to_target).filter(|v| v.is_finite()),
                median_wall_time_s: median(&mut times).unwrap_or(0.0),
                median_model_error: median(&mut errors),
                mean_inlier_ratio: mine.iter().map(|r| r.inlier_ratio).sum::<f64>() / k,
                success_threshold: cfg.success_threshold,
                success_rate: mine.iter().filter(|r| r.success).count() as f64 / k,
                convergence: ConvergenceCurve { iterations: cfg.grid.clone(), mean_inlier_ratio: curve },
            }
        })
        .collect();
    BenchSummary {
        problem: cfg.problem,
        trials: cfg.trials,
        target_fraction: cfg.target_fraction,
        estimators,
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io { path: "<csv>".into(), message: e.to_string() }
}

pub fn write_trials_csv<W: Write>(writer: W, rows: &[TrialResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Io { path: "<csv>".into(), message: e.to_string() })
}

pub fn write_timings_csv<W: Write>(writer: W, rows: &[TrialResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["estimator", "trial", "wall_time_s"]).map_err(csv_err)?;
    for row in rows {
        w.write_record([row.estimator.name().to_string(), row.trial.to_string(), row.wall_time_s.to_string()])
            .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Io { path: "<csv>".into(), message: e.to_string() })
}
