use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ansac_core::bench::{run_bench, write_timings_csv, write_trials_csv, BenchConfig, EstimatorName};
use ansac_core::io::{parse_correspondences, write_correspondences, ModelJson, ReportJson};
use ansac_core::{
    ansac_estimate, prosac_estimate, ransac_estimate, AnsacConfig, BaselineConfig, Error, ModelKind, QualityMap,
    ResidualConfig, Result, SynthSpec,
};

#[derive(Parser)]
#[command(name = "ansac", version, about = "Adaptive non-minimal robust estimation of two-view models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate a model from a correspondence CSV and print a JSON report.
    Estimate(EstimateArgs),
    /// Run paired Monte-Carlo trials on synthetic problems.
    Bench(BenchArgs),
    /// Write a synthetic correspondence file.
    Synth(SynthArgs),
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "homography")]
    model: String,
    #[arg(long, default_value = "ansac")]
    estimator: String,
    /// How the quality column is read: ratio, radius or precomputed.
    #[arg(long, default_value = "ratio")]
    quality: String,
    #[command(flatten)]
    tuning: Tuning,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value = "homography")]
    model: String,
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 0.8)]
    inlier_ratio: f64,
    #[arg(long, default_value_t = 0.5)]
    noise: f64,
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value = "ansac,ransac,prosac")]
    estimators: String,
    #[arg(long)]
    out: PathBuf,
    /// Model error (px) below which a trial counts as a success. Defaults
    /// to twice the inlier threshold.
    #[arg(long)]
    success_threshold: Option<f64>,
    /// Run trials one after another instead of in parallel.
    #[arg(long)]
    serial: bool,
    #[command(flatten)]
    tuning: Tuning,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value = "homography")]
    model: String,
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 0.8)]
    inlier_ratio: f64,
    #[arg(long, default_value_t = 0.5)]
    noise: f64,
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Correspondence CSV to write.
    #[arg(long)]
    out: PathBuf,
    /// Optional JSON file receiving the planted model and inlier mask.
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args)]
struct Tuning {
    /// Inlier threshold in pixels.
    #[arg(long, default_value_t = 2.0)]
    threshold: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.01)]
    tau: f64,
    #[arg(long, default_value_t = 0.001)]
    gamma: f64,
    #[arg(long, default_value_t = 20.0)]
    omega: f64,
    #[arg(long, default_value_t = 0.75)]
    mu: f64,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 0.1)]
    sigma_p: f64,
    #[arg(long, default_value_t = 0.1)]
    sigma_u: f64,
    #[arg(long, default_value_t = 4)]
    q_max_factor: usize,
    #[arg(long, default_value_t = 0.99)]
    nu: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iterations: usize,
    /// Disable the flat-history stopping rule.
    #[arg(long)]
    no_early_stop: bool,
}

impl Tuning {
    fn ansac(&self) -> Result<AnsacConfig> {
        let mut cfg = AnsacConfig {
            residual: ResidualConfig::new(self.threshold)?,
            tau: self.tau,
            gamma: self.gamma,
            early_termination: !self.no_early_stop,
            max_iterations: self.max_iterations,
            seed: self.seed,
            ..AnsacConfig::default()
        };
        cfg.filter.alpha = self.alpha;
        cfg.filter.sigma_p = self.sigma_p;
        cfg.filter.sigma_u = self.sigma_u;
        cfg.sampling.omega = self.omega;
        cfg.sampling.mu = self.mu;
        cfg.sampling.q_max_factor = self.q_max_factor;
        cfg.sampling.nu = self.nu;
        Ok(cfg)
    }

    fn baseline(&self) -> Result<BaselineConfig> {
        Ok(BaselineConfig {
            residual: ResidualConfig::new(self.threshold)?,
            nu: self.nu,
            max_iterations: self.max_iterations,
            seed: self.seed,
            ..BaselineConfig::default()
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Estimate(args) => estimate(args),
        Command::Bench(args) => bench(args),
        Command::Synth(args) => synth(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn estimate(args: EstimateArgs) -> Result<()> {
    let kind: ModelKind = args.model.parse()?;
    let estimator: EstimatorName = args.estimator.parse()?;
    let quality = QualityMap::new(args.quality.parse()?);
    let corrs = parse_correspondences(&args.input)?;
    let report = match estimator {
        EstimatorName::Ansac => ansac_estimate(&corrs, kind, quality, &args.tuning.ansac()?)?,
        EstimatorName::Ransac => ransac_estimate(&corrs, kind, &args.tuning.baseline()?)?,
        EstimatorName::Prosac => prosac_estimate(&corrs, kind, quality, &args.tuning.baseline()?)?,
    };
    let json = ReportJson::new(estimator.name(), &report);
    let stdout = io::stdout();
    let mut out = stdout.lock();
    serde_json::to_writer_pretty(&mut out, &json).map_err(|e| io_error("<stdout>", e))?;
    writeln!(out).map_err(|e| io_error("<stdout>", e))
}

fn bench(args: BenchArgs) -> Result<()> {
    let kind: ModelKind = args.model.parse()?;
    let estimators = EstimatorName::parse_list(&args.estimators)?;
    let problem = SynthSpec::new(kind, args.n, args.inlier_ratio)
        .with_noise(args.noise)
        .with_fidelity(args.rho)
        .with_seed(args.tuning.seed);
    let mut cfg = BenchConfig::new(problem, args.trials, estimators);
    cfg.ansac = args.tuning.ansac()?;
    cfg.baseline = args.tuning.baseline()?;
    cfg.success_threshold = args.success_threshold.unwrap_or(2.0 * args.tuning.threshold);
    cfg.parallel = !args.serial;

    let outcome = run_bench(&cfg)?;
    fs::create_dir_all(&args.out).map_err(|e| io_error(&args.out, e))?;
    let trials_path = args.out.join("trials.csv");
    write_trials_csv(create(&trials_path)?, &outcome.rows)?;
    write_timings_csv(create(&args.out.join("timings.csv"))?, &outcome.rows)?;
    let summary_path = args.out.join("summary.json");
    let mut summary = create(&summary_path)?;
    serde_json::to_writer_pretty(&mut summary, &outcome.summary).map_err(|e| io_error(&summary_path, e))?;
    summary.flush().map_err(|e| io_error(&summary_path, e))?;

    for s in &outcome.summary.estimators {
        eprintln!(
            "{:<7} median iterations {:>8.1}  success rate {:.3}  median time {:.2e} s",
            s.estimator.name(),
            s.median_iterations,
            s.success_rate,
            s.median_wall_time_s
        );
    }
    Ok(())
}

fn synth(args: SynthArgs) -> Result<()> {
    let kind: ModelKind = args.model.parse()?;
    let spec = SynthSpec::new(kind, args.n, args.inlier_ratio)
        .with_noise(args.noise)
        .with_fidelity(args.rho)
        .with_seed(args.seed);
    let problem = ansac_core::generate(&spec)?;
    write_correspondences(create(&args.out)?, &problem.corrs)?;
    if let Some(path) = args.truth {
        let truth = serde_json::json!({
            "model": ModelJson { kind, matrix: problem.truth_model.to_row_major() },
            "inlier_mask": problem.truth_mask,
            "spec": spec,
        });
        let mut f = create(&path)?;
        serde_json::to_writer_pretty(&mut f, &truth).map_err(|e| io_error(&path, e))?;
        f.flush().map_err(|e| io_error(&path, e))?;
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    fs::File::create(path).map(BufWriter::new).map_err(|e| io_error(path, e))
}

fn io_error(path: impl AsRef<Path>, e: impl std::fmt::Display) -> Error {
    Error::Io { path: path.as_ref().display().to_string(), message: e.to_string() }
}
