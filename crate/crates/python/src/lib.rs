//! Python bindings: estimate models from correspondence rows, generate
//! synthetic problems, and call the minimal solvers directly.
//!
//! Correspondences cross the boundary as rows `(x1, y1, x2, y2, quality)`,
//! either a list of sequences or an `(n, 5)` NumPy array. Models cross as
//! nine row-major floats.

use ansac_core::bench::EstimatorName;
use ansac_core::{
    ansac_estimate, generate, prosac_estimate, ransac_estimate, AnsacConfig, BaselineConfig, Correspondence,
    EstimationReport, Model, ModelKind, Point2, QualityKind, QualityMap, ResidualConfig, SynthSpec,
};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

type Row = (f64, f64, f64, f64, f64);

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_correspondences(rows: &[Vec<f64>]) -> Result<Vec<Correspondence>, String> {
    rows.iter()
        .enumerate()
        .map(|(i, r)| match r.as_slice() {
            [x1, y1, x2, y2, q] if r.iter().all(|v| v.is_finite()) => {
                Ok(Correspondence::new(Point2::new(*x1, *y1), Point2::new(*x2, *y2), *q))
            }
            [_, _, _, _, _] => Err(format!("row {i}: values must be finite")),
            _ => Err(format!("row {i}: expected 5 values (x1, y1, x2, y2, quality), got {}", r.len())),
        })
        .collect()
}

fn to_row(c: &Correspondence) -> Row {
    (c.p1.x, c.p1.y, c.p2.x, c.p2.y, c.quality)
}

fn to_model(kind: &str, matrix: &[f64]) -> Result<Model, String> {
    let kind: ModelKind = kind.parse().map_err(|e: ansac_core::Error| e.to_string())?;
    let entries: &[f64; 9] = matrix.try_into().map_err(|_| format!("expected 9 matrix entries, got {}", matrix.len()))?;
    Model::from_row_slice(kind, entries).map_err(|e| e.to_string())
}

/// Result of one robust estimation.
#[pyclass(frozen, get_all, skip_from_py_object, module = "ansac")]
#[derive(Debug, Clone)]
pub struct Report {
    pub estimator: String,
    pub model_kind: String,
    /// Row-major 3x3 matrix, Frobenius-normalized.
    pub model: Vec<f64>,
    pub inlier_ratio: f64,
    pub inlier_count: usize,
    pub inlier_mask: Vec<bool>,
    pub iterations: usize,
    pub history: Vec<f64>,
    pub termination: String,
    pub wall_time_s: f64,
}

impl Report {
    fn new(estimator: EstimatorName, r: EstimationReport) -> Self {
        Self {
            estimator: estimator.name().to_string(),
            model_kind: r.best_model.kind().name().to_string(),
            model: r.best_model.to_row_major().to_vec(),
            inlier_ratio: r.best_inlier_ratio,
            inlier_count: r.inlier_count,
            inlier_mask: r.inlier_mask,
            iterations: r.iterations_executed,
            history: r.epsilon_history,
            termination: r.termination.to_string(),
            wall_time_s: r.wall_time.as_secs_f64(),
        }
    }
}

#[pymethods]
impl Report {
    fn __repr__(&self) -> String {
        format!(
            "Report(estimator='{}', model_kind='{}', inlier_ratio={:.4}, iterations={}, termination='{}')",
            self.estimator, self.model_kind, self.inlier_ratio, self.iterations, self.termination
        )
    }
}

/// A generated problem with its ground truth.
#[pyclass(frozen, get_all, skip_from_py_object, module = "ansac")]
#[derive(Debug, Clone)]
pub struct SyntheticProblem {
    pub model_kind: String,
    pub correspondences: Vec<Row>,
    pub truth_model: Vec<f64>,
    pub truth_mask: Vec<bool>,
    clean: Vec<Row>,
}

#[pymethods]
impl SyntheticProblem {
    /// Largest residual of `model` over the noise-free true inliers.
    fn model_error(&self, model: Vec<f64>) -> PyResult<f64> {
        let model = to_model(&self.model_kind, &model).map_err(value_error)?;
        let clean = to_correspondences(&self.clean.iter().map(|r| vec![r.0, r.1, r.2, r.3, r.4]).collect::<Vec<_>>())
            .map_err(value_error)?;
        Ok(clean
            .iter()
            .zip(&self.truth_mask)
            .filter(|(_, &inlier)| inlier)
            .map(|(c, _)| model.residual(c))
            .fold(0.0, f64::max))
    }

    fn __len__(&self) -> usize {
        self.correspondences.len()
    }

    fn __repr__(&self) -> String {
        let inliers = self.truth_mask.iter().filter(|&&m| m).count();
        format!("SyntheticProblem(model_kind='{}', n={}, inliers={inliers})", self.model_kind, self.correspondences.len())
    }
}

#[allow(clippy::too_many_arguments)]
fn run_estimate(
    rows: &[Vec<f64>],
    model: &str,
    estimator: &str,
    quality: &str,
    threshold: f64,
    seed: u64,
    early_stop: bool,
    max_iterations: usize,
) -> Result<Report, String> {
    let kind: ModelKind = model.parse().map_err(|e: ansac_core::Error| e.to_string())?;
    let estimator: EstimatorName = estimator.parse().map_err(|e: ansac_core::Error| e.to_string())?;
    let quality: QualityKind = quality.parse().map_err(|e: ansac_core::Error| e.to_string())?;
    let residual = ResidualConfig::new(threshold).map_err(|e| e.to_string())?;
    let corrs = to_correspondences(rows)?;
    let report = match estimator {
        EstimatorName::Ansac => {
            let cfg = AnsacConfig { residual, seed, early_termination: early_stop, max_iterations, ..AnsacConfig::default() };
            ansac_estimate(&corrs, kind, QualityMap::new(quality), &cfg)
        }
        EstimatorName::Ransac | EstimatorName::Prosac => {
            let cfg = BaselineConfig { residual, seed, max_iterations, ..BaselineConfig::default() };
            if estimator == EstimatorName::Ransac {
                ransac_estimate(&corrs, kind, &cfg)
            } else {
                prosac_estimate(&corrs, kind, QualityMap::new(quality), &cfg)
            }
        }
    }
    .map_err(|e| e.to_string())?;
    Ok(Report::new(estimator, report))
}

/// Robustly fit a homography or fundamental matrix.
///
/// `quality` says how the fifth column is read: "ratio" and "radius" are
/// Lowe scores (lower is better), "precomputed" is a probability in [0, 1].
/// `early_stop` applies to ANSAC only.
#[pyfunction]
#[pyo3(signature = (correspondences, model="homography", estimator="ansac", quality="ratio", threshold=2.0, seed=0, early_stop=true, max_iterations=100_000))]
#[allow(clippy::too_many_arguments)]
fn estimate(
    py: Python<'_>,
    correspondences: Vec<Vec<f64>>,
    model: &str,
    estimator: &str,
    quality: &str,
    threshold: f64,
    seed: u64,
    early_stop: bool,
    max_iterations: usize,
) -> PyResult<Report> {
    py.detach(|| run_estimate(&correspondences, model, estimator, quality, threshold, seed, early_stop, max_iterations))
        .map_err(value_error)
}

fn run_generate(model: &str, n: usize, inlier_ratio: f64, noise: f64, rho: f64, seed: u64) -> Result<SyntheticProblem, String> {
    let kind: ModelKind = model.parse().map_err(|e: ansac_core::Error| e.to_string())?;
    let spec = SynthSpec::new(kind, n, inlier_ratio).with_noise(noise).with_fidelity(rho).with_seed(seed);
    let p = generate(&spec).map_err(|e| e.to_string())?;
    Ok(SyntheticProblem {
        model_kind: kind.name().to_string(),
        correspondences: p.corrs.iter().map(to_row).collect(),
        truth_model: p.truth_model.to_row_major().to_vec(),
        truth_mask: p.truth_mask,
        clean: p.clean.iter().map(to_row).collect(),
    })
}

/// Generate a planted problem. Qualities are Lowe ratios; `rho` in [0, 1]
/// controls how well they separate inliers from outliers.
#[pyfunction]
#[pyo3(signature = (model="homography", n=200, inlier_ratio=0.8, noise=0.5, rho=1.0, seed=0))]
fn generate_synthetic(model: &str, n: usize, inlier_ratio: f64, noise: f64, rho: f64, seed: u64) -> PyResult<SyntheticProblem> {
    run_generate(model, n, inlier_ratio, noise, rho, seed).map_err(value_error)
}

fn solve(kind: ModelKind, rows: &[Vec<f64>]) -> Result<Vec<f64>, String> {
    let corrs = to_correspondences(rows)?;
    Ok(kind.solve(&corrs).map_err(|e| e.to_string())?.to_row_major().to_vec())
}

/// Direct linear fit of a homography to four or more rows.
#[pyfunction]
fn solve_homography(correspondences: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
    solve(ModelKind::Homography, &correspondences).map_err(value_error)
}

/// Normalized eight-point fit of a fundamental matrix to eight or more rows.
#[pyfunction]
fn solve_fundamental(correspondences: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
    solve(ModelKind::Fundamental, &correspondences).map_err(value_error)
}

fn residuals_of(model: &str, matrix: &[f64], rows: &[Vec<f64>]) -> Result<Vec<f64>, String> {
    let model = to_model(model, matrix)?;
    Ok(to_correspondences(rows)?.iter().map(|c| model.residual(c)).collect())
}

/// Per-row residuals in pixels: symmetric transfer error for homographies,
/// Sampson distance for fundamental matrices.
#[pyfunction]
fn residuals(model: &str, matrix: Vec<f64>, correspondences: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
    residuals_of(model, &matrix, &correspondences).map_err(value_error)
}

#[pymodule]
fn ansac(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Report>()?;
    m.add_class::<SyntheticProblem>()?;
    m.add_function(wrap_pyfunction!(estimate, m)?)?;
    m.add_function(wrap_pyfunction!(generate_synthetic, m)?)?;
    m.add_function(wrap_pyfunction!(solve_homography, m)?)?;
    m.add_function(wrap_pyfunction!(solve_fundamental, m)?)?;
    m.add_function(wrap_pyfunction!(residuals, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
