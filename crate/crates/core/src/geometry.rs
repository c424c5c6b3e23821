//! Homography and fundamental-matrix solvers plus the residuals used to
//! test hypotheses.
//!
//! Both solvers accept minimal or over-determined samples. Coordinates are
//! Hartley-normalized (centroid at the origin, mean distance `sqrt(2)`)
//! before the homogeneous system is solved, and every returned [`Model`] is
//! scaled to unit Frobenius norm with a canonical sign.

use nalgebra::{DMatrix, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ranking::Correspondence;

/// Relative singular-value floor below which a design matrix is treated as
/// rank deficient.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    fn homogeneous(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, 1.0)
    }

    fn distance(&self, other: &Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Homography,
    Fundamental,
}

impl ModelKind {
    /// Number of correspondences that determine a model.
    pub const fn minimal_sample_size(self) -> usize {
        match self {
            ModelKind::Homography => 4,
            ModelKind::Fundamental => 8,
        }
    }

    pub fn solve(self, sample: &[Correspondence]) -> Result<Model> {
        match self {
            ModelKind::Homography => solve_homography(sample),
            ModelKind::Fundamental => solve_fundamental(sample),
        }
    }

    pub const fn name(self) -> &'static str {
        match self {
            ModelKind::Homography => "homography",
            ModelKind::Fundamental => "fundamental",
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "homography" | "h" => Ok(ModelKind::Homography),
            "fundamental" | "f" => Ok(ModelKind::Fundamental),
            other => Err(Error::InvalidConfig(format!("unknown model kind '{other}'"))),
        }
    }
}

/// A 3x3 hypothesis with unit Frobenius norm.
///
/// Fundamental matrices are always rank 2. Homographies cache their inverse
/// so that symmetric transfer errors cost two matrix-vector products.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    kind: ModelKind,
    matrix: Matrix3<f64>,
    inverse: Option<Matrix3<f64>>,
}

impl Model {
    /// Builds a model from an arbitrary-scale matrix. Fundamental matrices
    /// are projected onto rank 2 first.
    pub fn from_matrix(kind: ModelKind, matrix: Matrix3<f64>) -> Result<Self> {
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateSample("non-finite model entries"));
        }
        let matrix = match kind {
            ModelKind::Homography => matrix,
            ModelKind::Fundamental => enforce_rank_two(&matrix)?,
        };
        let matrix = canonical_scale(&matrix)?;
        let inverse = match kind {
            ModelKind::Homography => matrix.try_inverse(),
            ModelKind::Fundamental => None,
        };
        Ok(Self { kind, matrix, inverse })
    }

    /// Row-major 3x3 entries.
    pub fn from_row_slice(kind: ModelKind, entries: &[f64; 9]) -> Result<Self> {
        Self::from_matrix(kind, Matrix3::from_row_slice(entries))
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.matrix
    }

    pub fn to_row_major(&self) -> [f64; 9] {
        let m = &self.matrix;
        [
            m[(0, 0)],
            m[(0, 1)],
            m[(0, 2)],
            m[(1, 0)],
            m[(1, 1)],
            m[(1, 2)],
            m[(2, 0)],
            m[(2, 1)],
            m[(2, 2)],
        ]
    }

    /// Residual of a single correspondence in pixels. See [`residual`].
    pub fn residual(&self, c: &Correspondence) -> f64 {
        match self.kind {
            ModelKind::Homography => {
                let Some(inv) = self.inverse.as_ref() else {
                    return f64::INFINITY;
                };
                let forward = transfer(&self.matrix, &c.p1).map(|p| p.distance(&c.p2));
                let backward = transfer(inv, &c.p2).map(|p| p.distance(&c.p1));
                match (forward, backward) {
                    (Some(f), Some(b)) => 0.5 * (f + b),
                    _ => f64::INFINITY,
                }
            }
            ModelKind::Fundamental => sampson_distance(&self.matrix, &c.p1, &c.p2),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualConfig {
    /// Pixels. Symmetric transfer distance for homographies, Sampson distance
    /// for fundamental matrices.
    pub inlier_threshold: f64,
}

impl ResidualConfig {
    pub fn new(inlier_threshold: f64) -> Result<Self> {
        let cfg = Self { inlier_threshold };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.inlier_threshold > 0.0 && self.inlier_threshold.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "inlier threshold must be positive, got {}",
                self.inlier_threshold
            )))
        }
    }
}

impl Default for ResidualConfig {
    fn default() -> Self {
        Self { inlier_threshold: 2.0 }
    }
}

/// Symmetric transfer distance `0.5 (|x' - Hx| + |x - H^-1 x'|)` for
/// homographies, Sampson distance for fundamental matrices. Degenerate
/// configurations yield `+inf`.
pub fn residual(model: &Model, c: &Correspondence) -> f64 {
    model.residual(c)
}

/// Returns the number of correspondences whose residual is strictly below
/// the threshold, together with the per-correspondence mask.
pub fn count_inliers(model: &Model, set: &[Correspondence], cfg: &ResidualConfig) -> (usize, Vec<bool>) {
    let mask: Vec<bool> = set
        .iter()
        .map(|c| model.residual(c) < cfg.inlier_threshold)
        .collect();
    let count = mask.iter().filter(|&&m| m).count();
    (count, mask)
}

/// Direct linear transform over four or more correspondences.
pub fn solve_homography(sample: &[Correspondence]) -> Result<Model> {
    let needed = ModelKind::Homography.minimal_sample_size();
    if sample.len() < needed {
        return Err(Error::NotEnoughCorrespondences { needed, got: sample.len() });
    }
    check_finite(sample)?;
    let (src, t_src) = hartley_normalize(sample.iter().map(|c| c.p1))?;
    let (dst, t_dst) = hartley_normalize(sample.iter().map(|c| c.p2))?;

    let rows = (2 * sample.len()).max(9);
    let mut a = DMatrix::<f64>::zeros(rows, 9);
    for (k, (p, q)) in src.iter().zip(&dst).enumerate() {
        let (x, y, u, v) = (p.x, p.y, q.x, q.y);
        let r = 2 * k;
        a[(r, 0)] = -x;
        a[(r, 1)] = -y;
        a[(r, 2)] = -1.0;
        a[(r, 6)] = u * x;
        a[(r, 7)] = u * y;
        a[(r, 8)] = u;
        a[(r + 1, 3)] = -x;
        a[(r + 1, 4)] = -y;
        a[(r + 1, 5)] = -1.0;
        a[(r + 1, 6)] = v * x;
        a[(r + 1, 7)] = v * y;
        a[(r + 1, 8)] = v;
    }
    let h_norm = null_vector(a)?;

    let hs = h_norm.svd(false, false).singular_values;
    if hs[2] <= RANK_TOL.sqrt() * hs[0] {
        return Err(Error::DegenerateSample("homography is singular"));
    }
    let t_dst_inv = t_dst
        .try_inverse()
        .ok_or(Error::DegenerateSample("normalization not invertible"))?;
    Model::from_matrix(ModelKind::Homography, t_dst_inv * h_norm * t_src)
}

/// Normalized eight-point algorithm with rank-2 projection.
pub fn solve_fundamental(sample: &[Correspondence]) -> Result<Model> {
    let needed = ModelKind::Fundamental.minimal_sample_size();
    if sample.len() < needed {
        return Err(Error::NotEnoughCorrespondences { needed, got: sample.len() });
    }
    check_finite(sample)?;
    let (src, t_src) = hartley_normalize(sample.iter().map(|c| c.p1))?;
    let (dst, t_dst) = hartley_normalize(sample.iter().map(|c| c.p2))?;

    let rows = sample.len().max(9);
    let mut a = DMatrix::<f64>::zeros(rows, 9);
    for (k, (p, q)) in src.iter().zip(&dst).enumerate() {
        // x'^T F x = 0
        let (x, y, u, v) = (p.x, p.y, q.x, q.y);
        let row = [u * x, u * y, u, v * x, v * y, v, x, y, 1.0];
        for (j, value) in row.into_iter().enumerate() {
            a[(k, j)] = value;
        }
    }
    let f_norm = enforce_rank_two(&null_vector(a)?)?;
    Model::from_matrix(ModelKind::Fundamental, t_dst.transpose() * f_norm * t_src)
}

fn check_finite(sample: &[Correspondence]) -> Result<()> {
    if sample.iter().all(|c| c.p1.is_finite() && c.p2.is_finite()) {
        Ok(())
    } else {
        Err(Error::DegenerateSample("non-finite coordinates"))
    }
}

fn hartley_normalize(points: impl Iterator<Item = Point2>) -> Result<(Vec<Point2>, Matrix3<f64>)> {
    let pts: Vec<Point2> = points.collect();
    let n = pts.len() as f64;
    let cx = pts.iter().map(|p| p.x).sum::<f64>() / n;
    let cy = pts.iter().map(|p| p.y).sum::<f64>() / n;
    let mean_dist = pts.iter().map(|p| (p.x - cx).hypot(p.y - cy)).sum::<f64>() / n;
    if !(mean_dist > 1e-12 * (1.0 + cx.abs().max(cy.abs()))) {
        return Err(Error::DegenerateSample("coincident points"));
    }
    let s = std::f64::consts::SQRT_2 / mean_dist;
    let t = Matrix3::new(s, 0.0, -s * cx, 0.0, s, -s * cy, 0.0, 0.0, 1.0);
    let out = pts
        .iter()
        .map(|p| Point2::new(s * (p.x - cx), s * (p.y - cy)))
        .collect();
    Ok((out, t))
}

/// Right singular vector of the smallest singular value, reshaped row-major.
/// Fails when more than one singular value vanishes.
fn null_vector(a: DMatrix<f64>) -> Result<Matrix3<f64>> {
    let svd = a
        .try_svd(false, true, f64::EPSILON, 10_000)
        .ok_or(Error::DegenerateSample("SVD did not converge"))?;
    let sv = &svd.singular_values;
    let v_t = svd.v_t.ok_or(Error::DegenerateSample("SVD did not converge"))?;
    if sv.len() < 9 || !(sv[7] > RANK_TOL * sv[0]) {
        return Err(Error::DegenerateSample("design matrix rank below 8"));
    }
    let h = v_t.row(8);
    Ok(Matrix3::new(h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], h[8]))
}

/// Zeroes the smallest singular value. Matrices that are already rank 2 to
/// working precision are returned untouched, since recomposing a badly
/// scaled pixel-space matrix would perturb its small entries.
fn enforce_rank_two(m: &Matrix3<f64>) -> Result<Matrix3<f64>> {
    let svd = m
        .try_svd(true, true, f64::EPSILON, 10_000)
        .ok_or(Error::DegenerateSample("SVD did not converge"))?;
    let (Some(u), Some(v_t)) = (svd.u, svd.v_t) else {
        return Err(Error::DegenerateSample("SVD did not converge"));
    };
    let mut s = svd.singular_values;
    if s[2] <= 1e-14 * s[0] {
        return Ok(*m);
    }
    s[2] = 0.0;
    Ok(u * Matrix3::from_diagonal(&s) * v_t)
}

/// Unit Frobenius norm, largest-magnitude entry positive.
fn canonical_scale(m: &Matrix3<f64>) -> Result<Matrix3<f64>> {
    let norm = m.norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::DegenerateSample("zero model matrix"));
    }
    let pivot = m
        .iter()
        .copied()
        .fold(0.0_f64, |acc, v| if v.abs() > acc.abs() { v } else { acc });
    Ok(m * (pivot.signum() / norm))
}

fn transfer(h: &Matrix3<f64>, p: &Point2) -> Option<Point2> {
    let q = h * p.homogeneous();
    if q.z.abs() <= f64::EPSILON * (q.x.abs() + q.y.abs()) || q.z == 0.0 {
        return None;
    }
    let out = Point2::new(q.x / q.z, q.y / q.z);
    out.is_finite().then_some(out)
}

fn sampson_distance(f: &Matrix3<f64>, p1: &Point2, p2: &Point2) -> f64 {
    let x = p1.homogeneous();
    let xp = p2.homogeneous();
    let fx = f * x;
    let ftxp = f.transpose() * xp;
    let algebraic = xp.dot(&fx);
    let denom = fx.x * fx.x + fx.y * fx.y + ftxp.x * ftxp.x + ftxp.y * ftxp.y;
    if denom > 0.0 {
        let d = algebraic.abs() / denom.sqrt();
        if d.is_finite() {
            d
        } else {
            f64::INFINITY
        }
    } else if algebraic == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}
