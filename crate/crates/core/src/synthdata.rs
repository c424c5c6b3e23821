//! Synthetic correspondence problems with a planted model.
//!
//! Inliers are exact projections perturbed by Gaussian noise on both
//! endpoints; the noise is redrawn until the truth residual is within
//! `3 sigma`, so planted inliers never stray into the outlier band. Outliers
//! are uniform in the image and are redrawn while they lie within 3 px of
//! the truth model. Quality scores are Lowe ratios: inliers and outliers
//! draw from disjoint ranges, blended toward one shared range as the
//! fidelity knob goes to zero.

use nalgebra::{Matrix3, Rotation3, Vector3};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Model, ModelKind, Point2};
use crate::ranking::{Correspondence, QualityKind};
use crate::sampler::{seeded_rng, SeededRng};

/// Minimum truth residual of a planted outlier, in pixels.
pub const OUTLIER_MARGIN: f64 = 3.0;

const INLIER_QUALITY: (f64, f64) = (0.1, 0.55);
const OUTLIER_QUALITY: (f64, f64) = (0.6, 1.0);
const SHARED_QUALITY: (f64, f64) = (0.1, 1.0);
const MAX_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub kind: ModelKind,
    pub n: usize,
    pub inlier_ratio: f64,
    /// Per-axis standard deviation in pixels.
    pub noise_sigma: f64,
    pub image_size: (f64, f64),
    /// 1 separates inlier and outlier scores completely, 0 makes them
    /// identically distributed.
    pub quality_fidelity: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn new(kind: ModelKind, n: usize, inlier_ratio: f64) -> Self {
        Self {
            kind,
            n,
            inlier_ratio,
            noise_sigma: 0.5,
            image_size: (640.0, 480.0),
            quality_fidelity: 1.0,
            seed: 0,
        }
    }

    pub fn with_noise(self, noise_sigma: f64) -> Self {
        Self { noise_sigma, ..self }
    }

    pub fn with_fidelity(self, quality_fidelity: f64) -> Self {
        Self { quality_fidelity, ..self }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn inlier_count(&self) -> usize {
        (self.n as f64 * self.inlier_ratio).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        let m = self.kind.minimal_sample_size();
        if self.n < m {
            return Err(Error::NotEnoughCorrespondences { needed: m, got: self.n });
        }
        if !(self.inlier_ratio > 0.0 && self.inlier_ratio <= 1.0) {
            return bad(format!("inlier ratio must lie in (0, 1], got {}", self.inlier_ratio));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return bad(format!("noise sigma must be non-negative, got {}", self.noise_sigma));
        }
        if !(0.0..=1.0).contains(&self.quality_fidelity) {
            return bad(format!("quality fidelity must lie in [0, 1], got {}", self.quality_fidelity));
        }
        let (w, h) = self.image_size;
        if !(w >= 16.0 && h >= 16.0 && w.is_finite() && h.is_finite()) {
            return bad(format!("image size too small: {w}x{h}"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SynthProblem {
    pub corrs: Vec<Correspondence>,
    pub truth_model: Model,
    pub truth_mask: Vec<bool>,
    /// Noise-free copy of `corrs`; outliers are identical to `corrs`.
    pub clean: Vec<Correspondence>,
}

impl SynthProblem {
    /// Generated qualities are Lowe ratios.
    pub const QUALITY_KIND: QualityKind = QualityKind::LoweRatio;

    pub fn inlier_count(&self) -> usize {
        self.truth_mask.iter().filter(|&&m| m).count()
    }

    /// Largest residual of `model` over the noise-free true inliers.
    pub fn model_error(&self, model: &Model) -> f64 {
        self.clean
            .iter()
            .zip(&self.truth_mask)
            .filter(|(_, &inlier)| inlier)
            .map(|(c, _)| model.residual(c))
            .fold(0.0, f64::max)
    }

    /// Exact per-subset inlier ratio of the ranked order induced by
    /// `source_index`, for prefixes of length `m..=n`.
    pub fn subset_inlier_ratios(&self, source_index: &[usize], m: usize) -> Vec<f64> {
        let mut acc = 0usize;
        let mut out = Vec::with_capacity(source_index.len().saturating_sub(m) + 1);
        for (j, &src) in source_index.iter().enumerate() {
            acc += self.truth_mask[src] as usize;
            if j + 1 >= m {
                out.push(acc as f64 / (j + 1) as f64);
            }
        }
        out
    }
}

pub fn generate(spec: &SynthSpec) -> Result<SynthProblem> {
    spec.validate()?;
    let mut rng = seeded_rng(spec.seed);
    let scene = match spec.kind {
        ModelKind::Homography => Scene::homography(spec, &mut rng)?,
        ModelKind::Fundamental => Scene::two_view(spec, &mut rng)?,
    };
    let truth_model = Model::from_matrix(spec.kind, scene.matrix())?;

    let n_in = spec.inlier_count();
    let (w, h) = spec.image_size;
    let noise = Normal::new(0.0, spec.noise_sigma.max(f64::MIN_POSITIVE))
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;

    let mut corrs = Vec::with_capacity(spec.n);
    let mut clean = Vec::with_capacity(spec.n);
    let mut truth_mask = Vec::with_capacity(spec.n);

    for _ in 0..n_in {
        let exact = scene.inlier(&mut rng, spec)?;
        let noisy = if spec.noise_sigma > 0.0 {
            let limit = 3.0 * spec.noise_sigma;
            (0..MAX_ATTEMPTS)
                .map(|_| {
                    let mut c = exact;
                    c.p1.x += noise.sample(&mut rng);
                    c.p1.y += noise.sample(&mut rng);
                    c.p2.x += noise.sample(&mut rng);
                    c.p2.y += noise.sample(&mut rng);
                    c
                })
                .find(|c| truth_model.residual(c) <= limit)
                .ok_or_else(|| Error::GenerationFailed("could not draw bounded inlier noise".into()))?
        } else {
            exact
        };
        corrs.push(noisy);
        clean.push(exact);
        truth_mask.push(true);
    }
    for _ in n_in..spec.n {
        let c = (0..MAX_ATTEMPTS)
            .map(|_| {
                let p1 = Point2::new(rng.random_range(0.0..w), rng.random_range(0.0..h));
                let p2 = Point2::new(rng.random_range(0.0..w), rng.random_range(0.0..h));
                Correspondence::new(p1, p2, 0.0)
            })
            .find(|c| truth_model.residual(c) >= OUTLIER_MARGIN)
            .ok_or_else(|| Error::GenerationFailed("could not place outliers away from the model".into()))?;
        corrs.push(c);
        clean.push(c);
        truth_mask.push(false);
    }

    let rho = spec.quality_fidelity;
    for (i, inlier) in truth_mask.iter().enumerate() {
        let class = if *inlier { INLIER_QUALITY } else { OUTLIER_QUALITY };
        let own = rng.random_range(class.0..class.1);
        let shared = rng.random_range(SHARED_QUALITY.0..SHARED_QUALITY.1);
        let q = rho * own + (1.0 - rho) * shared;
        corrs[i].quality = q;
        clean[i].quality = q;
    }

    let mut order: Vec<usize> = (0..spec.n).collect();
    order.shuffle(&mut rng);
    Ok(SynthProblem {
        corrs: order.iter().map(|&i| corrs[i]).collect(),
        clean: order.iter().map(|&i| clean[i]).collect(),
        truth_mask: order.iter().map(|&i| truth_mask[i]).collect(),
        truth_model,
    })
}

enum Scene {
    Plane { h: Matrix3<f64> },
    TwoView { k1: Matrix3<f64>, k2: Matrix3<f64>, rotation: Matrix3<f64>, translation: Vector3<f64> },
}

impl Scene {
    /// A similarity with mild anisotropy and perspective in coordinates
    /// where the image spans roughly `[-1, 1]`, rejected unless its
    /// condition number is below 100.
    fn homography(spec: &SynthSpec, rng: &mut SeededRng) -> Result<Self> {
        let (w, h) = spec.image_size;
        let s = 2.0 / w.max(h);
        let to_unit = Matrix3::new(s, 0.0, -s * w / 2.0, 0.0, s, -s * h / 2.0, 0.0, 0.0, 1.0);
        let from_unit = to_unit.try_inverse().expect("scaling matrix is invertible");
        for _ in 0..MAX_ATTEMPTS {
            let theta: f64 = rng.random_range(-0.5..0.5);
            let scale: f64 = rng.random_range(0.8..1.25);
            let aniso: f64 = rng.random_range(0.9..1.1);
            let shear: f64 = rng.random_range(-0.1..0.1);
            let (sin, cos) = theta.sin_cos();
            let a = Matrix3::new(
                scale * aniso * cos,
                -scale * sin + shear,
                rng.random_range(-0.2..0.2),
                scale * sin,
                scale / aniso * cos,
                rng.random_range(-0.2..0.2),
                rng.random_range(-0.2..0.2),
                rng.random_range(-0.2..0.2),
                1.0,
            );
            let sv = a.svd(false, false).singular_values;
            if sv.min() > 0.0 && sv.max() / sv.min() < 100.0 {
                return Ok(Scene::Plane { h: from_unit * a * to_unit });
            }
        }
        Err(Error::GenerationFailed("no well-conditioned homography".into()))
    }

    fn two_view(spec: &SynthSpec, rng: &mut SeededRng) -> Result<Self> {
        let (w, h) = spec.image_size;
        let intrinsics = |f: f64| Matrix3::new(f, 0.0, w / 2.0, 0.0, f, h / 2.0, 0.0, 0.0, 1.0);
        for _ in 0..100 {
            let k1 = intrinsics(rng.random_range(0.8..1.2) * w.max(h));
            let k2 = intrinsics(rng.random_range(0.8..1.2) * w.max(h));
            let axis = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let angle = rng.random_range(0.02..0.25);
            let rotation = match nalgebra::Unit::try_new(axis, 1e-6) {
                Some(axis) => *Rotation3::from_axis_angle(&axis, angle).matrix(),
                None => continue,
            };
            let dir = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-0.3..0.3));
            if dir.norm() < 0.2 {
                continue;
            }
            let translation = dir.normalize() * rng.random_range(0.5..1.0);
            return Ok(Scene::TwoView { k1, k2, rotation, translation });
        }
        Err(Error::GenerationFailed("degenerate camera pair".into()))
    }

    fn matrix(&self) -> Matrix3<f64> {
        match self {
            Scene::Plane { h } => *h,
            Scene::TwoView { k1, k2, rotation, translation } => {
                let t = translation;
                let skew = Matrix3::new(0.0, -t.z, t.y, t.z, 0.0, -t.x, -t.y, t.x, 0.0);
                let k1_inv = k1.try_inverse().expect("intrinsics are invertible");
                let k2_inv = k2.try_inverse().expect("intrinsics are invertible");
                k2_inv.transpose() * skew * rotation * k1_inv
            }
        }
    }

    /// Exact correspondence with both endpoints inside the image.
    fn inlier(&self, rng: &mut SeededRng, spec: &SynthSpec) -> Result<Correspondence> {
        let (w, h) = spec.image_size;
        let inside = |p: &Point2| p.x >= 0.0 && p.x < w && p.y >= 0.0 && p.y < h;
        for _ in 0..MAX_ATTEMPTS {
            let p1 = Point2::new(rng.random_range(0.0..w), rng.random_range(0.0..h));
            let projected = match self {
                Scene::Plane { h } => h * Vector3::new(p1.x, p1.y, 1.0),
                Scene::TwoView { k1, k2, rotation, translation } => {
                    let depth: f64 = rng.random_range(4.0..10.0);
                    let ray = k1.try_inverse().expect("intrinsics are invertible") * Vector3::new(p1.x, p1.y, 1.0);
                    let x2 = rotation * (ray * depth) + translation;
                    if x2.z < 0.5 {
                        continue;
                    }
                    k2 * x2
                }
            };
            if projected.z.abs() < 1e-12 {
                continue;
            }
            let p2 = Point2::new(projected.x / projected.z, projected.y / projected.z);
            if inside(&p2) {
                return Ok(Correspondence::new(p1, p2, 0.0));
            }
        }
        Err(Error::GenerationFailed("could not place an inlier inside both images".into()))
    }
}
