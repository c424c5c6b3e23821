//! Correspondence quality mapping, ranking and per-subset inlier-ratio
//! priors.
//!
//! Subset `i` (zero-based here) is the prefix of the ranked list holding the
//! top `m + i` correspondences. Subsets are never materialized; only the
//! sorted list and one prior per prefix length `m..=n` are stored.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correspondence {
    pub p1: Point2,
    pub p2: Point2,
    /// Raw matcher score, interpreted according to a [`QualityKind`].
    pub quality: f64,
}

impl Correspondence {
    pub const fn new(p1: Point2, p2: Point2, quality: f64) -> Self {
        Self { p1, p2, quality }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QualityKind {
    /// Nearest / second-nearest descriptor distance ratio. Lower is better.
    LoweRatio,
    /// `sqrt(r1^2 + r2^2)` over the forward and reverse Lowe ratios. Lower is
    /// better.
    LoweRadius,
    /// Already a correctness probability in `[0, 1]`. Higher is better.
    Precomputed01,
}

impl QualityKind {
    /// Default width of the Gaussian radial basis used for Lowe scores.
    pub const fn default_sigma(self) -> f64 {
        match self {
            QualityKind::LoweRatio => 0.8,
            QualityKind::LoweRadius => 1.0,
            QualityKind::Precomputed01 => 1.0,
        }
    }

    pub const fn name(self) -> &'static str {
        match self {
            QualityKind::LoweRatio => "lowe_ratio",
            QualityKind::LoweRadius => "lowe_radius",
            QualityKind::Precomputed01 => "precomputed",
        }
    }
}

impl std::str::FromStr for QualityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "ratio" | "lowe_ratio" => Ok(QualityKind::LoweRatio),
            "radius" | "lowe_radius" => Ok(QualityKind::LoweRadius),
            "precomputed" | "prob" | "probability" => Ok(QualityKind::Precomputed01),
            other => Err(Error::InvalidConfig(format!("unknown quality kind '{other}'"))),
        }
    }
}

/// How raw scores become correctness values in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityMap {
    pub kind: QualityKind,
    /// Gaussian width for the Lowe kinds; ignored for precomputed scores.
    pub sigma: f64,
}

impl QualityMap {
    pub const fn new(kind: QualityKind) -> Self {
        Self { kind, sigma: kind.default_sigma() }
    }

    pub fn with_sigma(kind: QualityKind, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidConfig(format!("quality sigma must be positive, got {sigma}")));
        }
        Ok(Self { kind, sigma })
    }

    pub fn correctness(&self, c: &Correspondence) -> Result<f64> {
        let q = c.quality;
        match self.kind {
            QualityKind::Precomputed01 => {
                if (0.0..=1.0).contains(&q) {
                    Ok(q)
                } else {
                    Err(Error::InvalidQuality { kind: self.kind.name(), value: q })
                }
            }
            QualityKind::LoweRatio | QualityKind::LoweRadius => {
                if q >= 0.0 && q.is_finite() {
                    let z = q / self.sigma;
                    Ok((-z * z).exp())
                } else {
                    Err(Error::InvalidQuality { kind: self.kind.name(), value: q })
                }
            }
        }
    }
}

impl From<QualityKind> for QualityMap {
    fn from(kind: QualityKind) -> Self {
        Self::new(kind)
    }
}

/// Correctness estimate `Î(c)` with the default width for `kind`.
pub fn correctness(c: &Correspondence, kind: QualityKind) -> Result<f64> {
    QualityMap::new(kind).correctness(c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedProblem {
    ordered: Vec<Correspondence>,
    /// `source_index[j]` is the input position of `ordered[j]`.
    source_index: Vec<usize>,
    correctness: Vec<f64>,
    priors: Vec<f64>,
    minimal: usize,
}

impl RankedProblem {
    pub fn ordered(&self) -> &[Correspondence] {
        &self.ordered
    }

    pub fn source_index(&self) -> &[usize] {
        &self.source_index
    }

    pub fn correctness(&self) -> &[f64] {
        &self.correctness
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn minimal_size(&self) -> usize {
        self.minimal
    }

    pub fn len(&self) -> usize {
        self.ordered.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordered.is_empty()
    }

    pub fn subset_count(&self) -> usize {
        self.priors.len()
    }

    /// Size of zero-based subset `s`.
    pub fn subset_len(&self, s: usize) -> usize {
        self.minimal + s
    }

    pub fn subset(&self, s: usize) -> &[Correspondence] {
        &self.ordered[..self.subset_len(s)]
    }

    /// Replaces the priors, e.g. to study the filter under a poor initial
    /// estimate. Values are clamped to `[0, 1]`.
    pub fn with_priors(mut self, priors: Vec<f64>) -> Result<Self> {
        if priors.len() != self.priors.len() {
            return Err(Error::InvalidConfig(format!(
                "expected {} priors, got {}",
                self.priors.len(),
                priors.len()
            )));
        }
        if priors.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidConfig("priors must be finite".into()));
        }
        self.priors = priors.into_iter().map(|p| p.clamp(0.0, 1.0)).collect();
        Ok(self)
    }

    /// Scatters a mask over `ordered` back to input order.
    pub fn to_input_order(&self, ranked_mask: &[bool]) -> Vec<bool> {
        let mut out = vec![false; ranked_mask.len()];
        for (&src, &m) in self.source_index.iter().zip(ranked_mask) {
            out[src] = m;
        }
        out
    }
}

/// Sorts by descending correctness (stable, so ties keep input order) and
/// computes the cumulative-mean prior of every prefix of length `m..=n`.
pub fn build_ranked_problem(
    corrs: &[Correspondence],
    quality: impl Into<QualityMap>,
    m: usize,
) -> Result<RankedProblem> {
    let quality = quality.into();
    let n = corrs.len();
    if m == 0 {
        return Err(Error::InvalidConfig("minimal sample size must be at least 1".into()));
    }
    if n < m {
        return Err(Error::NotEnoughCorrespondences { needed: m, got: n });
    }
    let scores = corrs
        .iter()
        .map(|c| quality.correctness(c))
        .collect::<Result<Vec<f64>>>()?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let ordered: Vec<Correspondence> = order.iter().map(|&i| corrs[i]).collect();
    let correctness: Vec<f64> = order.iter().map(|&i| scores[i]).collect();

    let mut priors = Vec::with_capacity(n - m + 1);
    let mut sum: f64 = correctness[..m - 1].iter().sum();
    for (j, value) in correctness.iter().enumerate().skip(m - 1) {
        sum += value;
        priors.push((sum / (j + 1) as f64).clamp(0.0, 1.0));
    }

    Ok(RankedProblem { ordered, source_index: order, correctness, priors, minimal: m })
}
