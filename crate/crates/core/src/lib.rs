//! Robust two-view model estimation with adaptive non-minimal sampling.
//!
//! Correspondences are ranked by a quality score, grouped into growing
//! prefixes, and each prefix's inlier ratio is tracked with a scalar Kalman
//! filter. The filtered ratio decides how many correspondences each
//! hypothesis is fitted to: pure prefixes yield over-determined fits that
//! average out inlier noise, contaminated ones fall back to minimal samples.
//!
//! RANSAC and PROSAC baselines, a synthetic problem generator and a
//! benchmark harness are included for comparison.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod bench;
pub mod error;
pub mod estimator;
pub mod filter;
pub mod geometry;
pub mod io;
pub mod ranking;
pub mod sampler;
pub mod synthdata;

pub use baselines::{prosac_estimate, ransac_estimate, BaselineConfig};
pub use error::{Error, Result};
pub use estimator::{ansac_estimate, AnsacConfig, EstimationReport, Termination};
pub use filter::{FilterParams, FilterState};
pub use geometry::{count_inliers, residual, solve_fundamental, solve_homography, Model, ModelKind, Point2, ResidualConfig};
pub use ranking::{build_ranked_problem, correctness, Correspondence, QualityKind, QualityMap, RankedProblem};
pub use sampler::SamplerParams;
pub use synthdata::{generate, SynthProblem, SynthSpec};
