//! Invariants shared by the property tests and the acceptance run. Each
//! entry takes the number of random cases and reports the first failure.

use ansac_core::baselines::{prosac_estimate, ransac_estimate, BaselineConfig};
use ansac_core::bench::{run_bench, summarize, BenchConfig, EstimatorName};
use ansac_core::estimator::{ansac_estimate_observed, AnsacConfig, EstimationReport};
use ansac_core::filter::{FilterParams, FilterState};
use ansac_core::io::{read_correspondences, write_correspondences};
use ansac_core::sampler::{draw_sample, seeded_rng, SamplerParams};
use ansac_core::synthdata::{generate, SynthProblem, SynthSpec, OUTLIER_MARGIN};
use ansac_core::{
    build_ranked_problem, correctness, count_inliers, Correspondence, Model, ModelKind, Point2, QualityKind,
    ResidualConfig,
};
use nalgebra::Matrix3;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

pub type Property = fn(u32) -> Result<(), String>;

pub fn all() -> Vec<(&'static str, Property)> {
    vec![
        ("model scale invariance", model_scale_invariance),
        ("homography interpolates its minimal sample", homography_minimal_exact),
        ("solvers are permutation invariant", solver_permutation_invariance),
        ("inlier count monotone in threshold", count_monotone_in_threshold),
        ("fundamental matrix is singular", fundamental_singular),
        ("ranking is stable and deterministic", ranking_stable),
        ("priors equal direct prefix means", priors_match_direct_sum),
        ("correctness decreases with raw score", correctness_monotone),
        ("filter update stays between prediction and observation", filter_update_bracketed),
        ("filter fixed point", filter_fixed_point),
        ("filter tracks a constant observation", filter_tracking),
        ("sample size monotone and bounded", sample_size_monotone),
        ("hypothesis budget monotone", budget_monotone),
        ("samples are distinct and in range", samples_distinct),
        ("ansac report invariants", ansac_report_invariants),
        ("ansac subsets are prefixes visited in order", ansac_prefix_property),
        ("ansac with q_max = q_min draws minimal samples", ansac_minimal_reduction),
        ("baseline report invariants", baseline_report_invariants),
        ("synthetic problem contracts", synth_contracts),
        ("correspondence csv round trip", csv_round_trip),
        ("bench summary recounts", bench_summary_recount),
    ]
}

fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let mut runner = TestRunner::new(Config { cases, max_global_rejects: 4 * cases.max(256), failure_persistence: None, ..Config::default() });
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn point() -> impl Strategy<Value = Point2> {
    (0.0..640.0f64, 0.0..480.0f64).prop_map(|(x, y)| Point2::new(x, y))
}

fn homography() -> impl Strategy<Value = Matrix3<f64>> {
    (
        (0.8..1.2f64, -0.2..0.2f64, -50.0..50.0f64),
        (-0.2..0.2f64, 0.8..1.2f64, -50.0..50.0f64),
        (-1e-4..1e-4f64, -1e-4..1e-4f64),
    )
        .prop_map(|((a, b, tx), (c, d, ty), (g, h))| Matrix3::new(a, b, tx, c, d, ty, g, h, 1.0))
}

fn apply(h: &Matrix3<f64>, p: Point2) -> Point2 {
    let v = h * nalgebra::Vector3::new(p.x, p.y, 1.0);
    Point2::new(v.x / v.z, v.y / v.z)
}

fn triangle_area(a: Point2, b: Point2, c: Point2) -> f64 {
    0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)).abs()
}

fn general_position(pts: &[Point2], min_area: f64) -> bool {
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            for k in j + 1..pts.len() {
                if triangle_area(pts[i], pts[j], pts[k]) < min_area {
                    return false;
                }
            }
        }
    }
    true
}

fn random_corrs(min: usize, max: usize) -> impl Strategy<Value = Vec<Correspondence>> {
    prop::collection::vec((point(), point(), 0.0..1.0f64), min..=max)
        .prop_map(|v| v.into_iter().map(|(a, b, q)| Correspondence::new(a, b, q)).collect())
}

fn matrices_close(a: &Model, b: &Model, tol: f64) -> bool {
    (a.matrix() - b.matrix()).abs().max() <= tol
}

fn model_scale_invariance(cases: u32) -> Result<(), String> {
    let scale = prop_oneof![-1e3..-1e-3f64, 1e-3..1e3f64];
    run(cases, (homography(), scale, any::<bool>()), |(h, k, fundamental)| {
        let (kind, m) = if fundamental {
            // any rank-2 matrix will do
            let skew = Matrix3::new(0.0, -1.0, 0.3, 1.0, 0.0, -2.0, -0.3, 2.0, 0.0);
            (ModelKind::Fundamental, skew * h)
        } else {
            (ModelKind::Homography, h)
        };
        let a = Model::from_matrix(kind, m).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let b = Model::from_matrix(kind, m * k).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(matrices_close(&a, &b, 1e-12), "{:?} vs {:?}", a.matrix(), b.matrix());
        prop_assert!((a.matrix().norm() - 1.0).abs() < 1e-12);
        Ok(())
    })
}

fn homography_minimal_exact(cases: u32) -> Result<(), String> {
    run(cases, (prop::array::uniform4(point()), prop::array::uniform4(point())), |(src, dst)| {
        prop_assume!(general_position(&src, 2000.0) && general_position(&dst, 2000.0));
        let sample: Vec<_> = src.iter().zip(&dst).map(|(&a, &b)| Correspondence::new(a, b, 0.5)).collect();
        let model = ansac_core::solve_homography(&sample).map_err(|e| TestCaseError::fail(e.to_string()))?;
        for c in &sample {
            let r = model.residual(c);
            prop_assert!(r < 1e-7, "residual {r}");
        }
        Ok(())
    })
}

fn solver_permutation_invariance(cases: u32) -> Result<(), String> {
    // noisy but consistent pairs for both models; unrelated pairs leave the
    // least-squares null vector ill-determined
    let strategy = (any::<bool>(), homography(), random_corrs(6, 6), any::<u64>(), any::<u64>());
    run(cases, strategy, |(fundamental, h, points, noise_seed, perm_seed)| {
        use rand::seq::SliceRandom;
        use rand::Rng;
        let (kind, sample) = if fundamental {
            let spec = SynthSpec::new(ModelKind::Fundamental, 12, 1.0).with_noise(1.0).with_seed(noise_seed);
            (ModelKind::Fundamental, generate(&spec).unwrap().corrs)
        } else {
            let mut noise = seeded_rng(noise_seed);
            let sample = points
                .iter()
                .map(|c| {
                    let q = apply(&h, c.p1);
                    let q = Point2::new(q.x + noise.random_range(-2.0..2.0), q.y + noise.random_range(-2.0..2.0));
                    Correspondence::new(c.p1, q, 0.5)
                })
                .collect();
            (ModelKind::Homography, sample)
        };
        let Ok(a) = kind.solve(&sample) else {
            return Ok(());
        };
        let mut shuffled = sample.clone();
        shuffled.shuffle(&mut seeded_rng(perm_seed));
        let b = kind.solve(&shuffled).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(matrices_close(&a, &b, 1e-8), "{:?} vs {:?}", a.matrix(), b.matrix());
        Ok(())
    })
}

fn count_monotone_in_threshold(cases: u32) -> Result<(), String> {
    run(cases, (homography(), random_corrs(1, 40), 0.01..20.0f64, 0.01..20.0f64), |(h, corrs, t1, t2)| {
        let model = Model::from_matrix(ModelKind::Homography, h).unwrap();
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let (a, _) = count_inliers(&model, &corrs, &ResidualConfig::new(lo).unwrap());
        let (b, _) = count_inliers(&model, &corrs, &ResidualConfig::new(hi).unwrap());
        prop_assert!(a <= b);
        Ok(())
    })
}

fn fundamental_singular(cases: u32) -> Result<(), String> {
    run(cases, random_corrs(8, 16), |corrs| {
        let Ok(model) = ansac_core::solve_fundamental(&corrs) else {
            return Ok(());
        };
        let det = model.matrix().determinant();
        prop_assert!(det.abs() <= 1e-9, "det {det}");
        prop_assert!((model.matrix().norm() - 1.0).abs() < 1e-12);
        Ok(())
    })
}

fn ranking_stable(cases: u32) -> Result<(), String> {
    // few distinct values so that ties are common
    let q = prop::sample::select(vec![0.1, 0.3, 0.5, 0.7, 0.9]);
    let strategy = prop::collection::vec((point(), point(), q), 4..60);
    run(cases, strategy, |rows| {
        let corrs: Vec<_> = rows.into_iter().map(|(a, b, q)| Correspondence::new(a, b, q)).collect();
        let a = build_ranked_problem(&corrs, QualityKind::LoweRatio, 4).unwrap();
        let b = build_ranked_problem(&corrs, QualityKind::LoweRatio, 4).unwrap();
        prop_assert_eq!(&a, &b);
        for w in a.source_index().windows(2) {
            let (qa, qb) = (corrs[w[0]].quality, corrs[w[1]].quality);
            prop_assert!(qa < qb || (qa == qb && w[0] < w[1]), "order {:?}", w);
        }
        Ok(())
    })
}

fn priors_match_direct_sum(cases: u32) -> Result<(), String> {
    run(cases, (prop::collection::vec(0.0..=1.0f64, 1..200), 1usize..8), |(scores, m)| {
        prop_assume!(scores.len() >= m);
        let corrs: Vec<_> =
            scores.iter().map(|&q| Correspondence::new(Point2::default(), Point2::default(), q)).collect();
        let p = build_ranked_problem(&corrs, QualityKind::Precomputed01, m).unwrap();
        let sorted = p.correctness();
        prop_assert_eq!(p.priors().len(), scores.len() - m + 1);
        for (s, &prior) in p.priors().iter().enumerate() {
            let len = m + s;
            let direct = sorted[..len].iter().sum::<f64>() / len as f64;
            prop_assert!((prior - direct).abs() <= 1e-12, "prefix {len}: {prior} vs {direct}");
        }
        Ok(())
    })
}

fn correctness_monotone(cases: u32) -> Result<(), String> {
    let kind = prop::sample::select(vec![QualityKind::LoweRatio, QualityKind::LoweRadius]);
    run(cases, (kind, 0.0..3.0f64, 1e-6..3.0f64), |(kind, qa, gap)| {
        let c = |q| Correspondence::new(Point2::default(), Point2::default(), q);
        let a = correctness(&c(qa), kind).unwrap();
        let b = correctness(&c(qa + gap), kind).unwrap();
        prop_assert!(a > b, "{qa} -> {a}, {} -> {b}", qa + gap);
        Ok(())
    })
}

fn filter_params() -> impl Strategy<Value = FilterParams> {
    (0.0..=1.0f64, 0.01..1.0f64, 0.01..1.0f64).prop_map(|(alpha, sigma_p, sigma_u)| FilterParams {
        alpha,
        sigma_p,
        sigma_u,
    })
}

fn filter_update_bracketed(cases: u32) -> Result<(), String> {
    let strategy = (filter_params(), 0.0..=1.0f64, 0.0..=1.0f64, 0.0..=1.0f64, 0.0..0.5f64, any::<bool>());
    run(cases, strategy, |(params, eps, prior, obs, var, switched)| {
        let pred = FilterState { epsilon: eps, variance: var }.predict(prior, switched, &params);
        let post = pred.update(obs, &params);
        let (lo, hi) = if pred.epsilon <= obs { (pred.epsilon, obs) } else { (obs, pred.epsilon) };
        prop_assert!(post.epsilon >= lo - 1e-15 && post.epsilon <= hi + 1e-15);
        prop_assert!((0.0..=1.0).contains(&post.epsilon));
        prop_assert!(post.variance < pred.variance && post.variance >= 0.0);
        let g = pred.gain(&params);
        prop_assert!((0.0..=1.0).contains(&g));
        Ok(())
    })
}

fn filter_fixed_point(cases: u32) -> Result<(), String> {
    let strategy = (filter_params(), 0.0..=1.0f64, 0.0..=1.0f64, 0.0..0.5f64, any::<bool>());
    run(cases, strategy, |(params, eps, prior, var, switched)| {
        let pred = FilterState { epsilon: eps, variance: var }.predict(prior, switched, &params);
        let post = pred.update(pred.epsilon, &params);
        prop_assert!((post.epsilon - pred.epsilon).abs() <= 1e-15);
        Ok(())
    })
}

fn filter_tracking(cases: u32) -> Result<(), String> {
    run(cases, (filter_params(), 0.0..=1.0f64, 0.0..=1.0f64), |(params, start, obs)| {
        let mut state = FilterState::new(start, &params);
        state = state.predict(start, false, &params).update(obs, &params);
        let first = (state.epsilon - obs).abs();
        let mut last = first;
        for _ in 0..500 {
            state = state.predict(start, false, &params).update(obs, &params);
            let d = (state.epsilon - obs).abs();
            prop_assert!(d <= last + 1e-15, "distance grew from {last} to {d}");
            last = d;
        }
        prop_assert!(last <= 0.01 * first + 1e-12, "{first} -> {last}");
        Ok(())
    })
}

fn sampler_params() -> impl Strategy<Value = SamplerParams> {
    (1.0..50.0f64, 0.05..0.95f64, 1usize..10, 1usize..6, 0.5..0.999f64).prop_map(|(omega, mu, q_min, f, nu)| {
        SamplerParams { omega, mu, q_min, q_max: q_min * f, nu, budget_cap: SamplerParams::DEFAULT_BUDGET_CAP }
    })
}

fn sample_size_monotone(cases: u32) -> Result<(), String> {
    run(cases, (sampler_params(), 0.0..=1.0f64, 0.0..=1.0f64, 1usize..100), |(p, e1, e2, len)| {
        let len = len.max(p.q_min);
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let (a, b) = (p.sample_size(lo, len), p.sample_size(hi, len));
        prop_assert!(a <= b);
        for q in [a, b] {
            prop_assert!(q >= p.q_min && q <= p.q_max.min(len));
        }
        Ok(())
    })
}

fn budget_monotone(cases: u32) -> Result<(), String> {
    run(cases, (sampler_params(), 0.0..=1.0f64, 0.0..=1.0f64), |(p, e1, e2)| {
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let (a, b) = (p.hypothesis_budget(lo), p.hypothesis_budget(hi));
        prop_assert!(a >= b && b >= 1 && a <= p.budget_cap);
        Ok(())
    })
}

fn samples_distinct(cases: u32) -> Result<(), String> {
    run(cases, (1usize..300, 0.0..=1.0f64, any::<u64>()), |(len, frac, seed)| {
        let q = ((len as f64 * frac).round() as usize).max(1);
        let mut s = draw_sample(&mut seeded_rng(seed), len, q);
        prop_assert_eq!(s.len(), q);
        s.sort_unstable();
        s.dedup();
        prop_assert_eq!(s.len(), q);
        prop_assert!(s.iter().all(|&i| i < len));
        Ok(())
    })
}

/// Small synthetic problems so that whole estimator runs stay cheap.
fn small_problem() -> impl Strategy<Value = (SynthProblem, u64)> {
    let kind = prop_oneof![3 => Just(ModelKind::Homography), 1 => Just(ModelKind::Fundamental)];
    (kind, 0usize..30, 0.3..=1.0f64, 0.0..=1.0f64, 0.0..1.5f64, any::<u64>(), any::<u64>()).prop_filter_map(
        "generation failed",
        |(kind, extra, eps, rho, noise, seed, run_seed)| {
            let n = kind.minimal_sample_size() + extra;
            let spec = SynthSpec::new(kind, n, eps).with_noise(noise).with_fidelity(rho).with_seed(seed);
            generate(&spec).ok().map(|p| (p, run_seed))
        },
    )
}

fn ansac_config(seed: u64) -> AnsacConfig {
    AnsacConfig { max_iterations: 300, seed, ..AnsacConfig::default() }
}

fn check_report(report: &EstimationReport, corrs: &[Correspondence], residual: &ResidualConfig) -> Result<(), TestCaseError> {
    let n = corrs.len();
    prop_assert_eq!(report.epsilon_history.len(), report.iterations_executed);
    prop_assert!(report.epsilon_history.windows(2).all(|w| w[0] <= w[1]), "history not monotone");
    let mask_count = report.inlier_mask.iter().filter(|&&b| b).count();
    prop_assert_eq!(mask_count, report.inlier_count);
    prop_assert!((report.best_inlier_ratio - mask_count as f64 / n as f64).abs() < 1e-15);
    let (recount, remask) = count_inliers(&report.best_model, corrs, residual);
    prop_assert_eq!(recount, report.inlier_count);
    prop_assert_eq!(&remask, &report.inlier_mask);
    Ok(())
}

fn same_report(a: &EstimationReport, b: &EstimationReport) -> bool {
    a.best_model == b.best_model
        && a.inlier_mask == b.inlier_mask
        && a.iterations_executed == b.iterations_executed
        && a.termination == b.termination
        && a.subset_trace == b.subset_trace
        && a.epsilon_history.iter().map(|v| v.to_bits()).eq(b.epsilon_history.iter().map(|v| v.to_bits()))
}

fn ansac_report_invariants(cases: u32) -> Result<(), String> {
    run(cases, small_problem(), |(p, seed)| {
        let kind = p.truth_model.kind();
        let cfg = ansac_config(seed);
        let a = ansac_core::ansac_estimate(&p.corrs, kind, SynthProblem::QUALITY_KIND, &cfg);
        let b = ansac_core::ansac_estimate(&p.corrs, kind, SynthProblem::QUALITY_KIND, &cfg);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                check_report(&a, &p.corrs, &cfg.residual)?;
                prop_assert!(same_report(&a, &b), "not reproducible");
            }
            (Err(a), Err(b)) => prop_assert_eq!(a, b),
            _ => prop_assert!(false, "one run failed and the other did not"),
        }
        Ok(())
    })
}

fn ansac_prefix_property(cases: u32) -> Result<(), String> {
    run(cases, small_problem(), |(p, seed)| {
        let kind = p.truth_model.kind();
        let m = kind.minimal_sample_size();
        let problem = build_ranked_problem(&p.corrs, SynthProblem::QUALITY_KIND, m).unwrap();
        let last = problem.subset_count() - 1;
        let mut prev = 0usize;
        let mut ok = Ok(());
        let _ = ansac_estimate_observed(&problem, kind, &ansac_config(seed), |e| {
            if ok.is_err() {
                return;
            }
            if e.subset < prev || e.subset > last || e.subset_len != m + e.subset {
                ok = Err(format!("subset {} after {prev}", e.subset));
            } else if e.sample.iter().any(|&i| i >= e.subset_len) {
                ok = Err(format!("sample {:?} outside prefix of {}", e.sample, e.subset_len));
            }
            prev = e.subset;
        });
        ok.map_err(TestCaseError::fail)
    })
}

fn ansac_minimal_reduction(cases: u32) -> Result<(), String> {
    run(cases, small_problem(), |(p, seed)| {
        let kind = p.truth_model.kind();
        let m = kind.minimal_sample_size();
        let problem = build_ranked_problem(&p.corrs, SynthProblem::QUALITY_KIND, m).unwrap();
        let mut cfg = ansac_config(seed);
        cfg.sampling.q_max_factor = 1;
        let mut sizes_ok = true;
        let _ = ansac_estimate_observed(&problem, kind, &cfg, |e| sizes_ok &= e.sample.len() == m);
        prop_assert!(sizes_ok);
        Ok(())
    })
}

fn baseline_report_invariants(cases: u32) -> Result<(), String> {
    run(cases, (small_problem(), any::<bool>()), |((p, seed), use_prosac)| {
        let kind = p.truth_model.kind();
        let cfg = BaselineConfig { max_iterations: 300, seed, ..BaselineConfig::default() };
        let go = || {
            if use_prosac {
                prosac_estimate(&p.corrs, kind, SynthProblem::QUALITY_KIND, &cfg)
            } else {
                ransac_estimate(&p.corrs, kind, &cfg)
            }
        };
        match (go(), go()) {
            (Ok(a), Ok(b)) => {
                check_report(&a, &p.corrs, &cfg.residual)?;
                prop_assert!(same_report(&a, &b), "not reproducible");
            }
            (Err(a), Err(b)) => prop_assert_eq!(a, b),
            _ => prop_assert!(false, "one run failed and the other did not"),
        }
        Ok(())
    })
}

fn synth_contracts(cases: u32) -> Result<(), String> {
    let kind = prop_oneof![Just(ModelKind::Homography), Just(ModelKind::Fundamental)];
    let strategy = (kind, 0usize..60, 0.05..=1.0f64, 0.0..2.0f64, 0.0..=1.0f64, any::<u64>());
    run(cases, strategy, |(kind, extra, eps, noise, rho, seed)| {
        let spec = SynthSpec::new(kind, kind.minimal_sample_size() + extra, eps)
            .with_noise(noise)
            .with_fidelity(rho)
            .with_seed(seed);
        let Ok(p) = generate(&spec) else {
            return Ok(());
        };
        let again = generate(&spec).unwrap();
        prop_assert_eq!(&p.corrs, &again.corrs);
        prop_assert_eq!(&p.truth_mask, &again.truth_mask);
        prop_assert_eq!(p.corrs.len(), spec.n);
        prop_assert_eq!(p.inlier_count(), spec.inlier_count());
        let f = p.truth_model.matrix();
        prop_assert!((f.norm() - 1.0).abs() < 1e-12);
        if kind == ModelKind::Fundamental {
            prop_assert!(f.determinant().abs() <= 1e-9);
        }
        for (c, &inlier) in p.corrs.iter().zip(&p.truth_mask) {
            let r = p.truth_model.residual(c);
            if inlier {
                if kind == ModelKind::Homography {
                    prop_assert!(r <= 3.0 * noise + 1e-9, "inlier residual {r}");
                }
            } else {
                prop_assert!(r >= OUTLIER_MARGIN, "outlier residual {r}");
            }
        }
        Ok(())
    })
}

fn csv_round_trip(cases: u32) -> Result<(), String> {
    let value = prop_oneof![-1e6..1e6f64, -1.0..1.0f64, Just(0.0)];
    let row = (value.clone(), value.clone(), value.clone(), value.clone(), 0.0..10.0f64);
    run(cases, prop::collection::vec(row, 0..40), |rows| {
        let corrs: Vec<_> = rows
            .into_iter()
            .map(|(a, b, c, d, q)| Correspondence::new(Point2::new(a, b), Point2::new(c, d), q))
            .collect();
        let mut buf = Vec::new();
        write_correspondences(&mut buf, &corrs).unwrap();
        let back = read_correspondences(buf.as_slice()).unwrap();
        prop_assert_eq!(back.len(), corrs.len());
        for (x, y) in corrs.iter().zip(&back) {
            let (u, v) = ([x.p1.x, x.p1.y, x.p2.x, x.p2.y, x.quality], [y.p1.x, y.p1.y, y.p2.x, y.p2.y, y.quality]);
            prop_assert!(u.iter().zip(&v).all(|(a, b)| (a - b).abs() <= 1e-9));
        }
        Ok(())
    })
}

fn bench_summary_recount(cases: u32) -> Result<(), String> {
    run(cases, (0usize..12, 0.5..=1.0f64, 1usize..4, any::<u32>(), 0.5..5.0f64), |(extra, eps, trials, seed, success)| {
        let spec = SynthSpec::new(ModelKind::Homography, 8 + extra, eps).with_seed(seed as u64);
        let mut cfg = BenchConfig::new(spec, trials, EstimatorName::ALL.to_vec());
        cfg.ansac.max_iterations = 100;
        cfg.baseline.max_iterations = 100;
        cfg.success_threshold = success;
        cfg.parallel = false;
        let out = run_bench(&cfg).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let again = summarize(&cfg, &out.rows);
        for s in &again.estimators {
            let rows: Vec<_> = out.rows.iter().filter(|r| r.estimator == s.estimator).collect();
            let hits = rows.iter().filter(|r| r.model_error.is_some_and(|e| e < success)).count();
            prop_assert!((s.success_rate - hits as f64 / rows.len() as f64).abs() < 1e-12);
            let curve = &s.convergence.mean_inlier_ratio;
            prop_assert!(curve.windows(2).all(|w| w[0] <= w[1] + 1e-12), "curve not monotone");
        }
        Ok(())
    })
}
