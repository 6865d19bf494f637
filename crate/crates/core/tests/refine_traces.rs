mod common;

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sosrelax::compile::GramCone;
use sosrelax::conic::{admm_solve, SolverOptions, Status};
use sosrelax::poly::{random_form, Exponent, Polynomial};
use sosrelax::refine::*;

fn tight() -> SolverOptions {
    SolverOptions { tol: 1e-8, max_iters: 300_000, ..Default::default() }
}

fn poly(n: usize, terms: &[(f64, &[u32])]) -> Polynomial {
    Polynomial::from_terms(n, terms.iter().map(|(c, e)| (Exponent::new(e.to_vec()), *c))).unwrap()
}

fn bound(problem: &BoundProblem, cone: GramCone) -> f64 {
    let c = problem.compile(cone).unwrap();
    let sol = admm_solve(&c.program, &tight()).unwrap();
    assert_eq!(sol.status, Status::Solved, "{cone}");
    c.gamma_value(&sol.x).unwrap()
}

fn pab(a: f64, b: f64) -> Polynomial {
    poly(2, &[(2.0, &[4, 0]), (a, &[3, 1]), (1.0 - a, &[2, 2]), (b, &[1, 3]), (2.0, &[0, 4])])
}

fn assert_monotone(trace: &RefinementTrace, slack: f64) {
    for w in trace.steps.windows(2) {
        assert!(w[1].bound >= w[0].bound - slack, "{:?}", trace.bounds());
    }
}

#[test]
fn atlas_examples() {
    let a = dd_extreme_rays(2, 2).unwrap();
    assert_eq!(a.rays, vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![1, -1]]);
    assert_eq!(dd_extreme_rays(3, 2).unwrap().len(), 9);
    assert_eq!(dd_extreme_rays(3, 3).unwrap().len(), 13);
    assert!(dd_extreme_rays(3, 0).is_err());
    assert!(dd_extreme_rays(3, 4).is_err());
}

#[test]
fn atlas_counts_are_n_squared() {
    for n in 2..=8 {
        let a = dd_extreme_rays(n, 2).unwrap();
        assert_eq!(a.len(), n * n);
        let mut seen = std::collections::HashSet::new();
        for r in &a.rays {
            let neg: Vec<i8> = r.iter().map(|v| -v).collect();
            assert!(seen.insert(r.clone()) && !seen.contains(&neg));
        }
    }
}

#[test]
fn atlas_push_canonicalizes() {
    let mut a = dd_extreme_rays(3, 2).unwrap();
    assert!(!a.push(&[-1, 0, 0]));
    assert!(!a.push(&[0, -1, 1]));
    assert!(a.push(&[-1, 1, 1]));
    assert!(a.contains(&[1, -1, -1]));
    assert_eq!(a.len(), 10);
}

#[test]
fn reconstruct_examples() {
    let atlas = dd_extreme_rays(2, 2).unwrap();
    assert_eq!(reconstruct_dd(&DMatrix::identity(2, 2), &atlas).unwrap(), vec![1.0, 1.0, 0.0, 0.0]);
    assert_eq!(reconstruct_dd(&DMatrix::from_element(2, 2, 1.0), &atlas).unwrap(), vec![0.0, 0.0, 1.0, 0.0]);
    let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
    assert!(matches!(reconstruct_dd(&bad, &atlas), Err(RefineError::NotDiagonallyDominant { .. })));
    assert!(matches!(
        reconstruct_dd(&DMatrix::identity(3, 3), &atlas),
        Err(RefineError::DimensionMismatch { expected: 2, found: 3 })
    ));
}

#[test]
fn reconstruct_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..200 {
        let n = rng.random_range(1..=10);
        let atlas = dd_extreme_rays(n, n.min(2)).unwrap();
        // sparse nonnegative mix so that some entries are exactly zero
        let alpha: Vec<f64> =
            (0..atlas.len()).map(|_| if rng.random_bool(0.6) { rng.random_range(0.0..3.0) } else { 0.0 }).collect();
        let q = atlas.combine(&alpha);
        let back = reconstruct_dd(&q, &atlas).unwrap();
        assert!(back.iter().all(|&a| a >= 0.0));
        let err = (atlas.combine(&back) - &q).abs().max();
        assert!(err <= 1e-12, "n={n} err={err}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn reconstruct_accepts_exactly_dd(entries in proptest::collection::vec(-2.0f64..2.0, 16)) {
        let m = DMatrix::from_row_slice(4, 4, &entries);
        let q = (&m + m.transpose()) * 0.5;
        let dd = (0..4).all(|i| {
            let off: f64 = (0..4).filter(|&j| j != i).map(|j| q[(i, j)].abs()).sum();
            q[(i, i)] >= off
        });
        let atlas = dd_extreme_rays(4, 2).unwrap();
        prop_assert_eq!(reconstruct_dd(&q, &atlas).is_ok(), dd);
    }
}

#[test]
fn pricing_on_psd_dual_finds_nothing() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let b = DMatrix::from_fn(6, 6, |_, _| rng.random_range(-1.0..1.0));
    let x = &b * b.transpose();
    let atlas = dd_extreme_rays(6, 2).unwrap();
    let found = price(&x, &atlas, 3, 5);
    assert_eq!(found.len(), 5);
    assert!(found.iter().all(|(r, v)| *v >= -1e-12 && !atlas.contains(r)));
    assert!(found.windows(2).all(|w| w[0].1 <= w[1].1));
}

#[test]
fn pricing_finds_the_negative_direction() {
    // X = I - 0.9 * u u^T with u = (1, -1, 1) / sqrt(3) is indefinite only along u
    let u = nalgebra::DVector::from_vec(vec![1.0, -1.0, 1.0]) / 3f64.sqrt();
    let x = DMatrix::identity(3, 3) * 0.25 - &u * u.transpose() * 0.9;
    let atlas = dd_extreme_rays(3, 2).unwrap();
    let best = &price(&x, &atlas, 3, 1)[0];
    assert_eq!(best.0, vec![1, -1, 1]);
    assert!((best.1 - (0.75 - 2.7)).abs() < 1e-12);
}

#[test]
fn column_generation_on_perfect_square() {
    // x^4 - 2x^2 + 1 = (x^2 - 1)^2 has a dd Gram matrix at its minimum 0
    let p = poly(1, &[(1.0, &[4]), (-2.0, &[2]), (1.0, &[0])]);
    let trace = column_generation(&BoundProblem::pop(&p).unwrap(), &ColumnGenOptions::default()).unwrap();
    assert!(trace.steps.len() == 1 || trace.bounds().iter().all(|b| b.abs() < 1e-3), "{:?}", trace.bounds());
    assert!(trace.bounds().iter().all(|b| b.abs() < 1e-3));
    assert_eq!(trace.status, TerminalStatus::NoImprovingRay);
}

#[test]
fn column_generation_rejects_singleton_start() {
    let p = poly(1, &[(1.0, &[2])]);
    let opts = ColumnGenOptions { initial_k: 1, ..Default::default() };
    assert!(matches!(column_generation(&BoundProblem::pop(&p).unwrap(), &opts), Err(RefineError::Invalid(_))));
}

#[test]
fn column_generation_improves_sphere_bounds() {
    for seed in 0..4 {
        let problem = BoundProblem::form_on_sphere(&random_form(4, 4, seed)).unwrap();
        let sos = bound(&problem, GramCone::Sos);
        let dsos = bound(&problem, GramCone::Dsos);
        let trace = column_generation(&problem, &ColumnGenOptions::default()).unwrap();
        assert_monotone(&trace, 1e-6);
        assert!((trace.initial_bound().unwrap() - dsos).abs() < 1e-4, "seed {seed}");
        assert!(trace.final_bound().unwrap() >= trace.initial_bound().unwrap());
        assert!(trace.bounds().iter().all(|&b| b <= sos + 1e-3), "seed {seed}");
        let rays = trace.rays.as_ref().unwrap();
        assert_eq!(rays.len(), 100 + trace.steps.len() - 1);
        if trace.status == TerminalStatus::NoImprovingRay {
            assert!(trace.steps.last().unwrap().min_reduced_cost.unwrap() >= -1e-6);
        }
    }
}

#[test]
fn no_improving_ray_means_no_improvement() {
    let problem = BoundProblem::form_on_sphere(&random_form(3, 4, 2)).unwrap();
    let opts = ColumnGenOptions { max_iters: 200, patience: 200, ..Default::default() };
    let trace = column_generation(&problem, &opts).unwrap();
    assert_eq!(trace.status, TerminalStatus::NoImprovingRay);
    let mut atlas = RayAtlas { n: problem.basis.len(), k: 3, rays: trace.rays.clone().unwrap() };
    let lp = RayProgram::new(&problem, &atlas).unwrap();
    let sol = admm_solve(&lp.program, &opts.solver).unwrap();
    let x = lp.dual_matrix(&sol.y);
    let (ray, rc) = price(&x, &atlas, 3, 1).remove(0);
    assert!(rc >= -1e-6);
    atlas.push(&ray);
    let lp2 = RayProgram::new(&problem, &atlas).unwrap();
    let sol2 = admm_solve(&lp2.program, &opts.solver).unwrap();
    assert!((sol2.x[0] - sol.x[0]).abs() < 1e-4, "{} vs {}", sol.x[0], sol2.x[0]);
}

#[test]
fn basis_pursuit_on_square() {
    let p = poly(1, &[(1.0, &[0]), (2.0, &[1]), (1.0, &[2])]);
    for cone in [GramCone::Dsos, GramCone::Sdsos] {
        let opts = BasisPursuitOptions { cone, max_iters: 3, ..Default::default() };
        let trace = basis_pursuit(&BoundProblem::pop(&p).unwrap(), &opts).unwrap();
        assert!(trace.bounds().iter().all(|b| b.abs() < 1e-4), "{cone}: {:?}", trace.bounds());
    }
}

#[test]
fn basis_pursuit_is_monotone_and_dominated() {
    for seed in 0..3 {
        let problem = BoundProblem::form_on_sphere(&random_form(4, 4, seed)).unwrap();
        let sos = bound(&problem, GramCone::Sos);
        for cone in [GramCone::Dsos, GramCone::Sdsos] {
            let trace = basis_pursuit(&problem, &BasisPursuitOptions { cone, ..Default::default() }).unwrap();
            assert_monotone(&trace, 1e-6);
            assert!(trace.bounds().iter().all(|&b| b <= sos + 1e-3), "{cone} seed {seed}");
            assert!(trace.steps.iter().all(|s| s.condition_number.unwrap() >= 1.0 - 1e-9));
            assert_eq!(trace.steps[0].condition_number, Some(1.0));
        }
    }
}

/// Scale `t` along `(a, b) = t * (-3, 4)` where `cone` stops certifying `p_{a,b}`.
fn boundary(cone: GramCone, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        let problem = BoundProblem::form_on_sphere(&pab(-3.0 * mid, 4.0 * mid)).unwrap();
        if bound(&problem, cone) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[test]
fn basis_pursuit_moves_past_the_sdsos_boundary() {
    let t_sdsos = boundary(GramCone::Sdsos, 1.0, 4.0);
    let t_sos = boundary(GramCone::Sos, t_sdsos, 8.0);
    assert!(t_sos > t_sdsos + 0.1, "{t_sdsos} {t_sos}");
    let t = 0.5 * (t_sdsos + t_sos);
    let problem = BoundProblem::form_on_sphere(&pab(-3.0 * t, 4.0 * t)).unwrap();
    let sos = bound(&problem, GramCone::Sos);
    assert!(sos > 0.0);
    let trace =
        basis_pursuit(&problem, &BasisPursuitOptions { cone: GramCone::Sdsos, max_iters: 3, ..Default::default() })
            .unwrap();
    let b = trace.bounds();
    assert!(b[0] < 0.0, "{b:?}");
    assert!(b[1] > b[0] + 1e-3, "{b:?}");
    assert!(b.iter().all(|&g| g <= sos + 1e-3), "{b:?} vs {sos}");
}

#[test]
fn expansion_gap_is_tiny_for_random_transforms() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let problem = BoundProblem::form_on_sphere(&random_form(3, 4, 1)).unwrap();
    let side = problem.basis.len();
    let t = DMatrix::from_fn(side, side, |_, _| rng.random_range(-1.0..1.0));
    let basis = sosrelax::compile::GramBasis::Transformed { monomials: problem.basis.clone(), transform: t };
    assert!(expansion_gap(&basis, 3).unwrap() < 1e-12);
}

#[test]
fn factor_of_indefinite_matrix_fails() {
    let q = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    assert!(shifted_factor(&q, 1e-9).is_none());
    let p = DMatrix::from_row_slice(2, 2, &[4.0, 2.0, 2.0, 2.0]);
    let r = shifted_factor(&p, 0.0).unwrap();
    assert!((r.transpose() * &r - &p).abs().max() < 1e-12);
    assert_eq!(r[(1, 0)], 0.0);
}

#[test]
fn trace_serializes() {
    let p = poly(1, &[(1.0, &[0]), (2.0, &[1]), (1.0, &[2])]);
    let trace = column_generation(&BoundProblem::pop(&p).unwrap(), &ColumnGenOptions::default()).unwrap();
    let v: serde_json::Value = serde_json::from_str(&trace.to_json()).unwrap();
    assert_eq!(v["method"], "column-generation");
    assert!(v["steps"][0]["bound"].is_number());
}
