use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;
use starcovert::conic::dump::{from_json, to_json};
use starcovert::conic::{
    extract_rank_one, linearize_spectral_norm, rank_one_gap, solve_sdp, Coeff, QuadForm, RankOneProblem, Relation,
    SdpProblem, SdpStatus, Sense, SolverOptions, Term,
};
use starcovert::model::{cn01, substream_rng};
use starcovert::C64;

fn gaussian(n: usize, k: usize, seed: u64) -> DMatrix<C64> {
    let mut rng = substream_rng(seed, 31);
    DMatrix::from_fn(n, k, |_, _| cn01(&mut rng))
}

fn hermitian(n: usize, seed: u64) -> DMatrix<C64> {
    let g = gaussian(n, n, seed);
    (&g + g.adjoint()) * C64::new(0.5, 0.0)
}

/// PSD matrix of rank `k`.
fn psd(n: usize, k: usize, seed: u64) -> DMatrix<C64> {
    let g = gaussian(n, k, seed);
    &g * g.adjoint()
}

fn eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    *eigenvalues(m).last().unwrap()
}

fn assert_valid_solution(p: &SdpProblem, blocks: &[DMatrix<C64>], tol: f64) {
    for b in blocks {
        assert!((b - b.adjoint()).norm() <= 1e-9 * (1.0 + b.norm()));
        assert!(eigenvalues(b)[0] >= -1e-8 * (1.0 + b.norm()));
    }
    assert!(p.max_violation(blocks) <= tol);
}

#[test]
fn largest_eigenvalue_by_trace_budget() {
    for (n, seed) in [(2, 1), (5, 2), (12, 3), (30, 4)] {
        let a = hermitian(n, seed);
        let mut p = SdpProblem::new(vec![n], Sense::Maximize);
        p.add_objective(0, Coeff::Dense(a.clone()));
        p.add_constraint(vec![Term::new(0, Coeff::identity(n))], Relation::Le, 1.0);
        let s = solve_sdp(&p, &SolverOptions::default()).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        let top = spectral_norm(&a);
        if top > 0.0 {
            assert!((s.objective - top).abs() <= 1e-6 * (1.0 + top.abs()), "{n}: {} vs {top}", s.objective);
        }
        assert_valid_solution(&p, &s.blocks, 1e-7);
    }
}

#[test]
fn contradictory_bounds_are_infeasible() {
    let mut p = SdpProblem::new(vec![3], Sense::Minimize);
    p.add_objective(0, Coeff::identity(3));
    p.add_constraint(vec![Term::new(0, Coeff::identity(3))], Relation::Le, 1.0);
    p.add_constraint(vec![Term::new(0, Coeff::identity(3))], Relation::Ge, 2.0);
    assert_eq!(solve_sdp(&p, &SolverOptions::default()).unwrap().status, SdpStatus::Infeasible);
}

#[test]
fn malformed_problems_are_rejected() {
    let mut p = SdpProblem::new(vec![2], Sense::Minimize);
    p.add_objective(0, Coeff::Dense(gaussian(2, 2, 1)));
    assert!(solve_sdp(&p, &SolverOptions::default()).is_err());
    let mut q = SdpProblem::new(vec![2], Sense::Minimize);
    q.add_constraint(vec![Term::new(3, Coeff::identity(2))], Relation::Le, 1.0);
    assert!(q.validate().is_err());
}

/// `max Tr(A W)`, `Tr(W) <= P`, `Tr(B W) <= c`, the covert-beamformer shape.
fn beamformer_problem(seed: u64, reverse: bool) -> SdpProblem {
    let m = 3;
    let a = psd(m, 1, seed);
    let b = psd(m, 1, seed + 1000);
    let budget_b = 0.3 * spectral_norm(&b);
    let mut p = SdpProblem::new(vec![m], Sense::Maximize);
    p.add_objective(0, Coeff::Dense(a));
    let mut rows = vec![
        (vec![Term::new(0, Coeff::identity(m))], Relation::Le, 2.0),
        (vec![Term::new(0, Coeff::Dense(b))], Relation::Le, budget_b),
    ];
    if reverse {
        rows.reverse();
    }
    for (t, r, v) in rows {
        p.add_constraint(t, r, v);
    }
    p
}

#[test]
fn beamformer_relaxation_agrees_across_solver_setups() {
    for seed in 0..10 {
        let base = beamformer_problem(seed, false);
        let a = solve_sdp(&base, &SolverOptions::default()).unwrap();
        let other = beamformer_problem(seed, true);
        let b = solve_sdp(&other, &SolverOptions { scaling: false, step_fraction: 0.9, ..SolverOptions::default() }).unwrap();
        assert_eq!(a.status, SdpStatus::Optimal);
        assert_eq!(b.status, SdpStatus::Optimal);
        assert!((a.objective - b.objective).abs() <= 1e-6 * a.objective.abs().max(1e-12), "{} vs {}", a.objective, b.objective);
        assert_valid_solution(&base, &a.blocks, 1e-8);
    }
}

#[test]
fn gap_examples() {
    let eye = DMatrix::<C64>::identity(2, 2);
    assert!((rank_one_gap(&eye).unwrap() - 1.0).abs() < 1e-12);
    let ones = DMatrix::from_element(2, 2, C64::new(1.0, 0.0));
    assert!(rank_one_gap(&ones).unwrap().abs() < 1e-12);
    assert!(rank_one_gap(&(-eye)).is_err());
}

#[test]
fn minorant_of_rank_one_reference_is_rayleigh_quotient() {
    let r = psd(4, 1, 8);
    let m = linearize_spectral_norm(&r);
    let q = psd(4, 3, 9);
    let u = &m.q;
    let rayleigh = (u.adjoint() * &q * u)[(0, 0)].re;
    assert!((m.evaluate(&q) - rayleigh).abs() < 1e-9 * (1.0 + rayleigh));
    assert!((m.evaluate(&r) - spectral_norm(&r)).abs() < 1e-10 * spectral_norm(&r));
}

#[test]
fn exact_rank_one_is_recovered() {
    let q = psd(5, 1, 2);
    let a = psd(5, 2, 3);
    let problem = RankOneProblem {
        sense: Sense::Maximize,
        objective: a.clone(),
        constraints: vec![QuadForm { matrix: DMatrix::identity(5, 5), relation: Relation::Le, rhs: q.trace().re }],
    };
    let r = extract_rank_one(&q, &problem, 0, 1).unwrap();
    assert_eq!(r.candidate, 0);
    let lifted = &r.v * r.v.adjoint();
    assert!((&lifted - &q).norm() <= 1e-9 * q.norm());
    let sdp_value = Coeff::Dense(a).inner(&q);
    assert!((r.objective - sdp_value).abs() <= 1e-9 * sdp_value);
}

#[test]
fn randomization_recovers_most_of_rank_two_value() {
    let mut ratio = 0.0;
    for s in 0..50 {
        let q = psd(6, 2, 100 + s);
        let q = &q / C64::new(q.trace().re, 0.0);
        let a = psd(6, 3, 200 + s);
        let problem = RankOneProblem {
            sense: Sense::Maximize,
            objective: a.clone(),
            constraints: vec![QuadForm { matrix: DMatrix::identity(6, 6), relation: Relation::Le, rhs: 1.0 }],
        };
        let r = extract_rank_one(&q, &problem, 100, s).unwrap();
        assert!(r.v.norm_squared() <= 1.0 + 1e-9);
        ratio += r.objective / Coeff::Dense(a).inner(&q);
    }
    assert!(ratio / 50.0 >= 0.95, "{}", ratio / 50.0);
}

#[test]
fn infeasible_candidates_fail_explicitly() {
    let q = psd(3, 1, 4);
    let problem = RankOneProblem {
        sense: Sense::Maximize,
        objective: DMatrix::identity(3, 3),
        constraints: vec![
            QuadForm { matrix: DMatrix::identity(3, 3), relation: Relation::Le, rhs: 1.0 },
            QuadForm { matrix: DMatrix::identity(3, 3), relation: Relation::Ge, rhs: 2.0 },
        ],
    };
    assert!(extract_rank_one(&q, &problem, 10, 0).is_err());
}

#[test]
fn dump_round_trip() {
    let p = beamformer_problem(3, false);
    let text = to_json(&p);
    let back = from_json(&text).unwrap();
    assert_eq!(back, p);
    let a = solve_sdp(&p, &SolverOptions::default()).unwrap();
    let b = solve_sdp(&back, &SolverOptions::default()).unwrap();
    assert_eq!(a.objective, b.objective);
    assert!(from_json("{").is_err());
}

proptest! {
    #[test]
    fn gap_is_sum_of_lower_eigenvalues(n in 1usize..8, k in 1usize..8, seed in 0u64..10_000) {
        let q = psd(n, k.min(n), seed);
        let ev = eigenvalues(&q);
        let rest: f64 = ev[..ev.len() - 1].iter().sum();
        let g = rank_one_gap(&q).unwrap();
        prop_assert!(g >= 0.0);
        prop_assert!((g - rest.max(0.0)).abs() <= 1e-9 * (1.0 + q.norm()));
    }

    #[test]
    fn minorant_is_tangent_and_below(n in 1usize..7, seed in 0u64..10_000) {
        let r = psd(n, 1 + (seed as usize % n), seed);
        let q = psd(n, 1 + (seed as usize / 7 % n), seed + 1);
        let m = linearize_spectral_norm(&r);
        prop_assert!((m.evaluate(&r) - spectral_norm(&r)).abs() <= 1e-10 * (1.0 + spectral_norm(&r)));
        prop_assert!(m.evaluate(&q) <= spectral_norm(&q) + 1e-10 * (1.0 + q.norm()));
    }

    #[test]
    fn solutions_respect_their_constraints(n in 2usize..7, seed in 0u64..10_000) {
        let a = hermitian(n, seed);
        let b = psd(n, 2, seed + 5);
        let mut p = SdpProblem::new(vec![n], Sense::Minimize);
        p.add_objective(0, Coeff::Dense(a));
        p.add_constraint(vec![Term::new(0, Coeff::identity(n))], Relation::Eq, 1.0);
        p.add_constraint(vec![Term::new(0, Coeff::Dense(b.clone()))], Relation::Ge, 0.5 * b.trace().re / n as f64);
        let s = solve_sdp(&p, &SolverOptions::default()).unwrap();
        prop_assert_eq!(s.status, SdpStatus::Optimal);
        assert_valid_solution(&p, &s.blocks, 1e-7);
    }
}
