use std::f64::consts::{PI, TAU};

use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use proptest::prelude::*;
use zenoberry_core::convergence::fit_log_log;
use zenoberry_core::phase::{circular_distance, periodic_distance};
use zenoberry_core::su2::bloch_vector;
use zenoberry_core::zeno::{
    closed_form_finite_n, continuum_state, family, half_turn_limit, pancharatnam_phase,
    projected_state_closed_form, run_free, run_hamiltonian, solid_angle_polygon_formula,
    solid_angle_spherical_polygon, HamiltonianSpec, MeasurementPlan,
};
use zenoberry_core::{Error, Spinor, UnitVec3};

/// Plain 2×2 chain: ψ ← |φ_k⟩⟨φ_k|ψ⟩ with φ_k = (cos θ_k − i n_z sin θ_k, (n_y − i n_x) sin θ_k).
fn naive_chain(n: [f64; 3], a: f64, steps: usize) -> [Complex64; 2] {
    let phi = |k: usize| {
        let t = a * k as f64 / steps as f64;
        [Complex64::new(t.cos(), -n[2] * t.sin()), Complex64::new(n[1] * t.sin(), -n[0] * t.sin())]
    };
    let mut psi = phi(0);
    for k in 1..=steps {
        let f = phi(k);
        let amp = f[0].conj() * psi[0] + f[1].conj() * psi[1];
        psi = [f[0] * amp, f[1] * amp];
    }
    psi
}

fn naive_rho_beta(cos_theta: f64, steps: usize) -> (f64, f64) {
    let sin_theta = (1.0 - cos_theta * cos_theta).sqrt();
    let psi = naive_chain([sin_theta, 0.0, cos_theta], PI, steps);
    (psi[0].norm(), -psi[0].arg())
}

#[test]
fn closed_form_at_half_cone_pentagon() {
    let cf = closed_form_finite_n(0.5, 5).unwrap();
    let (rho, beta) = naive_rho_beta(0.5, 5);
    assert_abs_diff_eq!(cf.rho, rho, epsilon = 1e-12);
    assert!(circular_distance(cf.beta, beta) < 1e-12);
}

#[test]
fn closed_form_grid_against_naive_chain() {
    for &c in &[-0.9, -0.5, 0.0, 0.3, 0.7, 1.0] {
        for n in 3..=64 {
            let cf = closed_form_finite_n(c, n).unwrap();
            let (rho, beta) = naive_rho_beta(c, n);
            assert!((cf.rho - rho).abs() < 1e-12, "rho at cos={c}, N={n}");
            assert!(circular_distance(cf.beta, beta) < 1e-12, "beta at cos={c}, N={n}");
        }
    }
}

#[test]
fn run_free_matches_naive_chain() {
    let axes = [UnitVec3::from_spherical(0.4, 1.1), UnitVec3::from_spherical(2.0, -0.3), UnitVec3::Y];
    for axis in axes {
        for &(a, n) in &[(PI, 7usize), (1.3, 12), (-2.2, 40)] {
            let r = run_free(&MeasurementPlan::new(axis, a, n).unwrap()).unwrap();
            let psi = naive_chain(axis.to_array(), a, n);
            assert_abs_diff_eq!((r.final_state.c0 - psi[0]).norm(), 0.0, epsilon = 1e-13);
            assert_abs_diff_eq!((r.final_state.c1 - psi[1]).norm(), 0.0, epsilon = 1e-13);
        }
    }
}

#[test]
fn hexagon_formula_matches_polygon_routine() {
    let plan = MeasurementPlan::with_cos_theta(0.5, PI, 6).unwrap();
    let fam = family(&plan);
    let verts: Vec<UnitVec3> = fam[..6].iter().map(|s| bloch_vector(s).unwrap()).collect();
    let routine = solid_angle_spherical_polygon(&verts).unwrap();
    let formula = solid_angle_polygon_formula(0.5, 6).unwrap();
    assert!(periodic_distance(routine, formula, 2.0 * TAU) < 1e-9);
}

#[test]
fn pentagon_family_solid_angle() {
    let plan = MeasurementPlan::with_cos_theta(0.5, PI, 5).unwrap();
    let verts: Vec<UnitVec3> = family(&plan)[..5].iter().map(|s| bloch_vector(s).unwrap()).collect();
    let routine = solid_angle_spherical_polygon(&verts).unwrap();
    // 2π − 2N atan(n_z tan(π/N)) evaluated directly
    let expected = TAU - 10.0 * (0.5 * (PI / 5.0).tan()).atan();
    assert!(periodic_distance(routine, expected, 2.0 * TAU) < 1e-9);
}

#[test]
fn pancharatnam_loop_equals_closed_form_beta() {
    for &c in &[-0.5, 0.3, 0.7] {
        for n in [3usize, 8, 33] {
            let mut states = family(&MeasurementPlan::with_cos_theta(c, PI, n).unwrap());
            states.push(Spinor::UP);
            let gamma = pancharatnam_phase(&states).unwrap();
            let beta = closed_form_finite_n(c, n).unwrap().beta;
            assert!(circular_distance(gamma, beta) < 1e-12);
        }
    }
}

#[test]
fn continuum_error_decays_like_one_over_n() {
    let steps: Vec<usize> = (3..=10).map(|k| 1 << k).collect();
    let errs: Vec<f64> = steps
        .iter()
        .map(|&n| {
            let plan = MeasurementPlan::with_cos_theta(0.5, PI, n).unwrap();
            run_free(&plan).unwrap().final_state.distance(&continuum_state(&plan))
        })
        .collect();
    let xs: Vec<f64> = steps.iter().map(|&n| n as f64).collect();
    let fit = fit_log_log(&xs, &errs).unwrap();
    assert!((-1.2..=-0.8).contains(&fit.slope), "slope {}", fit.slope);
}

#[test]
fn survival_tends_to_one() {
    let mut last = 0.0;
    for n in [4usize, 16, 64, 256, 1024] {
        let p = run_free(&MeasurementPlan::with_cos_theta(0.0, PI, n).unwrap()).unwrap().survival_probability;
        assert!(p > last);
        last = p;
    }
    // 1 − P ≈ π²/N at the equator
    assert!((1.0 - last) < 1e-2);
}

#[test]
fn equatorial_two_step_chain_is_killed() {
    let plan = MeasurementPlan::new(UnitVec3::X, PI, 2).unwrap();
    assert!(matches!(run_free(&plan), Err(Error::EvolutionKilled { step: 1, .. })));
}

#[test]
fn hamiltonian_phases_approach_half_turn_limit() {
    let n = UnitVec3::new(0.8, 0.0, 0.6).unwrap();
    let b = UnitVec3::normalize(0.0, 1.0, 1.0).unwrap();
    let plan = MeasurementPlan::new(n, PI, 2000).unwrap();
    let h = HamiltonianSpec::new(1.0, b, 1.5).unwrap();
    let r = run_hamiltonian(&plan, &h).unwrap();
    let limit = half_turn_limit(&plan, &h).unwrap();
    // −μT (b·n) n_z, written out
    let expected_dyn = -1.5 * (0.6 / 2f64.sqrt()) * 0.6;
    assert_abs_diff_eq!(limit.dynamical, expected_dyn, epsilon = 1e-15);
    assert!((r.dynamical_phase - expected_dyn).abs() < 5e-3);
    assert!(circular_distance(r.geometric_phase, limit.geometric) < 5e-3);
}

proptest! {
    #[test]
    fn survival_is_norm_squared(t in 0.0..PI, p in -PI..PI, a in -6.0..6.0f64, n in 1usize..200) {
        let plan = MeasurementPlan::new(UnitVec3::from_spherical(t, p), a, n).unwrap();
        if let Ok(r) = run_free(&plan) {
            prop_assert!((r.survival_probability - r.final_state.norm_sqr()).abs() <= 1e-12);
            prop_assert!(r.survival_probability <= 1.0 + 1e-12);
            prop_assert_eq!(r.dynamical_phase, 0.0);
            prop_assert_eq!(r.trajectory.len(), n + 1);
        }
    }

    #[test]
    fn free_run_matches_projected_closed_form(t in 0.0..PI, p in -PI..PI, a in -6.0..6.0f64, n in 1usize..200) {
        let plan = MeasurementPlan::new(UnitVec3::from_spherical(t, p), a, n).unwrap();
        if let Ok(r) = run_free(&plan) {
            let cf = projected_state_closed_form(&plan);
            prop_assert!(r.final_state.distance(&cf) <= 1e-11);
        }
    }

    #[test]
    fn zero_hamiltonian_equals_free_run(t in 0.0..PI, p in -PI..PI, n in 1usize..100) {
        let plan = MeasurementPlan::new(UnitVec3::from_spherical(t, p), 2.0, n).unwrap();
        let h = HamiltonianSpec::new(0.0, UnitVec3::X, 3.0).unwrap();
        if let Ok(free) = run_free(&plan) {
            let driven = run_hamiltonian(&plan, &h).unwrap();
            prop_assert_eq!(driven.final_state, free.final_state);
            prop_assert_eq!(driven.dynamical_phase, 0.0);
        }
    }

    #[test]
    fn trajectory_states_are_normalized_family_members(t in 0.0..PI, p in -PI..PI, n in 1usize..60) {
        let plan = MeasurementPlan::new(UnitVec3::from_spherical(t, p), PI, n).unwrap();
        if let Ok(r) = run_free(&plan) {
            let fam = family(&plan);
            for (point, phi) in r.trajectory.iter().zip(&fam) {
                prop_assert!((point.state.norm() - 1.0).abs() <= 1e-12);
                prop_assert!((phi.inner(&point.state).norm() - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn closed_form_beta_is_twice_solid_angle(c in -1.0..1.0f64, n in 3usize..200) {
        let cf = closed_form_finite_n(c, n).unwrap();
        let omega = solid_angle_polygon_formula(c, n).unwrap();
        prop_assert!((omega - 2.0 * cf.beta).abs() <= 1e-12);
    }
}
