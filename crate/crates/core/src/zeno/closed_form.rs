//! Closed-form predictions for projection chains and the solid angles they
//! sweep out.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::su2::{rotation_operator, Complex, Spinor};
use crate::zeno::{HamiltonianSpec, MeasurementPlan};

/// Amplitude `ρ_N` and phase `β_N` of `ψ(T) = ρ_N e^{-iβ_N} φ_0` for a
/// half-turn (`a = π`) chain of `N` projections.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiniteNClosedForm {
    pub rho: f64,
    pub beta: f64,
}

fn check_cos(cos_theta: f64) -> Result<()> {
    if (-1.0..=1.0).contains(&cos_theta) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("cos theta must lie in [-1, 1], got {cos_theta}")))
    }
}

fn check_steps(steps: usize) -> Result<()> {
    if steps < 3 {
        Err(Error::UnsupportedStepCount(steps))
    } else {
        Ok(())
    }
}

/// `π − N arctan(cos Θ tan(π/N))`, shared so that `Ω_N = 2β_N` holds bit for bit.
fn polygon_half_angle(cos_theta: f64, steps: usize) -> f64 {
    let n = steps as f64;
    PI - n * (cos_theta * (PI / n).tan()).atan()
}

pub fn closed_form_finite_n(cos_theta: f64, steps: usize) -> Result<FiniteNClosedForm> {
    check_cos(cos_theta)?;
    check_steps(steps)?;
    let n = steps as f64;
    let (s, c) = (PI / n).sin_cos();
    let rho = (c * c + cos_theta * cos_theta * s * s).powf(n / 2.0);
    Ok(FiniteNClosedForm { rho, beta: polygon_half_angle(cos_theta, steps) })
}

/// `Ω = 2π(1 − cos Θ)`, the cap bounded by a circle at polar angle `Θ`.
pub fn solid_angle_cone(cos_theta: f64) -> Result<f64> {
    check_cos(cos_theta)?;
    Ok(TAU * (1.0 - cos_theta))
}

/// `Ω_N = 2π − 2N arctan(cos Θ tan(π/N))` for the regular geodesic `N`-gon
/// inscribed in that circle.
pub fn solid_angle_polygon_formula(cos_theta: f64, steps: usize) -> Result<f64> {
    check_cos(cos_theta)?;
    check_steps(steps)?;
    Ok(2.0 * polygon_half_angle(cos_theta, steps))
}

/// `cos^N(a/N) (1 + i n_z tan(a/N))^N φ_N`, written as
/// `(cos(a/N) + i n_z sin(a/N))^N φ_N` so it stays finite at `a/N = π/2`.
pub fn projected_state_closed_form(plan: &MeasurementPlan) -> Spinor {
    let n = plan.steps();
    let step = plan.total_angle() / n as f64;
    let (s, c) = step.sin_cos();
    let per_step = Complex::new(c, plan.axis().z() * s);
    let phi_n = rotation_operator(&plan.axis(), plan.total_angle()).apply(&Spinor::UP);
    phi_n.scale(per_step.powi(n as i32))
}

/// `(cos²(a/N) + n_z² sin²(a/N))^N`.
pub fn survival_closed_form(plan: &MeasurementPlan) -> f64 {
    let n = plan.steps();
    let (s, c) = (plan.total_angle() / n as f64).sin_cos();
    let nz = plan.axis().z();
    (c * c + nz * nz * s * s).powi(n as i32)
}

/// Continuum-limit phases of a half-turn chain under `H = μ σ·b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfTurnLimit {
    /// `−μT (b·n) n_z`
    pub dynamical: f64,
    /// `−Ω/2` reduced to `[0, 2π)`, with `Ω = 2π(1 − n_z)`.
    pub geometric: f64,
    /// `Ω/2`
    pub berry: f64,
    pub solid_angle: f64,
}

/// Limit phases for `a = π`; `None` for any other total angle.
pub fn half_turn_limit(plan: &MeasurementPlan, h: &HamiltonianSpec) -> Option<HalfTurnLimit> {
    if (plan.total_angle() - PI).abs() > 1e-12 {
        return None;
    }
    let n = plan.axis();
    let omega = TAU * (1.0 - n.z());
    Some(HalfTurnLimit {
        dynamical: -h.mu() * h.total_time() * h.axis().dot(&n) * n.z(),
        geometric: crate::phase::wrap_2pi(-omega / 2.0),
        berry: omega / 2.0,
        solid_angle: omega,
    })
}
