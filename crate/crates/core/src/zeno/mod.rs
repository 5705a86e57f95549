//! Measurement-driven evolution of a spin-1/2.
//!
//! A [`MeasurementPlan`] fixes the family of target states
//! `φ_k = exp(-i θ_k σ·n) |↑⟩` with `θ_k = a k / N`. The state starts in
//! `φ_0 = |↑⟩` and is projected onto `φ_1, …, φ_N` in turn, optionally with
//! free precession under `H = μ σ·b` between projections. The result keeps
//! the unnormalized final state, so its squared norm is the survival
//! probability.
//!
//! Phases are always reported relative to `φ_0`:
//!
//! * `total_phase = arg⟨φ_0|ψ(T)⟩` in `(-π, π]`
//! * `dynamical_phase = -Σ ⟨ψ_k|H|ψ_k⟩ δT` (left-endpoint sum)
//! * `geometric_phase = total − dynamical` in `[0, 2π)`
//! * `berry_phase = dynamical − total` in `[0, 2π)`, the `β` of
//!   `ψ(T) ∝ e^{-iβ} φ_0`

mod closed_form;
mod pancharatnam;
mod solid_angle;

pub use closed_form::{
    closed_form_finite_n, half_turn_limit, projected_state_closed_form, solid_angle_cone,
    solid_angle_polygon_formula, survival_closed_form, FiniteNClosedForm, HalfTurnLimit,
};
pub use pancharatnam::pancharatnam_phase;
pub use solid_angle::{solid_angle_spherical_polygon, solid_angle_triangle};

use crate::error::{Error, Result};
use crate::phase;
use crate::su2::{bloch_vector, project_onto, rotation_operator, Complex, Mat2, Spinor, UnitVec3};

/// Overlaps below this magnitude are treated as underflow.
pub const UNDERFLOW_OVERLAP: f64 = 1e-300;
/// Overlaps this small relative to the incoming state are numerically orthogonal.
pub const ORTHOGONAL_OVERLAP: f64 = 64.0 * f64::EPSILON;

/// Projection axis `n`, total angle `a` and step count `N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementPlan {
    axis: UnitVec3,
    total_angle: f64,
    steps: usize,
}

impl MeasurementPlan {
    pub fn new(axis: UnitVec3, total_angle: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidArgument("a measurement plan needs at least one projection".into()));
        }
        if !total_angle.is_finite() {
            return Err(Error::InvalidArgument(format!("total angle must be finite, got {total_angle}")));
        }
        Ok(Self { axis, total_angle, steps })
    }

    /// A plan with no projections. Only meaningful for [`run_hamiltonian`],
    /// where it yields undisturbed precession.
    pub fn unmeasured() -> Self {
        Self { axis: UnitVec3::Z, total_angle: 0.0, steps: 0 }
    }

    /// Axis `n = (sin Θ, 0, cos Θ)` from `cos Θ`.
    pub fn with_cos_theta(cos_theta: f64, total_angle: f64, steps: usize) -> Result<Self> {
        if !(-1.0..=1.0).contains(&cos_theta) {
            return Err(Error::InvalidArgument(format!("cos theta must lie in [-1, 1], got {cos_theta}")));
        }
        let sin_theta = (1.0 - cos_theta * cos_theta).sqrt();
        Self::new(UnitVec3::new(sin_theta, 0.0, cos_theta)?, total_angle, steps)
    }

    pub fn axis(&self) -> UnitVec3 {
        self.axis
    }

    pub fn total_angle(&self) -> f64 {
        self.total_angle
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// `θ_k = a k / N`.
    pub fn angle_at(&self, k: usize) -> f64 {
        self.total_angle * k as f64 / self.steps as f64
    }

    /// Projection times `T_k = k T / N` for `k = 0..=N`.
    pub fn schedule(&self, total_time: f64) -> Vec<f64> {
        let dt = total_time / self.steps.max(1) as f64;
        (0..=self.steps).map(|k| k as f64 * dt).collect()
    }
}

/// `H = μ σ·b` applied for a total time `T` (ħ = 1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HamiltonianSpec {
    mu: f64,
    axis: UnitVec3,
    total_time: f64,
}

impl HamiltonianSpec {
    pub fn new(mu: f64, axis: UnitVec3, total_time: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::InvalidArgument(format!("mu must be finite, got {mu}")));
        }
        if !(total_time.is_finite() && total_time >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "total time must be finite and non-negative, got {total_time}"
            )));
        }
        Ok(Self { mu, axis, total_time })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn axis(&self) -> UnitVec3 {
        self.axis
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    /// `⟨s|H|s⟩` for a normalized state.
    pub fn energy(&self, s: &Spinor) -> Result<f64> {
        Ok(self.mu * self.axis.dot(&bloch_vector(s)?))
    }
}

/// One sample of the trajectory, taken right after each projection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryPoint {
    pub step: usize,
    pub time: f64,
    pub state: Spinor,
    pub bloch: UnitVec3,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZenoRunResult {
    pub final_state: Spinor,
    pub survival_probability: f64,
    pub total_phase: f64,
    pub dynamical_phase: f64,
    pub geometric_phase: f64,
    pub berry_phase: f64,
    pub trajectory: Vec<TrajectoryPoint>,
}

/// The target states `φ_0, …, φ_N`.
pub fn family(plan: &MeasurementPlan) -> Vec<Spinor> {
    let axis = plan.axis();
    (0..=plan.steps()).map(|k| rotation_operator(&axis, plan.angle_at(k)).apply(&Spinor::UP)).collect()
}

/// Projection chain with no Hamiltonian. Trajectory times are in units of
/// the total duration.
pub fn run_free(plan: &MeasurementPlan) -> Result<ZenoRunResult> {
    if plan.steps() == 0 {
        return Err(Error::InvalidArgument("run_free needs at least one projection".into()));
    }
    evolve(plan, 1.0, None)
}

/// Projection chain interleaved with precession `exp(-i μ δT σ·b)`.
pub fn run_hamiltonian(plan: &MeasurementPlan, h: &HamiltonianSpec) -> Result<ZenoRunResult> {
    if plan.steps() == 0 {
        return Ok(undisturbed(h));
    }
    evolve(plan, h.total_time(), Some(h))
}

/// The `N → ∞` limit `e^{i a n_z} exp(-i a σ·n) φ_0`.
pub fn continuum_state(plan: &MeasurementPlan) -> Spinor {
    let axis = plan.axis();
    let a = plan.total_angle();
    rotation_operator(&axis, a).apply(&Spinor::UP).scale(Complex::from_polar(1.0, a * axis.z()))
}

fn evolve(plan: &MeasurementPlan, total_time: f64, h: Option<&HamiltonianSpec>) -> Result<ZenoRunResult> {
    let targets = family(plan);
    let steps = plan.steps();
    let dt = total_time / steps as f64;
    let propagator: Option<Mat2> = h.map(|h| rotation_operator(&h.axis(), h.mu() * dt));

    let mut psi = targets[0];
    let mut dynamical = 0.0;
    let mut trajectory = Vec::with_capacity(steps + 1);
    trajectory.push(TrajectoryPoint { step: 0, time: 0.0, state: psi, bloch: bloch_vector(&psi)? });

    for k in 1..=steps {
        if let (Some(h), Some(u)) = (h, &propagator) {
            // the state at T_{k-1} is φ_{k-1} up to phase
            dynamical -= h.energy(&targets[k - 1])? * dt;
            psi = u.apply(&psi);
        }
        let target = &targets[k];
        let overlap = target.inner(&psi).norm();
        if overlap < UNDERFLOW_OVERLAP || overlap <= ORTHOGONAL_OVERLAP * psi.norm() {
            return Err(Error::EvolutionKilled { step: k, overlap });
        }
        psi = project_onto(target, &psi)?;
        let state = psi.scale(Complex::new(1.0 / overlap, 0.0));
        trajectory.push(TrajectoryPoint {
            step: k,
            time: k as f64 * dt,
            state,
            bloch: bloch_vector(target)?,
        });
    }

    Ok(summarize(psi, dynamical, trajectory))
}

fn undisturbed(h: &HamiltonianSpec) -> ZenoRunResult {
    let t = h.total_time();
    let psi = rotation_operator(&h.axis(), h.mu() * t).apply(&Spinor::UP);
    // energy is conserved, so the left-endpoint sum is exact here
    let dynamical = -h.mu() * h.axis().z() * t;
    let trajectory = vec![
        TrajectoryPoint { step: 0, time: 0.0, state: Spinor::UP, bloch: UnitVec3::Z },
        TrajectoryPoint { step: 1, time: t, state: psi, bloch: bloch_vector(&psi).unwrap_or(UnitVec3::Z) },
    ];
    summarize(psi, dynamical, trajectory)
}

fn summarize(psi: Spinor, dynamical: f64, trajectory: Vec<TrajectoryPoint>) -> ZenoRunResult {
    let total = phase::arg(Spinor::UP.inner(&psi));
    ZenoRunResult {
        final_state: psi,
        survival_probability: psi.norm_sqr(),
        total_phase: total,
        dynamical_phase: dynamical,
        geometric_phase: phase::wrap_2pi(total - dynamical),
        berry_phase: phase::wrap_2pi(dynamical - total),
        trajectory,
    }
}
