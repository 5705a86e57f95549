//! Dispatches validated points to the engines and flattens the results.

use std::f64::consts::PI;
use std::time::Instant;

use zenoberry_core::batch;
use zenoberry_core::convergence::fit_log_log;
use zenoberry_core::phase::circular_distance;
use zenoberry_core::photon::{
    closed_form_final, tip_loop_solid_angle, trace_polygon, MirrorPolygon, PhotonState, PolVec, Rot3,
};
use zenoberry_core::zeno::{
    closed_form_finite_n, continuum_state, half_turn_limit, projected_state_closed_form, run_free,
    run_hamiltonian, survival_closed_form, HamiltonianSpec, MeasurementPlan, ZenoRunResult,
};
use zenoberry_core::{Error, UnitVec3};

use crate::config::{Experiment, Point, SweepParameter};
use crate::record::{Record, Table, Value};

/// Mirror products closer than this to the identity count as identity transport.
pub const IDENTITY_TRANSPORT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub records: Vec<Record>,
    pub summary: Option<Record>,
    pub trajectory: Option<Table>,
}

/// An engine failure at one point of the experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct PointError {
    pub index: usize,
    pub error: Error,
}

/// Runs every point, in parallel when available, and keeps input order.
pub fn run(exp: &Experiment, timing: bool, trajectory: bool) -> Result<RunOutput, PointError> {
    let results = batch::map(&exp.points, |p| run_point(p, timing, trajectory));
    let mut records = Vec::with_capacity(results.len());
    let mut first_trajectory = None;
    for (index, r) in results.into_iter().enumerate() {
        let (record, traj) = r.map_err(|error| PointError { index, error })?;
        records.push(record);
        if first_trajectory.is_none() {
            first_trajectory = traj;
        }
    }
    let summary = match exp.sweep {
        Some(SweepParameter::Steps) => steps_summary(&records),
        _ => None,
    };
    Ok(RunOutput { records, summary, trajectory: first_trajectory })
}

pub fn run_point(point: &Point, timing: bool, trajectory: bool) -> Result<(Record, Option<Table>), Error> {
    let start = Instant::now();
    let (mut record, traj) = match point {
        Point::SpinFree(plan) => {
            let r = run_free(plan)?;
            (spin_free_record(plan, &r), trajectory.then(|| spin_trajectory(&r)))
        }
        Point::SpinHamiltonian(plan, h) => {
            let r = run_hamiltonian(plan, h)?;
            (hamiltonian_record(plan, h, &r), trajectory.then(|| spin_trajectory(&r)))
        }
        Point::Photon { polygon, theta0 } => {
            let photon = PhotonState::entering(polygon, *theta0)?;
            photon_record(polygon, *theta0, &photon, trajectory)?
        }
    };
    if timing {
        record.wall_time_seconds = Some(start.elapsed().as_secs_f64());
    }
    Ok((record, traj))
}

fn plan_inputs(record: &mut Record, mode: &str, plan: &MeasurementPlan) {
    let n = plan.axis();
    record
        .input("mode", Value::Text(mode.into()))
        .input("axis_n_x", n.x())
        .input("axis_n_y", n.y())
        .input("axis_n_z", n.z())
        .input("steps", Value::Int(plan.steps() as i64))
        .input("total_angle", plan.total_angle());
}

fn spin_outputs(record: &mut Record, r: &ZenoRunResult) {
    let psi = r.final_state;
    record
        .output("berry_phase", r.berry_phase)
        .output("dynamical_phase", r.dynamical_phase)
        .output("final_c0_im", psi.c0.im)
        .output("final_c0_re", psi.c0.re)
        .output("final_c1_im", psi.c1.im)
        .output("final_c1_re", psi.c1.re)
        .output("geometric_phase", r.geometric_phase)
        .output("survival_probability", r.survival_probability)
        .output("total_phase", r.total_phase);
}

fn is_half_turn(plan: &MeasurementPlan) -> bool {
    (plan.total_angle() - PI).abs() <= 1e-12
}

pub fn spin_free_record(plan: &MeasurementPlan, r: &ZenoRunResult) -> Record {
    let mut record = Record::default();
    plan_inputs(&mut record, "spin-free", plan);
    spin_outputs(&mut record, r);
    record.output("continuum_distance", r.final_state.distance(&continuum_state(plan)));

    let finite =
        if is_half_turn(plan) { closed_form_finite_n(plan.axis().z(), plan.steps()).ok() } else { None };
    record
        .output("beta_closed_form", finite.map(|cf| cf.beta))
        .output("rho_closed_form", finite.map(|cf| cf.rho))
        .residual("residual_beta", finite.map(|cf| circular_distance(r.berry_phase, cf.beta)))
        .residual("residual_rho", finite.map(|cf| (r.final_state.norm() - cf.rho).abs()))
        .residual("residual_state", r.final_state.distance(&projected_state_closed_form(plan)))
        .residual("residual_survival", (r.survival_probability - survival_closed_form(plan)).abs());
    record
}

pub fn hamiltonian_record(plan: &MeasurementPlan, h: &HamiltonianSpec, r: &ZenoRunResult) -> Record {
    let mut record = Record::default();
    plan_inputs(&mut record, "spin-hamiltonian", plan);
    let b = h.axis();
    record
        .input("axis_b_x", b.x())
        .input("axis_b_y", b.y())
        .input("axis_b_z", b.z())
        .input("mu", h.mu())
        .input("total_time", h.total_time());
    spin_outputs(&mut record, r);

    let limit = half_turn_limit(plan, h);
    record
        .output("dynamical_limit", limit.map(|l| l.dynamical))
        .output("geometric_limit", limit.map(|l| l.geometric))
        .residual("residual_dynamical_limit", limit.map(|l| (r.dynamical_phase - l.dynamical).abs()))
        .residual(
            "residual_geometric_limit",
            limit.map(|l| circular_distance(r.geometric_phase, l.geometric)),
        )
        .residual("residual_survival_norm", (r.survival_probability - r.final_state.norm_sqr()).abs());
    record
}

fn spin_trajectory(r: &ZenoRunResult) -> Table {
    Table {
        header: ["step", "time", "bloch_x", "bloch_y", "bloch_z"].map(String::from).to_vec(),
        rows: r
            .trajectory
            .iter()
            .map(|p| {
                vec![
                    Value::Int(p.step as i64),
                    Value::Float(p.time),
                    Value::Float(p.bloch.x()),
                    Value::Float(p.bloch.y()),
                    Value::Float(p.bloch.z()),
                ]
            })
            .collect(),
    }
}

/// `true` when the explicit mirror product is the identity.
pub fn is_identity_transport(polygon: &MirrorPolygon) -> bool {
    polygon.mirror_product().max_abs_diff(&Rot3::IDENTITY) <= IDENTITY_TRANSPORT_TOLERANCE
}

pub fn photon_record(
    polygon: &MirrorPolygon,
    theta0: f64,
    photon: &PhotonState,
    trajectory: bool,
) -> Result<(Record, Option<Table>), Error> {
    let trace = trace_polygon(photon, polygon);
    let last = trace.last();
    let p0 = photon.polarization();
    let expected = PolVec::new(closed_form_final(polygon).apply_complex(p0.components()))?;
    let loop_area = match tip_loop_solid_angle(&trace) {
        Ok(omega) => Some(omega),
        Err(e) if polygon.sides().is_multiple_of(2) => return Err(e),
        Err(_) => None,
    };

    let mut record = Record::default();
    record
        .input("mode", Value::Text("photon-polygon".into()))
        .input("polygon_sides", Value::Int(polygon.sides() as i64))
        .input("theta0", theta0);
    for (axis, c) in ["x", "y", "z"].iter().zip(last.polarization().components()) {
        record.output(&format!("final_p_{axis}_im"), c.im).output(&format!("final_p_{axis}_re"), c.re);
    }
    let transport = if is_identity_transport(polygon) { "identity" } else { "rotation" };
    record
        .output("final_helicity_parity", Value::Int(last.helicity_parity() as i64))
        .output("loop_solid_angle", loop_area)
        .output("return_deviation", last.polarization().max_abs_diff(p0))
        .output("transport", Value::Text(transport.into()))
        .output("unphysical_incidences", Value::Int(trace.unphysical_incidences().len() as i64))
        .residual("residual_closed_form", last.polarization().max_abs_diff(&expected))
        .residual("residual_norm", (last.polarization().norm() - 1.0).abs())
        .residual(
            "residual_transversality",
            trace.states.iter().map(PhotonState::transversality_defect).fold(0.0, f64::max),
        );

    let table = trajectory.then(|| photon_trajectory(&trace.states));
    Ok((record, table))
}

fn photon_trajectory(states: &[PhotonState]) -> Table {
    let mut header = vec!["step".to_string(), "helicity_parity".to_string()];
    for c in ["x", "y", "z"] {
        header.push(format!("momentum_{c}"));
    }
    for c in ["x", "y", "z"] {
        header.push(format!("p_{c}_re"));
        header.push(format!("p_{c}_im"));
    }
    let rows = states
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let mut row = vec![Value::Int(k as i64), Value::Int(s.helicity_parity() as i64)];
            let m: UnitVec3 = s.momentum();
            row.extend(m.to_array().map(Value::Float));
            for c in s.polarization().components() {
                row.push(Value::Float(c.re));
                row.push(Value::Float(c.im));
            }
            row
        })
        .collect();
    Table { header, rows }
}

/// Log-log slope of `continuum_distance` against `steps`, in sweep order.
fn steps_summary(records: &[Record]) -> Option<Record> {
    let mut xs = Vec::with_capacity(records.len());
    let mut ys = Vec::with_capacity(records.len());
    for r in records {
        xs.push(r.get("steps")?.as_f64()?);
        ys.push(r.get("continuum_distance")?.as_f64()?);
    }
    let fit = fit_log_log(&xs, &ys).ok();
    let mut summary = Record::default();
    summary
        .input("parameter", Value::Text("steps".into()))
        .input("points", Value::Int(records.len() as i64))
        .output("intercept", fit.map(|f| f.intercept))
        .output("r_squared", fit.map(|f| f.r_squared))
        .output("slope", fit.map(|f| f.slope));
    Some(summary)
}
