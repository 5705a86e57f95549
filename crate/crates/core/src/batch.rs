//! Batch evaluation over independent runs.
//!
//! With the `parallel` feature (on by default) [`map`] fans out over the
//! rayon pool; without it, or through [`map_sequential`], items run in
//! order on the calling thread. Every run is independent and results come
//! back in input order, so output is bit-identical either way.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::phase::circular_distance;
use crate::zeno::{closed_form_finite_n, run_free, MeasurementPlan, ZenoRunResult};

#[cfg(feature = "parallel")]
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    map_sequential(items, f)
}

pub fn map_sequential<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

/// Runs `op` with [`map`] limited to `threads` workers.
#[cfg(feature = "parallel")]
pub fn with_threads<R, F>(threads: usize, op: F) -> Result<R>
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    if threads == 0 {
        return Err(Error::InvalidArgument("thread count must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot build thread pool: {e}")))?;
    Ok(pool.install(op))
}

#[cfg(not(feature = "parallel"))]
pub fn with_threads<R, F>(threads: usize, op: F) -> Result<R>
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    if threads == 0 {
        return Err(Error::InvalidArgument("thread count must be at least 1".into()));
    }
    Ok(op())
}

pub fn run_free_batch(plans: &[MeasurementPlan]) -> Vec<Result<ZenoRunResult>> {
    map(plans, run_free)
}

/// Brute-force half-turn chain compared against the closed form at one grid point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiniteNCheck {
    pub cos_theta: f64,
    pub steps: usize,
    pub rho: f64,
    pub beta: f64,
    /// `| ‖ψ(T)‖ − ρ_N |`
    pub rho_residual: f64,
    /// Circular distance between the observed and predicted `β_N`.
    pub beta_residual: f64,
    /// `‖ψ(T) − ρ_N e^{-iβ_N} φ_0‖`
    pub state_residual: f64,
}

pub fn finite_n_check(cos_theta: f64, steps: usize) -> Result<FiniteNCheck> {
    let cf = closed_form_finite_n(cos_theta, steps)?;
    let run = run_free(&MeasurementPlan::with_cos_theta(cos_theta, PI, steps)?)?;
    let predicted = crate::su2::Spinor::UP.scale(crate::su2::Complex::from_polar(cf.rho, -cf.beta));
    Ok(FiniteNCheck {
        cos_theta,
        steps,
        rho: cf.rho,
        beta: cf.beta,
        rho_residual: (run.final_state.norm() - cf.rho).abs(),
        beta_residual: circular_distance(run.berry_phase, cf.beta),
        state_residual: run.final_state.distance(&predicted),
    })
}

/// [`finite_n_check`] over the product grid, row-major in `cos_thetas`.
pub fn finite_n_grid(cos_thetas: &[f64], steps: &[usize]) -> Vec<Result<FiniteNCheck>> {
    let points: Vec<(f64, usize)> =
        cos_thetas.iter().flat_map(|&c| steps.iter().map(move |&n| (c, n))).collect();
    map(&points, |&(c, n)| finite_n_check(c, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::su2::UnitVec3;

    #[test]
    fn parallel_and_sequential_agree_bitwise() {
        let plans: Vec<_> = (1..200)
            .map(|n| {
                MeasurementPlan::new(UnitVec3::from_spherical(0.4 + n as f64 * 0.01, 0.2), 2.0, n).unwrap()
            })
            .collect();
        let par = map(&plans, run_free);
        let seq = map_sequential(&plans, run_free);
        assert_eq!(par, seq);
    }

    #[test]
    fn results_keep_input_order() {
        let items: Vec<usize> = (0..1000).collect();
        assert_eq!(map(&items, |x| x * 2), items.iter().map(|x| x * 2).collect::<Vec<_>>());
    }

    #[test]
    fn thread_cap() {
        assert!(with_threads(0, || ()).is_err());
        let out = with_threads(2, || finite_n_grid(&[0.3], &[3, 4, 5])).unwrap();
        assert_eq!(out.len(), 3);
        assert!(out.iter().all(|r| r.as_ref().unwrap().state_residual < 1e-12));
    }
}
