use crate::error::{Error, Result};
use crate::phase;
use crate::su2::{Complex, Spinor};

/// Overlaps at or below this magnitude leave the connection undefined.
pub const MIN_CONNECTION_OVERLAP: f64 = 1e-12;

/// Discrete geometric phase `−arg Π_k ⟨φ_{k+1}|φ_k⟩` of a sequence of
/// normalized states, reduced to `[0, 2π)`.
///
/// Pass a closed loop by repeating the first state (up to phase) at the end.
pub fn pancharatnam_phase(states: &[Spinor]) -> Result<f64> {
    if states.len() < 2 {
        return Err(Error::InvalidArgument("a connection needs at least two states".into()));
    }
    if let Some(bad) = states.iter().position(|s| !s.is_normalized()) {
        return Err(Error::InvalidArgument(format!(
            "state {bad} is not normalized (norm = {})",
            states[bad].norm()
        )));
    }
    let mut product = Complex::new(1.0, 0.0);
    for (k, pair) in states.windows(2).enumerate() {
        let overlap = pair[1].inner(&pair[0]);
        if overlap.norm() <= MIN_CONNECTION_OVERLAP {
            return Err(Error::UndefinedConnection { index: k, next: k + 1 });
        }
        product *= overlap;
    }
    Ok(phase::wrap_2pi(-phase::arg(product)))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::phase::circular_distance;
    use crate::su2::UnitVec3;
    use crate::zeno::{closed_form_finite_n, family, MeasurementPlan};

    #[test]
    fn identical_states_give_zero() {
        let s = Spinor::new(Complex::new(0.6, 0.0), Complex::new(0.0, 0.8));
        assert_eq!(pancharatnam_phase(&[s, s, s, s]).unwrap(), 0.0);
    }

    #[test]
    fn static_family_gives_zero() {
        let plan = MeasurementPlan::new(UnitVec3::from_spherical(1.3, 0.2), 0.0, 12).unwrap();
        assert_eq!(pancharatnam_phase(&family(&plan)).unwrap(), 0.0);
    }

    #[test]
    fn closed_family_gives_beta() {
        for &c in &[-0.9, -0.5, 0.0, 0.3, 0.7, 1.0] {
            for n in [3, 5, 8, 33] {
                let plan = MeasurementPlan::with_cos_theta(c, PI, n).unwrap();
                let mut states = family(&plan);
                states.push(states[0]);
                let beta = closed_form_finite_n(c, n).unwrap().beta;
                let got = pancharatnam_phase(&states).unwrap();
                assert!(circular_distance(got, beta) < 1e-12, "c={c} n={n}: {got} vs {beta}");
            }
        }
    }

    #[test]
    fn orthogonal_neighbours_rejected() {
        let states = [Spinor::UP, Spinor::DOWN, Spinor::UP];
        assert_eq!(pancharatnam_phase(&states), Err(Error::UndefinedConnection { index: 0, next: 1 }));
    }

    #[test]
    fn needs_normalized_states() {
        let s = Spinor::new(Complex::new(2.0, 0.0), Complex::new(0.0, 0.0));
        assert!(pancharatnam_phase(&[s, Spinor::UP]).is_err());
        assert!(pancharatnam_phase(&[Spinor::UP]).is_err());
    }
}
