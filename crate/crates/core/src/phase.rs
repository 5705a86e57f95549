//! Angle bookkeeping shared by the engines.

use std::f64::consts::{PI, TAU};

use crate::su2::Complex;

/// Reduces an angle to `(-π, π]`.
pub fn principal(angle: f64) -> f64 {
    if angle > -PI && angle <= PI {
        return angle;
    }
    let r = angle.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU
    let r = if r >= TAU { 0.0 } else { r };
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Reduces an angle to `[0, 2π)`.
pub fn wrap_2pi(angle: f64) -> f64 {
    let r = angle.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Argument of `z` in `(-π, π]`.
pub fn arg(z: Complex) -> f64 {
    let a = z.im.atan2(z.re);
    if a <= -PI {
        PI
    } else {
        a
    }
}

/// Shortest distance between two angles on the circle, in `[0, π]`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    principal(a - b).abs()
}

/// Shortest distance between two angles modulo `period`.
pub fn periodic_distance(a: f64, b: f64, period: f64) -> f64 {
    let r = (a - b).rem_euclid(period);
    r.min(period - r).abs()
}
