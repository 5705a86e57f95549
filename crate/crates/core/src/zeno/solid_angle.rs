//! Signed solid angles of geodesic polygons on the unit sphere.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::su2::{cross, dot, UnitVec3};

/// Consecutive vertices must be separated by more than this (radians) and by
/// less than `π` minus this.
pub const MIN_EDGE_ANGLE: f64 = 1e-9;

/// Signed solid angle of the geodesic triangle `(a, b, c)`, positive when the
/// vertices run counter-clockwise seen from outside the sphere.
///
/// Uses `tan(Ω/2) = a·(b×c) / (1 + a·b + b·c + c·a)`.
pub fn solid_angle_triangle(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    let numerator = dot(a, cross(b, c));
    let denominator = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
    2.0 * numerator.atan2(denominator)
}

/// Signed solid angle enclosed by the closed polygon through `vertices`
/// (the last vertex connects back to the first; do not repeat it).
///
/// The polygon is fanned into triangles from an apex along its vector area
/// `Σ v_i × v_{i+1}`, signed toward the vertex centroid so that reversing the
/// vertex order keeps the apex and negates the result. When the
/// vector area vanishes the fan falls back to the first vertex. The result
/// is reduced into `(-4π, 4π)`.
pub fn solid_angle_spherical_polygon(vertices: &[UnitVec3]) -> Result<f64> {
    let n = vertices.len();
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "a spherical polygon needs at least 3 vertices, got {n}"
        )));
    }
    for i in 0..n {
        let j = (i + 1) % n;
        let separation = edge_angle(&vertices[i], &vertices[j]);
        if !(separation > MIN_EDGE_ANGLE && separation < PI - MIN_EDGE_ANGLE) {
            return Err(Error::DegeneratePolygon { index: i, next: j });
        }
    }

    let apex = fan_apex(vertices);
    let total: f64 = (0..n)
        .map(|i| solid_angle_triangle(apex, vertices[i].to_array(), vertices[(i + 1) % n].to_array()))
        .sum();
    // `%` keeps the sign of the dividend, so the reduction is odd in `total`
    Ok(total % (4.0 * PI))
}

fn edge_angle(a: &UnitVec3, b: &UnitVec3) -> f64 {
    let c = a.cross(b);
    dot(c, c).sqrt().atan2(a.dot(b))
}

fn fan_apex(vertices: &[UnitVec3]) -> [f64; 3] {
    let n = vertices.len();
    let mut area = [0.0; 3];
    for i in 0..n {
        let c = vertices[i].cross(&vertices[(i + 1) % n]);
        for (acc, ci) in area.iter_mut().zip(c) {
            *acc += ci;
        }
    }
    let norm = dot(area, area).sqrt();
    if norm < 1e-9 {
        return vertices[0].to_array();
    }
    // both traversals must share an apex on the polygon's side of the sphere
    let mut centroid = [0.0; 3];
    for v in vertices {
        for (acc, c) in centroid.iter_mut().zip(v.to_array()) {
            *acc += c;
        }
    }
    let facing = dot(area, centroid) / norm;
    let lead = if facing.abs() > 1e-9 * n as f64 {
        facing
    } else {
        area.iter().copied().fold(0.0f64, |best, x| if x.abs() > best.abs() { x } else { best })
    };
    let sign = if lead < 0.0 { -1.0 } else { 1.0 };
    area.map(|x| sign * x / norm)
}
