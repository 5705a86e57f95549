//! Two-level complex algebra: spinors, 2×2 operators, Pauli matrices and
//! SU(2) exponentials.
//!
//! Rotation operators use the convention `U(n, θ) = exp(-iθ σ·n)` with no
//! half angle. Under `U(n, θ)` the Bloch vector of a state turns by `2θ`
//! about `n`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Complex = Complex64;

/// Allowed deviation of `|v|` from one for a direction handed to a constructor.
pub const AXIS_TOLERANCE: f64 = 1e-9;
/// Allowed deviation of a normalized spinor from unit norm.
pub const NORM_TOLERANCE: f64 = 1e-12;
/// Below this norm a spinor has no Bloch direction.
pub const DEGENERATE_NORM: f64 = 1e-9;

const ZERO: Complex = Complex::new(0.0, 0.0);
const ONE: Complex = Complex::new(1.0, 0.0);
const I: Complex = Complex::new(0.0, 1.0);

/// A direction in real 3-space, normalized to within `1e-12`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitVec3 {
    x: f64,
    y: f64,
    z: f64,
}

impl UnitVec3 {
    pub const X: UnitVec3 = UnitVec3 { x: 1.0, y: 0.0, z: 0.0 };
    pub const Y: UnitVec3 = UnitVec3 { x: 0.0, y: 1.0, z: 0.0 };
    pub const Z: UnitVec3 = UnitVec3 { x: 0.0, y: 0.0, z: 1.0 };

    /// Accepts a vector whose length is within `1e-9` of one, then snaps it
    /// onto the sphere.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > AXIS_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "axis ({x}, {y}, {z}) is not a unit vector (|v| = {norm})"
            )));
        }
        Ok(Self::snap(x, y, z, norm))
    }

    /// Normalizes an arbitrary nonzero finite vector.
    pub fn normalize(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm < DEGENERATE_NORM {
            return Err(Error::InvalidArgument(format!("cannot normalize ({x}, {y}, {z})")));
        }
        Ok(Self::snap(x, y, z, norm))
    }

    /// Direction with polar angle `theta` from +z and azimuth `phi`.
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let v = [st * cp, st * sp, ct];
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        Self::snap(v[0], v[1], v[2], norm)
    }

    fn snap(x: f64, y: f64, z: f64, norm: f64) -> Self {
        if norm == 1.0 {
            UnitVec3 { x, y, z }
        } else {
            UnitVec3 { x: x / norm, y: y / norm, z: z / norm }
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, other: &UnitVec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &UnitVec3) -> [f64; 3] {
        cross(self.to_array(), other.to_array())
    }
}

impl Neg for UnitVec3 {
    type Output = UnitVec3;

    fn neg(self) -> UnitVec3 {
        UnitVec3 { x: -self.x, y: -self.y, z: -self.z }
    }
}

impl fmt::Display for UnitVec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Two complex amplitudes in the σ_z basis. Not necessarily normalized: after
/// a projection chain the squared norm is the survival probability.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spinor {
    pub c0: Complex,
    pub c1: Complex,
}

impl Spinor {
    pub const UP: Spinor = Spinor { c0: ONE, c1: ZERO };
    pub const DOWN: Spinor = Spinor { c0: ZERO, c1: ONE };

    pub fn new(c0: Complex, c1: Complex) -> Self {
        Spinor { c0, c1 }
    }

    /// A pure state; the amplitudes must already be normalized.
    pub fn pure(c0: Complex, c1: Complex) -> Result<Self> {
        let s = Spinor { c0, c1 };
        let norm = s.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidArgument(format!("pure state must have unit norm, got {norm}")));
        }
        Ok(s)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c0.norm_sqr() + self.c1.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= NORM_TOLERANCE
    }

    pub fn normalized(&self) -> Result<Spinor> {
        let norm = self.norm();
        if norm.is_nan() || norm < DEGENERATE_NORM {
            return Err(Error::DegenerateState { norm });
        }
        Ok(self.scale(Complex::new(1.0 / norm, 0.0)))
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &Spinor) -> Complex {
        self.c0.conj() * other.c0 + self.c1.conj() * other.c1
    }

    pub fn scale(&self, k: Complex) -> Spinor {
        Spinor { c0: self.c0 * k, c1: self.c1 * k }
    }

    /// Euclidean distance `‖self − other‖`.
    pub fn distance(&self, other: &Spinor) -> f64 {
        ((self.c0 - other.c0).norm_sqr() + (self.c1 - other.c1).norm_sqr()).sqrt()
    }
}

impl Add for Spinor {
    type Output = Spinor;

    fn add(self, rhs: Spinor) -> Spinor {
        Spinor { c0: self.c0 + rhs.c0, c1: self.c1 + rhs.c1 }
    }
}

impl Sub for Spinor {
    type Output = Spinor;

    fn sub(self, rhs: Spinor) -> Spinor {
        Spinor { c0: self.c0 - rhs.c0, c1: self.c1 - rhs.c1 }
    }
}

/// Row-major complex 2×2 matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[Complex; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);
    pub const SIGMA_X: Mat2 = Mat2([[ZERO, ONE], [ONE, ZERO]]);
    pub const SIGMA_Y: Mat2 = Mat2([[ZERO, Complex::new(0.0, -1.0)], [I, ZERO]]);
    pub const SIGMA_Z: Mat2 = Mat2([[ONE, ZERO], [ZERO, Complex::new(-1.0, 0.0)]]);

    /// `σ·n`.
    pub fn sigma_dot(n: &UnitVec3) -> Mat2 {
        let (x, y, z) = (n.x(), n.y(), n.z());
        Mat2([[Complex::new(z, 0.0), Complex::new(x, -y)], [Complex::new(x, y), Complex::new(-z, 0.0)]])
    }

    pub fn apply(&self, s: &Spinor) -> Spinor {
        let m = &self.0;
        Spinor { c0: m[0][0] * s.c0 + m[0][1] * s.c1, c1: m[1][0] * s.c0 + m[1][1] * s.c1 }
    }

    pub fn adjoint(&self) -> Mat2 {
        let m = &self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn det(&self) -> Complex {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn scale(&self, k: Complex) -> Mat2 {
        let m = &self.0;
        Mat2([[m[0][0] * k, m[0][1] * k], [m[1][0] * k, m[1][1] * k]])
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.0[r][c] - other.0[r][c]).norm());
            }
        }
        worst
    }

    /// Entrywise distance of `M†M` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self).max_abs_diff(&Mat2::IDENTITY)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[ZERO; 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, entry) in row.iter_mut().enumerate() {
                *entry = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Mat2(out)
    }
}

impl Add for Mat2 {
    type Output = Mat2;

    fn add(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        Mat2([[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]])
    }
}

/// `exp(-iθ σ·n) = cos θ I − i sin θ σ·n`.
pub fn rotation_operator(n: &UnitVec3, theta: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    let (x, y, z) = (n.x(), n.y(), n.z());
    // -i sinθ (σ·n) written out entrywise
    Mat2([
        [Complex::new(c, -s * z), Complex::new(-s * y, -s * x)],
        [Complex::new(s * y, -s * x), Complex::new(c, s * z)],
    ])
}

/// Applies `|target⟩⟨target|` to `s`.
pub fn project_onto(target: &Spinor, s: &Spinor) -> Result<Spinor> {
    if !target.is_normalized() {
        return Err(Error::InvalidArgument(format!(
            "projection target must be normalized, norm = {}",
            target.norm()
        )));
    }
    Ok(target.scale(target.inner(s)))
}

/// `⟨s|σ|s⟩ / ⟨s|s⟩`.
pub fn bloch_vector(s: &Spinor) -> Result<UnitVec3> {
    let norm_sqr = s.norm_sqr();
    if norm_sqr.is_nan() || norm_sqr.sqrt() < DEGENERATE_NORM {
        return Err(Error::DegenerateState { norm: norm_sqr.sqrt() });
    }
    let cross = s.c0.conj() * s.c1;
    let x = 2.0 * cross.re / norm_sqr;
    let y = 2.0 * cross.im / norm_sqr;
    let z = (s.c0.norm_sqr() - s.c1.norm_sqr()) / norm_sqr;
    UnitVec3::normalize(x, y, z)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn axis() -> impl Strategy<Value = UnitVec3> {
        (0.0..PI, -PI..PI).prop_map(|(t, p)| UnitVec3::from_spherical(t, p))
    }

    fn pure_state() -> impl Strategy<Value = Spinor> {
        (0.0..PI, -PI..PI, -PI..PI).prop_map(|(t, p, g)| {
            let global = Complex::from_polar(1.0, g);
            Spinor::new(global * (t / 2.0).cos(), global * Complex::from_polar((t / 2.0).sin(), p))
        })
    }

    fn rotate_vec(axis: &UnitVec3, angle: f64, v: [f64; 3]) -> [f64; 3] {
        // Rodrigues, kept local so this check does not lean on the photon module.
        let k = axis.to_array();
        let (s, co) = angle.sin_cos();
        let kxv = cross(k, v);
        let kv = dot(k, v);
        [
            v[0] * co + kxv[0] * s + k[0] * kv * (1.0 - co),
            v[1] * co + kxv[1] * s + k[1] * kv * (1.0 - co),
            v[2] * co + kxv[2] * s + k[2] * kv * (1.0 - co),
        ]
    }

    #[test]
    fn zero_angle_is_identity() {
        let n = UnitVec3::from_spherical(0.7, 1.9);
        assert_eq!(rotation_operator(&n, 0.0), Mat2::IDENTITY);
    }

    #[test]
    fn half_turn_is_minus_identity() {
        let n = UnitVec3::from_spherical(1.1, -0.4);
        let u = rotation_operator(&n, PI);
        assert!(u.max_abs_diff(&Mat2::IDENTITY.scale(c(-1.0, 0.0))) < 1e-12);
    }

    #[test]
    fn quarter_turn_about_z() {
        let u = rotation_operator(&UnitVec3::Z, FRAC_PI_2);
        let expected = Mat2([[c(0.0, -1.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]]);
        assert!(u.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn matches_cos_sin_expansion() {
        let n = UnitVec3::new(0.6, 0.0, 0.8).unwrap();
        let theta: f64 = 0.37;
        let expected =
            Mat2::IDENTITY.scale(c(theta.cos(), 0.0)) + Mat2::sigma_dot(&n).scale(c(0.0, -theta.sin()));
        assert!(rotation_operator(&n, theta).max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn pauli_algebra() {
        let i = c(0.0, 1.0);
        let xy = Mat2::SIGMA_X * Mat2::SIGMA_Y;
        assert!(xy.max_abs_diff(&Mat2::SIGMA_Z.scale(i)) < 1e-15);
        for s in [Mat2::SIGMA_X, Mat2::SIGMA_Y, Mat2::SIGMA_Z] {
            assert_eq!(s * s, Mat2::IDENTITY);
        }
    }

    #[test]
    fn non_unit_axis_rejected() {
        assert!(matches!(UnitVec3::new(1.0, 0.1, 0.0), Err(Error::InvalidArgument(_))));
        assert!(UnitVec3::new(1.0 + 1e-10, 0.0, 0.0).is_ok());
        assert!(UnitVec3::new(f64::NAN, 0.0, 0.0).is_err());
    }

    #[test]
    fn projection_examples() {
        let up = Spinor::UP;
        let down = Spinor::DOWN;
        let plus = Spinor::new(c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0));

        assert_eq!(project_onto(&up, &up).unwrap(), up);
        assert_eq!(project_onto(&down, &up).unwrap(), Spinor::new(c(0.0, 0.0), c(0.0, 0.0)));
        let p = project_onto(&up, &plus).unwrap();
        assert_abs_diff_eq!(p.c0.re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_eq!(p.c1, c(0.0, 0.0));
    }

    #[test]
    fn projection_needs_normalized_target() {
        let target = Spinor::new(c(2.0, 0.0), c(0.0, 0.0));
        assert!(matches!(project_onto(&target, &Spinor::UP), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn pure_constructor_checks_norm() {
        assert!(Spinor::pure(c(0.6, 0.0), c(0.0, 0.8)).is_ok());
        assert!(Spinor::pure(c(0.6, 0.0), c(0.0, 0.7)).is_err());
    }

    #[test]
    fn bloch_examples() {
        let plus = Spinor::new(c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0));
        assert_eq!(bloch_vector(&Spinor::UP).unwrap(), UnitVec3::Z);
        assert_eq!(bloch_vector(&Spinor::DOWN).unwrap(), -UnitVec3::Z);
        let b = bloch_vector(&plus).unwrap();
        assert_abs_diff_eq!(b.x(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b.y(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b.z(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn bloch_of_null_state_is_degenerate() {
        let tiny = Spinor::new(c(1e-12, 0.0), c(0.0, 0.0));
        assert!(matches!(bloch_vector(&tiny), Err(Error::DegenerateState { .. })));
    }

    proptest! {
        #[test]
        fn inverse_rotation_cancels(n in axis(), theta in -10.0f64..10.0) {
            let prod = rotation_operator(&n, theta) * rotation_operator(&n, -theta);
            prop_assert!(prod.max_abs_diff(&Mat2::IDENTITY) <= 1e-12);
        }

        #[test]
        fn same_axis_angles_add(n in axis(), a in -5.0f64..5.0, b in -5.0f64..5.0) {
            let lhs = rotation_operator(&n, a) * rotation_operator(&n, b);
            prop_assert!(lhs.max_abs_diff(&rotation_operator(&n, a + b)) <= 1e-12);
        }

        #[test]
        fn rotation_is_special_unitary(n in axis(), theta in -10.0f64..10.0) {
            let u = rotation_operator(&n, theta);
            prop_assert!(u.unitarity_defect() <= 1e-12);
            prop_assert!((u.det() - c(1.0, 0.0)).norm() <= 1e-12);
        }

        #[test]
        fn bloch_turns_by_twice_the_angle(n in axis(), theta in -4.0f64..4.0, s in pure_state()) {
            let rotated = bloch_vector(&rotation_operator(&n, theta).apply(&s)).unwrap();
            let expected = rotate_vec(&n, 2.0 * theta, bloch_vector(&s).unwrap().to_array());
            for (got, want) in rotated.to_array().iter().zip(expected) {
                prop_assert!((got - want).abs() <= 1e-10);
            }
        }

        #[test]
        fn projection_is_idempotent(t in pure_state(), s in pure_state()) {
            let once = project_onto(&t, &s).unwrap();
            let twice = project_onto(&t, &once).unwrap();
            prop_assert!(once.distance(&twice) <= 1e-14);
            prop_assert!(once.norm() <= s.norm() + 1e-12);
        }

        #[test]
        fn bloch_is_unit(s in pure_state()) {
            let b = bloch_vector(&s).unwrap().to_array();
            prop_assert!((dot(b, b).sqrt() - 1.0).abs() <= 1e-12);
        }
    }
}
