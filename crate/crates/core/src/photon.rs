//! Rotation generators on real 3-space, ideal-mirror reflections and
//! polarization transport through a regular polygonal cylinder of mirrors.
//!
//! An ideal mirror with normal `n` acts on polarization as the half turn
//! `M(n) = exp(-iπ n·J) = R_n(π)` and sends the momentum to `−R_n(π) k̂`.
//! Mirror `ℓ` (0-based) of a regular `N`-gon has normal
//! `R_z(ℓα)(−1, 0, 0)` with `α = 2π/N`. Composing all `N` reflections gives
//! `R_ñ(π)^N` with `ñ = (−cos(α/2), sin(α/2), 0)`: the identity for even `N`
//! and a half turn about `ñ` for odd `N`.
//!
//! Mirror operators carry no extra overall sign; a global `−1` on a
//! polarization vector is only a phase.

use std::f64::consts::{PI, TAU};
use std::ops::Mul;

use crate::error::{Error, Result};
use crate::su2::{cross, Complex, UnitVec3};
use crate::zeno::solid_angle_spherical_polygon;

/// Tolerance on `|p·k̂|` for a polarization to count as transverse.
pub const TRANSVERSALITY_TOLERANCE: f64 = 1e-10;
pub const POLARIZATION_NORM_TOLERANCE: f64 = 1e-12;

const CZERO: Complex = Complex::new(0.0, 0.0);

/// Row-major real 3×3 matrix, used for proper rotations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rot3(pub [[f64; 3]; 3]);

impl Rot3 {
    pub const IDENTITY: Rot3 = Rot3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }

    pub fn apply_complex(&self, v: &[Complex; 3]) -> [Complex; 3] {
        let m = &self.0;
        std::array::from_fn(|r| v[0] * m[r][0] + v[1] * m[r][1] + v[2] * m[r][2])
    }

    pub fn transpose(&self) -> Rot3 {
        let m = &self.0;
        Rot3(std::array::from_fn(|r| std::array::from_fn(|c| m[c][r])))
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn max_abs_diff(&self, other: &Rot3) -> f64 {
        self.0.iter().flatten().zip(other.0.iter().flatten()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Entrywise distance of `RᵀR` from the identity.
    pub fn orthogonality_defect(&self) -> f64 {
        (self.transpose() * *self).max_abs_diff(&Rot3::IDENTITY)
    }

    pub fn pow(&self, exponent: usize) -> Rot3 {
        (0..exponent).fold(Rot3::IDENTITY, |acc, _| *self * acc)
    }
}

impl Mul for Rot3 {
    type Output = Rot3;

    fn mul(self, rhs: Rot3) -> Rot3 {
        let (a, b) = (&self.0, &rhs.0);
        Rot3(std::array::from_fn(|r| {
            std::array::from_fn(|c| a[r][0] * b[0][c] + a[r][1] * b[1][c] + a[r][2] * b[2][c])
        }))
    }
}

/// Generator `J_k` with entries `(J_k)_{ij} = −i ε_{kij}`, for `k` in `0..3`.
pub fn rotation_generator(k: usize) -> [[Complex; 3]; 3] {
    let mut j = [[CZERO; 3]; 3];
    for (i, row) in j.iter_mut().enumerate() {
        for (l, entry) in row.iter_mut().enumerate() {
            *entry = Complex::new(0.0, -levi_civita(k, i, l));
        }
    }
    j
}

pub(crate) fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// `R_n(φ) = exp(-iφ n·J)`, right-handed about `axis` (Rodrigues form).
pub fn rotation_about(axis: &UnitVec3, angle: f64) -> Rot3 {
    let (s, c) = angle.sin_cos();
    let t = 1.0 - c;
    let [x, y, z] = axis.to_array();
    Rot3([
        [c + t * x * x, t * x * y - s * z, t * x * z + s * y],
        [t * x * y + s * z, c + t * y * y, t * y * z - s * x],
        [t * x * z - s * y, t * y * z + s * x, c + t * z * z],
    ])
}

/// `M(n) = R_n(π) = 2nnᵀ − I`, evaluated in the exactly symmetric form.
pub fn mirror_operator(normal: &UnitVec3) -> Rot3 {
    let n = normal.to_array();
    Rot3(std::array::from_fn(|r| std::array::from_fn(|c| 2.0 * n[r] * n[c] - if r == c { 1.0 } else { 0.0 })))
}

/// Complex polarization vector in 3-space, unit norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolVec([Complex; 3]);

impl PolVec {
    pub fn new(components: [Complex; 3]) -> Result<Self> {
        let p = PolVec(components);
        let norm = p.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > POLARIZATION_NORM_TOLERANCE {
            return Err(Error::InvalidArgument(format!("polarization must have unit norm, got {norm}")));
        }
        Ok(p)
    }

    /// Linear polarization along a real direction.
    pub fn linear(direction: &UnitVec3) -> Self {
        PolVec(direction.to_array().map(|x| Complex::new(x, 0.0)))
    }

    pub fn components(&self) -> &[Complex; 3] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `p·k` without conjugation, for a real `k`.
    pub fn dot_real(&self, k: &UnitVec3) -> Complex {
        let k = k.to_array();
        self.0[0] * k[0] + self.0[1] * k[1] + self.0[2] * k[2]
    }

    /// Largest componentwise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &PolVec) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.0.iter().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    /// The real direction of a linear polarization.
    pub fn real_direction(&self) -> Result<UnitVec3> {
        if self.max_imag() > POLARIZATION_NORM_TOLERANCE {
            return Err(Error::NonLinearPolarization);
        }
        UnitVec3::normalize(self.0[0].re, self.0[1].re, self.0[2].re)
    }

    fn transformed(&self, m: &Rot3) -> PolVec {
        PolVec(m.apply_complex(&self.0))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhotonState {
    momentum: UnitVec3,
    polarization: PolVec,
    helicity_parity: i8,
}

impl PhotonState {
    pub fn new(momentum: UnitVec3, polarization: PolVec, helicity_parity: i8) -> Result<Self> {
        if helicity_parity != 1 && helicity_parity != -1 {
            return Err(Error::InvalidArgument(format!(
                "helicity parity must be +1 or -1, got {helicity_parity}"
            )));
        }
        let overlap = polarization.dot_real(&momentum).norm();
        if overlap > TRANSVERSALITY_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "polarization is not transverse to momentum (|p·k| = {overlap:e})"
            )));
        }
        Ok(Self { momentum, polarization, helicity_parity })
    }

    /// Momentum `k̂ = (sin θ₀ cos φ₀, sin θ₀ sin φ₀, cos θ₀)` with
    /// `φ₀ = π/2 − α/2`, the azimuth that makes the photon meet the mirrors
    /// of `polygon` in order from the inside, and linear polarization along
    /// `k̂ × ẑ`.
    pub fn entering(polygon: &MirrorPolygon, theta0: f64) -> Result<Self> {
        if !theta0.is_finite() || theta0.sin().abs() < 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "momentum polar angle {theta0} leaves no transverse motion"
            )));
        }
        let azimuth = PI / 2.0 - polygon.alpha() / 2.0;
        let momentum = UnitVec3::from_spherical(theta0, azimuth);
        let [x, y, z] = cross(momentum.to_array(), [0.0, 0.0, 1.0]);
        let polarization = PolVec::linear(&UnitVec3::normalize(x, y, z)?);
        Self::new(momentum, polarization, 1)
    }

    pub fn momentum(&self) -> UnitVec3 {
        self.momentum
    }

    pub fn polarization(&self) -> &PolVec {
        &self.polarization
    }

    pub fn helicity_parity(&self) -> i8 {
        self.helicity_parity
    }

    pub fn transversality_defect(&self) -> f64 {
        self.polarization.dot_real(&self.momentum).norm()
    }
}

/// Outcome of one reflection. `incidence = k̂·n` before reflecting; a value
/// `≥ 0` means the photon meets the mirror from behind.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Reflection {
    pub photon: PhotonState,
    pub incidence: f64,
}

impl Reflection {
    pub fn is_physical(&self) -> bool {
        self.incidence < 0.0
    }
}

pub fn reflect(photon: &PhotonState, normal: &UnitVec3) -> Reflection {
    let m = mirror_operator(normal);
    let [x, y, z] = m.apply(photon.momentum.to_array()).map(|c| -c);
    // M is orthogonal, so |k'| = 1 up to rounding
    let momentum = UnitVec3::normalize(x, y, z).expect("orthogonal image of a unit vector");
    Reflection {
        photon: PhotonState {
            momentum,
            polarization: photon.polarization.transformed(&m),
            helicity_parity: -photon.helicity_parity,
        },
        incidence: photon.momentum.dot(normal),
    }
}

/// A regular polygonal cylinder of `N ≥ 3` ideal mirrors around the z axis.
#[derive(Clone, Debug, PartialEq)]
pub struct MirrorPolygon {
    sides: usize,
    normals: Vec<UnitVec3>,
    alpha: f64,
}

impl MirrorPolygon {
    pub fn regular(sides: usize) -> Result<Self> {
        if sides < 3 {
            return Err(Error::UnsupportedPolygon(sides));
        }
        let alpha = TAU / sides as f64;
        let normals = (0..sides)
            .map(|l| {
                let (s, c) = (l as f64 * alpha).sin_cos();
                UnitVec3::normalize(-c, -s, 0.0).expect("unit circle point")
            })
            .collect();
        Ok(Self { sides, normals, alpha })
    }

    pub fn sides(&self) -> usize {
        self.sides
    }

    pub fn normals(&self) -> &[UnitVec3] {
        &self.normals
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `ñ = (−cos(α/2), sin(α/2), 0)`.
    pub fn twist_axis(&self) -> UnitVec3 {
        let (s, c) = (self.alpha / 2.0).sin_cos();
        UnitVec3::normalize(-c, s, 0.0).expect("unit circle point")
    }

    /// `M̃ = exp(iαJ_z) M_1 = R_z(−α) M_1`.
    pub fn twisted_mirror(&self) -> Rot3 {
        rotation_about(&UnitVec3::Z, -self.alpha) * mirror_operator(&self.normals[0])
    }

    /// `M_N ⋯ M_2 M_1` multiplied out mirror by mirror.
    pub fn mirror_product(&self) -> Rot3 {
        self.normals.iter().fold(Rot3::IDENTITY, |acc, n| mirror_operator(n) * acc)
    }
}

/// States before and after each mirror, plus the incidence of each hit.
#[derive(Clone, Debug, PartialEq)]
pub struct PolygonTrace {
    pub states: Vec<PhotonState>,
    pub incidences: Vec<f64>,
}

impl PolygonTrace {
    pub fn initial(&self) -> &PhotonState {
        &self.states[0]
    }

    pub fn last(&self) -> &PhotonState {
        self.states.last().expect("trace holds the initial state")
    }

    /// Indices of mirrors met from behind.
    pub fn unphysical_incidences(&self) -> Vec<usize> {
        self.incidences.iter().enumerate().filter(|(_, &d)| d >= 0.0).map(|(i, _)| i).collect()
    }
}

pub fn trace_polygon(initial: &PhotonState, polygon: &MirrorPolygon) -> PolygonTrace {
    let mut states = Vec::with_capacity(polygon.sides() + 1);
    let mut incidences = Vec::with_capacity(polygon.sides());
    states.push(*initial);
    for normal in polygon.normals() {
        let hit = reflect(states.last().expect("nonempty"), normal);
        incidences.push(hit.incidence);
        states.push(hit.photon);
    }
    PolygonTrace { states, incidences }
}

/// `exp(-iNπ ñ·J) = R_ñ(π)^N`: the identity for even `N`, `R_ñ(π)` for odd `N`.
pub fn closed_form_final(polygon: &MirrorPolygon) -> Rot3 {
    if polygon.sides().is_multiple_of(2) {
        Rot3::IDENTITY
    } else {
        mirror_operator(&polygon.twist_axis())
    }
}

/// Signed solid angle of the loop traced by the polarization tip, for a
/// linear polarization that returns to its start.
pub fn tip_loop_solid_angle(trace: &PolygonTrace) -> Result<f64> {
    let gap = trace.last().polarization.max_abs_diff(&trace.initial().polarization);
    if gap > 1e-9 {
        return Err(Error::OpenLoop(gap));
    }
    let tips = trace.states[..trace.states.len() - 1]
        .iter()
        .map(|s| s.polarization.real_direction())
        .collect::<Result<Vec<_>>>()?;
    solid_angle_spherical_polygon(&tips)
}
