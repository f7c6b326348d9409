//! Dense 2×2 / 4×4 complex linear algebra for one and two spin-½ particles.
//!
//! Two-particle operators and states use the fixed product basis
//! `|00⟩, |01⟩, |10⟩, |11⟩`, with the left ket belonging to particle 1
//! (the path-I traveler). Index `2·a + b` addresses `|ab⟩`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::angle::Angle;
use crate::error::{QsrError, Result};

pub type Cplx = Complex64;

/// Absolute tolerance for algebraic identities.
pub const ALGEBRA_TOL: f64 = 1e-12;

/// Labels of the two-particle basis, in storage order.
pub const BASIS_LABELS: [&str; 4] = ["00", "01", "10", "11"];

const ZERO: Cplx = Cplx::new(0.0, 0.0);
const ONE: Cplx = Cplx::new(1.0, 0.0);
const I: Cplx = Cplx::new(0.0, 1.0);

/// Adjoint (conjugate transpose).
pub trait Adjoint {
    fn adjoint(&self) -> Self;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Cplx; 2]; 2]);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat4(pub [[Cplx; 4]; 4]);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec4(pub [Cplx; 4]);

/// Cartesian spin axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn unit(self) -> [f64; 3] {
        match self {
            Axis::X => [1.0, 0.0, 0.0],
            Axis::Y => [0.0, 1.0, 0.0],
            Axis::Z => [0.0, 0.0, 1.0],
        }
    }

    pub fn pauli(self) -> Mat2 {
        match self {
            Axis::X => Mat2::sigma_x(),
            Axis::Y => Mat2::sigma_y(),
            Axis::Z => Mat2::sigma_z(),
        }
    }
}

impl Mat2 {
    pub fn zeros() -> Self {
        Mat2([[ZERO; 2]; 2])
    }

    pub fn identity() -> Self {
        Mat2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn sigma_x() -> Self {
        Mat2([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn sigma_y() -> Self {
        Mat2([[ZERO, -I], [I, ZERO]])
    }

    pub fn sigma_z() -> Self {
        Mat2([[ONE, ZERO], [ZERO, -ONE]])
    }

    pub fn scale(&self, k: Cplx) -> Self {
        let mut out = *self;
        out.0.iter_mut().flatten().for_each(|z| *z *= k);
        out
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |(M†M − I)_ij|`.
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self).max_abs_diff(&Mat2::identity())
    }
}

impl Adjoint for Mat2 {
    fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let mut out = Mat2::zeros();
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] = self.0[i][0] * rhs.0[0][j] + self.0[i][1] * rhs.0[1][j];
            }
        }
        out
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let mut out = self;
        out.0
            .iter_mut()
            .flatten()
            .zip(rhs.0.iter().flatten())
            .for_each(|(a, b)| *a += b);
        out
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        self + (-rhs)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(-ONE)
    }
}

impl Mat4 {
    pub fn zeros() -> Self {
        Mat4([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Mat4::zeros();
        (0..4).for_each(|i| m.0[i][i] = ONE);
        m
    }

    pub fn scale(&self, k: Cplx) -> Self {
        let mut out = *self;
        out.0.iter_mut().flatten().for_each(|z| *z *= k);
        out
    }

    pub fn max_abs_diff(&self, other: &Mat4) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self).max_abs_diff(&Mat4::identity())
    }

    /// `max |M − M†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn column(&self, j: usize) -> Vec4 {
        Vec4([self.0[0][j], self.0[1][j], self.0[2][j], self.0[3][j]])
    }

    /// `M·v`.
    pub fn apply(&self, v: &Vec4) -> Vec4 {
        apply(self, v)
    }
}

impl Adjoint for Mat4 {
    fn adjoint(&self) -> Self {
        let mut out = Mat4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] = self.0[j][i].conj();
            }
        }
        out
    }
}

impl Mul for Mat4 {
    type Output = Mat4;
    fn mul(self, rhs: Mat4) -> Mat4 {
        let mut out = Mat4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] = (0..4).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        out
    }
}

impl Add for Mat4 {
    type Output = Mat4;
    fn add(self, rhs: Mat4) -> Mat4 {
        let mut out = self;
        out.0
            .iter_mut()
            .flatten()
            .zip(rhs.0.iter().flatten())
            .for_each(|(a, b)| *a += b);
        out
    }
}

impl Sub for Mat4 {
    type Output = Mat4;
    fn sub(self, rhs: Mat4) -> Mat4 {
        self + rhs.scale(-ONE)
    }
}

impl Vec4 {
    pub fn zeros() -> Self {
        Vec4([ZERO; 4])
    }

    /// Basis ket `|ab⟩`.
    pub fn basis(a: usize, b: usize) -> Self {
        assert!(a < 2 && b < 2, "basis index out of range");
        let mut v = Vec4::zeros();
        v.0[2 * a + b] = ONE;
        v
    }

    pub fn norm(&self) -> f64 {
        inner(self, self).re.sqrt()
    }

    pub fn scale(&self, k: Cplx) -> Self {
        Vec4(self.0.map(|z| z * k))
    }

    pub fn max_abs_diff(&self, other: &Vec4) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// `exp(−i·angle·(n·σ)/2) = cos(angle/2)·I − i·sin(angle/2)·(n·σ)`.
pub fn su2_exp(axis: [f64; 3], angle: f64) -> Result<Mat2> {
    let norm = axis.iter().map(|c| c * c).sum::<f64>().sqrt();
    if !norm.is_finite() || (norm - 1.0).abs() > ALGEBRA_TOL {
        return Err(QsrError::NonUnitAxis { norm });
    }
    let (s, c) = (angle / 2.0).sin_cos();
    Ok(rodrigues(axis, c, s))
}

/// [`su2_exp`] about a Cartesian axis with an [`Angle`]; the half-angle
/// sine and cosine are exact when the angle is a symbolic multiple of π.
pub fn su2_exp_axis(axis: Axis, angle: Angle) -> Mat2 {
    let (s, c) = angle.half().sin_cos();
    rodrigues(axis.unit(), c, s)
}

fn rodrigues(n: [f64; 3], cos_half: f64, sin_half: f64) -> Mat2 {
    let [nx, ny, nz] = n;
    let c = Cplx::new(cos_half, 0.0);
    // −i·s·(nx σx + ny σy + nz σz)
    let m00 = c + Cplx::new(0.0, -sin_half * nz);
    let m11 = c + Cplx::new(0.0, sin_half * nz);
    let m01 = Cplx::new(-sin_half * ny, -sin_half * nx);
    let m10 = Cplx::new(sin_half * ny, -sin_half * nx);
    Mat2([[m00, m01], [m10, m11]])
}

/// Kronecker product `a ⊗ b` in the fixed basis ordering.
pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = Mat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out.0[2 * i + k][2 * j + l] = a.0[i][j] * b.0[k][l];
                }
            }
        }
    }
    out
}

pub fn apply(m: &Mat4, v: &Vec4) -> Vec4 {
    let mut out = Vec4::zeros();
    for (i, row) in m.0.iter().enumerate() {
        out.0[i] = row.iter().zip(v.0.iter()).map(|(a, b)| a * b).sum();
    }
    out
}

/// `⟨u|v⟩`, conjugate-linear in `u`.
pub fn inner(u: &Vec4, v: &Vec4) -> Cplx {
    u.0.iter().zip(v.0.iter()).map(|(a, b)| a.conj() * b).sum()
}

/// `⟨v|M|v⟩`.
pub fn expectation(m: &Mat4, v: &Vec4) -> Cplx {
    inner(v, &apply(m, v))
}
