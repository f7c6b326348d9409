//! Square-ring geometry with Rashba spin-orbit coupling.
//!
//! Particle 1 takes path I (horizontal η-arm, then vertical δ-arm);
//! particle 2 takes path II (vertical η-arm, then horizontal δ-arm).
//! Travelling a phase length θ along a direction with Rashba generator `G`
//! applies `exp(iθG)`. Both particles advance in lockstep, so one
//! [`RingPosition`] describes the pair.

use serde::Serialize;

use crate::angle::Angle;
use crate::error::{QsrError, Result};
use crate::spinalg::{kron, su2_exp_axis, Adjoint, Axis, Cplx, Mat2, Mat4};

/// Slack allowed when checking `coord ≤ eta`.
const POSITION_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RingConfig {
    /// Phase length of each η-arm (radians, dimensionless).
    pub eta: Angle,
    /// Nominal angular rate; δ = ωt. Not used by the phase math.
    pub omega: f64,
    pub velocity: f64,
    pub wavevector: f64,
}

impl RingConfig {
    pub fn new(eta: impl Into<Angle>) -> Result<Self> {
        let eta = eta.into();
        if !eta.radians().is_finite() || eta.radians() < 0.0 {
            return Err(QsrError::InvalidRing(format!(
                "eta must be finite and non-negative, got {}",
                eta.radians()
            )));
        }
        Ok(RingConfig {
            eta,
            omega: 1.0,
            velocity: 1.0,
            wavevector: 1.0,
        })
    }

    /// Sets the nominal ω = kν bookkeeping.
    pub fn with_kinematics(mut self, velocity: f64, wavevector: f64) -> Result<Self> {
        let omega = velocity * wavevector;
        if !(omega.is_finite() && omega > 0.0) {
            return Err(QsrError::InvalidRing(format!(
                "omega must be > 0, got {omega}"
            )));
        }
        self.velocity = velocity;
        self.wavevector = wavevector;
        self.omega = omega;
        Ok(self)
    }

    /// Traversal time matching a position, from δ = ωt.
    pub fn time_at(&self, pos: &RingPosition) -> f64 {
        let s = match pos.segment {
            Segment::EtaArm => pos.coord.radians(),
            Segment::DeltaArm => self.eta.radians() + pos.coord.radians(),
        };
        s / self.omega
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Segment {
    EtaArm,
    DeltaArm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RingPosition {
    pub segment: Segment,
    /// Progress `s ∈ [0, η]` on the η-arm, or `δ ∈ [0, η]` on the δ-arm.
    pub coord: Angle,
}

impl RingPosition {
    pub const START: RingPosition = RingPosition {
        segment: Segment::EtaArm,
        coord: Angle::ZERO,
    };

    pub fn eta_arm(s: impl Into<Angle>) -> Self {
        RingPosition {
            segment: Segment::EtaArm,
            coord: s.into(),
        }
    }

    pub fn delta_arm(delta: impl Into<Angle>) -> Self {
        RingPosition {
            segment: Segment::DeltaArm,
            coord: delta.into(),
        }
    }

    pub fn validate(&self, cfg: &RingConfig) -> Result<()> {
        let c = self.coord.radians();
        let eta = cfg.eta.radians();
        if !c.is_finite() || c < 0.0 || c > eta + POSITION_SLACK {
            return Err(QsrError::InvalidPosition { coord: c, eta });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PathId {
    /// Horizontal then vertical; carries particle 1.
    PathI,
    /// Vertical then horizontal; carries particle 2.
    PathII,
}

impl PathId {
    pub fn legs(self) -> (Direction, Direction) {
        match self {
            PathId::PathI => (Direction::PlusX, Direction::PlusY),
            PathId::PathII => (Direction::PlusY, Direction::PlusX),
        }
    }
}

/// In-plane travel direction along a square-ring edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    PlusX,
    MinusX,
    PlusY,
    MinusY,
}

impl Direction {
    pub fn from_vector(x: f64, y: f64) -> Result<Self> {
        let tol = 1e-12;
        let unit = |v: f64| (v.abs() - 1.0).abs() < tol;
        match (x, y) {
            (x, y) if unit(x) && y.abs() < tol => Ok(if x > 0.0 {
                Direction::PlusX
            } else {
                Direction::MinusX
            }),
            (x, y) if unit(y) && x.abs() < tol => Ok(if y > 0.0 {
                Direction::PlusY
            } else {
                Direction::MinusY
            }),
            _ => Err(QsrError::NonAxisDirection { x, y }),
        }
    }

    /// `(axis, sign)` with generator `sign · σ_axis / 2`.
    ///
    /// From H = σˣk_y − σʸk_x: motion along x couples to −σʸ, along y to +σˣ.
    fn generator_axis(self) -> (Axis, f64) {
        match self {
            Direction::PlusX => (Axis::Y, -1.0),
            Direction::MinusX => (Axis::Y, 1.0),
            Direction::PlusY => (Axis::X, 1.0),
            Direction::MinusY => (Axis::X, -1.0),
        }
    }

    pub fn generator(self) -> Mat2 {
        let (axis, sign) = self.generator_axis();
        axis.pauli().scale(Cplx::new(sign / 2.0, 0.0))
    }

    /// `exp(i·θ·G)` for this direction's generator `G`.
    pub fn precession(self, theta: Angle) -> Mat2 {
        let (axis, sign) = self.generator_axis();
        // exp(iθ·sign·σ/2) = su2_exp(axis, −sign·θ)
        let angle = if sign > 0.0 { theta.neg() } else { theta };
        su2_exp_axis(axis, angle)
    }
}

/// Instantaneous phase generator for travel along `direction`
/// (`(x, y)` must be ±x̂ or ±ŷ).
pub fn rashba_generator(direction: [f64; 2]) -> Result<Mat2> {
    Ok(Direction::from_vector(direction[0], direction[1])?.generator())
}

/// Single-particle evolution from the emitter to `pos` along `path`.
pub fn path_unitary(cfg: &RingConfig, path: PathId, pos: &RingPosition) -> Result<Mat2> {
    pos.validate(cfg)?;
    let (first, second) = path.legs();
    Ok(match pos.segment {
        Segment::EtaArm => first.precession(pos.coord),
        Segment::DeltaArm => second.precession(pos.coord) * first.precession(cfg.eta),
    })
}

/// Joint evolution `U_I ⊗ U_II`.
pub fn joint_unitary(cfg: &RingConfig, pos: &RingPosition) -> Result<Mat4> {
    let u1 = path_unitary(cfg, PathId::PathI, pos)?;
    let u2 = path_unitary(cfg, PathId::PathII, pos)?;
    Ok(kron(&u1, &u2))
}

/// `i·U†·dU/ds` at `pos`.
///
/// On each arm `U = exp(isG)·C` with `C` fixed, so the generator is
/// `−C†GC`, summed over both particles. It is constant along each arm.
pub fn dynamic_generator(cfg: &RingConfig, pos: &RingPosition) -> Result<Mat4> {
    pos.validate(cfg)?;
    let id = Mat2::identity();
    let particle = |path: PathId| -> Mat2 {
        let (first, second) = path.legs();
        match pos.segment {
            Segment::EtaArm => -first.generator(),
            Segment::DeltaArm => {
                let c = first.precession(cfg.eta);
                -(c.adjoint() * second.generator() * c)
            }
        }
    };
    Ok(kron(&particle(PathId::PathI), &id) + kron(&id, &particle(PathId::PathII)))
}

/// The δ-arm generator as the explicit 4×4 matrix in η.
pub fn delta_arm_generator_matrix(eta: Angle) -> Mat4 {
    let (s, c) = eta.sin_cos();
    let z = Cplx::new(0.0, 0.0);
    let r = |x: f64| Cplx::new(x / 2.0, 0.0);
    let i = |x: f64| Cplx::new(0.0, x / 2.0);
    Mat4([
        [z, i(-c), r(-c), z],
        [i(c), r(-2.0 * s), z, r(-c)],
        [r(-c), z, r(2.0 * s), i(-c)],
        [z, r(-c), i(c), z],
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinalg::ALGEBRA_TOL;
    use std::f64::consts::PI;

    const ONE: Cplx = Cplx::new(1.0, 0.0);
    const IM: Cplx = Cplx::new(0.0, 1.0);

    #[test]
    fn generators_follow_travel_direction() {
        let gx = rashba_generator([1.0, 0.0]).unwrap();
        assert_eq!(gx, Mat2::sigma_y().scale(Cplx::new(-0.5, 0.0)));
        let gy = rashba_generator([0.0, 1.0]).unwrap();
        assert_eq!(gy, Mat2::sigma_x().scale(Cplx::new(0.5, 0.0)));
        assert_eq!(rashba_generator([-1.0, 0.0]).unwrap(), -gx);
        assert!(matches!(
            rashba_generator([0.6, 0.8]),
            Err(QsrError::NonAxisDirection { .. })
        ));
    }

    #[test]
    fn precession_reproduces_path_factors() {
        let eta = 0.83;
        // exp(−iησy/2) for +x, exp(+iησx/2) for +y
        let ux = Direction::PlusX.precession(eta.into());
        let expect_x = Mat2::identity().scale(ONE * (eta / 2.0).cos())
            - Mat2::sigma_y().scale(IM * (eta / 2.0).sin());
        assert!(ux.max_abs_diff(&expect_x) < ALGEBRA_TOL);
        let uy = Direction::PlusY.precession(eta.into());
        let expect_y = Mat2::identity().scale(ONE * (eta / 2.0).cos())
            + Mat2::sigma_x().scale(IM * (eta / 2.0).sin());
        assert!(uy.max_abs_diff(&expect_y) < ALGEBRA_TOL);
        assert_eq!(Direction::PlusX.precession(Angle::ZERO), Mat2::identity());
    }

    #[test]
    fn path_one_at_corner() {
        let cfg = RingConfig::new(1.1).unwrap();
        let u = path_unitary(&cfg, PathId::PathI, &RingPosition::delta_arm(0.0)).unwrap();
        assert_eq!(u, Direction::PlusX.precession(cfg.eta));
    }

    #[test]
    fn path_one_full_half_turns() {
        // e^{iπσx/2}·e^{−iπσy/2} = (iσx)(−iσy) = σxσy = iσz
        let cfg = RingConfig::new(Angle::pi_fraction(1, 1)).unwrap();
        let pos = RingPosition::delta_arm(Angle::pi_fraction(1, 1));
        let u = path_unitary(&cfg, PathId::PathI, &pos).unwrap();
        let expected = Mat2::sigma_x().scale(IM) * Mat2::sigma_y().scale(-IM);
        assert!(u.max_abs_diff(&expected) < ALGEBRA_TOL);
        assert!(u.max_abs_diff(&Mat2::sigma_z().scale(IM)) < ALGEBRA_TOL);
    }

    #[test]
    fn path_two_full_turn_on_eta_arm() {
        let cfg = RingConfig::new(Angle::pi_fraction(2, 1)).unwrap();
        let pos = RingPosition::eta_arm(Angle::pi_fraction(2, 1));
        let u = path_unitary(&cfg, PathId::PathII, &pos).unwrap();
        assert_eq!(u, -Mat2::identity());
        let numeric = path_unitary(
            &RingConfig::new(2.0 * PI).unwrap(),
            PathId::PathII,
            &RingPosition::eta_arm(2.0 * PI),
        )
        .unwrap();
        assert!(numeric.max_abs_diff(&-Mat2::identity()) < ALGEBRA_TOL);
    }

    #[test]
    fn joint_unitary_identity_at_start() {
        let cfg = RingConfig::new(2.4).unwrap();
        assert_eq!(
            joint_unitary(&cfg, &RingPosition::START).unwrap(),
            Mat4::identity()
        );
        let degenerate = RingConfig::new(0.0).unwrap();
        let u = joint_unitary(&degenerate, &RingPosition::delta_arm(0.0)).unwrap();
        assert_eq!(u, Mat4::identity());
    }

    #[test]
    fn rejects_positions_off_the_arm() {
        let cfg = RingConfig::new(1.0).unwrap();
        for pos in [RingPosition::delta_arm(1.5), RingPosition::eta_arm(-0.1)] {
            assert!(matches!(
                joint_unitary(&cfg, &pos),
                Err(QsrError::InvalidPosition { .. })
            ));
        }
        assert!(RingConfig::new(-1.0).is_err());
        assert!(RingConfig::new(f64::NAN).is_err());
    }

    #[test]
    fn delta_arm_generator_at_quarter_turn() {
        // cos η = 0, sin η = 1: diag(0, −1, 1, 0)
        let g = delta_arm_generator_matrix(Angle::pi_fraction(1, 2));
        let mut expected = Mat4::zeros();
        expected.0[1][1] = -ONE;
        expected.0[2][2] = ONE;
        assert_eq!(g, expected);
        let cfg = RingConfig::new(Angle::pi_fraction(1, 2)).unwrap();
        let derived = dynamic_generator(&cfg, &RingPosition::delta_arm(0.3)).unwrap();
        assert!(derived.max_abs_diff(&expected) < ALGEBRA_TOL);
    }

    #[test]
    fn delta_arm_generator_at_half_turn() {
        // sin η = 0 kills the diagonal; cos η = −1 leaves ±½ off-diagonals.
        let g = delta_arm_generator_matrix(Angle::pi_fraction(1, 1));
        for k in 0..4 {
            assert_eq!(g.0[k][k], Cplx::new(0.0, 0.0));
        }
        assert_eq!(g.0[0][1], Cplx::new(0.0, 0.5));
        assert_eq!(g.0[0][2], Cplx::new(0.5, 0.0));
        assert_eq!(g.0[1][3], Cplx::new(0.5, 0.0));
        assert_eq!(g.0[2][3], Cplx::new(0.0, 0.5));
    }

    #[test]
    fn eta_arm_generator_is_constant() {
        // −(G_{+x} ⊗ I + I ⊗ G_{+y}) = σy/2 ⊗ I − I ⊗ σx/2
        let cfg = RingConfig::new(2.0).unwrap();
        let half = Cplx::new(0.5, 0.0);
        let expected = kron(&Mat2::sigma_y().scale(half), &Mat2::identity())
            - kron(&Mat2::identity(), &Mat2::sigma_x().scale(half));
        for s in [0.0, 0.7, 2.0] {
            let g = dynamic_generator(&cfg, &RingPosition::eta_arm(s)).unwrap();
            assert!(g.max_abs_diff(&expected) < ALGEBRA_TOL);
        }
    }

    #[test]
    fn kinematics_bookkeeping() {
        let cfg = RingConfig::new(1.0)
            .unwrap()
            .with_kinematics(2.0, 3.0)
            .unwrap();
        assert_eq!(cfg.omega, 6.0);
        assert!((cfg.time_at(&RingPosition::delta_arm(0.5)) - 0.25).abs() < 1e-15);
        assert!(RingConfig::new(1.0)
            .unwrap()
            .with_kinematics(-1.0, 1.0)
            .is_err());
    }
}
