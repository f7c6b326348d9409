//! Total, dynamic and geometric phases from first principles.
//!
//! Everything here works directly from the joint evolution operator: the
//! total phase is `arg⟨ψ(0)|U|ψ(0)⟩`, the dynamic phase is
//! `D = −∫⟨ψ(0)| iU†U̇ |ψ(0)⟩ ds` over the traversal so far, and the
//! geometric phase is their difference wrapped into (−π, π].

use std::f64::consts::PI;

use serde::{Serialize, Serializer};

use crate::angle::Angle;
use crate::error::{QsrError, Result};
use crate::ring::{dynamic_generator, joint_unitary, RingConfig, RingPosition, Segment};
use crate::spinalg::{expectation, inner, kron, Adjoint, Mat2, Mat4, Vec4};
use crate::states::BellFamilyState;

/// Overlap magnitude below which a phase is reported as undefined.
pub const SINGULAR_TOL: f64 = 1e-9;

/// Default Simpson subintervals per arm.
pub const DEFAULT_QUAD_STEPS: usize = 1024;

/// Wraps into (−π, π]. Values within 1e-9 of −π are reported as +π.
pub fn wrap_angle(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    if y <= -PI + 1e-9 {
        y = PI;
    }
    y
}

/// Distance between two angles on the circle.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

/// Argument of an overlap, with its magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseValue {
    angle: Option<f64>,
    magnitude: f64,
}

impl PhaseValue {
    pub fn from_overlap(re: f64, im: f64) -> Self {
        Self::from_overlap_with_tol(re, im, SINGULAR_TOL)
    }

    pub fn from_overlap_with_tol(re: f64, im: f64, tol: f64) -> Self {
        let magnitude = re.hypot(im);
        let angle = (magnitude >= tol).then(|| wrap_angle(im.atan2(re)));
        PhaseValue { angle, magnitude }
    }

    pub fn defined(angle: f64, magnitude: f64) -> Self {
        PhaseValue {
            angle: Some(wrap_angle(angle)),
            magnitude,
        }
    }

    pub fn undefined(magnitude: f64) -> Self {
        PhaseValue {
            angle: None,
            magnitude,
        }
    }

    pub fn angle(&self) -> Option<f64> {
        self.angle
    }

    pub fn is_defined(&self) -> bool {
        self.angle.is_some()
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    /// Shifts a defined angle by `-by`, re-wrapping.
    pub fn minus(&self, by: f64) -> Self {
        PhaseValue {
            angle: self.angle.map(|a| wrap_angle(a - by)),
            magnitude: self.magnitude,
        }
    }
}

impl Serialize for PhaseValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("PhaseValue", 3)?;
        st.serialize_field("angle", &self.angle)?;
        st.serialize_field("defined", &self.is_defined())?;
        st.serialize_field("magnitude", &self.magnitude)?;
        st.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseBreakdown {
    pub state: BellFamilyState,
    pub eta: Angle,
    pub position: RingPosition,
    pub total: PhaseValue,
    pub dynamic_oracle: f64,
    /// The closed-form dynamic phase as printed, for comparison.
    pub dynamic_printed: f64,
    pub geometric: PhaseValue,
}

/// `⟨ψ|U|ψ⟩` for an arbitrary two-particle vector.
pub fn overlap(psi: &Vec4, cfg: &RingConfig, pos: &RingPosition) -> Result<num_complex::Complex64> {
    let u = joint_unitary(cfg, pos)?;
    Ok(expectation(&u, psi))
}

pub fn total_phase_of(psi: &Vec4, cfg: &RingConfig, pos: &RingPosition) -> Result<PhaseValue> {
    let z = overlap(psi, cfg, pos)?;
    Ok(PhaseValue::from_overlap(z.re, z.im))
}

pub fn total_phase(
    state: &BellFamilyState,
    cfg: &RingConfig,
    pos: &RingPosition,
) -> Result<PhaseValue> {
    total_phase_of(&state.vector(), cfg, pos)
}

/// `⟨ψ|G|ψ⟩` (real part) of the dynamic generator.
fn generator_expectation(psi: &Vec4, g: &Mat4) -> f64 {
    expectation(g, psi).re / inner(psi, psi).re
}

/// Exact dynamic phase: the generator is constant along each arm, so the
/// integral is a sum of (arm length) × (expectation) terms.
pub fn dynamic_phase_of(psi: &Vec4, cfg: &RingConfig, pos: &RingPosition) -> Result<f64> {
    pos.validate(cfg)?;
    let eta_gen = dynamic_generator(cfg, &RingPosition::eta_arm(Angle::ZERO))?;
    let eta_term = generator_expectation(psi, &eta_gen);
    Ok(match pos.segment {
        Segment::EtaArm => -pos.coord.radians() * eta_term,
        Segment::DeltaArm => {
            let delta_gen = dynamic_generator(cfg, &RingPosition::delta_arm(Angle::ZERO))?;
            let delta_term = generator_expectation(psi, &delta_gen);
            -(cfg.eta.radians() * eta_term + pos.coord.radians() * delta_term)
        }
    })
}

/// Dynamic phase by composite Simpson quadrature of the generator
/// expectation, sampled afresh at every node. `steps` subintervals per arm
/// (rounded up to even).
pub fn dynamic_phase_quadrature_of(
    psi: &Vec4,
    cfg: &RingConfig,
    pos: &RingPosition,
    steps: usize,
) -> Result<f64> {
    if steps == 0 {
        return Err(QsrError::InvalidParameter(
            "quadrature steps must be >= 1".into(),
        ));
    }
    pos.validate(cfg)?;
    let n = steps + steps % 2;
    let arm = |segment: Segment, length: f64| -> Result<f64> {
        if length == 0.0 {
            return Ok(0.0);
        }
        let h = length / n as f64;
        let mut acc = 0.0;
        for k in 0..=n {
            let at = RingPosition {
                segment,
                coord: Angle::from_radians((k as f64 * h).min(length)),
            };
            let w = match k {
                0 => 1.0,
                k if k == n => 1.0,
                k if k % 2 == 1 => 4.0,
                _ => 2.0,
            };
            acc += w * generator_expectation(psi, &dynamic_generator(cfg, &at)?);
        }
        Ok(acc * h / 3.0)
    };
    let integral = match pos.segment {
        Segment::EtaArm => arm(Segment::EtaArm, pos.coord.radians())?,
        Segment::DeltaArm => {
            arm(Segment::EtaArm, cfg.eta.radians())? + arm(Segment::DeltaArm, pos.coord.radians())?
        }
    };
    Ok(-integral)
}

pub fn dynamic_phase_oracle(
    state: &BellFamilyState,
    cfg: &RingConfig,
    pos: &RingPosition,
) -> Result<f64> {
    dynamic_phase_of(&state.vector(), cfg, pos)
}

pub fn dynamic_phase_quadrature(
    state: &BellFamilyState,
    cfg: &RingConfig,
    pos: &RingPosition,
    steps: usize,
) -> Result<f64> {
    dynamic_phase_quadrature_of(&state.vector(), cfg, pos, steps)
}

pub fn geometric_phase_of(psi: &Vec4, cfg: &RingConfig, pos: &RingPosition) -> Result<PhaseValue> {
    let total = total_phase_of(psi, cfg, pos)?;
    let dynamic = dynamic_phase_of(psi, cfg, pos)?;
    Ok(total.minus(dynamic))
}

pub fn geometric_phase(
    state: &BellFamilyState,
    cfg: &RingConfig,
    pos: &RingPosition,
) -> Result<PhaseValue> {
    geometric_phase_of(&state.vector(), cfg, pos)
}

/// Full decomposition at one point.
pub fn evaluate(
    state: &BellFamilyState,
    cfg: &RingConfig,
    pos: &RingPosition,
) -> Result<PhaseBreakdown> {
    let psi = state.vector();
    let total = total_phase_of(&psi, cfg, pos)?;
    let dynamic_oracle = dynamic_phase_of(&psi, cfg, pos)?;
    let dynamic_printed = crate::closed_forms::printed_dynamic_phase(state, cfg, pos);
    Ok(PhaseBreakdown {
        state: *state,
        eta: cfg.eta,
        position: *pos,
        total,
        dynamic_oracle,
        dynamic_printed,
        geometric: total.minus(dynamic_oracle),
    })
}

/// Cone-energy expectations on the δ-arms, per particle and weight component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArmEnergies {
    pub particle1_p0: f64,
    pub particle1_p1: f64,
    pub particle2_p0: f64,
    pub particle2_p1: f64,
}

impl ArmEnergies {
    pub fn particle1(&self) -> f64 {
        self.particle1_p0 + self.particle1_p1
    }

    pub fn particle2(&self) -> f64 {
        self.particle2_p0 + self.particle2_p1
    }

    pub fn sum(&self) -> f64 {
        self.particle1() + self.particle2()
    }
}

/// Single-particle δ-arm generators `(G₁, G₂)`:
/// `G₁ = e^{iσ_yη/2}(−σ_x/2)e^{−iσ_yη/2}`, `G₂ = e^{−iσ_xη/2}(σ_y/2)e^{iσ_xη/2}`.
pub fn delta_arm_particle_generators(eta: Angle) -> (Mat2, Mat2) {
    use crate::spinalg::{su2_exp_axis, Axis, Cplx};
    let half = Cplx::new(0.5, 0.0);
    let ry = su2_exp_axis(Axis::Y, eta); // e^{−iσyη/2}
    let rx = su2_exp_axis(Axis::X, eta.neg()); // e^{+iσxη/2}
    let g1 = ry.adjoint() * (-Mat2::sigma_x().scale(half)) * ry;
    let g2 = rx.adjoint() * Mat2::sigma_y().scale(half) * rx;
    (g1, g2)
}

/// `p_k·⟨b_k|G_i|b_k⟩` on the basis kets `b_0, b_1` of the state.
pub fn arm_energy_expectations(state: &BellFamilyState, cfg: &RingConfig) -> ArmEnergies {
    let (g1, g2) = delta_arm_particle_generators(cfg.eta);
    let id = Mat2::identity();
    let op1 = kron(&g1, &id);
    let op2 = kron(&id, &g2);
    let [(a0, b0), (a1, b1)] = state.components();
    let k0 = Vec4::basis(a0, b0);
    let k1 = Vec4::basis(a1, b1);
    ArmEnergies {
        particle1_p0: state.p0() * expectation(&op1, &k0).re,
        particle1_p1: state.p1() * expectation(&op1, &k1).re,
        particle2_p0: state.p0() * expectation(&op2, &k0).re,
        particle2_p1: state.p1() * expectation(&op2, &k1).re,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::Sign;

    fn pi(n: i64, d: i64) -> Angle {
        Angle::pi_fraction(n, d)
    }

    #[test]
    fn wrapping() {
        assert_eq!(wrap_angle(0.0), 0.0);
        assert_eq!(wrap_angle(-PI), PI);
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(-PI + 1e-10), PI);
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(-0.5 - 4.0 * PI) + 0.5).abs() < 1e-12);
        assert!(angular_distance(PI - 1e-8, -PI + 1e-8) < 1e-7);
    }

    #[test]
    fn phi_quarter_turns_overlap_half() {
        let cfg = RingConfig::new(pi(1, 2)).unwrap();
        for p0 in [0.0, 0.3, 0.5, 1.0] {
            let st = BellFamilyState::phi(Sign::Minus, p0).unwrap();
            let t = total_phase(&st, &cfg, &RingPosition::delta_arm(pi(1, 2))).unwrap();
            assert_eq!(t.angle(), Some(0.0));
            assert!((t.magnitude() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn start_is_trivial() {
        let cfg = RingConfig::new(2.2).unwrap();
        let st = BellFamilyState::psi(Sign::Plus, 0.8).unwrap();
        let t = total_phase(&st, &cfg, &RingPosition::START).unwrap();
        assert_eq!(t.angle(), Some(0.0));
        assert!((t.magnitude() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn phi_singular_at_odd_half_turn() {
        let cfg = RingConfig::new(pi(1, 1)).unwrap();
        let st = BellFamilyState::phi(Sign::Plus, 0.4).unwrap();
        let t = total_phase(&st, &cfg, &RingPosition::delta_arm(Angle::ZERO)).unwrap();
        assert!(!t.is_defined());
        assert!(t.magnitude() < SINGULAR_TOL);
        assert!(
            !geometric_phase(&st, &cfg, &RingPosition::delta_arm(Angle::ZERO))
                .unwrap()
                .is_defined()
        );
    }

    #[test]
    fn phi_and_maximal_psi_have_no_dynamic_phase() {
        let cfg = RingConfig::new(2.3).unwrap();
        let pos = RingPosition::delta_arm(1.7);
        for st in [
            BellFamilyState::phi(Sign::Plus, 0.2).unwrap(),
            BellFamilyState::phi(Sign::Minus, 1.0).unwrap(),
            BellFamilyState::psi(Sign::Plus, 0.5).unwrap(),
            BellFamilyState::psi(Sign::Minus, 0.5).unwrap(),
        ] {
            assert!(dynamic_phase_oracle(&st, &cfg, &pos).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn unentangled_psi_dynamic_phase() {
        // −(p0−p1)·sin η·δ with η = δ = π/2, (p0, p1) = (1, 0)
        let cfg = RingConfig::new(pi(1, 2)).unwrap();
        let st = BellFamilyState::psi(Sign::Plus, 1.0).unwrap();
        let pos = RingPosition::delta_arm(pi(1, 2));
        let exact = dynamic_phase_oracle(&st, &cfg, &pos).unwrap();
        let quad = dynamic_phase_quadrature(&st, &cfg, &pos, DEFAULT_QUAD_STEPS).unwrap();
        assert!((exact + PI / 2.0).abs() < 1e-12);
        assert!((quad - exact).abs() < 1e-9);
    }

    #[test]
    fn quadrature_rejects_zero_steps() {
        let cfg = RingConfig::new(1.0).unwrap();
        let st = BellFamilyState::psi(Sign::Plus, 1.0).unwrap();
        assert!(dynamic_phase_quadrature(&st, &cfg, &RingPosition::START, 0).is_err());
        // odd step counts are rounded up, not rejected
        let q = dynamic_phase_quadrature(&st, &cfg, &RingPosition::delta_arm(0.5), 7).unwrap();
        let e = dynamic_phase_oracle(&st, &cfg, &RingPosition::delta_arm(0.5)).unwrap();
        assert!((q - e).abs() < 1e-12);
    }

    #[test]
    fn maximal_psi_geometric_values() {
        let st = BellFamilyState::psi(Sign::Plus, 0.5).unwrap();
        let cfg = RingConfig::new(pi(1, 1)).unwrap();
        let g = geometric_phase(&st, &cfg, &RingPosition::delta_arm(pi(1, 2))).unwrap();
        assert_eq!(g.angle(), Some(PI));
        let cfg = RingConfig::new(pi(2, 1)).unwrap();
        for k in [0, 1, 3, 5, 7, 8] {
            let pos = RingPosition::delta_arm(pi(2 * k, 8));
            let g = geometric_phase(&st, &cfg, &pos).unwrap();
            assert!(g.angle().unwrap().abs() < 1e-12, "k={k}");
        }
        // cos δ + 1 = 0 at δ = π: orthogonal
        let g = geometric_phase(&st, &cfg, &RingPosition::delta_arm(pi(1, 1))).unwrap();
        assert!(!g.is_defined());
    }

    #[test]
    fn cone_energies() {
        let eta: f64 = 0.9;
        let (s, p0) = (eta.sin(), 0.3);
        let cfg = RingConfig::new(eta).unwrap();
        let phi = arm_energy_expectations(&BellFamilyState::phi(Sign::Plus, p0).unwrap(), &cfg);
        assert!((phi.particle1_p0 + p0 * s / 2.0).abs() < 1e-12);
        assert!(phi.sum().abs() < 1e-12);
        let psi = arm_energy_expectations(&BellFamilyState::psi(Sign::Plus, p0).unwrap(), &cfg);
        assert!((psi.particle2_p0 - p0 * s / 2.0).abs() < 1e-12);
        let cfg = RingConfig::new(pi(1, 1)).unwrap();
        let e = arm_energy_expectations(&BellFamilyState::psi(Sign::Minus, 0.7).unwrap(), &cfg);
        assert_eq!(
            [
                e.particle1_p0,
                e.particle1_p1,
                e.particle2_p0,
                e.particle2_p1
            ]
            .map(f64::abs),
            [0.0; 4]
        );
    }

    #[test]
    fn undefined_phase_serializes_null_angle() {
        let v = serde_json::to_string(&PhaseValue::undefined(1e-12)).unwrap();
        assert_eq!(v, r#"{"angle":null,"defined":false,"magnitude":1e-12}"#);
    }
}
