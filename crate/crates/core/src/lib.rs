//! Spin-orbit phases of two-qubit Bell-family states carried around a
//! square ring with Rashba coupling.
//!
//! Each particle of the pair follows one of the two paths around the ring;
//! the pair's accumulated total phase is split into a dynamic part and a
//! geometric remainder, compared against closed forms, and scanned over the
//! ring geometry.

pub mod angle;
pub mod closed_forms;
pub mod error;
pub mod phase;
pub mod ring;
pub mod roots;
pub mod spinalg;
pub mod states;
pub mod sweep;

pub use angle::Angle;
pub use closed_forms::{
    verify_closed_forms, ClosedFormReport, EqId, Verdict, VerifyGrid, VerifyReport,
};
pub use error::{QsrError, Result};
pub use phase::{evaluate, PhaseBreakdown, PhaseValue};
pub use ring::{joint_unitary, path_unitary, Direction, PathId, RingConfig, RingPosition, Segment};
pub use spinalg::{Cplx, Mat2, Mat4, Vec4};
pub use states::{make_state, BellFamilyState, BellKind, EntanglementClass, Sign};
pub use sweep::{
    arm_coloring, classify_point, find_switch_loci, run_sweep, table1_report, Engine, SweepSpec,
    SwitchLocus,
};
