//! Exact kinematics under uniform and piecewise-constant gravity.
//!
//! Conventions: SI units, `y` up, gravity along `-y`, firing axis `+x`.
//! There is no drag, so mass never enters a kinematic formula.

mod aim;
pub mod batch;
mod dump;
mod field;
mod kinematics;
mod rk4;
mod roots;
mod sampling;
mod trajectory;
mod vec3;

pub use aim::{aim_solve, launch_velocity, AimSolution};
pub use dump::{format_sig9, write_traj_csv, TRAJ_CSV_HEADER};
pub use field::{Box3, GravityField, Region, RegionId};
pub use kinematics::{
    balance_compare, free_fall_time, propagate_uniform, region_exit_time, BalanceReading, FallTime,
    ProjectileState,
};
pub use rk4::{rk4_reference, ReferencePath};
pub use roots::EPS_T;
pub use sampling::{hit_test, sample_beads, Hit, SphereTarget};
pub use trajectory::{
    propagate_piecewise, Segment, StopCondition, Terminal, Trajectory, MAX_SEGMENTS,
};
pub use vec3::Vec3;

/// Earth surface gravity, m/s².
pub const G_EARTH: f64 = 9.807;
/// Lunar surface gravity, m/s².
pub const G_MOON: f64 = 1.62;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PhysicsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("degenerate box: min {min:?} must be < max {max:?} on every axis")]
    DegenerateBox { min: Vec3, max: Vec3 },
    #[error("field regions {0} and {1} overlap")]
    OverlappingRegions(usize, usize),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("trajectory exceeded {0} segments; field geometry is degenerate")]
    Divergence(usize),
}
