//! The three exercises as data-driven scenarios.

mod cannon;
mod catalog;
mod config;
mod ex1;
mod preset;
mod sandwich;

pub use cannon::{
    place_target, CannonPose, Exercise2State, Exercise3State, HitOutcome, PlacedTarget, ShotResult,
    EX2_MASSES, EX3_MASS,
};
pub use catalog::{default_catalog, validate_catalog, FallObjectSpec, CATALOG_SIZE};
pub use config::{
    ExerciseConfig, SandwichGeometry, SlotTable, TargetSlot, SHOTS_PER_CONDITION, SLOT_COUNT,
};
pub use ex1::{build_exercise1, Exercise1State, Weighing};
pub use preset::GravityPreset;
pub use sandwich::{build_sandwich, sandwich_entry_plane, Platform};

use crate::physics::PhysicsError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExerciseError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("{0}")]
    State(String),
    #[error("no shots remaining")]
    Exhausted,
    #[error("projectile of {0} kg is not available here")]
    Projectile(f64),
    #[error("invalid aim: {0}")]
    Aim(String),
    #[error(transparent)]
    Physics(PhysicsError),
}
