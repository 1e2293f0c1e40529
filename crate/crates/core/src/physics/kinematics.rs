use serde::{Deserialize, Serialize};

use super::roots::{box_transition, Crossing, Path};
use super::{Box3, PhysicsError, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectileState {
    pub pos: Vec3,
    pub vel: Vec3,
    pub t: f64,
    pub mass: f64,
}

impl ProjectileState {
    pub fn new(pos: Vec3, vel: Vec3, mass: f64) -> Result<Self, PhysicsError> {
        let s = Self {
            pos,
            vel,
            t: 0.0,
            mass,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), PhysicsError> {
        if !self.pos.is_finite() || !self.vel.is_finite() || !self.t.is_finite() {
            return Err(PhysicsError::NonFinite("projectile state"));
        }
        if self.t < 0.0 {
            return Err(PhysicsError::Domain(format!("time {} < 0", self.t)));
        }
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return Err(PhysicsError::Domain(format!(
                "mass {} must be > 0",
                self.mass
            )));
        }
        Ok(())
    }

    /// Position and velocity bitwise equal; time and mass ignored.
    pub fn same_motion(&self, other: &ProjectileState) -> bool {
        self.pos.bits_eq(other.pos) && self.vel.bits_eq(other.vel)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "seconds")]
pub enum FallTime {
    Lands(f64),
    NeverLands,
}

impl FallTime {
    pub fn seconds(self) -> Option<f64> {
        match self {
            FallTime::Lands(t) => Some(t),
            FallTime::NeverLands => None,
        }
    }
}

/// Time to fall `height` metres from rest under gravity `g`.
pub fn free_fall_time(height: f64, g: f64) -> Result<FallTime, PhysicsError> {
    if !height.is_finite() || !g.is_finite() {
        return Err(PhysicsError::NonFinite("free fall input"));
    }
    if height <= 0.0 {
        return Err(PhysicsError::Domain(format!(
            "drop height {height} must be > 0"
        )));
    }
    if g < 0.0 {
        return Err(PhysicsError::Domain(format!("gravity {g} must be >= 0")));
    }
    if g == 0.0 {
        return Ok(FallTime::NeverLands);
    }
    Ok(FallTime::Lands((2.0 * height / g).sqrt()))
}

pub fn propagate_uniform(
    s0: &ProjectileState,
    accel: Vec3,
    dt: f64,
) -> Result<ProjectileState, PhysicsError> {
    if !dt.is_finite() || !accel.is_finite() {
        return Err(PhysicsError::NonFinite("propagation input"));
    }
    if dt < 0.0 {
        return Err(PhysicsError::Domain(format!("dt {dt} must be >= 0")));
    }
    s0.validate()?;
    Ok(advance(s0, accel, dt))
}

pub(crate) fn advance(s0: &ProjectileState, accel: Vec3, dt: f64) -> ProjectileState {
    ProjectileState {
        pos: s0.pos + s0.vel * dt + accel * (0.5 * dt * dt),
        vel: s0.vel + accel * dt,
        t: s0.t + dt,
        mass: s0.mass,
    }
}

/// Earliest time after `s0` at which the analytic path leaves `bx`.
pub fn region_exit_time(
    s0: &ProjectileState,
    bx: &Box3,
    accel: Vec3,
    t_max: f64,
) -> Result<Option<f64>, PhysicsError> {
    if !bx.contains(s0.pos) {
        return Err(PhysicsError::Precondition(format!(
            "start {:?} is outside the box",
            s0.pos
        )));
    }
    let path = Path {
        pos: s0.pos,
        vel: s0.vel,
        accel,
    };
    let mut exit = box_transition(&path, bx, t_max, Crossing::Exit);
    // A breakpoint exactly at the horizon still counts.
    if exit.is_none() && t_max > 0.0 && !bx.contains(path.at(t_max)) {
        exit = Some(t_max);
    }
    Ok(exit)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BalanceReading {
    LeftDown,
    RightDown,
    Balanced,
}

pub fn balance_compare(mass_left: f64, mass_right: f64) -> Result<BalanceReading, PhysicsError> {
    for m in [mass_left, mass_right] {
        if !(m > 0.0) || !m.is_finite() {
            return Err(PhysicsError::Domain(format!("mass {m} must be > 0")));
        }
    }
    Ok(match mass_left.partial_cmp(&mass_right) {
        Some(std::cmp::Ordering::Greater) => BalanceReading::LeftDown,
        Some(std::cmp::Ordering::Less) => BalanceReading::RightDown,
        _ => BalanceReading::Balanced,
    })
}
