use serde::{Deserialize, Serialize};

use super::{PhysicsError, Vec3};

/// Launch pitch angles (radians) that put a projectile through a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AimSolution {
    /// Two ballistic solutions under gravity; equal when the target sits on
    /// the edge of the reachable envelope.
    Pair {
        low: f64,
        high: f64,
    },
    /// Straight-line aim in zero gravity.
    Direct {
        angle: f64,
    },
    Infeasible,
}

impl AimSolution {
    /// The flattest feasible angle.
    pub fn preferred(&self) -> Option<f64> {
        match *self {
            AimSolution::Pair { low, .. } => Some(low),
            AimSolution::Direct { angle } => Some(angle),
            AimSolution::Infeasible => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        !matches!(self, AimSolution::Infeasible)
    }
}

/// Pitch needed to reach a point `dist` metres downrange and `elevation`
/// metres above the muzzle at muzzle speed `speed` under gravity `g`.
pub fn aim_solve(
    speed: f64,
    g: f64,
    dist: f64,
    elevation: f64,
) -> Result<AimSolution, PhysicsError> {
    if !(speed > 0.0) || !speed.is_finite() {
        return Err(PhysicsError::Domain(format!("speed {speed} must be > 0")));
    }
    if !(dist > 0.0) || !dist.is_finite() {
        return Err(PhysicsError::Domain(format!("distance {dist} must be > 0")));
    }
    if !(g >= 0.0) || !g.is_finite() || !elevation.is_finite() {
        return Err(PhysicsError::Domain(format!(
            "invalid gravity {g} or elevation {elevation}"
        )));
    }
    if g == 0.0 {
        return Ok(AimSolution::Direct {
            angle: elevation.atan2(dist),
        });
    }
    let v2 = speed * speed;
    let disc = v2 * v2 - g * (g * dist * dist + 2.0 * elevation * v2);
    if disc < 0.0 {
        return Ok(AimSolution::Infeasible);
    }
    let root = disc.sqrt();
    let gd = g * dist;
    Ok(AimSolution::Pair {
        low: ((v2 - root) / gd).atan(),
        high: ((v2 + root) / gd).atan(),
    })
}

/// Muzzle velocity for a pitch above horizontal and a yaw about `+y`
/// (positive yaw swings the barrel toward `+z`).
pub fn launch_velocity(speed: f64, yaw: f64, pitch: f64) -> Vec3 {
    Vec3::new(
        speed * pitch.cos() * yaw.cos(),
        speed * pitch.sin(),
        speed * pitch.cos() * yaw.sin(),
    )
}
