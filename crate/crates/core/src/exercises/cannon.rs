use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{
    build_sandwich, sandwich_entry_plane, ExerciseConfig, ExerciseError, GravityPreset, Platform,
    SlotTable, SHOTS_PER_CONDITION, SLOT_COUNT,
};
use crate::physics::{
    hit_test, launch_velocity, propagate_piecewise, sample_beads, GravityField, Hit,
    ProjectileState, SphereTarget, StopCondition, Trajectory, Vec3,
};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CannonPose {
    pub yaw: f64,
    pub pitch: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlacedTarget {
    pub slot: usize,
    pub target: SphereTarget,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum HitOutcome {
    Hit {
        hit: Hit,
    },
    Miss,
    /// Exercise 3 has no targets.
    NotApplicable,
}

impl HitOutcome {
    pub fn is_hit(&self) -> bool {
        matches!(self, HitOutcome::Hit { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotResult {
    pub trajectory: Trajectory,
    pub beads: Vec<Vec3>,
    pub hit: HitOutcome,
}

/// Draws the next target slot uniformly from the table.
pub fn place_target<R: Rng>(
    rng: &mut R,
    slots: &SlotTable,
    config: &ExerciseConfig,
) -> PlacedTarget {
    let slot = rng.random_range(0..SLOT_COUNT);
    let s = slots.get(slot).expect("validated table has every slot");
    PlacedTarget {
        slot,
        target: config.target_for(s),
    }
}

fn check_pitch(pitch: f64, yaw: f64) -> Result<(), ExerciseError> {
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&pitch) || !yaw.is_finite() {
        return Err(ExerciseError::Aim(format!(
            "pitch {pitch} rad outside [0, pi/2] or non-finite yaw"
        )));
    }
    Ok(())
}

fn fly(
    field: &GravityField,
    muzzle: Vec3,
    speed: f64,
    pose: CannonPose,
    mass: f64,
    stop: &StopCondition,
) -> Result<Trajectory, ExerciseError> {
    let s0 = ProjectileState::new(muzzle, launch_velocity(speed, pose.yaw, pose.pitch), mass)
        .map_err(ExerciseError::Physics)?;
    propagate_piecewise(field, &s0, stop).map_err(ExerciseError::Physics)
}

/// Projectile masses offered at the Exercise 2 cannon, kg.
pub const EX2_MASSES: [f64; 2] = [1.0, 2.0];
pub const EX3_MASS: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exercise2State {
    pub gravity: GravityPreset,
    pub shots_taken: usize,
    pub current_target: Option<PlacedTarget>,
    pub cannon: CannonPose,
    /// Loaded projectile mass, kg.
    pub projectile: Option<f64>,
    pub hits: usize,
}

impl Exercise2State {
    pub fn new(gravity: GravityPreset) -> Self {
        Self {
            gravity,
            shots_taken: 0,
            current_target: None,
            cannon: CannonPose::default(),
            projectile: None,
            hits: 0,
        }
    }

    pub fn shots_remaining(&self) -> usize {
        SHOTS_PER_CONDITION - self.shots_taken
    }

    pub fn load(&mut self, mass: f64) -> Result<(), ExerciseError> {
        if !EX2_MASSES.contains(&mass) {
            return Err(ExerciseError::Projectile(mass));
        }
        self.projectile = Some(mass);
        Ok(())
    }

    fn shot(
        &self,
        config: &ExerciseConfig,
        pose: CannonPose,
        mass: f64,
    ) -> Result<ShotResult, ExerciseError> {
        let traj = fly(
            &self.gravity.field(),
            config.muzzle(),
            config.muzzle_speed,
            pose,
            mass,
            &config.cannon_stop(),
        )?;
        let beads = sample_beads(&traj, config.bead_step, config.max_beads, None);
        let hit = match &self.current_target {
            Some(t) => {
                hit_test(&traj, &t.target).map_or(HitOutcome::Miss, |hit| HitOutcome::Hit { hit })
            }
            None => HitOutcome::Miss,
        };
        Ok(ShotResult {
            trajectory: traj,
            beads,
            hit,
        })
    }

    /// Bead string for the loaded cannon at the given orientation.
    pub fn predicted_beads(
        &mut self,
        config: &ExerciseConfig,
        yaw: f64,
        pitch: f64,
    ) -> Result<Vec<Vec3>, ExerciseError> {
        check_pitch(pitch, yaw)?;
        let mass = self
            .projectile
            .ok_or_else(|| ExerciseError::State("cannon is not loaded".into()))?;
        self.cannon = CannonPose { yaw, pitch };
        Ok(self.shot(config, self.cannon, mass)?.beads)
    }

    pub fn fire(
        &mut self,
        config: &ExerciseConfig,
        yaw: f64,
        pitch: f64,
        mass: f64,
    ) -> Result<ShotResult, ExerciseError> {
        if self.shots_remaining() == 0 {
            return Err(ExerciseError::Exhausted);
        }
        check_pitch(pitch, yaw)?;
        if !EX2_MASSES.contains(&mass) {
            return Err(ExerciseError::Projectile(mass));
        }
        self.cannon = CannonPose { yaw, pitch };
        self.projectile = Some(mass);
        let result = self.shot(config, self.cannon, mass)?;
        self.shots_taken += 1;
        if result.hit.is_hit() {
            self.hits += 1;
        }
        Ok(result)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exercise3State {
    pub platform: Platform,
    pub field: GravityField,
    pub shots_remaining: usize,
    pub cannon: CannonPose,
    pub fired: Vec<Trajectory>,
}

impl Exercise3State {
    pub fn new(platform: Platform, config: &ExerciseConfig) -> Result<Self, ExerciseError> {
        Ok(Self {
            platform,
            field: build_sandwich(platform, &config.sandwich)?,
            shots_remaining: SHOTS_PER_CONDITION,
            cannon: CannonPose::default(),
            fired: Vec::new(),
        })
    }

    fn flight(
        &self,
        config: &ExerciseConfig,
        pose: CannonPose,
    ) -> Result<Trajectory, ExerciseError> {
        fly(
            &self.field,
            Vec3::new(config.sandwich.origin_x, 0.0, 0.0),
            config.muzzle_speed,
            pose,
            EX3_MASS,
            &config.sandwich_stop(),
        )
    }

    /// Only the part of the prediction before the sandwich is shown.
    pub fn predicted_beads(
        &mut self,
        config: &ExerciseConfig,
        yaw: f64,
        pitch: f64,
    ) -> Result<Vec<Vec3>, ExerciseError> {
        check_pitch(pitch, yaw)?;
        self.cannon = CannonPose { yaw, pitch };
        let traj = self.flight(config, self.cannon)?;
        Ok(sample_beads(
            &traj,
            config.bead_step,
            config.max_beads,
            Some(sandwich_entry_plane(&config.sandwich)),
        ))
    }

    pub fn fire(
        &mut self,
        config: &ExerciseConfig,
        yaw: f64,
        pitch: f64,
        mass: f64,
    ) -> Result<ShotResult, ExerciseError> {
        if self.shots_remaining == 0 {
            return Err(ExerciseError::Exhausted);
        }
        check_pitch(pitch, yaw)?;
        if mass != EX3_MASS {
            return Err(ExerciseError::Projectile(mass));
        }
        self.cannon = CannonPose { yaw, pitch };
        let traj = self.flight(config, self.cannon)?;
        let beads = sample_beads(&traj, config.bead_step, config.max_beads, None);
        self.shots_remaining -= 1;
        self.fired.push(traj.clone());
        Ok(ShotResult {
            trajectory: traj,
            beads,
            hit: HitOutcome::NotApplicable,
        })
    }
}
