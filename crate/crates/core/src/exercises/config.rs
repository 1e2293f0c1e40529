use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ExerciseError, FallObjectSpec, GravityPreset};
use crate::physics::{aim_solve, Box3, SphereTarget, StopCondition, Vec3};

pub const SLOT_COUNT: usize = 8;
pub const SHOTS_PER_CONDITION: usize = 8;
/// RNG stream reserved for slot-table generation.
const SLOT_STREAM: u64 = 1;

/// Geometry of the three sandwich boxes along `+x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SandwichGeometry {
    /// x of the first box's near face.
    pub origin_x: f64,
    pub box_widths: [f64; 3],
    pub box_height: f64,
    pub box_depth: f64,
}

impl Default for SandwichGeometry {
    fn default() -> Self {
        Self {
            origin_x: 0.0,
            box_widths: [10.0; 3],
            box_height: 20.0,
            box_depth: 20.0,
        }
    }
}

/// One of the eight target positions: downrange distance and height above
/// the muzzle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSlot {
    pub index: usize,
    pub horizontal_dist: f64,
    pub elevation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExerciseConfig {
    /// m
    pub drop_height: f64,
    /// m/s
    pub muzzle_speed: f64,
    /// m above the Exercise 2 floor.
    pub muzzle_height: f64,
    pub target_radius: f64,
    /// s between prediction beads.
    pub bead_step: f64,
    pub max_beads: usize,
    pub sandwich: SandwichGeometry,
    /// Fixed slot table; generated from the session seed when absent.
    pub slots: Option<Vec<TargetSlot>>,
    /// Object catalog; the built-in nine objects when absent.
    pub catalog: Option<Vec<FallObjectSpec>>,
}

impl Default for ExerciseConfig {
    fn default() -> Self {
        Self {
            drop_height: 1.2,
            muzzle_speed: 12.0,
            muzzle_height: 1.0,
            target_radius: 0.25,
            bead_step: 0.05,
            max_beads: 400,
            sandwich: SandwichGeometry::default(),
            slots: None,
            catalog: None,
        }
    }
}

#[derive(Deserialize)]
struct ExerciseFile {
    schema: u32,
    #[serde(flatten)]
    exercise: ExerciseConfig,
}

impl ExerciseConfig {
    /// Parses a standalone exercise file (`schema = 1` plus the fields of
    /// this struct).
    pub fn from_toml(text: &str) -> Result<Self, ExerciseError> {
        let file: ExerciseFile =
            toml::from_str(text).map_err(|e| ExerciseError::Config(e.to_string()))?;
        if file.schema != 1 {
            return Err(ExerciseError::Config(format!(
                "unsupported exercise schema {} (expected 1)",
                file.schema
            )));
        }
        file.exercise.validate()?;
        Ok(file.exercise)
    }

    pub fn validate(&self) -> Result<(), ExerciseError> {
        let positive = [
            ("drop_height", self.drop_height),
            ("muzzle_speed", self.muzzle_speed),
            ("target_radius", self.target_radius),
            ("bead_step", self.bead_step),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(ExerciseError::Config(format!(
                    "{name} must be > 0, got {v}"
                )));
            }
        }
        if !(self.muzzle_height >= 0.0) {
            return Err(ExerciseError::Config("muzzle_height must be >= 0".into()));
        }
        if let Some(c) = &self.catalog {
            super::validate_catalog(c)?;
        }
        if let Some(s) = &self.slots {
            SlotTable::new(s.clone(), self.muzzle_speed)?;
        }
        super::build_sandwich(super::Platform::GNgG, &self.sandwich)?;
        Ok(())
    }

    pub fn catalog(&self) -> Vec<FallObjectSpec> {
        self.catalog.clone().unwrap_or_else(super::default_catalog)
    }

    /// The configured slot table, or the one generated from `seed`.
    pub fn slot_table(&self, seed: u64) -> Result<SlotTable, ExerciseError> {
        match &self.slots {
            Some(s) => SlotTable::new(s.clone(), self.muzzle_speed),
            None => SlotTable::generate(seed, self.muzzle_speed),
        }
    }

    pub fn muzzle(&self) -> Vec3 {
        Vec3::new(0.0, self.muzzle_height, 0.0)
    }

    /// Exercise 2 range: flat floor at y = 0.
    pub fn cannon_stop(&self) -> StopCondition {
        StopCondition {
            ground_y: 0.0,
            bounds: Box3 {
                min: Vec3::new(-20.0, -10.0, -30.0),
                max: Vec3::new(60.0, 60.0, 30.0),
            },
            t_max: 10.0,
        }
    }

    /// Exercise 3 platform: muzzle at the sandwich mid-height (origin), floor
    /// at the boxes' lower face.
    pub fn sandwich_stop(&self) -> StopCondition {
        let g = &self.sandwich;
        let far = g.origin_x + g.box_widths.iter().sum::<f64>() + 10.0;
        StopCondition {
            ground_y: -g.box_height / 2.0,
            bounds: Box3 {
                min: Vec3::new(g.origin_x - 10.0, -g.box_height / 2.0 - 1.0, -g.box_depth),
                max: Vec3::new(far, 2.0 * g.box_height, g.box_depth),
            },
            t_max: 10.0,
        }
    }

    pub fn target_for(&self, slot: &TargetSlot) -> SphereTarget {
        SphereTarget {
            center: self.muzzle() + Vec3::new(slot.horizontal_dist, slot.elevation, 0.0),
            radius: self.target_radius,
        }
    }
}

/// Eight validated target slots, each reachable at the configured muzzle
/// speed under every gravity preset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotTable {
    slots: Vec<TargetSlot>,
}

impl SlotTable {
    pub fn new(mut slots: Vec<TargetSlot>, speed: f64) -> Result<Self, ExerciseError> {
        if slots.len() != SLOT_COUNT {
            return Err(ExerciseError::Config(format!(
                "slot table needs {SLOT_COUNT} slots, found {}",
                slots.len()
            )));
        }
        slots.sort_by_key(|s| s.index);
        for (i, s) in slots.iter().enumerate() {
            if s.index != i {
                return Err(ExerciseError::Config(format!(
                    "slot indices must be 0..{SLOT_COUNT} without gaps"
                )));
            }
            for preset in GravityPreset::SUCCESSION {
                if !slot_feasible(s, speed, preset) {
                    return Err(ExerciseError::Config(format!(
                        "slot {i} (d = {} m, h = {} m) unreachable at {speed} m/s on {}",
                        s.horizontal_dist,
                        s.elevation,
                        preset.label()
                    )));
                }
            }
        }
        Ok(Self { slots })
    }

    /// Stratified table: slot `i` lies in the `i`-th eighth of 4–14 m
    /// downrange with an elevation in 0–2 m, redrawn until reachable.
    pub fn generate(seed: u64, speed: f64) -> Result<Self, ExerciseError> {
        const NEAR: f64 = 4.0;
        const FAR: f64 = 14.0;
        const MAX_DRAWS: usize = 1000;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(SLOT_STREAM);
        let width = (FAR - NEAR) / SLOT_COUNT as f64;
        let mut slots = Vec::with_capacity(SLOT_COUNT);
        for index in 0..SLOT_COUNT {
            let lo = NEAR + width * index as f64;
            let slot = (0..MAX_DRAWS)
                .map(|_| TargetSlot {
                    index,
                    horizontal_dist: rng.random_range(lo..lo + width),
                    elevation: rng.random_range(0.0..2.0),
                })
                .find(|s| {
                    GravityPreset::SUCCESSION
                        .iter()
                        .all(|&p| slot_feasible(s, speed, p))
                })
                .ok_or_else(|| {
                    ExerciseError::Config(format!(
                        "no reachable position for slot {index} at {speed} m/s"
                    ))
                })?;
            slots.push(slot);
        }
        Self::new(slots, speed)
    }

    pub fn slots(&self) -> &[TargetSlot] {
        &self.slots
    }

    pub fn get(&self, index: usize) -> Option<&TargetSlot> {
        self.slots.get(index)
    }
}

fn slot_feasible(slot: &TargetSlot, speed: f64, preset: GravityPreset) -> bool {
    slot.horizontal_dist > 0.0
        && slot.elevation.is_finite()
        && aim_solve(speed, preset.g(), slot.horizontal_dist, slot.elevation)
            .map(|s| {
                s.preferred()
                    .is_some_and(|a| (0.0..=std::f64::consts::FRAC_PI_2).contains(&a))
            })
            .unwrap_or(false)
}
