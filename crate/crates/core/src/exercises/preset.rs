use std::fmt;

use serde::{Deserialize, Serialize};

use crate::physics::{GravityField, Vec3, G_EARTH, G_MOON};

/// The three gravity locations, in the order they are visited.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GravityPreset {
    Earth,
    Moon,
    Zero,
}

impl GravityPreset {
    pub const SUCCESSION: [GravityPreset; 3] = [
        GravityPreset::Earth,
        GravityPreset::Moon,
        GravityPreset::Zero,
    ];

    pub fn g(self) -> f64 {
        match self {
            GravityPreset::Earth => G_EARTH,
            GravityPreset::Moon => G_MOON,
            GravityPreset::Zero => 0.0,
        }
    }

    pub fn accel(self) -> Vec3 {
        Vec3::down(self.g())
    }

    pub fn field(self) -> GravityField {
        GravityField::uniform(self.accel())
    }

    pub fn next(self) -> Option<GravityPreset> {
        match self {
            GravityPreset::Earth => Some(GravityPreset::Moon),
            GravityPreset::Moon => Some(GravityPreset::Zero),
            GravityPreset::Zero => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            GravityPreset::Earth => "Earth",
            GravityPreset::Moon => "Moon",
            GravityPreset::Zero => "outer space",
        }
    }
}

impl fmt::Display for GravityPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GravityPreset::Earth => "earth",
            GravityPreset::Moon => "moon",
            GravityPreset::Zero => "zero",
        })
    }
}

impl std::str::FromStr for GravityPreset {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "earth" => Ok(GravityPreset::Earth),
            "moon" => Ok(GravityPreset::Moon),
            "zero" | "space" => Ok(GravityPreset::Zero),
            other => Err(format!(
                "unknown gravity preset `{other}` (earth, moon, zero)"
            )),
        }
    }
}
