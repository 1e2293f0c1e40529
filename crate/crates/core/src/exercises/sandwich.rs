use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ExerciseError, SandwichGeometry};
use crate::physics::{Box3, GravityField, Region, Vec3, G_EARTH};

/// The two Exercise 3 platforms, named by the gravity of their boxes in
/// firing order (G: Earth gravity, NG: none).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Platform {
    #[serde(rename = "G_NG_G")]
    GNgG,
    #[serde(rename = "NG_G_NG")]
    NgGNg,
}

impl Platform {
    pub const SUCCESSION: [Platform; 2] = [Platform::GNgG, Platform::NgGNg];

    /// Whether each box has Earth gravity.
    pub fn pattern(self) -> [bool; 3] {
        match self {
            Platform::GNgG => [true, false, true],
            Platform::NgGNg => [false, true, false],
        }
    }

    pub fn next(self) -> Option<Platform> {
        match self {
            Platform::GNgG => Some(Platform::NgGNg),
            Platform::NgGNg => None,
        }
    }
}

impl fmt::Display for Platform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Platform::GNgG => "G_NG_G",
            Platform::NgGNg => "NG_G_NG",
        })
    }
}

impl std::str::FromStr for Platform {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "G_NG_G" => Ok(Platform::GNgG),
            "NG_G_NG" => Ok(Platform::NgGNg),
            other => Err(format!("unknown platform `{other}` (G_NG_G, NG_G_NG)")),
        }
    }
}

fn accel(gravity: bool) -> Vec3 {
    if gravity {
        Vec3::down(G_EARTH)
    } else {
        Vec3::ZERO
    }
}

/// Three adjacent half-open boxes along `+x`. Space outside the sandwich
/// shares the first box's environment, which is where the cannon stands.
pub fn build_sandwich(
    platform: Platform,
    geometry: &SandwichGeometry,
) -> Result<GravityField, ExerciseError> {
    let g = geometry;
    if g.box_widths.iter().any(|w| !(*w > 0.0)) || !(g.box_height > 0.0) || !(g.box_depth > 0.0) {
        return Err(ExerciseError::Config(format!(
            "sandwich boxes must have positive size, got widths {:?} height {} depth {}",
            g.box_widths, g.box_height, g.box_depth
        )));
    }
    let pattern = platform.pattern();
    let mut x = g.origin_x;
    let mut regions = Vec::with_capacity(3);
    for (width, gravity) in g.box_widths.iter().zip(pattern) {
        let bounds = Box3::new(
            Vec3::new(x, -g.box_height / 2.0, -g.box_depth / 2.0),
            Vec3::new(x + width, g.box_height / 2.0, g.box_depth / 2.0),
        )
        .map_err(|e| ExerciseError::Config(e.to_string()))?;
        regions.push(Region {
            bounds,
            accel: accel(gravity),
        });
        x += width;
    }
    GravityField::new(accel(pattern[0]), regions).map_err(|e| ExerciseError::Config(e.to_string()))
}

/// The face where gravity first changes along the firing axis; predictions
/// are cut here.
pub fn sandwich_entry_plane(geometry: &SandwichGeometry) -> f64 {
    geometry.origin_x + geometry.box_widths[0]
}
