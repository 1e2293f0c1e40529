use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::ExerciseError;

/// A droppable object, modelled as a uniform sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FallObjectSpec {
    pub id: String,
    pub label: String,
    /// kg
    pub mass: f64,
    /// m
    pub radius: f64,
    /// kg/m³
    pub density: f64,
}

impl FallObjectSpec {
    fn sphere_mass(&self) -> f64 {
        self.density * 4.0 / 3.0 * PI * self.radius.powi(3)
    }
}

pub const CATALOG_SIZE: usize = 9;

/// Nine objects spanning three orders of magnitude in density.
// Masses are 4/3·π·r³·ρ; the oak ball happens to land near π/8.
#[allow(clippy::approx_constant)]
pub fn default_catalog() -> Vec<FallObjectSpec> {
    let rows: [(&str, &str, f64, f64, f64); CATALOG_SIZE] = [
        ("obj_1", "Cork ball", 0.2171, 0.06, 240.0),
        ("obj_2", "Polystyrene ball", 0.2094, 0.10, 50.0),
        ("obj_3", "Oak ball", 0.3927, 0.05, 750.0),
        ("obj_4", "Rubber ball", 0.2949, 0.04, 1100.0),
        ("obj_5", "Glass marble", 0.0353, 0.015, 2500.0),
        ("obj_6", "Aluminium sphere", 0.3054, 0.03, 2700.0),
        ("obj_7", "Granite ball", 1.0497, 0.045, 2750.0),
        ("obj_8", "Steel ball", 0.5138, 0.025, 7850.0),
        ("obj_9", "Lead ball", 2.0366, 0.035, 11340.0),
    ];
    rows.iter()
        .map(|&(id, label, mass, radius, density)| FallObjectSpec {
            id: id.into(),
            label: label.into(),
            mass,
            radius,
            density,
        })
        .collect()
}

/// Checks size, id uniqueness, positivity, sphere self-consistency (1 %) and
/// that no two objects share a (mass, radius, density) profile.
pub fn validate_catalog(catalog: &[FallObjectSpec]) -> Result<(), ExerciseError> {
    let bad = |msg: String| Err(ExerciseError::Config(msg));
    if catalog.len() != CATALOG_SIZE {
        return bad(format!(
            "catalog must hold {CATALOG_SIZE} objects, found {}",
            catalog.len()
        ));
    }
    for (i, o) in catalog.iter().enumerate() {
        if !(o.mass > 0.0 && o.radius > 0.0 && o.density > 0.0) {
            return bad(format!(
                "object {} has non-positive mass, radius or density",
                o.id
            ));
        }
        let rel = (o.mass - o.sphere_mass()).abs() / o.mass;
        if rel >= 0.01 {
            return bad(format!(
                "object {}: mass {} disagrees with density x volume by {:.2}%",
                o.id,
                o.mass,
                rel * 100.0
            ));
        }
        for other in &catalog[i + 1..] {
            if other.id == o.id {
                return bad(format!("duplicate object id {}", o.id));
            }
            if other.mass == o.mass && other.radius == o.radius && other.density == o.density {
                return bad(format!("objects {} and {} share a profile", o.id, other.id));
            }
        }
    }
    Ok(())
}
