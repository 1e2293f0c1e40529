use serde::{Deserialize, Serialize};

use super::{PhysicsError, Vec3};

/// Axis-aligned box, half-open on every axis: `[min, max)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Box3 {
    pub min: Vec3,
    pub max: Vec3,
}

impl Box3 {
    pub fn new(min: Vec3, max: Vec3) -> Result<Self, PhysicsError> {
        let ok =
            min.is_finite() && max.is_finite() && min.x < max.x && min.y < max.y && min.z < max.z;
        if !ok {
            return Err(PhysicsError::DegenerateBox { min, max });
        }
        Ok(Self { min, max })
    }

    pub fn contains(&self, p: Vec3) -> bool {
        (0..3).all(|a| {
            let v = p.axis(a);
            self.min.axis(a) <= v && v < self.max.axis(a)
        })
    }

    pub fn center(&self) -> Vec3 {
        (self.min + self.max) * 0.5
    }

    /// True when the two boxes share interior volume.
    pub fn overlaps(&self, other: &Box3) -> bool {
        (0..3).all(|a| self.min.axis(a) < other.max.axis(a) && other.min.axis(a) < self.max.axis(a))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub bounds: Box3,
    pub accel: Vec3,
}

/// Which part of a field governs a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionId {
    Default,
    Box(usize),
}

/// Uniform or piecewise-constant acceleration field.
///
/// Regions are pairwise disjoint; a point outside every region takes the
/// default acceleration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GravityField {
    default_accel: Vec3,
    regions: Vec<Region>,
}

impl GravityField {
    pub fn uniform(accel: Vec3) -> Self {
        Self {
            default_accel: accel,
            regions: Vec::new(),
        }
    }

    pub fn new(default_accel: Vec3, regions: Vec<Region>) -> Result<Self, PhysicsError> {
        if !default_accel.is_finite() || regions.iter().any(|r| !r.accel.is_finite()) {
            return Err(PhysicsError::NonFinite("field acceleration"));
        }
        for r in &regions {
            Box3::new(r.bounds.min, r.bounds.max)?;
        }
        for (i, a) in regions.iter().enumerate() {
            for (j, b) in regions.iter().enumerate().skip(i + 1) {
                if a.bounds.overlaps(&b.bounds) {
                    return Err(PhysicsError::OverlappingRegions(i, j));
                }
            }
        }
        Ok(Self {
            default_accel,
            regions,
        })
    }

    pub fn default_accel(&self) -> Vec3 {
        self.default_accel
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn region_at(&self, p: Vec3) -> RegionId {
        self.regions
            .iter()
            .position(|r| r.bounds.contains(p))
            .map_or(RegionId::Default, RegionId::Box)
    }

    pub fn accel_of(&self, id: RegionId) -> Vec3 {
        match id {
            RegionId::Default => self.default_accel,
            RegionId::Box(i) => self.regions[i].accel,
        }
    }

    pub fn accel_at(&self, p: Vec3) -> Vec3 {
        self.accel_of(self.region_at(p))
    }

    /// The region a body at `pos` moving with `vel` occupies immediately
    /// after this instant. Differs from [`region_at`](Self::region_at) only
    /// when `pos` lies on a face it is about to leave.
    pub fn region_ahead(&self, pos: Vec3, vel: Vec3) -> RegionId {
        const PROBE: f64 = 1e-7;
        let here = self.region_at(pos);
        let probe = |id: RegionId| {
            let a = self.accel_of(id);
            self.region_at(pos + vel * PROBE + a * (0.5 * PROBE * PROBE))
        };
        let next = probe(here);
        if next == here || probe(next) != next {
            here
        } else {
            next
        }
    }
}
