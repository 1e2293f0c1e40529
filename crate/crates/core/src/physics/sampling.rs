use serde::{Deserialize, Serialize};

use super::{PhysicsError, Trajectory, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereTarget {
    pub center: Vec3,
    pub radius: f64,
}

impl SphereTarget {
    pub fn new(center: Vec3, radius: f64) -> Result<Self, PhysicsError> {
        if !(radius > 0.0) || !center.is_finite() {
            return Err(PhysicsError::Domain(format!(
                "target radius {radius} must be > 0"
            )));
        }
        Ok(Self { center, radius })
    }

    fn signed_distance(&self, p: Vec3) -> f64 {
        p.distance(self.center) - self.radius
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hit {
    pub t: f64,
    pub point: Vec3,
}

/// Analytic positions at `t0 + k·dt_bead`, `k = 1..=max_beads`, up to the end
/// of the trajectory. With `clip_before = Some(xc)` beads at `x >= xc` are
/// dropped.
pub fn sample_beads(
    traj: &Trajectory,
    dt_bead: f64,
    max_beads: usize,
    clip_before: Option<f64>,
) -> Vec<Vec3> {
    assert!(dt_bead > 0.0, "bead step must be positive");
    let t0 = traj.start_time();
    let t_end = traj.end_time();
    (1..=max_beads)
        .map(|k| t0 + k as f64 * dt_bead)
        .take_while(|&t| t <= t_end)
        .filter_map(|t| traj.state_at(t).map(|s| s.pos))
        .filter(|p| clip_before.is_none_or(|xc| p.x < xc))
        .collect()
}

const SCAN_STEP: f64 = 1e-3;
const REFINE_TOL: f64 = 1e-6;

/// First instant the trajectory enters `target`.
///
/// Each segment is scanned at 1 ms; the first inside sample is refined by
/// bisection to 1 µs.
pub fn hit_test(traj: &Trajectory, target: &SphereTarget) -> Option<Hit> {
    let mut prev: Option<f64> = None;
    for seg in &traj.segments {
        let n = (seg.duration / SCAN_STEP).ceil().max(1.0) as usize;
        for k in 0..=n {
            let tau = (k as f64 * SCAN_STEP).min(seg.duration);
            let d = target.signed_distance(seg.at(tau).pos);
            if d <= 0.0 {
                let t_in = seg.start.t + tau;
                let t = match prev {
                    None => t_in,
                    Some(t_out) => refine(traj, target, t_out, t_in),
                };
                let point = traj.state_at(t).map(|s| s.pos)?;
                return Some(Hit { t, point });
            }
            prev = Some(seg.start.t + tau);
        }
    }
    None
}

fn refine(traj: &Trajectory, target: &SphereTarget, mut outside: f64, mut inside: f64) -> f64 {
    let dist = |t: f64| {
        traj.state_at(t)
            .map_or(f64::INFINITY, |s| target.signed_distance(s.pos))
    };
    while inside - outside > REFINE_TOL {
        let mid = 0.5 * (outside + inside);
        if dist(mid) <= 0.0 {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    inside
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::{
        propagate_piecewise, GravityField, ProjectileState, StopCondition, G_EARTH,
    };

    fn fly(g: f64, vel: Vec3) -> Trajectory {
        let s0 = ProjectileState::new(Vec3::ZERO, vel, 1.0).unwrap();
        propagate_piecewise(
            &GravityField::uniform(Vec3::down(g)),
            &s0,
            &StopCondition::default(),
        )
        .unwrap()
    }

    #[test]
    fn beads_follow_the_closed_form() {
        let traj = fly(G_EARTH, Vec3::new(10.0, 10.0, 0.0));
        let beads = sample_beads(&traj, 0.05, 400, None);
        assert_eq!(beads.len(), 40);
        for (k, b) in beads.iter().enumerate() {
            let t = (k + 1) as f64 * 0.05;
            let y = 10.0 * t - 0.5 * G_EARTH * t * t;
            assert!((b.y - y).abs() < 1e-9);
        }
    }

    #[test]
    fn beads_respect_cap_and_clip() {
        let traj = fly(0.0, Vec3::new(10.0, 0.0, 0.0));
        assert_eq!(sample_beads(&traj, 0.05, 7, None).len(), 7);
        let clipped = sample_beads(&traj, 0.05, 400, Some(10.0));
        assert!(!clipped.is_empty());
        assert!(clipped.iter().all(|b| b.x < 10.0 && b.x > 0.0));
    }

    #[test]
    fn hit_on_path_point() {
        let traj = fly(G_EARTH, Vec3::new(10.0, 10.0, 0.0));
        let on_path = traj.state_at(1.0).unwrap().pos;
        let hit = hit_test(&traj, &SphereTarget::new(on_path, 0.25).unwrap()).unwrap();
        assert!((hit.t - 1.0).abs() < 0.05);
        assert!(hit.point.distance(on_path) <= 0.25 + 1e-6);

        let landing = SphereTarget::new(Vec3::new(20.394, 0.0, 0.0), 0.25).unwrap();
        let hit = hit_test(&traj, &landing).unwrap();
        assert!((hit.t - 2.0394).abs() < 0.05);
        // Landing point itself is one radius along the path from entry.
        assert!((hit.point.distance(landing.center) - 0.25).abs() < 1e-3);
    }

    #[test]
    fn miss_when_clearance_exceeds_radius() {
        let traj = fly(0.0, Vec3::new(5.0, 0.0, 0.0));
        let target = SphereTarget::new(Vec3::new(10.0, 0.0, 1.0), 0.25).unwrap();
        assert_eq!(hit_test(&traj, &target), None);
    }

    #[test]
    fn refinement_reaches_microsecond() {
        let traj = fly(0.0, Vec3::new(10.0, 0.0, 0.0));
        let target = SphereTarget::new(Vec3::new(5.0, 0.0, 0.0), 0.25).unwrap();
        let hit = hit_test(&traj, &target).unwrap();
        // Entry at x = 4.75, i.e. t = 0.475 s.
        assert!((hit.t - 0.475).abs() <= 1e-6);
    }
}
