use serde::{Deserialize, Serialize};

use super::kinematics::advance;
use super::roots::{box_transition, floor_exit, Crossing, Path, EPS_T};
use super::{Box3, GravityField, PhysicsError, ProjectileState, RegionId, Vec3};

/// Hard cap on segments per trajectory.
pub const MAX_SEGMENTS: usize = 10_000;

/// One constant-acceleration piece of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: ProjectileState,
    pub accel: Vec3,
    pub duration: f64,
}

impl Segment {
    pub fn end_time(&self) -> f64 {
        self.start.t + self.duration
    }

    /// Analytic state `tau` seconds into the segment.
    pub fn at(&self, tau: f64) -> ProjectileState {
        advance(&self.start, self.accel, tau)
    }

    pub fn end(&self) -> ProjectileState {
        self.at(self.duration)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "t")]
pub enum Terminal {
    Ground,
    OutOfBounds,
    MaxTime,
    TargetHit(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopCondition {
    pub ground_y: f64,
    pub bounds: Box3,
    /// Flight-time horizon measured from the launch state.
    pub t_max: f64,
}

impl Default for StopCondition {
    fn default() -> Self {
        Self {
            ground_y: 0.0,
            bounds: Box3 {
                min: Vec3::new(-1000.0, -1000.0, -1000.0),
                max: Vec3::new(1000.0, 1000.0, 1000.0),
            },
            t_max: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub segments: Vec<Segment>,
    pub terminal: Terminal,
}

impl Trajectory {
    pub fn start(&self) -> ProjectileState {
        self.segments[0].start
    }

    pub fn start_time(&self) -> f64 {
        self.segments[0].start.t
    }

    pub fn end_time(&self) -> f64 {
        self.segments.last().map_or(0.0, Segment::end_time)
    }

    pub fn end_state(&self) -> ProjectileState {
        self.segments.last().expect("non-empty trajectory").end()
    }

    /// Index of the segment covering absolute time `t`. At a joint the later
    /// segment wins.
    pub fn segment_index_at(&self, t: f64) -> Option<usize> {
        if t < self.start_time() || t > self.end_time() {
            return None;
        }
        let idx = self.segments.partition_point(|s| s.start.t <= t);
        Some(idx.saturating_sub(1))
    }

    pub fn state_at(&self, t: f64) -> Option<ProjectileState> {
        let i = self.segment_index_at(t)?;
        let seg = &self.segments[i];
        Some(seg.at(t - seg.start.t))
    }

    /// Same trajectory cut at a target hit.
    pub fn truncated_at_hit(&self, t_hit: f64) -> Trajectory {
        let Some(last) = self.segment_index_at(t_hit) else {
            return self.clone();
        };
        let mut segments = self.segments[..=last].to_vec();
        let seg = segments.last_mut().unwrap();
        seg.duration = t_hit - seg.start.t;
        Trajectory {
            segments,
            terminal: Terminal::TargetHit(t_hit),
        }
    }

    /// Value-for-value kinematic equality; masses are ignored.
    pub fn same_motion(&self, other: &Trajectory) -> bool {
        self.terminal == other.terminal
            && self.segments.len() == other.segments.len()
            && self.segments.iter().zip(&other.segments).all(|(a, b)| {
                a.start.same_motion(&b.start)
                    && a.start.t.to_bits() == b.start.t.to_bits()
                    && a.accel.bits_eq(b.accel)
                    && a.duration.to_bits() == b.duration.to_bits()
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum SegmentEnd {
    RegionChange,
    Ground,
    OutOfBounds,
    MaxTime,
}

/// Chains analytic segments through `field` until a stop condition fires.
pub fn propagate_piecewise(
    field: &GravityField,
    s0: &ProjectileState,
    stop: &StopCondition,
) -> Result<Trajectory, PhysicsError> {
    s0.validate()?;
    if !stop.bounds.contains(s0.pos) {
        return Err(PhysicsError::Precondition(format!(
            "launch point {:?} is outside the scene bounds",
            s0.pos
        )));
    }
    if s0.pos.y < stop.ground_y {
        return Err(PhysicsError::Precondition(format!(
            "launch height {} is below ground {}",
            s0.pos.y, stop.ground_y
        )));
    }
    if !(stop.t_max > 0.0) {
        return Err(PhysicsError::Domain(format!(
            "t_max {} must be > 0",
            stop.t_max
        )));
    }

    let t_end = s0.t + stop.t_max;
    let mut state = *s0;
    let mut segments: Vec<Segment> = Vec::new();
    loop {
        if segments.len() >= MAX_SEGMENTS {
            return Err(PhysicsError::Divergence(MAX_SEGMENTS));
        }
        let remaining = t_end - state.t;
        let region = field.region_ahead(state.pos, state.vel);
        let accel = field.accel_of(region);
        let path = Path {
            pos: state.pos,
            vel: state.vel,
            accel,
        };

        let mut tau = remaining;
        let mut reason = SegmentEnd::MaxTime;
        let mut consider = |t: Option<f64>, why: SegmentEnd| {
            if let Some(t) = t {
                // Stop conditions win ties against region changes.
                let better = t < tau
                    || (why != SegmentEnd::RegionChange
                        && reason == SegmentEnd::RegionChange
                        && t <= tau + EPS_T);
                if better {
                    tau = t.min(remaining);
                    reason = why;
                }
            }
        };

        if let RegionId::Box(i) = region {
            consider(
                box_transition(&path, &field.regions()[i].bounds, remaining, Crossing::Exit),
                SegmentEnd::RegionChange,
            );
        }
        for (j, r) in field.regions().iter().enumerate() {
            if region != RegionId::Box(j) {
                consider(
                    box_transition(&path, &r.bounds, remaining, Crossing::Entry),
                    SegmentEnd::RegionChange,
                );
            }
        }
        consider(
            floor_exit(&path, stop.ground_y, remaining),
            SegmentEnd::Ground,
        );
        consider(
            box_transition(&path, &stop.bounds, remaining, Crossing::Exit),
            SegmentEnd::OutOfBounds,
        );

        let seg = Segment {
            start: state,
            accel,
            duration: tau,
        };
        segments.push(seg);
        let terminal = match reason {
            SegmentEnd::RegionChange => {
                state = seg.end();
                continue;
            }
            SegmentEnd::Ground => Terminal::Ground,
            SegmentEnd::OutOfBounds => Terminal::OutOfBounds,
            SegmentEnd::MaxTime => Terminal::MaxTime,
        };
        return Ok(Trajectory { segments, terminal });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::{Region, G_EARTH};

    fn slab(x0: f64, x1: f64, g: f64) -> Region {
        Region {
            bounds: Box3::new(Vec3::new(x0, -10.0, -10.0), Vec3::new(x1, 10.0, 10.0)).unwrap(),
            accel: Vec3::down(g),
        }
    }

    fn sandwich_ng_g_ng() -> GravityField {
        GravityField::new(
            Vec3::ZERO,
            vec![
                slab(0.0, 10.0, 0.0),
                slab(10.0, 20.0, G_EARTH),
                slab(20.0, 30.0, 0.0),
            ],
        )
        .unwrap()
    }

    fn launch(vel: Vec3) -> ProjectileState {
        ProjectileState::new(Vec3::ZERO, vel, 1.0).unwrap()
    }

    fn deep_stop() -> StopCondition {
        StopCondition {
            ground_y: -100.0,
            ..StopCondition::default()
        }
    }

    #[test]
    fn sandwich_worked_example() {
        let traj = propagate_piecewise(
            &sandwich_ng_g_ng(),
            &launch(Vec3::new(10.0, 0.0, 0.0)),
            &deep_stop(),
        )
        .unwrap();
        assert!(traj.segments.len() >= 3);
        let joint = traj.segments[2].start;
        assert!((joint.t - 2.0).abs() < 1e-12);
        assert!((joint.pos.x - 20.0).abs() < 1e-12);
        assert!((joint.pos.y + 4.9035).abs() < 1e-9);
        assert!((joint.vel.y + G_EARTH).abs() < 1e-9);
        assert_eq!(traj.segments[2].accel, Vec3::ZERO);
        let slope = joint.vel.y / joint.vel.x;
        assert!((slope + 0.9807).abs() < 1e-12);
    }

    #[test]
    fn zero_g_is_one_straight_segment() {
        let traj = propagate_piecewise(
            &GravityField::uniform(Vec3::ZERO),
            &launch(Vec3::new(3.0, 1.0, 0.0)),
            &StopCondition::default(),
        )
        .unwrap();
        assert_eq!(traj.segments.len(), 1);
        assert_eq!(traj.terminal, Terminal::MaxTime);
        assert_eq!(traj.end_time(), 10.0);
    }

    #[test]
    fn earth_range_from_ground() {
        let traj = propagate_piecewise(
            &GravityField::uniform(Vec3::down(G_EARTH)),
            &launch(Vec3::new(10.0, 10.0, 0.0)),
            &StopCondition::default(),
        )
        .unwrap();
        assert_eq!(traj.terminal, Terminal::Ground);
        let end = traj.end_state();
        assert!((end.t - 2.0394).abs() < 1e-3);
        assert!((end.pos.x - 20.394).abs() < 1e-3);
        assert!(end.pos.y.abs() < 1e-9);
    }

    #[test]
    fn bounds_terminate_flight() {
        let stop = StopCondition {
            bounds: Box3::new(Vec3::new(-1.0, -1.0, -1.0), Vec3::new(5.0, 5.0, 1.0)).unwrap(),
            ..deep_stop()
        };
        let traj = propagate_piecewise(
            &GravityField::uniform(Vec3::ZERO),
            &launch(Vec3::new(1.0, 0.0, 0.0)),
            &stop,
        )
        .unwrap();
        assert_eq!(traj.terminal, Terminal::OutOfBounds);
        assert!((traj.end_time() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_launches() {
        let field = GravityField::uniform(Vec3::ZERO);
        let below = ProjectileState::new(Vec3::new(0.0, -1.0, 0.0), Vec3::ZERO, 1.0).unwrap();
        assert!(propagate_piecewise(&field, &below, &StopCondition::default()).is_err());
        let outside = ProjectileState::new(Vec3::new(5000.0, 1.0, 0.0), Vec3::ZERO, 1.0).unwrap();
        assert!(propagate_piecewise(&field, &outside, &StopCondition::default()).is_err());
    }

    #[test]
    fn joints_are_continuous() {
        let traj = propagate_piecewise(
            &sandwich_ng_g_ng(),
            &launch(Vec3::new(9.0, 6.0, 1.0)),
            &deep_stop(),
        )
        .unwrap();
        for pair in traj.segments.windows(2) {
            let end = pair[0].end();
            let next = pair[1].start;
            assert!(end.pos.distance(next.pos) < 1e-9);
            assert!(end.vel.distance(next.vel) < 1e-9);
            assert!(next.t > pair[0].start.t);
        }
    }

    #[test]
    fn truncation_at_hit() {
        let traj = propagate_piecewise(
            &sandwich_ng_g_ng(),
            &launch(Vec3::new(10.0, 0.0, 0.0)),
            &deep_stop(),
        )
        .unwrap();
        let cut = traj.truncated_at_hit(1.5);
        assert_eq!(cut.terminal, Terminal::TargetHit(1.5));
        assert_eq!(cut.segments.len(), 2);
        assert!((cut.end_time() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn oscillation_on_a_boundary_hits_the_segment_cap() {
        // Upward pull below y = 0, downward above: the body oscillates across
        // the shared face forever.
        let up = Region {
            bounds: Box3::new(Vec3::new(-50.0, -50.0, -50.0), Vec3::new(50.0, 0.0, 50.0)).unwrap(),
            accel: Vec3::new(0.0, 9.807, 0.0),
        };
        let down = Region {
            bounds: Box3::new(Vec3::new(-50.0, 0.0, -50.0), Vec3::new(50.0, 50.0, 50.0)).unwrap(),
            accel: Vec3::down(9.807),
        };
        let field = GravityField::new(Vec3::ZERO, vec![up, down]).unwrap();
        let s0 = ProjectileState::new(Vec3::new(0.0, 1.0, 0.0), Vec3::ZERO, 1.0).unwrap();
        let stop = StopCondition {
            ground_y: -60.0,
            t_max: 1e6,
            ..StopCondition::default()
        };
        assert!(matches!(
            propagate_piecewise(&field, &s0, &stop),
            Err(PhysicsError::Divergence(MAX_SEGMENTS))
        ));
    }
}
