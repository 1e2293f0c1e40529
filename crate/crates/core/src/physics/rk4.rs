//! Fixed-step fourth-order Runge-Kutta integration of the same dynamics.
//!
//! Used only to cross-check [`propagate_piecewise`](super::propagate_piecewise).
//! It shares no timing logic with the analytic path: region changes and
//! terminal crossings are found by comparing lookups at step ends, then
//! located by repeated linear interpolation of the crossed coordinate.

use super::{Box3, GravityField, ProjectileState, RegionId, StopCondition, Terminal, Vec3};

/// Sampled oracle trajectory: one state per accepted step.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePath {
    pub samples: Vec<ProjectileState>,
    pub terminal: Terminal,
}

impl ReferencePath {
    pub fn end_state(&self) -> ProjectileState {
        *self.samples.last().expect("at least the launch state")
    }
}

/// Clearance kept from a face before crossing it, and half the length of
/// the hop across.
const OVERSHOOT: f64 = 1e-10;
const LOCATE_ITERATIONS: usize = 8;

fn rk4_step(field: &GravityField, s: &ProjectileState, h: f64) -> ProjectileState {
    let a = |p: Vec3| field.accel_at(p);
    let (p, v) = (s.pos, s.vel);
    let k1v = a(p);
    let k1p = v;
    let k2v = a(p + k1p * (0.5 * h));
    let k2p = v + k1v * (0.5 * h);
    let k3v = a(p + k2p * (0.5 * h));
    let k3p = v + k2v * (0.5 * h);
    let k4v = a(p + k3p * h);
    let k4p = v + k3v * h;
    ProjectileState {
        pos: p + (k1p + k2p * 2.0 + k3p * 2.0 + k4p) * (h / 6.0),
        vel: v + (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (h / 6.0),
        t: s.t + h,
        mass: s.mass,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Status {
    Flying(RegionId),
    Ground,
    OutOfBounds,
}

fn status(field: &GravityField, stop: &StopCondition, p: Vec3) -> Status {
    if p.y < stop.ground_y {
        Status::Ground
    } else if !stop.bounds.contains(p) {
        Status::OutOfBounds
    } else {
        Status::Flying(field.region_at(p))
    }
}

/// Smallest fraction of the straight chord `a → b` at which any face plane
/// of the field, the bounds or the ground is crossed.
fn first_face_fraction(
    field: &GravityField,
    stop: &StopCondition,
    a: Vec3,
    b: Vec3,
) -> Option<f64> {
    let mut best: Option<f64> = None;
    let mut check = |axis: usize, level: f64| {
        let (u, w) = (a.axis(axis), b.axis(axis));
        let crosses = (u < level) != (w < level);
        if crosses && w != u {
            let f = (level - u) / (w - u);
            if (0.0..=1.0).contains(&f) && best.is_none_or(|b| f < b) {
                best = Some(f);
            }
        }
    };
    let boxes = field
        .regions()
        .iter()
        .map(|r| r.bounds)
        .chain(std::iter::once(stop.bounds))
        .collect::<Vec<Box3>>();
    for bx in &boxes {
        for axis in 0..3 {
            check(axis, bx.min.axis(axis));
            check(axis, bx.max.axis(axis));
        }
    }
    check(1, stop.ground_y);
    best
}

/// Integrates from `s0` with fixed `step` until the stop condition fires.
pub fn rk4_reference(
    field: &GravityField,
    s0: &ProjectileState,
    step: f64,
    stop: &StopCondition,
) -> ReferencePath {
    assert!(step > 0.0, "rk4 step must be positive");
    let t_end = s0.t + stop.t_max;
    let mut state = *s0;
    let mut samples = vec![state];
    let terminal = loop {
        let remaining = t_end - state.t;
        if remaining <= 1e-15 {
            break Terminal::MaxTime;
        }
        let here = status(field, stop, state.pos);
        let mut h = step.min(remaining);
        let mut next = rk4_step(field, &state, h);
        let mut there = status(field, stop, next.pos);
        // Shrink the step until it stops just short of the first crossed
        // face, so every stage sees one region; then hop across.
        let mut tries = 0;
        while there != here && h > 2.0 * OVERSHOOT && tries < LOCATE_ITERATIONS {
            let Some(f) = first_face_fraction(field, stop, state.pos, next.pos) else {
                break;
            };
            let short = f * h - OVERSHOOT;
            h = if short > OVERSHOOT {
                short
            } else {
                2.0 * OVERSHOOT
            };
            next = rk4_step(field, &state, h);
            there = status(field, stop, next.pos);
            tries += 1;
        }
        state = next;
        samples.push(state);
        match there {
            Status::Ground => break Terminal::Ground,
            Status::OutOfBounds => break Terminal::OutOfBounds,
            Status::Flying(_) => {}
        }
    };
    ReferencePath { samples, terminal }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::{propagate_piecewise, Region, G_EARTH};

    fn launch(vel: Vec3) -> ProjectileState {
        ProjectileState::new(Vec3::new(0.0, 1.0, 0.0), vel, 1.0).unwrap()
    }

    #[test]
    fn constant_velocity_is_exact() {
        let field = GravityField::uniform(Vec3::ZERO);
        let s0 = launch(Vec3::new(2.0, 0.5, -1.0));
        let stop = StopCondition {
            t_max: 1.0,
            ..StopCondition::default()
        };
        let path = rk4_reference(&field, &s0, 1e-2, &stop);
        for s in &path.samples {
            let expect = s0.pos + s0.vel * s.t;
            assert!(s.pos.distance(expect) < 1e-12);
            assert_eq!(s.vel, s0.vel);
        }
    }

    #[test]
    fn earth_parabola_matches_closed_form() {
        let field = GravityField::uniform(Vec3::down(G_EARTH));
        let s0 = launch(Vec3::new(5.0, 12.0, 0.0));
        let stop = StopCondition {
            ground_y: -100.0,
            t_max: 3.0,
            ..StopCondition::default()
        };
        let path = rk4_reference(&field, &s0, 1e-4, &stop);
        assert_eq!(path.terminal, Terminal::MaxTime);
        let worst = path
            .samples
            .iter()
            .map(|s| {
                let t = s.t;
                let exact = s0.pos + s0.vel * t + Vec3::down(G_EARTH) * (0.5 * t * t);
                s.pos.distance(exact)
            })
            .fold(0.0, f64::max);
        assert!(worst < 1e-5, "worst deviation {worst}");
    }

    #[test]
    fn sandwich_exit_state_agrees_with_analytic() {
        let slab = |x0: f64, x1: f64, g: f64| Region {
            bounds: Box3::new(Vec3::new(x0, -10.0, -10.0), Vec3::new(x1, 10.0, 10.0)).unwrap(),
            accel: Vec3::down(g),
        };
        let field = GravityField::new(
            Vec3::ZERO,
            vec![
                slab(0.0, 10.0, 0.0),
                slab(10.0, 20.0, G_EARTH),
                slab(20.0, 30.0, 0.0),
            ],
        )
        .unwrap();
        let s0 = ProjectileState::new(Vec3::ZERO, Vec3::new(10.0, 0.0, 0.0), 1.0).unwrap();
        let stop = StopCondition {
            ground_y: -100.0,
            t_max: 2.5,
            ..StopCondition::default()
        };
        let exact = propagate_piecewise(&field, &s0, &stop).unwrap();
        let oracle = rk4_reference(&field, &s0, 1e-4, &stop);
        let t = oracle.end_state().t;
        let e = exact.state_at(t).unwrap();
        assert!(e.pos.distance(oracle.end_state().pos) < 1e-4);
        // State at the G → NG joint.
        let near_joint = oracle
            .samples
            .iter()
            .min_by(|a, b| (a.t - 2.0).abs().total_cmp(&(b.t - 2.0).abs()))
            .unwrap();
        let e = exact.state_at(near_joint.t).unwrap();
        assert!(e.pos.distance(near_joint.pos) < 1e-6);
        assert!(e.vel.distance(near_joint.vel) < 1e-6);
    }

    #[test]
    fn ground_termination() {
        let field = GravityField::uniform(Vec3::down(G_EARTH));
        let s0 = ProjectileState::new(Vec3::ZERO, Vec3::new(10.0, 10.0, 0.0), 1.0).unwrap();
        let path = rk4_reference(&field, &s0, 1e-3, &StopCondition::default());
        assert_eq!(path.terminal, Terminal::Ground);
        assert!((path.end_state().t - 20.0 / G_EARTH).abs() < 1e-6);
    }
}
