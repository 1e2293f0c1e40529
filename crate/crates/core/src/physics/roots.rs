//! Event timing along a constant-acceleration path.
//!
//! Every coordinate of such a path is a quadratic in time, so the instants at
//! which it meets a face plane are roots of a polynomial of degree ≤ 2. The
//! set of times a path spends inside a half-open interval is bounded by those
//! roots; classifying each sub-interval by its midpoint gives exact entry and
//! exit instants without stepping.

use super::{Box3, Vec3};

/// Roots closer to the segment start than this are attributed to the start
/// itself (the face the body just crossed).
pub const EPS_T: f64 = 1e-12;

/// Real roots of `c2·t² + c1·t + c0 = 0`, ascending.
pub fn poly_roots(c2: f64, c1: f64, c0: f64) -> Vec<f64> {
    if c2 == 0.0 {
        if c1 == 0.0 {
            return Vec::new();
        }
        return vec![-c0 / c1];
    }
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc < 0.0 {
        return Vec::new();
    }
    // Avoids cancellation between -c1 and sqrt(disc).
    let q = -0.5 * (c1 + c1.signum() * disc.sqrt());
    let (r1, r2) = if q == 0.0 {
        (0.0, 0.0)
    } else {
        (q / c2, c0 / q)
    };
    if r1 <= r2 {
        vec![r1, r2]
    } else {
        vec![r2, r1]
    }
}

/// Position along `pos + vel·τ + ½·accel·τ²`.
#[derive(Debug, Clone, Copy)]
pub struct Path {
    pub pos: Vec3,
    pub vel: Vec3,
    pub accel: Vec3,
}

impl Path {
    pub fn at(&self, tau: f64) -> Vec3 {
        self.pos + self.vel * tau + self.accel * (0.5 * tau * tau)
    }

    fn coord(&self, axis: usize, tau: f64) -> f64 {
        self.pos.axis(axis) + self.vel.axis(axis) * tau + 0.5 * self.accel.axis(axis) * tau * tau
    }

    fn level_crossings(&self, axis: usize, level: f64, horizon: f64, out: &mut Vec<f64>) {
        let roots = poly_roots(
            0.5 * self.accel.axis(axis),
            self.vel.axis(axis),
            self.pos.axis(axis) - level,
        );
        out.extend(roots.into_iter().filter(|&t| t > EPS_T && t <= horizon));
    }
}

/// Whether a transition leaves or enters the tested set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Crossing {
    Exit,
    Entry,
}

fn first_transition(
    breakpoints: &mut Vec<f64>,
    horizon: f64,
    inside: impl Fn(f64) -> bool,
    want: Crossing,
) -> Option<f64> {
    breakpoints.sort_by(f64::total_cmp);
    breakpoints.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * (1.0 + b.abs()));

    let mut was_inside = {
        let hi = breakpoints.first().copied().unwrap_or(horizon);
        inside(0.5 * hi)
    };
    if want == Crossing::Exit && !was_inside {
        return Some(EPS_T);
    }
    for (i, &bp) in breakpoints.iter().enumerate() {
        if bp >= horizon {
            break;
        }
        let hi = breakpoints
            .get(i + 1)
            .copied()
            .unwrap_or(horizon)
            .min(horizon);
        if hi <= bp {
            continue;
        }
        let now_inside = inside(0.5 * (bp + hi));
        match (was_inside, now_inside, want) {
            (true, false, Crossing::Exit) | (false, true, Crossing::Entry) => return Some(bp),
            _ => {}
        }
        was_inside = now_inside;
    }
    None
}

/// Earliest τ ∈ (EPS_T, horizon) at which `path` leaves or enters `bx`.
pub fn box_transition(path: &Path, bx: &Box3, horizon: f64, want: Crossing) -> Option<f64> {
    let mut bps = Vec::with_capacity(12);
    for axis in 0..3 {
        path.level_crossings(axis, bx.min.axis(axis), horizon, &mut bps);
        path.level_crossings(axis, bx.max.axis(axis), horizon, &mut bps);
    }
    first_transition(&mut bps, horizon, |t| bx.contains(path.at(t)), want)
}

/// Earliest τ at which the path drops below `floor` on the vertical axis.
pub fn floor_exit(path: &Path, floor: f64, horizon: f64) -> Option<f64> {
    let mut bps = Vec::with_capacity(2);
    path.level_crossings(1, floor, horizon, &mut bps);
    first_transition(
        &mut bps,
        horizon,
        |t| path.coord(1, t) >= floor,
        Crossing::Exit,
    )
}
