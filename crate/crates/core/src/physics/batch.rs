//! Batch evaluation of many launches.
//!
//! With the `parallel` feature (on by default) work is spread over the rayon
//! thread pool; without it, or with [`Exec::Sequential`], it runs in order on
//! the calling thread. Results are identical and in input order either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::{
    propagate_piecewise, rk4_reference, GravityField, PhysicsError, ProjectileState, StopCondition,
    Trajectory,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

/// Maps `f` over `items`, preserving order.
pub fn map<T, U, F>(exec: Exec, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}

pub fn propagate_many(
    exec: Exec,
    field: &GravityField,
    launches: &[ProjectileState],
    stop: &StopCondition,
) -> Vec<Result<Trajectory, PhysicsError>> {
    map(exec, launches, |s0| propagate_piecewise(field, s0, stop))
}

/// Largest position disagreement over all launches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleReport {
    pub launches: usize,
    pub max_pos_error: f64,
    pub worst_launch: usize,
}

/// Runs the analytic propagator and the RK4 oracle on every launch and
/// compares positions at each oracle sample time.
pub fn oracle_sweep(
    exec: Exec,
    field: &GravityField,
    launches: &[ProjectileState],
    stop: &StopCondition,
    step: f64,
) -> Result<OracleReport, PhysicsError> {
    let errors = map(exec, launches, |s0| -> Result<f64, PhysicsError> {
        let exact = propagate_piecewise(field, s0, stop)?;
        let oracle = rk4_reference(field, s0, step, stop);
        let t_end = exact.end_time();
        Ok(oracle
            .samples
            .iter()
            .filter(|s| s.t <= t_end)
            .filter_map(|s| exact.state_at(s.t).map(|e| e.pos.distance(s.pos)))
            .fold(0.0, f64::max))
    });
    let mut report = OracleReport {
        launches: launches.len(),
        max_pos_error: 0.0,
        worst_launch: 0,
    };
    for (i, e) in errors.into_iter().enumerate() {
        let e = e?;
        if e > report.max_pos_error {
            report.max_pos_error = e;
            report.worst_launch = i;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::{Vec3, G_MOON};

    #[test]
    fn sequential_and_parallel_agree() {
        let field = GravityField::uniform(Vec3::down(G_MOON));
        let launches: Vec<_> = (0..64)
            .map(|i| {
                ProjectileState::new(
                    Vec3::new(0.0, 1.0, 0.0),
                    Vec3::new(1.0 + i as f64, 3.0, 0.0),
                    1.0,
                )
                .unwrap()
            })
            .collect();
        let stop = StopCondition::default();
        let a = propagate_many(Exec::Sequential, &field, &launches, &stop);
        let b = propagate_many(Exec::Parallel, &field, &launches, &stop);
        assert_eq!(a, b);
    }
}
