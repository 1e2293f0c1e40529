use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use gravlab_core::exercises::{build_sandwich, GravityPreset, Platform};
use gravlab_core::physics::{
    launch_velocity, propagate_piecewise, write_traj_csv, ProjectileState, StopCondition,
    Trajectory, Vec3,
};

use super::output;
use crate::angle::parse_angle;
use crate::{load_config, CliError};

#[derive(Debug, Clone, Args)]
pub struct TrajArgs {
    /// earth, moon or zero.
    #[arg(long, conflicts_with = "sandwich")]
    pub gravity: Option<GravityPreset>,
    /// G_NG_G or NG_G_NG; launched from the sandwich origin at mid-height.
    #[arg(long)]
    pub sandwich: Option<Platform>,
    /// Muzzle speed, m/s.
    #[arg(long, default_value_t = 12.0)]
    pub speed: f64,
    /// Elevation angle: radians, or degrees with a `deg` suffix.
    #[arg(long, default_value = "0", value_parser = parse_angle, allow_hyphen_values = true)]
    pub pitch: f64,
    #[arg(long, default_value = "0", value_parser = parse_angle, allow_hyphen_values = true)]
    pub yaw: f64,
    /// Launch height above the ground (uniform gravity only), m.
    #[arg(long, default_value_t = 0.0)]
    pub height: f64,
    /// Output grid spacing, s.
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    /// Stop after this long, s.
    #[arg(long, default_value_t = 10.0)]
    pub t_max: f64,
    /// Session config whose sandwich geometry is used.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn trajectory(args: &TrajArgs) -> Result<Trajectory, CliError> {
    if !(args.speed >= 0.0) || !(args.dt > 0.0) || !(args.t_max > 0.0) {
        return Err(CliError::Usage(
            "speed must be >= 0, dt and t_max > 0".into(),
        ));
    }
    let vel = launch_velocity(args.speed, args.yaw, args.pitch);
    let (field, pos, stop) = match (args.gravity, args.sandwich) {
        (_, Some(p)) => {
            let geo = load_config(args.config.as_deref())?.exercise.sandwich;
            let field = build_sandwich(p, &geo).map_err(|e| CliError::Config(e.to_string()))?;
            let length: f64 = geo.box_widths.iter().sum();
            let stop = StopCondition {
                ground_y: -geo.box_height / 2.0,
                bounds: gravlab_core::physics::Box3::new(
                    Vec3::new(geo.origin_x - 50.0, -geo.box_height / 2.0 - 1.0, -50.0),
                    Vec3::new(geo.origin_x + length + 50.0, 100.0, 50.0),
                )
                .map_err(|e| CliError::Usage(e.to_string()))?,
                t_max: args.t_max,
            };
            (field, Vec3::new(geo.origin_x, 0.0, 0.0), stop)
        }
        (g, None) => {
            let g = g.unwrap_or(GravityPreset::Earth);
            let stop = StopCondition {
                t_max: args.t_max,
                ..StopCondition::default()
            };
            (g.field(), Vec3::new(0.0, args.height, 0.0), stop)
        }
    };
    let s0 = ProjectileState::new(pos, vel, 1.0).map_err(|e| CliError::Usage(e.to_string()))?;
    propagate_piecewise(&field, &s0, &stop).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn run(args: &TrajArgs) -> Result<Trajectory, CliError> {
    let traj = trajectory(args)?;
    let mut out = output(args.out.as_deref())?;
    write_traj_csv(&traj, args.dt, &mut out)?;
    out.flush()?;
    Ok(traj)
}
