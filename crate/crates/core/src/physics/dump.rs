use std::io::{self, Write};

use super::Trajectory;

pub const TRAJ_CSV_HEADER: &str = "t,x,y,z,vx,vy,vz,segment_index";

/// Formats like C's `%.9g`: nine significant digits, trailing zeros trimmed.
pub fn format_sig9(v: f64) -> String {
    const SIG: i32 = 9;
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.*e}", (SIG - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-5..SIG).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (SIG - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes one row per sample time: the uniform grid `k·dt`, every segment
/// start, and the final state.
pub fn write_traj_csv<W: Write>(traj: &Trajectory, dt: f64, mut out: W) -> io::Result<()> {
    assert!(dt > 0.0, "sample step must be positive");
    let t0 = traj.start_time();
    let t_end = traj.end_time();
    let mut times: Vec<f64> = traj.segments.iter().map(|s| s.start.t).collect();
    let mut k = 1u64;
    loop {
        let t = t0 + k as f64 * dt;
        if t >= t_end {
            break;
        }
        times.push(t);
        k += 1;
    }
    times.push(t_end);
    times.sort_by(f64::total_cmp);
    times.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);

    writeln!(out, "{TRAJ_CSV_HEADER}")?;
    for t in times {
        let idx = traj.segment_index_at(t).unwrap_or(traj.segments.len() - 1);
        let seg = &traj.segments[idx];
        let s = seg.at(t - seg.start.t);
        let cols = [s.t, s.pos.x, s.pos.y, s.pos.z, s.vel.x, s.vel.y, s.vel.z];
        let row: Vec<String> = cols.iter().map(|&v| format_sig9(v)).collect();
        writeln!(out, "{},{idx}", row.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(format_sig9(-4.9035), "-4.9035");
        assert_eq!(format_sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(format_sig9(20.394289793), "20.3942898");
        assert_eq!(format_sig9(123456789012.0), "1.23456789e+11");
        assert_eq!(format_sig9(1.5e-7), "1.5e-07");
        assert_eq!(format_sig9(2.0), "2");
        assert_eq!(format_sig9(0.0), "0");
    }
}
