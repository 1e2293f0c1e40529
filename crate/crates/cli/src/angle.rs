//! Angles on the command line: `45deg` is degrees, a bare number radians.

pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let (num, deg) = match t.strip_suffix("deg") {
        Some(n) => (n.trim_end(), true),
        None => (t, false),
    };
    let v: f64 = num
        .parse()
        .map_err(|_| format!("not an angle: `{s}` (use 0.5 or 30deg)"))?;
    if !v.is_finite() {
        return Err(format!("not an angle: `{s}`"));
    }
    Ok(if deg { v.to_radians() } else { v })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn units() {
        assert!((parse_angle("45deg").unwrap() - FRAC_PI_4).abs() < 1e-15);
        assert!((parse_angle("45 deg").unwrap() - FRAC_PI_4).abs() < 1e-15);
        assert_eq!(parse_angle("0.5").unwrap(), 0.5);
        assert_eq!(parse_angle("-0.1").unwrap(), -0.1);
        assert!(parse_angle("deg").is_err());
        assert!(parse_angle("45rad").is_err());
        assert!(parse_angle("inf").is_err());
    }
}
