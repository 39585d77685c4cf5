//! Parsing of unit-suffixed quantities. Config values mix millimeters and
//! megahertz, so every physical value must carry an explicit suffix; bare
//! numbers are rejected.

fn parse_with_table(s: &str, table: &[(&str, f64)], kind: &str) -> Result<f64, String> {
    let trimmed = s.trim();
    for (suffix, scale) in table {
        if let Some(number) = trimmed.strip_suffix(suffix) {
            let number = number.trim_end();
            if number.is_empty() {
                return Err(format!("{kind} value {trimmed:?} has no numeric part"));
            }
            return number
                .parse::<f64>()
                .map(|v| v * scale)
                .map_err(|e| format!("{kind} value {trimmed:?}: {e}"));
        }
    }
    Err(format!(
        "{kind} value {trimmed:?} needs one of the suffixes {:?}",
        table.iter().map(|(s, _)| *s).collect::<Vec<_>>()
    ))
}

/// Length with suffix `nm`, `um`/`µm`, `mm`, `cm` or `m`; returns meters.
pub fn parse_length(s: &str) -> Result<f64, String> {
    // Longest suffixes first so "mm" is not read as "m".
    parse_with_table(
        s,
        &[
            ("nm", 1e-9),
            ("um", 1e-6),
            ("µm", 1e-6),
            ("mm", 1e-3),
            ("cm", 1e-2),
            ("m", 1.0),
        ],
        "length",
    )
}

/// Frequency with suffix `Hz`, `kHz`, `MHz` or `GHz`; returns hertz.
pub fn parse_frequency(s: &str) -> Result<f64, String> {
    parse_with_table(
        s,
        &[("kHz", 1e3), ("MHz", 1e6), ("GHz", 1e9), ("Hz", 1.0)],
        "frequency",
    )
}

/// Time with suffix `us`/`µs`, `ms` or `s`; returns seconds.
pub fn parse_time(s: &str) -> Result<f64, String> {
    parse_with_table(s, &[("us", 1e-6), ("µs", 1e-6), ("ms", 1e-3), ("s", 1.0)], "time")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lengths() {
        assert_eq!(parse_length("38.9mm").unwrap(), 38.9 * 1e-3);
        assert_eq!(parse_length("780nm").unwrap(), 780.0 * 1e-9);
        assert_eq!(parse_length("20um").unwrap(), 20.0 * 1e-6);
        assert_eq!(parse_length("1.5 m").unwrap(), 1.5);
        assert!(parse_length("38.9").is_err());
        assert!(parse_length("mm").is_err());
        assert!(parse_length("38.9kg").is_err());
    }

    #[test]
    fn frequencies() {
        assert_eq!(parse_frequency("480MHz").unwrap(), 480e6);
        assert_eq!(parse_frequency("12MHz").unwrap(), 12e6);
        assert_eq!(parse_frequency("3Hz").unwrap(), 3.0);
        assert!(parse_frequency("12").is_err());
    }

    #[test]
    fn times() {
        assert_eq!(parse_time("0.1s").unwrap(), 0.1);
        assert_eq!(parse_time("10ms").unwrap(), 0.01);
        assert!(parse_time("10").is_err());
    }
}
