use super::ModelError;

/// Parses `H:MM:SS`, `HH:MM:SS` or `MM:SS` into whole seconds.
///
/// Minutes and seconds must be two digits below 60 (a bare `MM:SS` minute
/// field may be one or two digits). Hours are one or two digits, unbounded
/// otherwise.
pub fn parse_clock_time(text: &str) -> Result<u32, ModelError> {
    let bad = || ModelError::MalformedTime(text.to_string());
    let fields: Vec<&str> = text.split(':').collect();
    let digits = |s: &str, lo: usize, hi: usize| -> Option<u32> {
        let ok = (lo..=hi).contains(&s.len()) && s.bytes().all(|b| b.is_ascii_digit());
        ok.then(|| s.parse().ok()).flatten()
    };

    let (hours, minutes, seconds) = match fields.as_slice() {
        [h, m, s] => (
            digits(h, 1, 2).ok_or_else(bad)?,
            digits(m, 2, 2).ok_or_else(bad)?,
            digits(s, 2, 2).ok_or_else(bad)?,
        ),
        [m, s] => (
            0,
            digits(m, 1, 2).ok_or_else(bad)?,
            digits(s, 2, 2).ok_or_else(bad)?,
        ),
        _ => return Err(bad()),
    };
    if minutes >= 60 || seconds >= 60 {
        return Err(bad());
    }
    Ok(hours * 3600 + minutes * 60 + seconds)
}

/// Inverse of [`parse_clock_time`] in the canonical `H:MM:SS` shape.
pub fn format_clock_time(total_seconds: u32) -> String {
    let h = total_seconds / 3600;
    let m = (total_seconds / 60) % 60;
    let s = total_seconds % 60;
    format!("{h}:{m:02}:{s:02}")
}
