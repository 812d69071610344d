//! `HH:MM` wall-clock parsing and formatting.

use crate::model::{Minutes, MINUTES_PER_DAY};

/// Parses a 24-hour `HH:MM` (or `HH:MM:SS`) token into minutes from
/// midnight. Seconds are floored away. `24:00` is accepted as 1440.
pub fn parse_clock(token: &str) -> Option<Minutes> {
    let mut parts = token.split(':');
    let hours = parse_digits(parts.next()?, 1, 2)?;
    let minutes = parse_digits(parts.next()?, 2, 2)?;
    if let Some(seconds) = parts.next() {
        if parse_digits(seconds, 2, 2)? >= 60 {
            return None;
        }
    }
    if parts.next().is_some() || minutes >= 60 {
        return None;
    }
    let total = hours * 60 + minutes;
    (total <= MINUTES_PER_DAY).then_some(total)
}

fn parse_digits(s: &str, min_len: usize, max_len: usize) -> Option<Minutes> {
    if s.len() < min_len || s.len() > max_len || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Formats minutes from midnight as zero-padded `HH:MM`.
pub fn format_clock(minutes: Minutes) -> String {
    format!("{:02}:{:02}", minutes / 60, minutes % 60)
}
