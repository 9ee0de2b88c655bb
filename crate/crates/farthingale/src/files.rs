//! Plain-text formats for the CLI's inputs: outcome streams, interval lists
//! (alphabets and forecast streams), and table-backed forecasting systems.
//!
//! All formats share one lexical convention: blank lines and lines starting
//! with `#` are ignored, everything else is content. Parse errors carry the
//! 1-based line number where they occurred.
//!
//! - Outcome stream: lines of `0`/`1` characters, concatenated in order.
//! - Interval list: one `lo hi` pair per line, endpoints as `a/b` rationals.
//! - System table: lines `situation lo hi` (the root spelled `-`), plus one
//!   required `default lo hi` line covering unlisted situations.

use std::collections::HashMap;

use crate::error::Error;
use crate::forecast::IntervalForecast;
use crate::seq::{Outcome, Situation};
use crate::system::ForecastingSystem;

/// Trimmed content lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(n, line)| (n + 1, line.trim()))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'))
}

fn at_line(line: usize, err: Error) -> Error {
    match err {
        Error::Parse { message, .. } => Error::Parse { line, message },
        other => Error::Parse { line, message: other.to_string() },
    }
}

/// Parse an outcome stream: every content line is a run of `0`/`1` bits.
pub fn parse_outcomes(text: &str) -> Result<Vec<Outcome>, Error> {
    let mut out = Vec::new();
    for (line, content) in content_lines(text) {
        for c in content.chars() {
            match c {
                '0' => out.push(Outcome::Zero),
                '1' => out.push(Outcome::One),
                other => {
                    return Err(Error::parse(
                        line,
                        format!("expected only '0' and '1' bits, found {other:?}"),
                    ))
                }
            }
        }
    }
    Ok(out)
}

/// One line of `0`/`1` characters (empty stream renders as an empty line).
pub fn format_outcomes(outcomes: &[Outcome]) -> String {
    let mut s: String = outcomes.iter().map(|x| if x.bit() == 1 { '1' } else { '0' }).collect();
    s.push('\n');
    s
}

/// Parse an interval list: one `lo hi` pair per content line.
pub fn parse_intervals(text: &str) -> Result<Vec<IntervalForecast>, Error> {
    let mut out = Vec::new();
    for (line, content) in content_lines(text) {
        out.push(IntervalForecast::parse(content).map_err(|e| at_line(line, e))?);
    }
    Ok(out)
}

/// One `lo hi` line per interval.
pub fn format_intervals(intervals: &[IntervalForecast]) -> String {
    let mut out = String::new();
    for i in intervals {
        out.push_str(&format!("{} {}\n", i.lo(), i.hi()));
    }
    out
}

/// A parsed table-system file: explicit entries plus the required default.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemTable {
    pub entries: HashMap<Situation, IntervalForecast>,
    pub default: IntervalForecast,
}

impl SystemTable {
    pub fn into_system(self) -> ForecastingSystem {
        ForecastingSystem::from_table(self.entries, self.default)
    }

    /// Whether no listed forecast (default included) is `[0,0]` or `[1,1]`.
    pub fn is_nondegenerate(&self) -> bool {
        let ok = |i: &IntervalForecast| !i.is_point_zero() && !i.is_point_one();
        ok(&self.default) && self.entries.values().all(ok)
    }
}

/// Parse a system table: content lines `situation lo hi` with the root
/// written `-`, plus exactly one `default lo hi` line.
pub fn parse_system_table(text: &str) -> Result<SystemTable, Error> {
    let mut entries = HashMap::new();
    let mut default = None;
    for (line, content) in content_lines(text) {
        let (key, rest) = content
            .split_once(char::is_whitespace)
            .ok_or_else(|| Error::parse(line, format!("expected \"situation lo hi\", found {content:?}")))?;
        let forecast = IntervalForecast::parse(rest).map_err(|e| at_line(line, e))?;
        if key == "default" {
            if default.replace(forecast).is_some() {
                return Err(Error::parse(line, "duplicate default line"));
            }
            continue;
        }
        let situation = Situation::parse(key).map_err(|e| at_line(line, e))?;
        if entries.insert(situation, forecast).is_some() {
            return Err(Error::parse(line, format!("duplicate entry for situation {key:?}")));
        }
    }
    let default =
        default.ok_or_else(|| Error::parse(0, "system table needs a \"default lo hi\" line"))?;
    Ok(SystemTable { entries, default })
}

/// Render a system table with entries sorted by depth then bits, default
/// last. Round-trips through [`parse_system_table`].
pub fn format_system_table(table: &SystemTable) -> String {
    let mut keys: Vec<&Situation> = table.entries.keys().collect();
    keys.sort_by_key(|w| (w.len(), w.to_string()));
    let mut out = String::new();
    for w in keys {
        let i = &table.entries[w];
        out.push_str(&format!("{} {} {}\n", w, i.lo(), i.hi()));
    }
    out.push_str(&format!("default {} {}\n", table.default.lo(), table.default.hi()));
    out
}

/// Render forecasts produced per situation (rationalization output): one
/// `situation lo hi` line in the given order, no default.
pub fn format_forecast_rows(rows: &[(Situation, IntervalForecast)]) -> String {
    let mut out = String::new();
    for (w, i) in rows {
        out.push_str(&format!("{} {} {}\n", w, i.lo(), i.hi()));
    }
    out
}
