//! Number and JSON formatting shared by all outputs.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::{CliError, CliResult};

/// Significant digits in CSV cells.
pub const CSV_DIGITS: usize = 12;

/// `v` to [`CSV_DIGITS`] significant digits in the style of C's `%.12g`:
/// fixed notation for exponents in `[-4, 12)`, scientific otherwise,
/// trailing zeros removed. Non-finite values give `nan`, `inf`, `-inf`.
pub fn sig(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", CSV_DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..CSV_DIGITS as i32).contains(&exp) {
        let decimals = (CSV_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    t.to_string()
}

/// Pretty JSON with a trailing newline. Non-finite floats become `null`.
pub fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Config(format!("cannot serialise report: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Writes `text` to `path`, or to stdout when `path` is `None` or `-`.
pub fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) if p != Path::new("-") => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        _ => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::io("<stdout>", e))
        }
    }
}
