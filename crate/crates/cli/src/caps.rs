//! The calibrated caps file.
//!
//! Each constant is the worst value seen on a fixed family, loosened by a
//! factor [`HEADROOM`]. Entries carry a SHA-256 over their other fields, so
//! hand edits are caught on load.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::sha256_hex;
use crate::{CliError, CliResult};

/// Default caps file name, relative to the working directory.
pub const DEFAULT_CAPS_FILE: &str = "charlab_caps.json";
pub const CAPS_VERSION: u32 = 1;
pub const HEADROOM: f64 = 1.5;

/// Which side of the cap the checked quantity must stay on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// quantity ≤ cap
    Upper,
    /// quantity ≥ cap
    Lower,
}

impl Side {
    /// Moves `worst` by the headroom factor in the permissive direction.
    pub fn loosen(self, worst: f64) -> f64 {
        let grow = match self {
            Side::Upper => worst >= 0.0,
            Side::Lower => worst < 0.0,
        };
        if grow {
            worst * HEADROOM
        } else {
            worst / HEADROOM
        }
    }

    pub fn admits(self, cap: f64, v: f64) -> bool {
        match self {
            Side::Upper => v <= cap,
            Side::Lower => v >= cap,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstCase {
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapEntry {
    pub constant: String,
    pub value: f64,
    pub family: String,
    pub worst_case: WorstCase,
    pub headroom: f64,
    pub hash: String,
}

#[derive(Serialize)]
struct Hashed<'a> {
    constant: &'a str,
    value: f64,
    family: &'a str,
    worst_case: &'a WorstCase,
    headroom: f64,
}

impl CapEntry {
    pub fn new(constant: &str, side: Side, family: &str, worst: WorstCase) -> Self {
        let mut e = CapEntry {
            constant: constant.to_string(),
            value: side.loosen(worst.value),
            family: family.to_string(),
            worst_case: worst,
            headroom: HEADROOM,
            hash: String::new(),
        };
        e.hash = e.digest();
        e
    }

    pub fn digest(&self) -> String {
        let h = Hashed {
            constant: &self.constant,
            value: self.value,
            family: &self.family,
            worst_case: &self.worst_case,
            headroom: self.headroom,
        };
        sha256_hex(&serde_json::to_string(&h).expect("plain data"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapsFile {
    pub version: u32,
    pub caps: Vec<CapEntry>,
}

impl CapsFile {
    pub fn new(caps: Vec<CapEntry>) -> Self {
        CapsFile {
            version: CAPS_VERSION,
            caps,
        }
    }

    /// Reads and checks every entry's hash.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                CliError::Caps(format!(
                    "caps file {} not found; run `charlab calibrate` first",
                    path.display()
                ))
            } else {
                CliError::io(path, e)
            }
        })?;
        let file: CapsFile = serde_json::from_str(&text)
            .map_err(|e| CliError::Caps(format!("{}: malformed caps file: {e}", path.display())))?;
        if file.version != CAPS_VERSION {
            return Err(CliError::Caps(format!(
                "{}: caps version {} (expected {CAPS_VERSION}); rerun `charlab calibrate`",
                path.display(),
                file.version
            )));
        }
        for e in &file.caps {
            if e.digest() != e.hash {
                return Err(CliError::Caps(format!(
                    "{}: hash mismatch for {}; the file was edited after calibration",
                    path.display(),
                    e.constant
                )));
            }
        }
        Ok(file)
    }

    pub fn save(&self, path: &Path) -> CliResult<()> {
        let text = crate::format::to_json(self)?;
        std::fs::write(path, text).map_err(|e| CliError::io(path, e))
    }

    /// The entry for `constant`, which must have been calibrated on
    /// `family`.
    pub fn get(&self, constant: &str, family: &str) -> CliResult<f64> {
        let e = self
            .caps
            .iter()
            .find(|e| e.constant == constant)
            .ok_or_else(|| CliError::Caps(format!("no {constant} in caps file; run `charlab calibrate`")))?;
        if e.family != family {
            return Err(CliError::Caps(format!(
                "{constant} was calibrated on a different family; run `charlab calibrate`"
            )));
        }
        Ok(e.value)
    }
}

/// `--caps` if given, else [`DEFAULT_CAPS_FILE`].
pub fn caps_path(flag: Option<PathBuf>) -> PathBuf {
    flag.unwrap_or_else(|| PathBuf::from(DEFAULT_CAPS_FILE))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CapsFile {
        CapsFile::new(vec![
            CapEntry::new("C_P", Side::Upper, "fam", WorstCase { label: "q=5;e=1".into(), value: 0.4 }),
            CapEntry::new("c_R", Side::Lower, "fam", WorstCase { label: "q=7;e=2".into(), value: 0.3 }),
        ])
    }

    #[test]
    fn headroom_direction() {
        assert!((Side::Upper.loosen(0.4) - 0.6).abs() < 1e-15);
        assert!((Side::Upper.loosen(-0.3) + 0.2).abs() < 1e-15);
        assert!((Side::Lower.loosen(0.3) - 0.2).abs() < 1e-15);
        assert!((Side::Lower.loosen(-0.2) + 0.3).abs() < 1e-15);
        assert!(Side::Upper.admits(0.6, 0.4) && !Side::Lower.admits(0.2, 0.1));
    }

    #[test]
    fn round_trip_and_tamper() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("caps.json");
        let caps = sample();
        caps.save(&path).unwrap();
        let back = CapsFile::load(&path).unwrap();
        assert_eq!(back, caps);
        assert!((back.get("C_P", "fam").unwrap() - 0.6).abs() < 1e-15);
        assert!(matches!(back.get("C_P", "other"), Err(CliError::Caps(_))));
        assert!(matches!(back.get("C_E", "fam"), Err(CliError::Caps(_))));

        let text = std::fs::read_to_string(&path).unwrap().replace("0.6", "0.9");
        std::fs::write(&path, text).unwrap();
        assert!(matches!(CapsFile::load(&path), Err(CliError::Caps(_))));
        assert!(matches!(CapsFile::load(&dir.path().join("missing.json")), Err(CliError::Caps(_))));
    }
}
