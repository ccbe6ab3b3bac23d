//! INI-style `key = value` configuration files.
//!
//! Blank lines and lines starting with `#` or `;` are ignored. A `[name]`
//! header scopes the keys below it; a lookup for `key` in command `cmd`
//! tries `cmd.key` first and then the unscoped `key`.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut entries = BTreeMap::new();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.trim().to_string();
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value, got {raw:?}", i + 1)))?;
            let k = k.trim();
            if k.is_empty() {
                return Err(CliError::Config(format!("line {}: empty key", i + 1)));
            }
            let key = if section.is_empty() { k.to_string() } else { format!("{section}.{k}") };
            if entries.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(CliError::Config(format!("line {}: duplicate key {key}", i + 1)));
            }
        }
        Ok(Config { entries })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn raw(&self, command: &str, key: &str) -> Option<&str> {
        self.entries
            .get(&format!("{command}.{key}"))
            .or_else(|| self.entries.get(key))
            .map(String::as_str)
    }

    /// The flag value if given, else the parsed config value, else `None`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, command: &str, key: &str) -> CliResult<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.raw(command, key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::Config(format!("bad value for {key}: {v:?}"))),
        }
    }
}

/// Hex SHA-256 of `text`.
pub fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Canonical `key=value` lines (sorted by key) and their hash.
pub fn canonical_hash(pairs: &[(&str, String)]) -> String {
    let mut sorted: Vec<_> = pairs.iter().collect();
    sorted.sort_by(|a, b| a.0.cmp(b.0));
    let text: String = sorted.iter().map(|(k, v)| format!("{k}={v}\n")).collect();
    sha256_hex(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_precedence() {
        let c = Config::parse("# caps\nthreads = 4\n\n[scan]\nthreads=2\neps = 0.1,0.5\n; done\n").unwrap();
        assert_eq!(c.raw("scan", "threads"), Some("2"));
        assert_eq!(c.raw("verify", "threads"), Some("4"));
        assert_eq!(c.pick::<usize>(Some(8), "scan", "threads").unwrap(), Some(8));
        assert_eq!(c.pick::<usize>(None, "scan", "threads").unwrap(), Some(2));
        assert_eq!(c.pick::<usize>(None, "scan", "qmin").unwrap(), None);
        assert!(c.pick::<usize>(None, "scan", "eps").is_err());
        assert!(Config::parse("no equals sign").is_err());
        assert!(Config::parse("a=1\na=2").is_err());
    }

    #[test]
    fn hash_ignores_order() {
        let a = canonical_hash(&[("x", "1".into()), ("y", "2".into())]);
        let b = canonical_hash(&[("y", "2".into()), ("x", "1".into())]);
        assert_eq!(a, b);
        assert_eq!(a.len(), 64);
    }
}
