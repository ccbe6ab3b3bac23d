//! On-disk cache for the shared smallest-prime-factor sieve, kept in the
//! directory named by `CHARLAB_CACHE_DIR`.

use std::path::{Path, PathBuf};

use charlab::arith::{SpfSieve, DEFAULT_SPF_BOUND};

use crate::{CliError, CliResult};

pub const CACHE_ENV: &str = "CHARLAB_CACHE_DIR";

pub fn sieve_path(dir: &Path) -> PathBuf {
    dir.join(format!("spf-{DEFAULT_SPF_BOUND}.u32le"))
}

/// Loads the sieve from `dir`, or builds and stores it, then installs it as
/// the process-wide sieve. A corrupt file is rebuilt.
pub fn warm_sieve(dir: &Path) -> CliResult<()> {
    let path = sieve_path(dir);
    let loaded = std::fs::read(&path).ok().and_then(|bytes| {
        if bytes.len() != 4 * (DEFAULT_SPF_BOUND + 1) {
            return None;
        }
        let table = bytes
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        SpfSieve::from_table(table).ok()
    });
    let sieve = match loaded {
        Some(s) => s,
        None => {
            let s = SpfSieve::new(DEFAULT_SPF_BOUND);
            std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            let bytes: Vec<u8> = s.table().iter().flat_map(|v| v.to_le_bytes()).collect();
            let tmp = path.with_extension("tmp");
            std::fs::write(&tmp, bytes).map_err(|e| CliError::io(&tmp, e))?;
            std::fs::rename(&tmp, &path).map_err(|e| CliError::io(&path, e))?;
            s
        }
    };
    SpfSieve::install_shared(sieve);
    Ok(())
}

/// [`warm_sieve`] in `$CHARLAB_CACHE_DIR`, if set.
pub fn warm_from_env() -> CliResult<()> {
    match std::env::var_os(CACHE_ENV) {
        Some(dir) if !dir.is_empty() => warm_sieve(Path::new(&dir)),
        _ => Ok(()),
    }
}
