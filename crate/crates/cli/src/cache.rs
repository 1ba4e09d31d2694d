//! On-disk divisor-count tables.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use mdd_core::ntheory::sieve_divisor_count;
use mdd_core::{SieveKind, SieveTable};

pub fn cache_path(dir: &Path, lo: u64, hi: u64) -> PathBuf {
    dir.join(format!("d2-{lo}-{hi}.sieve"))
}

/// `d₂` on `[lo, hi]`, read from `dir` when a matching file exists and
/// written there otherwise. Unreadable cache files are rebuilt.
pub fn divisor_table(dir: Option<&Path>, lo: u64, hi: u64) -> anyhow::Result<SieveTable> {
    let Some(dir) = dir else {
        return Ok(sieve_divisor_count(lo, hi)?);
    };
    let path = cache_path(dir, lo, hi);
    if path.exists() {
        let loaded = File::open(&path)
            .map_err(mdd_core::Error::from)
            .and_then(|f| SieveTable::read_cache(BufReader::new(f)));
        match loaded {
            Ok(t) if t.kind() == SieveKind::DivisorCount && t.lo() == lo && t.hi() == hi => return Ok(t),
            Ok(_) => eprintln!("warning: {} does not match its name; rebuilding", path.display()),
            Err(e) => eprintln!("warning: {}: {e}; rebuilding", path.display()),
        }
    }
    let table = sieve_divisor_count(lo, hi)?;
    fs::create_dir_all(dir)?;
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    {
        let mut w = BufWriter::new(File::create(&tmp)?);
        table.write_cache(&mut w)?;
        std::io::Write::flush(&mut w)?;
    }
    fs::rename(&tmp, &path)?;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cache_hit_and_rebuild() {
        let dir = tempfile::tempdir().unwrap();
        let fresh = divisor_table(Some(dir.path()), 10, 40).unwrap();
        let path = cache_path(dir.path(), 10, 40);
        assert!(path.exists());
        assert_eq!(divisor_table(Some(dir.path()), 10, 40).unwrap(), fresh);
        fs::write(&path, b"garbage").unwrap();
        assert_eq!(divisor_table(Some(dir.path()), 10, 40).unwrap(), fresh);
        assert_eq!(divisor_table(None, 10, 40).unwrap(), fresh);
    }
}
