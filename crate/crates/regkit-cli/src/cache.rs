//! Content-addressed report cache. A report is stored under the hash of the
//! schema tag, the canonical config JSON, and the output format; installs go
//! through a temp file and an atomic rename. Cache trouble is never fatal:
//! a miss just recomputes.

use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

pub const SCHEMA_TAG: &str = "regkit-report-v1";

/// Precedence: explicit flag, then REGKIT_CACHE_DIR, then the system temp
/// directory.
pub fn resolve_dir(flag: Option<PathBuf>) -> PathBuf {
    if let Some(dir) = flag {
        return dir;
    }
    if let Ok(env) = std::env::var("REGKIT_CACHE_DIR") {
        if !env.is_empty() {
            return PathBuf::from(env);
        }
    }
    std::env::temp_dir().join("regkit-cache")
}

pub fn key_for(config_json: &str, pretty: bool) -> String {
    let mut h = Sha256::new();
    h.update(SCHEMA_TAG.as_bytes());
    h.update(b"|");
    h.update(config_json.as_bytes());
    h.update(if pretty { b"|pretty" } else { b"|compact" });
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub struct CacheEntry {
    pub all_pass: bool,
    pub text: String,
}

pub fn lookup(dir: &Path, key: &str) -> Option<CacheEntry> {
    let raw = fs::read_to_string(dir.join(format!("{key}.json"))).ok()?;
    let (status, text) = raw.split_once('\n')?;
    let all_pass = match status {
        "pass" => true,
        "fail" => false,
        _ => return None,
    };
    Some(CacheEntry { all_pass, text: text.to_string() })
}

pub fn store(dir: &Path, key: &str, entry: &CacheEntry) {
    if fs::create_dir_all(dir).is_err() {
        return;
    }
    let target = dir.join(format!("{key}.json"));
    let tmp = dir.join(format!(".{key}.{}.tmp", std::process::id()));
    let body = format!("{}\n{}", if entry.all_pass { "pass" } else { "fail" }, entry.text);
    if fs::write(&tmp, body).is_ok() && fs::rename(&tmp, &target).is_err() {
        let _ = fs::remove_file(&tmp);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_separates_config_and_format() {
        let a = key_for("{\"p\":7}", true);
        let b = key_for("{\"p\":7}", false);
        let c = key_for("{\"p\":5}", true);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, key_for("{\"p\":7}", true));
        assert_eq!(a.len(), 64);
    }

    #[test]
    fn roundtrip_preserves_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let entry = CacheEntry { all_pass: false, text: "{\"x\":1}\n".into() };
        store(dir.path(), "k", &entry);
        let hit = lookup(dir.path(), "k").unwrap();
        assert!(!hit.all_pass);
        assert_eq!(hit.text, entry.text);
        assert!(lookup(dir.path(), "absent").is_none());
    }
}
