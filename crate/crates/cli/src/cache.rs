//! On-disk cache of normalization data, one file per `(family, N, D)`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use qkz_core::qdet::normalize;
use qkz_core::text::{format_scalar, parse_scalar};
use qkz_core::{FamilyDescriptor, NormalizedFamily, QDetData, RMatrixFamily};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Payload {
    family: FamilyDescriptor,
    #[serde(rename = "C")]
    c: Vec<Vec<String>>,
    f0: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    payload: Payload,
    sha256: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheState {
    /// No cache directory configured.
    Disabled,
    Hit,
    Miss,
    /// The stored entry was unreadable or failed its checksum.
    Corrupt,
}

pub fn entry_path(dir: &Path, desc: &FamilyDescriptor) -> PathBuf {
    dir.join(format!("{}-N{}-D{}.json", desc.family.name(), desc.n, desc.d))
}

fn digest(p: &Payload) -> String {
    hex::encode(Sha256::digest(serde_json::to_vec(p).expect("payload serializes")))
}

fn payload_of(nf: &NormalizedFamily) -> Payload {
    Payload {
        family: nf.base().descriptor(),
        c: nf.qdet().coefficients().iter().map(format_scalar).collect(),
        f0: format_scalar(nf.f0()),
    }
}

/// File contents for a normalized family; identical inputs give identical
/// bytes.
pub fn encode(nf: &NormalizedFamily) -> String {
    let payload = payload_of(nf);
    let sha256 = digest(&payload);
    let mut s = serde_json::to_string_pretty(&Entry { payload, sha256 }).expect("entry serializes");
    s.push('\n');
    s
}

pub fn decode(text: &str, base: &RMatrixFamily) -> Result<NormalizedFamily, String> {
    let e: Entry = serde_json::from_str(text).map_err(|e| format!("unreadable: {e}"))?;
    if digest(&e.payload) != e.sha256 {
        return Err("checksum mismatch".into());
    }
    if e.payload.family != base.descriptor() {
        return Err("entry belongs to another family".into());
    }
    let mode = base.mode();
    let c = e.payload.c.iter().map(|g| parse_scalar(g, mode)).collect::<qkz_core::Result<Vec<_>>>().map_err(|e| e.to_string())?;
    let qd = QDetData::new(base.n(), c).map_err(|e| e.to_string())?;
    let f0 = parse_scalar(&e.payload.f0, mode).map_err(|e| e.to_string())?;
    NormalizedFamily::from_parts(base.clone(), qd, f0).map_err(|e| e.to_string())
}

/// Loads the normalization of `base` from `dir`, or computes and stores it.
/// A corrupt entry is replaced after a warning.
pub fn load_or_compute(dir: Option<&Path>, base: &RMatrixFamily) -> qkz_core::Result<(NormalizedFamily, CacheState)> {
    let Some(dir) = dir else {
        return Ok((normalize(base)?, CacheState::Disabled));
    };
    let path = entry_path(dir, &base.descriptor());
    let mut state = CacheState::Miss;
    if let Ok(text) = std::fs::read_to_string(&path) {
        match decode(&text, base) {
            Ok(nf) => return Ok((nf, CacheState::Hit)),
            Err(why) => {
                log::warn!("cache entry {} is corrupt ({why}); recomputing", path.display());
                state = CacheState::Corrupt;
            }
        }
    }
    let nf = normalize(base)?;
    let stored = std::fs::create_dir_all(dir).and_then(|_| std::fs::write(&path, encode(&nf)));
    if let Err(e) = stored {
        log::warn!("cannot write cache entry {}: {e}", path.display());
    }
    Ok((nf, state))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cold_warm_and_tampered() {
        let dir = tempfile::tempdir().unwrap();
        let base = RMatrixFamily::build_rational(2, 2).unwrap();
        let (cold, s) = load_or_compute(Some(dir.path()), &base).unwrap();
        assert_eq!(s, CacheState::Miss);
        let path = entry_path(dir.path(), &base.descriptor());
        let bytes = std::fs::read_to_string(&path).unwrap();
        let (warm, s) = load_or_compute(Some(dir.path()), &base).unwrap();
        assert_eq!((s, &warm), (CacheState::Hit, &cold));
        let mut v: serde_json::Value = serde_json::from_str(&bytes).unwrap();
        v["payload"]["f0"][0] = "5".into();
        std::fs::write(&path, v.to_string()).unwrap();
        let (fixed, s) = load_or_compute(Some(dir.path()), &base).unwrap();
        assert_eq!((s, &fixed), (CacheState::Corrupt, &cold));
        assert_eq!(std::fs::read_to_string(&path).unwrap(), bytes);
    }

    #[test]
    fn other_family_is_rejected() {
        let a = RMatrixFamily::build_rational(2, 2).unwrap();
        let b = RMatrixFamily::build_rational(2, 3).unwrap();
        let text = encode(&normalize(&a).unwrap());
        assert!(decode(&text, &b).is_err());
        assert_eq!(decode(&text, &a).unwrap(), normalize(&a).unwrap());
    }
}
