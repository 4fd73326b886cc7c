//! Downloads SuiteSparse matrices into a local cache.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::Duration;

const BASE: &str = "https://sparse.tamu.edu/MM";
const TIMEOUT: Duration = Duration::from_secs(300);

/// Collection groups of the matrices used in the experiments.
const GROUPS: &[(&str, &str)] = &[
    ("bfwa782", "Bai"),
    ("bfwb782", "Bai"),
    ("dw4096", "Bai"),
    ("rdb3200l", "Bai"),
    ("utm1700b", "TOKAMAK"),
    ("wang1", "Wang"),
];

pub fn known_group(name: &str) -> Option<&'static str> {
    GROUPS.iter().find(|(n, _)| *n == name).map(|(_, g)| *g)
}

/// `$DISKEIG_CACHE_DIR`, else `~/.cache/diskeig`.
pub fn cache_dir() -> PathBuf {
    if let Some(d) = std::env::var_os("DISKEIG_CACHE_DIR") {
        return PathBuf::from(d);
    }
    let home = std::env::var_os("HOME").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
    home.join(".cache").join("diskeig")
}

pub fn cached_path(name: &str) -> PathBuf {
    cache_dir().join(format!("{name}.mtx"))
}

/// Returns the cached Matrix Market file, downloading it on a miss.
pub fn fetch(name: &str, group: Option<&str>) -> Result<PathBuf, String> {
    let dest = cached_path(name);
    if dest.exists() {
        return Ok(dest);
    }
    let group = group
        .or_else(|| known_group(name))
        .ok_or_else(|| format!("unknown collection group for {name}; pass --group"))?;
    let url = format!("{BASE}/{group}/{name}.tar.gz");
    let agent: ureq::Agent = ureq::Agent::config_builder().timeout_global(Some(TIMEOUT)).build().into();
    let resp = agent.get(&url).call().map_err(|e| format!("{url}: {e}"))?;
    let reader = resp.into_body().into_reader();
    let text = extract_mtx(reader, name)?;
    store(&dest, &text)?;
    Ok(dest)
}

fn extract_mtx(reader: impl Read, name: &str) -> Result<Vec<u8>, String> {
    let mut archive = tar::Archive::new(flate2::read::GzDecoder::new(reader));
    let want = format!("{name}.mtx");
    for entry in archive.entries().map_err(|e| e.to_string())? {
        let mut entry = entry.map_err(|e| e.to_string())?;
        let path = entry.path().map_err(|e| e.to_string())?.into_owned();
        if path.file_name().is_some_and(|f| f == want.as_str()) {
            let mut buf = Vec::new();
            entry.read_to_end(&mut buf).map_err(|e| e.to_string())?;
            return Ok(buf);
        }
    }
    Err(format!("archive has no {want}"))
}

fn store(dest: &Path, bytes: &[u8]) -> Result<(), String> {
    let dir = dest.parent().unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
    // write then rename so an interrupted download leaves no partial file
    let tmp = dest.with_extension("mtx.part");
    std::fs::write(&tmp, bytes).map_err(|e| e.to_string())?;
    std::fs::rename(&tmp, dest).map_err(|e| e.to_string())
}
