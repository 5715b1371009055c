//! Source checksums recorded in output manifests.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use markermine::Error;
use sha2::{Digest, Sha256};

pub fn sha256_file(path: &Path) -> Result<String, Error> {
    let mut file = File::open(path).map_err(|e| Error::io(format!("opening {}", path.display()), e))?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = file
            .read(&mut buf)
            .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

/// Checksums keyed by file name, so manifests do not depend on where the
/// inputs live. Repeated names get a `#n` suffix.
pub fn source_checksums<'a, I>(paths: I) -> Result<BTreeMap<String, String>, Error>
where
    I: IntoIterator<Item = &'a Path>,
{
    let mut out = BTreeMap::new();
    for path in paths {
        let name = path
            .file_name()
            .map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
        let mut key = name.clone();
        let mut n = 1;
        while out.contains_key(&key) {
            n += 1;
            key = format!("{name}#{n}");
        }
        out.insert(key, sha256_file(path)?);
    }
    Ok(out)
}
