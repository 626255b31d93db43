//! Document and table writers. Files are written to a sibling `.partial`
//! path and renamed into place, so a reader never sees a half-written
//! document.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::{CliError, Result};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_owned(),
        source,
    }
}

pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let mut partial = path.as_os_str().to_owned();
    partial.push(".partial");
    let partial = PathBuf::from(partial);
    let mut f = fs::File::create(&partial).map_err(io_err(&partial))?;
    f.write_all(contents).map_err(io_err(&partial))?;
    f.sync_all().map_err(io_err(&partial))?;
    fs::rename(&partial, path).map_err(io_err(path))
}

pub fn to_json<T: Serialize>(doc: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(doc).map_err(flakelab::LabError::from)?;
    s.push('\n');
    Ok(s)
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| CliError::Parse {
        path: path.to_owned(),
        source,
    })
}

/// Where a command's document goes: an explicit file, a default name in the
/// output directory, or stdout.
#[derive(Debug, Clone)]
pub enum Destination {
    File(PathBuf),
    Stdout,
}

impl Destination {
    pub fn resolve(out: Option<PathBuf>, out_dir: Option<&Path>, default_name: &str) -> Self {
        match (out, out_dir) {
            (Some(p), _) => Destination::File(p),
            (None, Some(dir)) => Destination::File(dir.join(default_name)),
            (None, None) => Destination::Stdout,
        }
    }

    /// A sibling file with the given name, if the document goes to a file.
    pub fn sibling(&self, name: &str) -> Option<PathBuf> {
        match self {
            Destination::File(p) => Some(p.with_file_name(name)),
            Destination::Stdout => None,
        }
    }

    pub fn emit<T: Serialize>(&self, doc: &T) -> Result<()> {
        let text = to_json(doc)?;
        match self {
            Destination::File(p) => write_atomic(p, text.as_bytes()),
            Destination::Stdout => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())
                    .map_err(io_err(Path::new("<stdout>")))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_leaves_no_partial() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.json");
        write_atomic(&p, b"{}\n").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "{}\n");
        assert!(!dir.path().join("a.json.partial").exists());
    }

    #[test]
    fn missing_directory_is_io_error() {
        let err = write_atomic(Path::new("/nonexistent-flakelab/x.json"), b"").unwrap_err();
        assert_eq!(err.exit_code(), 4);
    }

    #[test]
    fn destination_precedence() {
        let d = Destination::resolve(Some("x.json".into()), Some(Path::new("/tmp")), "d.json");
        assert!(matches!(d, Destination::File(p) if p == Path::new("x.json")));
        let d = Destination::resolve(None, Some(Path::new("/tmp")), "d.json");
        assert!(matches!(d, Destination::File(p) if p == Path::new("/tmp/d.json")));
        assert!(matches!(Destination::resolve(None, None, "d.json"), Destination::Stdout));
    }
}
