//! Run manifests: `key=value` lines written next to every output so a run
//! can be reproduced (same flags and seeds give byte-identical outputs).

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub struct Manifest {
    entries: Vec<(String, String)>,
    started: Instant,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        let mut m = Manifest {
            entries: Vec::new(),
            started: Instant::now(),
        };
        m.put("command", command);
        m.put("version", env!("CARGO_PKG_VERSION"));
        m
    }

    pub fn put(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    pub fn put_path(&mut self, key: &str, value: &Path) -> &mut Self {
        self.put(key, value.display())
    }

    /// Writes the manifest beside `output` as `<output>.manifest`, appending
    /// the wall-clock time of the run.
    pub fn write_beside(mut self, output: &Path) -> std::io::Result<()> {
        self.put("output", output.display());
        self.put(
            "elapsed_ms",
            format!("{:.3}", self.started.elapsed().as_secs_f64() * 1e3),
        );
        let mut text = String::new();
        for (k, v) in &self.entries {
            text.push_str(k);
            text.push('=');
            text.push_str(v);
            text.push('\n');
        }
        std::fs::write(manifest_path(output), text)
    }
}

pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest");
    output.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_sits_beside_the_output() {
        assert_eq!(
            manifest_path(Path::new("/tmp/run/net.edges")),
            PathBuf::from("/tmp/run/net.edges.manifest")
        );
    }
}
