//! Output directory handling. Every file starts with the tool version and
//! the spec hash; CSV files carry them on a leading `#` comment line.

use crate::error::CliError;
use serde::Serialize;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub const TOOL: &str = "sqz-sta";

pub struct Artifacts {
    pub dir: PathBuf,
    pub hash: String,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    spec_hash: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

impl Artifacts {
    /// `<out_dir>/<first 16 hex digits of the hash>`, created if needed.
    pub fn create(out_dir: &Path, hash: String) -> Result<Self, CliError> {
        let dir = out_dir.join(&hash[..16]);
        std::fs::create_dir_all(&dir)?;
        Ok(Self { dir, hash })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write_csv<T: Serialize>(&self, name: &str, rows: &[T]) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        let mut out = BufWriter::new(File::create(&path)?);
        writeln!(out, "# {TOOL} {} spec_hash={}", sqzsta::VERSION, self.hash)?;
        {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(&mut out);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        out.flush()?;
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, body: &T) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        let env = Envelope { tool: TOOL, version: sqzsta::VERSION, spec_hash: &self.hash, body };
        let mut text = serde_json::to_string_pretty(&env).map_err(|e| CliError::Runtime(format!("json: {e}")))?;
        text.push('\n');
        std::fs::write(&path, text)?;
        Ok(path)
    }
}

/// Rows of a CSV written by [`Artifacts::write_csv`] (or hand-written in the same format).
pub fn read_csv<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    r.deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}
