//! Output to stdout or to a file replaced atomically on commit.

use std::io::{self, BufWriter, Stdout, Write};
use std::path::Path;

use tempfile::NamedTempFile;

pub enum Sink {
    Stdout(BufWriter<Stdout>),
    File {
        tmp: BufWriter<NamedTempFile>,
        target: std::path::PathBuf,
    },
}

impl Sink {
    pub fn open(path: Option<&Path>) -> io::Result<Sink> {
        Ok(match path {
            None => Sink::Stdout(BufWriter::new(io::stdout())),
            Some(p) => {
                let dir = match p.parent() {
                    Some(d) if !d.as_os_str().is_empty() => d,
                    _ => Path::new("."),
                };
                Sink::File {
                    tmp: BufWriter::new(NamedTempFile::new_in(dir)?),
                    target: p.to_path_buf(),
                }
            }
        })
    }

    /// Flushes and, for files, renames the temporary into place.
    pub fn commit(self) -> io::Result<()> {
        match self {
            Sink::Stdout(mut w) => w.flush(),
            Sink::File { tmp, target } => {
                let tmp = tmp.into_inner().map_err(|e| e.into_error())?;
                tmp.persist(&target).map_err(|e| e.error)?;
                Ok(())
            }
        }
    }
}

impl Write for Sink {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        match self {
            Sink::Stdout(w) => w.write(buf),
            Sink::File { tmp, .. } => tmp.write(buf),
        }
    }

    fn flush(&mut self) -> io::Result<()> {
        match self {
            Sink::Stdout(w) => w.flush(),
            Sink::File { tmp, .. } => tmp.flush(),
        }
    }
}
