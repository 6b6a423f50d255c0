//! Newline-delimited JSON reading and writing, with optional zstd framing
//! selected by a `.zst` file extension.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

fn is_zstd(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "zst")
}

pub fn open_reader(path: &Path) -> Result<Box<dyn BufRead>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    if is_zstd(path) {
        let decoder = zstd::Decoder::new(file).map_err(|e| Error::io(path, e))?;
        Ok(Box::new(BufReader::new(decoder)))
    } else {
        Ok(Box::new(BufReader::new(file)))
    }
}

/// Append `.zst` to a path when compression is requested.
pub fn output_path(dir: &Path, name: &str, compress: bool) -> PathBuf {
    if compress {
        dir.join(format!("{name}.zst"))
    } else {
        dir.join(name)
    }
}

pub struct JsonlWriter {
    path: PathBuf,
    inner: Box<dyn Write>,
    count: usize,
}

impl JsonlWriter {
    pub fn create(path: &Path) -> Result<Self> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
        }
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let inner: Box<dyn Write> = if is_zstd(path) {
            let enc = zstd::Encoder::new(file, 3).map_err(|e| Error::io(path, e))?;
            Box::new(enc.auto_finish())
        } else {
            Box::new(BufWriter::new(file))
        };
        Ok(Self {
            path: path.to_path_buf(),
            inner,
            count: 0,
        })
    }

    pub fn write<T: Serialize>(&mut self, record: &T) -> Result<()> {
        serde_json::to_writer(&mut self.inner, record)?;
        self.inner
            .write_all(b"\n")
            .map_err(|e| Error::io(&self.path, e))?;
        self.count += 1;
        Ok(())
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn finish(mut self) -> Result<usize> {
        self.inner.flush().map_err(|e| Error::io(&self.path, e))?;
        Ok(self.count)
    }
}

pub fn write_jsonl<'a, T: Serialize + 'a>(
    path: &Path,
    records: impl IntoIterator<Item = &'a T>,
) -> Result<usize> {
    let mut w = JsonlWriter::create(path)?;
    for r in records {
        w.write(r)?;
    }
    w.finish()
}

/// Result of a tolerant JSONL read: parsed records plus malformed line count.
#[derive(Debug)]
pub struct JsonlRead<T> {
    pub records: Vec<T>,
    pub malformed: usize,
    pub lines: usize,
}

impl<T> JsonlRead<T> {
    pub fn malformed_fraction(&self) -> f64 {
        if self.lines == 0 {
            0.0
        } else {
            self.malformed as f64 / self.lines as f64
        }
    }
}

/// Read every line, skipping (and counting) the ones that fail to parse.
pub fn read_jsonl_lenient<T: DeserializeOwned>(path: &Path) -> Result<JsonlRead<T>> {
    let reader = open_reader(path)?;
    let mut out = JsonlRead {
        records: Vec::new(),
        malformed: 0,
        lines: 0,
    };
    for line in reader.lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.lines += 1;
        match serde_json::from_str(&line) {
            Ok(r) => out.records.push(r),
            Err(err) => {
                log::warn!("{}: skipping malformed line {}: {err}", path.display(), out.lines);
                out.malformed += 1;
            }
        }
    }
    Ok(out)
}

/// Read every line; the first malformed line is an error.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let reader = open_reader(path)?;
    let mut records = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| Error::Record {
            path: path.to_path_buf(),
            line: idx + 1,
            message: e.to_string(),
        })?;
        records.push(rec);
    }
    Ok(records)
}

pub fn read_to_string(path: &Path) -> Result<String> {
    let mut s = String::new();
    open_reader(path)?
        .read_to_string(&mut s)
        .map_err(|e| Error::io(path, e))?;
    Ok(s)
}

pub fn write_json_pretty<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    std::fs::write(path, s).map_err(|e| Error::io(path, e))
}
