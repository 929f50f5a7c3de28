//! File reading with line-numbered UTF-8 errors, and atomic writes.

use std::fs;
use std::io::Write;
use std::path::Path;

use conledisco_core::{Corpus, TokenizerConfig};

use crate::error::{Error, Result};

/// Reads a UTF-8 text file as lines (without terminators). A trailing
/// newline does not produce an extra empty line.
pub fn read_lines(path: &Path) -> Result<Vec<String>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut lines = Vec::new();
    let mut body = bytes.as_slice();
    if body.last() == Some(&b'\n') {
        body = &body[..body.len() - 1];
    }
    if bytes.is_empty() {
        return Ok(lines);
    }
    for (i, raw) in body.split(|&b| b == b'\n').enumerate() {
        let raw = raw.strip_suffix(b"\r").unwrap_or(raw);
        let line = std::str::from_utf8(raw).map_err(|_| Error::InvalidUtf8 {
            path: path.to_path_buf(),
            line: i + 1,
        })?;
        lines.push(line.to_owned());
    }
    Ok(lines)
}

pub fn read_text(path: &Path) -> Result<String> {
    Ok(read_lines(path)?.join("\n"))
}

/// Loads two line-aligned files into a tokenized corpus.
pub fn load_parallel_corpus(src_path: &Path, tgt_path: &Path, options: &TokenizerConfig) -> Result<Corpus> {
    let src = read_lines(src_path)?;
    let tgt = read_lines(tgt_path)?;
    let mut corpus = Corpus::from_lines(&src, &tgt, options).map_err(|e| match e {
        conledisco_core::Error::LineCountMismatch { .. } => Error::Core {
            path: format!("{} / {}", src_path.display(), tgt_path.display()).into(),
            source: e,
        },
        other => Error::Core {
            path: src_path.to_path_buf(),
            source: other,
        },
    })?;
    corpus.metadata.source_path = src_path.display().to_string();
    corpus.metadata.target_path = tgt_path.display().to_string();
    Ok(corpus)
}

/// Writes `contents` to a temporary file next to `path`, then renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}
