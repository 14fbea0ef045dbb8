//! JSON-lines reading and appending.

use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum JsonlError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}:{line}: {source}")]
    Parse { path: String, line: usize, source: serde_json::Error },
}

/// Parses every non-blank line of `text`.
pub fn parse_str<T: DeserializeOwned>(text: &str, origin: &str) -> Result<Vec<T>, JsonlError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|source| JsonlError::Parse {
                path: origin.to_owned(),
                line: i + 1,
                source,
            })
        })
        .collect()
}

/// Reads a JSON-lines file. A missing file reads as empty.
///
/// A final line without a trailing newline that fails to parse is treated as
/// a torn append and skipped; any other malformed line is an error.
pub fn read<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, JsonlError> {
    let display = path.display().to_string();
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(source) => return Err(JsonlError::Io { path: display, source }),
    };
    let mut reader = BufReader::new(file);
    let mut out = Vec::new();
    let mut buf = Vec::new();
    let mut line_no = 0;
    loop {
        buf.clear();
        let n = reader
            .read_until(b'\n', &mut buf)
            .map_err(|source| JsonlError::Io { path: display.clone(), source })?;
        if n == 0 {
            break;
        }
        line_no += 1;
        let terminated = buf.ends_with(b"\n");
        if buf.iter().all(u8::is_ascii_whitespace) {
            continue;
        }
        match serde_json::from_slice(&buf) {
            Ok(v) => out.push(v),
            Err(_) if !terminated => break,
            Err(source) => return Err(JsonlError::Parse { path: display, line: line_no, source }),
        }
    }
    Ok(out)
}

/// Appends records, one per line, and syncs the file before returning.
pub fn append<T: Serialize>(path: &Path, records: &[T]) -> Result<(), JsonlError> {
    let io_err = |source| JsonlError::Io { path: path.display().to_string(), source };
    let mut file = OpenOptions::new().create(true).append(true).open(path).map_err(io_err)?;
    let mut buf = Vec::new();
    for r in records {
        serde_json::to_writer(&mut buf, r).expect("serializable record");
        buf.push(b'\n');
    }
    file.write_all(&buf).map_err(io_err)?;
    file.sync_data().map_err(io_err)
}

/// Drops a torn final line (one without a trailing newline that does not
/// parse) so the next append starts on a fresh line; a complete final line
/// just gets its newline. Returns the number of bytes removed.
pub fn repair_tail(path: &Path) -> Result<u64, JsonlError> {
    let io_err = |source| JsonlError::Io { path: path.display().to_string(), source };
    let bytes = match std::fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(0),
        Err(e) => return Err(io_err(e)),
    };
    if bytes.is_empty() || bytes.ends_with(b"\n") {
        return Ok(0);
    }
    let keep = bytes.iter().rposition(|b| *b == b'\n').map_or(0, |i| i + 1);
    if serde_json::from_slice::<serde::de::IgnoredAny>(&bytes[keep..]).is_ok() {
        let mut file = OpenOptions::new().append(true).open(path).map_err(io_err)?;
        file.write_all(b"\n").map_err(io_err)?;
        file.sync_data().map_err(io_err)?;
        return Ok(0);
    }
    let file = OpenOptions::new().write(true).open(path).map_err(io_err)?;
    file.set_len(keep as u64).map_err(io_err)?;
    file.sync_data().map_err(io_err)?;
    Ok((bytes.len() - keep) as u64)
}

/// Replaces the file contents atomically (write to a sibling, then rename).
pub fn write_all<T: Serialize>(path: &Path, records: &[T]) -> Result<(), JsonlError> {
    let mut buf = Vec::new();
    for r in records {
        serde_json::to_writer(&mut buf, r).expect("serializable record");
        buf.push(b'\n');
    }
    write_atomic(path, &buf).map_err(|source| JsonlError::Io { path: path.display().to_string(), source })
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_data()?;
    }
    std::fs::rename(tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torn_tail_is_skipped_but_middle_corruption_is_not() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("l.jsonl");
        append(&path, &[1u32, 2, 3]).unwrap();
        {
            let mut f = OpenOptions::new().append(true).open(&path).unwrap();
            f.write_all(b"{\"trunc").unwrap();
        }
        assert_eq!(read::<u32>(&path).unwrap(), vec![1, 2, 3]);

        std::fs::write(&path, "1\n{bad}\n3\n").unwrap();
        assert!(matches!(read::<u32>(&path), Err(JsonlError::Parse { line: 2, .. })));
    }

    #[test]
    fn missing_file_reads_empty() {
        let dir = tempfile::tempdir().unwrap();
        assert!(read::<u32>(&dir.path().join("none.jsonl")).unwrap().is_empty());
    }

    #[test]
    fn repaired_tail_accepts_new_appends() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("l.jsonl");
        std::fs::write(&path, "1\n2\n{\"torn").unwrap();
        assert_eq!(repair_tail(&path).unwrap(), "{\"torn".len() as u64);
        append(&path, &[3u32]).unwrap();
        assert_eq!(read::<u32>(&path).unwrap(), [1, 2, 3]);
        assert_eq!(repair_tail(&path).unwrap(), 0);
    }

    #[derive(Debug, PartialEq, serde::Serialize, serde::Deserialize)]
    struct Rec {
        key: String,
        n: u32,
    }

    proptest::proptest! {
        #[test]
        fn any_cut_keeps_exactly_the_complete_records(
            recs in proptest::collection::vec(("[a-z \"\\\\é]{0,8}", 0u32..1000), 1..6),
            frac in 0.0f64..=1.0,
        ) {
            let recs: Vec<Rec> = recs.into_iter().map(|(key, n)| Rec { key, n }).collect();
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("l.jsonl");
            append(&path, &recs).unwrap();
            let bytes = std::fs::read(&path).unwrap();
            let cut = (bytes.len() as f64 * frac) as usize;
            std::fs::write(&path, &bytes[..cut]).unwrap();
            let complete = bytes.iter().enumerate().filter(|(i, b)| **b == b'\n' && *i <= cut).count();
            let got = read::<Rec>(&path).unwrap();
            proptest::prop_assert_eq!(&got[..], &recs[..complete]);

            repair_tail(&path).unwrap();
            append(&path, &recs[complete..]).unwrap();
            proptest::prop_assert_eq!(read::<Rec>(&path).unwrap(), recs);
        }
    }
}
