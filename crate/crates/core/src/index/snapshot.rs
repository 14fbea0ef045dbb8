use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::docmodel::DocId;

use super::{Index, IndexConfig, IndexError, IndexedUnit};

pub const SNAPSHOT_FORMAT: &str = "greylit-index";
pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Snapshot {
    format: String,
    version: u32,
    unit_count: usize,
    config: IndexConfig,
    #[serde(default)]
    sources: Vec<DocId>,
    units: Vec<IndexedUnit>,
}

impl Index {
    pub fn to_snapshot_bytes(&self) -> Vec<u8> {
        let snap = Snapshot {
            format: SNAPSHOT_FORMAT.into(),
            version: SNAPSHOT_VERSION,
            unit_count: self.units.len(),
            config: self.config.clone(),
            sources: self.sources.iter().cloned().collect(),
            units: self.units.iter().map(|s| s.unit.clone()).collect(),
        };
        let mut bytes = serde_json::to_vec_pretty(&snap).expect("snapshot serializes");
        bytes.push(b'\n');
        bytes
    }

    /// Writes the index atomically (temp file + rename).
    pub fn snapshot(&self, path: &Path) -> Result<(), IndexError> {
        crate::jsonl::write_atomic(path, &self.to_snapshot_bytes())?;
        Ok(())
    }

    /// Replaces this empty index with the snapshot's contents, including its
    /// configuration. Postings are rebuilt in the stored unit order.
    pub fn load_bytes(&mut self, bytes: &[u8]) -> Result<(), IndexError> {
        if !self.is_empty() {
            return Err(IndexError::NotEmpty);
        }
        let snap: Snapshot =
            serde_json::from_slice(bytes).map_err(|e| IndexError::CorruptSnapshot(e.to_string()))?;
        if snap.format != SNAPSHOT_FORMAT {
            return Err(IndexError::CorruptSnapshot(format!("unexpected format `{}`", snap.format)));
        }
        if snap.version != SNAPSHOT_VERSION {
            return Err(IndexError::CorruptSnapshot(format!("unsupported version {}", snap.version)));
        }
        if snap.unit_count != snap.units.len() {
            return Err(IndexError::CorruptSnapshot(format!(
                "header says {} units, found {}",
                snap.unit_count,
                snap.units.len()
            )));
        }
        let mut fresh = Index::new(snap.config);
        for u in snap.units {
            fresh.add_unit(u).map_err(|e| IndexError::CorruptSnapshot(e.to_string()))?;
        }
        for s in snap.sources {
            fresh.register_source(s);
        }
        *self = fresh;
        Ok(())
    }

    pub fn load(&mut self, path: &Path) -> Result<(), IndexError> {
        let bytes = std::fs::read(path)?;
        self.load_bytes(&bytes)
    }

    pub fn open(path: &Path) -> Result<Index, IndexError> {
        let mut ix = Index::default();
        ix.load(path)?;
        Ok(ix)
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::unit;
    use super::*;
    use crate::docmodel::SourceType;

    fn fixture() -> Index {
        let mut ix = Index::default();
        ix.add_unit(unit("u1", "D1", SourceType::Html, "cotton area planted 1,518 ha")).unwrap();
        ix.add_unit(unit("u2", "D2", SourceType::PdfText, "cotton exports 2.3 million tonnes")).unwrap();
        ix.add_unit(unit("u3", "D2", SourceType::PdfText, "water use per hectare")).unwrap();
        ix.register_source(DocId::new("D9"));
        ix
    }

    #[test]
    fn round_trip_preserves_results() {
        let ix = fixture();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("index.json");
        ix.snapshot(&path).unwrap();
        let back = Index::open(&path).unwrap();
        for q in [&["cotton"][..], &["cotton", "exports"], &["water", "ha"]] {
            assert_eq!(back.search(q, None, 10).unwrap(), ix.search(q, None, 10).unwrap());
        }
        assert_eq!(back.sources(), ix.sources());
        assert_eq!(back.to_snapshot_bytes(), ix.to_snapshot_bytes());
    }

    #[test]
    fn truncated_and_misplaced_loads() {
        let bytes = fixture().to_snapshot_bytes();
        let mut ix = Index::default();
        assert!(matches!(ix.load_bytes(&bytes[..bytes.len() / 2]), Err(IndexError::CorruptSnapshot(_))));
        assert!(ix.is_empty());
        let mut full = fixture();
        assert!(matches!(full.load_bytes(&bytes), Err(IndexError::NotEmpty)));
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(Index::open(&dir.path().join("missing.json")), Err(IndexError::Io(_))));
    }
}
