//! Dataset manifests: a two-column CSV with header `path,label`.
//!
//! Paths are relative to the directory holding the manifest. Class ids are
//! assigned to labels in order of first appearance.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

use super::pgm::load_pgm;
use super::write_atomic;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub path: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub records: Vec<Record>,
    /// Distinct labels; the position of a label is its class id.
    pub labels: Vec<String>,
    /// Directory that relative record paths are resolved against.
    pub base_dir: PathBuf,
}

impl Manifest {
    /// Builds a manifest, ordering labels by first appearance.
    pub fn from_records(records: Vec<Record>, base_dir: impl Into<PathBuf>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyDataset("manifest has no records".into()));
        }
        let mut labels: Vec<String> = Vec::new();
        for r in &records {
            if !labels.contains(&r.label) {
                labels.push(r.label.clone());
            }
        }
        Ok(Manifest {
            records,
            labels,
            base_dir: base_dir.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Class id of every record.
    pub fn label_ids(&self) -> Vec<usize> {
        let index: HashMap<&str, usize> = self
            .labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        self.records
            .iter()
            .map(|r| index[r.label.as_str()])
            .collect()
    }

    pub fn resolve(&self, record: &Record) -> PathBuf {
        self.base_dir.join(&record.path)
    }

    /// Loads every record's image, in record order.
    pub fn load_images(&self) -> Result<Vec<Matrix>> {
        self.records
            .iter()
            .map(|r| load_pgm(self.resolve(r)))
            .collect()
    }

    /// Manifest text for the records, with paths as stored.
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::format(0, e.to_string());
        w.write_record(["path", "label"]).map_err(csv_err)?;
        for r in &self.records {
            w.write_record([&r.path, &r.label]).map_err(csv_err)?;
        }
        w.into_inner().map_err(|e| Error::format(0, e.to_string()))
    }
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<Manifest> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_manifest(&bytes, base)
}

pub fn save_manifest(path: impl AsRef<Path>, manifest: &Manifest) -> Result<()> {
    write_atomic(path.as_ref(), &manifest.to_csv()?)
}

/// Parses manifest text; `base_dir` is recorded for resolving paths.
pub fn parse_manifest(bytes: &[u8], base_dir: impl Into<PathBuf>) -> Result<Manifest> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let mut rows = reader.records();

    let located = |e: csv::Error| {
        let (offset, line) = e
            .position()
            .map_or((0, 0), |p| (p.byte() as usize, p.line()));
        Error::format(offset, format!("line {line}: {e}"))
    };

    let header = match rows.next() {
        None => return Err(Error::format(0, "missing header 'path,label'")),
        Some(r) => r.map_err(located)?,
    };
    if header.len() != 2 || &header[0] != "path" || &header[1] != "label" {
        return Err(Error::format(
            0,
            format!(
                "line 1: expected header 'path,label', found '{}'",
                header.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }

    let mut records = Vec::new();
    for row in rows {
        let row = row.map_err(located)?;
        let (offset, line) = row
            .position()
            .map_or((0, 0), |p| (p.byte() as usize, p.line()));
        if row.len() != 2 {
            return Err(Error::format(
                offset,
                format!("line {line}: expected 2 fields, found {}", row.len()),
            ));
        }
        if row[0].is_empty() || row[1].is_empty() {
            return Err(Error::format(
                offset,
                format!("line {line}: empty path or label"),
            ));
        }
        records.push(Record {
            path: row[0].to_string(),
            label: row[1].to_string(),
        });
    }
    Manifest::from_records(records, base_dir)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_in_first_appearance_order() {
        let m = parse_manifest(b"path,label\na.pgm,happy\nb.pgm,sad\nc.pgm,happy\n", "d").unwrap();
        assert_eq!(m.labels, vec!["happy", "sad"]);
        assert_eq!(m.label_ids(), vec![0, 1, 0]);
        assert_eq!(m.resolve(&m.records[1]), Path::new("d/b.pgm"));
    }

    #[test]
    fn duplicate_paths_are_kept() {
        let m = parse_manifest(b"path,label\na.pgm,x\na.pgm,x\n", "").unwrap();
        assert_eq!(m.len(), 2);
    }

    #[test]
    fn bad_column_count_names_the_line() {
        let err = parse_manifest(b"path,label\na.pgm,x\nb.pgm,y,extra\n", "")
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 3"), "{err}");
    }

    #[test]
    fn header_and_body_required() {
        assert!(matches!(parse_manifest(b"", ""), Err(Error::Format { .. })));
        assert!(matches!(
            parse_manifest(b"a.pgm,x\n", ""),
            Err(Error::Format { .. })
        ));
        assert!(matches!(
            parse_manifest(b"path,label\n", ""),
            Err(Error::EmptyDataset(_))
        ));
    }

    #[test]
    fn csv_roundtrip() {
        let m = parse_manifest(b"path,label\n\"a,1.pgm\",x\nb.pgm,y\n", "").unwrap();
        let again = parse_manifest(&m.to_csv().unwrap(), "").unwrap();
        assert_eq!(again, m);
    }
}
