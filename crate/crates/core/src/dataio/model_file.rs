//! Model files: a pretty-printed JSON document tagged `mann-model/1`.
//!
//! Numbers are written in shortest round-trip form and parsed exactly, so a
//! loaded model reproduces every weight bit for bit, and saving a loaded
//! model reproduces the file byte for byte.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::ProjectionBasis;
use crate::mann::{MannConfig, MannModel};
use crate::neuralnet::Mlp;

use super::write_atomic;

pub const FORMAT_VERSION: &str = "mann-model/1";

/// How the training set was carved out of its manifest, so evaluation can
/// default to the held-out part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitParams {
    pub test_fraction: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: String,
    pub master_seed: u64,
    pub labels: Vec<String>,
    pub config: MannConfig,
    pub bases: Vec<ProjectionBasis>,
    pub snns: Vec<Mlp>,
    pub cnns: Vec<Mlp>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<SplitParams>,
}

#[derive(Deserialize)]
struct VersionProbe {
    format_version: Option<serde_json::Value>,
}

impl ModelFile {
    pub fn new(model: &MannModel, split: Option<SplitParams>) -> Self {
        ModelFile {
            format_version: FORMAT_VERSION.to_string(),
            master_seed: model.config.master_seed,
            labels: model.labels.clone(),
            config: model.config,
            bases: model.bases.clone(),
            snns: model.snns.clone(),
            cnns: model.cnns.clone(),
            split,
        }
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut out =
            serde_json::to_vec_pretty(self).map_err(|e| Error::format(0, e.to_string()))?;
        out.push(b'\n');
        Ok(out)
    }

    /// Parses and validates a model document. The version tag is checked
    /// before anything else.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let text = std::str::from_utf8(bytes)
            .map_err(|e| Error::format(e.valid_up_to(), "model file is not UTF-8"))?;
        let json_err = |e: serde_json::Error| {
            Error::format(byte_offset(text, e.line(), e.column()), e.to_string())
        };
        let probe: VersionProbe = serde_json::from_str(text).map_err(json_err)?;
        match probe.format_version {
            Some(serde_json::Value::String(v)) if v == FORMAT_VERSION => {}
            Some(other) => {
                let found = other
                    .as_str()
                    .map_or_else(|| other.to_string(), str::to_string);
                return Err(Error::Version {
                    found,
                    expected: FORMAT_VERSION.into(),
                });
            }
            None => return Err(Error::format(0, "missing format_version")),
        }
        let file: ModelFile = serde_json::from_str(text).map_err(json_err)?;
        if file.master_seed != file.config.master_seed {
            return Err(Error::format(
                0,
                "master_seed disagrees with config.master_seed",
            ));
        }
        file.model_ref()
            .validate()
            .map_err(|e| Error::format(0, format!("invalid model: {e}")))?;
        Ok(file)
    }

    fn model_ref(&self) -> MannModel {
        MannModel {
            config: self.config,
            bases: self.bases.clone(),
            snns: self.snns.clone(),
            cnns: self.cnns.clone(),
            labels: self.labels.clone(),
        }
    }

    pub fn into_model(self) -> MannModel {
        MannModel {
            config: self.config,
            bases: self.bases,
            snns: self.snns,
            cnns: self.cnns,
            labels: self.labels,
        }
    }
}

/// Byte offset of a 1-based line and column as reported by the JSON parser.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let line_start: usize = text
        .split_inclusive('\n')
        .take(line - 1)
        .map(str::len)
        .sum();
    (line_start + column.saturating_sub(1)).min(text.len())
}

pub fn save_model(model: &MannModel, path: impl AsRef<Path>) -> Result<()> {
    save_model_file(&ModelFile::new(model, None), path)
}

pub fn save_model_file(file: &ModelFile, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), &file.to_bytes()?)
}

pub fn read_model_file(path: impl AsRef<Path>) -> Result<ModelFile> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    ModelFile::from_bytes(&bytes)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<MannModel> {
    Ok(read_model_file(path)?.into_model())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_from_line_and_column() {
        let text = "ab\ncde\nf";
        assert_eq!(byte_offset(text, 1, 1), 0);
        assert_eq!(byte_offset(text, 2, 2), 4);
        assert_eq!(byte_offset(text, 3, 1), 7);
        assert_eq!(byte_offset(text, 9, 9), text.len());
    }

    #[test]
    fn version_checked_first() {
        match ModelFile::from_bytes(br#"{"format_version": "mann-model/2", "junk": 1}"#) {
            Err(Error::Version { found, .. }) => assert_eq!(found, "mann-model/2"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            ModelFile::from_bytes(br#"{"labels": []}"#),
            Err(Error::Format { .. })
        ));
        assert!(matches!(
            ModelFile::from_bytes(br#"{"format_version": "mann-model/1", "#),
            Err(Error::Format { .. })
        ));
    }
}
