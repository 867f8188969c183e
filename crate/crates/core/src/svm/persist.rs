//! Model files.
//!
//! A model is stored as a small JSON document with every float written at 17
//! significant digits, so a save/load round trip reproduces decision values
//! bit for bit. Reduced models carry three extra fields naming the base
//! model they were derived from.

use std::fmt::Write as _;

use serde::Deserialize;

use super::{RbfKernel, SvmModel};
use crate::error::{Error, Result};
use crate::numfmt::fmt_exact;

const FORMAT_TAG: &str = "svmspectra-model";
const FORMAT_VERSION: u32 = 1;

/// Provenance of a rank-reduced model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionMeta {
    /// SHA-256 (hex) of the saved base model.
    pub base_hash: String,
    pub rank: usize,
    /// Indices into the base model's support vectors.
    pub retained_indices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelFile {
    pub model: SvmModel,
    pub reduction: Option<ReductionMeta>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    format: String,
    version: u32,
    gamma: f64,
    c: f64,
    bias: f64,
    training_size: usize,
    n_sv: usize,
    sv: Vec<[f64; 3]>,
    base_hash: Option<String>,
    rank: Option<usize>,
    retained_indices: Option<Vec<usize>>,
}

pub fn save_model(model: &SvmModel) -> Vec<u8> {
    save_model_file(&ModelFile {
        model: model.clone(),
        reduction: None,
    })
}

pub fn load_model(bytes: &[u8]) -> Result<SvmModel> {
    Ok(load_model_file(bytes)?.model)
}

pub fn save_model_file(file: &ModelFile) -> Vec<u8> {
    let m = &file.model;
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"format\": \"{FORMAT_TAG}\",");
    let _ = writeln!(out, "  \"version\": {FORMAT_VERSION},");
    let _ = writeln!(out, "  \"gamma\": {},", fmt_exact(m.kernel.gamma()));
    let _ = writeln!(out, "  \"c\": {},", fmt_exact(m.c));
    let _ = writeln!(out, "  \"bias\": {},", fmt_exact(m.bias));
    let _ = writeln!(out, "  \"training_size\": {},", m.training_size);
    if let Some(meta) = &file.reduction {
        let _ = writeln!(out, "  \"base_hash\": \"{}\",", meta.base_hash);
        let _ = writeln!(out, "  \"rank\": {},", meta.rank);
        let indices: Vec<String> = meta.retained_indices.iter().map(usize::to_string).collect();
        let _ = writeln!(out, "  \"retained_indices\": [{}],", indices.join(", "));
    }
    let _ = writeln!(out, "  \"n_sv\": {},", m.n_support());
    out.push_str("  \"sv\": [\n");
    let rows: Vec<String> = m
        .support_vectors
        .iter()
        .zip(&m.coeffs)
        .map(|(p, c)| {
            format!(
                "    [{}, {}, {}]",
                fmt_exact(p[0]),
                fmt_exact(p[1]),
                fmt_exact(*c)
            )
        })
        .collect();
    out.push_str(&rows.join(",\n"));
    out.push_str("\n  ]\n}\n");
    out.into_bytes()
}

pub fn load_model_file(bytes: &[u8]) -> Result<ModelFile> {
    let raw: RawModel = serde_json::from_slice(bytes).map_err(|e| Error::Parse {
        what: "byte",
        offset: byte_offset(bytes, e.line(), e.column()),
        message: e.to_string(),
    })?;
    let semantic = |message: String| Error::Parse {
        what: "byte",
        offset: 0,
        message,
    };
    if raw.format != FORMAT_TAG || raw.version != FORMAT_VERSION {
        return Err(semantic(format!(
            "unsupported model format {:?} version {}",
            raw.format, raw.version
        )));
    }
    if raw.n_sv != raw.sv.len() {
        return Err(semantic(format!(
            "n_sv is {} but {} rows are present",
            raw.n_sv,
            raw.sv.len()
        )));
    }
    let kernel = RbfKernel::new(raw.gamma).map_err(|e| semantic(e.to_string()))?;
    let model = SvmModel::new(
        raw.sv.iter().map(|r| [r[0], r[1]]).collect(),
        raw.sv.iter().map(|r| r[2]).collect(),
        raw.bias,
        kernel,
        raw.c,
        raw.training_size,
    )
    .map_err(|e| semantic(e.to_string()))?;
    let reduction = match (raw.base_hash, raw.rank, raw.retained_indices) {
        (None, None, None) => None,
        (Some(base_hash), Some(rank), Some(retained_indices)) => Some(ReductionMeta {
            base_hash,
            rank,
            retained_indices,
        }),
        _ => {
            return Err(semantic(
                "base_hash, rank and retained_indices must appear together".into(),
            ))
        }
    };
    Ok(ModelFile { model, reduction })
}

// serde_json reports 1-based line/column; turn that into a byte offset.
fn byte_offset(bytes: &[u8], line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let line_start: usize = bytes
        .split(|&b| b == b'\n')
        .take(line - 1)
        .map(|l| l.len() + 1)
        .sum();
    (line_start + column.saturating_sub(1)).min(bytes.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_model() -> SvmModel {
        SvmModel::new(
            vec![[0.1, 0.2], [0.7, 1.0 / 3.0]],
            vec![0.15, -0.15],
            -1e-7,
            RbfKernel::new(8.0).unwrap(),
            32.0,
            50,
        )
        .unwrap()
    }

    #[test]
    fn save_load_save_is_identical() {
        let bytes = save_model(&sample_model());
        let loaded = load_model(&bytes).unwrap();
        assert_eq!(loaded, sample_model());
        assert_eq!(save_model(&loaded), bytes);
    }

    #[test]
    fn truncated_file_reports_offset() {
        let bytes = save_model(&sample_model());
        let cut = &bytes[..bytes.len() / 2];
        match load_model(cut) {
            Err(Error::Parse { offset, .. }) => assert!(offset > 0 && offset <= cut.len()),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn reduction_fields_round_trip() {
        let file = ModelFile {
            model: sample_model(),
            reduction: Some(ReductionMeta {
                base_hash: "ab".repeat(32),
                rank: 2,
                retained_indices: vec![4, 9],
            }),
        };
        let bytes = save_model_file(&file);
        assert_eq!(load_model_file(&bytes).unwrap(), file);
        // a plain loader still reads the model part
        assert_eq!(load_model(&bytes).unwrap(), sample_model());
    }

    #[test]
    fn count_mismatch_is_rejected() {
        let text = String::from_utf8(save_model(&sample_model())).unwrap();
        let broken = text.replace("\"n_sv\": 2", "\"n_sv\": 3");
        assert!(matches!(load_model(broken.as_bytes()), Err(Error::Parse { .. })));
    }
}
