//! Versioned model files: one JSON document with base64-encoded binary
//! matrix payloads. The header (config, scaler, provenance) stays
//! human-inspectable; weights round-trip bit-exactly.

use std::fs;
use std::path::Path;

use base64::prelude::*;
use serde::{Deserialize, Serialize};

use delay_esn::embedding::DelayWindow;
use delay_esn::linalg::{DenseMatrix, SparseMatrix, Vector};
use delay_esn::reservoir::{EsnConfig, Reservoir};
use delay_esn::training::{Scaler, ScalerKind, TrainMeta, TrainedEsn};

use crate::error::{CliError, CliResult};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct SparseBlob {
    rows: usize,
    cols: usize,
    row_ptr: String,
    col_idx: String,
    values: String,
}

#[derive(Serialize, Deserialize)]
struct DenseBlob {
    rows: usize,
    cols: usize,
    values: String,
}

#[derive(Serialize, Deserialize)]
struct ScalerBlob {
    kind: ScalerKind,
    shift: f64,
    scale: f64,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    seed: u64,
    config: EsnConfig,
    w: SparseBlob,
    w_in: DenseBlob,
    w_out: DenseBlob,
    state: String,
    scaler: ScalerBlob,
    last_window: Vec<f64>,
    meta: TrainMeta,
}

fn encode_f64(values: &[f64]) -> String {
    let mut bytes = Vec::with_capacity(values.len() * 8);
    for v in values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    BASE64_STANDARD.encode(bytes)
}

fn encode_usize(values: &[usize]) -> String {
    let mut bytes = Vec::with_capacity(values.len() * 8);
    for v in values {
        bytes.extend_from_slice(&(*v as u64).to_le_bytes());
    }
    BASE64_STANDARD.encode(bytes)
}

fn decode_f64(path: &Path, field: &str, data: &str) -> CliResult<Vec<f64>> {
    let bytes = BASE64_STANDARD
        .decode(data)
        .map_err(|e| CliError::format(path, 0, format!("{field}: {e}")))?;
    if bytes.len() % 8 != 0 {
        return Err(CliError::format(path, 0, format!("{field}: truncated payload")));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

fn decode_usize(path: &Path, field: &str, data: &str) -> CliResult<Vec<usize>> {
    let bytes = BASE64_STANDARD
        .decode(data)
        .map_err(|e| CliError::format(path, 0, format!("{field}: {e}")))?;
    if bytes.len() % 8 != 0 {
        return Err(CliError::format(path, 0, format!("{field}: truncated payload")));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()) as usize)
        .collect())
}

pub fn save_model(path: &Path, trained: &TrainedEsn) -> CliResult<()> {
    let reservoir = trained.reservoir();
    let (row_ptr, col_idx, values) = reservoir.w().csr_parts();
    let file = ModelFile {
        format_version: FORMAT_VERSION,
        seed: reservoir.config().seed,
        config: reservoir.config().clone(),
        w: SparseBlob {
            rows: reservoir.w().rows(),
            cols: reservoir.w().cols(),
            row_ptr: encode_usize(row_ptr),
            col_idx: encode_usize(col_idx),
            values: encode_f64(values),
        },
        w_in: DenseBlob {
            rows: reservoir.w_in().rows(),
            cols: reservoir.w_in().cols(),
            values: encode_f64(reservoir.w_in().as_slice()),
        },
        w_out: DenseBlob {
            rows: trained.w_out().rows(),
            cols: trained.w_out().cols(),
            values: encode_f64(trained.w_out().as_slice()),
        },
        state: encode_f64(reservoir.state().as_slice()),
        scaler: ScalerBlob {
            kind: trained.scaler().kind(),
            shift: trained.scaler().shift(),
            scale: trained.scaler().scale(),
        },
        last_window: trained.last_window().values().to_vec(),
        meta: trained.meta().clone(),
    };
    let json = serde_json::to_string_pretty(&file)
        .map_err(|e| CliError::format(path, 0, format!("serialize: {e}")))?;
    fs::write(path, json).map_err(|e| CliError::io(path, e))
}

pub fn load_model(path: &Path) -> CliResult<TrainedEsn> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let file: ModelFile = serde_json::from_str(&text)
        .map_err(|e| CliError::format(path, e.line(), format!("model JSON: {e}")))?;
    if file.format_version != FORMAT_VERSION {
        return Err(CliError::format(
            path,
            0,
            format!(
                "unsupported model format version {} (expected {FORMAT_VERSION})",
                file.format_version
            ),
        ));
    }

    let w = SparseMatrix::from_csr(
        file.w.rows,
        file.w.cols,
        decode_usize(path, "w.row_ptr", &file.w.row_ptr)?,
        decode_usize(path, "w.col_idx", &file.w.col_idx)?,
        decode_f64(path, "w.values", &file.w.values)?,
    )?;
    let w_in = DenseMatrix::new(
        file.w_in.rows,
        file.w_in.cols,
        decode_f64(path, "w_in.values", &file.w_in.values)?,
    )?;
    let w_out = DenseMatrix::new(
        file.w_out.rows,
        file.w_out.cols,
        decode_f64(path, "w_out.values", &file.w_out.values)?,
    )?;
    let state = Vector::new(decode_f64(path, "state", &file.state)?)?;

    let reservoir = Reservoir::from_parts(w, w_in, state, file.config)?;
    let scaler = Scaler::from_parts(file.scaler.kind, file.scaler.shift, file.scaler.scale)?;
    let last_window = DelayWindow::new(file.last_window)?;
    TrainedEsn::from_parts(reservoir, w_out, scaler, last_window, file.meta).map_err(CliError::from)
}
