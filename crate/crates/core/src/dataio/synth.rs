//! Synthetic labelled images with orientation-specific structure.
//!
//! Every class prototype is `0.5` plus up to four separable patterns, one per
//! family:
//!
//! * column family: `w_k(i) * h(j)`, varying down the rows;
//! * row family: `h(i) * w_k(j)`, varying across the columns;
//! * diagonal family: `w_k(i) * cos(4π (j - i) / cols)`, constant along
//!   wrapped diagonals up to the row factor;
//! * block family: left and right halves each `w_k(i) * (-1)^j`.
//!
//! `w_k` is Walsh function `k` of length 16 (Sylvester order, stretched to the
//! image size) and `h = w_8` is `+1` on the first half and `-1` on the second.
//! The factors `h`, the diagonal cosine and the block alternation are each the
//! dominant image-covariance axis of exactly one orientation, so with one axis
//! per orientation each orientation sees only its own family. For the first
//! six classes each family gives the same code to one pair of classes:
//!
//! | orientation | classes it cannot separate |
//! |-------------|----------------------------|
//! | column      | 0 and 1                    |
//! | row         | 2 and 3                    |
//! | diagonal    | 4 and 5                    |
//! | block       | 1 and 2                    |
//!
//! so no single orientation separates all six classes, but together they do.
//! Classes beyond six use all four families with distinct Walsh indices.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::Rng;

use super::manifest::{save_manifest, Manifest, Record};
use super::pgm::save_pgm;

/// Pattern amplitudes for the column, row, diagonal and block families.
///
/// The diagonal and block factors carry less energy per pixel than `h`, so
/// their amplitudes are raised to keep each family's axis dominant.
pub const AMPLITUDES: [f64; 4] = [0.08, 0.08, 0.122, 0.095];

/// Walsh indices usable for the extra classes, per family.
const COL_CANDIDATES: [usize; 14] = [1, 2, 3, 4, 5, 6, 7, 9, 10, 11, 12, 13, 14, 15];
const ROW_CANDIDATES: [usize; 8] = [2, 3, 10, 11, 12, 13, 14, 15];
const DIAG_CANDIDATES: [usize; 11] = [0, 1, 2, 3, 4, 5, 6, 7, 9, 10, 11];
const BLOCK_CANDIDATES: [usize; 15] = [0, 1, 2, 3, 4, 5, 6, 7, 9, 10, 11, 12, 13, 14, 15];

/// Images with class ids and class names.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub images: Vec<Matrix>,
    pub labels: Vec<usize>,
    pub label_names: Vec<String>,
}

type Term = Option<(usize, f64)>;

/// Walsh index and sign per family; the block family has one per half.
#[derive(Debug, Clone, Copy)]
struct ClassCode {
    col: Term,
    row: Term,
    diag: Term,
    block: Option<((usize, f64), (usize, f64))>,
}

const fn code(
    col: Term,
    row: Term,
    diag: Term,
    block: Option<((usize, f64), (usize, f64))>,
) -> ClassCode {
    ClassCode {
        col,
        row,
        diag,
        block,
    }
}

const BASE_CODES: [ClassCode; 6] = [
    code(
        None,
        Some((11, 1.0)),
        Some((11, 1.0)),
        Some(((0, 1.0), (0, 1.0))),
    ),
    code(None, Some((11, -1.0)), Some((11, -1.0)), None),
    code(Some((9, 1.0)), None, Some((9, 1.0)), None),
    code(
        Some((9, -1.0)),
        None,
        Some((9, -1.0)),
        Some(((0, -1.0), (0, -1.0))),
    ),
    code(
        Some((12, 1.0)),
        Some((13, 1.0)),
        None,
        Some(((10, 1.0), (10, -1.0))),
    ),
    code(
        Some((12, -1.0)),
        Some((13, -1.0)),
        None,
        Some(((10, -1.0), (10, 1.0))),
    ),
];

fn class_code(c: usize) -> Result<ClassCode> {
    if let Some(code) = BASE_CODES.get(c) {
        return Ok(*code);
    }
    let mut t = c - BASE_CODES.len();
    let mut digit = |cands: &[usize]| {
        let k = cands[t % cands.len()];
        t /= cands.len();
        k
    };
    let col = digit(&COL_CANDIDATES);
    let row = digit(&ROW_CANDIDATES);
    let diag = digit(&DIAG_CANDIDATES);
    let blk = digit(&BLOCK_CANDIDATES);
    if t > 0 {
        return Err(Error::param(format!(
            "too many synthetic classes: {}",
            c + 1
        )));
    }
    Ok(code(
        Some((col, 1.0)),
        Some((row, 1.0)),
        Some((diag, 1.0)),
        Some(((blk, 1.0), (blk, 1.0))),
    ))
}

/// Walsh function `k` of length 16 sampled at position `j` of `n`.
fn walsh(k: usize, j: usize, n: usize) -> f64 {
    let x = j * 16 / n;
    if (k & x).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

const HALVES: usize = 8;

/// Noise-free prototype of class `c`.
pub fn prototype(c: usize, rows: usize, cols: usize) -> Result<Matrix> {
    if rows < 2 || cols < 2 {
        return Err(Error::param(format!(
            "synthetic images need at least 2x2 pixels, got {rows}x{cols}"
        )));
    }
    let code = class_code(c)?;
    let [ac, ar, ad, ab] = AMPLITUDES;
    let left = cols / 2;
    Ok(Matrix::from_fn(rows, cols, |i, j| {
        let mut v = 0.5;
        if let Some((k, s)) = code.col {
            v += ac * s * walsh(k, i, rows) * walsh(HALVES, j, cols);
        }
        if let Some((k, s)) = code.row {
            v += ar * s * walsh(HALVES, i, rows) * walsh(k, j, cols);
        }
        if let Some((k, s)) = code.diag {
            let shift = (j + cols - i % cols) % cols;
            let wave = (2.0 * PI * 2.0 * shift as f64 / cols as f64).cos();
            v += ad * s * walsh(k, i, rows) * wave;
        }
        if let Some(((kl, sl), (kr, sr))) = code.block {
            let (k, s, jj) = if j < left {
                (kl, sl, j)
            } else {
                (kr, sr, j - left)
            };
            let alt = if jj % 2 == 0 { 1.0 } else { -1.0 };
            v += ab * s * walsh(k, i, rows) * alt;
        }
        v
    }))
}

/// `per_class` noisy samples of each of `classes` prototypes.
///
/// Samples are generated class by class; each pixel gets independent uniform
/// noise on `[-noise, noise)` and is clamped to `[0, 1]`. Class `c` is named
/// `class{c}`.
pub fn synth_dataset(
    classes: usize,
    per_class: usize,
    image_size: (usize, usize),
    seed: u64,
    noise: f64,
) -> Result<Dataset> {
    if classes < 2 {
        return Err(Error::param(format!(
            "need at least 2 classes, got {classes}"
        )));
    }
    if per_class == 0 {
        return Err(Error::param("per_class must be at least 1"));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::param(format!(
            "noise must be non-negative, got {noise}"
        )));
    }
    let (rows, cols) = image_size;
    let protos = (0..classes)
        .map(|c| prototype(c, rows, cols))
        .collect::<Result<Vec<_>>>()?;
    let mut rng = Rng::new(seed);
    let mut images = Vec::with_capacity(classes * per_class);
    let mut labels = Vec::with_capacity(classes * per_class);
    for (c, proto) in protos.iter().enumerate() {
        for _ in 0..per_class {
            let mut data = proto.clone().into_vec();
            for v in &mut data {
                *v = (*v + rng.uniform(-noise, noise)).clamp(0.0, 1.0);
            }
            images.push(Matrix::new(rows, cols, data)?);
            labels.push(c);
        }
    }
    Ok(Dataset {
        images,
        labels,
        label_names: (0..classes).map(|c| format!("class{c}")).collect(),
    })
}

/// Writes every image as an 8-bit PGM under `dir` plus `manifest.csv`, and
/// returns the manifest path.
pub fn write_dataset(dir: impl AsRef<Path>, data: &Dataset) -> Result<PathBuf> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut counts = vec![0usize; data.label_names.len()];
    let mut records = Vec::with_capacity(data.images.len());
    for (img, &c) in data.images.iter().zip(&data.labels) {
        let name = format!("{}_{:04}.pgm", data.label_names[c], counts[c]);
        counts[c] += 1;
        save_pgm(dir.join(&name), img)?;
        records.push(Record {
            path: name,
            label: data.label_names[c].clone(),
        });
    }
    let manifest = Manifest::from_records(records, dir)?;
    let path = dir.join("manifest.csv");
    save_manifest(&path, &manifest)?;
    Ok(path)
}
