//! Readers for the dataset formats used by the benchmark problems:
//! LIBSVM sparse text, MovieLens `u.data`, and idx image files.

use std::collections::HashMap;
use std::io::{BufRead, Read, Write};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// One LIBSVM line. Feature indices are 1-based and strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseExample {
    pub label: f64,
    pub features: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RatingTriple {
    pub user: u32,
    pub item: u32,
    pub rating: u8,
    pub timestamp: i64,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Parses `<label> <idx>:<val> ...` lines. Blank lines and `#` comments are skipped.
pub fn parse_libsvm<R: BufRead>(reader: R) -> Result<Vec<SparseExample>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let label_tok = tokens.next().unwrap_or_default();
        let label: f64 = label_tok
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad label '{label_tok}'")))?;
        if !label.is_finite() {
            return Err(parse_err(lineno, "label is not finite"));
        }
        let mut features = Vec::new();
        let mut last = 0usize;
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| parse_err(lineno, format!("expected idx:val, got '{tok}'")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad feature index '{idx}'")))?;
            let val: f64 = val
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad feature value '{val}'")))?;
            if idx == 0 {
                return Err(parse_err(lineno, "feature indices are 1-based"));
            }
            if idx <= last {
                return Err(parse_err(
                    lineno,
                    format!("feature index {idx} does not increase (previous {last})"),
                ));
            }
            if !val.is_finite() {
                return Err(parse_err(lineno, format!("feature {idx} is not finite")));
            }
            last = idx;
            features.push((idx, val));
        }
        out.push(SparseExample { label, features });
    }
    Ok(out)
}

/// Writes examples back in LIBSVM format; values use the shortest round-trip representation.
pub fn write_libsvm<W: Write>(examples: &[SparseExample], mut w: W) -> Result<()> {
    for ex in examples {
        write!(w, "{}", ex.label)?;
        for (i, v) in &ex.features {
            write!(w, " {i}:{v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Largest feature index over all examples.
pub fn feature_dim(examples: &[SparseExample]) -> usize {
    examples
        .iter()
        .filter_map(|e| e.features.last().map(|f| f.0))
        .max()
        .unwrap_or(0)
}

/// Dense `n × dim` design matrix.
pub fn densify(examples: &[SparseExample], dim: usize) -> Result<DenseMatrix> {
    let mut m = DenseMatrix::zeros(examples.len(), dim);
    for (r, ex) in examples.iter().enumerate() {
        for &(i, v) in &ex.features {
            if i > dim {
                return Err(Error::InvalidInput(format!(
                    "feature index {i} exceeds dimension {dim}"
                )));
            }
            m.set(r, i - 1, v);
        }
    }
    Ok(m)
}

/// Maps labels to ±1. Labels already in {−1, +1} are kept; otherwise the larger
/// of the two distinct labels becomes +1. More than two distinct labels is an error.
pub fn binarize_labels(examples: &[SparseExample]) -> Result<Vec<f64>> {
    let mut counts: HashMap<u64, (f64, usize)> = HashMap::new();
    for ex in examples {
        counts.entry(ex.label.to_bits()).or_insert((ex.label, 0)).1 += 1;
    }
    if counts.len() > 2 {
        let mut labels: Vec<(f64, usize)> = counts.into_values().collect();
        labels.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.total_cmp(&b.0)));
        return Err(Error::InvalidInput(format!(
            "binary classification needs two labels; found {} (most frequent {} and {})",
            labels.len(),
            labels[0].0,
            labels[1].0
        )));
    }
    let labels: Vec<f64> = counts.into_values().map(|v| v.0).collect();
    let all_pm = labels.iter().all(|&l| l == 1.0 || l == -1.0);
    let hi = labels.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(examples
        .iter()
        .map(|ex| {
            if all_pm {
                ex.label
            } else if ex.label == hi {
                1.0
            } else {
                -1.0
            }
        })
        .collect())
}

/// Parses MovieLens `user<TAB>item<TAB>rating<TAB>timestamp` lines.
pub fn parse_movielens<R: BufRead>(reader: R) -> Result<Vec<RatingTriple>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(parse_err(lineno, format!("expected 4 tab-separated fields, got {}", fields.len())));
        }
        let int = |k: usize, name: &str| -> Result<i64> {
            fields[k]
                .trim()
                .parse::<i64>()
                .map_err(|_| parse_err(lineno, format!("{name} '{}' is not an integer", fields[k])))
        };
        let user = int(0, "user")?;
        let item = int(1, "item")?;
        let rating = int(2, "rating")?;
        let timestamp = int(3, "timestamp")?;
        if user < 1 || user > u32::MAX as i64 || item < 1 || item > u32::MAX as i64 {
            return Err(parse_err(lineno, "user and item ids must be positive"));
        }
        if !(1..=5).contains(&rating) {
            return Err(parse_err(lineno, format!("rating {rating} outside 1..5")));
        }
        out.push(RatingTriple {
            user: user as u32,
            item: item as u32,
            rating: rating as u8,
            timestamp,
        });
    }
    Ok(out)
}

pub const IDX_IMAGE_MAGIC: u32 = 0x0000_0803;

/// Reads an idx3 image file into one row per image with pixels scaled to `[0, 1]`.
pub fn parse_idx_images<R: Read>(mut reader: R) -> Result<DenseMatrix> {
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    let word = |k: usize| -> Result<u32> {
        bytes
            .get(4 * k..4 * k + 4)
            .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
            .ok_or_else(|| Error::Format("idx header is truncated".into()))
    };
    let magic = word(0)?;
    if magic != IDX_IMAGE_MAGIC {
        return Err(Error::Format(format!(
            "bad idx magic {magic:#010x}, expected {IDX_IMAGE_MAGIC:#010x}"
        )));
    }
    let count = word(1)? as usize;
    let rows = word(2)? as usize;
    let cols = word(3)? as usize;
    let pixels = rows
        .checked_mul(cols)
        .ok_or_else(|| Error::Format("image size overflows".into()))?;
    let payload = &bytes[16..];
    let needed = count
        .checked_mul(pixels)
        .ok_or_else(|| Error::Format("payload size overflows".into()))?;
    if payload.len() < needed {
        return Err(Error::Format(format!(
            "payload truncated: {} bytes for {count} images of {rows}x{cols}",
            payload.len()
        )));
    }
    let data = payload[..needed].iter().map(|&p| p as f64 / 255.0).collect();
    DenseMatrix::new(count, pixels, data)
}
