use std::fs;
use std::path::Path;

use crate::data_io::Corpus;
use crate::error::{Error, Result};

pub const EMB1_MAGIC: &[u8; 4] = b"EMB1";
const HEADER_LEN: usize = 12;

/// Dense row-major `n × d` matrix of sentence embeddings. Row `i` belongs to
/// utterance `i` of the paired corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    n: usize,
    d: usize,
    values: Vec<f32>,
}

impl EmbeddingMatrix {
    pub fn new(n: usize, d: usize, values: Vec<f32>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::invalid(format!("embedding matrix must be non-empty (n={n}, d={d})")));
        }
        if values.len() != n * d {
            return Err(Error::invalid(format!(
                "expected {} values for {n}x{d}, got {}",
                n * d,
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!(
                "{} at (row, col) = ({}, {})",
                values[pos],
                pos / d,
                pos % d
            )));
        }
        Ok(EmbeddingMatrix { n, d, values })
    }

    pub fn from_rows<R: AsRef<[f32]>>(rows: &[R]) -> Result<Self> {
        let d = rows.first().map_or(0, |r| r.as_ref().len());
        if let Some(bad) = rows.iter().position(|r| r.as_ref().len() != d) {
            return Err(Error::invalid(format!("row {bad} has a different dimension than row 0")));
        }
        let values = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Self::new(rows.len(), d, values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f32] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f32]> {
        self.values.chunks_exact(self.d)
    }

    /// Copy with every row scaled to unit L2 norm. All-zero rows stay zero.
    pub fn l2_normalized(&self) -> Self {
        let mut values = Vec::with_capacity(self.values.len());
        for row in self.rows() {
            let norm = row.iter().map(|&v| f64::from(v) * f64::from(v)).sum::<f64>().sqrt();
            if norm > 0.0 {
                values.extend(row.iter().map(|&v| (f64::from(v) / norm) as f32));
            } else {
                values.extend_from_slice(row);
            }
        }
        EmbeddingMatrix {
            n: self.n,
            d: self.d,
            values,
        }
    }
}

pub fn encode_emb1(m: &EmbeddingMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * m.values.len());
    out.extend_from_slice(EMB1_MAGIC);
    out.extend_from_slice(&(m.n as u32).to_le_bytes());
    out.extend_from_slice(&(m.d as u32).to_le_bytes());
    for v in &m.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn write_embeddings(m: &EmbeddingMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_emb1(m)).map_err(|e| Error::io(path, e))
}

/// Decode an EMB1 buffer. When `expected_rows` is given the header row count
/// must match it.
pub fn decode_emb1(bytes: &[u8], expected_rows: Option<usize>) -> Result<EmbeddingMatrix> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::invalid(format!(
            "EMB1 header truncated: {} bytes",
            bytes.len()
        )));
    }
    if &bytes[0..4] != EMB1_MAGIC {
        return Err(Error::invalid(format!("bad magic {:?}, expected \"EMB1\"", &bytes[0..4])));
    }
    let n = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let d = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    if let Some(rows) = expected_rows {
        if n != rows {
            return Err(Error::Alignment(format!(
                "embeddings declare n={n} but the corpus has {rows} utterances"
            )));
        }
    }
    let payload = &bytes[HEADER_LEN..];
    let expected = n
        .checked_mul(d)
        .and_then(|c| c.checked_mul(4))
        .ok_or_else(|| Error::invalid(format!("EMB1 dimensions overflow: {n}x{d}")))?;
    if payload.len() < expected {
        return Err(Error::invalid(format!(
            "EMB1 payload truncated: {} of {expected} bytes for {n}x{d}",
            payload.len()
        )));
    }
    if payload.len() > expected {
        return Err(Error::invalid(format!(
            "EMB1 payload has {} trailing bytes",
            payload.len() - expected
        )));
    }
    let values = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    EmbeddingMatrix::new(n, d, values)
}

/// Read an EMB1 file aligned with `corpus`.
pub fn read_embeddings(path: impl AsRef<Path>, corpus: &Corpus) -> Result<EmbeddingMatrix> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_emb1(&bytes, Some(corpus.len())).map_err(|e| match e {
        Error::Alignment(_) => e,
        other => Error::parse(path, 0, other.to_string()),
    })
}
