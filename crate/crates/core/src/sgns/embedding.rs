//! Embedding storage, scoring, and the on-disk embedding format.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::Rng;

use crate::graph::IdMap;
use crate::rng::stream_rng;
use crate::sgns::loss::sigmoid;
use crate::{Error, Result};

/// Rng derivation tag for embedding initialization.
const INIT_TAG: u64 = 0x1217;

/// Dense row-major f32 matrix; one row per node.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    dim: usize,
    data: Vec<f32>,
}

impl Matrix {
    pub fn zeros(rows: usize, dim: usize) -> Matrix {
        Matrix { rows, dim, data: vec![0.0; rows * dim] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: u32) -> &[f32] {
        let o = i as usize * self.dim;
        &self.data[o..o + self.dim]
    }

    pub fn row_mut(&mut self, i: u32) -> &mut [f32] {
        let o = i as usize * self.dim;
        &mut self.data[o..o + self.dim]
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    /// Scales every row to unit Euclidean length (zero rows left alone).
    pub fn l2_normalize_rows(&mut self) {
        for r in 0..self.rows {
            let row = &mut self.data[r * self.dim..(r + 1) * self.dim];
            let norm = row.iter().map(|v| (*v as f64).powi(2)).sum::<f64>().sqrt();
            if norm > 0.0 {
                for v in row {
                    *v = (*v as f64 / norm) as f32;
                }
            }
        }
    }

    /// Glues two matrices column-wise: rows must match.
    pub fn hconcat(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "row mismatch in concatenation");
        let dim = self.dim + other.dim;
        let mut data = Vec::with_capacity(self.rows * dim);
        for r in 0..self.rows as u32 {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(other.row(r));
        }
        Matrix { rows: self.rows, dim, data }
    }
}

/// Dot product accumulated in f64; symmetric in its arguments bit for bit.
pub fn dot_f32(a: &[f32], b: &[f32]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| x as f64 * y as f64)
        .sum()
}

/// Source vectors Φ, plus context vectors θ when the method learns two
/// representations per node.
#[derive(Debug, Clone)]
pub struct EmbeddingSet {
    pub phi: Matrix,
    pub theta: Option<Matrix>,
}

impl EmbeddingSet {
    pub fn node_count(&self) -> usize {
        self.phi.rows()
    }

    pub fn dim(&self) -> usize {
        self.phi.dim()
    }
}

/// How a node pair is scored for link prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreMode {
    /// σ(Φ_u · Φ_v): symmetric by construction.
    SourceSource,
    /// σ(Φ_u · θ_v): direction-aware; needs context vectors.
    SourceContext,
}

/// Sigmoid-normalized pair affinity in (0, 1).
pub fn score_pair(e: &EmbeddingSet, u: u32, v: u32, mode: ScoreMode) -> Result<f64> {
    let raw = match mode {
        ScoreMode::SourceSource => dot_f32(e.phi.row(u), e.phi.row(v)),
        ScoreMode::SourceContext => {
            let theta = e.theta.as_ref().ok_or(Error::NoContextVectors)?;
            dot_f32(e.phi.row(u), theta.row(v))
        }
    };
    Ok(sigmoid(raw))
}

/// Uniform initialization in [−0.5/d, 0.5/d], the usual symmetry-breaking
/// scale for skip-gram source vectors.
pub fn init_phi(rows: usize, dim: usize, seed: u64) -> Matrix {
    let mut rng = stream_rng(seed, &[INIT_TAG]);
    let mut m = Matrix::zeros(rows, dim);
    let scale = 1.0 / dim as f64;
    for v in m.data.iter_mut() {
        *v = ((rng.gen::<f64>() - 0.5) * scale) as f32;
    }
    m
}

/// Writes the embedding file: header `node_count d`, then one line per node
/// `original_id v1 … vd` with six-significant-digit values.
pub fn write_embeddings(path: &Path, ids: &IdMap, m: &Matrix) -> Result<()> {
    let io = |e| Error::io(path, e);
    let mut out = BufWriter::new(File::create(path).map_err(io)?);
    writeln!(out, "{} {}", m.rows(), m.dim()).map_err(io)?;
    for r in 0..m.rows() as u32 {
        let mut line = String::with_capacity(m.dim() * 13 + 16);
        line.push_str(ids.original(r));
        for v in m.row(r) {
            line.push(' ');
            line.push_str(&format!("{v:.5e}"));
        }
        writeln!(out, "{line}").map_err(io)?;
    }
    out.flush().map_err(io)?;
    Ok(())
}

/// Reads an embedding file back; returns the id map in file order.
pub fn read_embeddings(path: &Path) -> Result<(IdMap, Matrix)> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(f).lines().enumerate();
    let parse_err = |line: usize, msg: String| Error::Parse { path: path.into(), line, msg };

    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty embedding file".into()))?;
    let header = header.map_err(|e| Error::io(path, e))?;
    let mut it = header.split_whitespace();
    let rows: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| parse_err(1, "bad node count".into()))?;
    let dim: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| parse_err(1, "bad dimension".into()))?;

    let mut ids = IdMap::new();
    let mut m = Matrix::zeros(rows, dim);
    let mut seen = 0usize;
    for (idx, line) in lines {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        if seen == rows {
            return Err(parse_err(idx + 1, "more rows than the header declares".into()));
        }
        let mut toks = line.split_whitespace();
        let orig = toks
            .next()
            .ok_or_else(|| parse_err(idx + 1, "missing node id".into()))?;
        let dense = ids.intern(orig);
        debug_assert_eq!(dense as usize, seen);
        let row = m.row_mut(dense);
        for k in 0..dim {
            let tok = toks
                .next()
                .ok_or_else(|| parse_err(idx + 1, format!("expected {dim} values")))?;
            row[k] = tok
                .parse()
                .map_err(|_| parse_err(idx + 1, format!("bad value {tok:?}")))?;
        }
        if toks.next().is_some() {
            return Err(parse_err(idx + 1, format!("more than {dim} values")));
        }
        seen += 1;
    }
    if seen != rows {
        return Err(parse_err(0, format!("header declares {rows} rows, found {seen}")));
    }
    Ok((ids, m))
}

/// The context-side file is the embedding path with this suffix appended.
pub fn context_path(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".ctx");
    s.into()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn init_is_bounded_and_seeded() {
        let a = init_phi(20, 8, 3);
        let b = init_phi(20, 8, 3);
        let c = init_phi(20, 8, 4);
        assert_eq!(a, b);
        assert_ne!(a, c);
        let bound = 0.5 / 8.0 + 1e-9;
        assert!(a.data().iter().all(|v| v.abs() as f64 <= bound));
        // Not suspiciously concentrated at zero.
        assert!(a.data().iter().filter(|v| v.abs() as f64 > bound / 2.0).count() > 40);
    }

    #[test]
    fn score_is_half_at_zero_dot() {
        let e = EmbeddingSet { phi: Matrix::zeros(2, 4), theta: None };
        assert_eq!(score_pair(&e, 0, 1, ScoreMode::SourceSource).unwrap(), 0.5);
    }

    #[test]
    fn source_source_scores_are_exactly_symmetric() {
        let mut phi = init_phi(6, 16, 9);
        for v in phi.data_mut() {
            *v *= 40.0; // larger dots, more rounding opportunity
        }
        let e = EmbeddingSet { phi, theta: None };
        for u in 0..6 {
            for v in 0..6 {
                let a = score_pair(&e, u, v, ScoreMode::SourceSource).unwrap();
                let b = score_pair(&e, v, u, ScoreMode::SourceSource).unwrap();
                assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }

    #[test]
    fn source_context_mode_needs_theta() {
        let e = EmbeddingSet { phi: Matrix::zeros(2, 4), theta: None };
        assert!(matches!(
            score_pair(&e, 0, 1, ScoreMode::SourceContext),
            Err(Error::NoContextVectors)
        ));
        let mut theta = Matrix::zeros(2, 4);
        theta.row_mut(1)[0] = 2.0;
        let mut phi = Matrix::zeros(2, 4);
        phi.row_mut(0)[0] = 1.0;
        let e = EmbeddingSet { phi, theta: Some(theta) };
        let fwd = score_pair(&e, 0, 1, ScoreMode::SourceContext).unwrap();
        let rev = score_pair(&e, 1, 0, ScoreMode::SourceContext).unwrap();
        assert!((fwd - sigmoid(2.0)).abs() < 1e-12);
        assert_eq!(rev, 0.5, "reverse direction uses different vectors");
    }

    #[test]
    fn normalization_and_concatenation() {
        let mut a = Matrix::zeros(2, 2);
        a.row_mut(0).copy_from_slice(&[3.0, 4.0]);
        let mut b = Matrix::zeros(2, 1);
        b.row_mut(1)[0] = 7.0;
        a.l2_normalize_rows();
        assert!((a.row(0)[0] - 0.6).abs() < 1e-7);
        assert!((a.row(0)[1] - 0.8).abs() < 1e-7);
        assert_eq!(a.row(1), &[0.0, 0.0], "zero rows stay zero");
        let c = a.hconcat(&b);
        assert_eq!(c.dim(), 3);
        assert_eq!(c.row(1), &[0.0, 0.0, 7.0]);
    }

    #[test]
    fn embedding_files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vec.txt");
        let mut ids = IdMap::new();
        for name in ["alpha", "beta", "gamma"] {
            ids.intern(name);
        }
        let mut m = Matrix::zeros(3, 2);
        m.row_mut(0).copy_from_slice(&[0.5, -1.25]);
        m.row_mut(2).copy_from_slice(&[3.0e-7, 12345.678]);
        write_embeddings(&path, &ids, &m).unwrap();

        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("3 2"));
        assert_eq!(lines.next(), Some("alpha 5.00000e-1 -1.25000e0"));

        let (rids, rm) = read_embeddings(&path).unwrap();
        assert_eq!(rids.original(0), "alpha");
        assert_eq!(rids.original(2), "gamma");
        assert_eq!(rm.row(0), &[0.5, -1.25]);
        // Six significant digits: exact for short values, ~1e-5 relative
        // error for long ones.
        assert!((rm.row(2)[1] - 12345.678).abs() < 12345.678 * 1e-5);
    }

    #[test]
    fn malformed_embedding_files_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vec.txt");
        std::fs::write(&path, "2 2\na 1.0 2.0\n").unwrap();
        assert!(read_embeddings(&path).is_err(), "missing row");
        std::fs::write(&path, "1 2\na 1.0\n").unwrap();
        assert!(read_embeddings(&path).is_err(), "short row");
        std::fs::write(&path, "1 2\na 1.0 2.0 3.0\n").unwrap();
        assert!(read_embeddings(&path).is_err(), "long row");
    }

    #[test]
    fn context_path_appends_suffix() {
        assert_eq!(
            context_path(Path::new("/tmp/emb.txt")),
            Path::new("/tmp/emb.txt.ctx")
        );
    }
}
