//! Compact adjacency storage with original-id bookkeeping.
//!
//! Vertices get dense `u32` indices in order of first appearance in the edge
//! list; the original labels are kept so results can be written back in the
//! caller's vocabulary. Undirected graphs store every edge in both
//! orientations, so out-neighbor queries are uniform across directedness.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Bidirectional map between original vertex labels and dense indices.
#[derive(Debug, Clone, Default)]
pub struct IdMap {
    dense_to_orig: Vec<String>,
    orig_to_dense: HashMap<String, u32>,
}

impl IdMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Dense ids `"0" .. "n-1"`, for synthetic graphs.
    pub fn numeric(n: usize) -> Self {
        let mut m = Self::new();
        for i in 0..n {
            m.intern(&i.to_string());
        }
        m
    }

    /// Returns the dense index for `id`, assigning the next free one on first
    /// sight.
    pub fn intern(&mut self, id: &str) -> u32 {
        if let Some(&d) = self.orig_to_dense.get(id) {
            return d;
        }
        let d = self.dense_to_orig.len() as u32;
        self.dense_to_orig.push(id.to_string());
        self.orig_to_dense.insert(id.to_string(), d);
        d
    }

    pub fn original(&self, node: u32) -> &str {
        &self.dense_to_orig[node as usize]
    }

    pub fn dense(&self, id: &str) -> Option<u32> {
        self.orig_to_dense.get(id).copied()
    }

    pub fn len(&self) -> usize {
        self.dense_to_orig.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dense_to_orig.is_empty()
    }

    /// Writes the map as `dense original`, one vertex per line.
    pub fn write(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        for (i, orig) in self.dense_to_orig.iter().enumerate() {
            writeln!(w, "{i} {orig}").map_err(|e| Error::io(path, e))?;
        }
        Ok(())
    }
}

/// Directed or undirected graph in CSR form, without self-loops or parallel
/// edges. Neighbor lists are sorted, enabling binary-search edge lookups.
#[derive(Debug, Clone)]
pub struct Graph {
    directed: bool,
    weighted: bool,
    out_off: Vec<usize>,
    out_dst: Vec<u32>,
    out_w: Vec<f64>,
    // Incoming side; empty vectors for undirected graphs (out == in there).
    in_off: Vec<usize>,
    in_dst: Vec<u32>,
    in_w: Vec<f64>,
    ids: IdMap,
}

impl Graph {
    /// Builds a graph over `ids.len()` vertices from logical edges. For
    /// undirected graphs each `(u, v)` materializes both orientations.
    /// Self-loops are dropped; among duplicate edges the first wins.
    pub fn build(directed: bool, ids: IdMap, edges: &[(u32, u32, f64)]) -> Result<Graph> {
        let n = ids.len();
        let mut arcs: Vec<(u32, u32, f64)> = Vec::with_capacity(edges.len() * 2);
        for &(u, v, w) in edges {
            assert!((u as usize) < n && (v as usize) < n, "edge endpoint out of range");
            assert!(w.is_finite() && w >= 0.0, "edge weight must be finite and non-negative");
            if u == v {
                continue;
            }
            arcs.push((u, v, w));
            if !directed {
                arcs.push((v, u, w));
            }
        }
        // Stable sort + adjacent dedup keeps the first occurrence of each arc.
        arcs.sort_by_key(|&(u, v, _)| (u, v));
        arcs.dedup_by_key(|&mut (u, v, _)| (u, v));
        if arcs.is_empty() {
            return Err(Error::EmptyGraph);
        }

        let weighted = arcs.iter().any(|&(_, _, w)| w != 1.0);
        let mut out_off = vec![0usize; n + 1];
        for &(u, _, _) in &arcs {
            out_off[u as usize + 1] += 1;
        }
        for i in 0..n {
            out_off[i + 1] += out_off[i];
        }
        let mut out_dst = vec![0u32; arcs.len()];
        let mut out_w = vec![0f64; arcs.len()];
        let mut cursor = out_off.clone();
        for &(u, v, w) in &arcs {
            let at = cursor[u as usize];
            out_dst[at] = v;
            out_w[at] = w;
            cursor[u as usize] += 1;
        }

        let (in_off, in_dst, in_w) = if directed {
            let mut off = vec![0usize; n + 1];
            for &(_, v, _) in &arcs {
                off[v as usize + 1] += 1;
            }
            for i in 0..n {
                off[i + 1] += off[i];
            }
            let mut dst = vec![0u32; arcs.len()];
            let mut wv = vec![0f64; arcs.len()];
            let mut cur = off.clone();
            // Arcs are (u, v)-sorted, so each incoming list ends up sorted by
            // source as well.
            for &(u, v, w) in &arcs {
                let at = cur[v as usize];
                dst[at] = u;
                wv[at] = w;
                cur[v as usize] += 1;
            }
            (off, dst, wv)
        } else {
            (Vec::new(), Vec::new(), Vec::new())
        };

        Ok(Graph {
            directed,
            weighted,
            out_off,
            out_dst,
            out_w,
            in_off,
            in_dst,
            in_w,
            ids,
        })
    }

    /// Reads a whitespace-separated edge list: `src dst [weight]` per line,
    /// `#`/`%` comment lines and blank lines ignored. Vertex labels may be
    /// arbitrary whitespace-free strings.
    pub fn load_edge_list(path: &Path, directed: bool) -> Result<Graph> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let reader = BufReader::new(file);
        let mut ids = IdMap::new();
        let mut edges: Vec<(u32, u32, f64)> = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with('%') {
                continue;
            }
            let mut it = line.split_whitespace();
            let (src, dst) = match (it.next(), it.next()) {
                (Some(s), Some(d)) => (s, d),
                _ => {
                    return Err(Error::Parse {
                        path: path.into(),
                        line: idx + 1,
                        msg: format!("expected `src dst [weight]`, got `{line}`"),
                    })
                }
            };
            let weight = match it.next() {
                None => 1.0f64,
                Some(tok) => {
                    let w: f64 = tok.parse().map_err(|_| Error::Parse {
                        path: path.into(),
                        line: idx + 1,
                        msg: format!("unparseable weight `{tok}`"),
                    })?;
                    if !w.is_finite() || w < 0.0 {
                        return Err(Error::Parse {
                            path: path.into(),
                            line: idx + 1,
                            msg: format!("weight must be finite and non-negative, got `{tok}`"),
                        });
                    }
                    w
                }
            };
            if it.next().is_some() {
                return Err(Error::Parse {
                    path: path.into(),
                    line: idx + 1,
                    msg: format!("trailing tokens after `src dst weight` in `{line}`"),
                });
            }
            let u = ids.intern(src);
            let v = ids.intern(dst);
            edges.push((u, v, weight));
        }
        Graph::build(directed, ids, &edges)
    }

    pub fn node_count(&self) -> usize {
        self.out_off.len() - 1
    }

    /// Logical edge count: arc count when directed, unordered pairs when not.
    pub fn edge_count(&self) -> usize {
        if self.directed {
            self.out_dst.len()
        } else {
            self.out_dst.len() / 2
        }
    }

    /// Number of stored arcs (undirected edges count twice).
    pub fn arc_count(&self) -> usize {
        self.out_dst.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn ids(&self) -> &IdMap {
        &self.ids
    }

    pub fn out_neighbors(&self, u: u32) -> &[u32] {
        &self.out_dst[self.out_off[u as usize]..self.out_off[u as usize + 1]]
    }

    pub fn out_weights(&self, u: u32) -> &[f64] {
        &self.out_w[self.out_off[u as usize]..self.out_off[u as usize + 1]]
    }

    pub fn in_neighbors(&self, u: u32) -> &[u32] {
        if self.directed {
            &self.in_dst[self.in_off[u as usize]..self.in_off[u as usize + 1]]
        } else {
            self.out_neighbors(u)
        }
    }

    pub fn in_weights(&self, u: u32) -> &[f64] {
        if self.directed {
            &self.in_w[self.in_off[u as usize]..self.in_off[u as usize + 1]]
        } else {
            self.out_weights(u)
        }
    }

    pub fn out_degree(&self, u: u32) -> usize {
        self.out_off[u as usize + 1] - self.out_off[u as usize]
    }

    pub fn in_degree(&self, u: u32) -> usize {
        if self.directed {
            self.in_off[u as usize + 1] - self.in_off[u as usize]
        } else {
            self.out_degree(u)
        }
    }

    /// Incident-arc count: out-degree for undirected vertices, in + out for
    /// directed ones. Used as a frequency proxy by degree-biased samplers.
    pub fn total_degree(&self, u: u32) -> usize {
        if self.directed {
            self.out_degree(u) + self.in_degree(u)
        } else {
            self.out_degree(u)
        }
    }

    /// Sum of outgoing edge weights at `u`.
    pub fn weighted_out_degree(&self, u: u32) -> f64 {
        self.out_weights(u).iter().sum()
    }

    /// Sum of all stored arc weights (twice the edge-weight total for
    /// undirected graphs), i.e. the graph volume.
    pub fn volume(&self) -> f64 {
        self.out_w.iter().sum()
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.out_neighbors(u).binary_search(&v).is_ok()
    }

    pub fn edge_weight(&self, u: u32, v: u32) -> Option<f64> {
        self.out_neighbors(u)
            .binary_search(&v)
            .ok()
            .map(|i| self.out_weights(u)[i])
    }

    /// First vertex with no outgoing edge, if any. Only meaningful for
    /// directed graphs; undirected vertices always have a neighbor.
    pub fn first_dangling(&self) -> Option<u32> {
        if !self.directed {
            return None;
        }
        (0..self.node_count() as u32).find(|&u| self.out_degree(u) == 0)
    }

    /// Stored arcs in (source, target) order.
    pub fn arcs(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        (0..self.node_count() as u32).flat_map(move |u| {
            self.out_neighbors(u)
                .iter()
                .zip(self.out_weights(u))
                .map(move |(&v, &w)| (u, v, w))
        })
    }

    /// Logical edges: every arc when directed, each unordered pair once
    /// (smaller index first) when undirected.
    pub fn logical_edges(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        self.arcs()
            .filter(move |&(u, v, _)| self.directed || u < v)
    }

    /// Collapses edge directions; undirected graphs are cloned. The first
    /// orientation encountered supplies the weight of a collapsed pair.
    pub fn undirected_view(&self) -> Graph {
        if !self.directed {
            return self.clone();
        }
        let edges: Vec<(u32, u32, f64)> = self.arcs().collect();
        Graph::build(false, self.ids.clone(), &edges)
            .expect("undirected view of a non-empty graph is non-empty")
    }

    /// Writes `src dst [weight]` lines using original vertex labels.
    pub fn save_edge_list(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        for (u, v, wt) in self.logical_edges() {
            let (su, sv) = (self.ids.original(u), self.ids.original(v));
            if self.weighted {
                writeln!(w, "{su} {sv} {wt}").map_err(|e| Error::io(path, e))?;
            } else {
                writeln!(w, "{su} {sv}").map_err(|e| Error::io(path, e))?;
            }
        }
        Ok(())
    }
}
