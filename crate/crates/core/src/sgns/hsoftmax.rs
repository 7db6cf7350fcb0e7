//! Hierarchical softmax: a Huffman tree over nodes keyed by degree, turning
//! each context prediction into a short chain of sigmoid branch decisions.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::sgns::embedding::{dot_f32, Matrix};
use crate::sgns::loss::sigmoid;

/// Binary Huffman tree over `n` leaves; internal nodes carry the trainable
/// branch vectors (stored elsewhere as rows 0..n−1 of a ψ matrix).
pub struct HuffmanTree {
    /// Per leaf: internal-node indices along the root→leaf path.
    points: Vec<Vec<u32>>,
    /// Per leaf: branch bit taken at each of those internal nodes.
    bits: Vec<Vec<u8>>,
    internal_count: usize,
}

impl HuffmanTree {
    /// Standard Huffman construction: repeatedly merge the two least frequent
    /// subtrees. Ties break on the lower node id, so the tree is a pure
    /// function of the degree sequence.
    pub fn from_degrees(degrees: &[u64]) -> HuffmanTree {
        let n = degrees.len();
        if n < 2 {
            return HuffmanTree {
                points: vec![Vec::new(); n],
                bits: vec![Vec::new(); n],
                internal_count: 0,
            };
        }
        // Node ids: leaves 0..n, internals n..2n−1 in creation order.
        let mut parent = vec![0u32; 2 * n - 1];
        let mut bit = vec![0u8; 2 * n - 1];
        let mut heap: BinaryHeap<Reverse<(u64, u32)>> = degrees
            .iter()
            .enumerate()
            .map(|(i, &d)| Reverse((d, i as u32)))
            .collect();
        let mut next_internal = n as u32;
        while heap.len() > 1 {
            let Reverse((fa, a)) = heap.pop().unwrap();
            let Reverse((fb, b)) = heap.pop().unwrap();
            parent[a as usize] = next_internal;
            parent[b as usize] = next_internal;
            bit[a as usize] = 0;
            bit[b as usize] = 1;
            heap.push(Reverse((fa + fb, next_internal)));
            next_internal += 1;
        }
        let root = next_internal - 1;
        let mut points = Vec::with_capacity(n);
        let mut bits = Vec::with_capacity(n);
        for leaf in 0..n as u32 {
            let mut p = Vec::new();
            let mut b = Vec::new();
            let mut cur = leaf;
            while cur != root {
                p.push(parent[cur as usize] - n as u32);
                b.push(bit[cur as usize]);
                cur = parent[cur as usize];
            }
            p.reverse();
            b.reverse();
            points.push(p);
            bits.push(b);
        }
        HuffmanTree { points, bits, internal_count: n - 1 }
    }

    pub fn internal_count(&self) -> usize {
        self.internal_count
    }

    /// Root→leaf internal nodes and the branch bits taken at each.
    pub fn path(&self, leaf: u32) -> (&[u32], &[u8]) {
        (&self.points[leaf as usize], &self.bits[leaf as usize])
    }

    pub fn code_len(&self, leaf: u32) -> usize {
        self.points[leaf as usize].len()
    }
}

/// Probability the tree assigns to `leaf` given a source vector: the product
/// of branch probabilities σ(φ·ψ) (bit 1) or 1 − σ(φ·ψ) (bit 0) down the
/// path. Summed over all leaves this telescopes to 1.
pub fn leaf_probability(phi_row: &[f32], psi: &Matrix, tree: &HuffmanTree, leaf: u32) -> f64 {
    let (points, bits) = tree.path(leaf);
    let mut p = 1.0;
    for (&t, &b) in points.iter().zip(bits) {
        let s = sigmoid(dot_f32(phi_row, psi.row(t)));
        p *= if b == 1 { s } else { 1.0 - s };
    }
    p
}
