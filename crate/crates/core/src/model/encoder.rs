use alloc::vec;
use alloc::vec::Vec;

use super::render::Piece;

/// Maps rendered text to a fixed-width vector through a trainable table, and
/// pushes gradients back into that table.
pub trait Encoder {
    fn dim(&self) -> usize;

    /// Table rows used by `pieces`, in order.
    fn ids(&self, pieces: &[Piece]) -> Vec<usize>;

    fn encode(&self, table: &[f64], ids: &[usize]) -> Vec<f64>;

    /// Adds `d_out` back-propagated through [`Encoder::encode`] into `grad`.
    fn backward(&self, grad: &mut [f64], ids: &[usize], d_out: &[f64]);
}

/// Hashed token embeddings averaged over the sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashedMeanPool {
    pub vocab: usize,
    pub dim: usize,
}

impl Encoder for HashedMeanPool {
    fn dim(&self) -> usize {
        self.dim
    }

    fn ids(&self, pieces: &[Piece]) -> Vec<usize> {
        pieces.iter().map(|p| p.id(self.vocab)).collect()
    }

    fn encode(&self, table: &[f64], ids: &[usize]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        if ids.is_empty() {
            return out;
        }
        for &id in ids {
            let row = &table[id * self.dim..(id + 1) * self.dim];
            for (o, r) in out.iter_mut().zip(row) {
                *o += r;
            }
        }
        let n = ids.len() as f64;
        out.iter_mut().for_each(|o| *o /= n);
        out
    }

    fn backward(&self, grad: &mut [f64], ids: &[usize], d_out: &[f64]) {
        if ids.is_empty() {
            return;
        }
        let n = ids.len() as f64;
        for &id in ids {
            let row = &mut grad[id * self.dim..(id + 1) * self.dim];
            for (g, d) in row.iter_mut().zip(d_out) {
                *g += d / n;
            }
        }
    }
}
