//! Batched Monte-Carlo plumbing: execution policy, per-batch random streams
//! and a mergeable multi-channel moment accumulator.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Samples drawn per batch. Each batch owns one random stream.
pub const BATCH_SIZE: usize = 4096;

/// How batches are scheduled. `Parallel` needs the `parallel` feature and
/// otherwise runs sequentially; results are identical either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExecPolicy {
    Sequential,
    #[default]
    Parallel,
}

/// The generator for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Maps `f` over `items`, preserving order.
pub fn map_ordered<T, R, F>(items: &[T], policy: ExecPolicy, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match policy {
        #[cfg(feature = "parallel")]
        ExecPolicy::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

/// Running means and co-moments of `K` channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Accumulator<const K: usize> {
    n: u64,
    mean: [f64; K],
    comoment: [[f64; K]; K],
}

impl<const K: usize> Default for Accumulator<K> {
    fn default() -> Self {
        Self { n: 0, mean: [0.0; K], comoment: [[0.0; K]; K] }
    }
}

impl<const K: usize> Accumulator<K> {
    pub fn push(&mut self, x: &[f64; K]) {
        self.n += 1;
        let n = self.n as f64;
        let mut delta = [0.0; K];
        for i in 0..K {
            delta[i] = x[i] - self.mean[i];
            self.mean[i] += delta[i] / n;
        }
        for i in 0..K {
            for j in 0..K {
                self.comoment[i][j] += delta[i] * (x[j] - self.mean[j]);
            }
        }
    }

    /// Pairwise (Chan et al.) merge.
    pub fn merge(&mut self, other: &Self) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        let mut delta = [0.0; K];
        for i in 0..K {
            delta[i] = other.mean[i] - self.mean[i];
        }
        for i in 0..K {
            for j in 0..K {
                self.comoment[i][j] += other.comoment[i][j] + delta[i] * delta[j] * na * nb / n;
            }
        }
        for i in 0..K {
            self.mean[i] += delta[i] * nb / n;
        }
        self.n += other.n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> [f64; K] {
        self.mean
    }

    /// Covariance of the sample means, `C / (n (n-1))`.
    pub fn mean_covariance(&self) -> [[f64; K]; K] {
        let mut out = [[0.0; K]; K];
        if self.n < 2 {
            return out;
        }
        let denom = (self.n as f64) * (self.n as f64 - 1.0);
        for i in 0..K {
            for j in 0..K {
                out[i][j] = self.comoment[i][j] / denom;
            }
        }
        out
    }
}
