use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::count_compositions;
use crate::{ConfusionMatrix, Error, Labeling, Result};

/// Generator behind every sampler: ChaCha with 8 rounds.
pub type SampleRng = ChaCha8Rng;

/// Seed and stream selector for a reproducible random stream.
///
/// The 64-bit seed is expanded into a ChaCha key by `rand_core`'s
/// `seed_from_u64`, and `stream_id` selects one of the 2^64 independent
/// ChaCha streams under that key. The output is identical on every platform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SamplerConfig {
    pub seed: u64,
    pub stream_id: u64,
}

impl SamplerConfig {
    pub fn new(seed: u64) -> Self {
        Self { seed, stream_id: 0 }
    }

    pub fn with_stream(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    pub fn rng(&self) -> SampleRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// Sub-stream `index` of this stream, for splitting work into chunks:
    /// stream id `(stream_id << 32) | index`. Both parts must fit in 32 bits.
    pub fn substream(&self, index: u64) -> Self {
        assert!(self.stream_id < 1 << 32 && index < 1 << 32, "sub-stream ids are limited to 32 bits each");
        Self { seed: self.seed, stream_id: (self.stream_id << 32) | index }
    }
}

/// Uniform composition of `n` into `k` nonnegative parts written to `out`.
///
/// Draws `k - 1` bar positions among `n + k - 1` slots without replacement
/// and reads the parts off as gaps between consecutive bars.
pub fn random_composition_into<R: Rng + ?Sized>(n: u64, rng: &mut R, out: &mut [u64]) {
    let k = out.len();
    assert!(k >= 1, "need at least one part");
    if k == 1 {
        out[0] = n;
        return;
    }
    let slots = n as usize + k - 1;
    let mut bars = rand::seq::index::sample(rng, slots, k - 1).into_vec();
    bars.sort_unstable();
    let mut previous = 0usize;
    for (part, &bar) in out.iter_mut().zip(&bars) {
        *part = (bar - previous) as u64;
        previous = bar + 1;
    }
    out[k - 1] = (slots - previous) as u64;
}

/// Uniform composition of `n` into `k` parts.
pub fn random_composition<R: Rng + ?Sized>(n: u64, k: usize, rng: &mut R) -> Vec<u64> {
    let mut out = vec![0; k];
    random_composition_into(n, rng, &mut out);
    out
}

/// Uniform draw from `N(r, s, n)` by rejection: a composition of `n` into
/// `rs` parts is laid out column by column and kept only if every margin is
/// positive. Also returns the number of compositions drawn.
pub fn sample_confusion_matrix<R: Rng + ?Sized>(
    r: usize,
    s: usize,
    n: u64,
    rng: &mut R,
) -> Result<(ConfusionMatrix, u64)> {
    if r == 0 || s == 0 || (r.max(s) as u64) > n {
        return Err(Error::EmptySet { r, s, n });
    }
    let mut parts = vec![0u64; r * s];
    let mut matrix = ConfusionMatrix::zeros(r, s);
    let mut attempts = 0u64;
    loop {
        attempts += 1;
        random_composition_into(n, rng, &mut parts);
        let counts = matrix.counts_mut();
        for j in 0..s {
            for i in 0..r {
                counts[i * s + j] = parts[j * r + i];
            }
        }
        matrix.refresh_margins();
        if matrix.is_canonical() {
            return Ok((matrix, attempts));
        }
    }
}

/// Size estimate of `N(r, s, n)` as `J(n, rs)` times the acceptance rate.
#[derive(Debug, Clone, PartialEq)]
pub struct CardinalityEstimate {
    /// `J(n, rs)`, the number of compositions.
    pub compositions: BigUint,
    pub accepted: u64,
    pub attempts: u64,
    pub rejection_rate: f64,
    pub estimate: f64,
    /// Binomial standard error of the estimate.
    pub std_error: f64,
}

impl CardinalityEstimate {
    pub fn from_counts(r: usize, s: usize, n: u64, accepted: u64, attempts: u64) -> Self {
        let compositions = count_compositions(n, (r * s) as u64);
        let j = compositions.to_f64().unwrap_or(f64::INFINITY);
        let rate = accepted as f64 / attempts as f64;
        let std_error = j * libm::sqrt(rate * (1.0 - rate) / attempts as f64);
        Self {
            compositions,
            accepted,
            attempts,
            rejection_rate: 1.0 - rate,
            estimate: j * rate,
            std_error,
        }
    }
}

/// Draws `samples` accepted matrices and estimates `|N(r, s, n)|`.
pub fn estimate_cardinality<R: Rng + ?Sized>(
    r: usize,
    s: usize,
    n: u64,
    samples: u64,
    rng: &mut R,
) -> Result<CardinalityEstimate> {
    if samples == 0 {
        return Err(Error::Precondition("need at least one sample"));
    }
    let mut attempts = 0;
    for _ in 0..samples {
        attempts += sample_confusion_matrix(r, s, n, rng)?.1;
    }
    Ok(CardinalityEstimate::from_counts(r, s, n, samples, attempts))
}

/// `n` independent uniform labels from `1..=r`. Some labels may not occur;
/// the resulting labeling then has fewer than `r` clusters.
pub fn null_labels<R: Rng + ?Sized>(n: usize, r: u32, rng: &mut R) -> Result<Labeling<u32>> {
    if r == 0 || n == 0 || r as usize > n {
        return Err(Error::Precondition("null labels need 1 <= r <= n"));
    }
    Labeling::new((0..n).map(|_| rng.random_range(1..=r)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_part_composition() {
        let mut rng = SamplerConfig::new(1).rng();
        assert_eq!(random_composition(9, 1, &mut rng), vec![9]);
    }

    #[test]
    fn compositions_conserve_total() {
        let mut rng = SamplerConfig::new(2).rng();
        for _ in 0..1000 {
            let c = random_composition(80, 25, &mut rng);
            assert_eq!(c.len(), 25);
            assert_eq!(c.iter().sum::<u64>(), 80);
        }
    }

    #[test]
    fn tiny_set_sampling() {
        let mut rng = SamplerConfig::new(3).rng();
        let mut diagonal = 0;
        for _ in 0..4000 {
            let (m, _) = sample_confusion_matrix(2, 2, 2, &mut rng).unwrap();
            assert!(m.is_canonical());
            if m.get(0, 0) == 1 {
                diagonal += 1;
            }
        }
        // each of the two members has probability 1/2; 4 sigma band
        assert!((diagonal as f64 - 2000.0).abs() < 4.0 * 31.7);
    }

    #[test]
    fn empty_set_is_rejected() {
        let mut rng = SamplerConfig::new(0).rng();
        assert_eq!(sample_confusion_matrix(3, 4, 3, &mut rng).unwrap_err(), Error::EmptySet { r: 3, s: 4, n: 3 });
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let draw = |cfg: SamplerConfig| random_composition(30, 6, &mut cfg.rng());
        assert_eq!(draw(SamplerConfig::with_stream(7, 1)), draw(SamplerConfig::with_stream(7, 1)));
        let a: Vec<_> = (0..8).map(|i| draw(SamplerConfig::new(7).substream(i))).collect();
        assert!(a.windows(2).any(|w| w[0] != w[1]));
    }

    #[test]
    fn null_labels_single_cluster() {
        let mut rng = SamplerConfig::new(5).rng();
        let l = null_labels(10, 1, &mut rng).unwrap();
        assert_eq!(l.cluster_count(), 1);
        assert!(null_labels(3, 4, &mut rng).is_err());
    }
}
