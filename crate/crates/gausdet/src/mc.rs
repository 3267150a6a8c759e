//! Deterministic parallel Monte Carlo driver.
//!
//! Samples are partitioned into fixed-size chunks. Chunk `c` draws from a
//! counter-based generator: the user seed is mixed with an operation salt to
//! form the key, and `c` selects the stream. Chunk partials are combined in
//! chunk-index order, so the estimate for a given `(seed, n_samples)` is
//! identical regardless of how many workers execute the chunks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// Number of samples drawn per chunk.
pub const CHUNK_SIZE: u64 = 8192;

/// Operation salts keep streams disjoint when one seed feeds several
/// Monte Carlo routines.
pub(crate) mod salt {
    pub const CALIBRATE: u64 = 0x0001;
    pub const ACHIEVED_ALPHA: u64 = 0x0002;
    pub const ALPHA: u64 = 0x0003;
    pub const BETA: u64 = 0x0004;
    pub const BETA_IS: u64 = 0x0005;
    pub const RATIO: u64 = 0x0006;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Generator for one chunk of one operation.
pub(crate) fn chunk_rng(seed: u64, op_salt: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(op_salt)));
    rng.set_stream(chunk.wrapping_add(1));
    rng
}

/// Derives a child seed, used by scenario sweeps to give each row an
/// independent but reproducible seed.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_mul(0xa076_1d64_78bd_642f)))
}

/// Runs `f` once per chunk (in parallel) and returns the partials in chunk
/// order.
pub(crate) fn map_chunks<T, F>(n_samples: u64, seed: u64, op_salt: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    let n_chunks = n_samples.div_ceil(CHUNK_SIZE);
    (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let len = CHUNK_SIZE.min(n_samples - c * CHUNK_SIZE);
            let mut rng = chunk_rng(seed, op_salt, c);
            f(&mut rng, len)
        })
        .collect()
}

pub(crate) fn fill_standard_normal<R: Rng + ?Sized>(rng: &mut R, buf: &mut [f64]) {
    for x in buf.iter_mut() {
        *x = rng.sample(StandardNormal);
    }
}

/// Counts samples satisfying `pred` over standard-normal draws of dimension
/// `dim`.
pub(crate) fn count_hits<F>(n_samples: u64, seed: u64, op_salt: u64, dim: usize, pred: F) -> u64
where
    F: Fn(&[f64]) -> bool + Sync,
{
    map_chunks(n_samples, seed, op_salt, |rng, len| {
        let mut z = vec![0.0; dim];
        let mut hits = 0u64;
        for _ in 0..len {
            fill_standard_normal(rng, &mut z);
            if pred(&z) {
                hits += 1;
            }
        }
        hits
    })
    .into_iter()
    .sum()
}

/// Collects `statistic` over standard-normal draws, in chunk order.
pub(crate) fn collect_statistic<F>(
    n_samples: u64,
    seed: u64,
    op_salt: u64,
    dim: usize,
    statistic: F,
) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let chunks = map_chunks(n_samples, seed, op_salt, |rng, len| {
        let mut z = vec![0.0; dim];
        let mut vals = Vec::with_capacity(len as usize);
        for _ in 0..len {
            fill_standard_normal(rng, &mut z);
            vals.push(statistic(&z));
        }
        vals
    });
    let mut out = Vec::with_capacity(n_samples as usize);
    for c in chunks {
        out.extend(c);
    }
    out
}

/// Empirical `alpha`-quantile: the `ceil(alpha * n)`-th smallest value.
pub(crate) fn empirical_quantile(values: &mut [f64], alpha: f64) -> f64 {
    let n = values.len();
    debug_assert!(n > 0);
    let k = ((alpha * n as f64).ceil() as usize).clamp(1, n) - 1;
    let (_, kth, _) = values.select_nth_unstable_by(k, f64::total_cmp);
    *kth
}

/// Monte Carlo estimate of a probability.
#[derive(Debug, Clone)]
pub struct ErrorEstimate {
    /// Point estimate in `[0, 1]`.
    pub value: f64,
    /// `ln(value)`; `-inf` when no hits were observed.
    pub log_value: f64,
    pub n_samples: u64,
    /// Binomial standard error; Wilson-based when fewer than 50 hits landed
    /// on the rarer side, so the error bar stays informative in the tails.
    pub std_err: f64,
    pub seed: u64,
}

impl ErrorEstimate {
    pub(crate) fn from_hits(hits: u64, n_samples: u64, seed: u64) -> Self {
        let n = n_samples as f64;
        let value = hits as f64 / n;
        let log_value = if hits == 0 { f64::NEG_INFINITY } else { value.ln() };
        let rare = hits.min(n_samples - hits);
        let std_err = if rare >= 50 {
            (value * (1.0 - value) / n).sqrt()
        } else {
            // Wilson half-width at one sigma
            let h = hits as f64;
            (h * (n - h) / n + 0.25).sqrt() / (n + 1.0)
        };
        Self {
            value,
            log_value,
            n_samples,
            std_err,
            seed,
        }
    }

    /// CSV row `value,log_value,std_err,n_samples,seed`.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.value, self.log_value, self.std_err, self.n_samples, self.seed
        )
    }
}

/// Mean of nonnegative weights accumulated in log scale.
///
/// Suited to averages of `exp(l)` where `l` spans hundreds of nats.
#[derive(Debug, Clone)]
pub struct LogMeanEstimate {
    /// `ln` of the estimated mean; `-inf` when every weight was zero.
    pub log_value: f64,
    /// `exp(log_value)`; may underflow to zero.
    pub value: f64,
    /// Standard error of the mean (linear scale); may underflow.
    pub std_err: f64,
    /// Relative standard error, i.e. the delta-method standard error of
    /// `log_value`; `inf` when no weight landed.
    pub log_std_err: f64,
    pub n_samples: u64,
    /// Number of samples with nonzero weight.
    pub hits: u64,
    pub seed: u64,
}

/// Streaming log-sum-exp accumulator for weights `w = exp(log_w)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LogSumAcc {
    shift: f64,
    /// `sum_i exp(log_w_i - shift)`
    sum: f64,
    /// `sum_i exp(2 (log_w_i - shift))`
    sum_sq: f64,
    hits: u64,
}

impl LogSumAcc {
    pub(crate) fn new() -> Self {
        Self {
            shift: f64::NEG_INFINITY,
            sum: 0.0,
            sum_sq: 0.0,
            hits: 0,
        }
    }

    pub(crate) fn push(&mut self, log_w: f64) {
        if log_w == f64::NEG_INFINITY {
            return;
        }
        if log_w > self.shift {
            if self.shift != f64::NEG_INFINITY {
                let scale = (self.shift - log_w).exp();
                self.sum *= scale;
                self.sum_sq *= scale * scale;
            }
            self.shift = log_w;
        }
        let e = (log_w - self.shift).exp();
        self.sum += e;
        self.sum_sq += e * e;
        self.hits += 1;
    }

    pub(crate) fn merge(mut self, other: Self) -> Self {
        if other.hits == 0 {
            return self;
        }
        if self.hits == 0 {
            return other;
        }
        if other.shift > self.shift {
            let scale = (self.shift - other.shift).exp();
            self.sum = self.sum * scale + other.sum;
            self.sum_sq = self.sum_sq * scale * scale + other.sum_sq;
            self.shift = other.shift;
        } else {
            let scale = (other.shift - self.shift).exp();
            self.sum += other.sum * scale;
            self.sum_sq += other.sum_sq * scale * scale;
        }
        self.hits += other.hits;
        self
    }

    pub(crate) fn finish(self, n_samples: u64, seed: u64) -> LogMeanEstimate {
        let n = n_samples as f64;
        if self.hits == 0 {
            return LogMeanEstimate {
                log_value: f64::NEG_INFINITY,
                value: 0.0,
                std_err: 0.0,
                log_std_err: f64::INFINITY,
                n_samples,
                hits: 0,
                seed,
            };
        }
        let log_value = self.shift + (self.sum / n).ln();
        // sample variance of the weights, in shifted space
        let mean_shifted = self.sum / n;
        let var_shifted = ((self.sum_sq / n - mean_shifted * mean_shifted) * n
            / (n - 1.0).max(1.0))
        .max(0.0);
        let rel = if mean_shifted > 0.0 {
            (var_shifted / n).sqrt() / mean_shifted
        } else {
            f64::INFINITY
        };
        LogMeanEstimate {
            log_value,
            value: log_value.exp(),
            std_err: rel * log_value.exp(),
            log_std_err: rel,
            n_samples,
            hits: self.hits,
            seed,
        }
    }
}

/// Averages `exp(log_weight(z))` over standard-normal draws with streaming
/// log-sum-exp accumulation. Samples mapping to `-inf` contribute zero.
pub(crate) fn log_mean_exp<F>(
    n_samples: u64,
    seed: u64,
    op_salt: u64,
    dim: usize,
    log_weight: F,
) -> LogMeanEstimate
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let partials = map_chunks(n_samples, seed, op_salt, |rng, len| {
        let mut z = vec![0.0; dim];
        let mut acc = LogSumAcc::new();
        for _ in 0..len {
            fill_standard_normal(rng, &mut z);
            acc.push(log_weight(&z));
        }
        acc
    });
    partials
        .into_iter()
        .fold(LogSumAcc::new(), LogSumAcc::merge)
        .finish(n_samples, seed)
}
