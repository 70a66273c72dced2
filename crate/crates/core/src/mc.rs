//! Seeded, worker-parallel Monte Carlo plumbing.
//!
//! Worker `w` draws from the ChaCha8 stream `w` of the master seed and
//! handles a fixed contiguous share of the samples, so results depend only
//! on `(seed, workers)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub seed: u64,
    pub workers: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        Self { seed: 0, workers: 1 }
    }
}

impl McConfig {
    pub fn new(seed: u64, workers: usize) -> Self {
        Self {
            seed,
            workers: workers.max(1),
        }
    }
}

/// Independent substream for `(seed, worker)`.
pub fn substream(seed: u64, worker: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(worker);
    rng
}

/// Splits `n` samples over the workers and runs `job(rng, count)` on each
/// share in its own thread. Results come back in worker order.
pub fn run_parallel<T, F>(n: usize, cfg: &McConfig, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> T + Sync,
{
    let workers = cfg.workers.max(1);
    let shares: Vec<usize> = (0..workers).map(|w| n / workers + usize::from(w < n % workers)).collect();
    if workers == 1 {
        return vec![job(&mut substream(cfg.seed, 0), n)];
    }
    std::thread::scope(|scope| {
        let handles: Vec<_> = shares
            .iter()
            .enumerate()
            .map(|(w, &count)| {
                let job = &job;
                scope.spawn(move || job(&mut substream(cfg.seed, w as u64), count))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("Monte Carlo worker panicked")).collect()
    })
}

/// Running mean and variance of a fixed-length vector of statistics
/// (Welford, with Chan's pairwise merge).
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    n: usize,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Moments {
    pub fn new(len: usize) -> Self {
        Self {
            n: 0,
            mean: vec![0.0; len],
            m2: vec![0.0; len],
        }
    }

    pub fn push(&mut self, x: &[f64]) {
        debug_assert_eq!(x.len(), self.mean.len());
        self.n += 1;
        let n = self.n as f64;
        for ((m, s), &v) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(x) {
            let d = v - *m;
            *m += d / n;
            *s += d * (v - *m);
        }
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = other.clone();
            return;
        }
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        for i in 0..self.mean.len() {
            let d = other.mean[i] - self.mean[i];
            self.mean[i] += d * nb / n;
            self.m2[i] += other.m2[i] + d * d * na * nb / n;
        }
        self.n += other.n;
    }

    pub fn count(&self) -> usize {
        self.n
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> Vec<f64> {
        let d = (self.n.max(2) - 1) as f64;
        self.m2.iter().map(|s| s / d).collect()
    }

    /// Standard error of each mean.
    pub fn stderr(&self) -> Vec<f64> {
        let n = self.n.max(1) as f64;
        self.variance().iter().map(|v| (v / n).sqrt()).collect()
    }

    pub fn merged(parts: impl IntoIterator<Item = Moments>) -> Option<Moments> {
        parts.into_iter().reduce(|mut a, b| {
            a.merge(&b);
            a
        })
    }
}
