//! Reproducible random streams.
//!
//! Every Monte Carlo replicate draws from its own ChaCha8 stream, addressed by
//! `(seed, stream_id)` with `stream_id` equal to the replicate index. Results
//! therefore do not depend on how replicates are scheduled across threads.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// The stream `offset` positions after this one.
    pub fn offset(self, offset: u64) -> Self {
        Self {
            seed: self.seed,
            stream_id: self.stream_id.wrapping_add(offset),
        }
    }

    pub fn generator(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    pub fn std_normal_vector(&self, n: usize) -> DVector<f64> {
        std_normal_vector(n, &mut self.generator())
    }
}

pub fn std_normal_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

pub fn fill_std_normal<R: Rng + ?Sized>(out: &mut [f64], rng: &mut R) {
    for v in out {
        *v = rng.sample(StandardNormal);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_stream_same_draws() {
        let a = RngStream::new(42, 7).std_normal_vector(100);
        let b = RngStream::new(42, 7).std_normal_vector(100);
        assert_eq!(a, b);
        let c = RngStream::new(42, 8).std_normal_vector(100);
        assert_ne!(a, c);
        let d = RngStream::new(43, 7).std_normal_vector(100);
        assert_ne!(a, d);
    }

    #[test]
    fn moments() {
        let n = 100_000;
        let v = RngStream::new(1, 0).std_normal_vector(n);
        let mean = v.mean();
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 4.0 / (n as f64).sqrt(), "mean {mean}");
        assert!((var - 1.0).abs() < 0.05, "var {var}");
    }

    #[test]
    fn distinct_streams_uncorrelated() {
        let n = 100_000;
        let a = RngStream::new(1, 0).std_normal_vector(n);
        let b = RngStream::new(1, 1).std_normal_vector(n);
        let (ma, mb) = (a.mean(), b.mean());
        let cov: f64 = a.iter().zip(b.iter()).map(|(x, y)| (x - ma) * (y - mb)).sum();
        let sa: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
        let sb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
        let corr = cov / (sa * sb).sqrt();
        assert!(corr.abs() < 0.02, "corr {corr}");
    }
}
