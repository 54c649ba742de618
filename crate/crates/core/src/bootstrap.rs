//! Pairs bootstrap of lasso p-value sequences.
//!
//! Each resample draws `n` rows with replacement, re-estimates the full-model
//! error scale, traces the lasso path and records the spacing-test p-value at
//! each entry step. The summary reports, per step `k`, how many resamples keep
//! every p-value up to `k` below the threshold and the median p-value at `k`.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::lasso::{lasso_pvalue_sequence, Reference};
use crate::linmodel::sigma_full;
use crate::rng::RngStream;
use crate::stats::median;

/// Redraws allowed per resample when the resampled full design is singular.
pub const MAX_RESAMPLE_RETRIES: usize = 10;

/// Largest `k` such that the first `k` p-values are all below `threshold`.
pub fn estimated_model_size(pvalues: &[f64], threshold: f64) -> usize {
    pvalues.iter().take_while(|&&p| p < threshold).count()
}

#[derive(Debug, Clone)]
pub struct BootstrapConfig {
    pub resamples: usize,
    pub threshold: f64,
    pub steps: usize,
    pub reference: Reference,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            resamples: 1000,
            threshold: 0.05,
            steps: 8,
            reference: Reference::F2DfErr,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapSummary {
    pub steps: usize,
    pub cumulative_counts: Vec<usize>,
    pub median_pvalues: Vec<f64>,
    pub resamples: usize,
    pub threshold: f64,
    pub seed: u64,
    /// Resamples that had to be redrawn because of a singular design.
    pub redraws: usize,
    /// Per-resample p-value sequences, truncated or padded to `steps`.
    #[serde(skip)]
    pub sequences: Vec<Vec<f64>>,
}

/// Aggregates per-resample sequences (each of length `steps`).
pub fn summarize(sequences: &[Vec<f64>], steps: usize, threshold: f64) -> (Vec<usize>, Vec<f64>) {
    let mut counts = vec![0usize; steps];
    for seq in sequences {
        for c in counts.iter_mut().take(estimated_model_size(seq, threshold).min(steps)) {
            *c += 1;
        }
    }
    let medians = (0..steps)
        .map(|k| {
            let mut col: Vec<f64> = sequences.iter().map(|s| s[k]).collect();
            median(&mut col)
        })
        .collect();
    (counts, medians)
}

/// One resample's p-value sequence. Steps without a test (past the end of
/// the path, or the last entry) count as `1.0`.
fn resample_sequence(dataset: &Dataset, config: &BootstrapConfig, stream: RngStream) -> Result<(Vec<f64>, usize)> {
    let n = dataset.n();
    let mut rng = stream.generator();
    let mut rows = vec![0usize; n];
    for attempt in 0..=MAX_RESAMPLE_RETRIES {
        rows.iter_mut().for_each(|r| *r = rng.gen_range(0..n));
        let resampled = dataset.select_rows(&rows)?;
        let sigma = match sigma_full(&resampled) {
            Ok(s) => s,
            Err(Error::RankDeficient { .. } | Error::DegenerateSigma) => continue,
            Err(e) => return Err(e),
        };
        let seq = match lasso_pvalue_sequence(&resampled, &sigma, config.reference) {
            Ok(s) => s,
            Err(Error::RankDeficient { .. }) => continue,
            Err(e) => return Err(e),
        };
        let mut out: Vec<f64> = seq.iter().map(|s| s.p_value.unwrap_or(1.0)).collect();
        out.resize(config.steps, 1.0);
        out.truncate(config.steps);
        return Ok((out, attempt));
    }
    Err(Error::TooManyRedraws {
        what: "bootstrap resample",
        attempts: MAX_RESAMPLE_RETRIES + 1,
    })
}

/// Resample `b` uses stream `(seed, b)`; the result does not depend on the
/// thread count.
pub fn run_bootstrap(dataset: &Dataset, config: &BootstrapConfig) -> Result<BootstrapSummary> {
    if config.resamples == 0 {
        return Err(Error::InvalidArgument("bootstrap needs at least one resample".into()));
    }
    if config.steps == 0 {
        return Err(Error::InvalidArgument("bootstrap needs at least one step".into()));
    }
    if !(config.threshold > 0.0 && config.threshold <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "threshold must lie in (0, 1], got {}",
            config.threshold
        )));
    }
    let results: Vec<(Vec<f64>, usize)> = (0..config.resamples as u64)
        .into_par_iter()
        .map(|b| resample_sequence(dataset, config, RngStream::new(config.seed, b)))
        .collect::<Result<_>>()?;
    let redraws = results.iter().map(|(_, r)| r).sum();
    let sequences: Vec<Vec<f64>> = results.into_iter().map(|(s, _)| s).collect();
    let (cumulative_counts, median_pvalues) = summarize(&sequences, config.steps, config.threshold);
    Ok(BootstrapSummary {
        steps: config.steps,
        cumulative_counts,
        median_pvalues,
        resamples: config.resamples,
        threshold: config.threshold,
        seed: config.seed,
        redraws,
        sequences,
    })
}
