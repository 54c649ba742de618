//! Simulation checks for the null laws behind the selection tests.
//!
//! * spacing: `|z|_(j) (|z|_(j) - |z|_(j+1))` against `Exp(mean 1/j)`;
//! * lemma2: `t_max (t_max - t_2nd)` with estimated `sigma_hat` against
//!   `F(2, n - p - 1)` on orthonormal designs;
//! * selection: `max_j z_j^2` against the law of the maximum of `p`
//!   independent chi-square(1) variables.
//!
//! Replicate `r` draws from stream `(seed, r)`; fixed designs come from a
//! dedicated stream so they do not overlap any replicate.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::dists::{chisq1_survival, f_cdf, max_chisq1_survival, ExpLaw};
use crate::error::{Error, Result};
use crate::linalg::Qr;
use crate::rng::{std_normal_vector, RngStream};
use crate::stats::{ks_distance, mean, median};

const DESIGN_STREAM: u64 = u64::MAX;
const MIN_REPLICATES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NullMode {
    Spacing,
    Lemma2,
    Selection,
}

impl std::str::FromStr for NullMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spacing" => Ok(NullMode::Spacing),
            "lemma2" => Ok(NullMode::Lemma2),
            "selection" => Ok(NullMode::Selection),
            other => Err(Error::InvalidArgument(format!(
                "unknown mode `{other}` (expected spacing, lemma2 or selection)"
            ))),
        }
    }
}

/// How the z-statistics of the spacing simulation are generated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZDesign {
    /// `z ~ N(0, I_p)` directly, no design matrix.
    Iid,
    /// `z = Qᵀ y` for a fixed `n x p` orthonormal `Q`.
    Orthonormal { n: usize },
    /// `z = Xᵀ y` for fixed unit-norm columns `sqrt(rho) g + sqrt(1 - rho) e_j`.
    Equicorrelated { n: usize, rho: f64 },
}

impl ZDesign {
    /// `rho = 0` gives an orthonormal design when `n >= p` and i.i.d.
    /// statistics otherwise; `rho > 0` requires `n`.
    pub fn from_flags(n: Option<usize>, p: usize, rho: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&rho) {
            return Err(Error::InvalidArgument(format!("rho must lie in [0, 1), got {rho}")));
        }
        match (n, rho > 0.0) {
            (Some(0), _) => Err(Error::InvalidArgument("n must be positive".into())),
            (Some(n), true) => Ok(ZDesign::Equicorrelated { n, rho }),
            (None, true) => Err(Error::InvalidArgument("an equicorrelated design needs n".into())),
            (Some(n), false) if n >= p => Ok(ZDesign::Orthonormal { n }),
            _ => Ok(ZDesign::Iid),
        }
    }

    fn n(&self) -> Option<usize> {
        match *self {
            ZDesign::Iid => None,
            ZDesign::Orthonormal { n } | ZDesign::Equicorrelated { n, .. } => Some(n),
        }
    }

    fn rho(&self) -> f64 {
        match *self {
            ZDesign::Equicorrelated { rho, .. } => rho,
            _ => 0.0,
        }
    }

    fn label(&self) -> &'static str {
        match self {
            ZDesign::Iid => "iid_z",
            ZDesign::Orthonormal { .. } => "orthonormal",
            ZDesign::Equicorrelated { .. } => "equicorrelated",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NullSimReport {
    pub mode: NullMode,
    pub design: String,
    pub n: Option<usize>,
    pub p: usize,
    pub rho: f64,
    pub step: Option<usize>,
    pub replicates: usize,
    pub ks_distance: f64,
    pub empirical_mean: f64,
    pub empirical_median: f64,
    pub reference: String,
    /// Mean of the reference law, where it has a simple closed form.
    pub reference_mean: Option<f64>,
    /// Smallest gap between the empirical exceedance and the chi-square(1)
    /// exceedance over a grid (selection mode only).
    pub dominance_margin: Option<f64>,
    #[serde(skip)]
    pub sample: Vec<f64>,
}

/// Fixed `n x p` matrix with orthonormal columns.
pub fn orthonormal_columns(n: usize, p: usize, stream: RngStream) -> Result<DMatrix<f64>> {
    let mut rng = stream.generator();
    let g = DMatrix::from_fn(n, p, |_, _| rand::Rng::sample(&mut rng, rand_distr::StandardNormal));
    Qr::new(&g).map(|qr| qr.q().clone()).map_err(|e| Error::RankDeficient {
        column: format!("random column {}", e.column),
    })
}

/// Unit-norm columns `sqrt(rho) g + sqrt(1 - rho) e_j` with shared `g`.
pub fn equicorrelated_columns(n: usize, p: usize, rho: f64, stream: RngStream) -> DMatrix<f64> {
    let mut rng = stream.generator();
    let g = std_normal_vector(n, &mut rng);
    let mut x = DMatrix::zeros(n, p);
    for j in 0..p {
        let e = std_normal_vector(n, &mut rng);
        let mut col = &g * rho.sqrt() + e * (1.0 - rho).sqrt();
        let norm = col.norm();
        col /= norm;
        x.set_column(j, &col);
    }
    x
}

/// `|z|_(j) (|z|_(j) - |z|_(j+1))` for 1-based `j`, scaled by `1 / sigma^2`.
pub fn spacing_from_z(z: &mut [f64], j: usize, sigma: f64) -> f64 {
    for v in z.iter_mut() {
        *v = v.abs();
    }
    // Only the top j + 1 order statistics matter.
    z.select_nth_unstable_by(j, |a, b| b.total_cmp(a));
    let (head, tail) = z.split_at_mut(j);
    let next = tail[0];
    head.sort_unstable_by(|a, b| b.total_cmp(a));
    let zj = head[j - 1];
    (zj * (zj - next) / (sigma * sigma)).max(0.0)
}

fn check_replicates(replicates: usize) -> Result<()> {
    if replicates < MIN_REPLICATES {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_REPLICATES} replicates, got {replicates}"
        )));
    }
    Ok(())
}

pub fn simulate_spacing_null(
    design: ZDesign,
    p: usize,
    j: usize,
    replicates: usize,
    rng: RngStream,
) -> Result<NullSimReport> {
    check_replicates(replicates)?;
    if j == 0 || j + 1 > p {
        return Err(Error::InvalidArgument(format!(
            "spacing statistic at step {j} needs p >= {} (p = {p})",
            j + 1
        )));
    }
    let fixed: Option<DMatrix<f64>> = match design {
        ZDesign::Iid => None,
        ZDesign::Orthonormal { n } => {
            if n < p {
                return Err(Error::InvalidArgument(format!(
                    "orthonormal design needs n >= p ({n} < {p})"
                )));
            }
            Some(orthonormal_columns(n, p, RngStream::new(rng.seed, DESIGN_STREAM))?)
        }
        ZDesign::Equicorrelated { n, rho } => Some(equicorrelated_columns(
            n,
            p,
            rho,
            RngStream::new(rng.seed, DESIGN_STREAM),
        )),
    };

    let mut sample: Vec<f64> = (0..replicates as u64)
        .into_par_iter()
        .map(|r| {
            let stream = rng.offset(r);
            let mut z: Vec<f64> = match &fixed {
                None => stream.std_normal_vector(p).data.into(),
                Some(x) => {
                    let y = stream.std_normal_vector(x.nrows());
                    x.tr_mul(&y).data.into()
                }
            };
            spacing_from_z(&mut z, j, 1.0)
        })
        .collect();

    let law = ExpLaw::new(1.0 / j as f64).expect("positive mean");
    let empirical_mean = mean(&sample);
    let ks = ks_distance(&mut sample, |x| law.cdf(x));
    let empirical_median = median(&mut sample.clone());
    Ok(NullSimReport {
        mode: NullMode::Spacing,
        design: design.label().to_string(),
        n: design.n(),
        p,
        rho: design.rho(),
        step: Some(j),
        replicates,
        ks_distance: ks,
        empirical_mean,
        empirical_median,
        reference: format!("Exp(mean=1/{j})"),
        reference_mean: Some(law.mean()),
        dominance_margin: None,
        sample,
    })
}

pub fn simulate_lemma2_null(n: usize, p: usize, replicates: usize, rng: RngStream) -> Result<NullSimReport> {
    check_replicates(replicates)?;
    if p < 2 {
        return Err(Error::InvalidArgument("lemma2 statistic needs p >= 2".into()));
    }
    if n <= p + 1 {
        return Err(Error::TooFewRows { n, p });
    }
    let df = n - p - 1;
    // Intercept first: the remaining orthonormal columns are centered.
    let mut design_rng = RngStream::new(rng.seed, DESIGN_STREAM).generator();
    let g = DMatrix::from_fn(n, p + 1, |_, c| {
        if c == 0 {
            1.0
        } else {
            rand::Rng::sample(&mut design_rng, rand_distr::StandardNormal)
        }
    });
    let q_full = Qr::new(&g)
        .map_err(|e| Error::RankDeficient {
            column: format!("random column {}", e.column),
        })?
        .q()
        .clone();

    let mut sample: Vec<f64> = (0..replicates as u64)
        .into_par_iter()
        .map(|r| {
            let eps = rng.offset(r).std_normal_vector(n);
            let coords = q_full.tr_mul(&eps);
            let rss = eps.norm_squared() - coords.norm_squared();
            let sigma = (rss / df as f64).sqrt();
            let mut t: Vec<f64> = coords.iter().skip(1).map(|c| (c / sigma).abs()).collect();
            t.sort_unstable_by(|a, b| b.total_cmp(a));
            (t[0] * (t[0] - t[1])).max(0.0)
        })
        .collect();

    let empirical_mean = mean(&sample);
    let ks = ks_distance(&mut sample, |x| f_cdf(x, 2, df));
    let empirical_median = median(&mut sample.clone());
    Ok(NullSimReport {
        mode: NullMode::Lemma2,
        design: "orthonormal".into(),
        n: Some(n),
        p,
        rho: 0.0,
        step: Some(1),
        replicates,
        ks_distance: ks,
        empirical_mean,
        empirical_median,
        reference: format!("F(2,{df})"),
        reference_mean: (df > 2).then(|| df as f64 / (df as f64 - 2.0)),
        dominance_margin: None,
        sample,
    })
}

pub fn simulate_selection_null(p: usize, replicates: usize, rng: RngStream) -> Result<NullSimReport> {
    if p == 0 || replicates == 0 {
        return Err(Error::InvalidArgument(
            "selection null needs p >= 1 and at least one replicate".into(),
        ));
    }
    let mut sample: Vec<f64> = (0..replicates as u64)
        .into_par_iter()
        .map(|r| {
            rng.offset(r)
                .std_normal_vector(p)
                .iter()
                .map(|z| z * z)
                .fold(0.0, f64::max)
        })
        .collect();

    let empirical_mean = mean(&sample);
    let ks = ks_distance(&mut sample, |x| 1.0 - max_chisq1_survival(x, p));
    let empirical_median = median(&mut sample.clone());
    let r = replicates as f64;
    let dominance_margin = (1..=48)
        .map(|i| {
            let x = 0.25 * i as f64;
            let exceed = sample.iter().filter(|&&v| v > x).count() as f64 / r;
            exceed - chisq1_survival(x)
        })
        .fold(f64::INFINITY, f64::min);
    Ok(NullSimReport {
        mode: NullMode::Selection,
        design: "iid_z".into(),
        n: None,
        p,
        rho: 0.0,
        step: Some(1),
        replicates,
        ks_distance: ks,
        empirical_mean,
        empirical_median,
        reference: format!("max of {p} chi2(1)"),
        reference_mean: None,
        dominance_margin: Some(dominance_margin),
        sample,
    })
}

/// Median of the maximum of `m` chi-square(1) variables, by bisection on the
/// closed-form survival.
pub fn max_chisq1_median(m: usize) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, 100.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if max_chisq1_survival(mid, m) > 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
