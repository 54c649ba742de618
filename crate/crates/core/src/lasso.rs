//! LARS with the lasso modification, and the knot-spacing test.
//!
//! Columns are centered and scaled to unit Euclidean norm and the response is
//! centered before the path is traced, so knots are on the scale of
//! `|<x_j, r>|` for unit columns. On an orthonormal design the knots are
//! exactly the sorted univariate statistics `|z_(1)| >= |z_(2)| >= ...`.
//!
//! The test statistic at the knot where a variable first enters is the spacing
//!
//! ```text
//! T_k = lambda_k (lambda_k - lambda_{k+1}) / sigma_hat^2
//! ```
//!
//! which has a limiting `Exp(1)` law at the first step for orthogonal designs
//! under the global null. For correlated designs this is a working statistic;
//! it is not the covariance statistic of the lasso significance test, which
//! needs the full path fit at each knot.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::data::Dataset;
use crate::dists::f_survival;
use crate::error::{Error, Result};
use crate::linmodel::SigmaEstimate;

/// Relative tolerance for treating a correlation as tied with the current
/// knot (simultaneous entry).
const TIE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Enter,
    Drop,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathEvent {
    pub lambda: f64,
    pub variable: usize,
    pub kind: EventKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PathEnd {
    /// Traced down to `lambda = 0`.
    Complete,
    /// Stopped because the active Gram matrix became singular after
    /// `variable` joined.
    RankDeficient { variable: usize },
    /// Stopped at the requested (or safety) cap on the number of events.
    Truncated,
}

#[derive(Debug, Clone)]
pub struct LassoPath {
    /// One entry per event, nonincreasing; equal entries mark simultaneous
    /// events.
    pub knots: Vec<f64>,
    pub events: Vec<PathEvent>,
    /// Active set right after each event.
    pub active_sets: Vec<Vec<usize>>,
    /// Standardized-scale coefficients at each knot.
    betas: Vec<DVector<f64>>,
    /// Coefficients at `lambda = 0` when the path is complete.
    final_beta: Option<DVector<f64>>,
    pub end: PathEnd,
    standardized: DMatrix<f64>,
    centered_y: DVector<f64>,
}

impl LassoPath {
    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.knots.is_empty()
    }

    /// Centered, unit-norm design the path was traced on.
    pub fn standardized_design(&self) -> &DMatrix<f64> {
        &self.standardized
    }

    pub fn centered_response(&self) -> &DVector<f64> {
        &self.centered_y
    }

    /// Standardized-scale coefficients at `lambda`, by linear interpolation
    /// between knots. `None` below the last knot of an incomplete path.
    pub fn coefficients_at(&self, lambda: f64) -> Option<DVector<f64>> {
        let p = self.standardized.ncols();
        if self.knots.is_empty() || lambda >= self.knots[0] {
            return Some(DVector::zeros(p));
        }
        let mut points: Vec<(f64, &DVector<f64>)> = self.knots.iter().copied().zip(self.betas.iter()).collect();
        if let Some(b) = &self.final_beta {
            points.push((0.0, b));
        }
        for w in points.windows(2) {
            let ((hi, b_hi), (lo, b_lo)) = (w[0], w[1]);
            if lambda <= hi && lambda >= lo && hi > lo {
                let t = (hi - lambda) / (hi - lo);
                return Some(b_hi + (b_lo - b_hi) * t);
            }
        }
        None
    }

    /// Variables in the order they first enter the path, with the event
    /// index of that entry.
    pub fn first_entries(&self) -> Vec<(usize, usize)> {
        let mut seen = vec![false; self.standardized.ncols()];
        let mut out = Vec::new();
        for (e, ev) in self.events.iter().enumerate() {
            if ev.kind == EventKind::Enter && !seen[ev.variable] {
                seen[ev.variable] = true;
                out.push((e, ev.variable));
            }
        }
        out
    }
}

/// Centers each column and scales it to unit norm. Fails with the index of
/// the first constant column.
pub fn standardize(x: &DMatrix<f64>) -> std::result::Result<DMatrix<f64>, usize> {
    let mut xs = x.clone();
    for (j, mut col) in xs.column_iter_mut().enumerate() {
        let mean = col.mean();
        col.add_scalar_mut(-mean);
        let norm = col.norm();
        if norm <= 1e-12 * x.column(j).norm() || norm == 0.0 {
            return Err(j);
        }
        col /= norm;
    }
    Ok(xs)
}

/// Full lasso path by LARS with drops.
pub fn lars_path(dataset: &Dataset) -> Result<LassoPath> {
    let xs = standardize(dataset.x()).map_err(|j| Error::RankDeficient {
        column: dataset.name(j).to_string(),
    })?;
    let y = dataset.y();
    let yc = y.add_scalar(-y.mean());
    Ok(trace(xs, yc, None))
}

/// Traces the path on an already standardized design and centered response,
/// stopping after `max_events` events when given.
pub fn lars_path_standardized(xs: DMatrix<f64>, yc: DVector<f64>, max_events: Option<usize>) -> LassoPath {
    trace(xs, yc, max_events)
}

fn trace(xs: DMatrix<f64>, yc: DVector<f64>, max_events: Option<usize>) -> LassoPath {
    let p = xs.ncols();
    let n = xs.nrows();
    let max_active = p.min(n.saturating_sub(1));
    let max_events = max_events.unwrap_or(8 * p + 64);

    let mut beta: DVector<f64> = DVector::zeros(p);
    let mut active: Vec<usize> = Vec::new();
    let mut in_active = vec![false; p];
    let mut knots = Vec::new();
    let mut events = Vec::new();
    let mut active_sets = Vec::new();
    let mut betas = Vec::new();
    let mut final_beta = None;
    let mut end = PathEnd::Complete;

    let mut corr = xs.tr_mul(&yc);
    let mut lambda = corr.amax();
    let mut just_dropped: Option<usize> = None;

    if lambda <= 0.0 {
        final_beta = Some(beta.clone());
    }

    while lambda > 0.0 {
        // Everything tied with the current knot joins, lowest index first.
        for j in 0..p {
            if in_active[j] || Some(j) == just_dropped || active.len() >= max_active {
                continue;
            }
            if corr[j].abs() >= lambda * (1.0 - TIE_TOL) {
                active.push(j);
                in_active[j] = true;
                knots.push(lambda);
                events.push(PathEvent {
                    lambda,
                    variable: j,
                    kind: EventKind::Enter,
                });
                active_sets.push(active.clone());
                betas.push(beta.clone());
            }
        }
        if events.len() >= max_events {
            end = PathEnd::Truncated;
            break;
        }

        let k = active.len();
        let xa = DMatrix::from_fn(n, k, |i, c| xs[(i, active[c])]);
        let signs = DVector::from_fn(k, |c, _| {
            let j = active[c];
            if beta[j] != 0.0 {
                beta[j].signum()
            } else {
                corr[j].signum()
            }
        });
        let gram = xa.tr_mul(&xa);
        let Some(chol) = gram.cholesky() else {
            end = PathEnd::RankDeficient {
                variable: *active.last().expect("nonempty active set"),
            };
            break;
        };
        let dir = chol.solve(&signs);
        if dir.iter().any(|v| !v.is_finite()) {
            end = PathEnd::RankDeficient {
                variable: *active.last().expect("nonempty active set"),
            };
            break;
        }
        let u = &xa * &dir;
        let a = xs.tr_mul(&u);

        // Step to the next event: an entry, a sign change (drop) or lambda = 0.
        let mut gamma = lambda;
        let mut next: Option<(usize, EventKind)> = None;
        if k < max_active {
            for j in 0..p {
                if in_active[j] || Some(j) == just_dropped {
                    continue;
                }
                for (num, den) in [(lambda - corr[j], 1.0 - a[j]), (lambda + corr[j], 1.0 + a[j])] {
                    if den > 1e-14 {
                        let g = num.max(0.0) / den;
                        if g < gamma {
                            gamma = g;
                            next = Some((j, EventKind::Enter));
                        }
                    }
                }
            }
        }
        for (c, &j) in active.iter().enumerate() {
            if dir[c] == 0.0 || beta[j] == 0.0 {
                continue;
            }
            let g = -beta[j] / dir[c];
            if g > 1e-14 * lambda && g < gamma {
                gamma = g;
                next = Some((j, EventKind::Drop));
            }
        }

        for (c, &j) in active.iter().enumerate() {
            beta[j] += gamma * dir[c];
        }
        lambda -= gamma;
        let resid = &yc - &xs * &beta;
        corr = xs.tr_mul(&resid);
        just_dropped = None;

        match next {
            None => {
                final_beta = Some(beta.clone());
                break;
            }
            Some((j, EventKind::Drop)) => {
                beta[j] = 0.0;
                active.retain(|&v| v != j);
                in_active[j] = false;
                just_dropped = Some(j);
                knots.push(lambda);
                events.push(PathEvent {
                    lambda,
                    variable: j,
                    kind: EventKind::Drop,
                });
                active_sets.push(active.clone());
                betas.push(beta.clone());
            }
            Some((j, EventKind::Enter)) => {
                active.push(j);
                in_active[j] = true;
                knots.push(lambda);
                events.push(PathEvent {
                    lambda,
                    variable: j,
                    kind: EventKind::Enter,
                });
                active_sets.push(active.clone());
                betas.push(beta.clone());
            }
        }
    }

    LassoPath {
        knots,
        events,
        active_sets,
        betas,
        final_beta,
        end,
        standardized: xs,
        centered_y: yc,
    }
}

/// `lambda_k (lambda_k - lambda_{k+1}) / sigma_hat^2` for the 1-based knot
/// `k`.
pub fn knot_statistic(path: &LassoPath, k: usize, sigma: &SigmaEstimate) -> Result<f64> {
    if k == 0 || k > path.knots.len() {
        return Err(Error::InvalidArgument(format!(
            "knot {k} out of range (path has {} knots)",
            path.knots.len()
        )));
    }
    if k == path.knots.len() {
        return Err(Error::NoSuccessorKnot(k));
    }
    Ok(spacing_statistic(path.knots[k - 1], path.knots[k], sigma.variance()))
}

/// `a (a - b) / variance`, floored at zero.
pub fn spacing_statistic(a: f64, b: f64, variance: f64) -> f64 {
    (a * (a - b) / variance).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Reference {
    /// `F(2, df_err)` survival.
    #[default]
    #[serde(rename = "f2")]
    F2DfErr,
    /// `Exp(1)` survival, `exp(-T)`.
    #[serde(rename = "exp1")]
    ExpMeanOne,
}

impl Reference {
    pub fn pvalue(self, statistic: f64, df_err: usize) -> f64 {
        match self {
            Reference::F2DfErr => f_survival(statistic, 2, df_err),
            Reference::ExpMeanOne => (-statistic.max(0.0)).exp(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Reference::F2DfErr => "f2",
            Reference::ExpMeanOne => "exp1",
        }
    }
}

impl fmt::Display for Reference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Reference {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "f2" | "f2_dferr" => Ok(Reference::F2DfErr),
            "exp1" | "exp" | "exp_mean_one" => Ok(Reference::ExpMeanOne),
            other => Err(Error::InvalidArgument(format!(
                "unknown reference `{other}` (expected f2 or exp1)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LassoStepPValue {
    pub step: usize,
    pub variable: usize,
    pub knot: f64,
    /// Absent for the last entry, which has no successor knot.
    pub statistic: Option<f64>,
    pub p_value: Option<f64>,
    pub reference: Reference,
}

/// Spacing test at each knot where a variable enters for the first time.
pub fn pvalue_sequence(path: &LassoPath, sigma: &SigmaEstimate, reference: Reference) -> Vec<LassoStepPValue> {
    path.first_entries()
        .into_iter()
        .enumerate()
        .map(|(s, (e, variable))| {
            let statistic = path
                .knots
                .get(e + 1)
                .map(|&next| spacing_statistic(path.knots[e], next, sigma.variance()));
            LassoStepPValue {
                step: s + 1,
                variable,
                knot: path.knots[e],
                statistic,
                p_value: statistic.map(|t| reference.pvalue(t, sigma.df_err)),
                reference,
            }
        })
        .collect()
}

pub fn lasso_pvalue_sequence(
    dataset: &Dataset,
    sigma: &SigmaEstimate,
    reference: Reference,
) -> Result<Vec<LassoStepPValue>> {
    let path = lars_path(dataset)?;
    if let PathEnd::RankDeficient { variable } = path.end {
        if path.first_entries().len() < dataset.p() {
            return Err(Error::RankDeficient {
                column: dataset.name(variable).to_string(),
            });
        }
    }
    Ok(pvalue_sequence(&path, sigma, reference))
}

/// Scales a spacing statistic by `multiplier >= 1`, the tightening from
/// `Exp(1)` to `Exp(1/multiplier)` under presumed null inclusions.
pub fn rescale_statistic(statistic: f64, multiplier: f64) -> Result<f64> {
    if !multiplier.is_finite() || multiplier < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "multiplier must be a finite value >= 1, got {multiplier}"
        )));
    }
    Ok(statistic * multiplier)
}
