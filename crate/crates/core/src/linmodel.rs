//! Intercept-augmented least squares, predictor adjustment and the adjusted
//! t-statistic.
//!
//! At a stage with active set `A`, a candidate column `x_j` is replaced by its
//! residual `x_{j.A}` after projection onto `span{1, x_a : a in A}`. The
//! statistic for adding `j` is
//!
//! ```text
//! t_j = <x_{j.A}, y> / (||x_{j.A}|| * sigma_hat)
//! ```
//!
//! where `sigma_hat` always comes from the full model's residual sum of squares.
//! With that single estimate, `t_j` coincides with the usual OLS t-statistic of
//! `j` in the model `A + {j}` after swapping its own error estimate for the
//! full-model one.

use nalgebra::{DMatrix, DVector};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::Qr;

/// Adjusted predictors with norm at or below this fraction of the raw column
/// norm are treated as collinear with the active set.
pub const COLLINEAR_TOL: f64 = 1e-8;

/// Residual norms at or below this fraction of `||y||` count as an exact fit.
pub const EXACT_FIT_TOL: f64 = 1e-10;

/// Predictors selected so far, in selection order. The intercept is always
/// part of the fitted model and is not listed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ActiveSet {
    indices: Vec<usize>,
}

impl ActiveSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_indices(indices: Vec<usize>, p: usize) -> Result<Self> {
        let mut set = Self::empty();
        for j in indices {
            set.push(j, p)?;
        }
        Ok(set)
    }

    pub fn push(&mut self, j: usize, p: usize) -> Result<()> {
        if j >= p {
            return Err(Error::IndexOutOfRange { index: j, p });
        }
        if self.contains(j) {
            return Err(Error::InvalidArgument(format!(
                "predictor index {j} appears twice in the active set"
            )));
        }
        self.indices.push(j);
        Ok(())
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, j: usize) -> bool {
        self.indices.contains(&j)
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn includes_intercept(&self) -> bool {
        true
    }

    /// Predictors not yet selected, in column order.
    pub fn remaining(&self, p: usize) -> Vec<usize> {
        (0..p).filter(|j| !self.contains(*j)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaEstimate {
    pub sigma_hat: f64,
    pub df_err: usize,
}

impl SigmaEstimate {
    pub fn variance(&self) -> f64 {
        self.sigma_hat * self.sigma_hat
    }

    pub fn rss(&self) -> f64 {
        self.variance() * self.df_err as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdjustedPredictor {
    pub values: DVector<f64>,
    pub norm: f64,
    pub source_index: usize,
    source_norm: f64,
}

impl AdjustedPredictor {
    /// True when the adjustment removed (numerically) all of the column.
    pub fn is_degenerate(&self) -> bool {
        self.norm <= COLLINEAR_TOL * self.source_norm || self.norm == 0.0
    }

    /// Unit vector along the adjusted predictor.
    pub fn direction(&self) -> DVector<f64> {
        &self.values / self.norm
    }
}

/// `[1, x_{c_1}, ..., x_{c_k}]`.
pub fn design_with_intercept(dataset: &Dataset, columns: &[usize]) -> DMatrix<f64> {
    let n = dataset.n();
    let mut m = DMatrix::from_element(n, columns.len() + 1, 1.0);
    for (k, &j) in columns.iter().enumerate() {
        m.set_column(k + 1, &dataset.x().column(j));
    }
    m
}

/// Orthogonal factorization of the intercept-plus-`columns` design.
pub fn factor_design(dataset: &Dataset, columns: &[usize]) -> Result<Qr> {
    Qr::new(&design_with_intercept(dataset, columns)).map_err(|e| Error::RankDeficient {
        column: match e.column {
            0 => "(intercept)".to_string(),
            c => dataset.name(columns[c - 1]).to_string(),
        },
    })
}

/// Factored design for the intercept plus the active predictors, reusable for
/// every candidate at one stage.
#[derive(Debug, Clone)]
pub struct ActiveDesign {
    qr: Qr,
}

impl ActiveDesign {
    pub fn new(dataset: &Dataset, active: &ActiveSet) -> Result<Self> {
        Ok(Self {
            qr: factor_design(dataset, active.indices())?,
        })
    }

    pub fn qr(&self) -> &Qr {
        &self.qr
    }

    pub fn adjust(&self, dataset: &Dataset, j: usize) -> AdjustedPredictor {
        let col = dataset.x().column(j).clone_owned();
        let source_norm = col.norm();
        let values = self.qr.residual(&col);
        let norm = values.norm();
        AdjustedPredictor {
            values,
            norm,
            source_index: j,
            source_norm,
        }
    }

    pub fn rss(&self, y: &DVector<f64>) -> f64 {
        self.qr.rss(y)
    }
}

/// `x_j` with its projection onto `span{1, x_a : a in active}` removed.
pub fn residualize(dataset: &Dataset, active: &ActiveSet, j: usize) -> Result<AdjustedPredictor> {
    if j >= dataset.p() {
        return Err(Error::IndexOutOfRange {
            index: j,
            p: dataset.p(),
        });
    }
    if active.contains(j) {
        return Err(Error::AlreadyActive(dataset.name(j).to_string()));
    }
    Ok(ActiveDesign::new(dataset, active)?.adjust(dataset, j))
}

/// Error-scale estimate from the intercept-plus-all-predictors fit, with
/// `n - p - 1` degrees of freedom.
pub fn sigma_full(dataset: &Dataset) -> Result<SigmaEstimate> {
    let all: Vec<usize> = (0..dataset.p()).collect();
    let qr = factor_design(dataset, &all)?;
    let (n, p) = (dataset.n(), dataset.p());
    if n <= p + 1 {
        return Err(Error::TooFewRows { n, p });
    }
    let df_err = n - p - 1;
    let resid_norm = qr.residual(dataset.y()).norm();
    if resid_norm <= EXACT_FIT_TOL * dataset.y().norm() {
        return Err(Error::DegenerateSigma);
    }
    Ok(SigmaEstimate {
        sigma_hat: resid_norm / (df_err as f64).sqrt(),
        df_err,
    })
}

/// Signed statistic `<x_{j.A}, y> / (||x_{j.A}|| sigma_hat)`.
pub fn t_statistic(adj: &AdjustedPredictor, y: &DVector<f64>, sigma: &SigmaEstimate) -> Result<f64> {
    if adj.is_degenerate() {
        return Err(Error::Collinear(format!("#{}", adj.source_index)));
    }
    if sigma.sigma_hat.is_nan() || sigma.sigma_hat <= 0.0 {
        return Err(Error::DegenerateSigma);
    }
    Ok(adj.values.dot(y) / (adj.norm * sigma.sigma_hat))
}
