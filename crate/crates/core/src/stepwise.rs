//! Forward stepwise selection with selection-aware p-values.
//!
//! At stage `k` the active set holds `k - 1` predictors and `m = p - (k - 1)`
//! candidates remain. The candidate with the largest `|t_j|` is selected and
//! tested with six methods that all share the same t-values and the same
//! full-model `sigma_hat`:
//!
//! | method       | reference                                                      |
//! |--------------|----------------------------------------------------------------|
//! | `naive`      | two-sided `t_{df}` tail of `t_max`                              |
//! | `exact`      | simulated law of `t_max` under pure noise                       |
//! | `bonferroni` | `min(1, m * naive)`                                             |
//! | `scheffe`    | `t_max^2 / m` against `F(m, df)`                                |
//! | `ftest`      | F-test of the active submodel inside the full model, `F(m, df)` |
//! | `lemma2`     | `t_max (t_max - t_2nd)` against `F(2, df)`                      |

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::data::Dataset;
use crate::dists::{f_survival, t_survival_two_sided};
use crate::error::{Error, Result};
use crate::linmodel::{factor_design, sigma_full, ActiveDesign, ActiveSet, AdjustedPredictor, SigmaEstimate};
use crate::rng::{fill_std_normal, RngStream};

/// Redraws allowed per replicate when a simulated noise vector gives a
/// degenerate error estimate.
pub const MAX_REDRAWS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Naive,
    Exact,
    Bonferroni,
    Scheffe,
    FTest,
    Lemma2,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Naive,
        Method::Exact,
        Method::Bonferroni,
        Method::Scheffe,
        Method::FTest,
        Method::Lemma2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Naive => "naive",
            Method::Exact => "exact",
            Method::Bonferroni => "bonferroni",
            Method::Scheffe => "scheffe",
            Method::FTest => "ftest",
            Method::Lemma2 => "lemma2",
        }
    }

    pub fn all() -> BTreeSet<Method> {
        Self::ALL.into_iter().collect()
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "naive" => Ok(Method::Naive),
            "exact" => Ok(Method::Exact),
            "bonferroni" | "bonfer" => Ok(Method::Bonferroni),
            "scheffe" => Ok(Method::Scheffe),
            "ftest" | "f-test" | "f" => Ok(Method::FTest),
            "lemma2" => Ok(Method::Lemma2),
            other => Err(Error::InvalidArgument(format!(
                "unknown method `{other}` (expected naive, exact, bonferroni, scheffe, ftest, lemma2)"
            ))),
        }
    }
}

/// Outcome of one greedy step.
#[derive(Debug, Clone)]
pub struct Selection {
    pub selected: usize,
    /// Signed t-values of every usable remaining candidate, in column order.
    pub t_values: Vec<(usize, f64)>,
    /// Adjusted predictors matching `t_values`.
    pub adjusted: Vec<AdjustedPredictor>,
}

impl Selection {
    pub fn t_max(&self) -> f64 {
        self.t_values
            .iter()
            .find(|(j, _)| *j == self.selected)
            .map(|(_, t)| t.abs())
            .unwrap_or(0.0)
    }

    /// Second largest `|t|` among the remaining candidates.
    pub fn t_second(&self) -> Option<f64> {
        let mut mags: Vec<f64> = self.t_values.iter().map(|(_, t)| t.abs()).collect();
        if mags.len() < 2 {
            return None;
        }
        mags.sort_by(|a, b| b.total_cmp(a));
        Some(mags[1])
    }
}

fn select_with(
    design: &ActiveDesign,
    dataset: &Dataset,
    active: &ActiveSet,
    sigma: &SigmaEstimate,
) -> Result<Selection> {
    let mut t_values = Vec::new();
    let mut adjusted = Vec::new();
    for j in active.remaining(dataset.p()) {
        let adj = design.adjust(dataset, j);
        if adj.is_degenerate() {
            continue;
        }
        let t = adj.values.dot(dataset.y()) / (adj.norm * sigma.sigma_hat);
        t_values.push((j, t));
        adjusted.push(adj);
    }
    // Strict comparison keeps the lowest index on ties.
    let mut best: Option<(usize, f64)> = None;
    for &(j, t) in &t_values {
        if best.map_or(true, |(_, b)| t.abs() > b) {
            best = Some((j, t.abs()));
        }
    }
    let (selected, _) = best.ok_or(Error::AllCollinear)?;
    Ok(Selection {
        selected,
        t_values,
        adjusted,
    })
}

/// The remaining predictor with the largest `|t|` (lowest index on ties),
/// together with every remaining t-value.
pub fn select_next(dataset: &Dataset, active: &ActiveSet, sigma: &SigmaEstimate) -> Result<Selection> {
    if sigma.sigma_hat.is_nan() || sigma.sigma_hat <= 0.0 {
        return Err(Error::DegenerateSigma);
    }
    let design = ActiveDesign::new(dataset, active)?;
    select_with(&design, dataset, active, sigma)
}

pub fn pvalue_naive(t_max: f64, sigma: &SigmaEstimate) -> f64 {
    t_survival_two_sided(t_max, sigma.df_err)
}

pub fn pvalue_bonferroni(p_naive: f64, m_remaining: usize) -> f64 {
    (m_remaining as f64 * p_naive).min(1.0)
}

pub fn pvalue_scheffe(t_max: f64, m_remaining: usize, sigma: &SigmaEstimate) -> f64 {
    f_survival(t_max * t_max / m_remaining as f64, m_remaining, sigma.df_err)
}

/// F-statistic of the intercept-plus-`active` submodel against the full model,
/// scaled by the full-model `sigma_hat`.
pub fn ftest_statistic(dataset: &Dataset, active: &ActiveSet, sigma: &SigmaEstimate) -> Result<f64> {
    let m = dataset.p() - active.len();
    if m == 0 {
        return Err(Error::InvalidArgument("no remaining predictors to test".into()));
    }
    let rss_active = factor_design(dataset, active.indices())?.rss(dataset.y());
    Ok(((rss_active - sigma.rss()).max(0.0) / m as f64) / sigma.variance())
}

pub fn pvalue_ftest_remaining(dataset: &Dataset, active: &ActiveSet, sigma: &SigmaEstimate) -> Result<f64> {
    let m = dataset.p() - active.len();
    let f = ftest_statistic(dataset, active, sigma)?;
    Ok(f_survival(f, m, sigma.df_err))
}

pub fn lemma2_statistic(t_max: f64, t_second: f64) -> f64 {
    (t_max * (t_max - t_second)).max(0.0)
}

pub fn pvalue_lemma2(t_max: f64, t_second: f64, sigma: &SigmaEstimate) -> Result<f64> {
    if t_second > t_max || t_second < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "lemma2 needs t_max >= t_second >= 0, got {t_max} and {t_second}"
        )));
    }
    Ok(f_survival(lemma2_statistic(t_max, t_second), 2, sigma.df_err))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactPValue {
    pub p_value: f64,
    pub mc_se: f64,
    pub exceedances: usize,
    pub replicates: usize,
}

impl ExactPValue {
    fn from_count(exceedances: usize, replicates: usize) -> Self {
        let p = (exceedances + 1) as f64 / (replicates + 1) as f64;
        Self {
            p_value: p,
            mc_se: (p * (1.0 - p) / replicates as f64).sqrt(),
            exceedances,
            replicates,
        }
    }
}

/// Candidates of one stage, stored as coordinates of their unit adjusted
/// vectors in the orthonormal basis of the full design.
#[derive(Debug, Clone)]
pub struct StageCandidates {
    coords: DMatrix<f64>,
}

/// Monte Carlo null law of `t_max` for pure-noise responses.
///
/// Each replicate draws `eps ~ N(0, I_n)`, estimates `sigma_hat(eps)` from the
/// full-model residuals and evaluates `t_max(eps)` for every requested stage.
/// Every adjusted predictor lies in the full column space, so only the
/// projection `Q_fullᵀ eps` is needed for the inner products.
#[derive(Debug, Clone)]
pub struct MaxTNull {
    q_full: DMatrix<f64>,
    n: usize,
    df_err: usize,
}

impl MaxTNull {
    pub fn new(dataset: &Dataset) -> Result<Self> {
        let all: Vec<usize> = (0..dataset.p()).collect();
        let qr = factor_design(dataset, &all)?;
        let (n, p) = (dataset.n(), dataset.p());
        if n <= p + 1 {
            return Err(Error::TooFewRows { n, p });
        }
        Ok(Self {
            q_full: qr.q().clone(),
            n,
            df_err: n - p - 1,
        })
    }

    pub fn stage(&self, adjusted: &[AdjustedPredictor]) -> StageCandidates {
        let k = self.q_full.ncols();
        let mut coords = DMatrix::zeros(k, adjusted.len());
        for (c, adj) in adjusted.iter().enumerate() {
            let u = self.q_full.tr_mul(&adj.values) / adj.norm;
            coords.set_column(c, &u);
        }
        StageCandidates { coords }
    }

    /// Full-basis coordinates of one noise draw and its `sigma_hat`.
    fn draw(&self, stream: RngStream, eps: &mut [f64]) -> Result<(DVector<f64>, f64)> {
        let mut rng = stream.generator();
        for _ in 0..=MAX_REDRAWS {
            fill_std_normal(eps, &mut rng);
            let v = DVector::from_column_slice(eps);
            let coords = self.q_full.tr_mul(&v);
            let rss = v.norm_squared() - coords.norm_squared();
            if rss > 0.0 && rss.is_finite() {
                return Ok((coords, (rss / self.df_err as f64).sqrt()));
            }
        }
        Err(Error::TooManyRedraws {
            what: "null error estimate",
            attempts: MAX_REDRAWS + 1,
        })
    }

    /// Exact p-values for several stages from one shared set of noise draws.
    /// Replicate `b` uses stream `base.offset(b)`.
    pub fn pvalues(
        &self,
        stages: &[(StageCandidates, f64)],
        replicates: usize,
        base: RngStream,
    ) -> Result<Vec<ExactPValue>> {
        if replicates == 0 {
            return Err(Error::InvalidArgument(
                "exact p-values need at least one replicate".into(),
            ));
        }
        let s = stages.len();
        let counts = (0..replicates as u64)
            .into_par_iter()
            .try_fold(
                || (vec![0usize; s], vec![0.0; self.n]),
                |(mut acc, mut eps), b| {
                    let (coords, sigma) = self.draw(base.offset(b), &mut eps)?;
                    for (k, (stage, t_obs)) in stages.iter().enumerate() {
                        let proj = stage.coords.tr_mul(&coords);
                        let t_max = proj.amax() / sigma;
                        if t_max >= *t_obs {
                            acc[k] += 1;
                        }
                    }
                    Ok::<_, Error>((acc, eps))
                },
            )
            .map(|r| r.map(|(acc, _)| acc))
            .try_reduce(
                || vec![0usize; s],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    Ok(a)
                },
            )?;
        Ok(counts
            .into_iter()
            .map(|c| ExactPValue::from_count(c, replicates))
            .collect())
    }
}

/// Simulated p-value `P[t_max(eps) >= t_max_obs]` for the candidates that
/// remain after `active`, using the add-one estimator `(r + 1) / (N + 1)`.
///
/// `sigma` is accepted for symmetry with the other methods; each replicate
/// re-estimates the error scale from its own noise vector.
pub fn pvalue_exact(
    dataset: &Dataset,
    active: &ActiveSet,
    sigma: &SigmaEstimate,
    t_max_obs: f64,
    replicates: usize,
    rng: RngStream,
) -> Result<ExactPValue> {
    let null = MaxTNull::new(dataset)?;
    debug_assert_eq!(null.df_err, sigma.df_err);
    let design = ActiveDesign::new(dataset, active)?;
    let adjusted: Vec<_> = active
        .remaining(dataset.p())
        .into_iter()
        .map(|j| design.adjust(dataset, j))
        .filter(|a| !a.is_degenerate())
        .collect();
    if adjusted.is_empty() {
        return Err(Error::AllCollinear);
    }
    let stage = null.stage(&adjusted);
    Ok(null.pvalues(&[(stage, t_max_obs.abs())], replicates, rng)?[0])
}

#[derive(Debug, Clone)]
pub struct StepwiseConfig {
    pub methods: BTreeSet<Method>,
    pub replicates: usize,
    pub seed: u64,
}

impl Default for StepwiseConfig {
    fn default() -> Self {
        Self {
            methods: Method::all(),
            replicates: 99_999,
            seed: 1,
        }
    }
}

impl StepwiseConfig {
    pub fn without_exact(mut self) -> Self {
        self.methods.remove(&Method::Exact);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub selected: usize,
    pub name: String,
    pub t_selected: f64,
    pub m_remaining: usize,
    pub p_naive: Option<f64>,
    pub p_exact: Option<f64>,
    pub exact_se: Option<f64>,
    pub p_bonferroni: Option<f64>,
    pub p_scheffe: Option<f64>,
    pub p_ftest: Option<f64>,
    /// Absent at the last step, where no second candidate exists.
    pub p_lemma2: Option<f64>,
}

impl StepRecord {
    pub fn pvalue(&self, method: Method) -> Option<f64> {
        match method {
            Method::Naive => self.p_naive,
            Method::Exact => self.p_exact,
            Method::Bonferroni => self.p_bonferroni,
            Method::Scheffe => self.p_scheffe,
            Method::FTest => self.p_ftest,
            Method::Lemma2 => self.p_lemma2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepwiseTable {
    pub records: Vec<StepRecord>,
    pub sigma_hat: f64,
    pub df_err: usize,
    pub methods: Vec<Method>,
    pub mc_replicates: usize,
    pub seed: u64,
}

impl StepwiseTable {
    pub fn sigma(&self) -> SigmaEstimate {
        SigmaEstimate {
            sigma_hat: self.sigma_hat,
            df_err: self.df_err,
        }
    }

    pub fn selected_names(&self) -> Vec<&str> {
        self.records.iter().map(|r| r.name.as_str()).collect()
    }
}

/// Runs all `p` forward steps and evaluates the requested methods at each.
///
/// The exact method is evaluated after the path is known, sharing one noise
/// draw per replicate across steps; the result equals calling
/// [`pvalue_exact`] at each step with `RngStream::new(seed, 0)`.
pub fn run_stepwise(dataset: &Dataset, config: &StepwiseConfig) -> Result<StepwiseTable> {
    let want = |m: Method| config.methods.contains(&m);
    if want(Method::Exact) && config.replicates == 0 {
        return Err(Error::InvalidArgument(
            "exact p-values need at least one replicate".into(),
        ));
    }
    let sigma = sigma_full(dataset)?;
    let null = if want(Method::Exact) {
        Some(MaxTNull::new(dataset)?)
    } else {
        None
    };
    let p = dataset.p();
    let mut active = ActiveSet::empty();
    let mut records = Vec::with_capacity(p);
    let mut stages = Vec::new();

    for step in 1..=p {
        let design = ActiveDesign::new(dataset, &active)?;
        let sel = select_with(&design, dataset, &active, &sigma)?;
        let m = p - (step - 1);
        let t_max = sel.t_max();
        let naive = pvalue_naive(t_max, &sigma);

        let p_ftest = if want(Method::FTest) {
            let f = ((design.rss(dataset.y()) - sigma.rss()).max(0.0) / m as f64) / sigma.variance();
            Some(f_survival(f, m, sigma.df_err))
        } else {
            None
        };
        let p_lemma2 = match sel.t_second() {
            Some(t2) if want(Method::Lemma2) => Some(pvalue_lemma2(t_max, t2, &sigma)?),
            _ => None,
        };
        if let Some(null) = &null {
            stages.push((null.stage(&sel.adjusted), t_max));
        }

        records.push(StepRecord {
            step,
            selected: sel.selected,
            name: dataset.name(sel.selected).to_string(),
            t_selected: t_max,
            m_remaining: m,
            p_naive: want(Method::Naive).then_some(naive),
            p_exact: None,
            exact_se: None,
            p_bonferroni: want(Method::Bonferroni).then(|| pvalue_bonferroni(naive, m)),
            p_scheffe: want(Method::Scheffe).then(|| pvalue_scheffe(t_max, m, &sigma)),
            p_ftest,
            p_lemma2,
        });
        active.push(sel.selected, p)?;
    }

    if let Some(null) = &null {
        let exact = null.pvalues(&stages, config.replicates, RngStream::new(config.seed, 0))?;
        for (rec, e) in records.iter_mut().zip(exact) {
            rec.p_exact = Some(e.p_value);
            rec.exact_se = Some(e.mc_se);
        }
    }

    Ok(StepwiseTable {
        records,
        sigma_hat: sigma.sigma_hat,
        df_err: sigma.df_err,
        methods: config.methods.iter().copied().collect(),
        mc_replicates: if want(Method::Exact) { config.replicates } else { 0 },
        seed: config.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Qr;

    /// `n x p` matrix whose columns are orthonormal and orthogonal to 1.
    pub(crate) fn orthonormal_design(n: usize, p: usize, seed: u64) -> DMatrix<f64> {
        let mut g = DMatrix::from_element(n, p + 1, 1.0);
        for j in 1..=p {
            g.set_column(j, &RngStream::new(seed, j as u64).std_normal_vector(n));
        }
        let q = Qr::new(&g).unwrap().q().clone();
        q.columns(1, p).clone_owned()
    }

    fn names(p: usize) -> Vec<String> {
        (0..p).map(|j| format!("x{j}")).collect()
    }

    #[test]
    fn method_names_parse() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("bogus".parse::<Method>().is_err());
    }

    #[test]
    fn dominant_signal_selected() {
        let (n, p) = (40, 5);
        let x = orthonormal_design(n, p, 3);
        let noise = RngStream::new(9, 0).std_normal_vector(n) * 0.01;
        let y = x.column(3) * 5.0 + noise;
        let ds = Dataset::new(names(p), x, y, "y").unwrap();
        let sigma = SigmaEstimate {
            sigma_hat: 1.0,
            df_err: n - p - 1,
        };
        let sel = select_next(&ds, &ActiveSet::empty(), &sigma).unwrap();
        assert_eq!(sel.selected, 3);
        assert_eq!(sel.t_values.len(), p);
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let (n, p) = (30, 4);
        let mut x = orthonormal_design(n, p, 5);
        let dup = x.column(1).clone_owned();
        x.set_column(3, &dup);
        let y = x.column(1) * 2.0 + x.column(0) * 0.5;
        let ds = Dataset::new(names(p), x, y, "y").unwrap();
        let sigma = SigmaEstimate {
            sigma_hat: 1.0,
            df_err: n - p - 1,
        };
        let sel = select_next(&ds, &ActiveSet::empty(), &sigma).unwrap();
        assert_eq!(sel.t_values[1].1, sel.t_values[3].1);
        assert_eq!(sel.selected, 1);
    }

    #[test]
    fn simple_adjustments() {
        let sigma = SigmaEstimate {
            sigma_hat: 1.0,
            df_err: 100,
        };
        assert_eq!(pvalue_naive(0.0, &sigma), 1.0);
        assert_eq!(pvalue_bonferroni(0.3, 1), 0.3);
        assert_eq!(pvalue_bonferroni(0.2878, 4), 1.0);
        assert!((pvalue_bonferroni(0.0171, 5) - 0.0855).abs() < 1e-12);
        assert_eq!(pvalue_lemma2(2.0, 2.0, &sigma).unwrap(), 1.0);
        assert!(pvalue_lemma2(1.0, 2.0, &sigma).is_err());
        let sigma58 = SigmaEstimate {
            sigma_hat: 1.0,
            df_err: 58,
        };
        // t_max (t_max - t_2nd) = 3.134.
        let t = 2.0;
        let p = pvalue_lemma2(t, t - 3.134 / t, &sigma58).unwrap();
        assert!((p - 0.0510).abs() < 5e-4);
    }

    #[test]
    fn scheffe_single_candidate_is_naive() {
        let sigma = SigmaEstimate {
            sigma_hat: 1.0,
            df_err: 1587,
        };
        for t in [0.3, 0.8266, 2.0, 4.5] {
            let a = pvalue_scheffe(t, 1, &sigma);
            let b = pvalue_naive(t, &sigma);
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn ftest_orthonormal_sum_of_squares() {
        let (n, p) = (25, 5);
        let x = orthonormal_design(n, p, 11);
        let y = RngStream::new(2, 0).std_normal_vector(n) + x.column(0) * 3.0;
        let ds = Dataset::new(names(p), x.clone(), y.clone(), "y").unwrap();
        let sigma = sigma_full(&ds).unwrap();
        for active in [vec![], vec![0], vec![0, 3]] {
            let set = ActiveSet::from_indices(active.clone(), p).unwrap();
            let rem = set.remaining(p);
            // Direct formula on the orthonormal design: t_j = <x_j, y> / sigma.
            let oracle = rem
                .iter()
                .map(|&j| (x.column(j).dot(&y) / sigma.sigma_hat).powi(2))
                .sum::<f64>()
                / rem.len() as f64;
            let f = ftest_statistic(&ds, &set, &sigma).unwrap();
            assert!(((f - oracle) / oracle).abs() < 1e-8, "{f} vs {oracle}");
        }
    }

    #[test]
    fn single_predictor_dataset() {
        let x = DMatrix::from_column_slice(6, 1, &[1.0, 2.0, 4.0, 3.0, 6.0, 5.0]);
        let y = DVector::from_vec(vec![1.1, 1.9, 4.2, 2.7, 6.5, 4.6]);
        let ds = Dataset::new(vec!["x".into()], x, y, "y").unwrap();
        let config = StepwiseConfig {
            replicates: 999,
            ..StepwiseConfig::default()
        };
        let table = run_stepwise(&ds, &config).unwrap();
        assert_eq!(table.records.len(), 1);
        let r = &table.records[0];
        let naive = r.p_naive.unwrap();
        assert!((r.p_bonferroni.unwrap() - naive).abs() < 1e-10);
        assert!((r.p_scheffe.unwrap() - naive).abs() < 1e-10);
        assert!((r.p_ftest.unwrap() - naive).abs() < 1e-10);
        assert!(r.p_lemma2.is_none());
        let exact = r.p_exact.unwrap();
        assert!((exact - naive).abs() < 4.0 * r.exact_se.unwrap() + 1e-3);
    }

    #[test]
    fn exact_zero_statistic_always_exceeded() {
        let (n, p) = (20, 3);
        let x = orthonormal_design(n, p, 4);
        let y = RngStream::new(8, 0).std_normal_vector(n);
        let ds = Dataset::new(names(p), x, y, "y").unwrap();
        let sigma = sigma_full(&ds).unwrap();
        let e = pvalue_exact(&ds, &ActiveSet::empty(), &sigma, 0.0, 499, RngStream::new(1, 0)).unwrap();
        assert!(e.p_value >= 499.0 / 500.0);
        assert!(pvalue_exact(&ds, &ActiveSet::empty(), &sigma, 1.0, 0, RngStream::new(1, 0)).is_err());
    }

    #[test]
    fn batched_exact_matches_per_step() {
        let (n, p) = (30, 4);
        let x = DMatrix::from_fn(n, p, |i, j| ((i * 7 + j * 13) % 11) as f64 + 0.1 * (i * j) as f64);
        let y = RngStream::new(5, 0).std_normal_vector(n) + x.column(2) * 0.4;
        let ds = Dataset::new(names(p), x, y, "y").unwrap();
        let config = StepwiseConfig {
            replicates: 999,
            seed: 17,
            ..StepwiseConfig::default()
        };
        let table = run_stepwise(&ds, &config).unwrap();
        let sigma = table.sigma();
        let mut active = ActiveSet::empty();
        for rec in &table.records {
            let single = pvalue_exact(&ds, &active, &sigma, rec.t_selected, 999, RngStream::new(17, 0)).unwrap();
            assert_eq!(Some(single.p_value), rec.p_exact);
            active.push(rec.selected, p).unwrap();
        }
    }
}
