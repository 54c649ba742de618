//! Random small instances checked against textbook formulas.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

use postsel_core::lasso::lars_path;
use postsel_core::linalg::Qr;
use postsel_core::linmodel::{residualize, sigma_full, t_statistic, ActiveSet};
use postsel_core::stepwise::{ftest_statistic, select_next};
use postsel_core::{Dataset, RngStream};

fn random_dataset(n: usize, p: usize, seed: u64) -> Dataset {
    let mut rng = RngStream::new(seed, 0).generator();
    let x = DMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal));
    let beta = DVector::from_fn(p, |_, _| rng.sample::<f64, _>(StandardNormal));
    let noise = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let y = &x * beta + noise;
    Dataset::new((0..p).map(|j| format!("x{j}")).collect(), x, y, "y").unwrap()
}

fn with_intercept(ds: &Dataset, cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(ds.n(), cols.len() + 1, |i, c| {
        if c == 0 {
            1.0
        } else {
            ds.x()[(i, cols[c - 1])]
        }
    })
}

/// OLS via the normal equations: coefficients, inverse Gram and RSS.
fn ols(x: &DMatrix<f64>, y: &DVector<f64>) -> (DVector<f64>, DMatrix<f64>, f64) {
    let gram_inv = (x.transpose() * x).try_inverse().unwrap();
    let beta = &gram_inv * x.transpose() * y;
    let rss = (y - x * &beta).norm_squared();
    (beta, gram_inv, rss)
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn t_statistic_matches_normal_equations(
        n in 12usize..=30, p in 2usize..=6, seed in any::<u64>(), k in 0usize..6,
    ) {
        let ds = random_dataset(n, p, seed);
        let sigma = sigma_full(&ds).unwrap();
        let (_, _, rss_full) = ols(&with_intercept(&ds, &(0..p).collect::<Vec<_>>()), ds.y());
        prop_assert!(rel_err(sigma.variance(), rss_full / (n - p - 1) as f64) < 1e-8);

        // Active set: the first k' columns, candidate: the last one.
        let k = k.min(p - 1);
        let active = ActiveSet::from_indices((0..k).collect(), p).unwrap();
        let j = p - 1;
        let mut cols: Vec<usize> = (0..k).collect();
        cols.push(j);
        let (beta, gram_inv, _) = ols(&with_intercept(&ds, &cols), ds.y());
        let last = cols.len();
        let oracle = beta[last] / (sigma.sigma_hat * gram_inv[(last, last)].sqrt());

        let adj = residualize(&ds, &active, j).unwrap();
        let t = t_statistic(&adj, ds.y(), &sigma).unwrap();
        prop_assert!(rel_err(t, oracle) < 1e-8, "t = {t}, oracle = {oracle}");
    }

    #[test]
    fn selection_is_scale_invariant(n in 15usize..=30, p in 2usize..=6, seed in any::<u64>(), c in 0.01f64..100.0) {
        let ds = random_dataset(n, p, seed);
        let scaled_x = DMatrix::from_fn(n, p, |i, j| ds.x()[(i, j)] * c * (j + 1) as f64);
        let scaled = Dataset::new(ds.predictor_names().to_vec(), scaled_x, ds.y() * c, "y").unwrap();
        let (s1, s2) = (sigma_full(&ds).unwrap(), sigma_full(&scaled).unwrap());
        let a = select_next(&ds, &ActiveSet::empty(), &s1).unwrap();
        let b = select_next(&scaled, &ActiveSet::empty(), &s2).unwrap();
        prop_assert_eq!(a.selected, b.selected);
        prop_assert!(rel_err(b.t_max(), a.t_max()) < 1e-8);
    }

    #[test]
    fn lasso_path_satisfies_kkt(n in 12usize..=30, p in 2usize..=6, seed in any::<u64>()) {
        let ds = random_dataset(n, p, seed);
        let path = lars_path(&ds).unwrap();
        let xs = path.standardized_design();
        let yc = path.centered_response();
        prop_assert!(path.knots.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        let mut lambdas = path.knots.clone();
        lambdas.extend(path.knots.windows(2).map(|w| 0.5 * (w[0] + w[1])));
        for &lambda in &lambdas {
            let beta = path.coefficients_at(lambda).unwrap();
            let grad = xs.tr_mul(&(yc - xs * &beta));
            for j in 0..p {
                prop_assert!(grad[j].abs() <= lambda + 1e-6, "lambda {lambda}: |c_{j}| = {}", grad[j].abs());
                if beta[j] != 0.0 {
                    prop_assert!((grad[j] - lambda * beta[j].signum()).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn ftest_is_mean_squared_t_on_orthonormal_design(
        n in 12usize..=30, p in 2usize..=6, seed in any::<u64>(), k in 0usize..5,
    ) {
        let mut rng = RngStream::new(seed, 7).generator();
        let g = DMatrix::from_fn(n, p + 1, |_, c| if c == 0 { 1.0 } else { rng.sample(StandardNormal) });
        let x = Qr::new(&g).unwrap().q().columns(1, p).into_owned();
        let y = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let ds = Dataset::new((0..p).map(|j| format!("x{j}")).collect(), x, y, "y").unwrap();
        let sigma = sigma_full(&ds).unwrap();
        let k = k.min(p - 1);
        let active = ActiveSet::from_indices((0..k).collect(), p).unwrap();
        let remaining = active.remaining(p);
        let mean_sq: f64 = remaining
            .iter()
            .map(|&j| t_statistic(&residualize(&ds, &active, j).unwrap(), ds.y(), &sigma).unwrap().powi(2))
            .sum::<f64>()
            / remaining.len() as f64;
        let f = ftest_statistic(&ds, &active, &sigma).unwrap();
        prop_assert!(rel_err(f, mean_sq) < 1e-8, "F = {f}, mean t^2 = {mean_sq}");
    }
}
