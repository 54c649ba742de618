//! Empirical summaries used by the simulation and bootstrap code.

/// Kolmogorov-Smirnov distance `sup |F_n(x) - F(x)|` between the empirical
/// CDF of `sample` and `cdf`. Sorts `sample` in place.
pub fn ks_distance(sample: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    assert!(!sample.is_empty(), "KS distance of an empty sample");
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    let mut d = 0.0_f64;
    for (i, &x) in sample.iter().enumerate() {
        let f = cdf(x);
        let above = (i + 1) as f64 / n - f;
        let below = f - i as f64 / n;
        d = d.max(above).max(below);
    }
    d
}

/// Median with the midpoint convention for even lengths. Sorts in place.
pub fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty slice");
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        0.5 * (values[m - 1] + values[m])
    }
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_conventions() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 3.0, 2.0]), 2.5);
        assert_eq!(median(&mut [0.7]), 0.7);
    }

    #[test]
    fn ks_of_exact_grid() {
        // Midpoints of a uniform grid sit 1/(2n) from the CDF steps.
        let n = 10;
        let mut s: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_distance(&mut s, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.05).abs() < 1e-12);
    }

    #[test]
    fn ks_detects_shift() {
        let mut s: Vec<f64> = (0..100).map(|i| 0.5 + 0.5 * i as f64 / 100.0).collect();
        let d = ks_distance(&mut s, |x| x.clamp(0.0, 1.0));
        assert!(d > 0.49);
    }
}
