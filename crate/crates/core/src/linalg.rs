//! Householder QR with column-wise rank detection.
//!
//! Only the thin orthonormal factor is kept explicitly; every consumer in this
//! crate needs projections (`Q Qᵀ v`) and residual sums of squares, and the
//! designs here are tall and narrow.

use nalgebra::{DMatrix, DVector};

/// Columns whose diagonal entry of `R` falls below this fraction of the
/// largest column norm are treated as linearly dependent.
pub const RANK_TOL: f64 = 1e-8;

/// Thin QR factorization `A = Q R` of an `n x k` matrix with `n >= k`.
#[derive(Debug, Clone)]
pub struct Qr {
    q: DMatrix<f64>,
    r: DMatrix<f64>,
}

/// Index of the first column found to be dependent on its predecessors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankDeficiency {
    pub column: usize,
}

impl Qr {
    pub fn new(a: &DMatrix<f64>) -> Result<Self, RankDeficiency> {
        let (n, k) = a.shape();
        if k > n {
            return Err(RankDeficiency { column: n });
        }
        let max_norm = a.column_iter().map(|c| c.norm()).fold(0.0_f64, f64::max);
        let tol = RANK_TOL * max_norm;

        let mut work = a.clone();
        let mut reflectors: Vec<DVector<f64>> = Vec::with_capacity(k);
        let mut r = DMatrix::zeros(k, k);

        for c in 0..k {
            let x = work.view((c, c), (n - c, 1)).column(0).clone_owned();
            let alpha = x.norm();
            if alpha <= tol || max_norm == 0.0 {
                return Err(RankDeficiency { column: c });
            }
            // Reflect x onto -sign(x0) * alpha * e1 to avoid cancellation.
            let sign = if x[0] >= 0.0 { 1.0 } else { -1.0 };
            let mut v = x;
            v[0] += sign * alpha;
            let vnorm = v.norm();
            v /= vnorm;

            for col in c..k {
                let mut target = work.view_mut((c, col), (n - c, 1));
                let proj = 2.0 * v.dot(&target.column(0));
                target.column_mut(0).axpy(-proj, &v, 1.0);
            }
            for col in c..k {
                r[(c, col)] = work[(c, col)];
            }
            reflectors.push(v);
        }

        // Thin Q: apply the reflectors in reverse to the first k unit vectors.
        let mut q = DMatrix::zeros(n, k);
        for i in 0..k {
            q[(i, i)] = 1.0;
        }
        for (c, v) in reflectors.iter().enumerate().rev() {
            for col in 0..k {
                let mut target = q.view_mut((c, col), (n - c, 1));
                let proj = 2.0 * v.dot(&target.column(0));
                target.column_mut(0).axpy(-proj, v, 1.0);
            }
        }

        Ok(Self { q, r })
    }

    /// Orthonormal basis of the column space, `n x k`.
    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    /// Upper-triangular factor, `k x k`.
    pub fn r(&self) -> &DMatrix<f64> {
        &self.r
    }

    pub fn rank(&self) -> usize {
        self.q.ncols()
    }

    /// `v - Q Qᵀ v`.
    pub fn residual(&self, v: &DVector<f64>) -> DVector<f64> {
        let coords = self.q.tr_mul(v);
        let mut out = v.clone();
        out.gemv(-1.0, &self.q, &coords, 1.0);
        out
    }

    pub fn rss(&self, y: &DVector<f64>) -> f64 {
        self.residual(y).norm_squared()
    }

    /// Least-squares coefficients by back substitution on `R b = Qᵀ y`.
    pub fn coefficients(&self, y: &DVector<f64>) -> DVector<f64> {
        let rhs = self.q.tr_mul(y);
        let k = self.r.nrows();
        let mut b = DVector::zeros(k);
        for i in (0..k).rev() {
            let mut s = rhs[i];
            for j in i + 1..k {
                s -= self.r[(i, j)] * b[j];
            }
            b[i] = s / self.r[(i, i)];
        }
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> DMatrix<f64> {
        DMatrix::from_row_slice(
            6,
            3,
            &[
                1.0, 2.0, 0.5, //
                1.0, -1.0, 3.0, //
                1.0, 4.0, -2.0, //
                1.0, 0.0, 1.0, //
                1.0, 3.0, 7.0, //
                1.0, -2.0, 0.0,
            ],
        )
    }

    #[test]
    fn reconstructs_input() {
        let a = sample();
        let qr = Qr::new(&a).unwrap();
        let back = qr.q() * qr.r();
        assert!((back - &a).abs().max() < 1e-12);
        let gram = qr.q().tr_mul(qr.q());
        assert!((gram - DMatrix::identity(3, 3)).abs().max() < 1e-13);
        for i in 0..3 {
            for j in 0..i {
                assert_eq!(qr.r()[(i, j)], 0.0);
            }
        }
    }

    #[test]
    fn detects_dependent_column() {
        let mut a = sample();
        let dep = a.column(0) * 2.0 - a.column(1) * 0.5;
        a.set_column(2, &dep);
        assert_eq!(Qr::new(&a).unwrap_err(), RankDeficiency { column: 2 });
    }

    #[test]
    fn coefficients_match_normal_equations() {
        let a = sample();
        let y = DVector::from_vec(vec![1.0, 2.0, -1.0, 0.5, 3.0, 2.5]);
        let qr = Qr::new(&a).unwrap();
        let b = qr.coefficients(&y);
        let normal = (a.transpose() * &a).lu().solve(&(a.transpose() * &y)).unwrap();
        assert!((b - normal).abs().max() < 1e-10);
    }

    #[test]
    fn residual_is_orthogonal() {
        let a = sample();
        let y = DVector::from_vec(vec![3.0, -2.0, 1.0, 0.0, 4.0, 1.5]);
        let qr = Qr::new(&a).unwrap();
        let res = qr.residual(&y);
        let ip = a.tr_mul(&res);
        assert!(ip.abs().max() < 1e-12 * y.norm() * a.norm());
    }
}
