//! Thin wrappers over `faer` for the dense kernels used by the solvers.

use crate::error::{Error, Result};
use faer::linalg::solvers::{PartialPivLu, Solve};
use faer::{Mat, Side};

/// Factored square system with a 1-norm condition estimate.
pub(crate) struct Factored {
    matrix: Mat<f64>,
    lu: PartialPivLu<f64>,
}

/// Output of [`Factored::solve_refined`].
pub(crate) struct RefinedSolution {
    pub x: Vec<f64>,
    /// `‖δ‖∞ / ‖x‖∞` of the refinement step.
    pub correction: f64,
}

impl Factored {
    pub fn new(matrix: Mat<f64>) -> Self {
        let lu = matrix.partial_piv_lu();
        Self { matrix, lu }
    }

    fn solve_vec(&self, b: &[f64]) -> Vec<f64> {
        let mut rhs = Mat::from_fn(b.len(), 1, |i, _| b[i]);
        self.lu.solve_in_place(rhs.as_mut());
        (0..b.len()).map(|i| rhs[(i, 0)]).collect()
    }

    fn solve_transpose_vec(&self, b: &[f64]) -> Vec<f64> {
        let mut rhs = Mat::from_fn(b.len(), 1, |i, _| b[i]);
        self.lu.solve_transpose_in_place(rhs.as_mut());
        (0..b.len()).map(|i| rhs[(i, 0)]).collect()
    }

    /// Direct solve followed by one step of iterative refinement.
    pub fn solve_refined(&self, b: &[f64]) -> Result<RefinedSolution> {
        let n = b.len();
        let mut x = self.solve_vec(b);
        let mut r = vec![0.0; n];
        for (i, ri) in r.iter_mut().enumerate() {
            *ri = b[i]
                - x.iter()
                    .enumerate()
                    .map(|(j, xj)| self.matrix[(i, j)] * xj)
                    .sum::<f64>();
        }
        let d = self.solve_vec(&r);
        let mut dmax = 0.0_f64;
        let mut xmax = 0.0_f64;
        for i in 0..n {
            x[i] += d[i];
            dmax = dmax.max(d[i].abs());
            xmax = xmax.max(x[i].abs());
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical(
                "linear solve produced non-finite values".into(),
            ));
        }
        Ok(RefinedSolution {
            x,
            correction: if xmax > 0.0 { dmax / xmax } else { 0.0 },
        })
    }

    fn norm1(&self) -> f64 {
        let n = self.matrix.ncols();
        (0..n)
            .map(|j| (0..n).map(|i| self.matrix[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Hager-Higham estimate of `‖A‖₁‖A⁻¹‖₁`.
    pub fn condition_estimate(&self) -> f64 {
        let n = self.matrix.nrows();
        if n == 0 {
            return 1.0;
        }
        let mut x = vec![1.0 / n as f64; n];
        let mut est = 0.0;
        for _ in 0..5 {
            let y = self.solve_vec(&x);
            est = y.iter().map(|v| v.abs()).sum::<f64>();
            let sgn: Vec<f64> = y
                .iter()
                .map(|&v| if v >= 0.0 { 1.0 } else { -1.0 })
                .collect();
            let z = self.solve_transpose_vec(&sgn);
            let (jmax, zmax) = z
                .iter()
                .enumerate()
                .map(|(j, v)| (j, v.abs()))
                .fold((0, 0.0), |acc, it| if it.1 > acc.1 { it } else { acc });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
            if zmax <= ztx {
                break;
            }
            x = vec![0.0; n];
            x[jmax] = 1.0;
        }
        // alternative lower bound from Higham's test vector
        let alt: Vec<f64> = (0..n)
            .map(|i| {
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                s * (1.0 + i as f64 / (n.max(2) - 1) as f64)
            })
            .collect();
        let y = self.solve_vec(&alt);
        let alt_est = 2.0 * y.iter().map(|v| v.abs()).sum::<f64>() / (3.0 * n as f64);
        (self.norm1() * est.max(alt_est)).max(1.0)
    }
}

/// Eigenvalues of a symmetric matrix, ascending.
pub(crate) fn symmetric_eigenvalues(m: &Mat<f64>) -> Result<Vec<f64>> {
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Numerical(format!("symmetric eigensolver failed: {e:?}")))
}

/// Truncated-SVD least squares.
pub(crate) struct Lstsq {
    pub coefficients: Vec<f64>,
    /// Singular values of the column-normalised design, descending.
    pub singular_values: Vec<f64>,
    pub rank: usize,
    /// `σ_max / σ_min` of the retained modes.
    pub condition: f64,
}

/// Solve `min ‖A c − y‖` with columns scaled to unit norm, discarding
/// singular values below `rel_threshold · σ_max`.
pub(crate) fn lstsq_svd(design: &[Vec<f64>], y: &[f64], rel_threshold: f64) -> Result<Lstsq> {
    let m = y.len();
    let p = design.first().map_or(0, Vec::len);
    if m == 0 || p == 0 || design.len() != m {
        return Err(Error::Argument("empty or ragged design matrix".into()));
    }
    let scale: Vec<f64> = (0..p)
        .map(|j| design.iter().map(|row| row[j] * row[j]).sum::<f64>().sqrt())
        .collect();
    if scale.iter().any(|&s| s == 0.0 || !s.is_finite()) {
        return Err(Error::Argument(
            "design matrix has a zero or non-finite column".into(),
        ));
    }
    let a = Mat::from_fn(m, p, |i, j| design[i][j] / scale[j]);
    let svd = a
        .thin_svd()
        .map_err(|e| Error::Numerical(format!("SVD failed: {e:?}")))?;
    let u = svd.U();
    let v = svd.V();
    let s: Vec<f64> = (0..p.min(m)).map(|k| svd.S()[k]).collect();
    let smax = s.first().copied().unwrap_or(0.0);
    let rank = s
        .iter()
        .take_while(|&&sk| sk >= rel_threshold * smax && sk > 0.0)
        .count();
    if rank == 0 {
        return Err(Error::Numerical(
            "all singular values fall below the truncation threshold".into(),
        ));
    }
    let mut c = vec![0.0; p];
    for k in 0..rank {
        let uty: f64 = (0..m).map(|i| u[(i, k)] * y[i]).sum();
        let f = uty / s[k];
        for (j, cj) in c.iter_mut().enumerate() {
            *cj += v[(j, k)] * f;
        }
    }
    for (cj, sj) in c.iter_mut().zip(&scale) {
        *cj /= sj;
    }
    Ok(Lstsq {
        coefficients: c,
        condition: smax / s[rank - 1],
        singular_values: s.iter().map(|x| x / smax).collect(),
        rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refined_solve_and_condition() {
        let a = Mat::from_fn(3, 3, |i, j| {
            if i == j {
                4.0
            } else {
                1.0 / (1.0 + (i + j) as f64)
            }
        });
        let f = Factored::new(a.clone());
        let b = [1.0, 2.0, 3.0];
        let x = f.solve_refined(&b).unwrap().x;
        for i in 0..3 {
            let r: f64 = (0..3).map(|j| a[(i, j)] * x[j]).sum();
            assert!((r - b[i]).abs() < 1e-14);
        }
        let c = f.condition_estimate();
        assert!((1.0..10.0).contains(&c));
    }

    #[test]
    fn condition_of_diagonal() {
        let a = Mat::from_fn(4, 4, |i, j| if i == j { 10f64.powi(i as i32) } else { 0.0 });
        let c = Factored::new(a).condition_estimate();
        assert!((c - 1000.0).abs() / 1000.0 < 1e-12);
    }

    #[test]
    fn lstsq_recovers_line() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let design: Vec<Vec<f64>> = xs.iter().map(|&x| vec![1.0, x]).collect();
        let y: Vec<f64> = xs.iter().map(|&x| 0.5 - 2.0 * x).collect();
        let fit = lstsq_svd(&design, &y, 1e-12).unwrap();
        assert!((fit.coefficients[0] - 0.5).abs() < 1e-13);
        assert!((fit.coefficients[1] + 2.0).abs() < 1e-13);
        assert_eq!(fit.rank, 2);
    }

    #[test]
    fn symmetric_eigen_ascending() {
        let a = Mat::from_fn(2, 2, |i, j| if i == j { 2.0 } else { 1.0 });
        let e = symmetric_eigenvalues(&a).unwrap();
        assert!((e[0] - 1.0).abs() < 1e-14 && (e[1] - 3.0).abs() < 1e-14);
    }
}
