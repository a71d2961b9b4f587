//! Symmetric tridiagonal eigenproblems and the exponential of `T_m`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Off-diagonal deflation tolerance relative to the neighboring diagonal.
pub const DEFLATION_TOL: f64 = 1e-14;

/// Eigen-decomposition `T = Q Λ Qᵀ` of a symmetric tridiagonal matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct TridiagEigen {
    pub values: Vec<f64>,
    /// Row-major `m × m`; column `j` is the eigenvector of `values[j]`.
    pub vectors: Vec<f64>,
}

impl TridiagEigen {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn vector_entry(&self, row: usize, col: usize) -> f64 {
        self.vectors[row * self.len() + col]
    }
}

fn check_tridiag(alpha: &[f64], beta: &[f64]) -> Result<()> {
    if alpha.is_empty() {
        return Err(Error::InvalidArgument("tridiagonal matrix must be non-empty".into()));
    }
    if beta.len() + 1 != alpha.len() {
        return Err(Error::DimensionMismatch { expected: alpha.len() - 1, got: beta.len() });
    }
    if alpha.iter().chain(beta).any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("tridiagonal entries".into()));
    }
    Ok(())
}

/// Implicit-shift QL iteration with eigenvector accumulation, at most `30 m`
/// sweeps in total.
pub fn tridiag_eigen(alpha: &[f64], beta: &[f64]) -> Result<TridiagEigen> {
    check_tridiag(alpha, beta)?;
    let n = alpha.len();
    let mut d = alpha.to_vec();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(beta);
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    let max_iter = 30 * n;
    let mut iterations = 0;

    for l in 0..n {
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m] == 0.0 || e[m].abs() <= DEFLATION_TOL * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > max_iter {
                return Err(Error::EigenNoConvergence { iterations: max_iter });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    let zf = z[k * n + i + 1];
                    let zi = z[k * n + i];
                    z[k * n + i + 1] = s * zi + c * zf;
                    z[k * n + i] = c * zi - s * zf;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(TridiagEigen { values: d, vectors: z })
}

/// First column of `exp(-i τ T)`, i.e. `Q exp(-i τ Λ) Qᵀ e_1`.
pub fn expm_tridiag_column(alpha: &[f64], beta: &[f64], tau: f64) -> Result<Vec<Complex64>> {
    if !tau.is_finite() {
        return Err(Error::NonFinite(format!("time scale {tau}")));
    }
    let eig = tridiag_eigen(alpha, beta)?;
    let n = eig.len();
    let phase: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(eig.vector_entry(0, j), -tau * eig.values[j]))
        .collect();
    Ok((0..n)
        .map(|i| (0..n).map(|j| phase[j] * eig.vector_entry(i, j)).sum())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, SymmetricEigen};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dense(alpha: &[f64], beta: &[f64]) -> DMatrix<f64> {
        let n = alpha.len();
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        })
    }

    #[test]
    fn eigenvalues_match_nalgebra() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in [1, 2, 3, 7, 20, 32] {
            let alpha: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let beta: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(0.0..3.0)).collect();
            let eig = tridiag_eigen(&alpha, &beta).unwrap();
            let mut ours = eig.values.clone();
            ours.sort_by(f64::total_cmp);
            let mut theirs: Vec<f64> = SymmetricEigen::new(dense(&alpha, &beta)).eigenvalues.iter().copied().collect();
            theirs.sort_by(f64::total_cmp);
            for (a, b) in ours.iter().zip(&theirs) {
                assert!((a - b).abs() < 1e-12, "n={n}: {a} vs {b}");
            }
            // T q = λ q and Qᵀ Q = I
            let t = dense(&alpha, &beta);
            let q = DMatrix::from_row_slice(n, n, &eig.vectors);
            let resid = &t * &q - &q * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(eig.values.clone()));
            assert!(resid.amax() < 1e-12);
            assert!((q.transpose() * &q - DMatrix::identity(n, n)).amax() < 1e-13);
        }
    }

    #[test]
    fn exponential_column() {
        let col = expm_tridiag_column(&[2.0], &[], 0.3).unwrap();
        assert!((col[0] - Complex64::from_polar(1.0, -0.6)).norm() < 1e-15);
        let col = expm_tridiag_column(&[1.0, 2.0, 3.0], &[0.5, 0.7], 0.0).unwrap();
        assert!((col[0] - 1.0).norm() < 1e-15 && col[1].norm() < 1e-15 && col[2].norm() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let alpha: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let beta: Vec<f64> = (0..2).map(|_| rng.gen_range(0.0..2.0)).collect();
            let tau = rng.gen_range(0.0..2.0);
            let col = expm_tridiag_column(&alpha, &beta, tau).unwrap();
            let a = dense(&alpha, &beta).map(|x| Complex64::new(0.0, -tau * x));
            let oracle = a.exp();
            for i in 0..3 {
                assert!((col[i] - oracle[(i, 0)]).norm() < 1e-12);
            }
            let norm: f64 = col.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(tridiag_eigen(&[], &[]).is_err());
        assert!(tridiag_eigen(&[1.0, 2.0], &[]).is_err());
        assert!(tridiag_eigen(&[1.0, f64::NAN], &[1.0]).is_err());
        assert!(expm_tridiag_column(&[1.0], &[], f64::INFINITY).is_err());
    }

    #[test]
    fn zero_diagonal_blocks() {
        let eig = tridiag_eigen(&[0.0, 0.0], &[1.0]).unwrap();
        let mut v = eig.values.clone();
        v.sort_by(f64::total_cmp);
        assert!((v[0] + 1.0).abs() < 1e-14 && (v[1] - 1.0).abs() < 1e-14);
    }
}
