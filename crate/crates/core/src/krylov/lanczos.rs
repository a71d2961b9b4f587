//! Hermitian Lanczos process and the Krylov approximation of `exp(-iτA)v`.

use num_complex::Complex64;

use crate::coeff::{dot, norm2, CoeffVector};
use crate::error::{Error, Result};
use crate::operator::Operator;

use super::tridiag::expm_tridiag_column;

/// A step with `β_k <= BREAKDOWN_TOL · max(1, ‖A v_k‖)` ends the recursion.
pub const BREAKDOWN_TOL: f64 = 1e-14;

/// Orthonormal Krylov basis `V_m` and the tridiagonal `T_m = V_m* A V_m`.
#[derive(Clone, Debug)]
pub struct LanczosFactorization {
    pub basis: Vec<Vec<Complex64>>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    /// Number of steps taken when an invariant subspace was found.
    pub breakdown_at: Option<usize>,
    /// `max_k |Im ⟨v_k, A v_k⟩|`; zero up to roundoff for Hermitian `A`.
    pub max_imag_residue: f64,
    /// `‖v_0‖₂`.
    pub start_norm: f64,
}

impl LanczosFactorization {
    pub fn steps(&self) -> usize {
        self.alpha.len()
    }

    /// `max_{j≠k} |⟨v_j, v_k⟩|`.
    pub fn orthogonality_loss(&self) -> f64 {
        let mut worst = 0.0f64;
        for (j, vj) in self.basis.iter().enumerate() {
            for vk in &self.basis[j + 1..] {
                worst = worst.max(dot(vj, vk).norm());
            }
        }
        worst
    }

    /// `‖v_0‖ V_m exp(-iτ T_m) e_1`.
    pub fn exp_apply(&self, tau: f64) -> Result<Vec<Complex64>> {
        let col = expm_tridiag_column(&self.alpha, &self.beta, tau)?;
        let n = self.basis[0].len();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (v, c) in self.basis.iter().zip(&col) {
            let c = c * self.start_norm;
            for (o, x) in out.iter_mut().zip(v) {
                *o += x * c;
            }
        }
        Ok(out)
    }
}

/// Runs at most `m` Lanczos steps from `v0`.
///
/// With `reorthogonalize`, every new direction is orthogonalized twice
/// against the whole basis.
pub fn lanczos(op: &dyn Operator, v0: &[Complex64], m: usize, reorthogonalize: bool) -> Result<LanczosFactorization> {
    if m == 0 {
        return Err(Error::InvalidArgument("Lanczos needs at least one step".into()));
    }
    if v0.len() != op.dim() {
        return Err(Error::DimensionMismatch { expected: op.dim(), got: v0.len() });
    }
    let start_norm = norm2(v0);
    if !start_norm.is_finite() {
        return Err(Error::NonFinite("Lanczos start vector".into()));
    }
    if start_norm == 0.0 {
        return Err(Error::InvalidArgument("Lanczos start vector is zero".into()));
    }
    let m = m.min(op.dim());
    let inv = 1.0 / start_norm;
    let mut basis = vec![v0.iter().map(|x| x * inv).collect::<Vec<_>>()];
    let mut alpha = Vec::with_capacity(m);
    let mut beta = Vec::with_capacity(m);
    let mut breakdown_at = None;
    let mut max_imag_residue = 0.0f64;
    let mut w = vec![Complex64::new(0.0, 0.0); op.dim()];

    for k in 0..m {
        op.apply(&basis[k], &mut w)?;
        if w.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite(format!("matvec in Lanczos step {}", k + 1)));
        }
        let scale = norm2(&w).max(1.0);
        let a = dot(&basis[k], &w);
        max_imag_residue = max_imag_residue.max(a.im.abs());
        alpha.push(a.re);
        for (wi, vi) in w.iter_mut().zip(&basis[k]) {
            *wi -= vi * a.re;
        }
        if k > 0 {
            let b = beta[k - 1];
            for (wi, vi) in w.iter_mut().zip(&basis[k - 1]) {
                *wi -= vi * b;
            }
        }
        if reorthogonalize {
            for _ in 0..2 {
                for v in &basis {
                    let c = dot(v, &w);
                    for (wi, vi) in w.iter_mut().zip(v) {
                        *wi -= vi * c;
                    }
                }
            }
        }
        if k + 1 == m {
            break;
        }
        let b = norm2(&w);
        if b <= BREAKDOWN_TOL * scale {
            breakdown_at = Some(k + 1);
            break;
        }
        beta.push(b);
        let inv = 1.0 / b;
        basis.push(w.iter().map(|x| x * inv).collect());
    }
    Ok(LanczosFactorization { basis, alpha, beta, breakdown_at, max_imag_residue, start_norm })
}

/// `exp(-iτA) v ≈ ‖v‖ V_m exp(-iτ T_m) e_1` with `m` Lanczos steps.
pub fn lanczos_exp_apply(op: &dyn Operator, v: &CoeffVector, tau: f64, m: usize) -> Result<CoeffVector> {
    let fact = lanczos(op, v.data(), m, false)?;
    CoeffVector::from_vec(v.set().clone(), fact.exp_apply(tau)?)
}

/// Slice version of [`lanczos_exp_apply`].
pub fn lanczos_exp_apply_slice(
    op: &dyn Operator,
    v: &[Complex64],
    tau: f64,
    m: usize,
    reorthogonalize: bool,
) -> Result<Vec<Complex64>> {
    lanczos(op, v, m, reorthogonalize)?.exp_apply(tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::DenseMatrixOperator;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
        let a = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
    }

    fn as_operator(a: &DMatrix<Complex64>) -> DenseMatrixOperator {
        let n = a.nrows();
        let entries = (0..n * n).map(|i| a[(i / n, i % n)]).collect();
        DenseMatrixOperator::new(n, entries).unwrap()
    }

    fn random_vector(n: usize, rng: &mut impl Rng) -> Vec<Complex64> {
        (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
    }

    #[test]
    fn diagonal_and_identity_break_down() {
        let diag = DenseMatrixOperator::new(
            3,
            vec![2.0, 0.0, 0.0, 0.0, 5.0, 0.0, 0.0, 0.0, 7.0].into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
        )
        .unwrap();
        let e1 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];
        let f = lanczos(&diag, &e1, 3, false).unwrap();
        assert_eq!(f.alpha, vec![2.0]);
        assert_eq!(f.breakdown_at, Some(1));

        let id = DenseMatrixOperator::new(
            2,
            vec![1.0, 0.0, 0.0, 1.0].into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
        )
        .unwrap();
        let v = [Complex64::new(0.6, 0.1), Complex64::new(-0.3, 0.7)];
        let f = lanczos(&id, &v, 2, false).unwrap();
        assert_eq!(f.steps(), 1);
        assert!((f.alpha[0] - 1.0).abs() < 1e-15);
        assert_eq!(f.breakdown_at, Some(1));
    }

    #[test]
    fn reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let a = random_hermitian(6, &mut rng);
        let op = as_operator(&a);
        let v = random_vector(6, &mut rng);
        let f = lanczos(&op, &v, 6, false).unwrap();
        assert_eq!(f.steps(), 6);
        let vm = DMatrix::from_fn(6, 6, |i, j| f.basis[j][i]);
        let t = DMatrix::from_fn(6, 6, |i, j| {
            let x = if i == j {
                f.alpha[i]
            } else if i + 1 == j {
                f.beta[i]
            } else if j + 1 == i {
                f.beta[j]
            } else {
                0.0
            };
            Complex64::new(x, 0.0)
        });
        let rebuilt = &vm * t * vm.adjoint();
        assert!((rebuilt - &a).camax() < 1e-10);
        for v in &f.basis {
            assert!((norm2(v) - 1.0).abs() < 1e-10);
        }
        assert!(f.orthogonality_loss() < 1e-8);
        assert!(f.beta.iter().all(|b| *b >= 0.0));
        assert!(f.max_imag_residue < 1e-12);
    }

    #[test]
    fn exponential_matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let a = random_hermitian(8, &mut rng);
        let op = as_operator(&a);
        let v = random_vector(8, &mut rng);
        let got = lanczos_exp_apply_slice(&op, &v, 0.1, 8, false).unwrap();
        let oracle = (&a * Complex64::new(0.0, -0.1)).exp() * nalgebra::DVector::from_vec(v.clone());
        for (g, o) in got.iter().zip(oracle.iter()) {
            assert!((g - o).norm() < 1e-11);
        }
        assert!((norm2(&got) - norm2(&v)).abs() < 1e-10);
    }

    #[test]
    fn reorthogonalization_keeps_basis_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_hermitian(30, &mut rng) * Complex64::new(50.0, 0.0);
        let op = as_operator(&a);
        let v = random_vector(30, &mut rng);
        let f = lanczos(&op, &v, 25, true).unwrap();
        assert!(f.orthogonality_loss() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let id = DenseMatrixOperator::new(1, vec![Complex64::new(1.0, 0.0)]).unwrap();
        assert!(lanczos(&id, &[Complex64::new(0.0, 0.0)], 1, false).is_err());
        assert!(lanczos(&id, &[Complex64::new(1.0, 0.0)], 0, false).is_err());
        assert!(lanczos(&id, &[Complex64::new(1.0, 0.0); 2], 1, false).is_err());
        let bad = DenseMatrixOperator::new(1, vec![Complex64::new(f64::NAN, 0.0)]).unwrap();
        assert!(matches!(lanczos(&bad, &[Complex64::new(1.0, 0.0)], 1, false), Err(Error::NonFinite(_))));
    }
}
