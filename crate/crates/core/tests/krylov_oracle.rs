//! Lanczos exponentials and Magnus steps against dense matrix exponentials.

use std::sync::Arc;

use hprop::fast_apply::FastHamiltonian;
use hprop::galerkin_oracle::{assemble_quad_galerkin, DenseHamiltonian};
use hprop::hermite_basis::gauss_hermite_rule;
use hprop::krylov::{lanczos_exp_apply_slice, MagnusScheme, Propagator};
use hprop::operator::{DenseMatrixOperator, Frozen, Operator};
use hprop::potential_approx::interpolate;
use hprop::{CoeffVector, IndexSet, PotentialKind, PotentialSpec};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn hermitian(n: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    let a = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

fn operator(a: &DMatrix<Complex64>) -> DenseMatrixOperator {
    let n = a.nrows();
    DenseMatrixOperator::new(n, (0..n * n).map(|i| a[(i / n, i % n)]).collect()).unwrap()
}

fn to_dense(op: &dyn Operator) -> DMatrix<Complex64> {
    let n = op.dim();
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        e[j] = Complex64::new(1.0, 0.0);
        for (i, y) in op.apply_vec(&e).unwrap().into_iter().enumerate() {
            m[(i, j)] = y;
        }
    }
    m
}

#[test]
fn full_krylov_space_reproduces_the_exponential() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for n in [1, 2, 5, 12, 32] {
        let a = hermitian(n, &mut rng) * Complex64::new(3.0, 0.0);
        let v: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.gen(), rng.gen())).collect();
        for tau in [0.05, 0.5] {
            let got = lanczos_exp_apply_slice(&operator(&a), &v, tau, n, true).unwrap();
            let want = (&a * Complex64::new(0.0, -tau)).exp() * DVector::from_vec(v.clone());
            let err = got.iter().zip(want.iter()).map(|(g, w)| (g - w).norm()).fold(0.0, f64::max);
            assert!(err < 1e-10, "n={n} tau={tau} err={err}");
        }
    }
}

#[test]
fn static_propagation_matches_dense_exponential() {
    let set = Arc::new(IndexSet::full(2, 6).unwrap());
    let approx = interpolate(&PotentialSpec::new(PotentialKind::Torsional, 2, 16.0).unwrap(), 8, 0.0).unwrap();
    let h = FastHamiltonian::new(Arc::clone(&set), approx).unwrap();
    let dense = to_dense(&h);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let y0 = CoeffVector::random_complex(Arc::clone(&set), &mut rng);
    let problem = Frozen(h);
    for scheme in [MagnusScheme::Midpoint, MagnusScheme::GaussLegendre2] {
        let mut prop = Propagator::new(scheme, 0.1, set.len());
        prop.reorthogonalize = true;
        let out = prop.run(&problem, &y0, 0.0, 10).unwrap();
        let want = (&dense * Complex64::new(0.0, -1.0)).exp() * DVector::from_column_slice(y0.data());
        let err = out.state.data().iter().zip(want.iter()).map(|(g, w)| (g - w).norm()).fold(0.0, f64::max);
        assert!(err < 1e-9, "{scheme}: {err}");
        assert!(out.max_norm_drift < 1e-10);
    }
}

#[test]
fn fast_and_dense_hamiltonians_coincide_on_full_sets() {
    let set = Arc::new(IndexSet::full(2, 9).unwrap());
    let approx = interpolate(&PotentialSpec::new(PotentialKind::Torsional, 2, 16.0).unwrap(), 6, 0.0).unwrap();
    let dense = DenseHamiltonian::new(assemble_quad_galerkin(&set, &approx, &gauss_hermite_rule(9).unwrap()).unwrap());
    let fast = FastHamiltonian::new(Arc::clone(&set), approx).unwrap();
    let diff = (to_dense(&dense) - to_dense(&fast)).camax();
    assert!(diff < 1e-12, "{diff}");
}
