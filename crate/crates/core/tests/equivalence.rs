//! On full index sets the fast algorithm equals the Gauss–Hermite Galerkin
//! matrix of order K; on reduced sets it generally does not.

use std::sync::Arc;

use hprop::fast_apply::{fast_algorithm, fast_algorithm_with_order};
use hprop::galerkin_oracle::assemble_quad_galerkin;
use hprop::hermite_basis::gauss_hermite_rule;
use hprop::index_set::MultiIndex;
use hprop::{ChebApprox, CoeffVector, IndexSet};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn approx_strategy(dim: usize) -> impl Strategy<Value = ChebApprox> {
    prop::collection::vec((prop::collection::vec(0u32..5, dim), -2.0f64..2.0), 1..6).prop_map(move |terms| {
        let terms = terms.into_iter().map(|(r, a)| (MultiIndex::new(r), a)).collect();
        ChebApprox::from_terms(dim, 6.0, terms).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fast_equals_quadrature_on_full_sets(
        (dim, approx) in (1usize..=3).prop_flat_map(|d| (Just(d), approx_strategy(d))),
        bound in 0usize..6,
        seed in any::<u64>(),
    ) {
        let set = Arc::new(IndexSet::full(dim, bound).unwrap());
        let rule = gauss_hermite_rule(bound).unwrap();
        let dense = assemble_quad_galerkin(&set, &approx, &rule).unwrap();
        let v = CoeffVector::random_complex(Arc::clone(&set), &mut ChaCha8Rng::seed_from_u64(seed));
        let fast = fast_algorithm(&set, &approx, &v).unwrap();
        let scale = approx.terms().iter().map(|(_, a)| a.abs()).sum::<f64>().max(1.0);
        prop_assert!(fast.max_abs_diff(&dense.matvec(&v).unwrap()).unwrap() <= 1e-11 * scale * v.norm_inf());
    }

    #[test]
    fn axis_order_is_irrelevant_on_full_sets(
        approx in approx_strategy(3),
        bound in 0usize..5,
        seed in any::<u64>(),
    ) {
        let set = Arc::new(IndexSet::full(3, bound).unwrap());
        let v = CoeffVector::random_real(Arc::clone(&set), &mut ChaCha8Rng::seed_from_u64(seed));
        let a = fast_algorithm_with_order(&set, &approx, &v, &[0, 1, 2]).unwrap();
        let b = fast_algorithm_with_order(&set, &approx, &v, &[2, 0, 1]).unwrap();
        prop_assert!(a.max_abs_diff(&b).unwrap() <= 1e-12 * v.norm_inf() * 50.0);
    }
}

#[test]
fn reduced_sets_differ_from_quadrature() {
    let set = Arc::new(IndexSet::hyperbolic(2, 8).unwrap());
    let approx = ChebApprox::from_terms(2, 6.0, vec![(MultiIndex::new(vec![2, 2]), 1.0)]).unwrap();
    let dense = assemble_quad_galerkin(&set, &approx, &gauss_hermite_rule(8).unwrap()).unwrap();
    let v = CoeffVector::from_real(Arc::clone(&set), &vec![1.0; set.len()]).unwrap();
    let d = fast_algorithm(&set, &approx, &v).unwrap().max_abs_diff(&dense.matvec(&v).unwrap()).unwrap();
    assert!(d > 1e-6, "{d}");
}
