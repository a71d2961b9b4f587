//! Every cargo example runs to completion.

macro_rules! example {
    ($name:ident) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", stringify!($name), ".rs"));
        }

        #[test]
        fn $name() {
            $name::run_example().unwrap();
        }
    };
}

example!(index_sets);
example!(hermite_quadrature);
example!(chebyshev_potential);
example!(fast_matvec);
example!(galerkin_matrices);
example!(lanczos_exponential);
example!(magnus_propagation);
example!(error_study);
example!(perturbed_lanczos);
example!(benchmark);
example!(cli_sweep);
