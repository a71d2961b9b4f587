// Dense coordinate, quadrature and exact Galerkin matrices, and the
// diagonalization of the coordinate matrices by the quadrature nodes.

use std::sync::Arc;

use hprop::galerkin_oracle::{
    assemble_coordinate, assemble_exact_galerkin, assemble_quad_galerkin, verify_diagonalization,
};
use hprop::hermite_basis::gauss_hermite_rule;
use hprop::potential_approx::interpolate;
use hprop::{IndexSet, PotentialKind, PotentialSpec};

pub fn run_example() -> hprop::Result<()> {
    let set = Arc::new(IndexSet::full(1, 4)?);
    let x = assemble_coordinate(&set, 0)?;
    print!("{}", x.to_csv());

    let set = Arc::new(IndexSet::hyperbolic(2, 20)?);
    let approx = interpolate(&PotentialSpec::new(PotentialKind::Torsional, 2, 16.0)?, 8, 0.0)?;
    let quad = assemble_quad_galerkin(&set, &approx, &gauss_hermite_rule(20)?)?;
    let exact = assemble_exact_galerkin(&set, &approx)?;
    println!(
        "hyperbolic(2,20): |W^GH - W| = {:.2e}, asymmetry {:.1e}",
        quad.max_abs_diff(&exact)?,
        quad.max_asymmetry()
    );

    for (k, n) in [(10, 1), (30, 1), (12, 2)] {
        let r = verify_diagonalization(k, n)?;
        println!("K={k} N={n}: |U^T Xi U - X| = {:.2e}, |U^T U - I| = {:.2e}", r.transform, r.orthogonality);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> hprop::Result<()> {
    run_example()
}
