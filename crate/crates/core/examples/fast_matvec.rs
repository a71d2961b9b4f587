// Matrix-free application of the potential compared with the assembled
// Gauss–Hermite Galerkin matrix.

use std::sync::Arc;

use hprop::error_lab::make_decay_vector;
use hprop::fast_apply::fast_algorithm;
use hprop::galerkin_oracle::assemble_quad_galerkin;
use hprop::hermite_basis::gauss_hermite_rule;
use hprop::potential_approx::interpolate;
use hprop::{IndexSet, PotentialKind, PotentialSpec};

pub fn run_example() -> hprop::Result<()> {
    let spec = PotentialSpec::new(PotentialKind::Torsional, 2, 16.0)?;
    let approx = interpolate(&spec, 8, 0.0)?;
    for k in [8, 16] {
        let rule = gauss_hermite_rule(k)?;
        for set in [IndexSet::full(2, k)?, IndexSet::hyperbolic(2, k)?] {
            let set = Arc::new(set);
            let v = make_decay_vector(&set, 3)?;
            let fast = fast_algorithm(&set, &approx, &v)?;
            let dense = assemble_quad_galerkin(&set, &approx, &rule)?.matvec(&v)?;
            println!(
                "K={k:>2} {:<10} size {:>3}: max |fast - W^GH v| = {:.2e}",
                set.kind().to_string(),
                set.len(),
                fast.max_abs_diff(&dense)?
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> hprop::Result<()> {
    run_example()
}
