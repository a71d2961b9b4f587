// Quadrature and reduction errors for the torsional potential.

use std::sync::Arc;

use hprop::error_lab::{interior_indices, make_decay_vector, quadrature_error, reduction_error};
use hprop::potential_approx::interpolate;
use hprop::{IndexSet, PotentialKind, PotentialSpec};

pub fn run_example() -> hprop::Result<()> {
    let approx = interpolate(&PotentialSpec::new(PotentialKind::Torsional, 2, 16.0)?, 8, 0.0)?;
    for k in [25, 50, 75] {
        let set = Arc::new(IndexSet::hyperbolic(2, k)?);
        let full = Arc::new(IndexSet::full(2, k)?);
        let v = make_decay_vector(&set, 5)?;
        let quad = quadrature_error(&set, &approx, &v)?;
        let red = reduction_error(&set, &full, &approx, &v)?;
        let interior = interior_indices(&set, &approx);
        let inner = interior.iter().map(|&i| red.components[i]).fold(0.0, f64::max);
        println!(
            "K={k}: E_quad {:.3e}  E_red {:.3e}  ({} interior indices, max {:.1e})",
            quad.max_norm,
            red.max_norm,
            interior.len(),
            inner
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> hprop::Result<()> {
    run_example()
}
