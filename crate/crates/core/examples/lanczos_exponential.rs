// Krylov approximation of exp(-iτA)v with a small number of Lanczos steps.

use std::sync::Arc;

use hprop::error_lab::make_decay_vector;
use hprop::fast_apply::FastHamiltonian;
use hprop::krylov::{lanczos, lanczos_exp_apply};
use hprop::potential_approx::interpolate;
use hprop::{IndexSet, PotentialKind, PotentialSpec};

pub fn run_example() -> hprop::Result<()> {
    let set = Arc::new(IndexSet::hyperbolic(2, 30)?);
    let approx = interpolate(&PotentialSpec::new(PotentialKind::Torsional, 2, 16.0)?, 8, 0.0)?;
    let h = FastHamiltonian::new(Arc::clone(&set), approx)?;
    let v = make_decay_vector(&set, 3)?;

    let reference = lanczos(&h, v.data(), 60, true)?.exp_apply(0.1)?;
    for m in [2, 4, 6, 8, 10] {
        let y = lanczos_exp_apply(&h, &v, 0.1, m)?;
        let err = y.data().iter().zip(&reference).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        println!("m={m:>2}: |y_m - y_60| = {err:.2e}, norm {:.15}", y.norm2());
    }
    let f = lanczos(&h, v.data(), 8, false)?;
    println!("alpha = {:?}", f.alpha);
    println!("imaginary residue {:.1e}", f.max_imag_residue);
    Ok(())
}

#[allow(dead_code)]
fn main() -> hprop::Result<()> {
    run_example()
}
