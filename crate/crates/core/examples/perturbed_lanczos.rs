// One Lanczos exponential with the fast matvec versus the assembled one,
// with the harmonic part applied through the fast algorithm or exactly.

use hprop::error_lab::{lanczos_perturbation_error, ProblemConfig};
use hprop::PotentialKind;

pub fn run_example() -> hprop::Result<()> {
    for exact_harmonic in [false, true] {
        let config = ProblemConfig {
            dim: 2,
            bound: 10,
            degree: 8,
            halfwidth: 16.0,
            beta: 3,
            potential: PotentialKind::TorsionalMinusHarmonic,
            exact_harmonic,
        };
        for h in [0.1, 0.05, 0.025] {
            let r = lanczos_perturbation_error(&config, h, 5)?;
            println!(
                "exact_harmonic={exact_harmonic:<5} h={h:<6} error {:.3e}  bound {:.2e}  |F| {:.2e}",
                r.error, r.bound, r.f_norm
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> hprop::Result<()> {
    run_example()
}
