// Midpoint and two-stage Gauss–Legendre Magnus propagation of the driven
// Hénon–Heiles problem on [0, 1].

use hprop::error_lab::{propagate_and_compare, ProblemConfig, ReferenceConfig, ReferenceSolution};
use hprop::krylov::MagnusScheme;
use hprop::PotentialKind;

pub fn run_example() -> hprop::Result<()> {
    let problem = ProblemConfig {
        dim: 2,
        bound: 12,
        degree: 3,
        halfwidth: 16.0,
        beta: 3,
        potential: PotentialKind::HenonHeilesPerturbed,
        exact_harmonic: true,
    };
    let reference = ReferenceSolution::compute(&problem, ReferenceConfig { step: 1e-3, ..Default::default() }, 1.0)?;
    for scheme in [MagnusScheme::Midpoint, MagnusScheme::GaussLegendre2] {
        for h in [0.1, 0.05, 0.025] {
            let e = propagate_and_compare(&problem, scheme, h, 7, &reference)?;
            println!(
                "{:<8} h={h:<6} error {:.3e}  perturbation {:.3e}  drift {:.1e}",
                scheme.as_str(),
                e.scheme_error,
                e.perturbation_error,
                e.max_norm_drift
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> hprop::Result<()> {
    run_example()
}
