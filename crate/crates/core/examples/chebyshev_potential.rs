// Tensor Chebyshev interpolation of the built-in potentials.

use hprop::potential_approx::interpolate;
use hprop::{PotentialKind, PotentialSpec};

pub fn run_example() -> hprop::Result<()> {
    let torsional = PotentialSpec::new(PotentialKind::Torsional, 2, 16.0)?;
    for degree in [4, 6, 8] {
        let a = interpolate(&torsional, degree, 0.0)?;
        println!("torsional R={degree}: {} terms, interpolation error {:.2e}", a.len(), a.interpolation_error());
    }

    let hh = PotentialSpec::new(PotentialKind::HenonHeilesPerturbed, 2, 16.0)?;
    for t in [0.0, 0.5, 1.0] {
        let a = interpolate(&hh, 3, t)?;
        let x = [3.0, -2.0];
        println!(
            "henon-heiles t={t}: W(x)={:.6} W_pol(x)={:.6} ({} terms)",
            hh.evaluate(&x, t),
            a.eval(&x)?,
            a.len()
        );
    }
    print!("{}", interpolate(&hh, 3, 1.0)?.to_csv());
    Ok(())
}

#[allow(dead_code)]
fn main() -> hprop::Result<()> {
    run_example()
}
