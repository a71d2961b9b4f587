// Wall time of the fast algorithm against dense assembly plus product.

use hprop::cli::bench_point;
use hprop::{PotentialKind, PotentialSpec};

pub fn run_example() -> hprop::Result<()> {
    let spec = PotentialSpec::new(PotentialKind::Torsional, 2, 16.0)?;
    for k in [10, 20, 40] {
        let row = bench_point(2, k, &spec, 8, 0)?;
        println!(
            "K={k:>3} size {:>4}: fast {:.2e}s dense {:.2e}s ratio {:.0}",
            row.size,
            row.fast_seconds,
            row.dense_seconds.unwrap_or(f64::NAN),
            row.ratio().unwrap_or(f64::NAN)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> hprop::Result<()> {
    run_example()
}
