// Full and hyperbolic index sets, neighbours, restriction and extension.

use std::sync::Arc;

use hprop::index_set::{extend, restrict};
use hprop::{CoeffVector, IndexSet};

pub fn run_example() -> hprop::Result<()> {
    for k in [10, 20, 40, 80, 160] {
        let full = IndexSet::full(2, k)?;
        let hyp = IndexSet::hyperbolic(2, k)?;
        println!("N=2 K={k:>3}: full {:>6}  hyperbolic {:>4}", full.len(), hyp.len());
    }

    let small = Arc::new(IndexSet::hyperbolic(2, 3)?);
    let members: Vec<String> = small.iter().map(|k| format!("{k:?}")).collect();
    println!("hyperbolic(2,3) = {}", members.join(" "));
    match small.neighbor(&[1, 1], 0, 1)? {
        Some(i) => println!("(1,1)+e_0 -> ordinal {i}"),
        None => println!("(1,1)+e_0 is absent"),
    }

    let full = Arc::new(IndexSet::full(2, 3)?);
    let ones = CoeffVector::from_real(Arc::clone(&small), &vec![1.0; small.len()])?;
    let padded = extend(&ones, &full)?;
    let nonzero = padded.data().iter().filter(|c| c.norm() > 0.0).count();
    println!("extend: {nonzero} of {} slots set", full.len());
    let back = restrict(&padded, &small)?;
    println!("restrict(extend(v)) == v: {}", back.data() == ones.data());
    Ok(())
}

#[allow(dead_code)]
fn main() -> hprop::Result<()> {
    run_example()
}
