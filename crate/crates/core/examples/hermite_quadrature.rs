// Hermite functions, the Gauss–Hermite rule and the support condition.

use hprop::hermite_basis::{
    check_support_condition, eval_hermite_functions, gauss_hermite_rule, gaussian_moment, hermite_table,
};

/// `∫ |x|^p e^{-x²} dx = Γ((p+1)/2)`.
fn absolute_moment(p: u32) -> f64 {
    if p % 2 == 0 {
        gaussian_moment(p)
    } else {
        (1..=p / 2).map(f64::from).product()
    }
}

pub fn run_example() -> hprop::Result<()> {
    let table = eval_hermite_functions(0.5, 4, 1.0)?;
    println!("phi_0..4(0.5) = {:?}", table.values);

    let rule = gauss_hermite_rule(40)?;
    let worst = (0..=81u32)
        .map(|p| {
            // odd moments vanish; measure them against ∫|x|^p e^{-x²}
            let scale = absolute_moment(p);
            let got = rule.integrate(|x| x.powi(p as i32));
            (got - gaussian_moment(p)).abs() / scale
        })
        .fold(0.0, f64::max);
    println!("order 40: {} nodes, worst moment error up to p=81: {worst:.2e}", rule.len());

    let k = 60;
    let rule = gauss_hermite_rule(k)?;
    let n = rule.len();
    let phi = hermite_table(&rule.nodes, k);
    let mut gram = 0.0f64;
    for j in 0..=k {
        for i in 0..=k {
            let g: f64 = (0..n).map(|m| rule.modified_weights[m] * phi[j * n + m] * phi[i * n + m]).sum();
            gram = gram.max((g - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    println!("discrete orthonormality at K={k}: {gram:.2e}");

    for k in [20, 100, 200] {
        let check = check_support_condition(1.0, 16.0, k);
        match check.warning_message(1.0, 16.0, k) {
            Some(w) => println!("{w}"),
            None => println!("K={k}: support condition holds"),
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> hprop::Result<()> {
    run_example()
}
