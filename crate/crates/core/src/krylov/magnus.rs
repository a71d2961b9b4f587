//! Exponential Magnus integrators with Lanczos exponentials.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::coeff::{norm2, CoeffVector};
use crate::error::{Error, Result};
use crate::operator::{check_lengths, Operator, TimeDependentOperator};

use super::lanczos::lanczos;

/// Gauss–Legendre nodes `½ ∓ √3/6`.
const GL2_NODES: [f64; 2] = [0.5 - 0.288_675_134_594_812_9, 0.5 + 0.288_675_134_594_812_9];
/// `√3 / 12`
const GL2_COMMUTATOR: f64 = 0.144_337_567_297_406_43;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MagnusScheme {
    /// `exp(-i h A(t + h/2))`, order 2.
    Midpoint,
    /// Two-stage Gauss–Legendre with one commutator, order 4.
    GaussLegendre2,
}

impl MagnusScheme {
    pub fn order(self) -> u32 {
        match self {
            MagnusScheme::Midpoint => 2,
            MagnusScheme::GaussLegendre2 => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MagnusScheme::Midpoint => "midpoint",
            MagnusScheme::GaussLegendre2 => "gl2",
        }
    }
}

impl fmt::Display for MagnusScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MagnusScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "midpoint" => Ok(MagnusScheme::Midpoint),
            "gl2" => Ok(MagnusScheme::GaussLegendre2),
            other => Err(Error::Parse(format!("unknown scheme {other:?} (expected midpoint or gl2)"))),
        }
    }
}

/// `B = ½(A₁ + A₂) − i (√3/12) h [A₂, A₁]`, applied without forming any
/// matrix. `B` is Hermitian whenever `A₁` and `A₂` are.
pub struct Gl2Generator<'a> {
    a1: Box<dyn Operator + 'a>,
    a2: Box<dyn Operator + 'a>,
    h: f64,
}

impl<'a> Gl2Generator<'a> {
    pub fn new(problem: &'a dyn TimeDependentOperator, t: f64, h: f64) -> Result<Self> {
        Ok(Gl2Generator {
            a1: problem.at(t + GL2_NODES[0] * h)?,
            a2: problem.at(t + GL2_NODES[1] * h)?,
            h,
        })
    }
}

impl Operator for Gl2Generator<'_> {
    fn dim(&self) -> usize {
        self.a1.dim()
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) -> Result<()> {
        check_lengths(self.dim(), x, y)?;
        let u1 = self.a1.apply_vec(x)?;
        let u2 = self.a2.apply_vec(x)?;
        let a2u1 = self.a2.apply_vec(&u1)?;
        let a1u2 = self.a1.apply_vec(&u2)?;
        let c = Complex64::new(0.0, -GL2_COMMUTATOR * self.h);
        for i in 0..y.len() {
            y[i] = (u1[i] + u2[i]) * 0.5 + c * (a2u1[i] - a1u2[i]);
        }
        Ok(())
    }
}

/// One step `y(t) → y(t + h)`.
pub fn magnus_step(
    scheme: MagnusScheme,
    problem: &dyn TimeDependentOperator,
    y: &[Complex64],
    t: f64,
    h: f64,
    m: usize,
    reorthogonalize: bool,
) -> Result<Vec<Complex64>> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidArgument(format!("step size must be positive, got {h}")));
    }
    match scheme {
        MagnusScheme::Midpoint => {
            let a = problem.at(t + 0.5 * h)?;
            lanczos(a.as_ref(), y, m, reorthogonalize)?.exp_apply(h)
        }
        MagnusScheme::GaussLegendre2 => {
            let b = Gl2Generator::new(problem, t, h)?;
            lanczos(&b, y, m, reorthogonalize)?.exp_apply(h)
        }
    }
}

/// Fixed-step propagation settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Propagator {
    pub scheme: MagnusScheme,
    pub step: f64,
    pub lanczos_steps: usize,
    pub reorthogonalize: bool,
}

/// Final state and diagnostics of a propagation.
#[derive(Clone, Debug)]
pub struct Propagation {
    pub state: CoeffVector,
    pub steps: usize,
    pub final_time: f64,
    /// `max_n |‖y^{n+1}‖ − ‖y^n‖|`.
    pub max_norm_drift: f64,
}

impl Propagator {
    pub fn new(scheme: MagnusScheme, step: f64, lanczos_steps: usize) -> Self {
        Propagator { scheme, step, lanczos_steps, reorthogonalize: false }
    }

    /// Takes `steps` steps from `t0`, calling `observe(n, t_n, y^n)` after each.
    pub fn run_with(
        &self,
        problem: &dyn TimeDependentOperator,
        y0: &CoeffVector,
        t0: f64,
        steps: usize,
        mut observe: impl FnMut(usize, f64, &[Complex64]),
    ) -> Result<Propagation> {
        if y0.len() != problem.dim() {
            return Err(Error::DimensionMismatch { expected: problem.dim(), got: y0.len() });
        }
        let mut y = y0.data().to_vec();
        let mut norm = norm2(&y);
        let mut drift = 0.0f64;
        for n in 0..steps {
            let t = t0 + n as f64 * self.step;
            y = magnus_step(self.scheme, problem, &y, t, self.step, self.lanczos_steps, self.reorthogonalize)?;
            let next = norm2(&y);
            drift = drift.max((next - norm).abs());
            norm = next;
            observe(n + 1, t0 + (n + 1) as f64 * self.step, &y);
        }
        Ok(Propagation {
            state: CoeffVector::from_vec(y0.set().clone(), y)?,
            steps,
            final_time: t0 + steps as f64 * self.step,
            max_norm_drift: drift,
        })
    }

    pub fn run(&self, problem: &dyn TimeDependentOperator, y0: &CoeffVector, t0: f64, steps: usize) -> Result<Propagation> {
        self.run_with(problem, y0, t0, steps, |_, _, _| {})
    }
}

/// Number of steps of size `h` covering `[t0, t1]`; the interval must be an
/// integer multiple of `h` up to roundoff.
pub fn step_count(t0: f64, t1: f64, h: f64) -> Result<usize> {
    let n = (t1 - t0) / h;
    let rounded = n.round();
    if !(h > 0.0) || rounded < 0.0 || (n - rounded).abs() > 1e-9 * rounded.max(1.0) {
        return Err(Error::InvalidArgument(format!("interval [{t0}, {t1}] is not a multiple of h = {h}")));
    }
    Ok(rounded as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fast_apply::{FastHamiltonian, FastProblem};
    use crate::index_set::IndexSet;
    use crate::operator::{DenseMatrixOperator, Frozen};
    use crate::potential_approx::{ChebApprox, PotentialKind, PotentialSpec};
    use nalgebra::{DMatrix, DVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    #[test]
    fn scheme_metadata() {
        assert_eq!(MagnusScheme::Midpoint.order(), 2);
        assert_eq!(MagnusScheme::GaussLegendre2.order(), 4);
        assert_eq!("gl2".parse::<MagnusScheme>().unwrap(), MagnusScheme::GaussLegendre2);
        assert!("rk4".parse::<MagnusScheme>().is_err());
        assert!((GL2_NODES[1] - GL2_NODES[0] - 3f64.sqrt() / 3.0).abs() < 1e-16);
        assert!((GL2_COMMUTATOR - 3f64.sqrt() / 12.0).abs() < 1e-17);
    }

    #[test]
    fn static_generator_gives_plain_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 10;
        let a = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let a = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
        let entries = (0..n * n).map(|i| a[(i / n, i % n)]).collect();
        let problem = Frozen(DenseMatrixOperator::new(n, entries).unwrap());
        let y: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0)).collect();
        let oracle = (&a * Complex64::new(0.0, -0.2)).exp() * DVector::from_vec(y.clone());
        for scheme in [MagnusScheme::Midpoint, MagnusScheme::GaussLegendre2] {
            let got = magnus_step(scheme, &problem, &y, 0.3, 0.2, n, false).unwrap();
            for (g, o) in got.iter().zip(oracle.iter()) {
                assert!((g - o).norm() < 1e-10, "{scheme}");
            }
        }
    }

    #[test]
    fn harmonic_oscillator_is_exact() {
        let set = Arc::new(IndexSet::hyperbolic(2, 12).unwrap());
        let zero = ChebApprox::from_terms(2, 16.0, vec![]).unwrap();
        let problem = Frozen(FastHamiltonian::new(set.clone(), zero).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let y0 = CoeffVector::random_complex(set.clone(), &mut rng);
        let t = 0.7;
        for scheme in [MagnusScheme::Midpoint, MagnusScheme::GaussLegendre2] {
            let prop = Propagator::new(scheme, t / 7.0, set.len()).run(&problem, &y0, 0.0, 7).unwrap();
            for (k, (y, c)) in set.iter().zip(prop.state.data().iter().zip(y0.data())) {
                let e: f64 = k.iter().map(|&kl| kl as f64 + 0.5).sum();
                let want = c * Complex64::from_polar(1.0, -t * e);
                assert!((y - want).norm() < 1e-10);
            }
            assert!(prop.max_norm_drift < 1e-10);
        }
    }

    #[test]
    fn gl2_generator_is_hermitian() {
        let set = Arc::new(IndexSet::full(2, 6).unwrap());
        let spec = PotentialSpec::new(PotentialKind::HenonHeilesPerturbed, 2, 16.0).unwrap();
        let problem = FastProblem::new(set.clone(), spec, 3).unwrap();
        let b = Gl2Generator::new(&problem, 0.4, 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let x = CoeffVector::random_complex(set.clone(), &mut rng);
        let z = CoeffVector::random_complex(set.clone(), &mut rng);
        let bx = b.apply_vec(x.data()).unwrap();
        let bz = b.apply_vec(z.data()).unwrap();
        let lhs: Complex64 = z.data().iter().zip(&bx).map(|(a, b)| a.conj() * b).sum();
        let rhs: Complex64 = bz.iter().zip(x.data()).map(|(a, b)| a.conj() * b).sum();
        assert!((lhs - rhs).norm() < 1e-10 * lhs.norm().max(1.0));
    }

    #[test]
    fn step_counting() {
        assert_eq!(step_count(0.0, 1.0, 1.0 / 80.0).unwrap(), 80);
        assert_eq!(step_count(0.0, 1.0, 1e-4).unwrap(), 10_000);
        assert!(step_count(0.0, 1.0, 0.3).is_err());
        assert!(magnus_step(
            MagnusScheme::Midpoint,
            &Frozen(DenseMatrixOperator::new(1, vec![Complex64::new(1.0, 0.0)]).unwrap()),
            &[Complex64::new(1.0, 0.0)],
            0.0,
            0.0,
            1,
            false
        )
        .is_err());
    }
}
