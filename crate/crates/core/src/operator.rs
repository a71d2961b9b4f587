//! Matrix-free linear operators on coefficient slices.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A square linear map `y = A x` acting on raw coefficient slices.
pub trait Operator: Send + Sync {
    fn dim(&self) -> usize;

    /// Overwrites `y` with `A x`.
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) -> Result<()>;

    fn apply_vec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.dim()];
        self.apply(x, &mut y)?;
        Ok(y)
    }
}

/// A Hamiltonian `A(t)` that can be frozen at any time.
pub trait TimeDependentOperator: Send + Sync {
    fn dim(&self) -> usize;

    fn at(&self, t: f64) -> Result<Box<dyn Operator + '_>>;
}

/// Wraps a closure as an [`Operator`].
pub struct FnOperator<F> {
    dim: usize,
    f: F,
}

impl<F> FnOperator<F>
where
    F: Fn(&[Complex64], &mut [Complex64]) + Send + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        FnOperator { dim, f }
    }
}

impl<F> Operator for FnOperator<F>
where
    F: Fn(&[Complex64], &mut [Complex64]) + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) -> Result<()> {
        check_lengths(self.dim, x, y)?;
        (self.f)(x, y);
        Ok(())
    }
}

/// Dense matrix (row-major, `n × n`) acting on complex vectors.
#[derive(Clone, Debug)]
pub struct DenseMatrixOperator {
    n: usize,
    entries: Vec<Complex64>,
}

impl DenseMatrixOperator {
    pub fn new(n: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: entries.len() });
        }
        Ok(DenseMatrixOperator { n, entries })
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }
}

impl Operator for DenseMatrixOperator {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) -> Result<()> {
        check_lengths(self.n, x, y)?;
        for (i, yi) in y.iter_mut().enumerate() {
            let row = &self.entries[i * self.n..(i + 1) * self.n];
            *yi = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
        Ok(())
    }
}

/// A time-independent operator viewed as time-dependent.
pub struct Frozen<O>(pub O);

impl<O: Operator> TimeDependentOperator for Frozen<O> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn at(&self, _t: f64) -> Result<Box<dyn Operator + '_>> {
        Ok(Box::new(Borrowed(&self.0)))
    }
}

struct Borrowed<'a, O>(&'a O);

impl<O: Operator> Operator for Borrowed<'_, O> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) -> Result<()> {
        self.0.apply(x, y)
    }
}

pub(crate) fn check_lengths(n: usize, x: &[Complex64], y: &[Complex64]) -> Result<()> {
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    if y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: y.len() });
    }
    Ok(())
}
