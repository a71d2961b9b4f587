use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::index_set::IndexSet;

/// Complex Galerkin coefficients, one per ordinal of the owning index set.
#[derive(Clone, Debug)]
pub struct CoeffVector {
    set: Arc<IndexSet>,
    data: Vec<Complex64>,
}

impl CoeffVector {
    pub fn zeros(set: Arc<IndexSet>) -> Self {
        let n = set.len();
        CoeffVector { set, data: vec![Complex64::new(0.0, 0.0); n] }
    }

    pub fn from_vec(set: Arc<IndexSet>, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != set.len() {
            return Err(Error::DimensionMismatch { expected: set.len(), got: data.len() });
        }
        if let Some(i) = data.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite(format!("coefficient at ordinal {i}")));
        }
        Ok(CoeffVector { set, data })
    }

    pub fn from_real(set: Arc<IndexSet>, data: &[f64]) -> Result<Self> {
        Self::from_vec(set, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Builds a vector by evaluating `f` on every multi-index.
    pub fn from_fn(set: Arc<IndexSet>, mut f: impl FnMut(&[u32]) -> Complex64) -> Result<Self> {
        let data = set.iter().map(&mut f).collect();
        Self::from_vec(set, data)
    }

    /// Unit vector at multi-index `k`.
    pub fn unit(set: Arc<IndexSet>, k: &[u32]) -> Result<Self> {
        let i = set.ordinal(k).ok_or_else(|| Error::NotInSet(k.to_vec()))?;
        let mut v = Self::zeros(set);
        v.data[i] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    /// Real entries drawn uniformly from `[-1, 1)`.
    pub fn random_real(set: Arc<IndexSet>, rng: &mut impl Rng) -> Self {
        let data = (0..set.len()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0)).collect();
        CoeffVector { set, data }
    }

    /// Complex entries with real and imaginary parts uniform in `[-1, 1)`.
    pub fn random_complex(set: Arc<IndexSet>, rng: &mut impl Rng) -> Self {
        let data = (0..set.len())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        CoeffVector { set, data }
    }

    pub fn set(&self) -> &Arc<IndexSet> {
        &self.set
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, k: &[u32]) -> Option<Complex64> {
        self.set.ordinal(k).map(|i| self.data[i])
    }

    pub fn norm2(&self) -> f64 {
        norm2(&self.data)
    }

    pub fn norm_inf(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `<self, other> = sum conj(self_k) other_k`
    pub fn dot(&self, other: &CoeffVector) -> Complex64 {
        dot(&self.data, &other.data)
    }

    pub fn scale(&mut self, a: Complex64) {
        self.data.iter_mut().for_each(|c| *c *= a);
    }

    /// `self += a * x`
    pub fn axpy(&mut self, a: Complex64, x: &CoeffVector) -> Result<()> {
        self.check_same_set(x)?;
        for (y, &xi) in self.data.iter_mut().zip(&x.data) {
            *y += a * xi;
        }
        Ok(())
    }

    pub fn sub(&self, other: &CoeffVector) -> Result<CoeffVector> {
        self.check_same_set(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(CoeffVector { set: Arc::clone(&self.set), data })
    }

    /// Largest componentwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &CoeffVector) -> Result<f64> {
        self.check_same_set(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn check_same_set(&self, other: &CoeffVector) -> Result<()> {
        if Arc::ptr_eq(&self.set, &other.set) || *self.set == *other.set {
            Ok(())
        } else {
            Err(Error::SetMismatch("vectors live on different index sets".into()))
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// CSV with columns `k_1,...,k_N,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = (1..=self.set.dim()).map(|l| format!("k_{l}")).collect();
        let _ = writeln!(out, "{},re,im", header.join(","));
        for (k, c) in self.set.iter().zip(&self.data) {
            let idx: Vec<String> = k.iter().map(u32::to_string).collect();
            let _ = writeln!(out, "{},{:.17e},{:.17e}", idx.join(","), c.re, c.im);
        }
        out
    }
}

pub(crate) fn norm2(x: &[Complex64]) -> f64 {
    x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn basic_algebra() {
        let set = Arc::new(IndexSet::full(1, 2).unwrap());
        let mut u = CoeffVector::from_real(set.clone(), &[1.0, 2.0, 2.0]).unwrap();
        assert_eq!(u.norm2(), 3.0);
        assert_eq!(u.norm_inf(), 2.0);
        let v = CoeffVector::unit(set.clone(), &[1]).unwrap();
        assert_eq!(u.dot(&v), Complex64::new(2.0, 0.0));
        u.axpy(Complex64::new(-2.0, 0.0), &v).unwrap();
        assert_eq!(u.data()[1], Complex64::new(0.0, 0.0));
        assert!(CoeffVector::from_real(set.clone(), &[1.0]).is_err());
        assert!(CoeffVector::from_real(set, &[1.0, f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn csv_layout() {
        let set = Arc::new(IndexSet::hyperbolic(2, 1).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v = CoeffVector::random_complex(set, &mut rng);
        let csv = v.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("k_1,k_2,re,im"));
        assert_eq!(csv.lines().count(), 4);
    }
}
