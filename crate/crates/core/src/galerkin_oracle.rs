//! Dense reference matrices.
//!
//! Everything here is assembled explicitly and exists to check the
//! matrix-free code: coordinate matrices, the Gauss–Hermite Galerkin matrix
//! `W^GH` of the polynomial potential, the exact Galerkin matrix, and the
//! diagonalization `X_full = Uᵀ Ξ U` behind the equivalence of both on full
//! index sets.
//!
//! Galerkin entries factor over the axes,
//!
//! ```text
//! (φ_j, W^pol φ_k)^GH = sum_r α_r prod_l sum_m ω_m φ_{j_l}(ξ_m) T_{r_l}(ξ_m / L) φ_{k_l}(ξ_m),
//! ```
//!
//! so only univariate tables of `φ_k(ξ_m)` and `T_d(ξ_m / L)` are needed.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::coeff::CoeffVector;
use crate::error::{Error, Result};
use crate::fast_apply::oscillator_diagonal;
use crate::hermite_basis::{gauss_hermite_rule, hermite_table, QuadratureRule};
use crate::index_set::{IndexSet, MultiIndex, SetKind};
use crate::operator::{check_lengths, Operator, TimeDependentOperator};
use crate::potential_approx::{chebyshev_into, interpolate, ChebApprox, PotentialSpec};

/// Default bound on the number of rows of an assembled matrix.
pub const DEFAULT_DENSE_CAP: usize = 20_000;

/// Environment variable overriding [`DEFAULT_DENSE_CAP`].
pub const DENSE_CAP_ENV: &str = "HPROP_DENSE_CAP";

/// Row cap for dense assembly, honoring `HPROP_DENSE_CAP`.
pub fn dense_cap() -> usize {
    std::env::var(DENSE_CAP_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_DENSE_CAP)
}

fn check_cap(rows: usize) -> Result<()> {
    let cap = dense_cap();
    if rows > cap {
        Err(Error::DenseCapExceeded { rows, cap })
    } else {
        Ok(())
    }
}

/// What an assembled matrix represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DenseTag {
    /// `X^{(l)}` for the 0-based axis `l`.
    Coordinate(usize),
    QuadGalerkin,
    ExactGalerkin,
    Diagonal,
}

impl std::fmt::Display for DenseTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DenseTag::Coordinate(l) => write!(f, "coordinate({l})"),
            DenseTag::QuadGalerkin => f.write_str("quad-galerkin"),
            DenseTag::ExactGalerkin => f.write_str("exact-galerkin"),
            DenseTag::Diagonal => f.write_str("diagonal"),
        }
    }
}

/// Real square matrix indexed by the ordinals of an index set.
#[derive(Clone, Debug)]
pub struct DenseOperator {
    set: Arc<IndexSet>,
    /// Row-major `len × len`.
    entries: Vec<f64>,
    tag: DenseTag,
}

impl DenseOperator {
    pub fn new(set: Arc<IndexSet>, entries: Vec<f64>, tag: DenseTag) -> Result<Self> {
        let n = set.len();
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: entries.len() });
        }
        if let Some(i) = entries.iter().position(|e| !e.is_finite()) {
            return Err(Error::NonFinite(format!("dense entry ({}, {})", i / n, i % n)));
        }
        Ok(DenseOperator { set, entries, tag })
    }

    pub fn set(&self) -> &Arc<IndexSet> {
        &self.set
    }

    pub fn tag(&self) -> DenseTag {
        self.tag
    }

    pub fn size(&self) -> usize {
        self.set.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.size() + col]
    }

    /// Entry addressed by multi-indices.
    pub fn entry(&self, j: &[u32], k: &[u32]) -> Result<f64> {
        let r = self.set.ordinal(j).ok_or_else(|| Error::NotInSet(j.to_vec()))?;
        let c = self.set.ordinal(k).ok_or_else(|| Error::NotInSet(k.to_vec()))?;
        Ok(self.get(r, c))
    }

    pub fn max_asymmetry(&self) -> f64 {
        let n = self.size();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Largest entrywise gap to another matrix on the same set.
    pub fn max_abs_diff(&self, other: &DenseOperator) -> Result<f64> {
        if *self.set != *other.set {
            return Err(Error::SetMismatch("dense operators on different sets".into()));
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn matvec(&self, v: &CoeffVector) -> Result<CoeffVector> {
        if *self.set != **v.set() {
            return Err(Error::SetMismatch("vector does not live on the matrix's set".into()));
        }
        let mut out = CoeffVector::zeros(Arc::clone(&self.set));
        self.apply(v.data(), out.data_mut())?;
        Ok(out)
    }

    /// Row-major CSV with a `#` metadata header.
    pub fn to_csv(&self) -> String {
        let n = self.size();
        let mut out = String::new();
        let _ = writeln!(out, "# tag={}", self.tag);
        let _ = writeln!(out, "# kind={}", self.set.kind());
        let _ = writeln!(out, "# N={}", self.set.dim());
        let _ = writeln!(out, "# K={}", self.set.bound());
        let _ = writeln!(out, "# size={n}");
        for i in 0..n {
            let row: Vec<String> = (0..n).map(|j| format!("{:.17e}", self.get(i, j))).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

impl Operator for DenseOperator {
    fn dim(&self) -> usize {
        self.size()
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) -> Result<()> {
        let n = self.size();
        check_lengths(n, x, y)?;
        for (i, yi) in y.iter_mut().enumerate() {
            let row = &self.entries[i * n..(i + 1) * n];
            let (mut re, mut im) = (0.0, 0.0);
            for (a, b) in row.iter().zip(x) {
                re += a * b.re;
                im += a * b.im;
            }
            *yi = Complex64::new(re, im);
        }
        Ok(())
    }
}

/// Coordinate matrix `X^{(axis)}` on `set`.
pub fn assemble_coordinate(set: &Arc<IndexSet>, axis: usize) -> Result<DenseOperator> {
    if axis >= set.dim() {
        return Err(Error::AxisOutOfRange { axis, dim: set.dim() });
    }
    check_cap(set.len())?;
    let n = set.len();
    let mut entries = vec![0.0; n * n];
    let (down, up) = set.neighbor_tables(axis);
    for i in 0..n {
        let jl = set.index(i)[axis] as f64;
        if down[i] != crate::index_set::ABSENT {
            entries[i * n + down[i] as usize] = (jl / 2.0).sqrt();
        }
        if up[i] != crate::index_set::ABSENT {
            entries[i * n + up[i] as usize] = ((jl + 1.0) / 2.0).sqrt();
        }
    }
    DenseOperator::new(Arc::clone(set), entries, DenseTag::Coordinate(axis))
}

/// `D = diag(sum_l (k_l + ½))`.
pub fn assemble_diagonal(set: &Arc<IndexSet>) -> Result<DenseOperator> {
    check_cap(set.len())?;
    let n = set.len();
    let mut entries = vec![0.0; n * n];
    for (i, d) in oscillator_diagonal(set).into_iter().enumerate() {
        entries[i * n + i] = d;
    }
    DenseOperator::new(Arc::clone(set), entries, DenseTag::Diagonal)
}

/// Univariate tables on the nodes of a rule: `ω_m φ_k(ξ_m) T_d(ξ_m / L)` and
/// `φ_k(ξ_m)`.
struct NodeTables {
    nodes: usize,
    /// `weighted[(d * (K+1) + k) * nodes + m] = ω_m T_d(ξ_m/L) φ_k(ξ_m)`
    weighted: Vec<f64>,
    /// `phi[k * nodes + m] = φ_k(ξ_m)`
    phi: Vec<f64>,
    orders: usize,
}

impl NodeTables {
    fn new(rule: &QuadratureRule, bound: usize, degree: usize, halfwidth: f64) -> Self {
        let nodes = rule.len();
        let orders = bound + 1;
        let phi = hermite_table(&rule.nodes, bound);
        let mut cheb = vec![0.0; (degree + 1) * nodes];
        let mut col = vec![0.0; degree + 1];
        for (m, &x) in rule.nodes.iter().enumerate() {
            chebyshev_into(x / halfwidth, &mut col);
            for (d, &t) in col.iter().enumerate() {
                cheb[d * nodes + m] = t;
            }
        }
        let mut weighted = vec![0.0; (degree + 1) * orders * nodes];
        for d in 0..=degree {
            for k in 0..orders {
                for m in 0..nodes {
                    weighted[(d * orders + k) * nodes + m] =
                        rule.modified_weights[m] * cheb[d * nodes + m] * phi[k * nodes + m];
                }
            }
        }
        NodeTables { nodes, weighted, phi, orders }
    }

    /// `sum_m ω_m φ_j(ξ_m) T_d(ξ_m/L) φ_k(ξ_m)`
    #[inline]
    fn factor(&self, d: usize, j: usize, k: usize) -> f64 {
        let w = &self.weighted[(d * self.orders + j) * self.nodes..][..self.nodes];
        let p = &self.phi[k * self.nodes..][..self.nodes];
        w.iter().zip(p).map(|(a, b)| a * b).sum()
    }

    /// The full `(K+1) × (K+1)` table of [`factor`](Self::factor) for degree `d`.
    fn factor_table(&self, d: usize) -> Vec<f64> {
        let o = self.orders;
        let mut g = vec![0.0; o * o];
        for j in 0..o {
            for k in 0..o {
                g[j * o + k] = self.factor(d, j, k);
            }
        }
        g
    }
}

/// Galerkin matrix of `approx` under an arbitrary Gauss–Hermite product rule.
///
/// Each entry sums over the quadrature nodes term by term; entries are
/// computed for `j <= k` and mirrored. Rows are distributed over the rayon
/// pool.
pub fn assemble_with_rule(
    set: &Arc<IndexSet>,
    approx: &ChebApprox,
    rule: &QuadratureRule,
    tag: DenseTag,
) -> Result<DenseOperator> {
    if approx.dim() != set.dim() {
        return Err(Error::DimensionMismatch { expected: set.dim(), got: approx.dim() });
    }
    check_cap(set.len())?;
    let n = set.len();
    let dim = set.dim();
    let tables = NodeTables::new(rule, set.bound(), approx.degree(), approx.halfwidth());
    let terms = approx.terms();

    let mut upper = vec![0.0; n * n];
    upper.par_chunks_mut(n).enumerate().for_each(|(row, out)| {
        let j = set.index(row);
        for (col, slot) in out.iter_mut().enumerate().skip(row) {
            let k = set.index(col);
            let mut acc = 0.0;
            for (r, alpha) in terms {
                let mut prod = *alpha;
                for l in 0..dim {
                    prod *= tables.factor(r[l] as usize, j[l] as usize, k[l] as usize);
                    if prod == 0.0 {
                        break;
                    }
                }
                acc += prod;
            }
            *slot = acc;
        }
    });
    for row in 0..n {
        for col in 0..row {
            upper[row * n + col] = upper[col * n + row];
        }
    }
    DenseOperator::new(Arc::clone(set), upper, tag)
}

/// `W^GH`: the Galerkin matrix under the rule of order `M = K`.
pub fn assemble_quad_galerkin(
    set: &Arc<IndexSet>,
    approx: &ChebApprox,
    rule: &QuadratureRule,
) -> Result<DenseOperator> {
    if rule.order() != set.bound() {
        return Err(Error::RuleOrderMismatch { expected: set.bound(), got: rule.order() });
    }
    assemble_with_rule(set, approx, rule, DenseTag::QuadGalerkin)
}

/// Exact Galerkin matrix `(φ_j, W^pol φ_k)` using the rule of order `K + R`,
/// which integrates every entry without error.
pub fn assemble_exact_galerkin(set: &Arc<IndexSet>, approx: &ChebApprox) -> Result<DenseOperator> {
    let rule = gauss_hermite_rule(set.bound() + approx.degree())?;
    assemble_with_rule(set, approx, &rule, DenseTag::ExactGalerkin)
}

/// Residuals of the discrete diagonalization on a full cube.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagonalizationResidual {
    /// `max_l ‖Uᵀ Ξ^{(l)} U − X^{(l)}_full‖_max`
    pub transform: f64,
    /// `‖Uᵀ U − I‖_max`
    pub orthogonality: f64,
}

impl DiagonalizationResidual {
    pub fn max(&self) -> f64 {
        self.transform.max(self.orthogonality)
    }
}

/// Builds `U_{m k} = prod_l sqrt(ω_{m_l}) φ_{k_l}(ξ_{m_l})` on the full cube of
/// order `K` in `N` dimensions and measures how well it diagonalizes the
/// coordinate matrices.
pub fn verify_diagonalization(bound: usize, dim: usize) -> Result<DiagonalizationResidual> {
    let set = Arc::new(IndexSet::full(dim, bound)?);
    let n = set.len();
    if n > 10_000 {
        return Err(Error::DenseCapExceeded { rows: n, cap: 10_000 });
    }
    let rule = gauss_hermite_rule(bound)?;
    let nodes = rule.len();
    let phi = hermite_table(&rule.nodes, bound);
    let sqrt_w: Vec<f64> = rule.modified_weights.iter().map(|w| w.sqrt()).collect();

    // ut[k * n + m] = U_{m k}; node multi-indices share the ordering of the set
    let mut ut = vec![0.0; n * n];
    ut.par_chunks_mut(n).enumerate().for_each(|(kc, col)| {
        let k = set.index(kc);
        for (mc, slot) in col.iter_mut().enumerate() {
            let m = set.index(mc);
            *slot = (0..dim)
                .map(|l| sqrt_w[m[l] as usize] * phi[k[l] as usize * nodes + m[l] as usize])
                .product();
        }
    });
    let xi: Vec<Vec<f64>> = (0..dim)
        .map(|l| set.iter().map(|m| rule.nodes[m[l] as usize]).collect())
        .collect();
    let coords: Vec<DenseOperator> =
        (0..dim).map(|l| assemble_coordinate(&set, l)).collect::<Result<_>>()?;

    let (transform, orthogonality) = (0..n)
        .into_par_iter()
        .map(|j| {
            let uj = &ut[j * n..(j + 1) * n];
            let mut worst = (0.0f64, 0.0f64);
            let mut acc = vec![0.0; dim];
            for k in 0..n {
                let uk = &ut[k * n..(k + 1) * n];
                let mut gram = 0.0;
                acc.iter_mut().for_each(|a| *a = 0.0);
                for m in 0..n {
                    let p = uj[m] * uk[m];
                    gram += p;
                    for (a, x) in acc.iter_mut().zip(&xi) {
                        *a += p * x[m];
                    }
                }
                let delta = if j == k { 1.0 } else { 0.0 };
                worst.1 = worst.1.max((gram - delta).abs());
                for (l, a) in acc.iter().enumerate() {
                    worst.0 = worst.0.max((a - coords[l].get(j, k)).abs());
                }
            }
            worst
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    Ok(DiagonalizationResidual { transform, orthogonality })
}

/// Per-term Galerkin matrices `B_r` with `W^GH = sum_r α_r B_r`, cached so
/// that a time-dependent potential only re-weights them.
pub struct GalerkinTermCache {
    set: Arc<IndexSet>,
    tables: NodeTables,
    degree: usize,
    halfwidth: f64,
    factors: Mutex<HashMap<usize, Arc<Vec<f64>>>>,
    terms: Mutex<HashMap<MultiIndex, Arc<Vec<f64>>>>,
}

impl GalerkinTermCache {
    /// Cache for the rule of order `K` (the `W^GH` choice) and potentials of
    /// per-axis degree at most `degree` on `[-L, L]^N`.
    pub fn new(set: Arc<IndexSet>, degree: usize, halfwidth: f64) -> Result<Self> {
        let rule = gauss_hermite_rule(set.bound())?;
        Self::with_rule(set, &rule, degree, halfwidth)
    }

    pub fn with_rule(set: Arc<IndexSet>, rule: &QuadratureRule, degree: usize, halfwidth: f64) -> Result<Self> {
        check_cap(set.len())?;
        let tables = NodeTables::new(rule, set.bound(), degree, halfwidth);
        Ok(GalerkinTermCache {
            set,
            tables,
            degree,
            halfwidth,
            factors: Mutex::new(HashMap::new()),
            terms: Mutex::new(HashMap::new()),
        })
    }

    pub fn set(&self) -> &Arc<IndexSet> {
        &self.set
    }

    fn factor_table(&self, d: usize) -> Arc<Vec<f64>> {
        let mut cache = self.factors.lock().expect("factor cache poisoned");
        Arc::clone(cache.entry(d).or_insert_with(|| Arc::new(self.tables.factor_table(d))))
    }

    fn term(&self, r: &MultiIndex) -> Arc<Vec<f64>> {
        if let Some(b) = self.terms.lock().expect("term cache poisoned").get(r) {
            return Arc::clone(b);
        }
        let n = self.set.len();
        let o = self.set.bound() + 1;
        let factors: Vec<Arc<Vec<f64>>> = r.iter().map(|&d| self.factor_table(d as usize)).collect();
        let mut b = vec![0.0; n * n];
        b.par_chunks_mut(n).enumerate().for_each(|(row, out)| {
            let j = self.set.index(row);
            for (col, slot) in out.iter_mut().enumerate() {
                let k = self.set.index(col);
                *slot = factors
                    .iter()
                    .enumerate()
                    .map(|(l, g)| g[j[l] as usize * o + k[l] as usize])
                    .product();
            }
        });
        let b = Arc::new(b);
        self.terms.lock().expect("term cache poisoned").insert(r.clone(), Arc::clone(&b));
        b
    }

    /// `sum_r α_r B_r`.
    pub fn assemble(&self, approx: &ChebApprox) -> Result<DenseOperator> {
        if approx.dim() != self.set.dim() {
            return Err(Error::DimensionMismatch { expected: self.set.dim(), got: approx.dim() });
        }
        if approx.degree() > self.degree || approx.halfwidth() != self.halfwidth {
            return Err(Error::InvalidArgument(format!(
                "cache built for degree {} on half-width {}, got degree {} on half-width {}",
                self.degree,
                self.halfwidth,
                approx.degree(),
                approx.halfwidth()
            )));
        }
        let n = self.set.len();
        let mut entries = vec![0.0; n * n];
        for (r, alpha) in approx.terms() {
            let b = self.term(r);
            entries.par_iter_mut().zip(b.par_iter()).for_each(|(e, x)| *e += alpha * x);
        }
        DenseOperator::new(Arc::clone(&self.set), entries, DenseTag::QuadGalerkin)
    }
}

/// `D + W` with a dense potential part.
#[derive(Clone, Debug)]
pub struct DenseHamiltonian {
    potential: DenseOperator,
    diagonal: Vec<f64>,
}

impl DenseHamiltonian {
    pub fn new(potential: DenseOperator) -> Self {
        let diagonal = oscillator_diagonal(potential.set());
        DenseHamiltonian { potential, diagonal }
    }

    pub fn potential(&self) -> &DenseOperator {
        &self.potential
    }
}

impl Operator for DenseHamiltonian {
    fn dim(&self) -> usize {
        self.potential.size()
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) -> Result<()> {
        self.potential.apply(x, y)?;
        for ((yi, xi), d) in y.iter_mut().zip(x).zip(&self.diagonal) {
            *yi += xi * *d;
        }
        Ok(())
    }
}

/// `D + W^GH(t)` for a possibly time-dependent potential, re-interpolated at
/// every requested time and assembled from a [`GalerkinTermCache`].
pub struct DenseProblem {
    spec: PotentialSpec,
    degree: usize,
    cache: GalerkinTermCache,
    frozen: Option<DenseHamiltonian>,
}

impl DenseProblem {
    pub fn new(set: Arc<IndexSet>, spec: PotentialSpec, degree: usize) -> Result<Self> {
        if spec.dim() != set.dim() {
            return Err(Error::DimensionMismatch { expected: set.dim(), got: spec.dim() });
        }
        let cache = GalerkinTermCache::new(set, degree, spec.halfwidth())?;
        let frozen = if spec.is_time_dependent() {
            None
        } else {
            let approx = interpolate(&spec, degree, 0.0)?;
            Some(DenseHamiltonian::new(cache.assemble(&approx)?))
        };
        Ok(DenseProblem { spec, degree, cache, frozen })
    }

    pub fn set(&self) -> &Arc<IndexSet> {
        self.cache.set()
    }

    pub fn hamiltonian_at(&self, t: f64) -> Result<DenseHamiltonian> {
        if let Some(h) = &self.frozen {
            return Ok(h.clone());
        }
        let approx = interpolate(&self.spec, self.degree, t)?;
        Ok(DenseHamiltonian::new(self.cache.assemble(&approx)?))
    }
}

impl TimeDependentOperator for DenseProblem {
    fn dim(&self) -> usize {
        self.cache.set().len()
    }

    fn at(&self, t: f64) -> Result<Box<dyn Operator + '_>> {
        match &self.frozen {
            Some(h) => Ok(Box::new(BorrowedHamiltonian(h))),
            None => Ok(Box::new(self.hamiltonian_at(t)?)),
        }
    }
}

struct BorrowedHamiltonian<'a>(&'a DenseHamiltonian);

impl Operator for BorrowedHamiltonian<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) -> Result<()> {
        self.0.apply(x, y)
    }
}

/// Convenience: `W^GH` on the full cube `(K+1)^N`, used where the full set
/// stands in for a reduced one.
pub fn full_quad_galerkin(dim: usize, bound: usize, approx: &ChebApprox) -> Result<DenseOperator> {
    let set = Arc::new(IndexSet::full(dim, bound)?);
    debug_assert_eq!(set.kind(), SetKind::Full);
    let rule = gauss_hermite_rule(bound)?;
    assemble_quad_galerkin(&set, approx, &rule)
}
