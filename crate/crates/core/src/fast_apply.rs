//! Matrix-free application of coordinate matrices and of `W^pol(X_K)`.
//!
//! The coordinate matrix `X^{(l)}_K` acts through the Hermite three-term
//! recurrence,
//!
//! ```text
//! (X^{(l)} v)_j = sqrt(j_l / 2) v_{j - e_l} + sqrt((j_l + 1) / 2) v_{j + e_l},
//! ```
//!
//! where neighbors outside the index set contribute nothing. Inserting the
//! coordinate matrices into the Chebyshev expansion of the potential gives
//! `W^pol(X_K) v` in `O(sum_r |r| · |K|)` operations without ever forming a
//! matrix. On the full cube this reproduces the Gauss–Hermite Galerkin
//! matrix exactly; on reduced sets the truncated neighbors are what separates
//! the result from it.

use std::sync::Arc;

use num_complex::Complex64;

use crate::coeff::CoeffVector;
use crate::error::{Error, Result};
use crate::index_set::{IndexSet, MultiIndex, ABSENT};
use crate::operator::{check_lengths, Operator, TimeDependentOperator};
use crate::potential_approx::{interpolate, ChebApprox, PotentialSpec};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `sqrt(k / 2)` for `k = 0..=K+1`.
fn half_roots(bound: usize) -> Vec<f64> {
    (0..=bound + 1).map(|k| (k as f64 / 2.0).sqrt()).collect()
}

/// Scratch buffers for the Chebyshev recurrence, reused across terms.
struct Workspace {
    roots: Vec<f64>,
    cur: Vec<Complex64>,
    lower: Vec<Complex64>,
    upper: Vec<Complex64>,
    next: Vec<Complex64>,
}

impl Workspace {
    fn new(set: &IndexSet) -> Self {
        let n = set.len();
        Workspace {
            roots: half_roots(set.bound()),
            cur: vec![ZERO; n],
            lower: vec![ZERO; n],
            upper: vec![ZERO; n],
            next: vec![ZERO; n],
        }
    }
}

/// `out = scale · X^{(axis)} x` on raw slices.
fn coordinate_into(set: &IndexSet, roots: &[f64], axis: usize, scale: f64, x: &[Complex64], out: &mut [Complex64]) {
    let (down, up) = set.neighbor_tables(axis);
    for (i, o) in out.iter_mut().enumerate() {
        let jl = set.index(i)[axis] as usize;
        let mut acc = ZERO;
        let d = down[i];
        if d != ABSENT {
            acc += x[d as usize] * roots[jl];
        }
        let u = up[i];
        if u != ABSENT {
            acc += x[u as usize] * roots[jl + 1];
        }
        *o = acc * scale;
    }
}

/// `out = x - scale · X^{(axis)} y`, fused for the recurrence.
fn recurrence_step(
    set: &IndexSet,
    roots: &[f64],
    axis: usize,
    scale: f64,
    y: &[Complex64],
    x: &[Complex64],
    out: &mut [Complex64],
) {
    let (down, up) = set.neighbor_tables(axis);
    for (i, o) in out.iter_mut().enumerate() {
        let jl = set.index(i)[axis] as usize;
        let mut acc = ZERO;
        let d = down[i];
        if d != ABSENT {
            acc += y[d as usize] * roots[jl];
        }
        let u = up[i];
        if u != ABSENT {
            acc += y[u as usize] * roots[jl + 1];
        }
        *o = acc * scale - x[i];
    }
}

/// In place: `ws.cur ← T_r(X^{(axis)} / L) ws.cur`.
fn chebyshev_in_place(set: &IndexSet, ws: &mut Workspace, axis: usize, degree: u32, halfwidth: f64) {
    if degree == 0 {
        return;
    }
    let inv_l = 1.0 / halfwidth;
    // lower = T_0 v = v, upper = T_1 v
    ws.lower.copy_from_slice(&ws.cur);
    coordinate_into(set, &ws.roots, axis, inv_l, &ws.lower, &mut ws.upper);
    for _ in 2..=degree {
        recurrence_step(set, &ws.roots, axis, 2.0 * inv_l, &ws.upper, &ws.lower, &mut ws.next);
        // (lower, upper) ← (upper, next)
        std::mem::swap(&mut ws.lower, &mut ws.upper);
        std::mem::swap(&mut ws.upper, &mut ws.next);
    }
    std::mem::swap(&mut ws.cur, &mut ws.upper);
}

fn check_axis(set: &IndexSet, axis: usize) -> Result<()> {
    if axis >= set.dim() {
        Err(Error::AxisOutOfRange { axis, dim: set.dim() })
    } else {
        Ok(())
    }
}

fn check_vector_set(set: &Arc<IndexSet>, v: &CoeffVector) -> Result<()> {
    if Arc::ptr_eq(set, v.set()) || **set == **v.set() {
        Ok(())
    } else {
        Err(Error::SetMismatch("vector does not live on the given index set".into()))
    }
}

fn check_approx(set: &IndexSet, approx: &ChebApprox) -> Result<()> {
    if approx.dim() != set.dim() {
        return Err(Error::DimensionMismatch { expected: set.dim(), got: approx.dim() });
    }
    Ok(())
}

/// `X^{(axis)}_K v` (0-based axis).
pub fn direct_op(set: &Arc<IndexSet>, axis: usize, v: &CoeffVector) -> Result<CoeffVector> {
    check_axis(set, axis)?;
    check_vector_set(set, v)?;
    let mut out = CoeffVector::zeros(Arc::clone(set));
    coordinate_into(set, &half_roots(set.bound()), axis, 1.0, v.data(), out.data_mut());
    Ok(out)
}

/// `T_r(X^{(axis)}_K / L) v` via the Chebyshev recurrence on vectors.
pub fn cheb_of_coordinate_apply(
    set: &Arc<IndexSet>,
    axis: usize,
    degree: u32,
    halfwidth: f64,
    v: &CoeffVector,
) -> Result<CoeffVector> {
    check_axis(set, axis)?;
    check_vector_set(set, v)?;
    let mut ws = Workspace::new(set);
    ws.cur.copy_from_slice(v.data());
    chebyshev_in_place(set, &mut ws, axis, degree, halfwidth);
    CoeffVector::from_vec(Arc::clone(set), ws.cur)
}

/// `W^pol(X_K) v = sum_r α_r T_{r_1}(X^{(1)}/L)(⋯(T_{r_N}(X^{(N)}/L) v)⋯)`,
/// with the last axis applied first.
pub fn fast_algorithm(set: &Arc<IndexSet>, approx: &ChebApprox, v: &CoeffVector) -> Result<CoeffVector> {
    let order: Vec<usize> = (0..set.dim()).rev().collect();
    fast_algorithm_with_order(set, approx, v, &order)
}

/// [`fast_algorithm`] with an explicit axis application order (first entry
/// applied first). On the full cube every order gives the same result; on
/// reduced sets they differ.
pub fn fast_algorithm_with_order(
    set: &Arc<IndexSet>,
    approx: &ChebApprox,
    v: &CoeffVector,
    axis_order: &[usize],
) -> Result<CoeffVector> {
    check_vector_set(set, v)?;
    check_approx(set, approx)?;
    check_order(set, axis_order)?;
    let mut out = CoeffVector::zeros(Arc::clone(set));
    let mut ws = Workspace::new(set);
    accumulate_potential(set, approx, axis_order, v.data(), out.data_mut(), &mut ws);
    finite_or_err(out.data())?;
    Ok(out)
}

fn check_order(set: &IndexSet, axis_order: &[usize]) -> Result<()> {
    let mut seen = vec![false; set.dim()];
    for &a in axis_order {
        check_axis(set, a)?;
        if std::mem::replace(&mut seen[a], true) {
            return Err(Error::InvalidArgument(format!("axis {a} repeated in application order")));
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::InvalidArgument("axis order must be a permutation".into()));
    }
    Ok(())
}

fn accumulate_potential(
    set: &IndexSet,
    approx: &ChebApprox,
    axis_order: &[usize],
    x: &[Complex64],
    out: &mut [Complex64],
    ws: &mut Workspace,
) {
    out.iter_mut().for_each(|o| *o = ZERO);
    let l = approx.halfwidth();
    for (r, alpha) in approx.terms() {
        ws.cur.copy_from_slice(x);
        for &axis in axis_order {
            chebyshev_in_place(set, ws, axis, r[axis], l);
        }
        for (o, c) in out.iter_mut().zip(&ws.cur) {
            *o += c * *alpha;
        }
    }
}

fn finite_or_err(x: &[Complex64]) -> Result<()> {
    match x.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
        Some(i) => Err(Error::NonFinite(format!("fast algorithm output at ordinal {i}"))),
        None => Ok(()),
    }
}

/// `(D + W^pol(X_K)) v` with `(D v)_j = sum_l (j_l + ½) v_j`.
pub fn apply_hamiltonian(set: &Arc<IndexSet>, approx: &ChebApprox, v: &CoeffVector) -> Result<CoeffVector> {
    let op = FastHamiltonian::new(Arc::clone(set), approx.clone())?;
    check_vector_set(set, v)?;
    let mut out = CoeffVector::zeros(Arc::clone(set));
    op.apply(v.data(), out.data_mut())?;
    Ok(out)
}

/// Harmonic-oscillator diagonal `sum_l (k_l + ½)` for every index.
pub fn oscillator_diagonal(set: &IndexSet) -> Vec<f64> {
    set.iter()
        .map(|k| k.iter().map(|&kl| kl as f64 + 0.5).sum())
        .collect()
}

/// `D + W^pol(X_K)` as a reusable [`Operator`].
#[derive(Clone, Debug)]
pub struct FastHamiltonian {
    set: Arc<IndexSet>,
    approx: ChebApprox,
    diagonal: Vec<f64>,
    axis_order: Vec<usize>,
    include_diagonal: bool,
    quadratic: Option<f64>,
}

impl FastHamiltonian {
    pub fn new(set: Arc<IndexSet>, approx: ChebApprox) -> Result<Self> {
        check_approx(&set, &approx)?;
        let diagonal = oscillator_diagonal(&set);
        let axis_order = (0..set.dim()).rev().collect();
        Ok(FastHamiltonian { set, approx, diagonal, axis_order, include_diagonal: true, quadratic: None })
    }

    /// Variant for potentials containing `c · sum_l x_l²`: that part is
    /// removed from the Chebyshev expansion and applied as the restriction of
    /// `X_full²` on the cube of order `K`, which is what `W^GH` contains. The
    /// remaining terms go through the fast algorithm.
    pub fn with_exact_quadratic(set: Arc<IndexSet>, approx: ChebApprox, c: f64) -> Result<Self> {
        check_approx(&set, &approx)?;
        let approx = remove_quadratic(&approx, c)?;
        let mut op = Self::new(set, approx)?;
        op.quadratic = Some(c);
        Ok(op)
    }

    /// Only the potential part `W^pol(X_K)`.
    pub fn potential_only(set: Arc<IndexSet>, approx: ChebApprox) -> Result<Self> {
        let mut op = Self::new(set, approx)?;
        op.include_diagonal = false;
        Ok(op)
    }

    pub fn set(&self) -> &Arc<IndexSet> {
        &self.set
    }

    pub fn approx(&self) -> &ChebApprox {
        &self.approx
    }
}

impl Operator for FastHamiltonian {
    fn dim(&self) -> usize {
        self.set.len()
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) -> Result<()> {
        check_lengths(self.set.len(), x, y)?;
        let mut ws = Workspace::new(&self.set);
        accumulate_potential(&self.set, &self.approx, &self.axis_order, x, y, &mut ws);
        if let Some(c) = self.quadratic {
            add_exact_square(&self.set, c, x, y);
        }
        if self.include_diagonal {
            for ((yi, xi), d) in y.iter_mut().zip(x).zip(&self.diagonal) {
                *yi += xi * *d;
            }
        }
        finite_or_err(y)
    }
}

/// `approx − c · sum_l x_l²`, using `x² = (L²/2)(T_2(x/L) + 1)`.
fn remove_quadratic(approx: &ChebApprox, c: f64) -> Result<ChebApprox> {
    let dim = approx.dim();
    let shift = c * approx.halfwidth() * approx.halfwidth() / 2.0;
    let mut terms: Vec<(MultiIndex, f64)> = approx.terms().to_vec();
    let mut targets: Vec<MultiIndex> = (0..dim)
        .map(|l| {
            let mut r = vec![0u32; dim];
            r[l] = 2;
            MultiIndex::new(r)
        })
        .collect();
    targets.push(MultiIndex::zeros(dim));
    for (i, target) in targets.into_iter().enumerate() {
        let delta = if i < dim { -shift } else { -shift * dim as f64 };
        match terms.iter_mut().find(|(r, _)| *r == target) {
            Some((_, a)) => *a += delta,
            None => terms.push((target, delta)),
        }
    }
    ChebApprox::from_terms(dim, approx.halfwidth(), terms)
}

/// `y += c · sum_l Ω(X_full^{(l)} X_full^{(l)}) Ω₊ x` on the cube of order
/// `K`: `(X²)_{j,j} = j_l + ½` (or `K/2` when `j_l = K`),
/// `(X²)_{j,j+2e_l} = sqrt((j_l+1)(j_l+2))/2`, `(X²)_{j,j−2e_l} = sqrt(j_l(j_l−1))/2`.
fn add_exact_square(set: &IndexSet, c: f64, x: &[Complex64], y: &mut [Complex64]) {
    let top = set.bound() as f64;
    for axis in 0..set.dim() {
        let (down, up) = set.neighbor_tables(axis);
        for (i, yi) in y.iter_mut().enumerate() {
            let jl = set.index(i)[axis] as f64;
            let diag = if jl < top { jl + 0.5 } else { jl / 2.0 };
            let mut acc = x[i] * diag;
            let d = down[i];
            if d != ABSENT && down[d as usize] != ABSENT {
                acc += x[down[d as usize] as usize] * ((jl * (jl - 1.0)).sqrt() / 2.0);
            }
            let u = up[i];
            if u != ABSENT && up[u as usize] != ABSENT {
                acc += x[up[u as usize] as usize] * (((jl + 1.0) * (jl + 2.0)).sqrt() / 2.0);
            }
            *yi += acc * c;
        }
    }
}

/// `D + W^pol(X_K, t)` with the potential re-interpolated at each requested
/// time.
pub struct FastProblem {
    set: Arc<IndexSet>,
    spec: PotentialSpec,
    degree: usize,
    quadratic: Option<f64>,
    frozen: Option<FastHamiltonian>,
}

impl FastProblem {
    pub fn new(set: Arc<IndexSet>, spec: PotentialSpec, degree: usize) -> Result<Self> {
        if spec.dim() != set.dim() {
            return Err(Error::DimensionMismatch { expected: set.dim(), got: spec.dim() });
        }
        let mut problem = FastProblem { set, spec, degree, quadratic: None, frozen: None };
        problem.freeze()?;
        Ok(problem)
    }

    /// See [`FastHamiltonian::with_exact_quadratic`].
    pub fn with_exact_quadratic(mut self, c: f64) -> Result<Self> {
        self.quadratic = Some(c);
        self.freeze()?;
        Ok(self)
    }

    fn freeze(&mut self) -> Result<()> {
        self.frozen = if self.spec.is_time_dependent() { None } else { Some(self.build(0.0)?) };
        Ok(())
    }

    fn build(&self, t: f64) -> Result<FastHamiltonian> {
        let approx = interpolate(&self.spec, self.degree, t)?;
        match self.quadratic {
            Some(c) => FastHamiltonian::with_exact_quadratic(Arc::clone(&self.set), approx, c),
            None => FastHamiltonian::new(Arc::clone(&self.set), approx),
        }
    }

    pub fn set(&self) -> &Arc<IndexSet> {
        &self.set
    }

    pub fn hamiltonian_at(&self, t: f64) -> Result<FastHamiltonian> {
        match &self.frozen {
            Some(h) => Ok(h.clone()),
            None => self.build(t),
        }
    }
}

impl TimeDependentOperator for FastProblem {
    fn dim(&self) -> usize {
        self.set.len()
    }

    fn at(&self, t: f64) -> Result<Box<dyn Operator + '_>> {
        match &self.frozen {
            Some(h) => Ok(Box::new(BorrowedFast(h))),
            None => Ok(Box::new(self.hamiltonian_at(t)?)),
        }
    }
}

struct BorrowedFast<'a>(&'a FastHamiltonian);

impl Operator for BorrowedFast<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) -> Result<()> {
        self.0.apply(x, y)
    }
}
