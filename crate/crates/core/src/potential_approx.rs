//! Model potentials and their tensor Chebyshev interpolants on `[-L, L]^N`.
//!
//! The interpolant is `W^pol(x, t) = sum_r α_r(t) prod_l T_{r_l}(x_l / L)`,
//! built on the full `(R+1)^N` grid of Chebyshev–Gauss nodes and stored as a
//! sparse list of the coefficients that survive a relative drop threshold.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::index_set::MultiIndex;

/// Coefficients below this fraction of the largest one are dropped.
pub const DROP_THRESHOLD: f64 = 1e-14;

/// Points per axis of the validation grid reported by [`interpolate`].
pub const VALIDATION_POINTS: usize = 33;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PotentialKind {
    /// `sum_l (1 - cos(x_l / L))`
    Torsional,
    /// Torsional minus `½ sum_l x_l²`.
    TorsionalMinusHarmonic,
    /// Stretched Hénon–Heiles coupling with a `-sin²(t) x_1` drive, minus
    /// `½ sum_l x_l²`.
    HenonHeilesPerturbed,
    Custom,
}

impl PotentialKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PotentialKind::Torsional => "torsional",
            PotentialKind::TorsionalMinusHarmonic => "torsional-ho",
            PotentialKind::HenonHeilesPerturbed => "henon-heiles",
            PotentialKind::Custom => "custom",
        }
    }
}

impl fmt::Display for PotentialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PotentialKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "torsional" => Ok(PotentialKind::Torsional),
            "torsional-ho" => Ok(PotentialKind::TorsionalMinusHarmonic),
            "henon-heiles" => Ok(PotentialKind::HenonHeilesPerturbed),
            other => Err(Error::Parse(format!(
                "unknown potential '{other}' (expected torsional, torsional-ho or henon-heiles)"
            ))),
        }
    }
}

type Evaluator = Arc<dyn Fn(&[f64], f64) -> f64 + Send + Sync>;

/// A potential `W(x, t)` on the cube `[-L, L]^N`.
#[derive(Clone)]
pub struct PotentialSpec {
    kind: PotentialKind,
    halfwidth: f64,
    dim: usize,
    evaluator: Evaluator,
}

impl fmt::Debug for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialSpec")
            .field("kind", &self.kind)
            .field("halfwidth", &self.halfwidth)
            .field("dim", &self.dim)
            .finish()
    }
}

fn check_geometry(dim: usize, halfwidth: f64) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    if !(halfwidth > 0.0) || !halfwidth.is_finite() {
        return Err(Error::InvalidArgument(format!("halfwidth must be positive, got {halfwidth}")));
    }
    Ok(())
}

fn torsional(x: &[f64], l: f64) -> f64 {
    x.iter().map(|&xi| 1.0 - (xi / l).cos()).sum()
}

fn half_square(x: &[f64]) -> f64 {
    0.5 * x.iter().map(|&xi| xi * xi).sum::<f64>()
}

impl PotentialSpec {
    pub fn new(kind: PotentialKind, dim: usize, halfwidth: f64) -> Result<Self> {
        check_geometry(dim, halfwidth)?;
        let l = halfwidth;
        let evaluator: Evaluator = match kind {
            PotentialKind::Torsional => Arc::new(move |x, _t| torsional(x, l)),
            PotentialKind::TorsionalMinusHarmonic => {
                Arc::new(move |x, _t| torsional(x, l) - half_square(x))
            }
            PotentialKind::HenonHeilesPerturbed => Arc::new(move |x, t| {
                let coupling: f64 = x
                    .windows(2)
                    .map(|w| {
                        let (a, b) = (w[0] / l, w[1] / l);
                        a * a * b - b * b * b / 3.0
                    })
                    .sum();
                let drive = t.sin().powi(2) * x[0];
                coupling - drive - half_square(x)
            }),
            PotentialKind::Custom => {
                return Err(Error::InvalidArgument(
                    "custom potentials are built with PotentialSpec::custom".into(),
                ))
            }
        };
        Ok(PotentialSpec { kind, halfwidth, dim, evaluator })
    }

    pub fn custom(
        dim: usize,
        halfwidth: f64,
        f: impl Fn(&[f64], f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        check_geometry(dim, halfwidth)?;
        Ok(PotentialSpec { kind: PotentialKind::Custom, halfwidth, dim, evaluator: Arc::new(f) })
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    pub fn halfwidth(&self) -> f64 {
        self.halfwidth
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Whether `W` depends on time.
    pub fn is_time_dependent(&self) -> bool {
        matches!(self.kind, PotentialKind::HenonHeilesPerturbed | PotentialKind::Custom)
    }

    pub fn evaluate(&self, x: &[f64], t: f64) -> f64 {
        (self.evaluator)(x, t)
    }
}

/// `T_0(y), ..., T_R(y)` by the three-term recurrence; `|y| <= 1` required.
pub fn chebyshev_values(y: f64, degree: usize) -> Result<Vec<f64>> {
    if !(y.abs() <= 1.0 + 1e-12) {
        return Err(Error::OutsideDomain(vec![y]));
    }
    let mut out = vec![0.0; degree + 1];
    chebyshev_into(y, &mut out);
    Ok(out)
}

/// Unchecked recurrence, also valid (as a polynomial) outside `[-1, 1]`.
pub(crate) fn chebyshev_into(y: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = y;
    }
    for k in 1..out.len().saturating_sub(1) {
        out[k + 1] = 2.0 * y * out[k] - out[k - 1];
    }
}

/// Sparse tensor Chebyshev expansion of a potential at a fixed time.
#[derive(Clone, Debug, PartialEq)]
pub struct ChebApprox {
    dim: usize,
    degree: usize,
    halfwidth: f64,
    time: f64,
    terms: Vec<(MultiIndex, f64)>,
    interpolation_error: f64,
}

impl ChebApprox {
    /// Expansion from explicit `(r, α_r)` pairs; zero coefficients are dropped.
    pub fn from_terms(
        dim: usize,
        halfwidth: f64,
        terms: Vec<(MultiIndex, f64)>,
    ) -> Result<Self> {
        check_geometry(dim, halfwidth)?;
        let mut degree = 0;
        for (r, a) in &terms {
            if r.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: r.dim() });
            }
            if !a.is_finite() {
                return Err(Error::NonFinite(format!("coefficient of {r}")));
            }
            degree = degree.max(r.iter().copied().max().unwrap_or(0) as usize);
        }
        let terms = terms.into_iter().filter(|(_, a)| *a != 0.0).collect();
        Ok(ChebApprox { dim, degree, halfwidth, time: 0.0, terms, interpolation_error: 0.0 })
    }

    /// `W^pol = c`.
    pub fn constant(dim: usize, halfwidth: f64, c: f64) -> Result<Self> {
        Self::from_terms(dim, halfwidth, vec![(MultiIndex::zeros(dim), c)])
    }

    /// `W^pol = x_axis`, i.e. `α_{e_axis} = L`.
    pub fn coordinate(dim: usize, halfwidth: f64, axis: usize) -> Result<Self> {
        if axis >= dim {
            return Err(Error::AxisOutOfRange { axis, dim });
        }
        Self::from_terms(dim, halfwidth, vec![(MultiIndex::unit(dim, axis), halfwidth)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Maximal per-axis degree `R`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn halfwidth(&self) -> f64 {
        self.halfwidth
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn terms(&self) -> &[(MultiIndex, f64)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Max-norm interpolation error measured on the validation grid
    /// (zero for expansions built from explicit terms).
    pub fn interpolation_error(&self) -> f64 {
        self.interpolation_error
    }

    /// `sum_r |r|`, the number of coordinate-matrix sweeps per application.
    pub fn total_sweeps(&self) -> u64 {
        self.terms.iter().map(|(r, _)| r.total_degree()).sum()
    }

    /// Evaluates the expansion at a point of the cube.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        let tol = self.halfwidth * (1.0 + 1e-12);
        if x.iter().any(|xi| !(xi.abs() <= tol)) {
            return Err(Error::OutsideDomain(x.to_vec()));
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        let tables: Vec<Vec<f64>> = x
            .iter()
            .map(|&xi| {
                let mut t = vec![0.0; self.degree + 1];
                chebyshev_into(xi / self.halfwidth, &mut t);
                t
            })
            .collect();
        self.terms
            .iter()
            .map(|(r, a)| a * r.iter().enumerate().map(|(l, &rl)| tables[l][rl as usize]).product::<f64>())
            .sum()
    }

    /// CSV with columns `r_1,...,r_N,alpha`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = (1..=self.dim).map(|l| format!("r_{l}")).collect();
        let _ = writeln!(out, "{},alpha", header.join(","));
        for (r, a) in &self.terms {
            let idx: Vec<String> = r.iter().map(u32::to_string).collect();
            let _ = writeln!(out, "{},{a:.17e}", idx.join(","));
        }
        out
    }
}

/// `eval_interpolant`: `sum_r α_r prod_l T_{r_l}(x_l / L)` at a cube point.
pub fn eval_interpolant(approx: &ChebApprox, x: &[f64]) -> Result<f64> {
    approx.eval(x)
}

/// Full tensor Chebyshev interpolation of `spec` at time `t` with maximal
/// per-axis degree `degree` (that is, `degree + 1` Chebyshev–Gauss nodes
/// `L cos(π(2i+1)/(2R+2))` per axis).
pub fn interpolate(spec: &PotentialSpec, degree: usize, t: f64) -> Result<ChebApprox> {
    let dim = spec.dim;
    let l = spec.halfwidth;
    let n = degree + 1;
    let size = n
        .checked_pow(dim as u32)
        .ok_or_else(|| Error::InvalidArgument(format!("interpolation grid {n}^{dim} too large")))?;

    let nodes: Vec<f64> = (0..n)
        .map(|i| (std::f64::consts::PI * (2 * i + 1) as f64 / (2 * n) as f64).cos())
        .collect();
    // transform[r][i] = (2 - δ_{r0}) / n * T_r(y_i)
    let mut transform = vec![0.0; n * n];
    let mut t_vals = vec![0.0; n];
    for (i, &y) in nodes.iter().enumerate() {
        chebyshev_into(y, &mut t_vals);
        for r in 0..n {
            let w = if r == 0 { 1.0 } else { 2.0 } / n as f64;
            transform[r * n + i] = w * t_vals[r];
        }
    }

    let mut values = vec![0.0; size];
    let mut point = vec![0.0; dim];
    for (flat, v) in values.iter_mut().enumerate() {
        let mut rem = flat;
        for axis in (0..dim).rev() {
            point[axis] = l * nodes[rem % n];
            rem /= n;
        }
        *v = spec.evaluate(&point, t);
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("potential at {point:?}, t = {t}")));
        }
    }

    // separable transform, one axis at a time
    let mut scratch = vec![0.0; size];
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        let block = stride * n;
        for base in (0..size).step_by(block) {
            for offset in 0..stride {
                for r in 0..n {
                    let mut acc = 0.0;
                    for i in 0..n {
                        acc += transform[r * n + i] * values[base + offset + i * stride];
                    }
                    scratch[base + offset + r * stride] = acc;
                }
            }
        }
        std::mem::swap(&mut values, &mut scratch);
    }

    let max_abs = values.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let cutoff = DROP_THRESHOLD * max_abs;
    let mut terms = Vec::new();
    for (flat, &a) in values.iter().enumerate() {
        if a != 0.0 && a.abs() >= cutoff {
            let mut r = vec![0u32; dim];
            let mut rem = flat;
            for axis in (0..dim).rev() {
                r[axis] = (rem % n) as u32;
                rem /= n;
            }
            terms.push((MultiIndex::new(r), a));
        }
    }

    let mut approx = ChebApprox {
        dim,
        degree,
        halfwidth: l,
        time: t,
        terms,
        interpolation_error: 0.0,
    };
    approx.interpolation_error = validation_error(spec, &approx, t);
    Ok(approx)
}

/// Max-norm gap on a `33^min(N,2)` grid over the first two axes; any further
/// coordinates are pinned at `0.37 L`.
fn validation_error(spec: &PotentialSpec, approx: &ChebApprox, t: f64) -> f64 {
    let dim = spec.dim;
    let l = spec.halfwidth;
    let axes = dim.min(2);
    let grid: Vec<f64> = (0..VALIDATION_POINTS)
        .map(|i| -l + 2.0 * l * i as f64 / (VALIDATION_POINTS - 1) as f64)
        .collect();
    let mut point = vec![0.37 * l; dim];
    let mut worst = 0.0f64;
    for flat in 0..VALIDATION_POINTS.pow(axes as u32) {
        let mut rem = flat;
        for axis in 0..axes {
            point[axis] = grid[rem % VALIDATION_POINTS];
            rem /= VALIDATION_POINTS;
        }
        let gap = (spec.evaluate(&point, t) - approx.eval_unchecked(&point)).abs();
        worst = worst.max(gap);
    }
    worst
}
