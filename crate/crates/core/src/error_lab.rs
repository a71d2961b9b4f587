//! Error measurements for the fast algorithm.
//!
//! Three quantities are measured on decaying test vectors:
//!
//! * `E^quad v = (W_exact − W^GH) v`, the quadrature error of the Galerkin
//!   matrix;
//! * `E^red(v) = W^pol(X_K) v − Ω(W^pol(X_full) Ω₊ v)`, the error from
//!   truncating the coordinate matrices to a reduced set;
//! * the gap between Lanczos exponentials (and whole Magnus propagations)
//!   driven by the fast matvec and by the assembled `W^GH`.

use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;

use crate::coeff::{norm2, CoeffVector};
use crate::error::{Error, Result};
use crate::fast_apply::{fast_algorithm, FastHamiltonian, FastProblem};
use crate::galerkin_oracle::{assemble_exact_galerkin, assemble_quad_galerkin, DenseHamiltonian, DenseProblem};
use crate::hermite_basis::gauss_hermite_rule;
use crate::index_set::{extend, restrict, IndexSet, SetKind};
use crate::krylov::{lanczos, step_count, tridiag_eigen, MagnusScheme, Propagator};
use crate::operator::{FnOperator, Operator, TimeDependentOperator};
use crate::potential_approx::{interpolate, ChebApprox, PotentialKind, PotentialSpec};

/// `v_k ∝ prod_l max(k_l, 1)^{-β}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecayProfile {
    pub beta: u32,
    pub normalized: bool,
}

impl DecayProfile {
    pub fn new(beta: u32) -> Self {
        DecayProfile { beta, normalized: true }
    }

    pub fn vector(&self, set: &Arc<IndexSet>) -> Result<CoeffVector> {
        if self.beta == 0 {
            return Err(Error::InvalidArgument("decay exponent must be at least 1".into()));
        }
        let b = self.beta as i32;
        let raw: Vec<f64> = set
            .iter()
            .map(|k| k.iter().map(|&kl| (kl.max(1) as f64).powi(-b)).product())
            .collect();
        let scale = if self.normalized { 1.0 / raw.iter().map(|x| x * x).sum::<f64>().sqrt() } else { 1.0 };
        CoeffVector::from_vec(
            Arc::clone(set),
            raw.into_iter().map(|x| Complex64::new(x * scale, 0.0)).collect(),
        )
    }
}

/// Normalized decay vector of exponent `beta` on `set`.
pub fn make_decay_vector(set: &Arc<IndexSet>, beta: u32) -> Result<CoeffVector> {
    DecayProfile::new(beta).vector(set)
}

/// Configuration echoed into every report.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReportMeta {
    pub dim: usize,
    pub bound: usize,
    pub degree: usize,
    pub halfwidth: f64,
    pub beta: Option<u32>,
    pub potential: Option<String>,
    pub seed: Option<u64>,
}

/// Componentwise error magnitudes over an index set.
#[derive(Clone, Debug)]
pub struct ErrorReport {
    pub set: Arc<IndexSet>,
    pub components: Vec<f64>,
    pub max_norm: f64,
    pub meta: ReportMeta,
}

impl ErrorReport {
    fn from_vector(e: &CoeffVector, approx: &ChebApprox) -> Self {
        let components: Vec<f64> = e.data().iter().map(|c| c.norm()).collect();
        let max_norm = components.iter().copied().fold(0.0, f64::max);
        let set = Arc::clone(e.set());
        let meta = ReportMeta {
            dim: set.dim(),
            bound: set.bound(),
            degree: approx.degree(),
            halfwidth: approx.halfwidth(),
            ..ReportMeta::default()
        };
        ErrorReport { set, components, max_norm, meta }
    }

    pub fn with_beta(mut self, beta: u32) -> Self {
        self.meta.beta = Some(beta);
        self
    }

    pub fn with_potential(mut self, potential: impl Into<String>) -> Self {
        self.meta.potential = Some(potential.into());
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.meta.seed = Some(seed);
        self
    }

    pub fn component(&self, k: &[u32]) -> Option<f64> {
        self.set.ordinal(k).map(|i| self.components[i])
    }

    /// `#`-prefixed metadata, then `k_1,...,k_N,magnitude` rows.
    pub fn to_csv(&self) -> String {
        let m = &self.meta;
        let mut out = String::new();
        let _ = writeln!(out, "# N={}", m.dim);
        let _ = writeln!(out, "# K={}", m.bound);
        let _ = writeln!(out, "# R={}", m.degree);
        let _ = writeln!(out, "# L={}", m.halfwidth);
        if let Some(b) = m.beta {
            let _ = writeln!(out, "# beta={b}");
        }
        if let Some(p) = &m.potential {
            let _ = writeln!(out, "# potential={p}");
        }
        if let Some(s) = m.seed {
            let _ = writeln!(out, "# seed={s}");
        }
        let _ = writeln!(out, "# max_error={:.16e}", self.max_norm);
        let header: Vec<String> = (1..=m.dim).map(|l| format!("k_{l}")).collect();
        let _ = writeln!(out, "{},magnitude", header.join(","));
        for (k, e) in self.set.iter().zip(&self.components) {
            let idx: Vec<String> = k.iter().map(u32::to_string).collect();
            let _ = writeln!(out, "{},{:.16e}", idx.join(","), e);
        }
        out
    }
}

/// `(W_exact − W^GH) v` on `v`'s index set.
pub fn quadrature_error(set: &Arc<IndexSet>, approx: &ChebApprox, v: &CoeffVector) -> Result<ErrorReport> {
    let rule = gauss_hermite_rule(set.bound())?;
    let quad = assemble_quad_galerkin(set, approx, &rule)?;
    let exact = assemble_exact_galerkin(set, approx)?;
    let e = exact.matvec(v)?.sub(&quad.matvec(v)?)?;
    Ok(ErrorReport::from_vector(&e, approx))
}

/// `fast(set, v) − restrict(fast(full, extend(v)))`.
pub fn reduction_error(
    set: &Arc<IndexSet>,
    full: &Arc<IndexSet>,
    approx: &ChebApprox,
    v: &CoeffVector,
) -> Result<ErrorReport> {
    if full.kind() != SetKind::Full {
        return Err(Error::SetMismatch("reference set must be full".into()));
    }
    if full.dim() != set.dim() || full.bound() != set.bound() {
        return Err(Error::SetMismatch(format!(
            "sets differ: N={} K={} versus N={} K={}",
            set.dim(),
            set.bound(),
            full.dim(),
            full.bound()
        )));
    }
    let reduced = fast_algorithm(set, approx, v)?;
    let on_full = fast_algorithm(full, approx, &extend(v, full)?)?;
    let e = reduced.sub(&restrict(&on_full, set)?)?;
    Ok(ErrorReport::from_vector(&e, approx))
}

/// Ordinals `j` of `set` with `j + r ∈ set` for every term `r` of `approx`.
pub fn interior_indices(set: &IndexSet, approx: &ChebApprox) -> Vec<usize> {
    let dim = set.dim();
    let mut shifted = vec![0u32; dim];
    (0..set.len())
        .filter(|&i| {
            let j = set.index(i);
            approx.terms().iter().all(|(r, _)| {
                for l in 0..dim {
                    shifted[l] = j[l] + r[l];
                }
                set.contains(&shifted)
            })
        })
        .collect()
}

/// Problem shared by the Lanczos and propagation studies.
#[derive(Clone, Debug)]
pub struct ProblemConfig {
    pub dim: usize,
    pub bound: usize,
    pub degree: usize,
    pub halfwidth: f64,
    pub beta: u32,
    pub potential: PotentialKind,
    /// Apply the `−½ sum x²` part of the potential without reduction error
    /// (see [`FastHamiltonian::with_exact_quadratic`]).
    pub exact_harmonic: bool,
}

/// Coefficient `c` of the `c · sum_l x_l²` part of a built-in potential.
pub fn harmonic_coefficient(kind: PotentialKind) -> Option<f64> {
    match kind {
        PotentialKind::TorsionalMinusHarmonic | PotentialKind::HenonHeilesPerturbed => Some(-0.5),
        PotentialKind::Torsional | PotentialKind::Custom => None,
    }
}

impl ProblemConfig {
    pub fn spec(&self) -> Result<PotentialSpec> {
        PotentialSpec::new(self.potential, self.dim, self.halfwidth)
    }

    pub fn set(&self) -> Result<Arc<IndexSet>> {
        Ok(Arc::new(IndexSet::hyperbolic(self.dim, self.bound)?))
    }

    fn split(&self) -> Option<f64> {
        if self.exact_harmonic {
            harmonic_coefficient(self.potential)
        } else {
            None
        }
    }

    /// The fast Hamiltonian of this configuration.
    pub fn fast_problem(&self, set: &Arc<IndexSet>) -> Result<FastProblem> {
        let problem = FastProblem::new(Arc::clone(set), self.spec()?, self.degree)?;
        match self.split() {
            Some(c) => problem.with_exact_quadratic(c),
            None => Ok(problem),
        }
    }
}

/// Outcome of one perturbed-versus-unperturbed Lanczos exponential.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbationResult {
    /// `‖V_m e^{-ihT_m} e_1 − Ṽ_m e^{-ihT̃_m} e_1‖₂`
    pub error: f64,
    /// `h ‖F_m‖₂ exp(h(‖A‖₂ + ‖F_m‖₂))`
    pub bound: f64,
    pub f_norm: f64,
    pub a_norm: f64,
    /// `‖V_m e^{-ihT_m} e_1 − e^{-ihA} v‖₂` for the assembled `A`.
    pub lanczos_error: f64,
}

/// Largest eigenvalue magnitude of a Hermitian operator, from the Ritz
/// values of a reorthogonalized Lanczos run.
fn spectral_norm(op: &dyn Operator, start: &[Complex64], steps: usize) -> Result<f64> {
    let f = lanczos(op, start, steps.min(op.dim()), true)?;
    let eig = tridiag_eigen(&f.alpha, &f.beta)?;
    Ok(eig.values.iter().fold(0.0f64, |m, x| m.max(x.abs())))
}

/// `‖F‖₂` for the `n × m` matrix with the given columns.
fn matrix_two_norm(columns: &[Vec<Complex64>]) -> Result<f64> {
    let m = columns.len();
    let gram: Vec<Complex64> = (0..m * m)
        .map(|i| crate::coeff::dot(&columns[i / m], &columns[i % m]))
        .collect();
    if gram.iter().all(|g| g.norm() == 0.0) {
        return Ok(0.0);
    }
    let op = FnOperator::new(m, move |x: &[Complex64], y: &mut [Complex64]| {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = (0..m).map(|j| gram[i * m + j] * x[j]).sum();
        }
    });
    let start: Vec<Complex64> = (0..m).map(|i| Complex64::new(1.0 + i as f64 * 1e-3, 0.0)).collect();
    Ok(spectral_norm(&op, &start, m)?.sqrt())
}

/// Steps of a reorthogonalized Lanczos run used as the exact exponential.
const EXACT_LANCZOS_STEPS: usize = 60;

/// One Lanczos exponential `exp(-ihA) v` with `A = D + W^GH` versus
/// `A = D + W^pol(X_K)`, both started from the decay vector.
pub fn lanczos_perturbation_error(config: &ProblemConfig, h: f64, m: usize) -> Result<PerturbationResult> {
    let set = config.set()?;
    let approx = interpolate(&config.spec()?, config.degree, 0.0)?;
    let rule = gauss_hermite_rule(set.bound())?;
    let oracle = DenseHamiltonian::new(assemble_quad_galerkin(&set, &approx, &rule)?);
    let fast = match config.split() {
        Some(c) => FastHamiltonian::with_exact_quadratic(Arc::clone(&set), approx, c)?,
        None => FastHamiltonian::new(Arc::clone(&set), approx)?,
    };
    let v = make_decay_vector(&set, config.beta)?;
    perturbation_between(&oracle, &fast, v.data(), h, m)
}

/// [`lanczos_perturbation_error`] for arbitrary exact and perturbed operators.
pub fn perturbation_between(
    exact: &dyn Operator,
    perturbed: &dyn Operator,
    v: &[Complex64],
    h: f64,
    m: usize,
) -> Result<PerturbationResult> {
    let clean = lanczos(exact, v, m, false)?;
    let noisy = lanczos(perturbed, v, m, false)?;
    let y = clean.exp_apply(h)?;
    let y_tilde = noisy.exp_apply(h)?;
    let error = norm2(&diff(&y, &y_tilde));

    let mut columns = Vec::with_capacity(noisy.basis.len());
    for vk in &noisy.basis {
        let a = exact.apply_vec(vk)?;
        let b = perturbed.apply_vec(vk)?;
        columns.push(diff(&a, &b));
    }
    let f_norm = matrix_two_norm(&columns)?;
    let a_norm = spectral_norm(exact, v, EXACT_LANCZOS_STEPS)?;
    let bound = h * f_norm * (h * (a_norm + f_norm)).exp();

    let reference = lanczos(exact, v, EXACT_LANCZOS_STEPS, true)?.exp_apply(h)?;
    let lanczos_error = norm2(&diff(&y, &reference));
    Ok(PerturbationResult { error, bound, f_norm, a_norm, lanczos_error })
}

fn diff(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Settings of the reference propagation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReferenceConfig {
    pub scheme: MagnusScheme,
    pub step: f64,
    pub lanczos_steps: usize,
}

impl Default for ReferenceConfig {
    fn default() -> Self {
        ReferenceConfig { scheme: MagnusScheme::GaussLegendre2, step: 1e-4, lanczos_steps: 20 }
    }
}

/// High-accuracy solution at `t_end` built with the assembled `W^GH`.
#[derive(Clone, Debug)]
pub struct ReferenceSolution {
    pub state: CoeffVector,
    pub t_end: f64,
    pub config: ReferenceConfig,
}

impl ReferenceSolution {
    pub fn compute(problem: &ProblemConfig, reference: ReferenceConfig, t_end: f64) -> Result<Self> {
        let set = problem.set()?;
        let oracle = DenseProblem::new(Arc::clone(&set), problem.spec()?, problem.degree)?;
        let c0 = make_decay_vector(&set, problem.beta)?;
        let steps = step_count(0.0, t_end, reference.step)?;
        let prop = Propagator::new(reference.scheme, reference.step, reference.lanczos_steps);
        let out = prop.run(&oracle, &c0, 0.0, steps)?;
        Ok(ReferenceSolution { state: out.state, t_end, config: reference })
    }
}

/// Errors of one propagation at the final time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropagationErrors {
    /// `max_j |c^n − c(t_end)|` against the reference.
    pub scheme_error: f64,
    /// `max_j |c^n − c̄^n|` against the same scheme with the assembled matvec.
    pub perturbation_error: f64,
    /// Largest per-step norm change of the fast propagation.
    pub max_norm_drift: f64,
}

/// Propagates with the fast matvec and with the assembled matvec and
/// compares both with the reference at its final time.
pub fn propagate_and_compare(
    problem: &ProblemConfig,
    scheme: MagnusScheme,
    h: f64,
    m: usize,
    reference: &ReferenceSolution,
) -> Result<PropagationErrors> {
    let set = problem.set()?;
    if **reference.state.set() != *set {
        return Err(Error::SetMismatch("reference lives on a different index set".into()));
    }
    let spec = problem.spec()?;
    let fast = problem.fast_problem(&set)?;
    let oracle = DenseProblem::new(Arc::clone(&set), spec, problem.degree)?;
    let c0 = make_decay_vector(&set, problem.beta)?;
    let steps = step_count(0.0, reference.t_end, h)?;
    let prop = Propagator::new(scheme, h, m);
    let fast_run = prop.run(&fast as &dyn TimeDependentOperator, &c0, 0.0, steps)?;
    let oracle_run = prop.run(&oracle as &dyn TimeDependentOperator, &c0, 0.0, steps)?;
    Ok(PropagationErrors {
        scheme_error: max_abs_diff(fast_run.state.data(), reference.state.data()),
        perturbation_error: max_abs_diff(fast_run.state.data(), oracle_run.state.data()),
        max_norm_drift: fast_run.max_norm_drift,
    })
}
