//! Command-line front end: experiment sweeps that print CSV tables.
//!
//! Every command shares one flag set; defaults depend on the command and are
//! resolved in [`Config::resolve`].

mod csv;
mod fraction;

use std::ffi::OsString;
use std::io::Write as _;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::coeff::CoeffVector;
use crate::error::{Error, Result};
use crate::error_lab::{
    lanczos_perturbation_error, make_decay_vector, propagate_and_compare, quadrature_error, reduction_error,
    ProblemConfig, ReferenceConfig, ReferenceSolution,
};
use crate::fast_apply::fast_algorithm;
use crate::galerkin_oracle::{assemble_quad_galerkin, assemble_with_rule, dense_cap, verify_diagonalization, DenseTag};
use crate::hermite_basis::{check_support_condition, gauss_hermite_rule, hermite_table};
use crate::index_set::IndexSet;
use crate::krylov::MagnusScheme;
use crate::potential_approx::{interpolate, PotentialKind, PotentialSpec};

pub use csv::Table;
pub use fraction::Fraction;

/// Process exit statuses.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const VERIFICATION: i32 = 2;
    pub const NUMERICAL: i32 = 3;
}

#[derive(Debug, Parser)]
#[command(name = "hprop", version, about = "Spectral Galerkin experiments on hyperbolic Hermite bases")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Wall time of dense assemble+multiply versus the fast algorithm.
    Bench,
    /// Quadrature error of the Gauss–Hermite Galerkin matrix.
    Quaderr,
    /// Error caused by index set reduction in the fast algorithm.
    Rederr,
    /// One Lanczos exponential with fast versus assembled matvecs.
    Perturb,
    /// Magnus propagation on [0, 1] against a reference solution.
    Propagate,
    /// Equivalence, orthonormality and diagonalization checks.
    Verify,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Bench => "bench",
            Command::Quaderr => "quaderr",
            Command::Rederr => "rederr",
            Command::Perturb => "perturb",
            Command::Propagate => "propagate",
            Command::Verify => "verify",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PotentialArg {
    Torsional,
    TorsionalHo,
    HenonHeiles,
}

impl From<PotentialArg> for PotentialKind {
    fn from(p: PotentialArg) -> Self {
        match p {
            PotentialArg::Torsional => PotentialKind::Torsional,
            PotentialArg::TorsionalHo => PotentialKind::TorsionalMinusHarmonic,
            PotentialArg::HenonHeiles => PotentialKind::HenonHeilesPerturbed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Midpoint,
    Gl2,
}

impl From<SchemeArg> for MagnusScheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Midpoint => MagnusScheme::Midpoint,
            SchemeArg::Gl2 => MagnusScheme::GaussLegendre2,
        }
    }
}

/// Flags shared by all commands. Unset flags take per-command defaults.
#[derive(Clone, Debug, Default, Args)]
pub struct Flags {
    /// Dimensions N (comma list).
    #[arg(long, global = true, value_delimiter = ',')]
    pub dims: Vec<usize>,
    /// Bounds K (comma list).
    #[arg(long, global = true, value_delimiter = ',')]
    pub kmax: Vec<usize>,
    /// Per-axis Chebyshev degree R.
    #[arg(long, global = true)]
    pub degree: Option<usize>,
    /// Half-width L of the interpolation cube.
    #[arg(long, global = true)]
    pub halfwidth: Option<f64>,
    /// Basis scaling S; only S = 1 is implemented.
    #[arg(long, global = true)]
    pub scale: Option<f64>,
    /// Decay exponent of the test vector.
    #[arg(long, global = true)]
    pub beta: Option<u32>,
    #[arg(long, global = true, value_enum)]
    pub scheme: Option<SchemeArg>,
    /// Lanczos steps m.
    #[arg(long, global = true)]
    pub lanczos: Option<usize>,
    /// Step sizes (comma list, fractions like 1/80 allowed).
    #[arg(long = "h", global = true, value_delimiter = ',')]
    pub h: Vec<Fraction>,
    #[arg(long, global = true, value_enum)]
    pub potential: Option<PotentialArg>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Write the CSV here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Apply the −½Σx² part of the potential without reduction error.
    #[arg(long, global = true)]
    pub exact_harmonic: bool,
    /// Quadrature order M used by `verify` (default K).
    #[arg(long, global = true)]
    pub rule_order: Option<usize>,
    /// Step of the reference propagation.
    #[arg(long, global = true)]
    pub reference_h: Option<Fraction>,
}

/// Fully resolved experiment configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub command: Command,
    pub dims: Vec<usize>,
    pub kmax: Vec<usize>,
    pub degree: usize,
    pub halfwidth: f64,
    pub scale: f64,
    pub beta: u32,
    pub scheme: MagnusScheme,
    pub lanczos: usize,
    pub h: Vec<Fraction>,
    pub potential: PotentialKind,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub exact_harmonic: bool,
    pub rule_order: Option<usize>,
    pub reference_h: Fraction,
}

fn frac(num: i64, den: i64) -> Fraction {
    Fraction::new(num, den).expect("valid literal")
}

impl Config {
    pub fn resolve(command: Command, f: Flags) -> Result<Self> {
        let (dims, kmax, potential, degree, beta, lanczos, h): (Vec<usize>, Vec<usize>, _, _, _, _, Vec<Fraction>) =
            match command {
                Command::Bench => (vec![2], vec![20, 40, 60, 80, 100], PotentialKind::Torsional, 8, 5, 5, vec![]),
                Command::Quaderr | Command::Rederr => {
                    (vec![2], vec![25, 50, 75], PotentialKind::Torsional, 8, 5, 5, vec![])
                }
                Command::Perturb => (
                    vec![2],
                    vec![10, 40],
                    PotentialKind::TorsionalMinusHarmonic,
                    8,
                    3,
                    5,
                    vec![frac(1, 10), frac(1, 20), frac(1, 40), frac(1, 80)],
                ),
                Command::Propagate => (
                    vec![2],
                    vec![40],
                    PotentialKind::HenonHeilesPerturbed,
                    3,
                    3,
                    7,
                    vec![frac(1, 10), frac(1, 20), frac(1, 40), frac(1, 80), frac(1, 160)],
                ),
                Command::Verify => (vec![2], vec![10], PotentialKind::Torsional, 8, 5, 5, vec![]),
            };
        let mut cfg = Config {
            command,
            dims: if f.dims.is_empty() { dims } else { f.dims },
            kmax: if f.kmax.is_empty() { kmax } else { f.kmax },
            degree: f.degree.unwrap_or(degree),
            halfwidth: f.halfwidth.unwrap_or(16.0),
            scale: f.scale.unwrap_or(1.0),
            beta: f.beta.unwrap_or(beta),
            scheme: f.scheme.map(Into::into).unwrap_or(MagnusScheme::Midpoint),
            lanczos: f.lanczos.unwrap_or(lanczos),
            h: if f.h.is_empty() { h } else { f.h },
            potential: f.potential.map(Into::into).unwrap_or(potential),
            seed: f.seed.unwrap_or(0),
            jobs: f.jobs,
            out: f.out,
            exact_harmonic: f.exact_harmonic,
            rule_order: f.rule_order,
            reference_h: f.reference_h.unwrap_or(frac(1, 10_000)),
        };
        cfg.kmax.sort_unstable();
        cfg.kmax.dedup();
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(msg.into()));
        if self.dims.contains(&0) {
            return bad("--dims entries must be at least 1");
        }
        if !(self.halfwidth.is_finite() && self.halfwidth > 0.0) {
            return bad("--halfwidth must be positive");
        }
        if self.scale != 1.0 {
            return bad("--scale: only S = 1 is implemented");
        }
        if self.beta == 0 {
            return bad("--beta must be at least 1");
        }
        if self.lanczos == 0 {
            return bad("--lanczos must be at least 1");
        }
        if self.jobs == Some(0) {
            return bad("--jobs must be at least 1");
        }
        if self.h.iter().chain([&self.reference_h]).any(|h| h.value() <= 0.0) {
            return bad("step sizes must be positive");
        }
        if matches!(self.command, Command::Perturb | Command::Propagate) && self.h.is_empty() {
            return bad("--h needs at least one step size");
        }
        Ok(())
    }

    fn problem(&self, dim: usize, bound: usize) -> ProblemConfig {
        ProblemConfig {
            dim,
            bound,
            degree: self.degree,
            halfwidth: self.halfwidth,
            beta: self.beta,
            potential: self.potential,
            exact_harmonic: self.exact_harmonic,
        }
    }

    fn grid(&self) -> Vec<(usize, usize)> {
        self.dims.iter().flat_map(|&n| self.kmax.iter().map(move |&k| (n, k))).collect()
    }

    fn table(&self, columns: &[&str]) -> Table {
        let mut t = Table::new(columns);
        t.meta("command", self.command.as_str());
        t.meta("dims", join(&self.dims));
        t.meta("kmax", join(&self.kmax));
        t.meta("degree", self.degree);
        t.meta("halfwidth", self.halfwidth);
        t.meta("scale", self.scale);
        t.meta("beta", self.beta);
        t.meta("potential", self.potential.as_str());
        t.meta("seed", self.seed);
        if matches!(self.command, Command::Perturb | Command::Propagate) {
            t.meta("lanczos", self.lanczos);
            t.meta("h", join(&self.h));
            t.meta("exact_harmonic", self.exact_harmonic);
        }
        if self.command == Command::Propagate {
            t.meta("scheme", self.scheme);
            t.meta("reference", format!("gl2,h={},m=20", self.reference_h));
        }
        if self.command == Command::Verify {
            t.meta("rule_order", self.rule_order.map_or("K".to_string(), |m| m.to_string()));
        }
        t.meta("dense_cap", dense_cap());
        t
    }

    /// Warnings for every `K` violating `S L >= sqrt(2(K+1)) + 1`.
    pub fn support_warnings(&self) -> Vec<String> {
        self.kmax
            .iter()
            .filter_map(|&k| check_support_condition(self.scale, self.halfwidth, k).warning_message(
                self.scale,
                self.halfwidth,
                k,
            ))
            .collect()
    }
}

fn join<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Result of a command: the table and whether all checks passed.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub table: Table,
    pub passed: bool,
}

/// Runs one resolved configuration.
pub fn execute(cfg: &Config) -> Result<Outcome> {
    let threads = cfg.jobs.or(if cfg.command == Command::Bench { Some(1) } else { None });
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| match cfg.command {
        Command::Bench => cmd_bench(cfg),
        Command::Quaderr => cmd_errors(cfg, false),
        Command::Rederr => cmd_errors(cfg, true),
        Command::Perturb => cmd_perturb(cfg),
        Command::Propagate => cmd_propagate(cfg),
        Command::Verify => cmd_verify(cfg),
    })
}

/// Median of `reps` timings after one warmup. Each timing repeats `f` until
/// at least a millisecond has passed and reports the mean.
fn median_seconds(reps: usize, mut f: impl FnMut() -> Result<()>) -> Result<f64> {
    f()?;
    let mut samples = Vec::with_capacity(reps);
    for _ in 0..reps {
        let start = Instant::now();
        let mut runs = 0u32;
        loop {
            f()?;
            runs += 1;
            if start.elapsed().as_secs_f64() >= 1e-3 {
                break;
            }
        }
        samples.push(start.elapsed().as_secs_f64() / runs as f64);
    }
    samples.sort_by(f64::total_cmp);
    Ok(samples[samples.len() / 2])
}

/// One benchmark row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchRow {
    pub dim: usize,
    pub bound: usize,
    pub size: usize,
    pub dense_seconds: Option<f64>,
    pub fast_seconds: f64,
}

impl BenchRow {
    pub fn ratio(&self) -> Option<f64> {
        self.dense_seconds.map(|d| d / self.fast_seconds)
    }
}

/// Times `W^GH` assembly plus one product against one fast application on
/// a seeded random vector over the hyperbolic set.
pub fn bench_point(dim: usize, bound: usize, spec: &PotentialSpec, degree: usize, seed: u64) -> Result<BenchRow> {
    let set = Arc::new(IndexSet::hyperbolic(dim, bound)?);
    let approx = interpolate(spec, degree, 0.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((dim as u64) << 32) ^ bound as u64);
    let v = CoeffVector::random_complex(Arc::clone(&set), &mut rng);
    let fast_seconds = median_seconds(5, || fast_algorithm(&set, &approx, &v).map(|_| ()))?;
    let dense_seconds = if set.len() <= dense_cap() {
        let rule = gauss_hermite_rule(bound)?;
        Some(median_seconds(5, || assemble_quad_galerkin(&set, &approx, &rule)?.matvec(&v).map(|_| ()))?)
    } else {
        None
    };
    Ok(BenchRow { dim, bound, size: set.len(), dense_seconds, fast_seconds })
}

fn cmd_bench(cfg: &Config) -> Result<Outcome> {
    let mut table = cfg.table(&["N", "K", "size", "dense_seconds", "fast_seconds", "ratio"]);
    for (n, k) in cfg.grid() {
        let spec = PotentialSpec::new(cfg.potential, n, cfg.halfwidth)?;
        let row = bench_point(n, k, &spec, cfg.degree, cfg.seed)?;
        let opt = |x: Option<f64>| x.map_or_else(|| "skipped".to_string(), csv::real);
        table.row(vec![
            n.to_string(),
            k.to_string(),
            row.size.to_string(),
            opt(row.dense_seconds),
            csv::real(row.fast_seconds),
            opt(row.ratio()),
        ]);
    }
    Ok(Outcome { table, passed: true })
}

fn cmd_errors(cfg: &Config, reduction: bool) -> Result<Outcome> {
    let mut table = cfg.table(&["N", "K", "R", "L", "beta", "potential", "seed", "size", "max_error"]);
    let rows: Vec<Result<(usize, usize, usize, f64)>> = cfg
        .grid()
        .into_par_iter()
        .map(|(n, k)| {
            let set = Arc::new(IndexSet::hyperbolic(n, k)?);
            let approx = interpolate(&PotentialSpec::new(cfg.potential, n, cfg.halfwidth)?, cfg.degree, 0.0)?;
            let v = make_decay_vector(&set, cfg.beta)?;
            let report = if reduction {
                reduction_error(&set, &Arc::new(IndexSet::full(n, k)?), &approx, &v)?
            } else {
                quadrature_error(&set, &approx, &v)?
            };
            finite(report.max_norm, "error norm")?;
            Ok((n, k, set.len(), report.max_norm))
        })
        .collect();
    for row in rows {
        let (n, k, size, e) = row?;
        table.row(vec![
            n.to_string(),
            k.to_string(),
            cfg.degree.to_string(),
            cfg.halfwidth.to_string(),
            cfg.beta.to_string(),
            cfg.potential.as_str().to_string(),
            cfg.seed.to_string(),
            size.to_string(),
            csv::real(e),
        ]);
    }
    Ok(Outcome { table, passed: true })
}

fn cmd_perturb(cfg: &Config) -> Result<Outcome> {
    let mut table = cfg.table(&["N", "K", "R", "L", "beta", "m", "h", "error", "bound"]);
    let points: Vec<(usize, usize, Fraction)> =
        cfg.grid().into_iter().flat_map(|(n, k)| cfg.h.iter().map(move |&h| (n, k, h))).collect();
    let rows: Vec<Result<_>> = points
        .into_par_iter()
        .map(|(n, k, h)| {
            let r = lanczos_perturbation_error(&cfg.problem(n, k), h.value(), cfg.lanczos)?;
            finite(r.error, "perturbation error")?;
            Ok((n, k, h, r))
        })
        .collect();
    for row in rows {
        let (n, k, h, r) = row?;
        table.row(vec![
            n.to_string(),
            k.to_string(),
            cfg.degree.to_string(),
            cfg.halfwidth.to_string(),
            cfg.beta.to_string(),
            cfg.lanczos.to_string(),
            h.to_string(),
            csv::real(r.error),
            csv::real(r.bound),
        ]);
    }
    Ok(Outcome { table, passed: true })
}

fn cmd_propagate(cfg: &Config) -> Result<Outcome> {
    let mut table =
        cfg.table(&["N", "K", "R", "L", "beta", "m", "scheme", "h", "scheme_error", "perturbation_error"]);
    let reference = ReferenceConfig { step: cfg.reference_h.value(), ..ReferenceConfig::default() };
    for (n, k) in cfg.grid() {
        let problem = cfg.problem(n, k);
        let solution = ReferenceSolution::compute(&problem, reference, 1.0)?;
        let rows: Vec<Result<_>> = cfg
            .h
            .par_iter()
            .map(|&h| {
                let e = propagate_and_compare(&problem, cfg.scheme, h.value(), cfg.lanczos, &solution)?;
                finite(e.scheme_error, "scheme error")?;
                Ok((h, e))
            })
            .collect();
        for row in rows {
            let (h, e) = row?;
            table.row(vec![
                n.to_string(),
                k.to_string(),
                cfg.degree.to_string(),
                cfg.halfwidth.to_string(),
                cfg.beta.to_string(),
                cfg.lanczos.to_string(),
                cfg.scheme.to_string(),
                h.to_string(),
                csv::real(e.scheme_error),
                csv::real(e.perturbation_error),
            ]);
        }
    }
    Ok(Outcome { table, passed: true })
}

/// One line of the `verify` report.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub dim: usize,
    pub bound: usize,
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.value <= self.tolerance
    }
}

/// Number of random vectors in the equivalence check.
const VERIFY_VECTORS: usize = 20;

/// Fast algorithm versus `W^GH` with a rule of order `M` on the full cube,
/// as `max ‖fast(v) − W v‖_∞ / ‖v‖_∞` over seeded random vectors.
pub fn equivalence_check(
    dim: usize,
    bound: usize,
    rule_order: usize,
    spec: &PotentialSpec,
    degree: usize,
    seed: u64,
) -> Result<Check> {
    let set = Arc::new(IndexSet::full(dim, bound)?);
    let approx = interpolate(spec, degree, 0.0)?;
    let rule = gauss_hermite_rule(rule_order)?;
    let dense = assemble_with_rule(&set, &approx, &rule, DenseTag::QuadGalerkin)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..VERIFY_VECTORS {
        let v = CoeffVector::random_real(Arc::clone(&set), &mut rng);
        let d = fast_algorithm(&set, &approx, &v)?.max_abs_diff(&dense.matvec(&v)?)?;
        worst = worst.max(d / v.norm_inf());
    }
    Ok(Check { name: "lemma1", dim, bound, value: finite(worst, "equivalence residual")?, tolerance: 1e-10 })
}

/// `max_{j,k <= K} |sum_m ω_m φ_j(ξ_m) φ_k(ξ_m) − δ_jk|` for a rule of order `M`.
pub fn orthonormality_check(bound: usize, rule_order: usize) -> Result<Check> {
    let rule = gauss_hermite_rule(rule_order)?;
    let n = rule.len();
    let phi = hermite_table(&rule.nodes, bound);
    let mut worst = 0.0f64;
    for j in 0..=bound {
        for k in 0..=j {
            let g: f64 = (0..n).map(|m| rule.modified_weights[m] * phi[j * n + m] * phi[k * n + m]).sum();
            let delta = if j == k { 1.0 } else { 0.0 };
            worst = worst.max((g - delta).abs());
        }
    }
    Ok(Check { name: "orthonormality", dim: 1, bound, value: finite(worst, "Gram residual")?, tolerance: 1e-11 })
}

/// Largest size for which `verify` runs the dense diagonalization check.
const DIAGONALIZATION_LIMIT: usize = 4096;

fn cmd_verify(cfg: &Config) -> Result<Outcome> {
    let mut table = cfg.table(&["check", "N", "K", "value", "tolerance", "status"]);
    let mut checks = Vec::new();
    for (n, k) in cfg.grid() {
        let m = cfg.rule_order.unwrap_or(k);
        let spec = PotentialSpec::new(cfg.potential, n, cfg.halfwidth)?;
        checks.push(equivalence_check(n, k, m, &spec, cfg.degree, cfg.seed)?);
        let mut ortho = orthonormality_check(k, m)?;
        ortho.dim = n;
        checks.push(ortho);
        if (k + 1).checked_pow(n as u32).is_some_and(|s| s <= DIAGONALIZATION_LIMIT) {
            let r = verify_diagonalization(k, n)?;
            checks.push(Check {
                name: "diagonalization",
                dim: n,
                bound: k,
                value: finite(r.max(), "diagonalization residual")?,
                tolerance: 1e-10,
            });
        }
    }
    let passed = checks.iter().all(Check::passed);
    for c in &checks {
        table.row(vec![
            c.name.to_string(),
            c.dim.to_string(),
            c.bound.to_string(),
            csv::real(c.value),
            csv::real(c.tolerance),
            if c.passed() { "pass" } else { "fail" }.to_string(),
        ]);
    }
    Ok(Outcome { table, passed })
}

fn finite(x: f64, what: &str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::NonFinite(what.into()))
    }
}

/// Exit status for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NonFinite(_) | Error::QuadratureNoConvergence { .. } | Error::EigenNoConvergence { .. } => {
            exit::NUMERICAL
        }
        _ => exit::USAGE,
    }
}

/// Parses `args`, runs the command and writes its CSV. Returns the exit
/// status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::USAGE } else { exit::SUCCESS };
        }
    };
    let cfg = match Config::resolve(cli.command, cli.flags) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return exit::USAGE;
        }
    };
    for w in cfg.support_warnings() {
        eprintln!("{w}");
    }
    let outcome = match execute(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let text = outcome.table.render();
    let written = match &cfg.out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return exit::USAGE;
    }
    if outcome.passed {
        exit::SUCCESS
    } else {
        exit::VERIFICATION
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Config {
        let cli = Cli::try_parse_from(std::iter::once("hprop").chain(args.iter().copied())).unwrap();
        Config::resolve(cli.command, cli.flags).unwrap()
    }

    #[test]
    fn defaults_follow_the_command() {
        let c = parse(&["propagate"]);
        assert_eq!(c.potential, PotentialKind::HenonHeilesPerturbed);
        assert_eq!((c.degree, c.lanczos, c.kmax.clone()), (3, 7, vec![40]));
        assert_eq!(c.h.len(), 5);
        let c = parse(&["quaderr"]);
        assert_eq!((c.beta, c.kmax.clone()), (5, vec![25, 50, 75]));
    }

    #[test]
    fn lists_and_fractions() {
        let c = parse(&["perturb", "--kmax", "40,10,40", "--h", "1/10,1/80,0.5", "--dims", "2,3"]);
        assert_eq!(c.kmax, vec![10, 40]);
        assert_eq!(c.dims, vec![2, 3]);
        assert_eq!(c.h[1], Fraction::new(1, 80).unwrap());
        assert_eq!(c.h[2].value(), 0.5);
        assert_eq!(c.grid(), vec![(2, 10), (2, 40), (3, 10), (3, 40)]);
    }

    #[test]
    fn flags_after_subcommand_or_before() {
        let a = Cli::try_parse_from(["hprop", "--beta", "4", "rederr"]).unwrap();
        let b = Cli::try_parse_from(["hprop", "rederr", "--beta", "4"]).unwrap();
        assert_eq!(a.flags.beta, b.flags.beta);
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run(["hprop", "nope"]), exit::USAGE);
        assert_eq!(run(["hprop", "verify", "--h", "1/0"]), exit::USAGE);
        assert_eq!(run(["hprop", "verify", "--dims", "0"]), exit::USAGE);
        assert_eq!(run(["hprop", "verify", "--scale", "2"]), exit::USAGE);
        assert_eq!(run(["hprop", "perturb", "--lanczos", "0"]), exit::USAGE);
    }

    #[test]
    fn support_warning_for_large_k() {
        let c = parse(&["rederr", "--kmax", "10,200"]);
        let w = c.support_warnings();
        assert_eq!(w.len(), 1);
        assert!(w[0].contains("K = 200"));
    }

    #[test]
    fn verify_passes_and_detects_wrong_rule() {
        let c = parse(&["verify", "--dims", "1,2", "--kmax", "0,6"]);
        let out = execute(&c).unwrap();
        assert!(out.passed, "{}", out.table.render());
        let c = parse(&["verify", "--dims", "2", "--kmax", "10", "--rule-order", "9"]);
        let out = execute(&c).unwrap();
        assert!(!out.passed);
        let text = out.table.render();
        assert!(text.contains("lemma1,2,10,") && text.contains(",fail"));
    }

    #[test]
    fn error_tables_are_deterministic() {
        let c = parse(&["rederr", "--kmax", "12,8", "--dims", "2,3", "--jobs", "3"]);
        let a = execute(&c).unwrap().table.render();
        let b = execute(&c).unwrap().table.render();
        assert_eq!(a, b);
        let rows: Vec<&str> = a.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows[0], "N,K,R,L,beta,potential,seed,size,max_error");
        assert!(rows[1].starts_with("2,8,") && rows[4].starts_with("3,12,"));
    }

    #[test]
    fn bench_point_times_both_paths() {
        let spec = PotentialSpec::new(PotentialKind::Torsional, 2, 16.0).unwrap();
        let row = bench_point(2, 10, &spec, 4, 1).unwrap();
        assert_eq!(row.size, 29);
        assert!(row.fast_seconds > 0.0 && row.dense_seconds.is_some());
    }

    #[test]
    fn non_finite_maps_to_numerical_exit() {
        assert_eq!(exit_code(&Error::NonFinite("x".into())), exit::NUMERICAL);
        assert_eq!(exit_code(&Error::InvalidArgument("x".into())), exit::USAGE);
    }
}
