//! Univariate Hermite functions and Gauss–Hermite quadrature.
//!
//! All evaluation runs the three-term recurrence on the *functions*
//! `φ_k(x) = π^{-1/4} (2^k k!)^{-1/2} H_k(x) e^{-x²/2}`, never on bare
//! Hermite polynomials, so nothing overflows for orders in the hundreds.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// `π^{-1/4}`
pub const PI_POW_MINUS_QUARTER: f64 = 0.751_125_544_464_942_5;

const NEWTON_TOL: f64 = 1e-14;
const NEWTON_MAX_ITER: usize = 50;

/// Writes `φ_0(x), ..., φ_K(x)` into `out` (`out.len() = K + 1`).
pub fn hermite_functions_into(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = PI_POW_MINUS_QUARTER * (-0.5 * x * x).exp();
    if out.len() == 1 {
        return;
    }
    out[1] = std::f64::consts::SQRT_2 * x * out[0];
    for k in 1..out.len() - 1 {
        let kf = k as f64;
        out[k + 1] = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
    }
}

/// `φ_0(Sx), ..., φ_K(Sx)` at a single point.
#[derive(Clone, Debug, PartialEq)]
pub struct HermiteEvalTable {
    pub x: f64,
    pub scale: f64,
    pub values: Vec<f64>,
}

impl HermiteEvalTable {
    pub fn max_order(&self) -> usize {
        self.values.len() - 1
    }
}

pub fn eval_hermite_functions(x: f64, max_order: usize, scale: f64) -> Result<HermiteEvalTable> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::InvalidArgument(format!("scaling must be positive, got {scale}")));
    }
    let mut values = vec![0.0; max_order + 1];
    hermite_functions_into(scale * x, &mut values);
    Ok(HermiteEvalTable { x, scale, values })
}

/// Values `φ_k(x_m)` laid out row-major as `table[k * points.len() + m]`.
pub fn hermite_table(points: &[f64], max_order: usize) -> Vec<f64> {
    let n = points.len();
    let mut table = vec![0.0; (max_order + 1) * n];
    let mut col = vec![0.0; max_order + 1];
    for (m, &x) in points.iter().enumerate() {
        hermite_functions_into(x, &mut col);
        for (k, &v) in col.iter().enumerate() {
            table[k * n + m] = v;
        }
    }
    table
}

/// Gauss–Hermite rule with `M + 1` nodes for the weight `e^{-x²}`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    order: usize,
    /// Zeros of `H_{M+1}`, strictly increasing.
    pub nodes: Vec<f64>,
    /// Gauss weights `w_m`.
    pub weights: Vec<f64>,
    /// `ω_m = w_m e^{ξ_m²}`, the weights against the Hermite functions.
    pub modified_weights: Vec<f64>,
}

impl QuadratureRule {
    /// The order `M` (one less than the number of nodes).
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `sum_m w_m f(ξ_m)`, approximating `∫ f(x) e^{-x²} dx`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// CSV with columns `m,xi,w,omega`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,xi,w,omega\n");
        for m in 0..self.len() {
            let _ = writeln!(
                out,
                "{m},{:.17e},{:.17e},{:.17e}",
                self.nodes[m], self.weights[m], self.modified_weights[m]
            );
        }
        out
    }
}

/// Computes the `(M + 1)`-point Gauss–Hermite rule by Newton iteration on the
/// Hermite function `φ_{M+1}`.
///
/// Initial guesses are the classical asymptotic ones, refined node by node
/// from the largest downward; the negative half follows by symmetry.
/// Weights come from the same recurrence: at a zero of `φ_n`,
/// `ω = 1 / (n φ_{n-1}(ξ)²)` and `w = ω e^{-ξ²}` (evaluated in log space).
pub fn gauss_hermite_rule(order: usize) -> Result<QuadratureRule> {
    let n = order + 1;
    let nf = n as f64;
    let half = n.div_ceil(2);
    let mut desc = vec![0.0f64; half];
    let mut phis = vec![0.0; n + 1];

    let mut z = 0.0;
    for i in 0..half {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-0.166_67),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * desc[0],
            3 => 1.91 * z - 0.91 * desc[1],
            _ => 2.0 * z - desc[i - 2],
        };
        if n % 2 == 1 && i == half - 1 {
            // odd n: the middle zero is exactly 0
            desc[i] = 0.0;
            z = 0.0;
            continue;
        }
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITER {
            hermite_functions_into(z, &mut phis);
            let f = phis[n];
            let df = (2.0 * nf).sqrt() * phis[n - 1] - z * f;
            let dz = f / df;
            z -= dz;
            if f.abs() <= NEWTON_TOL || dz.abs() <= 4.0 * f64::EPSILON * z.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged || !z.is_finite() {
            return Err(Error::QuadratureNoConvergence { order, node: i });
        }
        desc[i] = z;
    }

    let mut nodes = vec![0.0; n];
    for (i, &x) in desc.iter().enumerate() {
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
    }
    if nodes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::QuadratureNoConvergence { order, node: 0 });
    }

    let mut modified_weights = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let mut col = vec![0.0; n];
    for i in 0..half {
        let x = nodes[n - 1 - i];
        hermite_functions_into(x, &mut col);
        let log_omega = -(nf.ln() + 2.0 * col[n - 1].abs().ln());
        let omega = log_omega.exp();
        let w = (log_omega - x * x).exp();
        for j in [i, n - 1 - i] {
            modified_weights[j] = omega;
            weights[j] = w;
        }
    }
    Ok(QuadratureRule { order, nodes, weights, modified_weights })
}

/// Outcome of checking `S L >= sqrt(2(K+1)) + 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SupportCheck {
    /// Condition holds; `margin = S L - (sqrt(2(K+1)) + 1) >= 0`.
    Ok { margin: f64 },
    /// Condition violated; `deficit = sqrt(2(K+1)) + 1 - S L > 0`.
    Warning { deficit: f64 },
}

impl SupportCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, SupportCheck::Ok { .. })
    }

    /// Human-readable message for a violated condition.
    pub fn warning_message(&self, scale: f64, halfwidth: f64, bound: usize) -> Option<String> {
        match *self {
            SupportCheck::Ok { .. } => None,
            SupportCheck::Warning { deficit } => Some(format!(
                "warning: support condition violated: S*L = {} < sqrt(2(K+1))+1 = {} for K = {bound} (deficit {deficit:.6})",
                scale * halfwidth,
                scale * halfwidth + deficit
            )),
        }
    }
}

/// The basis functions up to order `K` are negligible outside `[-L, L]`
/// only if `S L >= sqrt(2(K+1)) + 1`.
pub fn check_support_condition(scale: f64, halfwidth: f64, bound: usize) -> SupportCheck {
    let required = (2.0 * (bound as f64 + 1.0)).sqrt() + 1.0;
    let have = scale * halfwidth;
    if have >= required {
        SupportCheck::Ok { margin: have - required }
    } else {
        SupportCheck::Warning { deficit: required - have }
    }
}

/// `∫ x^p e^{-x²} dx`: `Γ((p+1)/2)` for even `p`, zero for odd `p`.
pub fn gaussian_moment(p: u32) -> f64 {
    if p % 2 == 1 {
        return 0.0;
    }
    // Γ(1/2) = √π, Γ(s+1) = s Γ(s)
    let mut g = PI.sqrt();
    let mut s = 0.5;
    for _ in 0..p / 2 {
        g *= s;
        s += 1.0;
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `π^{-1/4} (2^k k!)^{-1/2} H_k(x) e^{-x²/2}` through the physicists'
    /// polynomial recurrence, valid for small `k`.
    fn hermite_function_via_polynomial(k: usize, x: f64) -> f64 {
        let (mut h0, mut h1) = (1.0f64, 2.0 * x);
        let hk = match k {
            0 => h0,
            _ => {
                for j in 1..k {
                    let h2 = 2.0 * x * h1 - 2.0 * j as f64 * h0;
                    h0 = h1;
                    h1 = h2;
                }
                h1
            }
        };
        let fact: f64 = (1..=k).map(|j| j as f64).product();
        PI_POW_MINUS_QUARTER * hk * (-x * x / 2.0).exp() / (2f64.powi(k as i32) * fact).sqrt()
    }

    #[test]
    fn values_at_zero() {
        let t = eval_hermite_functions(0.0, 1, 1.0).unwrap();
        assert!((t.values[0] - 0.751_125_544_5).abs() < 1e-10);
        assert_eq!(t.values[1], 0.0);
        let t = eval_hermite_functions(0.0, 4, 1.0).unwrap();
        assert_eq!(t.values[3], 0.0);
        assert!(eval_hermite_functions(0.0, 4, 0.0).is_err());
    }

    #[test]
    fn matches_polynomial_oracle() {
        let t = eval_hermite_functions(2.0, 10, 1.0).unwrap();
        for k in 0..=10 {
            let want = hermite_function_via_polynomial(k, 2.0);
            assert!((t.values[k] - want).abs() <= 1e-12 * want.abs(), "k={k}");
        }
        // scaling evaluates at S x
        let s = eval_hermite_functions(1.0, 10, 2.0).unwrap();
        assert_eq!(s.values, t.values);
    }

    #[test]
    fn recurrence_residual_and_bound() {
        for &x in &[-7.3, -1.1, 0.4, 3.3, 9.9] {
            let t = eval_hermite_functions(x, 80, 1.0).unwrap();
            for k in 1..80 {
                let kf = k as f64;
                let lhs = x * t.values[k];
                let rhs = ((kf + 1.0) / 2.0).sqrt() * t.values[k + 1] + (kf / 2.0).sqrt() * t.values[k - 1];
                let scale = lhs.abs().max(rhs.abs()).max(1e-300);
                assert!((lhs - rhs).abs() <= 1e-12 * scale.max(1e-3), "x={x} k={k}");
            }
            assert!(t.values.iter().all(|v| v.abs() <= 0.8));
        }
    }

    #[test]
    fn decays_past_the_support_bound() {
        for k in [5usize, 20, 60, 100] {
            let edge = (2.0 * (k as f64 + 1.0)).sqrt() + 1.0;
            let mut prev = f64::INFINITY;
            for i in 0..40 {
                let x = edge + 0.25 * i as f64;
                let v = eval_hermite_functions(x, k, 1.0).unwrap().values[k].abs();
                assert!(v < prev && v < 5e-2, "k={k} x={x} v={v}");
                prev = v;
            }
            assert!(prev < 1e-8);
        }
    }

    #[test]
    fn low_order_rules() {
        let r = gauss_hermite_rule(0).unwrap();
        assert_eq!(r.nodes, vec![0.0]);
        assert!((r.weights[0] - 1.772_453_850_9).abs() < 1e-10);

        let r = gauss_hermite_rule(1).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((r.nodes[0] + s).abs() < 1e-15 && (r.nodes[1] - s).abs() < 1e-15);
        let half = PI.sqrt() / 2.0;
        assert!((r.weights[0] - half).abs() < 1e-14 && (r.weights[1] - half).abs() < 1e-14);
    }

    #[test]
    fn rule_invariants() {
        for m in [2usize, 5, 17, 40, 64, 100, 150, 200] {
            let r = gauss_hermite_rule(m).unwrap();
            assert_eq!(r.len(), m + 1);
            let total: f64 = r.weights.iter().sum();
            assert!((total - PI.sqrt()).abs() <= 1e-12 * PI.sqrt(), "M={m}");
            for i in 0..=m {
                assert_eq!(r.nodes[i], -r.nodes[m - i]);
                assert!(r.weights[i] > 0.0 && r.modified_weights[i] > 0.0);
            }
        }
    }

    #[test]
    fn nodes_interlace() {
        let mut prev = gauss_hermite_rule(0).unwrap();
        for m in 1..60 {
            let r = gauss_hermite_rule(m).unwrap();
            for i in 0..prev.len() {
                assert!(r.nodes[i] < prev.nodes[i] && prev.nodes[i] < r.nodes[i + 1]);
            }
            prev = r;
        }
    }

    #[test]
    fn discrete_orthonormality() {
        for k in [0usize, 1, 7, 30, 100] {
            let r = gauss_hermite_rule(k).unwrap();
            let tab = hermite_table(&r.nodes, k);
            let n = r.len();
            for i in 0..=k {
                for j in 0..=k {
                    let s: f64 = (0..n)
                        .map(|m| r.modified_weights[m] * tab[i * n + m] * tab[j * n + m])
                        .sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((s - want).abs() <= 1e-11, "K={k} ({i},{j}) {s}");
                }
            }
        }
    }

    #[test]
    fn support_condition() {
        assert!(check_support_condition(1.0, 16.0, 100).is_ok());
        match check_support_condition(1.0, 16.0, 127) {
            SupportCheck::Warning { deficit } => assert!((deficit - 1.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        assert!(check_support_condition(2.0, 8.0, 100).is_ok());
        assert!(check_support_condition(1.0, 16.0, 127).warning_message(1.0, 16.0, 127).is_some());
    }

    #[test]
    fn csv_dump() {
        let csv = gauss_hermite_rule(3).unwrap().to_csv();
        assert!(csv.starts_with("m,xi,w,omega\n"));
        assert_eq!(csv.lines().count(), 5);
    }
}
