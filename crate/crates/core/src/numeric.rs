//! Shared numeric machinery: deterministic summation, log-Gamma helpers and
//! Gauss quadrature rules on [0, 1] built with the Golub-Welsch algorithm.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

pub use statrs::function::gamma::ln_gamma;

/// Fixed-order pairwise summation. Deterministic for a fixed input order and
/// noticeably more accurate than a running sum on long vectors.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

/// ln B(a, b) = ln Γ(a) + ln Γ(b) − ln Γ(a+b).
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// B(a, b) through log-Gamma; safe for large arguments.
pub fn beta(a: f64, b: f64) -> f64 {
    ln_beta(a, b).exp()
}

/// Coefficients of the binomial series (1 − x)^{−p} = Σ_k c_k x^k,
/// c_k = Γ(p+k) / (Γ(p) k!), generated by the stable term recurrence.
pub struct BinomialSeries {
    p: f64,
    k: usize,
    coeff: f64,
}

impl BinomialSeries {
    pub fn new(p: f64) -> Self {
        BinomialSeries { p, k: 0, coeff: 1.0 }
    }
}

impl Iterator for BinomialSeries {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let out = self.coeff;
        self.coeff *= (self.p + self.k as f64) / (self.k as f64 + 1.0);
        self.k += 1;
        Some(out)
    }
}

/// A positive quadrature rule stored as (node, weight) pairs.
pub type Rule = Arc<Vec<(f64, f64)>>;

fn rule_cache() -> &'static Mutex<HashMap<(u64, u64, usize), Rule>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u64, usize), Rule>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Gauss-Jacobi rule on [0, 1] for the weight (1 − t)^alpha t^beta:
/// Σ w_i f(t_i) ≈ ∫_0^1 (1−t)^alpha t^beta f(t) dt, exact for polynomial f of
/// degree ≤ 2n − 1. Rules are cached per (alpha, beta, n).
pub fn gauss_jacobi_01(alpha: f64, beta_exp: f64, n: usize) -> Result<Rule> {
    if n == 0 {
        return Err(Error::invalid("nodes", "node count must be positive"));
    }
    if !(alpha > -1.0) || !(beta_exp > -1.0) {
        return Err(Error::invalid("jacobi", "exponents must exceed -1"));
    }
    let key = (alpha.to_bits(), beta_exp.to_bits(), n);
    if let Some(rule) = rule_cache().lock().unwrap().get(&key) {
        return Ok(rule.clone());
    }
    let rule = Arc::new(jacobi_nodes_01(alpha, beta_exp, n)?);
    rule_cache().lock().unwrap().insert(key, rule.clone());
    Ok(rule)
}

/// Gauss-Legendre rule on [0, 1] (unit weight).
pub fn gauss_legendre_01(n: usize) -> Result<Rule> {
    gauss_jacobi_01(0.0, 0.0, n)
}

fn jacobi_nodes_01(alpha: f64, beta_exp: f64, n: usize) -> Result<Vec<(f64, f64)>> {
    let ab = alpha + beta_exp;
    // Three-term recurrence of the Jacobi polynomials on [-1, 1].
    let mut diag = vec![0.0f64; n];
    let mut off = vec![0.0f64; n]; // off[i] couples i-1 and i; off[0] unused
    diag[0] = (beta_exp - alpha) / (ab + 2.0);
    for i in 1..n {
        let fi = i as f64;
        let denom = 2.0 * fi + ab;
        diag[i] = (beta_exp * beta_exp - alpha * alpha) / (denom * (denom + 2.0));
        off[i] = 2.0 / denom
            * (fi * (fi + alpha) * (fi + beta_exp) * (fi + ab)
                / ((denom + 1.0) * (denom - 1.0)))
                .sqrt();
    }
    // Zeroth moment of (1-x)^alpha (1+x)^beta over [-1, 1].
    let mu0 = (ab + 1.0) * 2.0f64.ln() + ln_beta(alpha + 1.0, beta_exp + 1.0);
    let mu0 = mu0.exp();

    let mut first_components = vec![0.0f64; n];
    first_components[0] = 1.0;
    tridiag_ql(&mut diag, &mut off, &mut first_components)?;

    // Nodes are eigenvalues on [-1, 1]; map to [0, 1] with t = (x+1)/2,
    // which divides the weight integral by 2^{alpha+beta+1}.
    let scale = mu0 * 0.5f64.powf(ab + 1.0);
    let mut pairs: Vec<(f64, f64)> = diag
        .iter()
        .zip(first_components.iter())
        .map(|(&x, &c)| ((x + 1.0) * 0.5, scale * c * c))
        .collect();
    pairs.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(pairs)
}

/// Implicit-shift QL iteration for a symmetric tridiagonal matrix, tracking a
/// single eigenvector row (enough to recover Gauss weights). Classic EISPACK
/// `imtql2` specialised to that single row.
fn tridiag_ql(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n == 1 {
        return Ok(());
    }
    // Shift the off-diagonal so e[i] couples i and i+1.
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Numeric(
                    "tridiagonal QL failed to converge".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                // Rotate the tracked eigenvector row.
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if r == 0.0 && m > l + 1 {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_small_input() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.5];
        assert_eq!(pairwise_sum(&xs), 15.5);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn binomial_series_geometric_case() {
        // p = 1 gives the geometric series: every coefficient is 1.
        let coeffs: Vec<f64> = BinomialSeries::new(1.0).take(6).collect();
        for c in coeffs {
            assert!((c - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn binomial_series_gamma_ratio() {
        // p = 1/2, k = 2: Γ(2.5)/(Γ(0.5)·2!) = (1.5·0.5·√π)/(√π·2) = 3/8.
        let c2 = BinomialSeries::new(0.5).nth(2).unwrap();
        assert!((c2 - 0.375).abs() < 1e-14, "c2 = {c2}");
    }

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let rule = gauss_legendre_01(8).unwrap();
        // ∫_0^1 t^5 dt = 1/6
        let v: f64 = rule.iter().map(|&(t, w)| w * t.powi(5)).sum();
        assert!((v - 1.0 / 6.0).abs() < 1e-14);
        // ∫_0^1 dt = 1
        let total: f64 = rule.iter().map(|&(_, w)| w).sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn jacobi_total_weight_is_beta_function() {
        // ∫_0^1 (1-t)^0.5 t^1 dt = B(2, 1.5) = Γ(2)Γ(1.5)/Γ(3.5)
        let rule = gauss_jacobi_01(0.5, 1.0, 24).unwrap();
        let total: f64 = rule.iter().map(|&(_, w)| w).sum();
        assert!((total - beta(2.0, 1.5)).abs() < 1e-14, "total = {total}");
    }

    #[test]
    fn jacobi_exact_for_polynomials_with_odd_node_count() {
        // Odd node counts with asymmetric weights exercise the full QL path.
        let rule = gauss_jacobi_01(0.75, 0.0, 9).unwrap();
        // ∫_0^1 (1-t)^0.75 t^3 dt = B(4, 1.75)
        let v: f64 = rule.iter().map(|&(t, w)| w * t.powi(3)).sum();
        assert!((v - beta(4.0, 1.75)).abs() < 1e-14, "v = {v}");
    }

    #[test]
    fn jacobi_rejects_bad_arguments() {
        assert!(gauss_jacobi_01(-1.5, 0.0, 4).is_err());
        assert!(gauss_jacobi_01(0.0, 0.0, 0).is_err());
    }

    #[test]
    fn nodes_lie_inside_open_interval() {
        let rule = gauss_jacobi_01(1.5, 1.0, 64).unwrap();
        for &(t, w) in rule.iter() {
            assert!(t > 0.0 && t < 1.0);
            assert!(w > 0.0);
        }
    }
}
