//! Integration over the ball and the sphere: polar-coordinate quadrature with
//! Beta-weighted radial rules, exact sphere moments for polynomials, kernel
//! series expansion, and the central integral I_f(a) behind every norm.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::funcspace::HoloFunction;
use crate::geometry::{rotation_to_first_axis, BallPoint};
use crate::numeric::{beta, gauss_jacobi_01, gauss_legendre_01, pairwise_sum};
use crate::poly::{sphere_monomial_weight, MultiPoly};

/// Which evaluation route a computation should take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Coefficient route: sphere orthogonality plus radial Beta weights.
    /// Requires coefficient access and dimension ≤ 2.
    Spectral,
    /// Polar-coordinate quadrature (radial Gauss rule × sphere rule).
    Quadrature,
    /// Seeded Monte Carlo over the ball.
    MonteCarlo,
}

/// Sphere integration rule. The trapezoid and Hopf rules integrate
/// trigonometric polynomials exactly up to their node counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SphereRule {
    /// n = 1: uniform nodes on the circle.
    CircleTrapezoid { nodes: usize },
    /// n = 2: torus angles × Gauss-Legendre in the |ζ₁|² variable. The first
    /// angle carries kernel oscillation after rotation, so it gets its own
    /// node count.
    HopfProduct {
        theta1_nodes: usize,
        theta2_nodes: usize,
        t_nodes: usize,
    },
    /// n ≥ 3: normalized Gaussian directions with a fixed seed.
    MonteCarlo { samples: usize, seed: u64 },
}

/// Integration configuration carried by every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadSpec {
    pub backend: Backend,
    pub radial_nodes: usize,
    pub sphere_rule: SphereRule,
    pub series_tol: f64,
    pub max_series_terms: usize,
}

impl QuadSpec {
    /// Quadrature defaults for dimension 1 or 2.
    pub fn auto(dim: usize) -> Self {
        match dim {
            1 => QuadSpec {
                backend: Backend::Quadrature,
                radial_nodes: 64,
                sphere_rule: SphereRule::CircleTrapezoid { nodes: 256 },
                series_tol: 1e-10,
                max_series_terms: 60_000,
            },
            _ => QuadSpec {
                backend: Backend::Quadrature,
                radial_nodes: 48,
                sphere_rule: SphereRule::HopfProduct {
                    theta1_nodes: 192,
                    theta2_nodes: 48,
                    t_nodes: 24,
                },
                series_tol: 1e-10,
                max_series_terms: 60_000,
            },
        }
    }

    /// Spectral defaults; the sphere rule is kept for fallbacks and reports.
    pub fn spectral(dim: usize) -> Self {
        QuadSpec {
            backend: Backend::Spectral,
            ..QuadSpec::auto(dim)
        }
    }

    /// Seeded Monte Carlo spec for any dimension.
    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        QuadSpec {
            backend: Backend::MonteCarlo,
            radial_nodes: 0,
            sphere_rule: SphereRule::MonteCarlo { samples, seed },
            series_tol: 1e-10,
            max_series_terms: 60_000,
        }
    }

    /// Spectral when the function carries coefficients in low dimension,
    /// quadrature otherwise.
    pub fn auto_for(f: &HoloFunction) -> Self {
        let dim = f.dim();
        if dim <= 2 && f.as_polynomial().is_some() {
            QuadSpec::spectral(dim)
        } else {
            QuadSpec::auto(dim)
        }
    }

    fn mc_params(&self) -> Result<(usize, u64)> {
        match self.sphere_rule {
            SphereRule::MonteCarlo { samples, seed } => Ok((samples, seed)),
            _ => Err(Error::invalid(
                "sphere_rule",
                "monte carlo backend needs a monte carlo sphere rule with an explicit seed",
            )),
        }
    }
}

/// Value plus a refinement-difference error proxy.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IntegralEstimate {
    pub value: f64,
    pub error_estimate: f64,
}

fn check_finite(v: f64, at: &[Complex64]) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteSample {
            point: at.iter().map(|c| (c.re, c.im)).collect(),
        })
    }
}

/// Mean of `g` over the unit sphere with the given rule; weights sum to 1.
fn sphere_mean<F>(dim: usize, rule: &SphereRule, mut g: F) -> Result<f64>
where
    F: FnMut(&[Complex64]) -> Result<f64>,
{
    match *rule {
        SphereRule::CircleTrapezoid { nodes } => {
            if dim != 1 {
                return Err(Error::invalid("sphere_rule", "circle rule needs n = 1"));
            }
            let mut vals = Vec::with_capacity(nodes);
            for k in 0..nodes {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / nodes as f64;
                let z = [Complex64::from_polar(1.0, theta)];
                vals.push(check_finite(g(&z)?, &z)?);
            }
            Ok(pairwise_sum(&vals) / nodes as f64)
        }
        SphereRule::HopfProduct {
            theta1_nodes,
            theta2_nodes,
            t_nodes,
        } => {
            if dim != 2 {
                return Err(Error::invalid("sphere_rule", "Hopf rule needs n = 2"));
            }
            let t_rule = gauss_legendre_01(t_nodes)?;
            let mut vals = Vec::with_capacity(theta1_nodes * theta2_nodes * t_nodes);
            for &(t, wt) in t_rule.iter() {
                let (c1, c2) = (t.sqrt(), (1.0 - t).sqrt());
                for j1 in 0..theta1_nodes {
                    let a1 = 2.0 * std::f64::consts::PI * j1 as f64 / theta1_nodes as f64;
                    let z1 = Complex64::from_polar(c1, a1);
                    for j2 in 0..theta2_nodes {
                        let a2 = 2.0 * std::f64::consts::PI * j2 as f64 / theta2_nodes as f64;
                        let z = [z1, Complex64::from_polar(c2, a2)];
                        vals.push(wt * check_finite(g(&z)?, &z)?);
                    }
                }
            }
            Ok(pairwise_sum(&vals) / (theta1_nodes * theta2_nodes) as f64)
        }
        SphereRule::MonteCarlo { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut vals = Vec::with_capacity(samples);
            for _ in 0..samples {
                let z = random_sphere_point(dim, &mut rng);
                vals.push(check_finite(g(&z)?, &z)?);
            }
            Ok(pairwise_sum(&vals) / samples as f64)
        }
    }
}

fn random_sphere_point(dim: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    loop {
        let mut v = Vec::with_capacity(dim);
        for _ in 0..dim {
            // Box-Muller pair per complex coordinate.
            let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            let u2: f64 = rng.gen();
            let r = (-2.0 * u1.ln()).sqrt();
            let phi = 2.0 * std::f64::consts::PI * u2;
            v.push(Complex64::new(r * phi.cos(), r * phi.sin()));
        }
        let norm: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.iter().map(|c| c / norm).collect();
        }
    }
}

/// ∫_B g dV over the ball with dV normalized to total mass 1, via
/// ∫_B g dV = n ∫_0^1 t^{n−1} (∫_S g(√t ζ) dσ(ζ)) dt.
///
/// The error estimate is the difference against a run with half the radial
/// nodes (Monte Carlo: difference of the two half-sample means).
pub fn ball_integral<F>(dim: usize, g: F, spec: &QuadSpec) -> Result<IntegralEstimate>
where
    F: Fn(&[Complex64]) -> Result<f64>,
{
    match spec.backend {
        Backend::MonteCarlo => {
            let (samples, seed) = spec.mc_params()?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut vals = Vec::with_capacity(samples);
            for _ in 0..samples {
                let dir = random_sphere_point(dim, &mut rng);
                let u: f64 = rng.gen_range(0.0f64..1.0);
                let radius = u.powf(1.0 / (2.0 * dim as f64));
                let z: Vec<Complex64> = dir.iter().map(|c| c * radius).collect();
                vals.push(check_finite(g(&z)?, &z)?);
            }
            let half = samples / 2;
            let value = pairwise_sum(&vals) / samples as f64;
            let first = pairwise_sum(&vals[..half]) / half.max(1) as f64;
            let second = pairwise_sum(&vals[half..]) / (samples - half).max(1) as f64;
            Ok(IntegralEstimate {
                value,
                error_estimate: (first - second).abs(),
            })
        }
        _ => {
            let coarse = ball_integral_radial(dim, &g, spec, spec.radial_nodes.max(2) / 2)?;
            let value = ball_integral_radial(dim, &g, spec, spec.radial_nodes.max(2))?;
            Ok(IntegralEstimate {
                value,
                error_estimate: (value - coarse).abs(),
            })
        }
    }
}

fn ball_integral_radial<F>(dim: usize, g: &F, spec: &QuadSpec, radial_nodes: usize) -> Result<f64>
where
    F: Fn(&[Complex64]) -> Result<f64>,
{
    let rule = gauss_legendre_01(radial_nodes)?;
    let mut slices = Vec::with_capacity(rule.len());
    let mut buf = vec![Complex64::new(0.0, 0.0); dim];
    for &(t, w) in rule.iter() {
        let radius = t.sqrt();
        let mean = sphere_mean(dim, &spec.sphere_rule, |zeta| {
            for (b, z) in buf.iter_mut().zip(zeta) {
                *b = z * radius;
            }
            g(&buf)
        })?;
        slices.push(w * t.powi(dim as i32 - 1) * mean);
    }
    Ok(dim as f64 * pairwise_sum(&slices))
}

/// Radial slice profile of |f|²: M_f(r) = ∫_S |f(rζ)|² dσ(ζ) = Σ_d s_d r^{2d}
/// with s_d = Σ_{|α|=d} |c_α|² w_α and w_α the sphere moment of ζ^α.
#[derive(Debug, Clone, Serialize)]
pub struct RadialProfile {
    coeffs: BTreeMap<u32, f64>,
}

impl RadialProfile {
    pub fn eval(&self, r: f64) -> f64 {
        let t = r * r;
        let vals: Vec<f64> = self
            .coeffs
            .iter()
            .map(|(&d, &s)| s * t.powi(d as i32))
            .collect();
        pairwise_sum(&vals)
    }

    pub fn coeffs(&self) -> &BTreeMap<u32, f64> {
        &self.coeffs
    }
}

/// Builds the radial profile from coefficients; exact for polynomials because
/// distinct monomials are orthogonal on the sphere.
pub fn radial_profile(f: &MultiPoly) -> RadialProfile {
    let dim = f.dim();
    let mut coeffs: BTreeMap<u32, f64> = BTreeMap::new();
    for (alpha, c) in f.terms() {
        let d: u32 = alpha.iter().sum();
        let w = sphere_monomial_weight(alpha, dim);
        *coeffs.entry(d).or_insert(0.0) += c.norm_sqr() * w;
    }
    RadialProfile { coeffs }
}

/// Binomial series coefficients of (1 − x)^{−p} guaranteed to cover the tail:
/// returns (c_0..c_K, tail_bound) with Σ_{k>K} c_k x^k ≤ tail_bound < tol.
pub(crate) fn kernel_series_coeffs(
    p: f64,
    x: f64,
    tol: f64,
    max_terms: usize,
) -> Result<(Vec<f64>, f64)> {
    debug_assert!((0.0..1.0).contains(&x));
    let mut coeffs = Vec::new();
    let mut c = 1.0f64;
    let mut term = 1.0f64;
    for k in 0..max_terms {
        coeffs.push(c);
        let kf = k as f64;
        let ratio = x * (p + kf) / (kf + 1.0);
        let next_term = term * ratio;
        // Ratios beyond k are bounded by max(ratio_k, x) in either monotone
        // regime of (p+k)/(k+1).
        let rho = ratio.max(x);
        if rho < 1.0 {
            let tail = next_term / (1.0 - rho);
            if tail < tol || next_term == 0.0 {
                return Ok((coeffs, tail));
            }
        }
        c *= (p + kf) / (kf + 1.0);
        term = next_term;
    }
    Err(Error::SeriesTruncation {
        needed: max_terms + 1,
        max: max_terms,
        modulus: x,
    })
}

/// Expansion coefficients of (1 − ⟨z, a⟩)^{−p}: c_k = Γ(p+k)/(Γ(p) k!), cut
/// where the tail at |a| drops below `tol`.
pub fn kernel_series(p: f64, a: &BallPoint, tol: f64, max_terms: usize) -> Result<Vec<f64>> {
    if p <= 0.0 {
        return Err(Error::invalid("p", format!("exponent {p} must be positive")));
    }
    Ok(kernel_series_coeffs(p, a.norm(), tol, max_terms)?.0)
}

/// I_f(a) = ∫_B |f(z)|² (1 − |Φ_a(z)|²)^p dV(z), the integral behind the
/// whole norm family. Backend dispatch per QuadSpec.
pub fn np_integral(f: &HoloFunction, a: &BallPoint, p: f64, spec: &QuadSpec) -> Result<f64> {
    let dim = f.dim();
    if a.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: a.dim(),
        });
    }
    if p < 0.0 {
        return Err(Error::invalid("p", format!("exponent {p} must be nonnegative")));
    }
    match spec.backend {
        Backend::Spectral => np_integral_spectral(f, a, p, spec),
        Backend::Quadrature => np_integral_quadrature(f, a, p, spec),
        Backend::MonteCarlo => {
            let a_coords = a.coords().to_vec();
            let est = ball_integral(
                dim,
                |z| {
                    let v = f.eval_raw(z)?;
                    Ok(v.norm_sqr() * crate::geometry::mobius_factor_raw(&a_coords, z, p))
                },
                spec,
            )?;
            Ok(est.value)
        }
    }
}

fn np_integral_spectral(f: &HoloFunction, a: &BallPoint, p: f64, spec: &QuadSpec) -> Result<f64> {
    let dim = f.dim();
    if dim > 2 {
        return Err(Error::BackendUnsupported {
            backend: "spectral",
            reason: format!("dimension {dim} exceeds 2"),
        });
    }
    let poly = f.as_polynomial().ok_or(Error::BackendUnsupported {
        backend: "spectral",
        reason: "function does not expose coefficients".into(),
    })?;
    if poly.is_zero() {
        return Ok(0.0);
    }
    let modulus = a.norm();
    // Rotate a onto the first axis so the kernel series is univariate in z₁.
    let g = if modulus < 1e-300 {
        poly
    } else {
        poly.compose_linear(&rotation_to_first_axis(a).adjoint())?
    };
    let (coeffs, _tail) = kernel_series_coeffs(p, modulus, spec.series_tol, spec.max_series_terms)?;

    let weighted = weighted_profile(&g, &coeffs, modulus, dim)?;
    // I = (1−|a|²)^p Σ_d s_d · n · B(n+d, p+1), with the Beta values walked
    // by their exact ratio and resynced periodically against log-Gamma.
    let n_f = dim as f64;
    let mut beta_val = beta(n_f, p + 1.0);
    let mut last_d = 0u32;
    let mut terms = Vec::with_capacity(weighted.len());
    for (d, s) in weighted {
        while last_d < d {
            let nd = n_f + last_d as f64;
            beta_val *= nd / (nd + p + 1.0);
            last_d += 1;
            if last_d % 4096 == 0 {
                beta_val = beta(n_f + last_d as f64, p + 1.0);
            }
        }
        terms.push(s * n_f * beta_val);
    }
    Ok(a.one_minus_sq().powf(p) * pairwise_sum(&terms))
}

/// Radial profile of h = g · Σ_k c_k |a|^k z₁^k as (degree, s_d) pairs in
/// increasing degree order.
fn weighted_profile(
    g: &MultiPoly,
    series: &[f64],
    modulus: f64,
    dim: usize,
) -> Result<Vec<(u32, f64)>> {
    // Series coefficient including the |a|^k factor.
    let mut scaled = Vec::with_capacity(series.len());
    let mut acc = 1.0f64;
    for &c in series {
        scaled.push(c * acc);
        acc *= modulus;
    }
    if dim == 1 {
        // Dense univariate convolution: g is sparse, the series is dense.
        let deg = g.degree() as usize;
        let mut h = vec![Complex64::new(0.0, 0.0); deg + scaled.len()];
        for (alpha, c) in g.terms() {
            let base = alpha[0] as usize;
            for (k, &s) in scaled.iter().enumerate() {
                h[base + k] += c * s;
            }
        }
        Ok(h
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm_sqr() > 0.0)
            .map(|(d, c)| (d as u32, c.norm_sqr()))
            .collect())
    } else {
        let mut series_poly = MultiPoly::zero(dim);
        for (k, &s) in scaled.iter().enumerate() {
            if s != 0.0 {
                let mut idx = vec![0u32; dim];
                idx[0] = k as u32;
                series_poly.add_term(idx, Complex64::new(s, 0.0));
            }
        }
        let h = g.mul(&series_poly)?;
        let profile = radial_profile(&h);
        Ok(profile.coeffs().iter().map(|(&d, &s)| (d, s)).collect())
    }
}

fn np_integral_quadrature(f: &HoloFunction, a: &BallPoint, p: f64, spec: &QuadSpec) -> Result<f64> {
    let dim = f.dim();
    let modulus = a.norm();
    // The kernel factor peaks sharply near the boundary; double the radial
    // resolution there.
    let radial_nodes = if modulus > 0.95 {
        2 * spec.radial_nodes
    } else {
        spec.radial_nodes
    };
    let rule = gauss_jacobi_01(p, dim as f64 - 1.0, radial_nodes.max(2))?;

    let rotation = rotation_to_first_axis(a).adjoint();
    let weight = a.one_minus_sq().powf(p);
    let mut slices = Vec::with_capacity(rule.len());
    let mut buf = vec![Complex64::new(0.0, 0.0); dim];
    for &(t, w) in rule.iter() {
        let radius = t.sqrt();
        let mean = sphere_mean(dim, &spec.sphere_rule, |zeta| {
            for (b, z) in buf.iter_mut().zip(zeta) {
                *b = z * radius;
            }
            let kernel = {
                let one_minus = Complex64::new(1.0, 0.0) - modulus * buf[0];
                one_minus.norm_sqr().powf(-p)
            };
            let rotated = rotation.mul_vec(&buf);
            let v = f.eval_raw(&rotated)?;
            Ok(v.norm_sqr() * kernel)
        })?;
        slices.push(w * mean);
    }
    Ok(weight * dim as f64 * pairwise_sum(&slices))
}

/// ∫_S (1 − |a|²)^p |1 − ⟨ζ, ra⟩|^{−2p} dσ(ζ): the sphere factor in the
/// polar-coordinate bound on I_f(a).
pub fn sphere_kernel_integral(a: &BallPoint, r: f64, p: f64, spec: &QuadSpec) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::invalid("r", format!("radius {r} outside (0, 1)")));
    }
    if p <= 0.0 {
        return Err(Error::invalid("p", format!("exponent {p} must be positive")));
    }
    let dim = a.dim();
    let x = r * a.norm();
    let weight = a.one_minus_sq().powf(p);
    match spec.backend {
        Backend::Spectral => {
            // |1−⟨ζ,ra⟩|^{−2p} = |Σ c_k x^k ζ₁^k|² after rotation; sphere
            // orthogonality leaves Σ c_k² x^{2k} w_k.
            let (coeffs, _) = kernel_series_coeffs(p, x, spec.series_tol, spec.max_series_terms)?;
            let mut idx = vec![0u32; dim];
            let terms: Vec<f64> = coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| {
                    idx[0] = k as u32;
                    c * c * x.powi(2 * k as i32) * sphere_monomial_weight(&idx, dim)
                })
                .collect();
            Ok(weight * pairwise_sum(&terms))
        }
        _ => {
            let mean = sphere_mean(dim, &spec.sphere_rule, |zeta| {
                let one_minus = Complex64::new(1.0, 0.0) - x * zeta[0];
                Ok(one_minus.norm_sqr().powf(-p))
            })?;
            Ok(weight * mean)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::HoloFunction;
    use crate::numeric::ln_gamma;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn poly1(coeffs: &[f64]) -> HoloFunction {
        HoloFunction::polynomial(MultiPoly::univariate(
            &coeffs.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>(),
        ))
    }

    /// Independent radial oracle: Simpson rule on ∫_0^1 2 r g(r) dr.
    fn simpson_radial(g: impl Fn(f64) -> f64) -> f64 {
        let n = 20_000;
        let h = 1.0 / n as f64;
        let f = |r: f64| 2.0 * r * g(r);
        let mut sum = f(0.0) + f(1.0);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * f(i as f64 * h);
        }
        sum * h / 3.0
    }

    #[test]
    fn ball_integral_of_one_is_one() {
        for dim in [1usize, 2] {
            let spec = QuadSpec::auto(dim);
            let est = ball_integral(dim, |_| Ok(1.0), &spec).unwrap();
            assert!((est.value - 1.0).abs() < 1e-12, "dim {dim}: {}", est.value);
        }
    }

    #[test]
    fn ball_integral_matches_radial_oracles() {
        let spec = QuadSpec::auto(1);
        // g = (1-|z|^2): oracle gives 1/2.
        let oracle = simpson_radial(|r| 1.0 - r * r);
        assert!((oracle - 0.5).abs() < 1e-10);
        let est = ball_integral(1, |z| Ok(1.0 - z[0].norm_sqr()), &spec).unwrap();
        assert!((est.value - oracle).abs() < 1e-10);

        // g = |z|^2: oracle gives 1/2 as well.
        let oracle2 = simpson_radial(|r| r * r);
        assert!((oracle2 - 0.5).abs() < 1e-10);
        let est2 = ball_integral(1, |z| Ok(z[0].norm_sqr()), &spec).unwrap();
        assert!((est2.value - oracle2).abs() < 1e-10);
    }

    #[test]
    fn ball_integral_reports_nonfinite_sample() {
        let spec = QuadSpec::auto(1);
        let res = ball_integral(1, |z| Ok(1.0 / (z[0].re - z[0].re)), &spec);
        assert!(matches!(res, Err(Error::NonFiniteSample { .. })));
    }

    #[test]
    fn monte_carlo_ball_volume() {
        let spec = QuadSpec::monte_carlo(40_000, 7);
        let est = ball_integral(3, |_| Ok(1.0), &spec).unwrap();
        assert!((est.value - 1.0).abs() < 1e-12);
        // A nonconstant check: E|z|² over the ball of C³ is n/(n+1) = 3/4.
        let est2 = ball_integral(
            3,
            |z| Ok(z.iter().map(|w| w.norm_sqr()).sum::<f64>()),
            &spec,
        )
        .unwrap();
        assert!((est2.value - 0.75).abs() < 0.01, "{}", est2.value);
    }

    #[test]
    fn radial_profile_examples() {
        // f ≡ 1 → M(r) = 1.
        let one = MultiPoly::constant(1, c(1.0, 0.0));
        let m = radial_profile(&one);
        assert!((m.eval(0.37) - 1.0).abs() < 1e-15);

        // f = z^3 → M(r) = r^6 on the circle.
        let cube = MultiPoly::univariate(&[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let m = radial_profile(&cube);
        assert!((m.eval(0.5) - 0.5f64.powi(6)).abs() < 1e-15);

        // n = 2, f = z1 → M(r) = r²/2.
        let z1 = MultiPoly::coordinate(2, 0).unwrap();
        let m = radial_profile(&z1);
        assert!((m.eval(0.6) - 0.18).abs() < 1e-15);
    }

    #[test]
    fn radial_profile_z1_matches_monte_carlo_sphere_oracle() {
        // Test-side MC oracle for ∫_S |ζ1|² dσ on the sphere of C².
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let samples = 200_000;
        let mut acc = 0.0;
        for _ in 0..samples {
            let z = random_sphere_point(2, &mut rng);
            acc += z[0].norm_sqr();
        }
        let oracle = acc / samples as f64;
        assert!((oracle - 0.5).abs() < 5e-3, "oracle {oracle}");
    }

    #[test]
    fn kernel_series_cases() {
        let a = BallPoint::one_d(c(0.5, 0.0)).unwrap();
        // c_0 = 1 always.
        let coeffs = kernel_series(2.3, &a, 1e-10, 10_000).unwrap();
        assert!((coeffs[0] - 1.0).abs() < 1e-15);
        // p = 1: geometric series.
        let coeffs = kernel_series(1.0, &a, 1e-12, 10_000).unwrap();
        for &c in coeffs.iter().take(8) {
            assert!((c - 1.0).abs() < 1e-14);
        }
        // p = 1/2, k = 2 → 3/8.
        let coeffs = kernel_series(0.5, &a, 1e-12, 10_000).unwrap();
        assert!((coeffs[2] - 0.375).abs() < 1e-14);
        // Cap produces a truncation error.
        let far = BallPoint::one_d(c(0.999, 0.0)).unwrap();
        assert!(matches!(
            kernel_series(1.0, &far, 1e-12, 50),
            Err(Error::SeriesTruncation { .. })
        ));
    }

    #[test]
    fn np_integral_beta_values_at_origin() {
        // f ≡ 1, a = 0, n = 1, p = 1 → 1/2 (both backends).
        let f = poly1(&[1.0]);
        let a = BallPoint::origin(1);
        for spec in [QuadSpec::auto(1), QuadSpec::spectral(1)] {
            let v = np_integral(&f, &a, 1.0, &spec).unwrap();
            assert!((v - 0.5).abs() < 1e-12, "{v}");
        }

        // General n, p: n Γ(n) Γ(p+1) / Γ(n+p+1), here n = 2, p = 0.7.
        let f2 = HoloFunction::constant(2, c(1.0, 0.0));
        let a2 = BallPoint::origin(2);
        let expected =
            (2.0f64.ln() + ln_gamma(2.0) + ln_gamma(1.7) - ln_gamma(3.7)).exp();
        for spec in [QuadSpec::auto(2), QuadSpec::spectral(2)] {
            let v = np_integral(&f2, &a2, 0.7, &spec).unwrap();
            assert!(
                (v - expected).abs() / expected < 1e-9,
                "{v} vs {expected}"
            );
        }

        // f = z, a = 0, p = 0 → 1/2.
        let fz = poly1(&[0.0, 1.0]);
        let v = np_integral(&fz, &a, 0.0, &QuadSpec::spectral(1)).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn backends_agree_for_moderate_base_points() {
        let f = poly1(&[1.0, 2.0, 0.0, 1.0]);
        let a = BallPoint::one_d(c(0.55, -0.35)).unwrap();
        for p in [0.5, 1.0, 1.5] {
            let spectral = np_integral(&f, &a, p, &QuadSpec::spectral(1)).unwrap();
            let quad = np_integral(&f, &a, p, &QuadSpec::auto(1)).unwrap();
            assert!(
                (spectral - quad).abs() / spectral < 1e-8,
                "p = {p}: {spectral} vs {quad}"
            );
        }
    }

    #[test]
    fn backends_agree_in_two_variables() {
        let mut p = MultiPoly::zero(2);
        p.add_term(vec![1, 0], c(1.0, 0.0));
        p.add_term(vec![1, 2], c(0.5, 0.5));
        p.add_term(vec![0, 0], c(-0.25, 0.0));
        let f = HoloFunction::polynomial(p);
        let a = BallPoint::new(vec![c(0.4, 0.2), c(-0.3, 0.35)]).unwrap();
        for pp in [0.5, 1.25] {
            let spectral = np_integral(&f, &a, pp, &QuadSpec::spectral(2)).unwrap();
            let quad = np_integral(&f, &a, pp, &QuadSpec::auto(2)).unwrap();
            assert!(
                (spectral - quad).abs() / spectral < 1e-7,
                "p = {pp}: {spectral} vs {quad}"
            );
        }
    }

    #[test]
    fn monte_carlo_backend_is_consistent() {
        let f = poly1(&[1.0, 1.0]);
        let a = BallPoint::one_d(c(0.4, 0.0)).unwrap();
        let exact = np_integral(&f, &a, 1.0, &QuadSpec::spectral(1)).unwrap();
        let mc = np_integral(&f, &a, 1.0, &QuadSpec::monte_carlo(300_000, 1234)).unwrap();
        assert!((mc - exact).abs() / exact < 0.02, "{mc} vs {exact}");
    }

    #[test]
    fn sphere_kernel_integral_regimes() {
        let spec = QuadSpec::auto(1);
        // a = 0 → exactly 1 for any r, p.
        let v = sphere_kernel_integral(&BallPoint::origin(1), 0.5, 0.75, &spec).unwrap();
        assert!((v - 1.0).abs() < 1e-12);

        // Spectral and quadrature routes agree.
        let a = BallPoint::one_d(c(0.9, 0.0)).unwrap();
        let q = sphere_kernel_integral(&a, 0.8, 0.25, &spec).unwrap();
        let s = sphere_kernel_integral(&a, 0.8, 0.25, &QuadSpec::spectral(1)).unwrap();
        assert!((q - s).abs() / s < 1e-9, "{q} vs {s}");

        // p < n/2: values stay bounded by a common constant as |a| → 1.
        let mut sweep = Vec::new();
        for am in [0.5, 0.9, 0.99] {
            let a = BallPoint::one_d(c(am, 0.0)).unwrap();
            for r in [0.3, 0.8, 0.97] {
                sweep.push(sphere_kernel_integral(&a, r, 0.25, &spec).unwrap());
            }
        }
        let max = sweep.iter().cloned().fold(0.0, f64::max);
        assert!(max <= 1.05, "regime-1 sweep exceeded bound: {max}");

        // p > n/2: the (1-|a|^2)^p prefactor absorbs the blowup.
        let mut sweep = Vec::new();
        for am in [0.5, 0.9, 0.99] {
            let a = BallPoint::one_d(c(am, 0.0)).unwrap();
            for r in [0.3, 0.8, 0.97] {
                sweep.push(sphere_kernel_integral(&a, r, 0.75, &spec).unwrap());
            }
        }
        let max = sweep.iter().cloned().fold(0.0, f64::max);
        assert!(max.is_finite() && max <= 2.0, "regime-3 sweep: {max}");
    }

    #[test]
    fn quadrature_monotone_in_p() {
        let f = poly1(&[0.5, 1.0, 0.25]);
        let a = BallPoint::one_d(c(0.6, 0.1)).unwrap();
        let spec = QuadSpec::spectral(1);
        let mut last = f64::INFINITY;
        for p in [0.25, 0.5, 1.0, 1.5, 2.0] {
            let v = np_integral(&f, &a, p, &spec).unwrap();
            assert!(v <= last * (1.0 + 1e-12), "p = {p}: {v} > {last}");
            last = v;
        }
    }
}
