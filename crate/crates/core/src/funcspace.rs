//! Holomorphic functions on the ball: polynomials, gap series, black boxes
//! and the transform wrappers (dilation, products, weighted composition).

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{kernel_eval_raw, Automorphism, BallPoint};
use crate::poly::MultiPoly;

/// Produces the homogeneous building blocks P_k used by gap series. The
/// required normalization is sup_{|ζ|=1} |P_k(ζ)| = 1.
pub trait HomogeneousGenerator: Send + Sync {
    fn dim(&self) -> usize;
    fn homogeneous(&self, degree: u64) -> MultiPoly;
    fn name(&self) -> &'static str;
}

/// n = 1 generator: P_k(z) = z^k. Sup norm on the circle is 1 and the circle
/// L² norm is exactly 1.
pub struct MonomialGenerator;

impl HomogeneousGenerator for MonomialGenerator {
    fn dim(&self) -> usize {
        1
    }

    fn homogeneous(&self, degree: u64) -> MultiPoly {
        MultiPoly::monomial(1, vec![degree as u32], Complex64::new(1.0, 0.0))
            .expect("univariate monomial")
    }

    fn name(&self) -> &'static str {
        "monomial"
    }
}

/// n = 2 generator: the monomial z1^⌈k/2⌉ z2^⌊k/2⌋ divided by its sup norm on
/// the sphere. The sup norm of z^α over |z| = 1 is √(α^α β^β / k^k), so the
/// normalized sup is exactly 1; the sphere L² constant is degree-dependent and
/// reported rather than assumed.
pub struct BalancedMonomialGenerator2;

impl BalancedMonomialGenerator2 {
    /// Sup of |z1^a z2^b| over the unit sphere of C².
    pub fn monomial_sup(a: u64, b: u64) -> f64 {
        let k = a + b;
        if k == 0 {
            return 1.0;
        }
        let term = |x: u64| {
            if x == 0 {
                0.0
            } else {
                x as f64 * (x as f64).ln()
            }
        };
        (0.5 * (term(a) + term(b) - term(k))).exp()
    }
}

impl HomogeneousGenerator for BalancedMonomialGenerator2 {
    fn dim(&self) -> usize {
        2
    }

    fn homogeneous(&self, degree: u64) -> MultiPoly {
        let a = degree.div_ceil(2);
        let b = degree / 2;
        let sup = Self::monomial_sup(a, b);
        MultiPoly::monomial(
            2,
            vec![a as u32, b as u32],
            Complex64::new(1.0 / sup, 0.0),
        )
        .expect("bivariate monomial")
    }

    fn name(&self) -> &'static str {
        "balanced-monomial"
    }
}

/// Picks the generator for a dimension, when one is available.
pub fn generator_for_dim(dim: usize) -> Result<Arc<dyn HomogeneousGenerator>> {
    match dim {
        1 => Ok(Arc::new(MonomialGenerator)),
        2 => Ok(Arc::new(BalancedMonomialGenerator2)),
        _ => Err(Error::invalid(
            "dim",
            format!("no homogeneous generator for dimension {dim}"),
        )),
    }
}

/// A lacunary series Σ_k b_k P_{m_k} with declared gap ratio c > 1, stored at
/// desk scale as finite coefficient data plus a truncation index.
#[derive(Clone)]
pub struct GapSeries {
    coeffs: Vec<Complex64>,
    degrees: Vec<u64>,
    gap_ratio: f64,
    generator: Arc<dyn HomogeneousGenerator>,
    truncation: usize,
}

impl GapSeries {
    pub fn new(
        coeffs: Vec<Complex64>,
        degrees: Vec<u64>,
        gap_ratio: f64,
        generator: Arc<dyn HomogeneousGenerator>,
        truncation: usize,
    ) -> Result<Self> {
        if coeffs.len() != degrees.len() {
            return Err(Error::invalid(
                "gap series",
                "coefficient and degree sequences differ in length",
            ));
        }
        if gap_ratio <= 1.0 {
            return Err(Error::invalid("c", "gap ratio must exceed 1"));
        }
        if degrees.iter().any(|&m| m == 0) {
            return Err(Error::invalid("m", "degrees must be positive"));
        }
        for pair in degrees.windows(2) {
            if (pair[1] as f64) < gap_ratio * pair[0] as f64 {
                return Err(Error::invalid(
                    "m",
                    format!(
                        "gap condition violated: {}/{} < {gap_ratio}",
                        pair[1], pair[0]
                    ),
                ));
            }
        }
        if truncation == 0 || truncation > coeffs.len() {
            return Err(Error::invalid(
                "K",
                format!("truncation {truncation} outside 1..={}", coeffs.len()),
            ));
        }
        Ok(GapSeries {
            coeffs,
            degrees,
            gap_ratio,
            generator,
            truncation,
        })
    }

    pub fn dim(&self) -> usize {
        self.generator.dim()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    pub fn gap_ratio(&self) -> f64 {
        self.gap_ratio
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn generator(&self) -> &Arc<dyn HomogeneousGenerator> {
        &self.generator
    }

    /// Partial sum Σ_{k<K} b_k P_{m_k} as a concrete polynomial.
    pub fn truncate(&self, k: usize) -> Result<MultiPoly> {
        if k == 0 {
            return Err(Error::invalid("K", "truncation must be positive"));
        }
        if k > self.coeffs.len() {
            return Err(Error::invalid(
                "K",
                format!("truncation {k} exceeds stored length {}", self.coeffs.len()),
            ));
        }
        let mut out = MultiPoly::zero(self.dim());
        for i in 0..k {
            let block = self.generator.homogeneous(self.degrees[i]);
            out = out.add(&block.scale(self.coeffs[i]))?;
        }
        Ok(out)
    }

    /// Bound on the dropped tail over |z| ≤ r: Σ_{k≥K} |b_k| r^{m_k}, using
    /// |P_m(z)| ≤ |z|^m for sup-normalized homogeneous blocks.
    pub fn tail_bound(&self, r: f64) -> f64 {
        self.coeffs
            .iter()
            .zip(&self.degrees)
            .skip(self.truncation)
            .map(|(b, &m)| b.norm() * r.powi(m.min(1 << 30) as i32))
            .sum()
    }
}

impl fmt::Debug for GapSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GapSeries")
            .field("coeffs", &self.coeffs)
            .field("degrees", &self.degrees)
            .field("gap_ratio", &self.gap_ratio)
            .field("generator", &self.generator.name())
            .field("truncation", &self.truncation)
            .finish()
    }
}

type Evaluator = Arc<dyn Fn(&[Complex64]) -> Result<Complex64> + Send + Sync>;

/// An opaque evaluable function; holomorphy is asserted by the caller.
#[derive(Clone)]
pub struct BlackBoxFn {
    dim: usize,
    eval: Evaluator,
}

impl BlackBoxFn {
    pub fn new(
        dim: usize,
        eval: impl Fn(&[Complex64]) -> Result<Complex64> + Send + Sync + 'static,
    ) -> Self {
        BlackBoxFn {
            dim,
            eval: Arc::new(eval),
        }
    }
}

impl fmt::Debug for BlackBoxFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BlackBoxFn(dim = {})", self.dim)
    }
}

/// A holomorphic function on the ball in one of the library's forms.
#[derive(Debug, Clone)]
pub enum HoloFunction {
    Polynomial(MultiPoly),
    GapSeries(GapSeries),
    BlackBox(BlackBoxFn),
    /// f(r z) with the inner function untouched.
    Dilated { inner: Box<HoloFunction>, r: f64 },
    /// Pointwise product u(z) f(z).
    Product {
        left: Box<HoloFunction>,
        right: Box<HoloFunction>,
    },
    /// Plain composition f ∘ Φ.
    Composed {
        map: Automorphism,
        inner: Box<HoloFunction>,
    },
    /// Weighted composition W_Φ f = k_a · (f ∘ Φ) with a = Φ⁻¹(0).
    WeightedComposed {
        map: Automorphism,
        inner: Box<HoloFunction>,
    },
}

impl HoloFunction {
    pub fn polynomial(p: MultiPoly) -> Self {
        HoloFunction::Polynomial(p)
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        HoloFunction::Polynomial(MultiPoly::constant(dim, c))
    }

    pub fn dim(&self) -> usize {
        match self {
            HoloFunction::Polynomial(p) => p.dim(),
            HoloFunction::GapSeries(g) => g.dim(),
            HoloFunction::BlackBox(b) => b.dim,
            HoloFunction::Dilated { inner, .. } => inner.dim(),
            HoloFunction::Product { left, .. } => left.dim(),
            HoloFunction::Composed { inner, .. } => inner.dim(),
            HoloFunction::WeightedComposed { inner, .. } => inner.dim(),
        }
    }

    pub(crate) fn eval_raw(&self, z: &[Complex64]) -> Result<Complex64> {
        match self {
            HoloFunction::Polynomial(p) => Ok(p.eval(z)),
            HoloFunction::GapSeries(g) => {
                let mut sum = Complex64::new(0.0, 0.0);
                for i in 0..g.truncation {
                    let block = g.generator.homogeneous(g.degrees[i]);
                    sum += g.coeffs[i] * block.eval(z);
                }
                Ok(sum)
            }
            HoloFunction::BlackBox(b) => (b.eval)(z),
            HoloFunction::Dilated { inner, r } => {
                let scaled: Vec<Complex64> = z.iter().map(|c| c * *r).collect();
                inner.eval_raw(&scaled)
            }
            HoloFunction::Product { left, right } => {
                Ok(left.eval_raw(z)? * right.eval_raw(z)?)
            }
            HoloFunction::Composed { map, inner } => inner.eval_raw(&map.eval_raw(z)),
            HoloFunction::WeightedComposed { map, inner } => {
                let k = kernel_eval_raw(map.base().coords(), z);
                Ok(k * inner.eval_raw(&map.eval_raw(z))?)
            }
        }
    }

    /// Pointwise evaluation at an interior point.
    pub fn eval(&self, z: &BallPoint) -> Result<Complex64> {
        if z.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: z.dim(),
            });
        }
        self.eval_raw(z.coords())
    }

    /// f_r(z) = f(r z) for r in (0, 1]. Polynomials are materialized with
    /// coefficients scaled by r^{|α|}; other forms are wrapped.
    pub fn dilate(&self, r: f64) -> Result<HoloFunction> {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::invalid("r", format!("dilation {r} outside (0, 1]")));
        }
        if r == 1.0 {
            return Ok(self.clone());
        }
        Ok(match self {
            HoloFunction::Polynomial(p) => HoloFunction::Polynomial(p.dilate(r)),
            HoloFunction::Dilated { inner, r: r0 } => HoloFunction::Dilated {
                inner: inner.clone(),
                r: r0 * r,
            },
            other => HoloFunction::Dilated {
                inner: Box::new(other.clone()),
                r,
            },
        })
    }

    /// W_Φ f = k_a · (f ∘ Φ) with a = Φ⁻¹(0).
    pub fn weighted_compose(&self, phi: &Automorphism) -> Result<HoloFunction> {
        if phi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: phi.dim(),
            });
        }
        Ok(HoloFunction::WeightedComposed {
            map: phi.clone(),
            inner: Box::new(self.clone()),
        })
    }

    /// Plain composition f ∘ Φ.
    pub fn compose_with(&self, phi: &Automorphism) -> Result<HoloFunction> {
        if phi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: phi.dim(),
            });
        }
        Ok(HoloFunction::Composed {
            map: phi.clone(),
            inner: Box::new(self.clone()),
        })
    }

    /// Pointwise product with another function.
    pub fn product(&self, other: &HoloFunction) -> Result<HoloFunction> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        // Keep coefficient access when both factors have it.
        if let (Some(a), Some(b)) = (self.as_polynomial(), other.as_polynomial()) {
            return Ok(HoloFunction::Polynomial(a.mul(&b)?));
        }
        Ok(HoloFunction::Product {
            left: Box::new(self.clone()),
            right: Box::new(other.clone()),
        })
    }

    /// Concrete coefficients when the representation admits them: direct
    /// polynomials, truncated gap series, and dilations/products thereof.
    pub fn as_polynomial(&self) -> Option<MultiPoly> {
        match self {
            HoloFunction::Polynomial(p) => Some(p.clone()),
            HoloFunction::GapSeries(g) => g.truncate(g.truncation).ok(),
            HoloFunction::Dilated { inner, r } => inner.as_polynomial().map(|p| p.dilate(*r)),
            HoloFunction::Product { left, right } => {
                match (left.as_polynomial(), right.as_polynomial()) {
                    (Some(a), Some(b)) => a.mul(&b).ok(),
                    _ => None,
                }
            }
            _ => None,
        }
    }

    /// Dropped-tail bound for truncated gap series, 0 for exact forms.
    pub fn tail_bound(&self, r: f64) -> f64 {
        match self {
            HoloFunction::GapSeries(g) => g.tail_bound(r),
            HoloFunction::Dilated { inner, r: r0 } => inner.tail_bound(r * r0),
            HoloFunction::Product { left, right } => {
                // Crude: tail of one factor times a sup bound is not available
                // in general; report the max of the factor tails.
                left.tail_bound(r).max(right.tail_bound(r))
            }
            _ => 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self.as_polynomial() {
            Some(p) => p.is_zero(),
            None => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{mobius_eval, CMatrix};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pt1(re: f64, im: f64) -> BallPoint {
        BallPoint::one_d(c(re, im)).unwrap()
    }

    fn gap_111() -> GapSeries {
        GapSeries::new(
            vec![c(1.0, 0.0); 3],
            vec![1, 2, 4],
            2.0,
            Arc::new(MonomialGenerator),
            3,
        )
        .unwrap()
    }

    #[test]
    fn constant_evaluates_to_itself() {
        let f = HoloFunction::constant(1, c(1.0, 0.0));
        assert!((f.eval(&pt1(0.77, -0.12)).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn cube_at_half() {
        let f = HoloFunction::polynomial(MultiPoly::univariate(&[
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(1.0, 0.0),
        ]));
        assert!((f.eval(&pt1(0.5, 0.0)).unwrap() - c(0.125, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn gap_series_partial_sum_by_hand() {
        // b = (1,1,1), m = (1,2,4) at z = 0.5: 0.5 + 0.25 + 0.0625 = 0.8125
        let f = HoloFunction::GapSeries(gap_111());
        let v = f.eval(&pt1(0.5, 0.0)).unwrap();
        assert!((v - c(0.8125, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn gap_condition_validated() {
        let bad = GapSeries::new(
            vec![c(1.0, 0.0); 3],
            vec![2, 3, 4],
            2.0,
            Arc::new(MonomialGenerator),
            3,
        );
        assert!(bad.is_err());
    }

    #[test]
    fn truncate_matches_materialized_polynomial() {
        let g = gap_111();
        let full = g.truncate(3).unwrap();
        let f = HoloFunction::GapSeries(g.clone());
        let z = pt1(0.31, 0.2);
        assert!((full.eval(z.coords()) - f.eval(&z).unwrap()).norm() < 1e-15);

        let first = g.truncate(1).unwrap();
        assert_eq!(first.num_terms(), 1);
        assert!((first.eval(&[c(0.5, 0.0)]) - c(0.5, 0.0)).norm() < 1e-15);

        assert!(g.truncate(0).is_err());
        assert!(g.truncate(4).is_err());
    }

    #[test]
    fn witness_partial_sum_frozen_form() {
        // b_k = 2^k, m_k = 2^k, K = 3: z + 2 z^2 + 4 z^4.
        let g = GapSeries::new(
            vec![c(1.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)],
            vec![1, 2, 4],
            2.0,
            Arc::new(MonomialGenerator),
            3,
        )
        .unwrap();
        let p = g.truncate(3).unwrap();
        let z = c(0.3, 0.0);
        let expected = z + 2.0 * z * z + 4.0 * z.powu(4);
        assert!((p.eval(&[z]) - expected).norm() < 1e-14);
    }

    #[test]
    fn dilate_basics() {
        let f = HoloFunction::polynomial(MultiPoly::univariate(&[c(0.0, 0.0), c(1.0, 0.0)]));
        let fr = f.dilate(0.5).unwrap();
        assert!((fr.eval(&pt1(0.6, 0.0)).unwrap() - c(0.3, 0.0)).norm() < 1e-15);

        // r = 1 is the identity.
        let f1 = f.dilate(1.0).unwrap();
        assert!((f1.eval(&pt1(0.6, 0.0)).unwrap() - c(0.6, 0.0)).norm() < 1e-15);

        // Coefficient scaling r^{|α|} on z².
        let sq = HoloFunction::polynomial(MultiPoly::univariate(&[
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(1.0, 0.0),
        ]));
        if let HoloFunction::Polynomial(p) = sq.dilate(0.5).unwrap() {
            let (_, coeff) = p.terms().next().unwrap();
            assert!((coeff - c(0.25, 0.0)).norm() < 1e-15);
        } else {
            panic!("polynomial dilation must materialize");
        }

        assert!(f.dilate(0.0).is_err());
        assert!(f.dilate(1.5).is_err());
    }

    #[test]
    fn dilation_composes_multiplicatively() {
        let f = HoloFunction::polynomial(MultiPoly::univariate(&[
            c(1.0, 0.0),
            c(-2.0, 0.5),
            c(0.0, 0.0),
            c(1.5, 0.0),
        ]));
        let lhs = f.dilate(0.8).unwrap().dilate(0.5).unwrap();
        let rhs = f.dilate(0.4).unwrap();
        let z = pt1(0.9, 0.1);
        assert!((lhs.eval(&z).unwrap() - rhs.eval(&z).unwrap()).norm() < 1e-14);
    }

    #[test]
    fn weighted_composition_with_origin_base_flips_sign() {
        // Φ with a = 0 and U = I is z ↦ -z and k_0 ≡ 1.
        let f = HoloFunction::polynomial(MultiPoly::univariate(&[c(0.0, 0.0), c(1.0, 0.0)]));
        let phi = Automorphism::involution(BallPoint::origin(1));
        let wf = f.weighted_compose(&phi).unwrap();
        let z = pt1(0.4, 0.1);
        assert!((wf.eval(&z).unwrap() + z.coords()[0]).norm() < 1e-15);
    }

    #[test]
    fn weighted_composition_of_constant_is_kernel() {
        let a = pt1(0.5, 0.0);
        let phi = Automorphism::involution(a.clone());
        let one = HoloFunction::constant(1, c(1.0, 0.0));
        let w = one.weighted_compose(&phi).unwrap();
        let z = pt1(0.27, -0.34);
        let expected = crate::geometry::kernel_eval(&a, &z).unwrap();
        assert!((w.eval(&z).unwrap() - expected).norm() < 1e-15);
    }

    #[test]
    fn weighted_composition_componentwise_value() {
        // f = z, a = 0.5, z = 0: k_a(0)·Φ_a(0) = 0.75 · 0.5 = 0.375.
        let a = pt1(0.5, 0.0);
        let phi = Automorphism::involution(a.clone());
        let f = HoloFunction::polynomial(MultiPoly::univariate(&[c(0.0, 0.0), c(1.0, 0.0)]));
        let wf = f.weighted_compose(&phi).unwrap();
        let v = wf.eval(&BallPoint::origin(1)).unwrap();
        // Componentwise oracle.
        let k = crate::geometry::kernel_eval(&a, &BallPoint::origin(1)).unwrap();
        let moved = mobius_eval(&a, &BallPoint::origin(1)).unwrap();
        assert!((v - k * moved.coords()[0]).norm() < 1e-15);
        assert!((v - c(0.375, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn balanced_monomial_generator_sup_is_one() {
        let gen = BalancedMonomialGenerator2;
        for k in [1u64, 2, 3, 5, 8] {
            let p = gen.homogeneous(k);
            // Sample the sphere on a Hopf grid; sup must not exceed 1 and
            // must reach 1 somewhere (up to sampling resolution).
            let mut best = 0.0f64;
            for i in 0..40 {
                let t = (i as f64 + 0.5) / 40.0;
                let z = [
                    c(t.sqrt(), 0.0),
                    c((1.0 - t).sqrt(), 0.0),
                ];
                best = best.max(p.eval(&z).norm());
            }
            assert!(best <= 1.0 + 1e-12, "degree {k}: sup sample {best} > 1");
            assert!(best > 0.95, "degree {k}: sup sample {best} far from 1");
        }
    }

    #[test]
    fn product_materializes_for_polynomials() {
        let u = HoloFunction::polynomial(MultiPoly::univariate(&[c(0.5, 0.0), c(0.5, 0.0)]));
        let f = HoloFunction::polynomial(MultiPoly::univariate(&[c(0.0, 0.0), c(1.0, 0.0)]));
        let uf = u.product(&f).unwrap();
        assert!(matches!(uf, HoloFunction::Polynomial(_)));
        let z = pt1(0.3, 0.3);
        let expected = (c(0.5, 0.0) + c(0.5, 0.0) * z.coords()[0]) * z.coords()[0];
        assert!((uf.eval(&z).unwrap() - expected).norm() < 1e-15);
    }

    #[test]
    fn rotation_wrapper_evaluates_composition() {
        let u = CMatrix::identity(1);
        let rot = Automorphism::rotation(u).unwrap();
        let f = HoloFunction::polynomial(MultiPoly::univariate(&[c(0.0, 0.0), c(1.0, 0.0)]));
        let g = f.compose_with(&rot).unwrap();
        let z = pt1(0.25, 0.1);
        assert!((g.eval(&z).unwrap() - z.coords()[0]).norm() < 1e-14);
    }

    #[test]
    fn blackbox_error_propagates() {
        let f = HoloFunction::BlackBox(BlackBoxFn::new(1, |_z| {
            Err(Error::Evaluation("synthetic failure".into()))
        }));
        assert!(f.eval(&pt1(0.1, 0.0)).is_err());
    }
}
