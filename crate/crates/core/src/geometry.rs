//! Geometry of the open unit ball of C^n: points, involutive automorphisms,
//! the automorphism identity factor and normalized kernels.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Points closer to the boundary than this are rejected; every formula in the
/// library is singular at |z| = 1.
pub const BOUNDARY_TOL: f64 = 1e-14;
/// Tolerance for the unitarity check U U* = I.
pub const UNITARY_TOL: f64 = 1e-12;
/// Tolerance for the pointwise residual when recovering the unitary part of a
/// composed automorphism.
pub const COMPOSE_RESIDUAL_TOL: f64 = 1e-10;

/// Hermitian inner product ⟨z, w⟩ = Σ z_i conj(w_i).
pub fn inner(z: &[Complex64], w: &[Complex64]) -> Complex64 {
    z.iter().zip(w).map(|(a, b)| a * b.conj()).sum()
}

fn sq_norm_of(coords: &[Complex64]) -> f64 {
    coords.iter().map(|c| c.norm_sqr()).sum()
}

/// A point of the open unit ball in C^n.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallPoint {
    coords: Vec<Complex64>,
}

impl BallPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("coords", "dimension must be at least 1"));
        }
        let sq = sq_norm_of(&coords);
        if !(1.0 - sq >= BOUNDARY_TOL) {
            return Err(Error::OutsideBall { sq_norm: sq });
        }
        Ok(BallPoint { coords })
    }

    pub fn origin(dim: usize) -> Self {
        BallPoint {
            coords: vec![Complex64::new(0.0, 0.0); dim.max(1)],
        }
    }

    /// One-dimensional point from a complex number.
    pub fn one_d(z: Complex64) -> Result<Self> {
        BallPoint::new(vec![z])
    }

    /// Point r·ζ for a direction ζ on the sphere and 0 ≤ r < 1.
    pub fn radial(r: f64, dir: &SpherePoint) -> Result<Self> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::invalid("r", format!("radius {r} outside [0, 1)")));
        }
        BallPoint::new(dir.coords().iter().map(|c| c * r).collect())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn sq_norm(&self) -> f64 {
        sq_norm_of(&self.coords)
    }

    pub fn norm(&self) -> f64 {
        self.sq_norm().sqrt()
    }

    /// 1 − |z|², the weight every norm in the library is built from.
    pub fn one_minus_sq(&self) -> f64 {
        1.0 - self.sq_norm()
    }

    /// The dilated point r·z for r in (0, 1].
    pub fn scale(&self, r: f64) -> Result<Self> {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::invalid("r", format!("scale {r} outside (0, 1]")));
        }
        BallPoint::new(self.coords.iter().map(|c| c * r).collect())
    }
}

/// A point of the unit sphere, |ζ| = 1 to machine tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpherePoint {
    coords: Vec<Complex64>,
}

impl SpherePoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("coords", "dimension must be at least 1"));
        }
        let sq = sq_norm_of(&coords);
        if (sq - 1.0).abs() > 1e-12 {
            return Err(Error::NotOnSphere { sq_norm: sq });
        }
        Ok(SpherePoint { coords })
    }

    /// e^{iθ} on the unit circle (n = 1).
    pub fn from_angle(theta: f64) -> Self {
        SpherePoint {
            coords: vec![Complex64::from_polar(1.0, theta)],
        }
    }

    /// Normalizes an arbitrary nonzero vector onto the sphere.
    pub fn direction(v: &[Complex64]) -> Result<Self> {
        let norm = sq_norm_of(v).sqrt();
        if norm < 1e-14 {
            return Err(Error::invalid("direction", "zero vector"));
        }
        Ok(SpherePoint {
            coords: v.iter().map(|c| c / norm).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }
}

fn check_dims(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Raw Möbius map on coordinate slices. The caller guarantees both slices
/// describe interior points of matching dimension.
pub(crate) fn mobius_eval_raw(a: &[Complex64], z: &[Complex64]) -> Vec<Complex64> {
    let a_sq = sq_norm_of(a);
    if a_sq < 1e-300 {
        return z.iter().map(|c| -c).collect();
    }
    let s = (1.0 - a_sq).sqrt();
    let za = inner(z, a);
    let denom = Complex64::new(1.0, 0.0) - za;
    let proj_coeff = za / a_sq;
    a.iter()
        .zip(z)
        .map(|(ai, zi)| {
            let p = proj_coeff * ai; // P_a z component
            let q = zi - p; // Q_a z component
            (ai - p - s * q) / denom
        })
        .collect()
}

/// The involutive automorphism Φ_a evaluated at z. Swaps 0 and a.
pub fn mobius_eval(a: &BallPoint, z: &BallPoint) -> Result<BallPoint> {
    check_dims(a.dim(), z.dim())?;
    BallPoint::new(mobius_eval_raw(a.coords(), z.coords()))
}

pub(crate) fn mobius_factor_raw(a: &[Complex64], z: &[Complex64], p: f64) -> f64 {
    let num = (1.0 - sq_norm_of(a)) * (1.0 - sq_norm_of(z));
    let denom = (Complex64::new(1.0, 0.0) - inner(z, a)).norm_sqr();
    let base = num / denom;
    if p == 1.0 {
        base
    } else {
        base.powf(p)
    }
}

/// (1 − |Φ_a(z)|²)^p through the closed form
/// ((1 − |a|²)(1 − |z|²) / |1 − ⟨z, a⟩|²)^p.
pub fn mobius_factor(a: &BallPoint, z: &BallPoint, p: f64) -> Result<f64> {
    check_dims(a.dim(), z.dim())?;
    if p <= 0.0 {
        return Err(Error::invalid("p", format!("exponent {p} must be positive")));
    }
    Ok(mobius_factor_raw(a.coords(), z.coords(), p))
}

pub(crate) fn kernel_eval_raw(w: &[Complex64], z: &[Complex64]) -> Complex64 {
    let n = w.len();
    let one = Complex64::new(1.0, 0.0);
    let denom = one - inner(z, w);
    let base = Complex64::new(1.0 - sq_norm_of(w), 0.0) / (denom * denom);
    // Exponent (n+1)/2: integer for odd n, principal branch otherwise. The
    // base never crosses the negative real axis because Re(1 − ⟨z,w⟩) > 0.
    if (n + 1) % 2 == 0 {
        base.powu(((n + 1) / 2) as u32)
    } else {
        base.powf((n as f64 + 1.0) / 2.0)
    }
}

/// Normalized reproducing kernel k_w(z) = ((1−|w|²)/(1−⟨z,w⟩)²)^{(n+1)/2}.
pub fn kernel_eval(w: &BallPoint, z: &BallPoint) -> Result<Complex64> {
    check_dims(w.dim(), z.dim())?;
    Ok(kernel_eval_raw(w.coords(), z.coords()))
}

/// Small dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("matrix", "rows must form a square matrix"));
        }
        Ok(CMatrix {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        CMatrix { n, data }
    }

    pub fn neg_identity(n: usize) -> Self {
        let mut m = CMatrix::identity(n);
        for c in &mut m.data {
            *c = -*c;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn adjoint(&self) -> CMatrix {
        let mut data = vec![Complex64::new(0.0, 0.0); self.n * self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                data[j * self.n + i] = self.get(i, j).conj();
            }
        }
        CMatrix { n: self.n, data }
    }

    /// Max entry residual of U U* − I.
    pub fn unitary_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..self.n {
                    s += self.get(i, k) * self.get(j, k).conj();
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }

    /// Gram-Schmidt on the rows; fails if the rows are near-degenerate.
    pub fn orthonormalize_rows(&self) -> Result<CMatrix> {
        let n = self.n;
        let mut rows: Vec<Vec<Complex64>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut row: Vec<Complex64> = (0..n).map(|j| self.get(i, j)).collect();
            for prev in &rows {
                let overlap = inner(&row, prev);
                for (r, p) in row.iter_mut().zip(prev) {
                    *r -= overlap * p;
                }
            }
            let norm = sq_norm_of(&row).sqrt();
            if norm < 1e-8 {
                return Err(Error::Numeric(
                    "degenerate rows in unitary recovery".into(),
                ));
            }
            for r in &mut row {
                *r /= norm;
            }
            rows.push(row);
        }
        CMatrix::from_rows(rows)
    }
}

/// Unitary rotation V with V a = (|a|, 0, …, 0). Used to align a kernel
/// direction with the first coordinate axis.
pub fn rotation_to_first_axis(a: &BallPoint) -> CMatrix {
    let n = a.dim();
    let norm = a.norm();
    if norm < 1e-300 {
        return CMatrix::identity(n);
    }
    let first: Vec<Complex64> = a.coords().iter().map(|c| c.conj() / norm).collect();
    let mut rows = vec![first];
    // Extend with standard basis vectors, keeping the best-conditioned ones.
    for k in 0..n {
        if rows.len() == n {
            break;
        }
        let mut cand = vec![Complex64::new(0.0, 0.0); n];
        cand[k] = Complex64::new(1.0, 0.0);
        for prev in &rows {
            let overlap = inner(&cand, prev);
            for (c, p) in cand.iter_mut().zip(prev) {
                *c -= overlap * p;
            }
        }
        let nrm = sq_norm_of(&cand).sqrt();
        if nrm > 1e-6 {
            for c in &mut cand {
                *c /= nrm;
            }
            rows.push(cand);
        }
    }
    CMatrix::from_rows(rows).expect("rotation construction is full rank")
}

/// An automorphism of the ball in the normal form Φ = U ∘ Φ_a, where
/// a = Φ⁻¹(0) and U is unitary.
#[derive(Debug, Clone)]
pub struct Automorphism {
    base: BallPoint,
    unitary: CMatrix,
}

impl Automorphism {
    pub fn new(base: BallPoint, unitary: CMatrix) -> Result<Self> {
        if unitary.dim() != base.dim() {
            return Err(Error::DimensionMismatch {
                expected: base.dim(),
                got: unitary.dim(),
            });
        }
        let residual = unitary.unitary_residual();
        if residual > UNITARY_TOL {
            return Err(Error::NotUnitary { residual });
        }
        Ok(Automorphism { base, unitary })
    }

    /// The involution Φ_a itself (U = I).
    pub fn involution(a: BallPoint) -> Self {
        let n = a.dim();
        Automorphism {
            base: a,
            unitary: CMatrix::identity(n),
        }
    }

    /// The identity map, written as (−I) ∘ Φ_0.
    pub fn identity(dim: usize) -> Self {
        Automorphism {
            base: BallPoint::origin(dim),
            unitary: CMatrix::neg_identity(dim),
        }
    }

    /// The rotation z ↦ U z, written as (−U) ∘ Φ_0.
    pub fn rotation(u: CMatrix) -> Result<Self> {
        let dim = u.dim();
        let mut neg = u;
        for c in &mut neg.data {
            *c = -*c;
        }
        Automorphism::new(BallPoint::origin(dim), neg)
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// The point a = Φ⁻¹(0).
    pub fn base(&self) -> &BallPoint {
        &self.base
    }

    pub fn unitary(&self) -> &CMatrix {
        &self.unitary
    }

    pub(crate) fn eval_raw(&self, z: &[Complex64]) -> Vec<Complex64> {
        self.unitary.mul_vec(&mobius_eval_raw(self.base.coords(), z))
    }

    pub fn eval(&self, z: &BallPoint) -> Result<BallPoint> {
        check_dims(self.dim(), z.dim())?;
        BallPoint::new(self.eval_raw(z.coords()))
    }

    /// Closed-form inverse: (U ∘ Φ_a)⁻¹ = U* ∘ Φ_{U a}.
    pub fn inverse(&self) -> Self {
        let ua = self.unitary.mul_vec(self.base.coords());
        Automorphism {
            base: BallPoint::new(ua).expect("unitary image of an interior point"),
            unitary: self.unitary.adjoint(),
        }
    }

    /// Composition outer ∘ inner in normal form. The unitary part is
    /// recovered numerically from the action on a scaled basis and checked
    /// on a probe set.
    pub fn compose(outer: &Automorphism, inner: &Automorphism) -> Result<Automorphism> {
        let n = outer.dim();
        check_dims(n, inner.dim())?;
        // b = (outer ∘ inner)⁻¹(0) = inner⁻¹(outer⁻¹(0)), and Φ⁻¹(0) is the
        // stored base point.
        let b = inner.inverse().eval(outer.base())?;
        let phi_b = Automorphism::involution(b.clone());
        // T = (outer ∘ inner) ∘ Φ_b fixes the origin, hence acts linearly.
        let apply_t = |x: &[Complex64]| -> Vec<Complex64> {
            inner_then_outer(outer, inner, &mobius_eval_raw(b.coords(), x))
        };
        let mut rows = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for j in 0..n {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[j] = Complex64::new(0.5, 0.0);
            let image = apply_t(&e);
            for (i, v) in image.iter().enumerate() {
                rows[i][j] = v * 2.0;
            }
        }
        let unitary = CMatrix::from_rows(rows)?.orthonormalize_rows()?;
        let composed = Automorphism::new(b, unitary)?;

        // Probe residual: the recovered normal form must reproduce
        // outer ∘ inner pointwise.
        let mut worst = 0.0f64;
        for probe in probe_points(n) {
            let direct = inner_then_outer(outer, inner, &probe);
            let normal = composed.eval_raw(&probe);
            let err: f64 = direct
                .iter()
                .zip(&normal)
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>()
                .sqrt();
            worst = worst.max(err);
        }
        if worst > COMPOSE_RESIDUAL_TOL {
            return Err(Error::Numeric(format!(
                "unitary recovery residual {worst:.3e} exceeds {COMPOSE_RESIDUAL_TOL:.1e}"
            )));
        }
        Ok(composed)
    }
}

fn inner_then_outer(outer: &Automorphism, inner: &Automorphism, z: &[Complex64]) -> Vec<Complex64> {
    outer.eval_raw(&inner.eval_raw(z))
}

/// Deterministic probe set inside the ball, 20 points per dimension pattern.
fn probe_points(n: usize) -> Vec<Vec<Complex64>> {
    let mut points = Vec::new();
    for k in 0..20usize {
        let radius = 0.15 + 0.03 * (k as f64);
        let mut p = vec![Complex64::new(0.0, 0.0); n];
        for (j, c) in p.iter_mut().enumerate() {
            let angle = 2.0 * std::f64::consts::PI * ((k * (j + 3) + 7 * j + k * k) % 17) as f64
                / 17.0;
            *c = Complex64::from_polar(radius / (n as f64).sqrt(), angle);
        }
        points.push(p);
    }
    points
}
