//! Polynomials in several complex variables with multi-index coefficient maps.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::CMatrix;
use crate::numeric::ln_gamma;

pub type MultiIndex = Vec<u32>;

/// A polynomial Σ_α c_α z^α on C^n. Coefficients are kept in a sorted map so
/// every iteration order (and therefore every floating-point reduction) is
/// deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoly {
    dim: usize,
    terms: BTreeMap<MultiIndex, Complex64>,
}

impl MultiPoly {
    pub fn zero(dim: usize) -> Self {
        MultiPoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        let mut p = MultiPoly::zero(dim);
        p.add_term(vec![0; dim], c);
        p
    }

    /// The coordinate monomial z_var.
    pub fn coordinate(dim: usize, var: usize) -> Result<Self> {
        if var >= dim {
            return Err(Error::invalid("var", "coordinate index out of range"));
        }
        let mut idx = vec![0u32; dim];
        idx[var] = 1;
        let mut p = MultiPoly::zero(dim);
        p.add_term(idx, Complex64::new(1.0, 0.0));
        Ok(p)
    }

    /// Univariate polynomial from dense coefficients c_0 + c_1 z + …
    pub fn univariate(coeffs: &[Complex64]) -> Self {
        let mut p = MultiPoly::zero(1);
        for (k, &c) in coeffs.iter().enumerate() {
            p.add_term(vec![k as u32], c);
        }
        p
    }

    /// The monomial c · z^alpha.
    pub fn monomial(dim: usize, alpha: MultiIndex, c: Complex64) -> Result<Self> {
        if alpha.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: alpha.len(),
            });
        }
        let mut p = MultiPoly::zero(dim);
        p.add_term(alpha, c);
        Ok(p)
    }

    pub fn add_term(&mut self, alpha: MultiIndex, c: Complex64) {
        debug_assert_eq!(alpha.len(), self.dim);
        if c.norm_sqr() == 0.0 {
            return;
        }
        let entry = self.terms.entry(alpha);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get_mut();
                *v += c;
                if v.norm_sqr() == 0.0 {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|alpha| alpha.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        debug_assert_eq!(z.len(), self.dim);
        // Precompute coordinate powers up to the per-variable max degree.
        let mut max_deg = vec![0u32; self.dim];
        for alpha in self.terms.keys() {
            for (m, &a) in max_deg.iter_mut().zip(alpha) {
                *m = (*m).max(a);
            }
        }
        let powers: Vec<Vec<Complex64>> = z
            .iter()
            .zip(&max_deg)
            .map(|(&zj, &m)| {
                let mut pw = Vec::with_capacity(m as usize + 1);
                let mut acc = Complex64::new(1.0, 0.0);
                pw.push(acc);
                for _ in 0..m {
                    acc *= zj;
                    pw.push(acc);
                }
                pw
            })
            .collect();
        let mut sum = Complex64::new(0.0, 0.0);
        for (alpha, c) in &self.terms {
            let mut mono = *c;
            for (j, &a) in alpha.iter().enumerate() {
                mono *= powers[j][a as usize];
            }
            sum += mono;
        }
        sum
    }

    pub fn add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (alpha, c) in &other.terms {
            out.add_term(alpha.clone(), *c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (alpha, c) in &other.terms {
            out.add_term(alpha.clone(), -*c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: Complex64) -> MultiPoly {
        if c.norm_sqr() == 0.0 {
            return MultiPoly::zero(self.dim);
        }
        MultiPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(a, v)| (a.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_dim(other)?;
        let mut out = MultiPoly::zero(self.dim);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let idx: MultiIndex = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(idx, ca * cb);
            }
        }
        Ok(out)
    }

    /// Coefficient-level dilation: z^α picks up the factor r^{|α|}.
    pub fn dilate(&self, r: f64) -> MultiPoly {
        MultiPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(a, v)| {
                    let total: u32 = a.iter().sum();
                    (a.clone(), v * r.powi(total as i32))
                })
                .collect(),
        }
    }

    /// Substitution z ↦ M z for a square matrix M; expands multinomially, so
    /// keep it to low-degree polynomials.
    pub fn compose_linear(&self, m: &CMatrix) -> Result<MultiPoly> {
        if m.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: m.dim(),
            });
        }
        let rows: Vec<MultiPoly> = (0..self.dim)
            .map(|i| {
                let mut row = MultiPoly::zero(self.dim);
                for j in 0..self.dim {
                    let mut idx = vec![0u32; self.dim];
                    idx[j] = 1;
                    row.add_term(idx, m.get(i, j));
                }
                row
            })
            .collect();
        let mut out = MultiPoly::zero(self.dim);
        for (alpha, c) in &self.terms {
            let mut mono = MultiPoly::constant(self.dim, *c);
            for (i, &a) in alpha.iter().enumerate() {
                for _ in 0..a {
                    mono = mono.mul(&rows[i])?;
                }
            }
            out = out.add(&mono)?;
        }
        Ok(out)
    }

    fn check_dim(&self, other: &MultiPoly) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }
}

/// Second moment of the monomial ζ^α over the unit sphere of C^n:
/// ∫_S |ζ^α|² dσ = (n−1)! α! / (n−1+|α|)!.
pub fn sphere_monomial_weight(alpha: &[u32], dim: usize) -> f64 {
    debug_assert_eq!(alpha.len(), dim);
    if dim == 1 {
        return 1.0;
    }
    let total: u32 = alpha.iter().sum();
    let mut log_w = ln_gamma(dim as f64) - ln_gamma((dim as u32 + total) as f64);
    for &a in alpha {
        log_w += ln_gamma(a as f64 + 1.0);
    }
    log_w.exp()
}
