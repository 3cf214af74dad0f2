//! Derivative-free maximization used by the sup-type norms: a deterministic
//! level/direction grid followed by multistart Nelder-Mead refinement.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BallPoint, SpherePoint};

/// Discretization of a supremum over the ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpec {
    /// Radial levels |a|, strictly increasing, inside [0, 1).
    pub levels: Vec<f64>,
    /// Directions per positive level.
    pub directions: usize,
    /// How many top grid candidates get local refinement.
    pub multistart: usize,
    /// Objective-evaluation budget per refinement start.
    pub refine_evals: usize,
    /// Relative simplex-spread stopping tolerance.
    pub refine_tol: f64,
}

impl SearchSpec {
    pub fn default_for_dim(dim: usize) -> Self {
        SearchSpec {
            levels: vec![0.0, 0.3, 0.6, 0.8, 0.9, 0.95, 0.98],
            directions: if dim == 1 { 8 } else { 16 },
            multistart: 3,
            refine_evals: 90,
            refine_tol: 1e-7,
        }
    }

    /// Denser radial ladder for pointwise-growth suprema, which peak well
    /// inside the ball.
    pub fn growth_default(dim: usize) -> Self {
        SearchSpec {
            levels: vec![
                0.0, 0.15, 0.3, 0.45, 0.6, 0.7, 0.8, 0.875, 0.925, 0.96, 0.985, 0.995,
            ],
            directions: if dim == 1 { 16 } else { 24 },
            multistart: 3,
            refine_evals: 120,
            refine_tol: 1e-9,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels.is_empty() {
            return Err(Error::invalid("levels", "at least one level required"));
        }
        for pair in self.levels.windows(2) {
            if pair[1] <= pair[0] {
                return Err(Error::invalid("levels", "levels must be strictly increasing"));
            }
        }
        if self.levels.iter().any(|&l| !(0.0..1.0).contains(&l)) {
            return Err(Error::invalid("levels", "levels must lie in [0, 1)"));
        }
        if self.directions == 0 {
            return Err(Error::invalid("directions", "need at least one direction"));
        }
        Ok(())
    }

    /// Hard radius cap for refinement excursions.
    pub fn radius_cap(&self) -> f64 {
        (self.levels.last().copied().unwrap_or(0.9) + 0.015).min(0.995)
    }
}

/// Deterministic direction set on the sphere of C^n.
pub fn direction_set(dim: usize, count: usize) -> Vec<SpherePoint> {
    let mut dirs = Vec::with_capacity(count);
    match dim {
        1 => {
            for k in 0..count {
                dirs.push(SpherePoint::from_angle(
                    2.0 * std::f64::consts::PI * k as f64 / count as f64,
                ));
            }
        }
        2 => {
            // Spread over Hopf coordinates with fixed low-discrepancy shifts.
            for k in 0..count {
                let t = ((k % 4) as f64 + 0.5) / 4.0;
                let theta1 = 2.0 * std::f64::consts::PI * ((k / 4) as f64 + 0.25)
                    / ((count as f64 / 4.0).ceil());
                let theta2 = 2.0 * std::f64::consts::PI * ((k * 5 % count) as f64) / count as f64;
                let z = vec![
                    Complex64::from_polar(t.sqrt(), theta1),
                    Complex64::from_polar((1.0 - t).sqrt(), theta2),
                ];
                dirs.push(SpherePoint::new(z).expect("unit Hopf coordinates"));
            }
        }
        _ => {
            // Deterministic pseudo-uniform directions from a fixed stream.
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5EED_D1F5);
            for _ in 0..count {
                let v: Vec<Complex64> = (0..dim)
                    .map(|_| {
                        use rand::Rng;
                        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
                    })
                    .collect();
                dirs.push(SpherePoint::direction(&v).expect("nonzero direction"));
            }
        }
    }
    dirs
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub best_point: BallPoint,
    pub best_value: f64,
    /// Every evaluated candidate with its objective value, in evaluation order.
    pub trace: Vec<(BallPoint, f64)>,
}

fn point_from_flat(dim: usize, x: &[f64]) -> Option<BallPoint> {
    let coords: Vec<Complex64> = (0..dim)
        .map(|j| Complex64::new(x[2 * j], x[2 * j + 1]))
        .collect();
    BallPoint::new(coords).ok()
}

fn flat_from_point(p: &BallPoint) -> Vec<f64> {
    p.coords().iter().flat_map(|c| [c.re, c.im]).collect()
}

/// Maximizes an objective over the ball: deterministic grid, then multistart
/// Nelder-Mead on the flattened real coordinates with a radius cap.
pub fn maximize_over_ball<F>(dim: usize, objective: F, search: &SearchSpec) -> Result<SearchOutcome>
where
    F: Fn(&BallPoint) -> Result<f64> + Sync,
{
    search.validate()?;
    let dirs = direction_set(dim, search.directions);
    let mut candidates: Vec<BallPoint> = vec![BallPoint::origin(dim)];
    for &level in &search.levels {
        if level == 0.0 {
            continue;
        }
        for d in &dirs {
            candidates.push(BallPoint::radial(level, d)?);
        }
    }

    // Parallel evaluation, deterministic merge order.
    let evals: Vec<Result<f64>> = candidates.par_iter().map(|a| objective(a)).collect();
    let mut trace = Vec::with_capacity(candidates.len());
    for (cand, val) in candidates.iter().zip(evals) {
        trace.push((cand.clone(), val?));
    }
    if trace.iter().all(|(_, v)| !v.is_finite()) {
        return Err(Error::SearchExhausted);
    }

    let mut order: Vec<usize> = (0..trace.len()).collect();
    order.sort_by(|&i, &j| trace[j].1.partial_cmp(&trace[i].1).unwrap_or(std::cmp::Ordering::Equal));

    let cap = search.radius_cap();
    let mut best_point = trace[order[0]].0.clone();
    let mut best_value = trace[order[0]].1;

    for &start_idx in order.iter().take(search.multistart.max(1)) {
        let start = &trace[start_idx].0;
        let x0 = flat_from_point(start);
        let step = 0.06 * (1.0 - start.norm()).max(0.05);
        let mut first_error: Option<Error> = None;
        let penalized = |x: &[f64]| -> f64 {
            let sq: f64 = x.iter().map(|v| v * v).sum();
            if sq.sqrt() > cap {
                return f64::NEG_INFINITY;
            }
            match point_from_flat(dim, x) {
                Some(p) => match objective(&p) {
                    Ok(v) => v,
                    Err(_) => f64::NEG_INFINITY,
                },
                None => f64::NEG_INFINITY,
            }
        };
        let (xb, vb) = nelder_mead_max(
            &penalized,
            &x0,
            step,
            search.refine_evals,
            search.refine_tol,
        );
        if let Some(e) = first_error.take() {
            return Err(e);
        }
        if vb > best_value {
            if let Some(p) = point_from_flat(dim, &xb) {
                best_value = vb;
                best_point = p.clone();
                trace.push((p, vb));
            }
        }
    }

    Ok(SearchOutcome {
        best_point,
        best_value,
        trace,
    })
}

/// Plain Nelder-Mead maximizer with standard coefficients. Deterministic for
/// a fixed starting point; the objective may return -inf as a barrier.
pub fn nelder_mead_max<F>(
    f: &F,
    x0: &[f64],
    step: f64,
    max_evals: usize,
    tol: f64,
) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        f(x)
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), v0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }

    while evals < max_evals {
        simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        if best.is_finite() && worst.is_finite() && (best - worst).abs() <= tol * (1.0 + best.abs())
        {
            break;
        }
        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; n];
        for vertex in simplex.iter().take(n) {
            for (c, x) in centroid.iter_mut().zip(&vertex.0) {
                *c += x / n as f64;
            }
        }
        let worst_x = simplex[n].0.clone();
        let reflect: Vec<f64> = centroid
            .iter()
            .zip(&worst_x)
            .map(|(c, w)| c + (c - w))
            .collect();
        let v_reflect = eval(&reflect, &mut evals);

        if v_reflect > simplex[0].1 {
            // Try expanding.
            let expand: Vec<f64> = centroid
                .iter()
                .zip(&worst_x)
                .map(|(c, w)| c + 2.0 * (c - w))
                .collect();
            let v_expand = eval(&expand, &mut evals);
            simplex[n] = if v_expand > v_reflect {
                (expand, v_expand)
            } else {
                (reflect, v_reflect)
            };
        } else if v_reflect > simplex[n - 1].1 {
            simplex[n] = (reflect, v_reflect);
        } else {
            let contract: Vec<f64> = centroid
                .iter()
                .zip(&worst_x)
                .map(|(c, w)| c + 0.5 * (w - c))
                .collect();
            let v_contract = eval(&contract, &mut evals);
            if v_contract > simplex[n].1 {
                simplex[n] = (contract, v_contract);
            } else {
                // Shrink toward the best vertex.
                let best_x = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let shrunk: Vec<f64> = best_x
                        .iter()
                        .zip(&vertex.0)
                        .map(|(b, x)| b + 0.5 * (x - b))
                        .collect();
                    let v = eval(&shrunk, &mut evals);
                    *vertex = (shrunk, v);
                }
            }
        }
    }
    simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
    simplex.swap_remove(0).into()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nelder_mead_finds_quadratic_peak() {
        let f = |x: &[f64]| -((x[0] - 0.3).powi(2) + (x[1] + 0.2).powi(2));
        let (x, v) = nelder_mead_max(&f, &[0.0, 0.0], 0.1, 200, 1e-12);
        assert!((x[0] - 0.3).abs() < 1e-4, "{x:?}");
        assert!((x[1] + 0.2).abs() < 1e-4, "{x:?}");
        assert!(v > -1e-8);
    }

    #[test]
    fn grid_search_honors_validation() {
        let bad = SearchSpec {
            levels: vec![0.5, 0.3],
            ..SearchSpec::default_for_dim(1)
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn maximize_recovers_interior_peak() {
        // Objective peaked at a = 0.55 on the real axis.
        let spec = SearchSpec::default_for_dim(1);
        let out = maximize_over_ball(
            1,
            |a| {
                let z = a.coords()[0];
                Ok(-(z.re - 0.55).powi(2) - z.im.powi(2))
            },
            &spec,
        )
        .unwrap();
        assert!(out.best_value > -1e-6, "{}", out.best_value);
        assert!((out.best_point.coords()[0].re - 0.55).abs() < 2e-3);
    }

    #[test]
    fn direction_sets_are_unit_length() {
        for dim in [1usize, 2, 3] {
            for d in direction_set(dim, 12) {
                let sq: f64 = d.coords().iter().map(|c| c.norm_sqr()).sum();
                assert!((sq - 1.0).abs() < 1e-12);
            }
        }
    }
}
