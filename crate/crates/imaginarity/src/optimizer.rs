//! Derivative-free maximization of scalar objectives over real states.
//!
//! The feasible set is parametrized without constraints: a full real state is
//! realized as `L L^T / tr(L L^T)` from a lower-triangular `L`, a pure real
//! state as `v v^T` from a normalized vector. A multi-start Nelder-Mead
//! simplex searches the coordinates; for qubits an exhaustive grid scan over
//! rotation angle and spectrum serves as an independent ground truth.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::states::DensityMatrix;
use crate::tolerances::{DEGENERATE_NORM_TOL, RESTART_TIE_TOL};

/// Multi-start search configuration.
#[derive(Debug, Clone)]
pub struct OptConfig {
    /// Independent simplex starts; the first uses the identity-scaled
    /// parametrization, the rest add seeded Gaussian perturbations.
    pub restarts: usize,
    /// Objective evaluation budget per start.
    pub max_evals: usize,
    /// Simplex convergence tolerance on the value spread.
    pub tol: f64,
    pub seed: u64,
}

impl Default for OptConfig {
    fn default() -> Self {
        Self {
            restarts: 16,
            max_evals: 20_000,
            tol: 1e-11,
            seed: 0,
        }
    }
}

impl OptConfig {
    pub fn seeded(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}

/// Maximizes `objective` over all real density matrices of dimension `dim`.
///
/// Returns the best state found and its objective value; deterministic given
/// `cfg.seed`. A non-finite objective value is a hard error carrying the
/// offending state.
pub fn maximize_over_real_states<F>(
    objective: F,
    dim: usize,
    cfg: &OptConfig,
) -> Result<(DensityMatrix, f64)>
where
    F: Fn(&DensityMatrix) -> f64,
{
    let n = dim * (dim + 1) / 2;
    let identity_params = {
        let mut p = vec![0.0; n];
        for i in 0..dim {
            p[tri_index(i, i)] = 1.0;
        }
        p
    };
    multi_start(
        objective,
        realize_full_state,
        dim,
        identity_params,
        cfg,
    )
}

/// Maximizes `objective` over pure real states `v v^T` of dimension `dim`.
pub fn maximize_over_pure_real_states<F>(
    objective: F,
    dim: usize,
    cfg: &OptConfig,
) -> Result<(DensityMatrix, f64)>
where
    F: Fn(&DensityMatrix) -> f64,
{
    let uniform = vec![1.0 / (dim as f64).sqrt(); dim];
    multi_start(objective, realize_pure_state, dim, uniform, cfg)
}

#[inline]
fn tri_index(i: usize, j: usize) -> usize {
    debug_assert!(j <= i);
    i * (i + 1) / 2 + j
}

/// `L L^T / tr(L L^T)` from packed lower-triangular coordinates; `None` when
/// the parametrization is degenerate.
fn realize_full_state(params: &[f64], dim: usize) -> Option<ComplexMatrix> {
    let norm_sq: f64 = params.iter().map(|x| x * x).sum();
    if norm_sq <= DEGENERATE_NORM_TOL {
        return None;
    }
    let mut mat = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..=i {
            let mut acc = 0.0;
            for k in 0..=j.min(i) {
                acc += params[tri_index(i, k)] * params[tri_index(j, k)];
            }
            acc /= norm_sq;
            mat.set(i, j, num_complex::Complex64::new(acc, 0.0));
            mat.set(j, i, num_complex::Complex64::new(acc, 0.0));
        }
    }
    Some(mat)
}

/// `v v^T` from unnormalized coordinates; `None` when degenerate.
fn realize_pure_state(params: &[f64], dim: usize) -> Option<ComplexMatrix> {
    let norm_sq: f64 = params.iter().map(|x| x * x).sum();
    if norm_sq <= DEGENERATE_NORM_TOL {
        return None;
    }
    let mut mat = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            mat.set(
                i,
                j,
                num_complex::Complex64::new(params[i] * params[j] / norm_sq, 0.0),
            );
        }
    }
    Some(mat)
}

fn multi_start<F>(
    objective: F,
    realize: fn(&[f64], usize) -> Option<ComplexMatrix>,
    dim: usize,
    base_params: Vec<f64>,
    cfg: &OptConfig,
) -> Result<(DensityMatrix, f64)>
where
    F: Fn(&DensityMatrix) -> f64,
{
    if cfg.restarts < 1 {
        return Err(Error::Validation("restarts must be >= 1".into()));
    }
    let failure: std::cell::RefCell<Option<Error>> = std::cell::RefCell::new(None);
    // Minimize the negated objective; degenerate parametrizations are
    // rejected with +inf without touching the caller's objective.
    let mut eval = |params: &[f64]| -> f64 {
        match realize(params, dim) {
            None => f64::INFINITY,
            Some(mat) => {
                let state = DensityMatrix::from_matrix_unchecked(mat);
                let value = objective(&state);
                if !value.is_finite() {
                    let mut slot = failure.borrow_mut();
                    if slot.is_none() {
                        *slot = Some(Error::Numerical(format!(
                            "objective returned {value} at sigma = {:?}",
                            state.matrix()
                        )));
                    }
                    return f64::INFINITY;
                }
                -value
            }
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut results: Vec<(f64, Vec<f64>)> = Vec::with_capacity(cfg.restarts);
    for start in 0..cfg.restarts {
        let mut x0 = base_params.clone();
        if start > 0 {
            for x in &mut x0 {
                let delta: f64 = StandardNormal.sample(&mut rng);
                *x += 0.7 * delta;
            }
        }
        let (x, fx) = polished_minimize(&mut eval, x0, cfg.max_evals, cfg.tol);
        if let Some(err) = failure.borrow_mut().take() {
            return Err(err);
        }
        results.push((-fx, x));
    }

    let best_value = results
        .iter()
        .map(|(v, _)| *v)
        .fold(f64::NEG_INFINITY, f64::max);
    let (value, params) = results
        .iter()
        .find(|(v, _)| *v >= best_value - RESTART_TIE_TOL)
        .expect("at least one restart");
    let mat = realize(params, dim)
        .ok_or_else(|| Error::Numerical("winning restart is degenerate".into()))?;
    Ok((DensityMatrix::from_matrix_unchecked(mat), *value))
}

/// Nelder-Mead restarted around its own optimum with a shrinking initial
/// simplex until the improvement falls below `tol`; spends at most `budget`
/// evaluations.
fn polished_minimize(
    f: &mut impl FnMut(&[f64]) -> f64,
    x0: Vec<f64>,
    budget: usize,
    tol: f64,
) -> (Vec<f64>, f64) {
    let mut best_x = x0;
    let mut best_f = f(&best_x);
    let mut used = 1usize;
    let mut step = 0.5;
    while used < budget {
        let (x, fx, evals) = nelder_mead(f, &best_x, step, tol, budget - used);
        used += evals;
        let improvement = best_f - fx;
        if fx < best_f {
            best_f = fx;
            best_x = x;
        }
        if improvement <= tol && step <= 1e-6 {
            break;
        }
        step = (step * 1e-2).max(1e-7);
    }
    (best_x, best_f)
}

/// One Nelder-Mead run with standard reflection/expansion/contraction/shrink
/// coefficients, terminating on value spread or the evaluation budget.
fn nelder_mead(
    f: &mut impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    tol: f64,
    max_evals: usize,
) -> (Vec<f64>, f64, usize) {
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        f(x)
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let f0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), f0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        let fx = eval(&x, &mut evals);
        simplex.push((x, fx));
    }

    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        if spread.is_finite() && spread <= tol {
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|d| simplex[..n].iter().map(|(x, _)| x[d]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();
        let point_at = |coef: f64| -> Vec<f64> {
            (0..n)
                .map(|d| centroid[d] + coef * (centroid[d] - worst.0[d]))
                .collect()
        };

        let reflected = point_at(1.0);
        let fr = eval(&reflected, &mut evals);
        if fr < simplex[0].1 {
            let expanded = point_at(2.0);
            let fe = eval(&expanded, &mut evals);
            simplex[n] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
        } else {
            let (contracted, fc) = if fr < worst.1 {
                let outside = point_at(0.5);
                let fc = eval(&outside, &mut evals);
                (outside, fc)
            } else {
                let inside = point_at(-0.5);
                let fc = eval(&inside, &mut evals);
                (inside, fc)
            };
            if fc < worst.1.min(fr) {
                simplex[n] = (contracted, fc);
            } else {
                // Shrink toward the best vertex.
                let best = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    for d in 0..n {
                        vertex.0[d] = best[d] + 0.5 * (vertex.0[d] - best[d]);
                    }
                    vertex.1 = eval(&vertex.0, &mut evals);
                }
            }
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, fx) = simplex.swap_remove(0);
    (x, fx, evals)
}

/// Exhaustive scan over all real qubit states
/// `sigma(theta, q) = R(theta) diag(q, 1-q) R(theta)^T`, followed by one
/// local refinement pass around the best cell.
pub fn grid_oracle_qubit<F>(objective: F, resolution: usize) -> Result<(DensityMatrix, f64)>
where
    F: Fn(&DensityMatrix) -> f64,
{
    if resolution < 64 {
        return Err(Error::Validation(format!(
            "grid resolution {resolution} below 64"
        )));
    }
    let eval_cell = |theta: f64, q: f64| -> Result<f64> {
        let state = DensityMatrix::from_matrix_unchecked(rotated_diag(theta, q));
        let v = objective(&state);
        if !v.is_finite() {
            return Err(Error::Numerical(format!(
                "objective returned {v} at theta={theta}, q={q}"
            )));
        }
        Ok(v)
    };

    // Main pass: theta in [0, pi) (the parametrization has period pi),
    // q in [0, 1] inclusive.
    let mut best = (0.0f64, 0.0f64, f64::NEG_INFINITY);
    for i in 0..resolution {
        let theta = std::f64::consts::PI * i as f64 / resolution as f64;
        for j in 0..resolution {
            let q = j as f64 / (resolution - 1) as f64;
            let v = eval_cell(theta, q)?;
            if v > best.2 {
                best = (theta, q, v);
            }
        }
    }

    // Refinement pass over the winning cell's neighborhood.
    let dt = std::f64::consts::PI / resolution as f64;
    let dq = 1.0 / (resolution - 1) as f64;
    let (theta0, q0, _) = best;
    for i in 0..resolution {
        let theta = theta0 - dt + 2.0 * dt * i as f64 / (resolution - 1) as f64;
        for j in 0..resolution {
            let q = (q0 - dq + 2.0 * dq * j as f64 / (resolution - 1) as f64).clamp(0.0, 1.0);
            let v = eval_cell(theta, q)?;
            if v > best.2 {
                best = (theta, q, v);
            }
        }
    }

    let (theta, q, value) = best;
    Ok((
        DensityMatrix::from_matrix_unchecked(rotated_diag(theta, q)),
        value,
    ))
}

/// `R(theta) diag(q, 1-q) R(theta)^T` as a real symmetric matrix.
fn rotated_diag(theta: f64, q: f64) -> ComplexMatrix {
    let (s, c) = theta.sin_cos();
    let mut m = ComplexMatrix::zeros(2);
    let d00 = q * c * c + (1.0 - q) * s * s;
    let d11 = q * s * s + (1.0 - q) * c * c;
    let off = (2.0 * q - 1.0) * c * s;
    m.set(0, 0, num_complex::Complex64::new(d00, 0.0));
    m.set(1, 1, num_complex::Complex64::new(d11, 0.0));
    m.set(0, 1, num_complex::Complex64::new(off, 0.0));
    m.set(1, 0, num_complex::Complex64::new(off, 0.0));
    m
}
