//! Phase-one simplex for `θ ∈ cv{p_1, …, p_N}`.
//!
//! The LP is posed on centred points `q_j = p_j − θ`:
//!
//! ```text
//! minimise   Σ s⁺ + Σ s⁻ + a
//! subject to Σ_j w_j q_j + s⁺ − s⁻ = 0
//!            Σ_j w_j            + a = 1
//!            w, s⁺, s⁻, a ≥ 0
//! ```
//!
//! The starting basis is `(s⁺, a)`. Entering and leaving variables follow
//! Bland's rule. At termination the basis is refactorised from the original
//! columns to recover accurate primal weights and the dual vector `y`; the
//! first `D` components of `y` give the separating direction when the
//! objective is positive.

use super::{check_vector, HullError, MembershipCertificate, PointCloud};
use crate::linalg::{solve, solve_transposed, Matrix};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug)]
pub struct MembershipOptions<T> {
    /// Objective threshold for declaring θ inside.
    pub tol: T,
    /// Relative threshold for pivots and reduced costs.
    pub pivot_eps: T,
    /// Pivot cap; `None` picks `100 · (rows + cols)`.
    pub max_iterations: Option<usize>,
}

impl<T: Scalar> MembershipOptions<T> {
    pub fn new(tol: T) -> Self {
        MembershipOptions {
            tol,
            pivot_eps: T::pivot_epsilon(),
            max_iterations: None,
        }
    }
}

impl<T: Scalar> Default for MembershipOptions<T> {
    fn default() -> Self {
        Self::new(T::default_tolerance())
    }
}

/// Decides whether `theta` lies in the convex hull of `cloud`.
///
/// Objectives in `(tol, 10·tol]` trigger one re-solve with a pivot tolerance
/// a hundred times tighter; if the objective stays in that band the query is
/// reported as [`HullError::Indeterminate`].
pub fn membership<T: Scalar>(
    cloud: &PointCloud<T>,
    theta: &[T],
    tol: T,
) -> Result<MembershipCertificate<T>, HullError> {
    membership_with(cloud, theta, &MembershipOptions::new(tol))
}

pub fn membership_with<T: Scalar>(
    cloud: &PointCloud<T>,
    theta: &[T],
    opts: &MembershipOptions<T>,
) -> Result<MembershipCertificate<T>, HullError> {
    check_vector(theta, cloud.dim(), "theta")?;
    if !(opts.tol > T::zero()) || !opts.tol.is_finite() {
        return Err(HullError::InvalidArgument("tolerance must be positive".into()));
    }
    let band = opts.tol * T::from_f64_lossy(10.0);
    let first = solve_phase_one(cloud, theta, opts.pivot_eps, opts.max_iterations)?;
    let outcome = if first.objective > opts.tol && first.objective <= band {
        let tight = opts.pivot_eps / T::from_f64_lossy(100.0);
        let second = solve_phase_one(cloud, theta, tight, opts.max_iterations)?;
        if second.objective > opts.tol && second.objective <= band {
            return Err(HullError::Indeterminate {
                objective: second.objective.to_f64_lossy(),
                reason: "objective inside the indeterminate band after re-solve",
            });
        }
        second
    } else {
        first
    };
    certificate(cloud, theta, opts.tol, outcome)
}

struct PhaseOne<T> {
    objective: T,
    weights: Vec<T>,
    dual: Vec<T>,
}

fn certificate<T: Scalar>(
    cloud: &PointCloud<T>,
    theta: &[T],
    tol: T,
    sol: PhaseOne<T>,
) -> Result<MembershipCertificate<T>, HullError> {
    if sol.objective <= tol {
        let total: T = sol.weights.iter().copied().sum();
        if !(total > T::zero()) {
            return Err(HullError::Indeterminate {
                objective: sol.objective.to_f64_lossy(),
                reason: "inside verdict with zero total weight",
            });
        }
        let weights = sol.weights.into_iter().map(|w| w / total).collect();
        return Ok(MembershipCertificate {
            inside: true,
            weights: Some(weights),
            separating_direction: None,
            objective: sol.objective,
        });
    }
    let d = cloud.dim();
    let mut c: Vec<T> = sol.dual[..d].to_vec();
    let norm = c.iter().map(|x| *x * *x).sum::<T>().sqrt();
    if !(norm > T::zero()) {
        return Err(HullError::Indeterminate {
            objective: sol.objective.to_f64_lossy(),
            reason: "outside verdict without a separating direction",
        });
    }
    for x in &mut c {
        *x = *x / norm;
    }
    let margin = cloud
        .iter()
        .map(|p| p.iter().zip(theta).zip(&c).map(|((a, b), ci)| (*a - *b) * *ci).sum::<T>())
        .fold(T::neg_infinity(), T::max);
    if !(margin < tol) {
        return Err(HullError::Indeterminate {
            objective: sol.objective.to_f64_lossy(),
            reason: "separating direction failed verification",
        });
    }
    Ok(MembershipCertificate {
        inside: false,
        weights: None,
        separating_direction: Some(c),
        objective: sol.objective,
    })
}

fn solve_phase_one<T: Scalar>(
    cloud: &PointCloud<T>,
    theta: &[T],
    pivot_eps: T,
    max_iterations: Option<usize>,
) -> Result<PhaseOne<T>, HullError> {
    let n = cloud.len();
    let d = cloud.dim();
    let rows = d + 1;
    let cols = n + 2 * d + 1;
    let art = n + 2 * d;

    // Original constraint columns, kept for refactorisation.
    let column = |j: usize, i: usize| -> T {
        if j < n {
            if i < d {
                cloud.point(j)[i] - theta[i]
            } else {
                T::one()
            }
        } else if j < n + d {
            if i == j - n {
                T::one()
            } else {
                T::zero()
            }
        } else if j < art {
            if i == j - n - d {
                -T::one()
            } else {
                T::zero()
            }
        } else if i == d {
            T::one()
        } else {
            T::zero()
        }
    };
    let cost = |j: usize| if j < n { T::zero() } else { T::one() };

    let mut tab = Matrix::from_fn(rows, cols, |i, j| column(j, i));
    let mut rhs = vec![T::zero(); rows];
    rhs[d] = T::one();
    let mut basis: Vec<usize> = (0..d).map(|i| n + i).chain(std::iter::once(art)).collect();

    let scale = tab.max_abs().max(T::one());
    let eps = pivot_eps * scale;
    let mut reduced: Vec<T> = (0..cols)
        .map(|j| cost(j) - (0..rows).map(|i| cost(basis[i]) * tab.get(i, j)).sum::<T>())
        .collect();

    let limit = max_iterations.unwrap_or(100 * (rows + cols));
    let mut iterations = 0usize;
    loop {
        // Bland: lowest-index improving column.
        let Some(enter) = (0..cols).find(|&j| reduced[j] < -eps) else {
            break;
        };
        let mut leave: Option<(usize, T)> = None;
        for i in 0..rows {
            let a = tab.get(i, enter);
            if a <= eps {
                continue;
            }
            let ratio = rhs[i] / a;
            leave = match leave {
                None => Some((i, ratio)),
                Some((li, lr)) => {
                    if ratio < lr - eps || (ratio <= lr + eps && basis[i] < basis[li]) {
                        Some((i, ratio))
                    } else {
                        Some((li, lr))
                    }
                }
            };
        }
        // Phase one is bounded below, so an unbounded ray signals numerical trouble.
        let Some((r, _)) = leave else {
            return Err(HullError::Indeterminate {
                objective: f64::NAN,
                reason: "unbounded ray in a bounded phase-one problem",
            });
        };
        pivot(&mut tab, &mut rhs, &mut reduced, r, enter);
        basis[r] = enter;
        iterations += 1;
        if iterations > limit {
            return Err(HullError::Indeterminate {
                objective: basic_objective(&basis, &rhs, n).to_f64_lossy(),
                reason: "simplex iteration limit exceeded",
            });
        }
    }

    // Refactorise from the original columns.
    let b = Matrix::from_fn(rows, rows, |i, k| column(basis[k], i));
    let mut b_rhs = vec![T::zero(); rows];
    b_rhs[d] = T::one();
    let tiny = T::epsilon();
    let x_b = solve(&b, &b_rhs, tiny).unwrap_or_else(|| rhs.clone());
    let c_b: Vec<T> = basis.iter().map(|&j| cost(j)).collect();
    let dual = solve_transposed(&b, &c_b, tiny).unwrap_or_else(|| {
        // y_i = c_j − reduced_j for the starting identity columns.
        let mut y: Vec<T> = (0..d).map(|i| T::one() - reduced[n + i]).collect();
        y.push(T::one() - reduced[art]);
        y
    });

    let mut weights = vec![T::zero(); n];
    let mut objective = T::zero();
    for (k, &j) in basis.iter().enumerate() {
        let v = x_b[k].max(T::zero());
        if j < n {
            weights[j] = v;
        } else {
            objective = objective + v;
        }
    }
    Ok(PhaseOne {
        objective,
        weights,
        dual,
    })
}

fn basic_objective<T: Scalar>(basis: &[usize], rhs: &[T], n: usize) -> T {
    basis
        .iter()
        .zip(rhs)
        .filter(|(j, _)| **j >= n)
        .map(|(_, v)| *v)
        .sum()
}

fn pivot<T: Scalar>(tab: &mut Matrix<T>, rhs: &mut [T], reduced: &mut [T], r: usize, e: usize) {
    let cols = tab.cols();
    let p = tab.get(r, e);
    {
        let row = tab.row_mut(r);
        for v in row.iter_mut() {
            *v = *v / p;
        }
    }
    rhs[r] = rhs[r] / p;
    let pivot_row: Vec<T> = tab.row(r).to_vec();
    for i in 0..tab.rows() {
        if i == r {
            continue;
        }
        let f = tab.get(i, e);
        if f == T::zero() {
            continue;
        }
        let row = tab.row_mut(i);
        for j in 0..cols {
            row[j] = row[j] - f * pivot_row[j];
        }
        row[e] = T::zero();
        rhs[i] = rhs[i] - f * rhs[r];
    }
    let f = reduced[e];
    for j in 0..cols {
        reduced[j] = reduced[j] - f * pivot_row[j];
    }
    reduced[e] = T::zero();
}
