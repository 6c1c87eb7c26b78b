//! Entropy maximization of a conditional table under expectation constraints.
//!
//! Variables are `q(row, cell) = mass(row) * r(cell | row)` with the row
//! masses fixed. The solution has the form `r ∝ exp(mu · f)` and `mu`
//! minimizes the convex dual
//! `D(mu) = sum_row mass(row) * ln Z_row(mu) - mu · targets`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::loglin::log_sum_exp;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_ITERATIONS: usize = 100_000;
const DIVERGENCE_BOUND: f64 = 1e3;
const RIDGE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverRow {
    pub mass: f64,
    /// Feature vector of every admissible cell.
    pub cells: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxEntProblem {
    pub rows: Vec<SolverRow>,
    pub targets: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxEntSolution {
    pub multipliers: Vec<f64>,
    /// Conditional distribution over the cells of each row. Rows with zero
    /// mass are uniform.
    pub rows: Vec<Vec<f64>>,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl MaxEntProblem {
    pub fn feature_count(&self) -> usize {
        self.targets.len()
    }

    fn live_rows(&self) -> impl Iterator<Item = &SolverRow> {
        self.rows.iter().filter(|r| r.mass > 0.0)
    }

    /// `r(. | row)` at the given multipliers.
    pub fn row_distribution(&self, row: &SolverRow, mu: &[f64]) -> Vec<f64> {
        if row.cells.is_empty() {
            return Vec::new();
        }
        let scores: Vec<f64> = row.cells.iter().map(|f| dot(f, mu)).collect();
        let z = log_sum_exp(&scores);
        scores.iter().map(|s| (s - z).exp()).collect()
    }

    pub fn dual(&self, mu: &[f64]) -> f64 {
        let mut total = -dot(mu, &self.targets);
        for row in self.live_rows() {
            let scores: Vec<f64> = row.cells.iter().map(|f| dot(f, mu)).collect();
            total += row.mass * log_sum_exp(&scores);
        }
        total
    }

    /// Model expectation of each feature minus its target.
    pub fn gradient(&self, mu: &[f64]) -> Vec<f64> {
        let mut g: Vec<f64> = self.targets.iter().map(|t| -t).collect();
        for row in self.live_rows() {
            let r = self.row_distribution(row, mu);
            for (p, f) in r.iter().zip(&row.cells) {
                for (gk, fk) in g.iter_mut().zip(f) {
                    *gk += row.mass * p * fk;
                }
            }
        }
        g
    }

    fn hessian(&self, mu: &[f64]) -> DMatrix<f64> {
        let k = self.feature_count();
        let mut h = DMatrix::zeros(k, k);
        for row in self.live_rows() {
            let r = self.row_distribution(row, mu);
            let mut mean = vec![0.0; k];
            for (p, f) in r.iter().zip(&row.cells) {
                for (m, fk) in mean.iter_mut().zip(f) {
                    *m += p * fk;
                }
            }
            for (p, f) in r.iter().zip(&row.cells) {
                for a in 0..k {
                    let da = f[a] - mean[a];
                    if da == 0.0 {
                        continue;
                    }
                    for b in 0..k {
                        h[(a, b)] += row.mass * p * da * (f[b] - mean[b]);
                    }
                }
            }
        }
        h
    }

    /// Features whose expectation cannot move: constant within every row
    /// that carries mass. Returns their fixed expectations.
    fn fixed_features(&self) -> Vec<Option<f64>> {
        (0..self.feature_count())
            .map(|k| {
                let mut expectation = 0.0;
                for row in self.live_rows() {
                    let first = row.cells.first()?[k];
                    if row.cells.iter().any(|f| f[k] != first) {
                        return None;
                    }
                    expectation += row.mass * first;
                }
                Some(expectation)
            })
            .collect()
    }

    pub fn solve(&self, options: &SolverOptions) -> Result<MaxEntSolution> {
        if self.live_rows().any(|r| r.cells.is_empty()) {
            return Err(Error::IncoherentWeights(
                "a row with positive mass has no admissible cell".into(),
            ));
        }
        let k = self.feature_count();
        let fixed = self.fixed_features();
        for (i, fx) in fixed.iter().enumerate() {
            if let Some(e) = fx {
                if (e - self.targets[i]).abs() > options.tolerance {
                    return Err(Error::IncoherentWeights(format!(
                        "feature {i} is pinned at {e} but its target is {}",
                        self.targets[i]
                    )));
                }
            }
        }
        let free: Vec<usize> = (0..k).filter(|&i| fixed[i].is_none()).collect();
        let reduced = MaxEntProblem {
            rows: self
                .rows
                .iter()
                .map(|r| SolverRow {
                    mass: r.mass,
                    cells: r
                        .cells
                        .iter()
                        .map(|f| free.iter().map(|&i| f[i]).collect())
                        .collect(),
                })
                .collect(),
            targets: free.iter().map(|&i| self.targets[i]).collect(),
        };
        let (mu_free, iterations, residual) = reduced.newton(options)?;
        let mut mu = vec![0.0; k];
        for (j, &i) in free.iter().enumerate() {
            mu[i] = mu_free[j];
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                if row.mass > 0.0 {
                    self.row_distribution(row, &mu)
                } else {
                    let n = row.cells.len();
                    vec![1.0 / n as f64; n]
                }
            })
            .collect();
        Ok(MaxEntSolution {
            multipliers: mu,
            rows,
            iterations,
            residual,
        })
    }

    fn newton(&self, options: &SolverOptions) -> Result<(Vec<f64>, usize, f64)> {
        let k = self.feature_count();
        let mut mu = vec![0.0; k];
        if k == 0 {
            return Ok((mu, 0, 0.0));
        }
        let max_abs = |g: &[f64]| g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut value = self.dual(&mu);
        for iter in 0..options.max_iterations {
            let g = self.gradient(&mu);
            let residual = max_abs(&g);
            if residual < options.tolerance {
                return Ok((mu, iter, residual));
            }
            if max_abs(&mu) > DIVERGENCE_BOUND {
                return Err(Error::IncoherentWeights(format!(
                    "multipliers diverge with residual {residual:e}"
                )));
            }
            let mut h = self.hessian(&mu);
            // A small ridge keeps flat directions moving; an infeasible target
            // then drives the multipliers past the divergence bound.
            let ridge = RIDGE * (1.0 + h.diagonal().max());
            for i in 0..k {
                h[(i, i)] += ridge;
            }
            let gv = DVector::from_column_slice(&g);
            let step = h
                .svd(true, true)
                .solve(&(-&gv), 1e-14)
                .ok()
                .filter(|d| d.iter().all(|x| x.is_finite()) && d.dot(&gv) < 0.0)
                .unwrap_or_else(|| -gv.clone());
            let slope = step.dot(&gv);
            // Close to the optimum the dual changes by less than its rounding
            // error, so a full step is judged by the residual instead.
            let full: Vec<f64> = mu.iter().zip(step.iter()).map(|(m, d)| m + d).collect();
            let full_value = self.dual(&full);
            if (full_value - value).abs() <= 1e-12 * (1.0 + value.abs())
                && max_abs(&self.gradient(&full)) < residual
            {
                mu = full;
                value = full_value;
                continue;
            }
            let mut alpha = 1.0;
            let mut accepted = false;
            while alpha > 1e-16 {
                let trial: Vec<f64> = mu
                    .iter()
                    .zip(step.iter())
                    .map(|(m, d)| m + alpha * d)
                    .collect();
                let tv = self.dual(&trial);
                if tv <= value + 1e-4 * alpha * slope {
                    mu = trial;
                    value = tv;
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !accepted {
                // No further decrease representable; accept near-converged points.
                if residual < options.tolerance.sqrt() * 1e-3 {
                    return Ok((mu, iter, residual));
                }
                return Err(Error::IncoherentWeights(format!(
                    "line search stalled with residual {residual:e}"
                )));
            }
        }
        let residual = max_abs(&self.gradient(&mu));
        Err(Error::IncoherentWeights(format!(
            "no convergence after {} iterations (residual {residual:e})",
            options.max_iterations
        )))
    }
}
