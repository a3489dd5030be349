//! Two-phase revised simplex for small standard-form programs
//! `min cᵀy  s.t.  A y = b, y ≥ 0` with few rows and many columns.
//!
//! The basis inverse is kept dense and refreshed from scratch periodically.
//! Pricing is Dantzig's rule until the objective stalls on degenerate pivots,
//! then Bland's lowest-index rule for the rest of the solve so that cycling
//! cannot occur.

use crate::error::{Error, Result};
use crate::linalg::{invert_dense, solve_dense};

const REFACTOR_EVERY: usize = 64;
const STALL_LIMIT: usize = 50;

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub y: Vec<f64>,
    /// Simplex multipliers π solving Bᵀπ = c_B at the optimal basis.
    pub duals: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

/// `columns[j]` is column j of A (length = b.len()).
pub fn solve(
    columns: &[Vec<f64>],
    costs: &[f64],
    b: &[f64],
    max_iter: usize,
) -> Result<LpSolution> {
    let m = b.len();
    let ncols = columns.len();
    if costs.len() != ncols || columns.iter().any(|c| c.len() != m) {
        return Err(Error::InvalidInput("inconsistent LP dimensions".into()));
    }
    // Flip rows so that b ≥ 0; artificials then start feasible.
    let signs: Vec<f64> = b
        .iter()
        .map(|&v| if v < 0.0 { -1.0 } else { 1.0 })
        .collect();
    let cols: Vec<Vec<f64>> = columns
        .iter()
        .map(|c| c.iter().zip(&signs).map(|(a, s)| a * s).collect())
        .collect();
    let rhs: Vec<f64> = b.iter().zip(&signs).map(|(v, s)| v * s).collect();

    let mut lp = Tableau::new(cols, rhs);
    let mut iterations = 0;

    let phase1: Vec<f64> = (0..ncols + m)
        .map(|j| if j >= ncols { 1.0 } else { 0.0 })
        .collect();
    iterations += lp.run(&phase1, true, max_iter)?;
    let infeas: f64 = lp
        .basis
        .iter()
        .zip(&lp.xb)
        .filter(|(&j, _)| j >= ncols)
        .map(|(_, v)| *v)
        .sum();
    let scale = 1.0 + lp.rhs.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if infeas > 1e-9 * scale {
        return Err(Error::InvalidInput(format!(
            "linear program is infeasible (phase-one residual {infeas:e})"
        )));
    }
    lp.drive_out_artificials();

    let mut phase2 = costs.to_vec();
    phase2.extend(std::iter::repeat(0.0).take(m));
    iterations += lp.run(&phase2, false, max_iter.saturating_sub(iterations))?;

    let mut y = vec![0.0; ncols];
    for (&j, &v) in lp.basis.iter().zip(&lp.xb) {
        if j < ncols {
            y[j] = v;
        }
    }
    // Fresh solve for the multipliers; the running inverse has drift.
    let bmat = lp.basis_matrix_transposed();
    let cb: Vec<f64> = lp.basis.iter().map(|&j| phase2[j]).collect();
    let pi = solve_dense(&bmat, &cb, m)
        .ok_or_else(|| Error::Rank("optimal basis is numerically singular".into()))?;
    let duals: Vec<f64> = pi.iter().zip(&signs).map(|(p, s)| p * s).collect();
    let objective = y.iter().zip(costs).map(|(a, c)| a * c).sum();
    Ok(LpSolution {
        y,
        duals,
        objective,
        iterations,
    })
}

struct Tableau {
    cols: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    m: usize,
    basis: Vec<usize>,
    binv: Vec<f64>,
    xb: Vec<f64>,
}

impl Tableau {
    fn new(cols: Vec<Vec<f64>>, rhs: Vec<f64>) -> Self {
        let m = rhs.len();
        let n = cols.len();
        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            binv[i * m + i] = 1.0;
        }
        Tableau {
            cols,
            xb: rhs.clone(),
            rhs,
            m,
            basis: (n..n + m).collect(),
            binv,
        }
    }

    fn column(&self, j: usize) -> Vec<f64> {
        let n = self.cols.len();
        if j < n {
            self.cols[j].clone()
        } else {
            let mut e = vec![0.0; self.m];
            e[j - n] = 1.0;
            e
        }
    }

    fn dot_col(&self, v: &[f64], j: usize) -> f64 {
        let n = self.cols.len();
        if j < n {
            self.cols[j].iter().zip(v).map(|(a, b)| a * b).sum()
        } else {
            v[j - n]
        }
    }

    fn basis_matrix_transposed(&self) -> Vec<f64> {
        // Row k of Bᵀ is column basis[k] of B.
        let m = self.m;
        let mut out = vec![0.0; m * m];
        for (k, &j) in self.basis.iter().enumerate() {
            let c = self.column(j);
            out[k * m..(k + 1) * m].copy_from_slice(&c);
        }
        out
    }

    fn refactor(&mut self) -> Result<()> {
        let m = self.m;
        let bt = self.basis_matrix_transposed();
        let mut bmat = vec![0.0; m * m];
        for i in 0..m {
            for k in 0..m {
                bmat[i * m + k] = bt[k * m + i];
            }
        }
        self.binv = invert_dense(&bmat, m)
            .ok_or_else(|| Error::Rank("simplex basis became singular".into()))?;
        self.xb = self.ftran(&self.rhs);
        for v in &mut self.xb {
            if *v < 0.0 && *v > -1e-12 {
                *v = 0.0;
            }
        }
        Ok(())
    }

    fn ftran(&self, a: &[f64]) -> Vec<f64> {
        let m = self.m;
        (0..m)
            .map(|i| (0..m).map(|k| self.binv[i * m + k] * a[k]).sum())
            .collect()
    }

    fn pivot(&mut self, r: usize, q: usize, w: &[f64]) {
        let m = self.m;
        let wr = w[r];
        for k in 0..m {
            self.binv[r * m + k] /= wr;
        }
        for i in 0..m {
            if i != r && w[i] != 0.0 {
                let f = w[i];
                for k in 0..m {
                    self.binv[i * m + k] -= f * self.binv[r * m + k];
                }
            }
        }
        let theta = self.xb[r] / wr;
        for i in 0..m {
            if i != r {
                self.xb[i] -= theta * w[i];
                if self.xb[i] < 0.0 && self.xb[i] > -1e-12 {
                    self.xb[i] = 0.0;
                }
            }
        }
        self.xb[r] = theta;
        self.basis[r] = q;
    }

    fn run(&mut self, costs: &[f64], allow_artificial: bool, max_iter: usize) -> Result<usize> {
        let m = self.m;
        let n = self.cols.len();
        let cmax = costs.iter().fold(0.0f64, |a, c| a.max(c.abs()));
        let tol = 1e-11 * (1.0 + cmax);
        let mut bland = false;
        let mut stall = 0;
        let mut since_refactor = 0;
        let mut in_basis = vec![false; n + m];
        for &j in &self.basis {
            in_basis[j] = true;
        }
        for iter in 0..max_iter {
            if since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
                since_refactor = 0;
            }
            // π = c_Bᵀ B⁻¹
            let mut pi = vec![0.0; m];
            for (i, &j) in self.basis.iter().enumerate() {
                let c = costs[j];
                if c != 0.0 {
                    for k in 0..m {
                        pi[k] += c * self.binv[i * m + k];
                    }
                }
            }
            let limit = if allow_artificial { n + m } else { n };
            let mut entering = None;
            let mut best = -tol;
            for j in 0..limit {
                if in_basis[j] {
                    continue;
                }
                let d = costs[j] - self.dot_col(&pi, j);
                if d < best {
                    entering = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(q) = entering else {
                return Ok(iter);
            };
            let w = self.ftran(&self.column(q));
            let wmax = w.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let piv_tol = 1e-11 * (1.0 + wmax);
            let mut leave: Option<usize> = None;
            let mut theta = f64::INFINITY;
            for i in 0..m {
                if w[i] > piv_tol {
                    let t = self.xb[i].max(0.0) / w[i];
                    let better = match leave {
                        None => true,
                        Some(r) => {
                            t < theta - 1e-14
                                || (t <= theta + 1e-14 && self.basis[i] < self.basis[r])
                        }
                    };
                    if better {
                        theta = theta.min(t);
                        leave = Some(i);
                    }
                }
            }
            let Some(r) = leave else {
                return Err(Error::InvalidInput("linear program is unbounded".into()));
            };
            if theta <= 1e-14 {
                stall += 1;
                if stall > STALL_LIMIT {
                    bland = true;
                }
            } else {
                stall = 0;
            }
            in_basis[self.basis[r]] = false;
            in_basis[q] = true;
            self.pivot(r, q, &w);
            since_refactor += 1;
        }
        Err(Error::IterationLimit {
            iterations: max_iter,
            residual: f64::NAN,
            history: Vec::new(),
        })
    }

    /// Replace artificial columns still basic at level zero by structural ones.
    fn drive_out_artificials(&mut self) {
        let m = self.m;
        let n = self.cols.len();
        for r in 0..m {
            if self.basis[r] < n {
                continue;
            }
            let row: Vec<f64> = self.binv[r * m..(r + 1) * m].to_vec();
            let mut best: Option<(usize, f64)> = None;
            for j in 0..n {
                if self.basis.contains(&j) {
                    continue;
                }
                let v = self.dot_col(&row, j).abs();
                if v > 1e-9 && best.map_or(true, |(_, b)| v > b) {
                    best = Some((j, v));
                }
            }
            if let Some((q, _)) = best {
                let w = self.ftran(&self.column(q));
                self.pivot(r, q, &w);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_program() {
        // min -x1 - 2x2  s.t. x1 + x2 + s1 = 4, x1 + 3x2 + s2 = 6
        let cols = vec![
            vec![1.0, 1.0],
            vec![1.0, 3.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
        ];
        let sol = solve(&cols, &[-1.0, -2.0, 0.0, 0.0], &[4.0, 6.0], 100).unwrap();
        assert!((sol.objective + 5.0).abs() < 1e-12);
        assert!((sol.y[0] - 3.0).abs() < 1e-12);
        assert!((sol.y[1] - 1.0).abs() < 1e-12);
        // Strong duality: bᵀπ equals the optimum.
        let dual_obj = 4.0 * sol.duals[0] + 6.0 * sol.duals[1];
        assert!((dual_obj + 5.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_detected() {
        // x1 = -1 with x1 ≥ 0
        let cols = vec![vec![1.0]];
        assert!(solve(&cols, &[0.0], &[-1.0], 10).is_err());
    }

    #[test]
    fn unbounded_detected() {
        // min -x1 s.t. x1 - x2 = 0
        let cols = vec![vec![1.0], vec![-1.0]];
        assert!(solve(&cols, &[-1.0, 0.0], &[0.0], 10).is_err());
    }
}
