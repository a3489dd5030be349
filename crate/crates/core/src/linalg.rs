//! Small dense linear algebra: symmetric matrices with a cyclic Jacobi
//! eigensolver, plus the handful of dense kernels (LU determinant, solves,
//! inverses) the rest of the crate needs for n ≤ 8 sized problems.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense symmetric n×n matrix. Only the upper triangle is stored, row-major,
/// so symmetry holds by construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    dim: usize,
    upper: Vec<f64>,
}

/// Eigen-decomposition of a symmetric matrix. `values` are ascending and
/// column `j` of `vectors` (row-major n×n) is the eigenvector of `values[j]`.
#[derive(Clone, Debug)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
}

const JACOBI_MAX_SWEEPS: usize = 100;

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        SymMatrix {
            dim,
            upper: vec![0.0; dim * (dim + 1) / 2],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scaled_identity(dim, 1.0)
    }

    pub fn scaled_identity(dim: usize, c: f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, c);
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds a matrix from the upper triangle, row-major.
    pub fn from_upper(dim: usize, upper: Vec<f64>) -> Result<Self> {
        if upper.len() != dim * (dim + 1) / 2 {
            return Err(Error::InvalidInput(format!(
                "expected {} upper-triangle entries for dimension {dim}, got {}",
                dim * (dim + 1) / 2,
                upper.len()
            )));
        }
        Ok(SymMatrix { dim, upper })
    }

    /// Builds a matrix from full rows, rejecting asymmetric input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidInput("empty matrix".into()));
        }
        let scale = rows
            .iter()
            .flatten()
            .fold(0.0_f64, |acc, v| acc.max(v.abs()))
            .max(1.0);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for j in 0..i {
                if (row[j] - rows[j][i]).abs() > 1e-12 * scale {
                    return Err(Error::InvalidInput(format!(
                        "matrix is not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(Self::from_fn(n, |i, j| rows[i][j]))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[self.offset(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.offset(i, j);
        self.upper[k] = v;
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        // row i of the upper triangle starts after sum_{r<i} (n - r) entries
        i * self.dim - i * (i + 1) / 2 + j
    }

    /// Upper-triangle entries, row-major.
    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Full row-major copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = self.get(i, j);
            }
        }
        out
    }

    pub fn from_dense(dim: usize, dense: &[f64]) -> Self {
        Self::from_fn(dim, |i, j| 0.5 * (dense[i * dim + j] + dense[j * dim + i]))
    }

    pub fn is_finite(&self) -> bool {
        self.upper.iter().all(|v| v.is_finite())
    }

    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        debug_assert_eq!(self.dim, other.dim);
        SymMatrix {
            dim: self.dim,
            upper: self
                .upper
                .iter()
                .zip(&other.upper)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, c: f64) -> SymMatrix {
        SymMatrix {
            dim: self.dim,
            upper: self.upper.iter().map(|a| a * c).collect(),
        }
    }

    pub fn add_identity(&self, c: f64) -> SymMatrix {
        let mut m = self.clone();
        for i in 0..self.dim {
            m.set(i, i, m.get(i, i) + c);
        }
        m
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// vᵀ M v
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        self.mul_vec(v).iter().zip(v).map(|(a, b)| a * b).sum()
    }

    /// tr(A·B) for symmetric A, B.
    pub fn frobenius_dot(&self, other: &SymMatrix) -> f64 {
        let n = self.dim;
        let mut s = 0.0;
        for i in 0..n {
            s += self.get(i, i) * other.get(i, i);
            for j in (i + 1)..n {
                s += 2.0 * self.get(i, j) * other.get(i, j);
            }
        }
        s
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_dot(self).sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.upper.iter().fold(0.0_f64, |a, v| a.max(v.abs()))
    }

    /// Determinant by LU with partial pivoting.
    pub fn det(&self) -> f64 {
        lu_det(&self.to_dense(), self.dim)
    }

    /// Spectral radius |M| = max |λ_i|.
    pub fn spectral_radius(&self) -> Result<f64> {
        let ev = self.eigenvalues()?;
        Ok(ev.iter().fold(0.0_f64, |a, v| a.max(v.abs())))
    }

    /// Ascending eigenvalues by cyclic Jacobi rotations.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.eigen()?.values)
    }

    /// Ascending eigenvalues with orthonormal eigenvectors (cyclic Jacobi,
    /// at most 100 sweeps).
    pub fn eigen(&self) -> Result<SymEigen> {
        if !self.is_finite() {
            return Err(Error::InvalidInput("matrix has a non-finite entry".into()));
        }
        let n = self.dim;
        let mut a = self.to_dense();
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
        let norm = self.frobenius_norm();
        for _ in 0..JACOBI_MAX_SWEEPS {
            let mut off = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[p * n + q] * a[p * n + q];
                }
            }
            if off.sqrt() <= f64::EPSILON * 1e-2 * norm || off == 0.0 {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                    let t = if theta.is_infinite() {
                        0.5 / theta
                    } else {
                        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                    };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = c * akp - s * akq;
                        a[k * n + q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = c * apk - s * aqk;
                        a[q * n + k] = s * apk + c * aqk;
                    }
                    // exact zero keeps later sweeps from chasing round-off
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
        let values = order.iter().map(|&i| a[i * n + i]).collect();
        let mut vectors = vec![0.0; n * n];
        for (new_col, &old_col) in order.iter().enumerate() {
            for k in 0..n {
                vectors[k * n + new_col] = v[k * n + old_col];
            }
        }
        Ok(SymEigen { values, vectors })
    }
}

impl SymEigen {
    /// Q·diag(values)·Qᵀ
    pub fn reconstruct(&self) -> SymMatrix {
        let n = self.values.len();
        SymMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| self.vectors[i * n + k] * self.values[k] * self.vectors[j * n + k])
                .sum()
        })
    }
}

/// Determinant of a dense row-major n×n matrix by LU with partial pivoting.
pub fn lu_det(a: &[f64], n: usize) -> f64 {
    let mut m = a.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i * n + col].abs().total_cmp(&m[j * n + col].abs()))
            .unwrap_or(col);
        if m[pivot * n + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for k in 0..n {
                m.swap(pivot * n + k, col * n + k);
            }
            det = -det;
        }
        let d = m[col * n + col];
        det *= d;
        for r in (col + 1)..n {
            let f = m[r * n + col] / d;
            if f != 0.0 {
                for k in col..n {
                    m[r * n + k] -= f * m[col * n + k];
                }
            }
        }
    }
    det
}

/// Solves A x = b (dense, row-major) by Gaussian elimination with partial
/// pivoting. Returns `None` when a pivot falls below `1e-14·max|A|`.
pub fn solve_dense(a: &[f64], b: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    let scale = a.iter().fold(0.0_f64, |s, v| s.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    for col in 0..n {
        let pivot =
            (col..n).max_by(|&i, &j| m[i * n + col].abs().total_cmp(&m[j * n + col].abs()))?;
        if m[pivot * n + col].abs() <= 1e-14 * scale {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                m.swap(pivot * n + k, col * n + k);
            }
            x.swap(pivot, col);
        }
        let d = m[col * n + col];
        for r in (col + 1)..n {
            let f = m[r * n + col] / d;
            if f != 0.0 {
                for k in col..n {
                    m[r * n + k] -= f * m[col * n + k];
                }
                x[r] -= f * x[col];
            }
        }
    }
    for col in (0..n).rev() {
        let mut s = x[col];
        for k in (col + 1)..n {
            s -= m[col * n + k] * x[k];
        }
        x[col] = s / m[col * n + col];
    }
    Some(x)
}

/// Dense inverse via Gauss–Jordan with partial pivoting.
pub fn invert_dense(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut out = vec![0.0; n * n];
    for col in 0..n {
        let mut e = vec![0.0; n];
        e[col] = 1.0;
        let x = solve_dense(a, &e, n)?;
        for r in 0..n {
            out[r * n + col] = x[r];
        }
    }
    Some(out)
}

/// Numerical rank of a row-major `rows × cols` matrix by Gaussian elimination
/// with complete pivoting, relative tolerance `rel_tol`.
pub fn numerical_rank(a: &[f64], rows: usize, cols: usize, rel_tol: f64) -> usize {
    let mut m = a.to_vec();
    let scale = m.iter().fold(0.0_f64, |s, v| s.max(v.abs()));
    if scale == 0.0 {
        return 0;
    }
    let mut rank = 0;
    let mut col_perm: Vec<usize> = (0..cols).collect();
    for step in 0..rows.min(cols) {
        let mut best = (step, step, 0.0_f64);
        for r in step..rows {
            for c in step..cols {
                let v = m[r * cols + col_perm[c]].abs();
                if v > best.2 {
                    best = (r, c, v);
                }
            }
        }
        if best.2 <= rel_tol * scale {
            break;
        }
        let (pr, pc, _) = best;
        if pr != step {
            for c in 0..cols {
                m.swap(pr * cols + c, step * cols + c);
            }
        }
        col_perm.swap(step, pc);
        let pcol = col_perm[step];
        let d = m[step * cols + pcol];
        for r in (step + 1)..rows {
            let f = m[r * cols + pcol] / d;
            if f != 0.0 {
                for c in 0..cols {
                    m[r * cols + c] -= f * m[step * cols + c];
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_eigenvalues_are_sorted() {
        let m = SymMatrix::from_diag(&[3.0, 1.0, 2.0]);
        assert_eq!(m.eigenvalues().unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn two_by_two_swap() {
        let m = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let ev = m.eigenvalues().unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-15);
        assert!((ev[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn non_finite_is_rejected() {
        let m = SymMatrix::from_diag(&[1.0, f64::NAN]);
        assert!(matches!(m.eigenvalues(), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn storage_offsets_cover_upper_triangle() {
        let m = SymMatrix::from_fn(4, |i, j| (10 * i + j) as f64);
        assert_eq!(
            m.upper(),
            &[0.0, 1.0, 2.0, 3.0, 11.0, 12.0, 13.0, 22.0, 23.0, 33.0]
        );
        assert_eq!(m.get(3, 1), 13.0);
    }

    #[test]
    fn asymmetric_rows_rejected() {
        assert!(SymMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 1.0]]).is_err());
    }

    #[test]
    fn rank_of_dependent_rows() {
        let a = [1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 1.0, 0.0, 1.0];
        assert_eq!(numerical_rank(&a, 3, 3, 1e-12), 2);
    }
}
