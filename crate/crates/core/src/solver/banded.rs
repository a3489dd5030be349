//! Banded LU without pivoting, for the diagonally dominant matrices that
//! monotone finite-difference schemes produce.

use crate::error::{Error, Result};

#[derive(Clone)]
pub(crate) struct Banded {
    n: usize,
    lower: usize,
    upper: usize,
    width: usize,
    data: Vec<f64>,
}

impl Banded {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        let width = lower + upper + 1;
        Banded {
            n,
            lower,
            upper,
            width,
            data: vec![0.0; n * width],
        }
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.lower >= i && j <= i + self.upper);
        i * self.width + (j + self.lower - i)
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j);
        self.data[s] += v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.lower);
                let hi = (i + self.upper).min(self.n - 1);
                (lo..=hi).map(|j| self.data[self.slot(i, j)] * x[j]).sum()
            })
            .collect()
    }

    /// In-place LU factorization; consumes the matrix.
    pub fn factor(mut self) -> Result<BandedLu> {
        let n = self.n;
        let scale = self.data.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for k in 0..n {
            let pivot = self.data[self.slot(k, k)];
            if pivot.abs() <= 1e-14 * scale {
                return Err(Error::Rank(format!(
                    "zero pivot in row {k} of the scheme matrix"
                )));
            }
            let imax = (k + self.lower).min(n - 1);
            let jmax = (k + self.upper).min(n - 1);
            for i in k + 1..=imax {
                let sik = self.slot(i, k);
                let l = self.data[sik] / pivot;
                if l == 0.0 {
                    continue;
                }
                self.data[sik] = l;
                let base_i = i * self.width + self.lower - i;
                let base_k = k * self.width + self.lower - k;
                for j in k + 1..=jmax {
                    self.data[base_i + j] -= l * self.data[base_k + j];
                }
            }
        }
        Ok(BandedLu { m: self })
    }
}

pub(crate) struct BandedLu {
    m: Banded,
}

impl BandedLu {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let a = &self.m;
        let n = a.n;
        let mut x = b.to_vec();
        for i in 0..n {
            let lo = i.saturating_sub(a.lower);
            let mut s = x[i];
            for j in lo..i {
                s -= a.data[a.slot(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let hi = (i + a.upper).min(n - 1);
            let mut s = x[i];
            for j in i + 1..=hi {
                s -= a.data[a.slot(i, j)] * x[j];
            }
            x[i] = s / a.data[a.slot(i, i)];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_solve() {
        let n = 50;
        let mut a = Banded::zeros(n, 1, 1);
        for i in 0..n {
            a.add(i, i, -2.0);
            if i > 0 {
                a.add(i, i - 1, 1.0);
            }
            if i + 1 < n {
                a.add(i, i + 1, 1.0);
            }
        }
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
        let b = a.mul_vec(&x);
        let lu = a.factor().unwrap();
        let y = lu.solve(&b);
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() < 1e-12);
        }
    }
}
