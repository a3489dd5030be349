//! Multivariate polynomials of bounded total degree in the normalized
//! multi-index form `P(x) = Σ_{|σ|≤k} a_σ/σ! x^σ`, so that `a_σ = D^σ P(0)`.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;

pub type MultiIndex = Vec<u32>;

/// All multi-indices with `|σ| ≤ degree`, graded by total degree and
/// lexicographically descending within a degree (`x1` varies slowest).
pub fn multi_indices(dim: usize, degree: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for total in 0..=degree {
        let mut current = vec![0u32; dim];
        fill(dim, 0, total as u32, &mut current, &mut out);
    }
    out
}

fn fill(dim: usize, pos: usize, remaining: u32, cur: &mut MultiIndex, out: &mut Vec<MultiIndex>) {
    if dim == 0 {
        if remaining == 0 {
            out.push(cur.clone());
        }
        return;
    }
    if pos == dim - 1 {
        cur[pos] = remaining;
        out.push(cur.clone());
        cur[pos] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        cur[pos] = e;
        fill(dim, pos + 1, remaining - e, cur, out);
    }
    cur[pos] = 0;
}

/// Number of monomials of degree ≤ k in n variables, C(n+k, k).
pub fn basis_size(dim: usize, degree: usize) -> usize {
    let mut c = 1usize;
    for i in 1..=degree {
        c = c * (dim + i) / i;
    }
    c
}

pub fn sigma_factorial(sigma: &[u32]) -> f64 {
    sigma
        .iter()
        .map(|&s| (1..=s).map(f64::from).product::<f64>())
        .product()
}

fn total(sigma: &[u32]) -> u32 {
    sigma.iter().sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    dim: usize,
    degree: usize,
    indices: Vec<MultiIndex>,
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn zero(dim: usize, degree: usize) -> Self {
        let indices = multi_indices(dim, degree);
        let coeffs = vec![0.0; indices.len()];
        Polynomial {
            dim,
            degree,
            indices,
            coeffs,
        }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let mut p = Self::zero(dim, 0);
        p.coeffs[0] = c;
        p
    }

    /// `c + b·x + ½ xᵀ A x`
    pub fn quadratic(a: &SymMatrix, b: &[f64], c: f64) -> Self {
        let n = a.dim();
        let mut p = Self::zero(n, 2);
        for (k, sigma) in p.indices.clone().iter().enumerate() {
            let nz: Vec<usize> = (0..n).filter(|&i| sigma[i] > 0).collect();
            p.coeffs[k] = match (total(sigma), nz.as_slice()) {
                (0, _) => c,
                (1, [i]) => b[*i],
                (2, [i]) => a.get(*i, *i),
                (2, [i, j]) => a.get(*i, *j),
                _ => 0.0,
            };
        }
        p
    }

    pub fn from_terms(dim: usize, degree: usize, terms: &[(MultiIndex, f64)]) -> Result<Self> {
        let mut p = Self::zero(dim, degree);
        for (sigma, a) in terms {
            p.set_coeff(sigma, *a)?;
        }
        Ok(p)
    }

    /// Coefficients aligned with [`multi_indices`]`(dim, degree)`.
    pub fn from_coeffs(dim: usize, degree: usize, coeffs: Vec<f64>) -> Result<Self> {
        let indices = multi_indices(dim, degree);
        if coeffs.len() != indices.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} coefficients, got {}",
                indices.len(),
                coeffs.len()
            )));
        }
        Ok(Polynomial {
            dim,
            degree,
            indices,
            coeffs,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    fn position(&self, sigma: &[u32]) -> Option<usize> {
        self.indices.iter().position(|s| s.as_slice() == sigma)
    }

    pub fn coeff(&self, sigma: &[u32]) -> f64 {
        self.position(sigma).map_or(0.0, |k| self.coeffs[k])
    }

    pub fn set_coeff(&mut self, sigma: &[u32], a: f64) -> Result<()> {
        if sigma.len() != self.dim {
            return Err(Error::InvalidInput(format!(
                "multi-index {sigma:?} has wrong length for dimension {}",
                self.dim
            )));
        }
        let k = self.position(sigma).ok_or_else(|| {
            Error::InvalidInput(format!(
                "multi-index {sigma:?} exceeds degree {}",
                self.degree
            ))
        })?;
        self.coeffs[k] = a;
        Ok(())
    }

    /// Actual degree: the largest |σ| with a nonzero coefficient (0 for P = 0).
    pub fn effective_degree(&self) -> usize {
        self.indices
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, a)| **a != 0.0)
            .map(|(s, _)| total(s) as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        // powers[i][e] = x_i^e / e!
        let powers: Vec<Vec<f64>> = x
            .iter()
            .map(|&xi| {
                let mut row = Vec::with_capacity(self.degree + 1);
                let mut acc = 1.0;
                row.push(acc);
                for e in 1..=self.degree {
                    acc *= xi / e as f64;
                    row.push(acc);
                }
                row
            })
            .collect();
        self.indices
            .iter()
            .zip(&self.coeffs)
            .map(|(sigma, a)| {
                if *a == 0.0 {
                    return 0.0;
                }
                a * sigma
                    .iter()
                    .enumerate()
                    .map(|(i, &s)| powers[i][s as usize])
                    .product::<f64>()
            })
            .sum()
    }

    /// D^τ P; coefficients shift as `a_σ ↦ a_{σ+τ}`.
    pub fn derivative(&self, tau: &[u32]) -> Polynomial {
        let t = total(tau) as usize;
        let degree = self.degree.saturating_sub(t);
        let mut out = Polynomial::zero(self.dim, degree);
        if t > self.degree {
            return out;
        }
        for (k, sigma) in out.indices.clone().iter().enumerate() {
            let shifted: MultiIndex = sigma.iter().zip(tau).map(|(s, t)| s + t).collect();
            out.coeffs[k] = self.coeff(&shifted);
        }
        out
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| {
                let mut tau = vec![0u32; self.dim];
                tau[i] = 1;
                self.derivative(&tau).eval(x)
            })
            .collect()
    }

    pub fn hessian(&self, x: &[f64]) -> SymMatrix {
        SymMatrix::from_fn(self.dim, |i, j| {
            let mut tau = vec![0u32; self.dim];
            tau[i] += 1;
            tau[j] += 1;
            self.derivative(&tau).eval(x)
        })
    }

    /// ‖P‖_r = Σ r^{|σ|} |a_σ|
    pub fn norm(&self, r: f64) -> f64 {
        self.indices
            .iter()
            .zip(&self.coeffs)
            .map(|(s, a)| r.powi(total(s) as i32) * a.abs())
            .sum()
    }

    /// Re-expresses P in a space of (possibly larger) degree. Truncation is
    /// refused unless the dropped coefficients vanish.
    pub fn with_degree(&self, degree: usize) -> Result<Polynomial> {
        if degree < self.effective_degree() {
            return Err(Error::Parameter(format!(
                "cannot represent a degree-{} polynomial in degree {degree}",
                self.effective_degree()
            )));
        }
        let mut out = Polynomial::zero(self.dim, degree);
        for (sigma, a) in self.indices.iter().zip(&self.coeffs) {
            if total(sigma) as usize <= degree {
                out.set_coeff(sigma, *a)?;
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        debug_assert_eq!(self.dim, other.dim);
        let degree = self.degree.max(other.degree);
        let mut out = Polynomial::zero(self.dim, degree);
        for (k, sigma) in out.indices.clone().iter().enumerate() {
            out.coeffs[k] = self.coeff(sigma) + other.coeff(sigma);
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, c: f64) -> Polynomial {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|a| *a *= c);
        out
    }

    /// x ↦ P(c·x)
    pub fn dilate(&self, c: f64) -> Polynomial {
        let mut out = self.clone();
        for (sigma, a) in out.indices.iter().zip(out.coeffs.iter_mut()) {
            *a *= c.powi(total(sigma) as i32);
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct Term {
    sigma: MultiIndex,
    a: f64,
}

#[derive(Serialize, Deserialize)]
struct PolynomialRepr {
    dim: usize,
    degree: usize,
    terms: Vec<Term>,
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolynomialRepr {
            dim: self.dim,
            degree: self.degree,
            terms: self
                .indices
                .iter()
                .zip(&self.coeffs)
                .map(|(sigma, a)| Term {
                    sigma: sigma.clone(),
                    a: *a,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = PolynomialRepr::deserialize(d)?;
        let terms: Vec<(MultiIndex, f64)> =
            repr.terms.into_iter().map(|t| (t.sigma, t.a)).collect();
        Polynomial::from_terms(repr.dim, repr.degree, &terms).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_order_and_size() {
        let idx = multi_indices(2, 2);
        assert_eq!(
            idx,
            vec![
                vec![0, 0],
                vec![1, 0],
                vec![0, 1],
                vec![2, 0],
                vec![1, 1],
                vec![0, 2]
            ]
        );
        for n in 1..4 {
            for k in 0..5 {
                assert_eq!(multi_indices(n, k).len(), basis_size(n, k));
            }
        }
    }

    #[test]
    fn x1_squared_with_factorial_convention() {
        let p = Polynomial::from_terms(2, 2, &[(vec![2, 0], 2.0)]).unwrap();
        assert_eq!(p.eval(&[3.0, 0.0]), 9.0);
        assert_eq!(Polynomial::zero(3, 2).eval(&[1.0, 2.0, 3.0]), 0.0);
    }

    #[test]
    fn norm_with_radius() {
        let p = Polynomial::from_terms(1, 1, &[(vec![0], 1.0), (vec![1], 1.0)]).unwrap();
        assert_eq!(p.norm(2.0), 3.0);
        assert_eq!(p.norm(1.0), 2.0);
    }

    #[test]
    fn derivative_shifts_coefficients() {
        let p = Polynomial::from_coeffs(2, 3, (0..10).map(|i| i as f64 + 1.0).collect()).unwrap();
        let d = p.derivative(&[1, 1]);
        assert_eq!(d.degree(), 1);
        assert_eq!(d.coeff(&[0, 0]), p.coeff(&[1, 1]));
        assert_eq!(d.coeff(&[1, 0]), p.coeff(&[2, 1]));
        assert_eq!(d.coeff(&[0, 1]), p.coeff(&[1, 2]));
    }

    #[test]
    fn quadratic_round_trip_through_derivatives() {
        let a = SymMatrix::from_rows(&[vec![1.0, 0.5], vec![0.5, 3.0]]).unwrap();
        let p = Polynomial::quadratic(&a, &[2.0, -1.0], 0.25);
        assert_eq!(p.hessian(&[0.3, -0.7]), a);
        let g = p.gradient(&[0.0, 0.0]);
        assert_eq!(g, vec![2.0, -1.0]);
        let x = [0.3, -0.7];
        let direct = 0.25 + 2.0 * x[0] - x[1] + 0.5 * a.quad_form(&x);
        assert!((p.eval(&x) - direct).abs() < 1e-15);
    }

    #[test]
    fn truncation_refused() {
        let p = Polynomial::from_terms(1, 2, &[(vec![2], 1.0)]).unwrap();
        assert!(p.with_degree(1).is_err());
        assert_eq!(p.with_degree(3).unwrap().coeff(&[2]), 1.0);
    }

    #[test]
    fn json_shape() {
        let p = Polynomial::from_terms(1, 1, &[(vec![1], 2.5)]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(
            s,
            r#"{"dim":1,"degree":1,"terms":[{"sigma":[0],"a":0.0},{"sigma":[1],"a":2.5}]}"#
        );
        let back: Polynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
