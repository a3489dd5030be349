//! Fully nonlinear operators `F(M, p, s, x)` and their algebra.

mod probe;
mod text;

pub use probe::{ellipticity_probe, ProbeConfig, StructureConstants};

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::polynomial::Polynomial;

/// Second-order jet (M, p, s, x) at which an operator is evaluated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Jet {
    pub m: SymMatrix,
    pub p: Vec<f64>,
    pub s: f64,
    pub x: Vec<f64>,
}

impl Jet {
    pub fn new(m: SymMatrix, p: Vec<f64>, s: f64, x: Vec<f64>) -> Result<Self> {
        let n = m.dim();
        if p.len() != n || x.len() != n {
            return Err(Error::InvalidInput(format!(
                "jet components disagree on dimension: |M| is {n}x{n}, p has {}, x has {}",
                p.len(),
                x.len()
            )));
        }
        Ok(Jet { m, p, s, x })
    }

    /// Jet with zero gradient, value and location.
    pub fn hessian(m: SymMatrix) -> Self {
        let n = m.dim();
        Jet {
            m,
            p: vec![0.0; n],
            s: 0.0,
            x: vec![0.0; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    /// Jet of a polynomial at x.
    pub fn of_polynomial(p: &Polynomial, x: &[f64]) -> Self {
        Jet {
            m: p.hessian(x),
            p: p.gradient(x),
            s: p.eval(x),
            x: x.to_vec(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PucciSign {
    Plus,
    Minus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    PucciPlus {
        lambda: f64,
        big_lambda: f64,
    },
    PucciMinus {
        lambda: f64,
        big_lambda: f64,
    },
    /// `tr(A M) + b·p + c s`
    LinearConstant {
        a: SymMatrix,
        b: Vec<f64>,
        c: f64,
    },
    /// `(1/w)(tr M − pᵀMp/w²)`, `w = √(1+|p|²)`
    MeanCurvature,
    MongeAmpere,
    SigmaK {
        k: usize,
    },
    HessianQuotient {
        k: usize,
        l: usize,
    },
    /// `Σ arctan λ_i(M)`
    Lagrangian,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorSpec {
    pub family: Family,
    pub shift: Option<Polynomial>,
    pub offset: f64,
}

impl OperatorSpec {
    pub fn new(family: Family) -> Result<Self> {
        match &family {
            Family::PucciPlus { lambda, big_lambda }
            | Family::PucciMinus { lambda, big_lambda } => {
                check_pucci_params(*lambda, *big_lambda)?
            }
            Family::LinearConstant { a, b, c } => {
                if b.len() != a.dim() {
                    return Err(Error::InvalidInput(format!(
                        "drift has length {} but A is {}x{}",
                        b.len(),
                        a.dim(),
                        a.dim()
                    )));
                }
                if !a.is_finite() || b.iter().any(|v| !v.is_finite()) || !c.is_finite() {
                    return Err(Error::InvalidInput("non-finite coefficient".into()));
                }
            }
            Family::SigmaK { k } => {
                if *k < 1 {
                    return Err(Error::Parameter("sigma_k needs k ≥ 1".into()));
                }
            }
            Family::HessianQuotient { k, l } => {
                if !(1 <= *l && l < k) {
                    return Err(Error::Parameter(format!(
                        "Hessian quotient needs 1 ≤ l < k, got k={k}, l={l}"
                    )));
                }
            }
            _ => {}
        }
        Ok(OperatorSpec {
            family,
            shift: None,
            offset: 0.0,
        })
    }

    /// Dimension fixed by the operator itself, if any.
    pub fn dim_hint(&self) -> Option<usize> {
        match &self.family {
            Family::LinearConstant { a, .. } => Some(a.dim()),
            _ => self.shift.as_ref().map(|p| p.dim()),
        }
    }

    /// Smallest dimension in which the family is defined.
    pub fn min_dim(&self) -> usize {
        match self.family {
            Family::SigmaK { k } => k,
            Family::HessianQuotient { k, .. } => k,
            _ => 1,
        }
    }

    /// Whether `M` lies in the set where the family is elliptic.
    pub fn admissible(&self, m: &SymMatrix) -> Result<bool> {
        let m = match &self.shift {
            Some(p) => m.add(&p.hessian(&vec![0.0; m.dim()])),
            None => m.clone(),
        };
        match self.family {
            Family::MongeAmpere => Ok(m.eigenvalues()?[0] > 0.0),
            Family::SigmaK { k } | Family::HessianQuotient { k, .. } => is_k_admissible(&m, k),
            _ => Ok(true),
        }
    }

    pub fn evaluate(&self, jet: &Jet) -> Result<f64> {
        evaluate(self, jet)
    }

    pub fn shifted(&self, p: &Polynomial, normalize_origin: bool) -> Result<Self> {
        shift(self, p, normalize_origin)
    }
}

fn check_pucci_params(lambda: f64, big_lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda <= big_lambda && big_lambda.is_finite()) {
        return Err(Error::Parameter(format!(
            "Pucci operators need 0 < λ ≤ Λ, got λ={lambda}, Λ={big_lambda}"
        )));
    }
    Ok(())
}

pub fn eigenvalues_sym(m: &SymMatrix) -> Result<Vec<f64>> {
    m.eigenvalues()
}

/// `M⁺ = Λ Σ_{μ>0} μ + λ Σ_{μ<0} μ`, `M⁻` with the weights swapped.
pub fn pucci(m: &SymMatrix, lambda: f64, big_lambda: f64, sign: PucciSign) -> Result<f64> {
    check_pucci_params(lambda, big_lambda)?;
    Ok(pucci_of_eigenvalues(
        &m.eigenvalues()?,
        lambda,
        big_lambda,
        sign,
    ))
}

pub(crate) fn pucci_of_eigenvalues(
    eigs: &[f64],
    lambda: f64,
    big_lambda: f64,
    sign: PucciSign,
) -> f64 {
    let (pos, neg) = match sign {
        PucciSign::Plus => (big_lambda, lambda),
        PucciSign::Minus => (lambda, big_lambda),
    };
    eigs.iter()
        .map(|&e| if e > 0.0 { pos * e } else { neg * e })
        .sum()
}

/// Elementary symmetric polynomial σ_k of the given values.
pub fn sigma(values: &[f64], k: usize) -> f64 {
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for &v in values {
        for j in (1..=k.min(values.len())).rev() {
            e[j] += v * e[j - 1];
        }
    }
    e[k]
}

pub fn is_k_admissible(m: &SymMatrix, k: usize) -> Result<bool> {
    let n = m.dim();
    if k < 1 || k > n {
        return Err(Error::Parameter(format!("k={k} outside 1..={n}")));
    }
    let eigs = m.eigenvalues()?;
    Ok((1..=k).all(|i| sigma(&eigs, i) > 0.0))
}

pub fn evaluate(op: &OperatorSpec, jet: &Jet) -> Result<f64> {
    let n = jet.dim();
    if jet.p.len() != n || jet.x.len() != n {
        return Err(Error::InvalidInput(
            "jet components disagree on dimension".into(),
        ));
    }
    if let Some(d) = op.dim_hint() {
        if d != n {
            return Err(Error::InvalidInput(format!(
                "operator is {d}-dimensional but the jet is {n}-dimensional"
            )));
        }
    }
    let value = match &op.shift {
        None => evaluate_base(&op.family, jet)?,
        Some(p) => {
            let shifted = Jet {
                m: jet.m.add(&p.hessian(&jet.x)),
                p: jet
                    .p
                    .iter()
                    .zip(p.gradient(&jet.x))
                    .map(|(a, b)| a + b)
                    .collect(),
                s: jet.s + p.eval(&jet.x),
                x: jet.x.clone(),
            };
            evaluate_base(&op.family, &shifted)?
        }
    };
    Ok(value - op.offset)
}

fn evaluate_base(family: &Family, jet: &Jet) -> Result<f64> {
    let n = jet.dim();
    let m = &jet.m;
    if !m.is_finite() {
        return Err(Error::InvalidInput("non-finite Hessian entry".into()));
    }
    let need_k = |k: usize| -> Result<()> {
        if k > n {
            Err(Error::Parameter(format!("k={k} exceeds dimension {n}")))
        } else {
            Ok(())
        }
    };
    Ok(match family {
        Family::PucciPlus { lambda, big_lambda } => {
            pucci_of_eigenvalues(&m.eigenvalues()?, *lambda, *big_lambda, PucciSign::Plus)
        }
        Family::PucciMinus { lambda, big_lambda } => {
            pucci_of_eigenvalues(&m.eigenvalues()?, *lambda, *big_lambda, PucciSign::Minus)
        }
        Family::LinearConstant { a, b, c } => {
            a.frobenius_dot(m) + b.iter().zip(&jet.p).map(|(u, v)| u * v).sum::<f64>() + c * jet.s
        }
        Family::MeanCurvature => {
            let q: f64 = jet.p.iter().map(|v| v * v).sum();
            let w2 = 1.0 + q;
            let w = w2.sqrt();
            (m.trace() - m.quad_form(&jet.p) / w2) / w
        }
        Family::MongeAmpere => m.det(),
        Family::SigmaK { k } => {
            need_k(*k)?;
            sigma(&m.eigenvalues()?, *k)
        }
        Family::HessianQuotient { k, l } => {
            need_k(*k)?;
            let eigs = m.eigenvalues()?;
            let den = sigma(&eigs, *l);
            let scale = m.spectral_radius()?.max(1.0).powi(*l as i32);
            if den.abs() <= f64::EPSILON * scale {
                return Err(Error::SingularEvaluation(format!(
                    "sigma_{l} vanishes at this Hessian"
                )));
            }
            sigma(&eigs, *k) / den
        }
        Family::Lagrangian => m.eigenvalues()?.iter().map(|e| e.atan()).sum(),
    })
}

/// `G(M,p,s,x) = F(M + D²P(x), p + DP(x), s + P(x), x) − offset`.
/// With `normalize_origin` the offset is F at the jet of P at the origin,
/// so that G vanishes at the zero jet there.
pub fn shift(op: &OperatorSpec, p: &Polynomial, normalize_origin: bool) -> Result<OperatorSpec> {
    if p.effective_degree() > 2 {
        return Err(Error::Parameter(format!(
            "shift polynomial has degree {} (at most 2 allowed)",
            p.effective_degree()
        )));
    }
    if let Some(d) = op.dim_hint() {
        if d != p.dim() {
            return Err(Error::InvalidInput(format!(
                "shift polynomial is {}-dimensional, operator is {d}-dimensional",
                p.dim()
            )));
        }
    }
    let p2 = p.with_degree(2)?;
    let combined = match &op.shift {
        Some(q) => q.add(&p2),
        None => p2.clone(),
    };
    let mut out = OperatorSpec {
        family: op.family.clone(),
        shift: Some(combined),
        offset: op.offset,
    };
    if normalize_origin {
        let origin = vec![0.0; p.dim()];
        out.offset += op.evaluate(&Jet::of_polynomial(&p2, &origin))?;
    }
    Ok(out)
}

/// Critical value of the Lagrangian phase in dimension n.
pub fn lagrangian_critical_phase(n: usize) -> f64 {
    (n as f64 - 2.0) * FRAC_PI_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn op(f: Family) -> OperatorSpec {
        OperatorSpec::new(f).unwrap()
    }

    #[test]
    fn pucci_examples() {
        let m = SymMatrix::from_diag(&[1.0, -1.0]);
        assert_eq!(pucci(&m, 1.0, 2.0, PucciSign::Plus).unwrap(), 1.0);
        assert_eq!(pucci(&m, 1.0, 2.0, PucciSign::Minus).unwrap(), -1.0);
        assert!(pucci(&m, 0.0, 2.0, PucciSign::Plus).is_err());
        assert!(pucci(&m, 3.0, 2.0, PucciSign::Plus).is_err());
    }

    #[test]
    fn family_values() {
        let jet = Jet::hessian(SymMatrix::identity(2));
        assert_eq!(op(Family::MeanCurvature).evaluate(&jet).unwrap(), 2.0);
        let l = op(Family::Lagrangian).evaluate(&jet).unwrap();
        assert!((l - FRAC_PI_2).abs() < 1e-15);
        let d = Jet::hessian(SymMatrix::from_diag(&[1.0, 2.0, 3.0]));
        assert!((op(Family::SigmaK { k: 2 }).evaluate(&d).unwrap() - 11.0).abs() < 1e-12);
    }

    #[test]
    fn quotient_singular() {
        let q = op(Family::HessianQuotient { k: 2, l: 1 });
        let jet = Jet::hessian(SymMatrix::from_diag(&[1.0, -1.0]));
        assert!(matches!(
            q.evaluate(&jet),
            Err(Error::SingularEvaluation(_))
        ));
    }

    #[test]
    fn admissibility() {
        let id = SymMatrix::identity(3);
        assert!(is_k_admissible(&id, 3).unwrap());
        assert!(!is_k_admissible(&SymMatrix::from_diag(&[1.0, 1.0, -0.5]), 2).unwrap());
        assert!(is_k_admissible(&SymMatrix::from_diag(&[2.0, -0.1, -0.1]), 1).unwrap());
        assert!(is_k_admissible(&id, 4).is_err());
    }

    #[test]
    fn shift_normalization() {
        let half = Polynomial::quadratic(&SymMatrix::identity(2), &[0.0, 0.0], 0.0);
        let g = op(Family::MongeAmpere).shifted(&half, true).unwrap();
        assert_eq!(g.offset, 1.0);
        assert_eq!(g.evaluate(&Jet::hessian(SymMatrix::zeros(2))).unwrap(), 0.0);
        let cubic = Polynomial::from_terms(1, 3, &[(vec![3], 1.0)]).unwrap();
        assert!(op(Family::Lagrangian).shifted(&cubic, false).is_err());
    }

    #[test]
    fn bad_parameters() {
        assert!(OperatorSpec::new(Family::HessianQuotient { k: 1, l: 1 }).is_err());
        assert!(OperatorSpec::new(Family::SigmaK { k: 0 }).is_err());
        let s = op(Family::SigmaK { k: 3 });
        assert!(s.evaluate(&Jet::hessian(SymMatrix::identity(2))).is_err());
    }
}
