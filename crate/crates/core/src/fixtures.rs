//! Closed-form solutions with analytic derivatives: the explicit irregular
//! solutions of the mean curvature, Hessian quotient and special Lagrangian
//! equations, plus smooth calibration functions.

use std::f64::consts::FRAC_PI_4;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::operators::{Family, OperatorSpec};
use crate::polyfit::{ball_lattice, BallSampler, Samples};
use crate::polynomial::Polynomial;

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    /// −(1−|x|)^θ inside the unit ball, (|x|−1)^θ outside.
    Pmc {
        theta: f64,
    },
    /// ½|x'|² + |x_n|^{1+θ}/(1+θ) for σ_k/σ_l.
    Hq {
        theta: f64,
        k: usize,
        l: usize,
    },
    /// |x₁|^{1+θ}/(1+θ) + x₂²/2
    Slag {
        theta: f64,
    },
    Quadratic(Polynomial),
    /// |x|^β
    Power {
        beta: f64,
    },
    Harmonic(Polynomial),
    /// exp(|x|²/2)
    MaExp,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticFunction {
    label: String,
    dim: usize,
    kind: Kind,
    operator: Option<OperatorSpec>,
}

/// A regularity statement attached to a fixture.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Claim {
    pub fixture: String,
    pub where_: String,
    /// Representative points of the claimed set.
    pub points: Vec<Vec<f64>>,
    pub k: usize,
    /// `None` for polynomials (exact at every order).
    pub alpha: Option<f64>,
    pub statement: String,
}

fn param_range(name: &str, theta: f64, lo: f64, hi: f64, why: &str) -> Result<()> {
    if theta > lo && theta < hi {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "{name} needs {lo} < θ < {hi}, got {theta} ({why})"
        )))
    }
}

fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl AnalyticFunction {
    pub fn pmc(theta: f64, dim: usize) -> Result<Self> {
        param_range(
            "pmc",
            theta,
            0.0,
            0.5,
            "the mean curvature of the graph is Hölder only in this range",
        )?;
        if dim < 1 {
            return Err(Error::Parameter("pmc needs dimension ≥ 1".into()));
        }
        Ok(AnalyticFunction {
            label: format!("pmc:{theta}"),
            dim,
            kind: Kind::Pmc { theta },
            operator: Some(OperatorSpec::new(Family::MeanCurvature)?),
        })
    }

    pub fn hq(theta: f64, dim: usize, k: usize, l: usize) -> Result<Self> {
        param_range("hq", theta, 0.0, 1.0, "the solution is C^{1,θ} with θ < 1")?;
        if !(1 <= l && l < k && k <= dim) {
            return Err(Error::Parameter(format!(
                "hq needs 1 ≤ l < k ≤ n, got k={k}, l={l}, n={dim}"
            )));
        }
        Ok(AnalyticFunction {
            label: format!("hq:{theta}"),
            dim,
            kind: Kind::Hq { theta, k, l },
            operator: Some(OperatorSpec::new(Family::HessianQuotient { k, l })?),
        })
    }

    pub fn slag(theta: f64) -> Result<Self> {
        param_range(
            "slag",
            theta,
            0.0,
            1.0,
            "the solution is C^{1,θ} with θ < 1",
        )?;
        Ok(AnalyticFunction {
            label: format!("slag:{theta}"),
            dim: 2,
            kind: Kind::Slag { theta },
            operator: Some(OperatorSpec::new(Family::Lagrangian)?),
        })
    }

    /// `c + b·x + ½xᵀAx`, paired with the Monge-Ampère operator.
    pub fn quadratic(a: &SymMatrix, b: &[f64], c: f64) -> Result<Self> {
        if b.len() != a.dim() {
            return Err(Error::InvalidInput(
                "quadratic: b and A disagree on dimension".into(),
            ));
        }
        Ok(AnalyticFunction {
            label: "quadratic".into(),
            dim: a.dim(),
            kind: Kind::Quadratic(Polynomial::quadratic(a, b, c)),
            operator: Some(OperatorSpec::new(Family::MongeAmpere)?),
        })
    }

    pub fn power(beta: f64, dim: usize) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::Parameter(format!("power needs β > 0, got {beta}")));
        }
        Ok(AnalyticFunction {
            label: format!("power:{beta}"),
            dim,
            kind: Kind::Power { beta },
            operator: Some(laplacian(dim)?),
        })
    }

    /// Re(x₁ + i x₂)^d for d ∈ {2, 3}.
    pub fn harmonic(degree: usize) -> Result<Self> {
        let p = match degree {
            2 => Polynomial::from_terms(2, 2, &[(vec![2, 0], 2.0), (vec![0, 2], -2.0)])?,
            3 => Polynomial::from_terms(2, 3, &[(vec![3, 0], 6.0), (vec![1, 2], -6.0)])?,
            _ => {
                return Err(Error::Parameter(format!(
                    "harmonic fixtures exist for degree 2 and 3, got {degree}"
                )))
            }
        };
        Ok(AnalyticFunction {
            label: format!("harmonic:{degree}"),
            dim: 2,
            kind: Kind::Harmonic(p),
            operator: Some(laplacian(2)?),
        })
    }

    pub fn maexp() -> Result<Self> {
        Ok(AnalyticFunction {
            label: "maexp".into(),
            dim: 2,
            kind: Kind::MaExp,
            operator: Some(OperatorSpec::new(Family::MongeAmpere)?),
        })
    }

    pub fn name(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operator(&self) -> Option<&OperatorSpec> {
        self.operator.as_ref()
    }

    pub fn as_polynomial(&self) -> Option<&Polynomial> {
        match &self.kind {
            Kind::Quadratic(p) | Kind::Harmonic(p) => Some(p),
            _ => None,
        }
    }

    /// Distance from x to the set where the fixture is not twice differentiable.
    pub fn singular_distance(&self, x: &[f64]) -> f64 {
        let r = norm(x);
        match &self.kind {
            Kind::Pmc { .. } => r.min((r - 1.0).abs()),
            Kind::Hq { .. } => x[self.dim - 1].abs(),
            Kind::Slag { .. } => x[0].abs(),
            Kind::Power { beta } => {
                if is_even_integer(*beta) {
                    f64::INFINITY
                } else {
                    r
                }
            }
            _ => f64::INFINITY,
        }
    }

    pub fn is_singular(&self, x: &[f64]) -> bool {
        self.singular_distance(x) == 0.0
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.kind {
            Kind::Pmc { theta } => {
                let r = norm(x);
                if r <= 1.0 {
                    -(1.0 - r).powf(*theta)
                } else {
                    (r - 1.0).powf(*theta)
                }
            }
            Kind::Hq { theta, .. } => {
                let n = self.dim;
                0.5 * x[..n - 1].iter().map(|v| v * v).sum::<f64>()
                    + x[n - 1].abs().powf(1.0 + theta) / (1.0 + theta)
            }
            Kind::Slag { theta } => {
                x[0].abs().powf(1.0 + theta) / (1.0 + theta) + 0.5 * x[1] * x[1]
            }
            Kind::Quadratic(p) | Kind::Harmonic(p) => p.eval(x),
            Kind::Power { beta } => norm(x).powf(*beta),
            Kind::MaExp => (0.5 * norm2(x)).exp(),
        }
    }

    /// Radial profile derivatives (u'(r), u''(r)) for radial fixtures.
    fn radial(&self, r: f64) -> Option<(f64, f64)> {
        match &self.kind {
            Kind::Pmc { theta } => {
                let t = *theta;
                Some(if r < 1.0 {
                    let s = 1.0 - r;
                    (t * s.powf(t - 1.0), t * (1.0 - t) * s.powf(t - 2.0))
                } else {
                    let s = r - 1.0;
                    (t * s.powf(t - 1.0), t * (t - 1.0) * s.powf(t - 2.0))
                })
            }
            Kind::Power { beta } => {
                let b = *beta;
                Some((b * r.powf(b - 1.0), b * (b - 1.0) * r.powf(b - 2.0)))
            }
            _ => None,
        }
    }

    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim;
        match &self.kind {
            Kind::Pmc { .. } | Kind::Power { .. } => {
                let r = norm(x);
                if r == 0.0 {
                    return vec![0.0; n];
                }
                let (d1, _) = self.radial(r).unwrap();
                x.iter().map(|v| d1 * v / r).collect()
            }
            Kind::Hq { theta, .. } => {
                let mut g = x.to_vec();
                g[n - 1] = x[n - 1].signum() * x[n - 1].abs().powf(*theta);
                g
            }
            Kind::Slag { theta } => vec![x[0].signum() * x[0].abs().powf(*theta), x[1]],
            Kind::Quadratic(p) | Kind::Harmonic(p) => p.gradient(x),
            Kind::MaExp => {
                let e = (0.5 * norm2(x)).exp();
                x.iter().map(|v| e * v).collect()
            }
        }
    }

    pub fn hess(&self, x: &[f64]) -> SymMatrix {
        let n = self.dim;
        match &self.kind {
            Kind::Pmc { .. } | Kind::Power { .. } => {
                let r = norm(x);
                if r == 0.0 {
                    return SymMatrix::zeros(n);
                }
                let (d1, d2) = self.radial(r).unwrap();
                SymMatrix::from_fn(n, |i, j| {
                    let xx = x[i] * x[j] / (r * r);
                    let delta = if i == j { 1.0 } else { 0.0 };
                    d2 * xx + d1 / r * (delta - xx)
                })
            }
            Kind::Hq { theta, .. } => {
                let mut d = vec![1.0; n];
                d[n - 1] = theta * x[n - 1].abs().powf(theta - 1.0);
                SymMatrix::from_diag(&d)
            }
            Kind::Slag { theta } => {
                SymMatrix::from_diag(&[theta * x[0].abs().powf(theta - 1.0), 1.0])
            }
            Kind::Quadratic(p) | Kind::Harmonic(p) => p.hessian(x),
            Kind::MaExp => {
                let e = (0.5 * norm2(x)).exp();
                SymMatrix::from_fn(n, |i, j| e * (x[i] * x[j] + if i == j { 1.0 } else { 0.0 }))
            }
        }
    }

    /// Right-hand side f of the fixture's equation, in closed form.
    pub fn rhs(&self, x: &[f64]) -> Option<f64> {
        let n = self.dim as f64;
        Some(match &self.kind {
            Kind::Pmc { .. } => {
                let r = norm(x);
                if r == 0.0 {
                    return None;
                }
                if r == 1.0 {
                    // Limit of both one-sided expressions.
                    return Some(n - 1.0);
                }
                let (d1, d2) = self.radial(r).unwrap();
                let w = (1.0 + d1 * d1).sqrt();
                d2 / (w * w * w) + (n - 1.0) * d1 / (r * w)
            }
            Kind::Hq { theta, k, l } => {
                let m = self.dim - 1;
                let t = x[self.dim - 1].abs();
                if t == 0.0 {
                    return Some(binom(m, k - 1) / binom(m, l - 1));
                }
                let mu = theta * t.powf(theta - 1.0);
                (binom(m, *k) + mu * binom(m, k - 1)) / (binom(m, *l) + mu * binom(m, l - 1))
            }
            Kind::Slag { theta } => 3.0 * FRAC_PI_4 - (x[0].abs().powf(1.0 - theta) / theta).atan(),
            Kind::Quadratic(p) => p.hessian(x).det(),
            Kind::Harmonic(_) => 0.0,
            Kind::Power { beta } => {
                let r = norm(x);
                if r == 0.0 && !is_even_integer(*beta) {
                    return None;
                }
                beta * (beta + n - 2.0) * r.powf(beta - 2.0)
            }
            Kind::MaExp => {
                let r2 = norm2(x);
                (1.0 + r2) * r2.exp()
            }
        })
    }

    /// Supercritical margin inf min(nπ/2 − f, f + nπ/2) of the Lagrangian
    /// fixture's right-hand side.
    pub fn epsilon_f(&self) -> Option<f64> {
        match self.kind {
            // f ranges over (π/4, 3π/4], so the infimum sits at x₁ = 0.
            Kind::Slag { .. } => Some(std::f64::consts::PI - 3.0 * FRAC_PI_4),
            _ => None,
        }
    }

    pub fn claims(&self) -> Vec<Claim> {
        let fixture = self.label.clone();
        match &self.kind {
            Kind::Pmc { theta } => vec![Claim {
                fixture,
                where_: "unit sphere |x| = 1".into(),
                points: (0..8)
                    .map(|j| {
                        let a = j as f64 * std::f64::consts::PI / 4.0;
                        let mut p = vec![0.0; self.dim];
                        p[0] = a.cos();
                        if self.dim > 1 {
                            p[1] = a.sin();
                        }
                        p
                    })
                    .collect(),
                k: 0,
                alpha: Some(*theta),
                statement: "viscosity solution of the mean curvature equation with Hölder \
                            right-hand side that is only C^θ across the unit sphere"
                    .into(),
            }],
            Kind::Hq { theta, .. } => vec![Claim {
                fixture,
                where_: "origin".into(),
                points: vec![vec![0.0; self.dim]],
                k: 1,
                alpha: Some(*theta),
                statement: "Hessian quotient solution that is C^{1,θ} and no better".into(),
            }],
            Kind::Slag { theta } => vec![Claim {
                fixture,
                where_: "origin".into(),
                points: vec![vec![0.0; 2]],
                k: 1,
                alpha: Some(*theta),
                statement: "special Lagrangian solution that is C^{1,θ} at the origin only".into(),
            }],
            Kind::Quadratic(_) | Kind::Harmonic(_) => vec![Claim {
                fixture,
                where_: "any point".into(),
                points: vec![vec![0.0; self.dim]],
                k: 2,
                alpha: None,
                statement: "polynomial: exact at every scale".into(),
            }],
            Kind::Power { beta } => {
                let k = beta.floor().max(0.0) as usize;
                let frac = beta - k as f64;
                vec![Claim {
                    fixture,
                    where_: "origin".into(),
                    points: vec![vec![0.0; self.dim]],
                    k,
                    alpha: if frac > 0.0 { Some(frac) } else { None },
                    statement: "radial power".into(),
                }]
            }
            Kind::MaExp => Vec::new(),
        }
    }
}

fn laplacian(n: usize) -> Result<OperatorSpec> {
    OperatorSpec::new(Family::LinearConstant {
        a: SymMatrix::identity(n),
        b: vec![0.0; n],
        c: 0.0,
    })
}

fn is_even_integer(b: f64) -> bool {
    b.fract() == 0.0 && (b as i64) % 2 == 0
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn norm(x: &[f64]) -> f64 {
    norm2(x).sqrt()
}

/// Builds a fixture from its `name[:param]` form, e.g. `slag:0.4`, `pmc:0.3`,
/// `hq:0.5`, `power:1.5`, `harmonic:3`, `quadratic`, `quadratic:1,0;0,4`, `maexp`.
pub fn fixture(spec: &str) -> Result<AnalyticFunction> {
    let (name, param) = match spec.split_once(':') {
        Some((a, b)) => (a.trim(), Some(b.trim())),
        None => (spec.trim(), None),
    };
    let theta = || -> Result<f64> {
        param
            .ok_or_else(|| Error::Parse(format!("{name} needs a parameter, e.g. {name}:0.3")))?
            .parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad parameter in {spec:?}")))
    };
    match name {
        "pmc" => AnalyticFunction::pmc(theta()?, 2),
        "hq" => AnalyticFunction::hq(theta()?, 3, 2, 1),
        "slag" => AnalyticFunction::slag(theta()?),
        "power" => AnalyticFunction::power(theta()?, 2),
        "harmonic" => AnalyticFunction::harmonic(theta()? as usize),
        "maexp" => AnalyticFunction::maexp(),
        "quadratic" => match param {
            None => AnalyticFunction::quadratic(&SymMatrix::identity(2), &[0.0, 0.0], 0.0),
            Some(rows) => {
                let rows: Vec<Vec<f64>> = rows
                    .split(';')
                    .map(|r| {
                        r.split(',')
                            .map(|v| {
                                v.trim()
                                    .parse::<f64>()
                                    .map_err(|_| Error::Parse(format!("bad matrix entry {v:?}")))
                            })
                            .collect::<Result<Vec<f64>>>()
                    })
                    .collect::<Result<_>>()?;
                let a = SymMatrix::from_rows(&rows)?;
                let n = a.dim();
                AnalyticFunction::quadratic(&a, &vec![0.0; n], 0.0)
            }
        },
        other => Err(Error::Parse(format!("unknown fixture {other:?}"))),
    }
}

/// Names accepted by [`fixture`], with their parameter ranges.
pub fn fixture_names() -> Vec<(&'static str, &'static str)> {
    vec![
        (
            "pmc:θ",
            "0 < θ < 1/2; mean curvature, C^θ across |x| = 1 (n = 2)",
        ),
        ("hq:θ", "0 < θ < 1; σ₂/σ₁ in n = 3, C^{1,θ} at the origin"),
        (
            "slag:θ",
            "0 < θ < 1; Lagrangian phase, C^{1,θ} at the origin",
        ),
        (
            "quadratic[:A]",
            "½xᵀAx with Monge-Ampère right-hand side det A",
        ),
        ("power:β", "|x|^β with Laplacian right-hand side"),
        ("harmonic:d", "Re (x₁ + i x₂)^d, d ∈ {2, 3}"),
        ("maexp", "exp(|x|²/2) with Monge-Ampère right-hand side"),
    ]
}

/// Regularity claims driving the acceptance checks.
pub fn fixture_claims() -> Vec<Claim> {
    let mut out = Vec::new();
    for spec in ["pmc:0.3", "hq:0.5", "slag:0.4", "quadratic"] {
        out.extend(fixture(spec).expect("built-in fixture").claims());
    }
    out
}

/// Samples a fixture on ball lattices with 2m+1 points per axis.
pub struct FixtureSampler<'a> {
    pub fixture: &'a AnalyticFunction,
    pub m: usize,
}

impl BallSampler for FixtureSampler<'_> {
    fn dim(&self) -> usize {
        self.fixture.dim()
    }

    fn sample_ball(&self, x0: &[f64], radius: f64) -> Samples {
        let points = ball_lattice(x0, radius, self.m);
        let values = points.iter().map(|x| self.fixture.eval(x)).collect();
        Samples { points, values }
    }

    fn spacing(&self) -> Option<f64> {
        None
    }

    fn value_at(&self, x: &[f64]) -> Option<f64> {
        Some(self.fixture.eval(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_ranges() {
        assert!(fixture("pmc:0.5").is_err());
        assert!(fixture("pmc:0.0").is_err());
        assert!(fixture("slag:1.0").is_err());
        assert!(fixture("hq:0.3").is_ok());
        assert!(fixture("nonsense").is_err());
        assert!(fixture("slag").is_err());
    }

    #[test]
    fn quadratic_rhs() {
        let q = fixture("quadratic").unwrap();
        assert_eq!(q.rhs(&[0.3, 0.1]), Some(1.0));
    }

    #[test]
    fn slag_margin() {
        let s = fixture("slag:0.4").unwrap();
        assert!((s.epsilon_f().unwrap() - FRAC_PI_4).abs() < 1e-15);
        assert!((s.rhs(&[0.0, 0.3]).unwrap() - 3.0 * FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn pmc_continuity_at_sphere() {
        let p = fixture("pmc:0.3").unwrap();
        assert_eq!(p.eval(&[1.0, 0.0]), 0.0);
        assert!(p.eval(&[0.99, 0.0]) < 0.0);
        assert!(p.eval(&[1.01, 0.0]) > 0.0);
        assert_eq!(p.rhs(&[0.0, 1.0]), Some(1.0));
    }

    #[test]
    fn claims_table() {
        let claims = fixture_claims();
        let pmc = claims.iter().find(|c| c.fixture == "pmc:0.3").unwrap();
        assert_eq!((pmc.k, pmc.alpha), (0, Some(0.3)));
        let slag = claims.iter().find(|c| c.fixture == "slag:0.4").unwrap();
        assert_eq!((slag.k, slag.alpha), (1, Some(0.4)));
        assert!(claims
            .iter()
            .any(|c| c.fixture == "quadratic" && c.alpha.is_none()));
    }
}
