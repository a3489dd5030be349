//! Best uniform (minimax) polynomial approximation on sampled balls, with an
//! optional scalar `t·I` correction that enforces an equation at the center.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixtures::AnalyticFunction;
use crate::linalg::numerical_rank;
use crate::operators::{Jet, OperatorSpec};
use crate::polynomial::{multi_indices, sigma_factorial, Polynomial};
use crate::simplex;

/// Point values of a function.
#[derive(Clone, Debug, Default)]
pub struct Samples {
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
}

impl Samples {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Anything that can be sampled on closed balls.
pub trait BallSampler: Sync {
    fn dim(&self) -> usize;
    fn sample_ball(&self, x0: &[f64], radius: f64) -> Samples;
    /// Node spacing for grid data; `None` for closed-form functions.
    fn spacing(&self) -> Option<f64>;
    fn value_at(&self, x: &[f64]) -> Option<f64>;
}

/// Lattice `x0 + radius·i/m`, `i ∈ {−m..m}^n`, restricted to the closed ball.
pub fn ball_lattice(x0: &[f64], radius: f64, m: usize) -> Vec<Vec<f64>> {
    let n = x0.len();
    let mi = m as i64;
    let side = 2 * m + 1;
    let total = side.pow(n as u32);
    let mut out = Vec::new();
    for flat in 0..total {
        let mut rem = flat;
        let mut idx = vec![0i64; n];
        for d in (0..n).rev() {
            idx[d] = (rem % side) as i64 - mi;
            rem /= side;
        }
        let r2: i64 = idx.iter().map(|i| i * i).sum();
        if (r2 as f64) <= (mi * mi) as f64 * (1.0 + 1e-12) {
            out.push(
                x0.iter()
                    .zip(&idx)
                    .map(|(c, &i)| c + radius * i as f64 / m as f64)
                    .collect(),
            );
        }
    }
    out
}

/// A closed-form function sampled on ball lattices.
pub struct LatticeSampler<'a> {
    pub f: &'a (dyn Fn(&[f64]) -> f64 + Sync),
    pub dim: usize,
    pub m: usize,
}

impl BallSampler for LatticeSampler<'_> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn sample_ball(&self, x0: &[f64], radius: f64) -> Samples {
        let points = ball_lattice(x0, radius, self.m);
        let values = points.iter().map(|x| (self.f)(x)).collect();
        Samples { points, values }
    }

    fn spacing(&self) -> Option<f64> {
        None
    }

    fn value_at(&self, x: &[f64]) -> Option<f64> {
        Some((self.f)(x))
    }
}

/// Enforce `F(D²P + t·I, DP(0), P(0), x0) = f0` after fitting.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitConstraint {
    pub op: OperatorSpec,
    pub f0: f64,
    /// The correction is searched in `|t| ≤ rho/2`.
    pub rho: f64,
}

impl FitConstraint {
    pub fn new(op: OperatorSpec, f0: f64) -> Self {
        FitConstraint { op, f0, rho: 4.0 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimaxFit {
    /// Polynomial in the shifted variable `x − center`.
    pub p: Polynomial,
    pub center: Vec<f64>,
    pub radius: f64,
    pub error: f64,
    pub active_points: Vec<usize>,
    pub constrained: bool,
    pub t_correction: f64,
    pub unconstrained_error: f64,
    pub samples: usize,
    /// ‖P‖ = ‖P‖₁
    pub norm: f64,
}

impl MinimaxFit {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let y: Vec<f64> = x.iter().zip(&self.center).map(|(a, c)| a - c).collect();
        self.p.eval(&y)
    }
}

fn in_ball(x: &[f64], x0: &[f64], radius: f64) -> bool {
    let d2: f64 = x.iter().zip(x0).map(|(a, b)| (a - b).powi(2)).sum();
    d2 <= radius * radius * (1.0 + 1e-12)
}

pub fn minimax_fit(
    points: &[Vec<f64>],
    values: &[f64],
    x0: &[f64],
    radius: f64,
    degree: usize,
    constraint: Option<&FitConstraint>,
) -> Result<MinimaxFit> {
    let mut fit = fit_core(points, values, x0, radius, degree, None)?;
    if let Some(c) = constraint {
        if degree < 2 {
            return Err(Error::Parameter(
                "a constrained fit needs degree at least 2".into(),
            ));
        }
        let t = solve_correction(&fit.p, x0, c)?;
        let n = x0.len();
        let mut p = fit.p.clone();
        for i in 0..n {
            let mut sigma = vec![0u32; n];
            sigma[i] = 2;
            let a = p.coeff(&sigma);
            p.set_coeff(&sigma, a + t)?;
        }
        fit.p = p;
        fit.constrained = true;
        fit.t_correction = t;
        finish(&mut fit, points, values);
    }
    Ok(fit)
}

/// Minimax fit with the constant term pinned to `anchor`, the value of the
/// function at the center. This is the fit whose residual is a Taylor
/// remainder: it vanishes at the center.
pub fn minimax_fit_anchored(
    points: &[Vec<f64>],
    values: &[f64],
    x0: &[f64],
    radius: f64,
    degree: usize,
    anchor: f64,
) -> Result<MinimaxFit> {
    fit_core(points, values, x0, radius, degree, Some(anchor))
}

fn fit_core(
    points: &[Vec<f64>],
    values: &[f64],
    x0: &[f64],
    radius: f64,
    degree: usize,
    anchor: Option<f64>,
) -> Result<MinimaxFit> {
    if points.len() != values.len() {
        return Err(Error::InvalidInput(
            "points and values differ in length".into(),
        ));
    }
    if !(radius > 0.0) {
        return Err(Error::Parameter(format!(
            "radius must be positive, got {radius}"
        )));
    }
    let n = x0.len();
    let inside: Vec<usize> = (0..points.len())
        .filter(|&i| points[i].len() == n && in_ball(&points[i], x0, radius))
        .collect();
    let indices = multi_indices(n, degree);
    let first = usize::from(anchor.is_some());
    let basis = &indices[first..];
    let d = basis.len();

    let y: Vec<Vec<f64>> = inside
        .iter()
        .map(|&i| {
            points[i]
                .iter()
                .zip(x0)
                .map(|(a, c)| (a - c) / radius)
                .collect()
        })
        .collect();
    let phi: Vec<Vec<f64>> = y
        .iter()
        .map(|yi| {
            basis
                .iter()
                .map(|s| s.iter().zip(yi).map(|(&e, v)| v.powi(e as i32)).product())
                .collect()
        })
        .collect();
    let design: Vec<f64> = phi.iter().flatten().copied().collect();
    if d > 0 && (inside.len() < d || numerical_rank(&design, inside.len(), d, 1e-10) < d) {
        return Err(Error::Rank(format!(
            "{} samples in the ball do not determine a degree-{degree} polynomial in {n} variables",
            inside.len()
        )));
    }
    let shift = anchor.unwrap_or(0.0);
    let u: Vec<f64> = inside.iter().map(|&i| values[i] - shift).collect();
    let scale = u.iter().fold(0.0f64, |a, v| a.max(v.abs()));

    let mut c = vec![0.0; d];
    if scale > 0.0 && d > 0 {
        let us: Vec<f64> = u.iter().map(|v| v / scale).collect();
        let mut columns = Vec::with_capacity(2 * us.len());
        let mut costs = Vec::with_capacity(2 * us.len());
        for (row, &ui) in phi.iter().zip(&us) {
            let mut plus = row.clone();
            plus.push(1.0);
            let mut minus: Vec<f64> = row.iter().map(|v| -v).collect();
            minus.push(1.0);
            columns.push(plus);
            costs.push(-ui);
            columns.push(minus);
            costs.push(ui);
        }
        let mut b = vec![0.0; d + 1];
        b[d] = 1.0;
        let sol = simplex::solve(&columns, &costs, &b, 100_000)?;
        for (ck, pk) in c.iter_mut().zip(&sol.duals) {
            *ck = -pk * scale;
        }
    }
    let mut coeffs = vec![0.0; indices.len()];
    if anchor.is_some() {
        coeffs[0] = shift;
    }
    for (k, sigma) in basis.iter().enumerate() {
        let total: u32 = sigma.iter().sum();
        coeffs[first + k] = c[k] * sigma_factorial(sigma) / radius.powi(total as i32);
    }
    let p = Polynomial::from_coeffs(n, degree, coeffs)?;
    let mut fit = MinimaxFit {
        p,
        center: x0.to_vec(),
        radius,
        error: 0.0,
        active_points: Vec::new(),
        constrained: false,
        t_correction: 0.0,
        unconstrained_error: 0.0,
        samples: inside.len(),
        norm: 0.0,
    };
    finish(&mut fit, points, values);
    fit.unconstrained_error = fit.error;
    Ok(fit)
}

fn finish(fit: &mut MinimaxFit, points: &[Vec<f64>], values: &[f64]) {
    let n = fit.center.len();
    let residuals: Vec<(usize, f64)> = (0..points.len())
        .filter(|&i| points[i].len() == n && in_ball(&points[i], &fit.center, fit.radius))
        .map(|i| (i, (values[i] - fit.eval(&points[i])).abs()))
        .collect();
    fit.error = residuals.iter().fold(0.0f64, |a, (_, r)| a.max(*r));
    fit.active_points = if fit.error > 0.0 {
        residuals
            .iter()
            .filter(|(_, r)| *r >= fit.error * (1.0 - 1e-9))
            .map(|(i, _)| *i)
            .collect()
    } else {
        Vec::new()
    };
    fit.norm = fit.p.norm(1.0);
}

fn correction_residual(p: &Polynomial, x0: &[f64], c: &FitConstraint, t: f64) -> Result<f64> {
    let origin = vec![0.0; x0.len()];
    let jet = Jet {
        m: p.hessian(&origin).add_identity(t),
        p: p.gradient(&origin),
        s: p.eval(&origin),
        x: x0.to_vec(),
    };
    Ok(c.op.evaluate(&jet)? - c.f0)
}

/// Root of `t ↦ F(D²P + tI, ...) − f0` nearest to 0 inside `|t| ≤ rho/2`:
/// an outward scan brackets the first sign change, then Newton steps with
/// bisection fallback refine it.
fn solve_correction(p: &Polynomial, x0: &[f64], c: &FitConstraint) -> Result<f64> {
    let infeasible = |why: String| Error::ConstraintInfeasible(why);
    let g = |t: f64| {
        correction_residual(p, x0, c, t)
            .map_err(|e| infeasible(format!("operator failed at t={t}: {e}")))
    };
    let tol = 1e-13 * (1.0 + c.f0.abs());
    let g0 = g(0.0)?;
    if g0.abs() <= tol {
        return Ok(0.0);
    }
    let half = c.rho / 2.0;
    let dir = -g0.signum();
    const SCAN: usize = 64;
    let mut a = 0.0;
    let mut ga = g0;
    let mut bracket = None;
    for j in 1..=SCAN {
        let t = dir * half * j as f64 / SCAN as f64;
        let gt = g(t)?;
        if gt.abs() <= tol {
            return Ok(t);
        }
        if gt.signum() != ga.signum() {
            bracket = Some((a, ga, t));
            break;
        }
        a = t;
        ga = gt;
    }
    let Some((mut lo, mut glo, mut hi)) = bracket else {
        return Err(infeasible(format!(
            "no correction with |t| ≤ {half} reaches f0 = {}",
            c.f0
        )));
    };
    let mut t = 0.5 * (lo + hi);
    for _ in 0..200 {
        let gt = g(t)?;
        if gt.abs() <= tol || (hi - lo).abs() <= 1e-15 * (1.0 + t.abs()) {
            return Ok(t);
        }
        if gt.signum() == glo.signum() {
            lo = t;
            glo = gt;
        } else {
            hi = t;
        }
        let delta = 1e-7 * (1.0 + t.abs());
        let slope = (g(t + delta)? - g(t - delta)?) / (2.0 * delta);
        let newton = t - gt / slope;
        let (l, h) = if lo < hi { (lo, hi) } else { (hi, lo) };
        t = if slope.is_finite() && slope != 0.0 && newton > l && newton < h {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Ok(t)
}

/// Number of alternating sign groups among the extremal residuals of a 1D fit
/// (points ordered along the line).
pub fn alternation_count(points: &[Vec<f64>], values: &[f64], fit: &MinimaxFit) -> usize {
    let mut active: Vec<(f64, f64)> = fit
        .active_points
        .iter()
        .map(|&i| (points[i][0], values[i] - fit.eval(&points[i])))
        .collect();
    active.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut count = 0;
    let mut last = 0.0f64;
    for (_, r) in active {
        if r.signum() != last.signum() || count == 0 {
            count += 1;
            last = r;
        }
    }
    count
}

/// Taylor polynomial of a fixture at x0 (in the variable `x − x0`), from its
/// analytic derivatives.
pub fn taylor_of(fixture: &AnalyticFunction, x0: &[f64], k: usize) -> Result<Polynomial> {
    if x0.len() != fixture.dim() {
        return Err(Error::InvalidInput(format!(
            "point has dimension {}, fixture {} has {}",
            x0.len(),
            fixture.name(),
            fixture.dim()
        )));
    }
    if fixture.is_singular(x0) {
        return Err(Error::Singularity(format!(
            "{} is not differentiable at {x0:?}",
            fixture.name()
        )));
    }
    let n = x0.len();
    if let Some(poly) = fixture.as_polynomial() {
        let indices = multi_indices(n, k);
        let coeffs = indices
            .iter()
            .map(|s| poly.derivative(s).eval(x0))
            .collect();
        return Polynomial::from_coeffs(n, k, coeffs);
    }
    if k > 2 {
        return Err(Error::Parameter(format!(
            "{} provides derivatives up to order 2 only",
            fixture.name()
        )));
    }
    let grad = fixture.grad(x0);
    let hess = fixture.hess(x0);
    let indices = multi_indices(n, k);
    let coeffs = indices
        .iter()
        .map(|s| {
            let nz: Vec<usize> = (0..n).filter(|&i| s[i] > 0).collect();
            match (s.iter().sum::<u32>(), nz.as_slice()) {
                (0, _) => fixture.eval(x0),
                (1, [i]) => grad[*i],
                (2, [i]) => hess.get(*i, *i),
                (2, [i, j]) => hess.get(*i, *j),
                _ => 0.0,
            }
        })
        .collect();
    Polynomial::from_coeffs(n, k, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymMatrix;
    use crate::operators::Family;

    fn line(npts: usize) -> Vec<Vec<f64>> {
        (0..npts)
            .map(|i| vec![-1.0 + 2.0 * i as f64 / (npts - 1) as f64])
            .collect()
    }

    #[test]
    fn abs_degree_one() {
        let pts = line(401);
        let vals: Vec<f64> = pts.iter().map(|x| x[0].abs()).collect();
        let fit = minimax_fit(&pts, &vals, &[0.0], 1.0, 1, None).unwrap();
        assert!((fit.error - 0.5).abs() < 1e-9);
        assert!((fit.p.coeff(&[0]) - 0.5).abs() < 1e-9);
        assert!(fit.p.coeff(&[1]).abs() < 1e-9);
        assert!(alternation_count(&pts, &vals, &fit) >= 3);
    }

    #[test]
    fn lattice_counts() {
        assert_eq!(ball_lattice(&[0.0], 1.0, 8).len(), 17);
        // Lattice points of radius 8 in the plane: Gauss circle count N(8) = 197.
        assert_eq!(ball_lattice(&[0.0, 0.0], 1.0, 8).len(), 197);
    }

    #[test]
    fn rank_deficient_samples() {
        let pts = vec![
            vec![0.0, 0.0],
            vec![0.1, 0.1],
            vec![0.2, 0.2],
            vec![-0.1, -0.1],
        ];
        let vals = vec![0.0; 4];
        let err = minimax_fit(&pts, &vals, &[0.0, 0.0], 1.0, 1, None).unwrap_err();
        assert!(matches!(err, Error::Rank(_)));
    }

    #[test]
    fn laplacian_correction() {
        let pts = ball_lattice(&[0.0, 0.0], 1.0, 6);
        let vals: Vec<f64> = pts
            .iter()
            .map(|x| 0.5 * (x[0] * x[0] + x[1] * x[1]))
            .collect();
        let op = OperatorSpec::new(Family::LinearConstant {
            a: SymMatrix::identity(2),
            b: vec![0.0, 0.0],
            c: 0.0,
        })
        .unwrap();
        let c = FitConstraint::new(op, 4.0);
        let fit = minimax_fit(&pts, &vals, &[0.0, 0.0], 1.0, 2, Some(&c)).unwrap();
        assert!((fit.t_correction - 1.0).abs() < 1e-10);
    }

    #[test]
    fn infeasible_correction() {
        let pts = ball_lattice(&[0.0, 0.0], 1.0, 4);
        let vals = vec![0.0; pts.len()];
        let op = OperatorSpec::new(Family::Lagrangian).unwrap();
        // Σ arctan never reaches 10.
        let c = FitConstraint::new(op, 10.0);
        let err = minimax_fit(&pts, &vals, &[0.0, 0.0], 1.0, 2, Some(&c)).unwrap_err();
        assert!(matches!(err, Error::ConstraintInfeasible(_)));
    }
}
