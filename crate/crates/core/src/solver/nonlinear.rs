//! Wide-stencil schemes for the Pucci and Monge-Ampère equations, solved by
//! damped Newton iteration with a nonlinear Gauss-Seidel fallback.

use rayon::prelude::*;

use super::banded::Banded;
use super::linear::solve_linear_cfg;
use super::stencil::{second_difference, Stencil};
use super::{check_inputs, Scheme, Solution, SolveConfig, Unknowns};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::linalg::SymMatrix;
use crate::operators::PucciSign;

const FAILED_STEPS_BEFORE_SWEEPS: usize = 3;
const LINE_SEARCH_STEPS: usize = 8;

/// Discrete operator value at one node and its derivative with respect to
/// the nodal values it touches.
trait NodeScheme: Sync {
    fn eval(&self, grid: &GridFunction, u: &[f64], k: usize) -> (f64, Vec<(usize, f64)>);
}

struct PucciScheme {
    stencil: Stencil,
    frames: Vec<Vec<usize>>,
    lambda: f64,
    big_lambda: f64,
    sign: PucciSign,
}

impl PucciScheme {
    /// ψ(a) and ψ'(a) for the weighted positive/negative parts.
    fn psi(&self, a: f64) -> (f64, f64) {
        let (pos, neg) = match self.sign {
            PucciSign::Plus => (self.big_lambda, self.lambda),
            PucciSign::Minus => (self.lambda, self.big_lambda),
        };
        if a > 0.0 {
            (pos * a, pos)
        } else {
            (neg * a, neg)
        }
    }
}

impl NodeScheme for PucciScheme {
    fn eval(&self, grid: &GridFunction, u: &[f64], k: usize) -> (f64, Vec<(usize, f64)>) {
        let mut best: Option<(f64, Vec<(usize, f64)>)> = None;
        for &fi in &self.frames[k] {
            let (a, b) = self.stencil.frames[fi];
            let mut value = 0.0;
            let mut entries = Vec::with_capacity(6);
            for d in [a, b] {
                let (dd, st) = second_difference(grid, u, k, self.stencil.dirs[d]);
                let (v, slope) = self.psi(dd);
                value += v;
                entries.extend(st.iter().map(|&(j, w)| (j, slope * w)));
            }
            let better = match (&best, self.sign) {
                (None, _) => true,
                (Some((bv, _)), PucciSign::Plus) => value > *bv,
                (Some((bv, _)), PucciSign::Minus) => value < *bv,
            };
            if better {
                best = Some((value, entries));
            }
        }
        best.expect("axis frame always fits")
    }
}

struct MaScheme {
    stencil: Stencil,
    frames: Vec<Vec<usize>>,
    delta: f64,
}

impl NodeScheme for MaScheme {
    fn eval(&self, grid: &GridFunction, u: &[f64], k: usize) -> (f64, Vec<(usize, f64)>) {
        let mut best: Option<(f64, Vec<(usize, f64)>)> = None;
        for &fi in &self.frames[k] {
            let (a, b) = self.stencil.frames[fi];
            let (da, sa) = second_difference(grid, u, k, self.stencil.dirs[a]);
            let (db, sb) = second_difference(grid, u, k, self.stencil.dirs[b]);
            let value = da.max(0.0) * db.max(0.0);
            if best.as_ref().map_or(true, |(bv, _)| value < *bv) {
                // Regularized product rule keeps the Jacobian nonsingular when a
                // factor touches zero.
                let ca = db.max(self.delta);
                let cb = da.max(self.delta);
                let entries = sa
                    .iter()
                    .map(|&(j, w)| (j, ca * w))
                    .chain(sb.iter().map(|&(j, w)| (j, cb * w)))
                    .collect();
                best = Some((value, entries));
            }
        }
        best.expect("axis frame always fits")
    }
}

fn residuals(
    scheme: &dyn NodeScheme,
    grid: &GridFunction,
    u: &[f64],
    f: &[f64],
    nodes: &[usize],
) -> Vec<f64> {
    nodes
        .par_iter()
        .map(|&k| scheme.eval(grid, u, k).0 - f[k])
        .collect()
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

/// One lexicographic nonlinear Gauss-Seidel sweep: each nodal equation is
/// solved for its own unknown by bracketing and bisection. The discrete
/// operators are nonincreasing in the center value, which makes this well
/// posed.
fn gauss_seidel_sweep(
    scheme: &dyn NodeScheme,
    grid: &GridFunction,
    u: &mut [f64],
    f: &[f64],
    nodes: &[usize],
) {
    for &k in nodes {
        let phi = |u: &mut [f64], t: f64| {
            u[k] = t;
            scheme.eval(grid, u, k).0 - f[k]
        };
        let t0 = u[k];
        let r0 = phi(u, t0);
        if r0 == 0.0 {
            u[k] = t0;
            continue;
        }
        // Residual decreases as the center value grows.
        let dir = if r0 > 0.0 { 1.0 } else { -1.0 };
        let mut step = 1e-3 * grid.spacing * grid.spacing * (1.0 + r0.abs());
        let (mut lo, mut hi) = (t0, t0);
        let mut found = false;
        for _ in 0..80 {
            let t = t0 + dir * step;
            let r = phi(u, t);
            if r.signum() != r0.signum() || r == 0.0 {
                if dir > 0.0 {
                    hi = t;
                } else {
                    lo = t;
                }
                found = true;
                break;
            }
            if dir > 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            step *= 2.0;
        }
        if !found {
            u[k] = t0;
            continue;
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if phi(u, mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        u[k] = 0.5 * (lo + hi);
    }
}

fn newton(
    scheme: &dyn NodeScheme,
    stencil: &Stencil,
    f: &GridFunction,
    init: GridFunction,
    cfg: &SolveConfig,
) -> Result<Solution> {
    let grid = f;
    let unknowns = Unknowns::new(grid);
    let nodes = &unknowns.nodes;
    let n = nodes.len();
    let band = stencil.reach(unknowns.row_len);
    let mut u = init.values;
    let mut r = residuals(scheme, grid, &u, &f.values, nodes);
    let mut res = sup(&r);
    let mut history = vec![res];
    let mut failed = 0usize;
    for iter in 0..cfg.max_iters {
        if res <= cfg.tol {
            return Ok(Solution {
                u: GridFunction {
                    values: u,
                    ..init_layout(grid)
                },
                iterations: iter,
                residual: res,
                history,
            });
        }
        if failed >= FAILED_STEPS_BEFORE_SWEEPS {
            gauss_seidel_sweep(scheme, grid, &mut u, &f.values, nodes);
            r = residuals(scheme, grid, &u, &f.values, nodes);
            res = sup(&r);
            history.push(res);
            failed = 0;
            continue;
        }
        let rows: Vec<Vec<(usize, f64)>> = nodes
            .par_iter()
            .map(|&k| scheme.eval(grid, &u, k).1)
            .collect();
        let mut jac = Banded::zeros(n, band, band);
        for (i, row) in rows.iter().enumerate() {
            for &(node, w) in row {
                if let Some(j) = unknowns.index[node] {
                    jac.add(i, j, w);
                }
            }
        }
        let delta = match jac.factor() {
            Ok(lu) => {
                let neg: Vec<f64> = r.iter().map(|v| -v).collect();
                Some(lu.solve(&neg))
            }
            Err(_) => None,
        };
        let mut accepted = false;
        if let Some(delta) = delta {
            let mut step = 1.0;
            for _ in 0..LINE_SEARCH_STEPS {
                let mut trial = u.clone();
                for (i, &k) in nodes.iter().enumerate() {
                    trial[k] += step * delta[i];
                }
                let rt = residuals(scheme, grid, &trial, &f.values, nodes);
                let rest = sup(&rt);
                if rest < res {
                    u = trial;
                    r = rt;
                    res = rest;
                    accepted = true;
                    break;
                }
                step *= cfg.damping;
            }
        }
        if accepted {
            failed = 0;
        } else {
            failed += 1;
        }
        history.push(res);
    }
    if res <= cfg.tol {
        return Ok(Solution {
            u: GridFunction {
                values: u,
                ..init_layout(grid)
            },
            iterations: cfg.max_iters,
            residual: res,
            history,
        });
    }
    Err(Error::IterationLimit {
        iterations: cfg.max_iters,
        residual: res,
        history,
    })
}

fn init_layout(grid: &GridFunction) -> GridFunction {
    GridFunction {
        shape: grid.shape.clone(),
        origin: grid.origin.clone(),
        spacing: grid.spacing,
        values: Vec::new(),
    }
}

fn frames_per_node(stencil: &Stencil, grid: &GridFunction) -> Vec<Vec<usize>> {
    (0..grid.len())
        .map(|k| {
            if grid.is_boundary(k) {
                Vec::new()
            } else {
                stencil.usable_frames(grid, k)
            }
        })
        .collect()
}

/// `M±(D²u, λ, Λ) = f` in the interior, `u = g` on the boundary.
pub fn solve_pucci(
    lambda: f64,
    big_lambda: f64,
    sign: PucciSign,
    f: &GridFunction,
    g: &GridFunction,
    cfg: &SolveConfig,
) -> Result<Solution> {
    cfg.validate()?;
    check_inputs(f, g)?;
    if !(lambda > 0.0 && lambda <= big_lambda) {
        return Err(Error::Parameter(format!(
            "Pucci operators need 0 < λ ≤ Λ, got λ={lambda}, Λ={big_lambda}"
        )));
    }
    // With λ = Λ the operator is a multiple of the Laplacian and every frame
    // gives the same value in the continuum; the axis frame alone keeps the
    // scheme identical to the five-point Laplacian.
    let stencil = if lambda == big_lambda {
        Stencil::axes_only()
    } else {
        Stencil::new(cfg.stencil_directions)?
    };
    let frames = frames_per_node(&stencil, f);
    let scheme = PucciScheme {
        stencil: stencil.clone(),
        frames,
        lambda,
        big_lambda,
        sign,
    };
    let init = solve_linear_cfg(
        &SymMatrix::identity(2),
        &[0.0, 0.0],
        f,
        g,
        &SolveConfig::new(Scheme::FivePointLinear),
    )?
    .u;
    newton(&scheme, &stencil, f, init, cfg)
}

/// `det D²u = f` in the interior, `u = g` on the boundary, with the
/// convex wide-stencil discretization.
pub fn solve_monge_ampere(
    f: &GridFunction,
    g: &GridFunction,
    cfg: &SolveConfig,
) -> Result<Solution> {
    cfg.validate()?;
    check_inputs(f, g)?;
    if let Some(k) = f.interior().into_iter().find(|&k| !(f.values[k] > 0.0)) {
        return Err(Error::Admissibility(format!(
            "Monge-Ampère needs f > 0, found f = {} at {:?}",
            f.values[k],
            f.point(k)
        )));
    }
    let stencil = Stencil::new(cfg.stencil_directions)?;
    let frames = frames_per_node(&stencil, f);
    let fmax = f.interior().iter().fold(0.0f64, |a, &k| a.max(f.values[k]));
    let scheme = MaScheme {
        stencil: stencil.clone(),
        frames,
        delta: 1e-8 * fmax.sqrt().max(1.0),
    };
    // Start from Δu = 2√f, whose solution has the right convexity and is
    // exact for quadratics with a multiple of the identity as Hessian.
    let mut lap_rhs = f.with_values(|_| 0.0);
    for k in f.interior() {
        lap_rhs.values[k] = 2.0 * f.values[k].sqrt();
    }
    let init = solve_linear_cfg(
        &SymMatrix::identity(2),
        &[0.0, 0.0],
        &lap_rhs,
        g,
        &SolveConfig::new(Scheme::FivePointLinear),
    )?
    .u;
    newton(&scheme, &stencil, f, init, cfg)
}
