//! Frozen-coefficient Picard iteration for the mean curvature equation
//! `div(Du/√(1+|Du|²)) = f` in nondivergence form.

use super::linear::{node_weights, solve_linear_with, Coefficients};
use super::{check_inputs, Scheme, Solution, SolveConfig};
use crate::error::{Error, Result};
use crate::grid::GridFunction;

/// Coefficients (I − p⊗p/w²)/w of the mean curvature operator at gradient p.
fn coefficients(p: [f64; 2]) -> Coefficients {
    let w2 = 1.0 + p[0] * p[0] + p[1] * p[1];
    let w = w2.sqrt();
    [
        (1.0 - p[0] * p[0] / w2) / w,
        -p[0] * p[1] / (w2 * w),
        (1.0 - p[1] * p[1] / w2) / w,
        0.0,
        0.0,
    ]
}

fn central_gradient(u: &GridFunction, k: usize) -> [f64; 2] {
    let h = u.spacing;
    let v = &u.values;
    let d = |step: [i64; 2]| u.offset(k, &step).map(|j| v[j]);
    match (d([1, 0]), d([-1, 0]), d([0, 1]), d([0, -1])) {
        (Some(a), Some(b), Some(c), Some(e)) => [(a - b) / (2.0 * h), (c - e) / (2.0 * h)],
        _ => [0.0, 0.0],
    }
}

/// Largest deviation of the boundary data from its least-squares affine fit.
fn boundary_deviation(g: &GridFunction) -> f64 {
    let nodes: Vec<usize> = (0..g.len()).filter(|&k| g.is_boundary(k)).collect();
    // Normal equations for g ≈ c0 + c1 x + c2 y.
    let mut ata = [0.0; 9];
    let mut atb = [0.0; 3];
    for &k in &nodes {
        let x = g.point(k);
        let row = [1.0, x[0], x[1]];
        for i in 0..3 {
            atb[i] += row[i] * g.values[k];
            for j in 0..3 {
                ata[i * 3 + j] += row[i] * row[j];
            }
        }
    }
    let c = crate::linalg::solve_dense(&ata, &atb, 3).unwrap_or([0.0; 3].to_vec());
    nodes
        .iter()
        .map(|&k| {
            let x = g.point(k);
            (g.values[k] - c[0] - c[1] * x[0] - c[2] * x[1]).abs()
        })
        .fold(0.0, f64::max)
}

fn nonlinear_residual(u: &GridFunction, f: &GridFunction) -> Result<f64> {
    let mut res = 0.0f64;
    for k in u.interior() {
        let (weights, center) = node_weights(&coefficients(central_gradient(u, k)), u.spacing)?;
        let mut value = center * u.values[k];
        for (off, w) in weights {
            value += w * u.values[u.offset(k, &[off.0, off.1]).expect("interior")];
        }
        res = res.max((value - f.values[k]).abs());
    }
    Ok(res)
}

/// Solves the mean curvature equation in the small-data regime: both ‖f‖∞
/// and the deviation of g from an affine function must be at most
/// `delta_guard`. Larger data is refused rather than attempted.
pub fn solve_mean_curvature(
    f: &GridFunction,
    g: &GridFunction,
    delta_guard: f64,
    cfg: &SolveConfig,
) -> Result<Solution> {
    check_inputs(f, g)?;
    let fmax = f
        .interior()
        .iter()
        .fold(0.0f64, |a, &k| a.max(f.values[k].abs()));
    if fmax > delta_guard {
        return Err(Error::SmallData(format!(
            "‖f‖∞ = {fmax} exceeds the small-data guard {delta_guard}"
        )));
    }
    let dev = boundary_deviation(g);
    if dev > delta_guard {
        return Err(Error::SmallData(format!(
            "boundary data deviates from an affine function by {dev}, above the small-data guard {delta_guard}"
        )));
    }
    let lin = SolveConfig::new(Scheme::FivePointLinear);
    let mut u = solve_linear_with(&|_| [1.0, 0.0, 1.0, 0.0, 0.0], f, g, &lin)?.u;
    let mut history = Vec::new();
    for iter in 0..cfg.max_iters {
        let res = nonlinear_residual(&u, f)?;
        history.push(res);
        if res <= cfg.tol {
            return Ok(Solution {
                u,
                iterations: iter,
                residual: res,
                history,
            });
        }
        if !res.is_finite() || (iter > 5 && res > 10.0 * history[0].max(1e-300)) {
            break;
        }
        let frozen = u.clone();
        let coeffs = move |k: usize| coefficients(central_gradient(&frozen, k));
        u = solve_linear_with(&coeffs, f, g, &lin)?.u;
    }
    let residual = *history.last().unwrap_or(&f64::NAN);
    Err(Error::SmallData(format!(
        "Picard iteration stalled at residual {residual:e} after {} iterations; \
         the data is outside the small-data regime guarded by {delta_guard}",
        history.len()
    )))
}
