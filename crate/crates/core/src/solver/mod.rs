//! Monotone finite-difference Dirichlet solvers on uniform 2D grids.

mod banded;
mod linear;
mod mc;
mod nonlinear;
mod stencil;

pub use linear::{solve_linear, solve_linear_cfg, solve_linear_with};
pub use mc::solve_mean_curvature;
pub use nonlinear::{solve_monge_ampere, solve_pucci};
pub use stencil::Stencil;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::linalg::SymMatrix;
use crate::operators::{Jet, OperatorSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    FivePointLinear,
    WideStencilPucci,
    WideStencilMa,
    FrozenCoefficientMc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub scheme: Scheme,
    pub stencil_directions: usize,
    /// Target for the sup-norm of the discrete residual.
    pub tol: f64,
    pub max_iters: usize,
    /// Step shrink factor of the Newton line search.
    pub damping: f64,
}

impl SolveConfig {
    pub fn new(scheme: Scheme) -> Self {
        SolveConfig {
            scheme,
            stencil_directions: 8,
            tol: 1e-9,
            max_iters: 100,
            damping: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::Parameter(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.stencil_directions < 2 || self.stencil_directions % 2 != 0 {
            return Err(Error::Parameter(format!(
                "stencil_directions must be even and ≥ 2, got {}",
                self.stencil_directions
            )));
        }
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(Error::Parameter(format!(
                "damping must lie in (0, 1), got {}",
                self.damping
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Solution {
    pub u: GridFunction,
    pub iterations: usize,
    pub residual: f64,
    pub history: Vec<f64>,
}

fn check_inputs(f: &GridFunction, g: &GridFunction) -> Result<()> {
    if f.dim() != 2 {
        return Err(Error::InvalidInput(format!(
            "solvers work on 2D grids, got dimension {}",
            f.dim()
        )));
    }
    if !f.same_layout(g) {
        return Err(Error::InvalidInput(
            "f and g live on different grids".into(),
        ));
    }
    if f.shape.iter().any(|&s| s < 3) {
        return Err(Error::InvalidInput("grid has no interior nodes".into()));
    }
    Ok(())
}

/// Interior unknown numbering: `index[k]` for flat node k.
pub(crate) struct Unknowns {
    pub nodes: Vec<usize>,
    pub index: Vec<Option<usize>>,
    pub row_len: usize,
}

impl Unknowns {
    pub fn new(grid: &GridFunction) -> Self {
        let nodes = grid.interior();
        let mut index = vec![None; grid.len()];
        for (i, &k) in nodes.iter().enumerate() {
            index[k] = Some(i);
        }
        Unknowns {
            nodes,
            index,
            row_len: grid.shape[1] - 2,
        }
    }
}

/// Central-difference jet of u at an interior node.
pub fn discrete_jet(u: &GridFunction, k: usize) -> Option<Jet> {
    let h = u.spacing;
    let n = u.dim();
    let v = &u.values;
    let unit = |d: usize, s: i64| {
        let mut step = vec![0i64; n];
        step[d] = s;
        step
    };
    let mut m = SymMatrix::zeros(n);
    let mut p = vec![0.0; n];
    for d in 0..n {
        let fw = u.offset(k, &unit(d, 1))?;
        let bw = u.offset(k, &unit(d, -1))?;
        p[d] = (v[fw] - v[bw]) / (2.0 * h);
        m.set(d, d, (v[fw] - 2.0 * v[k] + v[bw]) / (h * h));
    }
    if n == 2 {
        let pp = u.offset(k, &[1, 1])?;
        let pm = u.offset(k, &[1, -1])?;
        let mp = u.offset(k, &[-1, 1])?;
        let mm = u.offset(k, &[-1, -1])?;
        m.set(0, 1, (v[pp] - v[pm] - v[mp] + v[mm]) / (4.0 * h * h));
    }
    Some(Jet {
        m,
        p,
        s: v[k],
        x: u.point(k),
    })
}

/// Nodewise `F(discrete jet of u) − f` on interior nodes; zero on the boundary.
pub fn residual(op: &OperatorSpec, u: &GridFunction, f: &GridFunction) -> Result<GridFunction> {
    if !u.same_layout(f) {
        return Err(Error::InvalidInput(
            "u and f live on different grids".into(),
        ));
    }
    let mut out = u.clone();
    out.values.iter_mut().for_each(|v| *v = 0.0);
    for k in u.interior() {
        let jet = discrete_jet(u, k).expect("interior node has a full stencil");
        out.values[k] = op.evaluate(&jet)? - f.values[k];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::Family;

    #[test]
    fn residual_of_exact_quadratic() {
        let u = GridFunction::on_box(2, -1.0, 1.0, 0.125, |x| {
            0.5 * x[0] * x[0] + 0.25 * x[0] * x[1] + x[1] * x[1]
        })
        .unwrap();
        let f = u.with_values(|_| 1.0 * 2.0 - 0.0625);
        let op = OperatorSpec::new(Family::MongeAmpere).unwrap();
        let r = residual(&op, &u, &f).unwrap();
        assert!(r.sup_norm() < 1e-9);
    }

    #[test]
    fn config_validation() {
        let mut c = SolveConfig::new(Scheme::WideStencilPucci);
        assert!(c.validate().is_ok());
        c.stencil_directions = 5;
        assert!(c.validate().is_err());
    }
}
