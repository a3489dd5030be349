//! Nine-point monotone scheme for `tr(A D²u) + b·Du = f`.

use super::banded::Banded;
use super::{check_inputs, Scheme, Solution, SolveConfig, Unknowns};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::linalg::SymMatrix;

/// Per-node coefficients (a11, a12, a22, b1, b2).
pub(crate) type Coefficients = [f64; 5];

/// Neighbor weights of the scheme at one node, as (offset, weight), plus the
/// center weight. The mixed derivative goes on the diagonal whose sign
/// matches a12, which keeps all neighbor weights nonnegative exactly when
/// a11, a22 ≥ |a12| (and the drift is small enough).
pub(crate) fn node_weights(c: &Coefficients, h: f64) -> Result<([((i64, i64), f64); 6], f64)> {
    let [a11, a12, a22, b1, b2] = *c;
    let h2 = h * h;
    let e1 = (a11 - a12.abs()) / h2;
    let e2 = (a22 - a12.abs()) / h2;
    let d = a12.abs() / h2;
    let diag = if a12 >= 0.0 { (1, 1) } else { (1, -1) };
    let weights = [
        ((1, 0), e1 + b1 / (2.0 * h)),
        ((-1, 0), e1 - b1 / (2.0 * h)),
        ((0, 1), e2 + b2 / (2.0 * h)),
        ((0, -1), e2 - b2 / (2.0 * h)),
        (diag, d),
        ((-diag.0, -diag.1), d),
    ];
    let slack = 1e-12 * (a11.abs() + a22.abs()) / h2;
    if let Some((off, w)) = weights.iter().find(|(_, w)| *w < -slack) {
        return Err(Error::Anisotropy(format!(
            "coefficients a11={a11}, a12={a12}, a22={a22}, b=({b1}, {b2}) give weight {w} \
             at offset {off:?}; need a11, a22 ≥ |a12| + h|b|/2"
        )));
    }
    Ok((weights, -2.0 * (e1 + e2 + d)))
}

/// Solve with nodewise coefficients.
pub fn solve_linear_with(
    coeffs: &(dyn Fn(usize) -> Coefficients + Sync),
    f: &GridFunction,
    g: &GridFunction,
    cfg: &SolveConfig,
) -> Result<Solution> {
    check_inputs(f, g)?;
    let unknowns = Unknowns::new(f);
    let n = unknowns.nodes.len();
    let band = unknowns.row_len + 1;
    let mut a = Banded::zeros(n, band, band);
    let mut rhs = vec![0.0; n];
    let mut u = g.clone();
    for (i, &k) in unknowns.nodes.iter().enumerate() {
        u.values[k] = 0.0;
        let (weights, center) = node_weights(&coeffs(k), f.spacing)?;
        a.add(i, i, center);
        rhs[i] = f.values[k];
        for (off, w) in weights {
            let nb = f.offset(k, &[off.0, off.1]).expect("interior node");
            match unknowns.index[nb] {
                Some(j) => a.add(i, j, w),
                None => rhs[i] -= w * g.values[nb],
            }
        }
    }
    let matrix_copy = a.clone();
    let lu = a.factor()?;
    let mut x = lu.solve(&rhs);
    let mut history = Vec::new();
    for _ in 0..=3 {
        let ax = matrix_copy.mul_vec(&x);
        let r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, v)| b - v).collect();
        let res = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        history.push(res);
        if res <= cfg.tol {
            break;
        }
        let dx = lu.solve(&r);
        x.iter_mut().zip(&dx).for_each(|(a, b)| *a += b);
    }
    let residual = *history.last().unwrap();
    if residual > cfg.tol {
        return Err(Error::IterationLimit {
            iterations: history.len(),
            residual,
            history,
        });
    }
    for (i, &k) in unknowns.nodes.iter().enumerate() {
        u.values[k] = x[i];
    }
    Ok(Solution {
        u,
        iterations: history.len(),
        residual,
        history,
    })
}

/// `tr(A D²u) + b·Du = f` in the interior, `u = g` on the boundary.
pub fn solve_linear(
    a: &SymMatrix,
    b: &[f64],
    f: &GridFunction,
    g: &GridFunction,
) -> Result<Solution> {
    solve_linear_cfg(a, b, f, g, &SolveConfig::new(Scheme::FivePointLinear))
}

pub fn solve_linear_cfg(
    a: &SymMatrix,
    b: &[f64],
    f: &GridFunction,
    g: &GridFunction,
    cfg: &SolveConfig,
) -> Result<Solution> {
    if a.dim() != 2 || b.len() != 2 {
        return Err(Error::InvalidInput(
            "solve_linear needs a 2x2 matrix and a 2-vector".into(),
        ));
    }
    let eig = a.eigenvalues()?;
    if eig[0] <= 0.0 {
        return Err(Error::Parameter(format!(
            "coefficient matrix must be positive definite, eigenvalues {eig:?}"
        )));
    }
    let c: Coefficients = [a.get(0, 0), a.get(0, 1), a.get(1, 1), b[0], b[1]];
    solve_linear_with(&|_| c, f, g, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(h: f64, f: impl Fn(&[f64]) -> f64) -> GridFunction {
        GridFunction::on_box(2, -1.0, 1.0, h, f).unwrap()
    }

    #[test]
    fn harmonic_quadratic_is_exact() {
        let g = grid(0.125, |x| x[0] * x[0] - x[1] * x[1]);
        let f = g.with_values(|_| 0.0);
        let s = solve_linear(&SymMatrix::identity(2), &[0.0, 0.0], &f, &g).unwrap();
        for (a, b) in s.u.values.iter().zip(&g.values) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn poisson_minimum_in_center() {
        let g = grid(0.125, |_| 0.0);
        let f = g.with_values(|_| 1.0);
        let s = solve_linear(&SymMatrix::identity(2), &[0.0, 0.0], &f, &g).unwrap();
        let (kmin, vmin) =
            s.u.values
                .iter()
                .enumerate()
                .fold(
                    (0, f64::INFINITY),
                    |a, (k, &v)| if v < a.1 { (k, v) } else { a },
                );
        assert!(vmin < 0.0);
        assert_eq!(s.u.point(kmin), vec![0.0, 0.0]);
    }

    #[test]
    fn anisotropy_rejected() {
        let g = grid(0.25, |_| 0.0);
        let a = SymMatrix::from_rows(&[vec![1.0, 0.9], vec![0.9, 1.0]]).unwrap();
        assert!(solve_linear(&a, &[0.0, 0.0], &g, &g).is_ok());
        let a = SymMatrix::from_rows(&[vec![1.0, 0.9], vec![0.9, 0.85]]).unwrap();
        assert!(matches!(
            solve_linear(&a, &[0.0, 0.0], &g, &g),
            Err(Error::Anisotropy(_))
        ));
    }
}
