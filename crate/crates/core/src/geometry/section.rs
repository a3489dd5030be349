//! Sections S_h(x0) = {u < ℓ + h} below the supporting affine function ℓ
//! of a convex function at x0.

use crate::error::{Error, Result};
use crate::fixtures::AnalyticFunction;
use crate::grid::GridFunction;

pub const DEFAULT_RAYS: usize = 256;
const MARCH_STEPS: f64 = 512.0;

/// A function that can be cut by sections: values on a box and a slope at
/// the base point.
pub trait SectionSource {
    fn dim(&self) -> usize;
    /// Box [lo, hi] on which `value` may be called.
    fn bounds(&self) -> (Vec<f64>, Vec<f64>);
    fn value(&self, x: &[f64]) -> f64;
    fn slope(&self, x: &[f64]) -> Vec<f64>;
}

impl SectionSource for AnalyticFunction {
    fn dim(&self) -> usize {
        AnalyticFunction::dim(self)
    }

    /// Analytic fixtures are cut inside [−1, 1]ⁿ.
    fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let n = AnalyticFunction::dim(self);
        (vec![-1.0; n], vec![1.0; n])
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.eval(x)
    }

    fn slope(&self, x: &[f64]) -> Vec<f64> {
        self.grad(x)
    }
}

impl GridFunction {
    /// Multilinear interpolation; `x` is clamped to the grid box.
    pub fn interpolate(&self, x: &[f64]) -> f64 {
        let n = self.dim();
        let mut base = vec![0usize; n];
        let mut frac = vec![0.0; n];
        for d in 0..n {
            let s = ((x[d] - self.origin[d]) / self.spacing).clamp(0.0, (self.shape[d] - 1) as f64);
            let i = (s.floor() as usize).min(self.shape[d].saturating_sub(2));
            base[d] = i;
            frac[d] = s - i as f64;
        }
        let mut total = 0.0;
        for corner in 0..(1usize << n) {
            let mut w = 1.0;
            let mut idx = base.clone();
            for d in 0..n {
                if corner >> d & 1 == 1 {
                    idx[d] = (idx[d] + 1).min(self.shape[d] - 1);
                    w *= frac[d];
                } else {
                    w *= 1.0 - frac[d];
                }
            }
            if w != 0.0 {
                total += w * self.values[self.flat(&idx)];
            }
        }
        total
    }
}

impl SectionSource for GridFunction {
    fn dim(&self) -> usize {
        GridFunction::dim(self)
    }

    fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let hi = self
            .origin
            .iter()
            .zip(&self.shape)
            .map(|(o, s)| o + (*s - 1) as f64 * self.spacing)
            .collect();
        (self.origin.clone(), hi)
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.interpolate(x)
    }

    /// Central difference of the interpolant with the grid spacing.
    fn slope(&self, x: &[f64]) -> Vec<f64> {
        (0..GridFunction::dim(self))
            .map(|d| {
                let mut a = x.to_vec();
                let mut b = x.to_vec();
                a[d] += self.spacing;
                b[d] -= self.spacing;
                (self.interpolate(&a) - self.interpolate(&b)) / (2.0 * self.spacing)
            })
            .collect()
    }
}

/// Boundary of S_h(x0) with the default number of rays.
pub fn section(u: &dyn SectionSource, x0: &[f64], h: f64) -> Result<Vec<Vec<f64>>> {
    section_with_rays(u, x0, h, DEFAULT_RAYS)
}

/// Boundary points of S_h(x0) along `rays` equally spaced directions
/// (counterclockwise from e₁), or the two interval endpoints in 1D.
pub fn section_with_rays(
    u: &dyn SectionSource,
    x0: &[f64],
    h: f64,
    rays: usize,
) -> Result<Vec<Vec<f64>>> {
    let n = u.dim();
    if x0.len() != n {
        return Err(Error::InvalidInput(format!(
            "base point has dimension {}, function has {n}",
            x0.len()
        )));
    }
    if n == 0 || n > 2 {
        return Err(Error::InvalidInput(
            "sections are computed for n ∈ {1, 2}".into(),
        ));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Parameter(format!(
            "section height must be positive, got {h}"
        )));
    }
    if n == 2 && rays < 3 {
        return Err(Error::Parameter(format!(
            "need at least 3 rays, got {rays}"
        )));
    }
    let (lo, hi) = u.bounds();
    if (0..n).any(|d| x0[d] <= lo[d] || x0[d] >= hi[d]) {
        return Err(Error::InvalidInput(format!(
            "base point {x0:?} is not inside the domain"
        )));
    }
    let diam = lo
        .iter()
        .zip(&hi)
        .map(|(a, b)| (b - a) * (b - a))
        .sum::<f64>()
        .sqrt();
    let u0 = u.value(x0);
    let p0 = u.slope(x0);
    let excess = |x: &[f64]| -> f64 {
        let lin: f64 = (0..n).map(|d| p0[d] * (x[d] - x0[d])).sum();
        u.value(x) - u0 - lin
    };
    let inside = |x: &[f64]| (0..n).all(|d| x[d] >= lo[d] && x[d] <= hi[d]);
    let directions: Vec<Vec<f64>> = if n == 1 {
        vec![vec![-1.0], vec![1.0]]
    } else {
        (0..rays)
            .map(|j| {
                let t = 2.0 * std::f64::consts::PI * j as f64 / rays as f64;
                vec![t.cos(), t.sin()]
            })
            .collect()
    };
    let dt = diam / MARCH_STEPS;
    let mut vertices = Vec::with_capacity(directions.len());
    for e in &directions {
        let at = |t: f64| -> Vec<f64> { (0..n).map(|d| x0[d] + t * e[d]).collect() };
        let mut t_prev = 0.0;
        let mut v_prev = 0.0f64;
        let mut t = dt;
        loop {
            let x = at(t);
            if !inside(&x) {
                return Err(Error::SectionEscape(format!(
                    "S_{h}({x0:?}) reaches the domain boundary along direction {e:?}"
                )));
            }
            let v = excess(&x);
            if v < v_prev - 1e-9 * (h + v_prev.abs()) {
                return Err(Error::Precondition(format!(
                    "u − ℓ decreases along direction {e:?} from {v_prev} to {v} at t = {t}; \
                     u is not convex near {x0:?}"
                )));
            }
            if v >= h {
                break;
            }
            t_prev = t;
            v_prev = v;
            t += dt;
        }
        let (mut a, mut b) = (t_prev, t);
        while b - a > 1e-10 * diam {
            let mid = 0.5 * (a + b);
            if excess(&at(mid)) < h {
                a = mid;
            } else {
                b = mid;
            }
        }
        vertices.push(at(0.5 * (a + b)));
    }
    Ok(vertices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymMatrix;

    #[test]
    fn disk_section() {
        let u = AnalyticFunction::quadratic(&SymMatrix::identity(2), &[0.0, 0.0], 0.0).unwrap();
        let v = section(&u, &[0.0, 0.0], 0.02).unwrap();
        assert_eq!(v.len(), 256);
        for p in &v {
            assert!(((p[0] * p[0] + p[1] * p[1]).sqrt() - 0.2).abs() < 1e-8);
        }
    }

    #[test]
    fn concave_function_is_refused() {
        let u = AnalyticFunction::quadratic(&SymMatrix::scaled_identity(2, -1.0), &[0.0, 0.0], 0.0)
            .unwrap();
        assert!(matches!(
            section(&u, &[0.0, 0.0], 0.1),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn tall_section_escapes() {
        let u = AnalyticFunction::quadratic(&SymMatrix::identity(2), &[0.0, 0.0], 0.0).unwrap();
        assert!(matches!(
            section(&u, &[0.0, 0.0], 1.0),
            Err(Error::SectionEscape(_))
        ));
    }

    #[test]
    fn grid_interpolation_is_exact_on_bilinear() {
        let g = GridFunction::on_box(2, 0.0, 1.0, 0.25, |x| 1.0 + 2.0 * x[0] - x[1] + x[0] * x[1])
            .unwrap();
        let x = [0.3, 0.7];
        assert!((g.interpolate(&x) - (1.0 + 0.6 - 0.7 + 0.21)).abs() < 1e-14);
    }
}
