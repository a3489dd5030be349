//! Normalization of a section by its minimum-volume enclosing ellipsoid.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{invert_dense, numerical_rank, SymMatrix};

// Section vertices are located to about 1e-9 relative accuracy; asking more
// of the ellipsoid only chases that noise.
const KHACHIYAN_TOL: f64 = 1e-8;
const KHACHIYAN_MAX_ITERS: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SectionNormalization {
    pub h: f64,
    pub vertices: Vec<Vec<f64>>,
    /// Linear part of the normalizing map y = T x (row-major n×n).
    #[serde(rename = "T")]
    pub t: Vec<Vec<f64>>,
    /// ỹ = T c, the image of the ellipsoid center c.
    pub center: Vec<f64>,
    /// Center of the enclosing ellipsoid in the original coordinates.
    pub ellipsoid_center: Vec<f64>,
    #[serde(rename = "detT")]
    pub det_t: f64,
    /// (det T)² hⁿ
    pub product: f64,
    /// max |T v − ỹ| over vertices (≤ 1 when enclosed).
    pub outer_radius: f64,
    /// Distance from ỹ to the boundary of the normalized polygon, times n
    /// (≥ 1 when the shrunk ellipsoid is inscribed).
    pub inner_margin: f64,
    pub enclosed: bool,
    pub inscribed: bool,
    pub iterations: usize,
}

/// Minimum-volume enclosing ellipsoid {x : (x−c)ᵀA(x−c) ≤ 1} by Khachiyan's
/// iteration with Todd–Yildirim away steps. Returns (A, c, iterations).
pub fn mvee(points: &[Vec<f64>], tol: f64) -> Result<(SymMatrix, Vec<f64>, usize)> {
    let m = points.len();
    let d = points.first().map(|p| p.len()).unwrap_or(0);
    if d == 0 || m < d + 1 {
        return Err(Error::Rank(format!("{m} points cannot span dimension {d}")));
    }
    let mut centered = Vec::with_capacity(m * d);
    let mean: Vec<f64> = (0..d)
        .map(|j| points.iter().map(|p| p[j]).sum::<f64>() / m as f64)
        .collect();
    for p in points {
        if p.len() != d {
            return Err(Error::InvalidInput("vertices have mixed dimensions".into()));
        }
        centered.extend(p.iter().zip(&mean).map(|(a, b)| a - b));
    }
    if numerical_rank(&centered, m, d, 1e-10) < d {
        return Err(Error::Rank("vertex set is flat".into()));
    }
    // Whiten by the scatter of the points so the moment matrices stay well
    // conditioned for small, elongated sections.
    let scatter = SymMatrix::from_fn(d, |i, j| {
        (0..m)
            .map(|k| centered[k * d + i] * centered[k * d + j])
            .sum::<f64>()
            / m as f64
    });
    let eig = scatter.eigen()?;
    let white = |i: usize, j: usize| eig.vectors[j * d + i] / eig.values[i].sqrt();
    let q = d + 1;
    let lifted: Vec<Vec<f64>> = (0..m)
        .map(|k| {
            let mut v: Vec<f64> = (0..d)
                .map(|i| (0..d).map(|j| white(i, j) * centered[k * d + j]).sum())
                .collect();
            v.push(1.0);
            v
        })
        .collect();
    let mut w = vec![1.0 / m as f64; m];
    let mut iterations = 0;
    loop {
        let mut x = vec![0.0; q * q];
        for (wi, v) in w.iter().zip(&lifted) {
            for a in 0..q {
                for b in 0..q {
                    x[a * q + b] += wi * v[a] * v[b];
                }
            }
        }
        let xinv =
            invert_dense(&x, q).ok_or_else(|| Error::Rank("moment matrix is singular".into()))?;
        let mahal: Vec<f64> = lifted
            .iter()
            .map(|v| {
                (0..q)
                    .map(|a| (0..q).map(|b| v[a] * xinv[a * q + b] * v[b]).sum::<f64>())
                    .sum()
            })
            .collect();
        let (jmax, kmax) = mahal
            .iter()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
            );
        let (jmin, kmin) = mahal.iter().enumerate().filter(|(i, _)| w[*i] > 0.0).fold(
            (0, f64::INFINITY),
            |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc },
        );
        let qf = q as f64;
        if kmax <= qf * (1.0 + tol) && kmin >= qf * (1.0 - tol) {
            break;
        }
        if iterations >= KHACHIYAN_MAX_ITERS {
            return Err(Error::IterationLimit {
                iterations,
                residual: kmax / qf - 1.0,
                history: Vec::new(),
            });
        }
        iterations += 1;
        if kmax - qf >= qf - kmin {
            let step = (kmax - qf) / (qf * (kmax - 1.0));
            w.iter_mut().for_each(|v| *v *= 1.0 - step);
            w[jmax] += step;
        } else {
            // Away step, capped so the weight stays nonnegative.
            let mut step = (qf - kmin) / (qf * (kmin - 1.0));
            let cap = w[jmin] / (1.0 - w[jmin]);
            if step > cap {
                step = cap;
            }
            w.iter_mut().for_each(|v| *v *= 1.0 + step);
            w[jmin] -= step;
            if w[jmin] < 0.0 {
                w[jmin] = 0.0;
            }
        }
    }
    let c_rel: Vec<f64> = (0..d)
        .map(|a| w.iter().zip(&lifted).map(|(wi, v)| wi * v[a]).sum())
        .collect();
    let mut s = vec![0.0; d * d];
    for (wi, v) in w.iter().zip(&lifted) {
        for a in 0..d {
            for b in 0..d {
                s[a * d + b] += wi * (v[a] - c_rel[a]) * (v[b] - c_rel[b]);
            }
        }
    }
    let sinv =
        invert_dense(&s, d).ok_or_else(|| Error::Rank("scatter matrix is singular".into()))?;
    // Back to the original coordinates: A = Wᵀ A_y W, c = mean + W⁻¹ c_y.
    let a = SymMatrix::from_fn(d, |i, j| {
        let mut acc = 0.0;
        for k in 0..d {
            for l in 0..d {
                acc += white(k, i) * sinv[k * d + l] * white(l, j);
            }
        }
        acc / d as f64
    });
    let c: Vec<f64> = (0..d)
        .map(|i| {
            mean[i]
                + (0..d)
                    .map(|k| eig.vectors[i * d + k] * eig.values[k].sqrt() * c_rel[k])
                    .sum::<f64>()
        })
        .collect();
    Ok((a, c, iterations))
}

/// Symmetric square root of a positive definite matrix.
fn sqrt_spd(a: &SymMatrix) -> Result<SymMatrix> {
    let mut e = a.eigen()?;
    if e.values[0] <= 0.0 {
        return Err(Error::Rank(
            "ellipsoid matrix is not positive definite".into(),
        ));
    }
    e.values.iter_mut().for_each(|v| *v = v.sqrt());
    Ok(e.reconstruct())
}

pub fn john_normalize(vertices: &[Vec<f64>], h: f64, n: usize) -> Result<SectionNormalization> {
    if !(h > 0.0) {
        return Err(Error::Parameter(format!(
            "section height must be positive, got {h}"
        )));
    }
    if vertices.iter().any(|v| v.len() != n) {
        return Err(Error::InvalidInput(format!(
            "vertices must have dimension {n}"
        )));
    }
    let (mut a, c, iterations) = mvee(vertices, KHACHIYAN_TOL)?;
    // Rescale so that every vertex is enclosed exactly.
    let worst = vertices
        .iter()
        .map(|v| {
            let r: Vec<f64> = v.iter().zip(&c).map(|(x, y)| x - y).collect();
            a.quad_form(&r)
        })
        .fold(0.0f64, f64::max);
    if worst > 1.0 {
        a = a.scale(1.0 / worst);
    }
    let t = sqrt_spd(&a)?;
    let det_t = a.det().sqrt();
    let center = t.mul_vec(&c);
    let images: Vec<Vec<f64>> = vertices.iter().map(|v| t.mul_vec(v)).collect();
    let dist = |y: &[f64]| -> f64 {
        y.iter()
            .zip(&center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    };
    let outer_radius = images.iter().map(|y| dist(y)).fold(0.0f64, f64::max);
    let inner = if n == 1 {
        images.iter().map(|y| dist(y)).fold(f64::INFINITY, f64::min)
    } else {
        // Distance from ỹ to each edge line of the polygon.
        let k = images.len();
        (0..k)
            .map(|i| {
                let p = &images[i];
                let q = &images[(i + 1) % k];
                let (ex, ey) = (q[0] - p[0], q[1] - p[1]);
                let len = (ex * ex + ey * ey).sqrt();
                if len == 0.0 {
                    return f64::INFINITY;
                }
                ((center[0] - p[0]) * ey - (center[1] - p[1]) * ex).abs() / len
            })
            .fold(f64::INFINITY, f64::min)
    };
    let inner_margin = inner * n as f64;
    Ok(SectionNormalization {
        h,
        vertices: vertices.to_vec(),
        t: (0..n)
            .map(|i| (0..n).map(|j| t.get(i, j)).collect())
            .collect(),
        center,
        ellipsoid_center: c,
        det_t,
        product: det_t * det_t * h.powi(n as i32),
        outer_radius,
        inner_margin,
        enclosed: outer_radius <= 1.0 + 1e-7,
        inscribed: inner_margin >= 1.0 - 1e-6,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ellipse(a: f64, b: f64, k: usize) -> Vec<Vec<f64>> {
        (0..k)
            .map(|j| {
                let t = 2.0 * std::f64::consts::PI * j as f64 / k as f64;
                vec![a * t.cos(), b * t.sin()]
            })
            .collect()
    }

    #[test]
    fn ellipse_normalization() {
        for h in [1e-3f64, 1e-2, 1e-1] {
            let v = ellipse((2.0 * h).sqrt(), (h / 2.0).sqrt(), 64);
            let s = john_normalize(&v, h, 2).unwrap();
            assert!((s.det_t * h - 1.0).abs() < 1e-7, "{}", s.det_t * h);
            assert!((s.product - 1.0).abs() < 1e-7);
            assert!(s.enclosed && s.inscribed);
        }
    }

    #[test]
    fn interval_normalization() {
        let s = john_normalize(&[vec![-0.5], vec![1.5]], 0.5, 1).unwrap();
        assert!((s.det_t - 1.0).abs() < 1e-9);
        assert!((s.center[0] - 0.5).abs() < 1e-9);
        assert!(s.enclosed && s.inscribed);
    }

    #[test]
    fn triangle_is_sandwiched() {
        let v = vec![vec![0.0, 0.0], vec![3.0, 0.0], vec![0.5, 1.0]];
        let s = john_normalize(&v, 1.0, 2).unwrap();
        assert!(s.enclosed);
        assert!(s.inscribed, "margin {}", s.inner_margin);
    }

    #[test]
    fn flat_vertices_are_refused() {
        let v = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]];
        assert!(matches!(john_normalize(&v, 1.0, 2), Err(Error::Rank(_))));
    }
}
