//! Discrete lower convex envelope of `−u⁻` after zero extension to the
//! doubled box.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::GridFunction;

const MAX_SWEEPS: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Extension {
    /// Nodes added before and after the original grid along each axis.
    pub pad_before: Vec<usize>,
    pub pad_after: Vec<usize>,
    pub fill_value: f64,
    pub description: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnvelopeResult {
    /// Envelope on the doubled box.
    pub gamma: GridFunction,
    /// Contact set {Γ = −u⁻} on the original grid, row-major.
    pub contact_mask: Vec<bool>,
    pub extension: Extension,
    pub sweeps: usize,
}

impl EnvelopeResult {
    /// Γ at the node of the original grid with flat index k.
    pub fn gamma_at_original(&self, original: &GridFunction, k: usize) -> f64 {
        let idx = original.multi(k);
        let shifted: Vec<usize> = idx
            .iter()
            .zip(&self.extension.pad_before)
            .map(|(i, p)| i + p)
            .collect();
        self.gamma.values[self.gamma.flat(&shifted)]
    }
}

/// Lower convex hull of the points (i, y_i), evaluated back at every i.
/// Monotone chain on equally spaced abscissae.
pub fn lower_hull_1d(y: &[f64]) -> Vec<f64> {
    let n = y.len();
    if n <= 2 {
        return y.to_vec();
    }
    let mut hull: Vec<usize> = Vec::with_capacity(n);
    for i in 0..n {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // Drop b when it lies on or above the chord from a to i.
            let cross = (b - a) as f64 * (y[i] - y[a]) - (i - a) as f64 * (y[b] - y[a]);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    let mut out = vec![0.0; n];
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        for (i, o) in out.iter_mut().enumerate().take(b + 1).skip(a) {
            let t = (i - a) as f64 / (b - a) as f64;
            *o = (1.0 - t) * y[a] + t * y[b];
        }
    }
    // Exact values at hull vertices.
    for &i in &hull {
        out[i] = y[i];
    }
    out
}

/// Replace every grid line in direction `dir` by its lower hull; returns the
/// largest decrease.
fn sweep(g: &mut GridFunction, dir: (i64, i64)) -> f64 {
    let mut change = 0.0f64;
    let (s0, s1) = (g.shape[0] as i64, g.shape[1] as i64);
    // Line starts: nodes whose predecessor along dir lies outside the grid.
    for k in 0..g.len() {
        let idx = g.multi(k);
        let (i, j) = (idx[0] as i64, idx[1] as i64);
        let (pi, pj) = (i - dir.0, j - dir.1);
        if pi >= 0 && pi < s0 && pj >= 0 && pj < s1 {
            continue;
        }
        let mut line = Vec::new();
        let (mut a, mut b) = (i, j);
        while a >= 0 && a < s0 && b >= 0 && b < s1 {
            line.push(g.flat(&[a as usize, b as usize]));
            a += dir.0;
            b += dir.1;
        }
        if line.len() < 3 {
            continue;
        }
        let vals: Vec<f64> = line.iter().map(|&n| g.values[n]).collect();
        let hull = lower_hull_1d(&vals);
        for (&n, (&old, &new)) in line.iter().zip(vals.iter().zip(&hull)) {
            if new < old {
                change = change.max(old - new);
                g.values[n] = new;
            }
        }
    }
    change
}

pub fn lower_convex_envelope(u: &GridFunction) -> Result<EnvelopeResult> {
    let n = u.dim();
    if n > 2 {
        return Err(Error::InvalidInput(
            "envelopes are computed for n ∈ {1, 2}".into(),
        ));
    }
    let pad_before: Vec<usize> = u.shape.iter().map(|s| (s - 1) / 2).collect();
    let pad_after: Vec<usize> = u.shape.iter().map(|s| (s - 1) - (s - 1) / 2).collect();
    let shape: Vec<usize> = u
        .shape
        .iter()
        .zip(pad_before.iter().zip(&pad_after))
        .map(|(s, (a, b))| s + a + b)
        .collect();
    let origin: Vec<f64> = u
        .origin
        .iter()
        .zip(&pad_before)
        .map(|(o, p)| o - *p as f64 * u.spacing)
        .collect();
    let len: usize = shape.iter().product();
    let mut gamma = GridFunction::new(shape, origin, u.spacing, vec![0.0; len])?;
    for k in 0..u.len() {
        let idx: Vec<usize> = u
            .multi(k)
            .iter()
            .zip(&pad_before)
            .map(|(i, p)| i + p)
            .collect();
        let slot = gamma.flat(&idx);
        gamma.values[slot] = u.values[k].min(0.0);
    }
    let scale = 1.0 + u.sup_norm();
    let mut sweeps = 0;
    if n == 1 {
        gamma.values = lower_hull_1d(&gamma.values);
        sweeps = 1;
    } else {
        let dirs = [(1, 0), (0, 1), (1, 1), (1, -1)];
        loop {
            let mut change = 0.0f64;
            for &d in &dirs {
                change = change.max(sweep(&mut gamma, d));
            }
            sweeps += 1;
            if change <= 1e-15 * scale || sweeps >= MAX_SWEEPS {
                break;
            }
        }
    }
    let extension = Extension {
        pad_before,
        pad_after,
        fill_value: 0.0,
        description: "zero extension of −u⁻ to the box of twice the side length, same center"
            .into(),
    };
    let mut result = EnvelopeResult {
        gamma,
        contact_mask: Vec::new(),
        extension,
        sweeps,
    };
    let tol = 1e-9 * scale;
    result.contact_mask = (0..u.len())
        .map(|k| (result.gamma_at_original(u, k) - u.values[k].min(0.0)).abs() <= tol)
        .collect();
    Ok(result)
}

/// Largest violation of the midpoint inequality Γ(x) ≤ (Γ(x+v) + Γ(x−v))/2
/// over axis and diagonal neighbors.
pub fn convexity_defect(g: &GridFunction) -> f64 {
    let dirs: Vec<Vec<i64>> = if g.dim() == 1 {
        vec![vec![1]]
    } else {
        vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![1, -1]]
    };
    let mut worst = 0.0f64;
    for k in 0..g.len() {
        for d in &dirs {
            let back: Vec<i64> = d.iter().map(|v| -v).collect();
            if let (Some(a), Some(b)) = (g.offset(k, d), g.offset(k, &back)) {
                worst = worst.max(g.values[k] - 0.5 * (g.values[a] + g.values[b]));
            }
        }
    }
    worst
}
