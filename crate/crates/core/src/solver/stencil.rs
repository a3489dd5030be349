//! Wide-stencil direction sets on a 2D grid.

use crate::error::{Error, Result};
use crate::grid::GridFunction;

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Grid directions and orthogonal frames built from them.
#[derive(Clone, Debug)]
pub struct Stencil {
    pub dirs: Vec<(i64, i64)>,
    /// Pairs of indices into `dirs`; the first frame is the coordinate axes.
    pub frames: Vec<(usize, usize)>,
}

impl Stencil {
    /// Directions `(cos jπ/m, sin jπ/m)`, j < m, rounded to the nearest node
    /// at stencil radius 2 and reduced to primitive vectors. Rotating by 90°
    /// commutes with the rounding, so direction j and j + m/2 are exactly
    /// orthogonal.
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 || m % 2 != 0 {
            return Err(Error::Parameter(format!(
                "stencil_directions must be even and ≥ 2, got {m}"
            )));
        }
        let raw: Vec<(i64, i64)> = (0..m)
            .map(|j| {
                let a = j as f64 * std::f64::consts::PI / m as f64;
                let (x, y) = (
                    (2.0 * a.cos()).round() as i64,
                    (2.0 * a.sin()).round() as i64,
                );
                let g = gcd(x, y).max(1);
                (x / g, y / g)
            })
            .collect();
        let mut dirs: Vec<(i64, i64)> = Vec::new();
        let mut frames = Vec::new();
        let index_of = |v: (i64, i64), dirs: &mut Vec<(i64, i64)>| {
            if let Some(i) = dirs.iter().position(|&d| d == v || d == (-v.0, -v.1)) {
                i
            } else {
                dirs.push(v);
                dirs.len() - 1
            }
        };
        for j in 0..m / 2 {
            let a = index_of(raw[j], &mut dirs);
            let b = index_of(raw[j + m / 2], &mut dirs);
            if !frames.contains(&(a, b)) {
                frames.push((a, b));
            }
        }
        Ok(Stencil { dirs, frames })
    }

    pub fn axes_only() -> Self {
        Stencil {
            dirs: vec![(1, 0), (0, 1)],
            frames: vec![(0, 1)],
        }
    }

    /// Frames whose full stencil fits inside the grid at node k.
    pub fn usable_frames(&self, grid: &GridFunction, k: usize) -> Vec<usize> {
        (0..self.frames.len())
            .filter(|&f| {
                let (a, b) = self.frames[f];
                [a, b].iter().all(|&d| {
                    let (x, y) = self.dirs[d];
                    grid.offset(k, &[x, y]).is_some() && grid.offset(k, &[-x, -y]).is_some()
                })
            })
            .collect()
    }

    /// Largest flat-index distance of any stencil neighbor.
    pub fn reach(&self, row_len: usize) -> usize {
        self.dirs
            .iter()
            .map(|&(x, y)| (x.unsigned_abs() as usize) * row_len + y.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }
}

/// Second difference of u along `dir` at node k, normalized to a unit
/// direction, plus its three stencil entries (node, weight).
pub(crate) fn second_difference(
    grid: &GridFunction,
    u: &[f64],
    k: usize,
    dir: (i64, i64),
) -> (f64, [(usize, f64); 3]) {
    let plus = grid.offset(k, &[dir.0, dir.1]).expect("stencil fits");
    let minus = grid.offset(k, &[-dir.0, -dir.1]).expect("stencil fits");
    let len2 = (dir.0 * dir.0 + dir.1 * dir.1) as f64;
    let w = 1.0 / (len2 * grid.spacing * grid.spacing);
    let value = (u[plus] - 2.0 * u[k] + u[minus]) * w;
    (value, [(plus, w), (minus, w), (k, -2.0 * w)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frames_are_orthogonal() {
        for m in [2, 4, 6, 8, 12, 16] {
            let s = Stencil::new(m).unwrap();
            assert_eq!(s.frames[0], (0, 1));
            assert_eq!(s.dirs[0], (1, 0));
            for &(a, b) in &s.frames {
                let (u, v) = (s.dirs[a], s.dirs[b]);
                assert_eq!(u.0 * v.0 + u.1 * v.1, 0);
            }
        }
        assert_eq!(Stencil::new(8).unwrap().frames.len(), 4);
        assert!(Stencil::new(3).is_err());
    }
}
