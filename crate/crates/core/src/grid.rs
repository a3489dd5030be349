//! Uniform tensor grids in one or two dimensions and their text file format.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyfit::{BallSampler, Samples};

const HEADER: &str = "nelliptic-grid v1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub shape: Vec<usize>,
    pub origin: Vec<f64>,
    pub spacing: f64,
    /// Row-major: the last axis varies fastest.
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn new(
        shape: Vec<usize>,
        origin: Vec<f64>,
        spacing: f64,
        values: Vec<f64>,
    ) -> Result<Self> {
        if shape.is_empty() || shape.len() > 2 || origin.len() != shape.len() {
            return Err(Error::InvalidInput(format!(
                "grids are 1- or 2-dimensional; got shape {shape:?}, origin {origin:?}"
            )));
        }
        if shape.iter().any(|&s| s < 2) {
            return Err(Error::InvalidInput(format!(
                "each axis needs ≥ 2 nodes, got {shape:?}"
            )));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "spacing must be positive, got {spacing}"
            )));
        }
        let len: usize = shape.iter().product();
        if values.len() != len {
            return Err(Error::InvalidInput(format!(
                "shape {shape:?} needs {len} values, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("grid values must be finite".into()));
        }
        Ok(GridFunction {
            shape,
            origin,
            spacing,
            values,
        })
    }

    /// Grid covering `[lo, hi]^dim` with spacing h; (hi − lo)/h must be an integer.
    pub fn on_box(dim: usize, lo: f64, hi: f64, h: f64, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let cells = (hi - lo) / h;
        let rounded = cells.round();
        if !(h > 0.0) || rounded < 1.0 || (cells - rounded).abs() > 1e-9 * cells.max(1.0) {
            return Err(Error::InvalidInput(format!(
                "box [{lo}, {hi}] is not a whole number of cells of size {h}"
            )));
        }
        let shape = vec![rounded as usize + 1; dim];
        let origin = vec![lo; dim];
        let mut g = GridFunction::new(
            shape,
            origin,
            h,
            vec![0.0; (rounded as usize + 1).pow(dim as u32)],
        )?;
        for k in 0..g.len() {
            g.values[k] = f(&g.point(k));
        }
        Ok(g)
    }

    pub fn with_values(&self, f: impl Fn(&[f64]) -> f64) -> GridFunction {
        let mut g = self.clone();
        for k in 0..g.len() {
            g.values[k] = f(&g.point(k));
        }
        g
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn same_layout(&self, other: &GridFunction) -> bool {
        self.shape == other.shape && self.origin == other.origin && self.spacing == other.spacing
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.shape)
            .fold(0, |acc, (i, s)| acc * s + i)
    }

    pub fn multi(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for d in (0..self.dim()).rev() {
            idx[d] = flat % self.shape[d];
            flat /= self.shape[d];
        }
        idx
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.multi(flat)
            .iter()
            .zip(&self.origin)
            .map(|(&i, o)| o + i as f64 * self.spacing)
            .collect()
    }

    pub fn is_boundary(&self, flat: usize) -> bool {
        self.multi(flat)
            .iter()
            .zip(&self.shape)
            .any(|(&i, &s)| i == 0 || i + 1 == s)
    }

    pub fn interior(&self) -> Vec<usize> {
        (0..self.len()).filter(|&k| !self.is_boundary(k)).collect()
    }

    /// Neighbor offset by `step` (signed node counts per axis), if inside.
    pub fn offset(&self, flat: usize, step: &[i64]) -> Option<usize> {
        let idx = self.multi(flat);
        let mut out = Vec::with_capacity(idx.len());
        for ((&i, &s), &d) in idx.iter().zip(&self.shape).zip(step) {
            let j = i as i64 + d;
            if j < 0 || j >= s as i64 {
                return None;
            }
            out.push(j as usize);
        }
        Some(self.flat(&out))
    }

    /// Node index at x if x is a grid node (within 1e−9·h).
    pub fn node_at(&self, x: &[f64]) -> Option<usize> {
        if x.len() != self.dim() {
            return None;
        }
        let mut idx = Vec::with_capacity(x.len());
        for ((xi, o), &s) in x.iter().zip(&self.origin).zip(&self.shape) {
            let t = (xi - o) / self.spacing;
            let r = t.round();
            if (t - r).abs() > 1e-9 || r < 0.0 || r >= s as f64 {
                return None;
            }
            idx.push(r as usize);
        }
        Some(self.flat(&idx))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    /// Distance from x to the boundary of the box.
    pub fn distance_to_boundary(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.origin)
            .zip(&self.shape)
            .map(|((xi, o), &s)| {
                let hi = o + (s - 1) as f64 * self.spacing;
                (xi - o).min(hi - xi)
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let join = |v: &[String]| v.join(" ");
        writeln!(s, "{HEADER}").unwrap();
        writeln!(s, "dim {}", self.dim()).unwrap();
        writeln!(
            s,
            "shape {}",
            join(&self.shape.iter().map(|v| v.to_string()).collect::<Vec<_>>())
        )
        .unwrap();
        writeln!(
            s,
            "origin {}",
            join(
                &self
                    .origin
                    .iter()
                    .map(|v| format!("{v:?}"))
                    .collect::<Vec<_>>()
            )
        )
        .unwrap();
        writeln!(s, "spacing {:?}", self.spacing).unwrap();
        for v in &self.values {
            writeln!(s, "{v:?}").unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| Error::Parse(format!("grid file ends before {what}")))
        };
        if next("header")?.trim() != HEADER {
            return Err(Error::Parse(format!(
                "grid file must start with {HEADER:?}"
            )));
        }
        fn field<'a>(line: &'a str, key: &str) -> Result<Vec<&'a str>> {
            let mut parts = line.split_whitespace();
            if parts.next() != Some(key) {
                return Err(Error::Parse(format!(
                    "expected a {key:?} line, got {line:?}"
                )));
            }
            Ok(parts.collect())
        }
        let parse_f = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number {s:?}")))
        };
        let parse_u = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad count {s:?}")))
        };
        let dim_line = next("dim")?;
        let dim = field(dim_line, "dim")?;
        let dim = parse_u(dim.first().copied().unwrap_or(""))?;
        let shape: Vec<usize> = field(next("shape")?, "shape")?
            .into_iter()
            .map(parse_u)
            .collect::<Result<_>>()?;
        let origin: Vec<f64> = field(next("origin")?, "origin")?
            .into_iter()
            .map(parse_f)
            .collect::<Result<_>>()?;
        let spacing_line = next("spacing")?;
        let spacing = field(spacing_line, "spacing")?;
        let spacing = parse_f(spacing.first().copied().unwrap_or(""))?;
        if shape.len() != dim {
            return Err(Error::Parse(format!("dim {dim} but shape {shape:?}")));
        }
        let values: Vec<f64> = lines
            .filter(|l| !l.trim().is_empty())
            .map(|l| parse_f(l.trim()))
            .collect::<Result<_>>()?;
        GridFunction::new(shape, origin, spacing, values)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

impl BallSampler for GridFunction {
    fn dim(&self) -> usize {
        self.shape.len()
    }

    fn sample_ball(&self, x0: &[f64], radius: f64) -> Samples {
        let mut out = Samples::default();
        // Only scan the bounding box of the ball.
        let lo: Vec<i64> = x0
            .iter()
            .zip(&self.origin)
            .map(|(c, o)| ((c - radius - o) / self.spacing).floor().max(0.0) as i64)
            .collect();
        let hi: Vec<i64> = x0
            .iter()
            .zip(&self.origin)
            .zip(&self.shape)
            .map(|((c, o), &s)| (((c + radius - o) / self.spacing).ceil() as i64).min(s as i64 - 1))
            .collect();
        let r2 = radius * radius * (1.0 + 1e-12);
        let mut idx = lo.clone();
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return out;
        }
        loop {
            let uidx: Vec<usize> = idx.iter().map(|&i| i as usize).collect();
            let k = self.flat(&uidx);
            let x = self.point(k);
            let d2: f64 = x.iter().zip(x0).map(|(a, b)| (a - b).powi(2)).sum();
            if d2 <= r2 {
                out.points.push(x);
                out.values.push(self.values[k]);
            }
            let mut d = idx.len();
            loop {
                if d == 0 {
                    return out;
                }
                d -= 1;
                if idx[d] < hi[d] {
                    idx[d] += 1;
                    break;
                }
                idx[d] = lo[d];
            }
        }
    }

    fn spacing(&self) -> Option<f64> {
        Some(self.spacing)
    }

    fn value_at(&self, x: &[f64]) -> Option<f64> {
        self.node_at(x).map(|k| self.values[k])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_round_trip() {
        let g = GridFunction::on_box(2, -1.0, 1.0, 0.5, |x| x[0] + 10.0 * x[1]).unwrap();
        assert_eq!(g.shape, vec![5, 5]);
        for k in 0..g.len() {
            assert_eq!(g.flat(&g.multi(k)), k);
        }
        assert_eq!(g.point(1), vec![-1.0, -0.5]);
        assert_eq!(g.interior().len(), 9);
        assert_eq!(g.node_at(&[0.0, 0.5]), Some(g.flat(&[2, 3])));
    }

    #[test]
    fn text_round_trip_is_exact() {
        let g =
            GridFunction::on_box(2, 0.0, 1.0, 0.1, |x| (x[0] * 3.7).sin() / 3.0 + x[1]).unwrap();
        let back = GridFunction::from_text(&g.to_text()).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.to_text(), g.to_text());
    }

    #[test]
    fn rejects_bad_files() {
        assert!(GridFunction::from_text("nope").is_err());
        assert!(GridFunction::from_text(
            "nelliptic-grid v1\ndim 1\nshape 3\norigin 0\nspacing 1\n1\n2\n"
        )
        .is_err());
        assert!(GridFunction::on_box(1, 0.0, 1.0, 0.3, |_| 0.0).is_err());
    }

    #[test]
    fn ball_samples() {
        let g = GridFunction::on_box(2, -1.0, 1.0, 0.25, |_| 1.0).unwrap();
        let s = g.sample_ball(&[0.0, 0.0], 0.5);
        assert_eq!(s.len(), 13);
    }
}
