//! Pointwise regularity measurement: decay of best polynomial approximations
//! across shrinking balls, exponent regression, oscillation profiles,
//! pointwise seminorms and a discrete viscosity checker.

mod viscosity;

pub use viscosity::{
    check_viscosity, check_viscosity_with, Side, Verdict, VerdictCounts, ViscosityOptions,
    ViscosityReport, Witness,
};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polyfit::{minimax_fit, minimax_fit_anchored, BallSampler, FitConstraint, MinimaxFit};
use crate::polynomial::Polynomial;

/// Fewest scales an exponent is fitted from.
pub const MIN_SCALES: usize = 4;
/// Noise floor for closed-form inputs.
pub const ANALYTIC_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CampanatoConfig {
    pub k: usize,
    pub eta: f64,
    pub r0: f64,
    pub levels: usize,
    pub constraint: Option<FitConstraint>,
    /// Cap C̄ in ‖P_m − P_{m−1}‖_{r_m} ≤ C̄ r_m^{k+α̂}; only checked, never enforced.
    pub norm_bound: Option<f64>,
}

impl CampanatoConfig {
    pub fn new(k: usize, r0: f64, levels: usize) -> Self {
        CampanatoConfig {
            k,
            eta: 0.5,
            r0,
            levels,
            constraint: None,
            norm_bound: None,
        }
    }

    pub fn radius(&self, m: usize) -> f64 {
        self.r0 * self.eta.powi(m as i32)
    }

    pub fn validate(&self, spacing: Option<f64>) -> Result<()> {
        if !(self.eta > 0.0 && self.eta <= 0.5) {
            return Err(Error::Parameter(format!(
                "eta must lie in (0, 1/2], got {}",
                self.eta
            )));
        }
        if !(self.r0 > 0.0 && self.r0.is_finite()) {
            return Err(Error::Parameter(format!(
                "r0 must be positive, got {}",
                self.r0
            )));
        }
        if self.levels == 0 {
            return Err(Error::Parameter("levels must be at least 1".into()));
        }
        if let Some(h) = spacing {
            let smallest = self.radius(self.levels - 1);
            if smallest <= 2.0 * h {
                return Err(Error::Parameter(format!(
                    "smallest radius {smallest} is not above twice the sample spacing {h}"
                )));
            }
        }
        if let Some(c) = self.norm_bound {
            if !(c > 0.0) {
                return Err(Error::Parameter(format!(
                    "norm_bound must be positive, got {c}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Scale {
    pub m: usize,
    pub r: f64,
    pub error: f64,
    pub fit: Polynomial,
    /// ‖P_m − P_{m−1}‖_{r_m}; absent at m = 0.
    pub diff_norm: Option<f64>,
    pub samples: usize,
    pub t_correction: f64,
    /// Whether E_m is above the noise floor.
    pub resolved: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    CkAlpha { alpha: f64 },
    PolynomialExact,
    BelowResolution,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularityReport {
    pub x0: Vec<f64>,
    pub k: usize,
    pub config: CampanatoConfig,
    pub scales: Vec<Scale>,
    pub noise_floor: f64,
    pub alpha_hat: Option<f64>,
    #[serde(rename = "C_hat")]
    pub c_hat: Option<f64>,
    /// Raw regression slope minus k, before clamping.
    pub alpha_raw: Option<f64>,
    pub alpha_clamped: bool,
    pub classification: Classification,
    /// Scales whose successive difference exceeds the configured cap.
    pub norm_bound_violations: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExponentEstimate {
    pub alpha_hat: f64,
    #[serde(rename = "C_hat")]
    pub c_hat: f64,
    pub alpha_raw: f64,
    /// α̂ was clamped to [0, 1] or sits on an end of that range.
    pub at_boundary: bool,
}

/// Least-squares slope of log E against log r, minus k.
pub fn estimate_exponent(scales: &[(f64, f64)], k: usize) -> Result<ExponentEstimate> {
    if scales.len() < MIN_SCALES {
        return Err(Error::InsufficientData(format!(
            "need at least {MIN_SCALES} scales, got {}",
            scales.len()
        )));
    }
    if let Some(&(r, e)) = scales.iter().find(|(r, e)| !(*r > 0.0 && *e > 0.0)) {
        return Err(Error::InvalidInput(format!(
            "radii and errors must be positive, got ({r}, {e})"
        )));
    }
    let xs: Vec<f64> = scales.iter().map(|(r, _)| r.ln()).collect();
    let ys: Vec<f64> = scales.iter().map(|(_, e)| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData(
            "all scales share one radius".into(),
        ));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let alpha_raw = sxy / sxx - k as f64;
    let alpha_hat = alpha_raw.clamp(0.0, 1.0);
    let at_boundary = alpha_raw <= 1e-9 || alpha_raw >= 1.0 - 1e-9;
    let expo = k as f64 + alpha_hat;
    let c_log = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| y - expo * x)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(ExponentEstimate {
        alpha_hat,
        c_hat: c_log.exp(),
        alpha_raw,
        at_boundary,
    })
}

/// Noise floor for a sampler: 10× the piecewise-linear interpolation error
/// h²/8·max|second difference| near x0 for grids, a fixed floor otherwise.
fn noise_floor(u: &dyn BallSampler, x0: &[f64], r0: f64) -> f64 {
    let Some(h) = u.spacing() else {
        return ANALYTIC_FLOOR;
    };
    let s = u.sample_ball(x0, r0);
    let n = x0.len();
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for (x, &v) in s.points.iter().zip(&s.values) {
        scale = scale.max(v.abs());
        for d in 0..n {
            let mut a = x.clone();
            let mut b = x.clone();
            a[d] += h;
            b[d] -= h;
            if let (Some(va), Some(vb)) = (u.value_at(&a), u.value_at(&b)) {
                worst = worst.max(((va - 2.0 * v + vb) / (h * h)).abs());
            }
        }
    }
    (10.0 * h * h / 8.0 * worst).max(ANALYTIC_FLOOR * (1.0 + scale))
}

fn fit_scale(
    u: &dyn BallSampler,
    x0: &[f64],
    cfg: &CampanatoConfig,
    m: usize,
) -> Result<MinimaxFit> {
    let r = cfg.radius(m);
    let s = u.sample_ball(x0, r);
    minimax_fit(&s.points, &s.values, x0, r, cfg.k, cfg.constraint.as_ref())
}

pub fn campanato_table(
    u: &dyn BallSampler,
    x0: &[f64],
    cfg: &CampanatoConfig,
) -> Result<RegularityReport> {
    if x0.len() != u.dim() {
        return Err(Error::InvalidInput(format!(
            "point has dimension {}, data has {}",
            x0.len(),
            u.dim()
        )));
    }
    cfg.validate(u.spacing())?;
    let fits: Vec<MinimaxFit> = (0..cfg.levels)
        .into_par_iter()
        .map(|m| fit_scale(u, x0, cfg, m))
        .collect::<Result<Vec<_>>>()?;
    let floor = noise_floor(u, x0, cfg.r0);
    let mut scales = Vec::with_capacity(fits.len());
    for (m, fit) in fits.iter().enumerate() {
        let r = cfg.radius(m);
        let diff_norm = if m == 0 {
            None
        } else {
            Some(fit.p.sub(&fits[m - 1].p).norm(r))
        };
        scales.push(Scale {
            m,
            r,
            error: fit.error.max(0.0),
            fit: fit.p.clone(),
            diff_norm,
            samples: fit.samples,
            t_correction: fit.t_correction,
            resolved: fit.error > floor,
        });
    }
    let usable: Vec<(f64, f64)> = scales
        .iter()
        .filter(|s| s.resolved)
        .map(|s| (s.r, s.error))
        .collect();
    let mut report = RegularityReport {
        x0: x0.to_vec(),
        k: cfg.k,
        config: cfg.clone(),
        scales,
        noise_floor: floor,
        alpha_hat: None,
        c_hat: None,
        alpha_raw: None,
        alpha_clamped: false,
        classification: Classification::BelowResolution,
        norm_bound_violations: Vec::new(),
    };
    if usable.is_empty() {
        report.classification = Classification::PolynomialExact;
        return Ok(report);
    }
    if usable.len() < MIN_SCALES {
        return Ok(report);
    }
    let est = estimate_exponent(&usable, cfg.k)?;
    report.alpha_hat = Some(est.alpha_hat);
    report.c_hat = Some(est.c_hat);
    report.alpha_raw = Some(est.alpha_raw);
    report.alpha_clamped = est.at_boundary;
    report.classification = Classification::CkAlpha {
        alpha: est.alpha_hat,
    };
    if let Some(cap) = cfg.norm_bound {
        let expo = cfg.k as f64 + est.alpha_hat;
        report.norm_bound_violations = report
            .scales
            .iter()
            .filter(|s| s.diff_norm.is_some_and(|d| d > cap * s.r.powf(expo)))
            .map(|s| s.m)
            .collect();
    }
    Ok(report)
}

/// (r, sup − inf of the samples in B_r(x0)) for each radius.
pub fn oscillation_profile(u: &dyn BallSampler, x0: &[f64], radii: &[f64]) -> Vec<(f64, f64)> {
    radii
        .iter()
        .map(|&r| {
            let s = u.sample_ball(x0, r);
            let (lo, hi) = s
                .values
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
                    (a.min(v), b.max(v))
                });
            (r, if s.is_empty() { 0.0 } else { hi - lo })
        })
        .collect()
}

/// max |u(x) − P(x)| / |x − x0|^{k+α} over the samples of every ball, with P
/// the degree-k fit at the smallest radius whose constant term is u(x0).
pub fn holder_seminorm(
    u: &dyn BallSampler,
    x0: &[f64],
    k: usize,
    alpha: f64,
    radii: &[f64],
) -> Result<f64> {
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::Parameter(
            "radii must be a nonempty list of positive numbers".into(),
        ));
    }
    let anchor = u
        .value_at(x0)
        .ok_or_else(|| Error::InvalidInput(format!("no sample at {x0:?}")))?;
    let rmin = radii.iter().cloned().fold(f64::INFINITY, f64::min);
    let s = u.sample_ball(x0, rmin);
    let fit = minimax_fit_anchored(&s.points, &s.values, x0, rmin, k, anchor)?;
    let expo = k as f64 + alpha;
    let mut worst = 0.0f64;
    for &r in radii {
        let s = u.sample_ball(x0, r);
        for (x, v) in s.points.iter().zip(&s.values) {
            let d = x
                .iter()
                .zip(x0)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            if d > 0.0 {
                worst = worst.max((v - fit.eval(x)).abs() / d.powf(expo));
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyfit::LatticeSampler;

    #[test]
    fn exact_power_law() {
        let s: Vec<(f64, f64)> = (0..6)
            .map(|m| {
                let r = 0.5f64.powi(m);
                (r, r.powf(2.5))
            })
            .collect();
        let e = estimate_exponent(&s, 2).unwrap();
        assert!((e.alpha_hat - 0.5).abs() < 1e-12);
        assert!((e.c_hat - 1.0).abs() < 1e-12);
        assert!(!e.at_boundary);
    }

    #[test]
    fn boundary_exponent_is_flagged() {
        let s: Vec<(f64, f64)> = (0..6)
            .map(|m| {
                let r = 0.5f64.powi(m);
                (r, r * r)
            })
            .collect();
        let e = estimate_exponent(&s, 2).unwrap();
        assert!(e.alpha_hat.abs() < 1e-12);
        assert!(e.at_boundary);
    }

    #[test]
    fn too_few_scales() {
        assert!(matches!(
            estimate_exponent(&[(1.0, 1.0), (0.5, 0.3), (0.25, 0.1)], 0),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn half_power_in_one_dimension() {
        let f = |x: &[f64]| x[0].abs().powf(1.5);
        let u = LatticeSampler {
            f: &f,
            dim: 1,
            m: 64,
        };
        let rep = campanato_table(&u, &[0.0], &CampanatoConfig::new(1, 1.0, 6)).unwrap();
        for s in &rep.scales {
            assert!((s.error - s.r.powf(1.5) / 2.0).abs() < 1e-12);
        }
        assert!((rep.alpha_hat.unwrap() - 0.5).abs() < 0.02);
    }

    #[test]
    fn polynomial_is_exact() {
        let f = |x: &[f64]| 1.0 + x[0] - 2.0 * x[1] + x[0] * x[1];
        let u = LatticeSampler {
            f: &f,
            dim: 2,
            m: 4,
        };
        let rep = campanato_table(&u, &[0.1, 0.2], &CampanatoConfig::new(2, 0.5, 5)).unwrap();
        assert_eq!(rep.classification, Classification::PolynomialExact);
        assert!(rep.scales.iter().all(|s| s.error <= 1e-10));
    }

    #[test]
    fn oscillation_of_linear_function() {
        let f = |x: &[f64]| x[0];
        let u = LatticeSampler {
            f: &f,
            dim: 2,
            m: 8,
        };
        for (r, osc) in oscillation_profile(&u, &[0.0, 0.0], &[1.0, 0.5, 0.25]) {
            assert!((osc - 2.0 * r).abs() < 1e-14);
        }
    }

    #[test]
    fn seminorm_of_matching_power() {
        let f = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>().sqrt().powf(0.4);
        let u = LatticeSampler {
            f: &f,
            dim: 2,
            m: 8,
        };
        let radii = [1.0, 0.5, 0.25, 0.125];
        let s = holder_seminorm(&u, &[0.0, 0.0], 0, 0.4, &radii).unwrap();
        assert!((s - 1.0).abs() < 1e-6);
    }
}
