//! Discrete viscosity checker. At each interior node, quadratic test
//! functions built from the grid data are kept when they touch u on the
//! 3ⁿ-point neighborhood; each touching one must satisfy the equation's
//! inequality.
//!
//! Convention: a supersolution is touched from below and needs
//! F(D²φ, Dφ, φ, x0) ≤ f(x0); a subsolution is touched from above and needs
//! F(D²φ, Dφ, φ, x0) ≥ f(x0).

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::linalg::SymMatrix;
use crate::operators::{Jet, OperatorSpec};
use crate::solver::discrete_jet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Sub,
    Super,
    Both,
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sub" => Ok(Side::Sub),
            "super" => Ok(Side::Super),
            "both" => Ok(Side::Both),
            other => Err(Error::Parse(format!(
                "side must be sub, super or both, got {other:?}"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Vacuous,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerdictCounts {
    pub pass: usize,
    pub fail: usize,
    pub vacuous: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ViscosityOptions {
    /// Slopes per axis in the sweep over the one-sided difference interval.
    pub slopes: usize,
    /// Relative widening of that interval.
    pub inflation: f64,
    /// Test functions with max(|φ(x0)|, |Dφ|, ‖D²φ‖) > rho are discarded.
    pub rho: Option<f64>,
}

impl Default for ViscosityOptions {
    fn default() -> Self {
        ViscosityOptions {
            slopes: 32,
            inflation: 0.1,
            rho: None,
        }
    }
}

/// A failing test function φ(x) = u(x0) + p·(x−x0) + ½(x−x0)ᵀM(x−x0).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub point: Vec<f64>,
    pub side: Side,
    pub m: SymMatrix,
    pub p: Vec<f64>,
    /// F at the jet of φ.
    pub value: f64,
    pub f: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ViscosityReport {
    pub side: Side,
    pub tol: f64,
    pub options: ViscosityOptions,
    /// Points checked, in grid order; verdict vectors follow this order.
    pub points: Vec<Vec<f64>>,
    pub verdict_sub: Vec<Verdict>,
    pub verdict_super: Vec<Verdict>,
    pub sub_counts: VerdictCounts,
    pub super_counts: VerdictCounts,
    pub witnesses: Vec<Witness>,
    pub candidates_rejected_by_rho: usize,
}

impl ViscosityReport {
    pub fn failures(&self) -> usize {
        self.sub_counts.fail + self.super_counts.fail
    }
}

pub fn check_viscosity(
    u: &GridFunction,
    op: &OperatorSpec,
    f: &GridFunction,
    side: Side,
    tol: f64,
) -> Result<ViscosityReport> {
    check_viscosity_with(u, op, f, side, tol, &ViscosityOptions::default())
}

struct NodeOutcome {
    sub: Option<(Verdict, Option<Witness>)>,
    sup: Option<(Verdict, Option<Witness>)>,
    rejected: usize,
}

pub fn check_viscosity_with(
    u: &GridFunction,
    op: &OperatorSpec,
    f: &GridFunction,
    side: Side,
    tol: f64,
    opts: &ViscosityOptions,
) -> Result<ViscosityReport> {
    if !u.same_layout(f) {
        return Err(Error::InvalidInput(
            "u and f live on different grids".into(),
        ));
    }
    if u.dim() == 0 || u.dim() > 2 {
        return Err(Error::InvalidInput(
            "the checker works on 1D and 2D grids".into(),
        ));
    }
    if !(tol >= 0.0) {
        return Err(Error::Parameter(format!(
            "tol must be nonnegative, got {tol}"
        )));
    }
    if opts.slopes < 2 {
        return Err(Error::Parameter("need at least 2 slopes per axis".into()));
    }
    let nodes = u.interior();
    let outcomes: Vec<NodeOutcome> = nodes
        .par_iter()
        .map(|&k| check_node(u, op, f, k, side, tol, opts))
        .collect();
    let mut report = ViscosityReport {
        side,
        tol,
        options: opts.clone(),
        points: nodes.iter().map(|&k| u.point(k)).collect(),
        verdict_sub: Vec::new(),
        verdict_super: Vec::new(),
        sub_counts: VerdictCounts::default(),
        super_counts: VerdictCounts::default(),
        witnesses: Vec::new(),
        candidates_rejected_by_rho: 0,
    };
    let tally = |c: &mut VerdictCounts, v: Verdict| match v {
        Verdict::Pass => c.pass += 1,
        Verdict::Fail => c.fail += 1,
        Verdict::Vacuous => c.vacuous += 1,
    };
    for o in outcomes {
        report.candidates_rejected_by_rho += o.rejected;
        if let Some((v, w)) = o.sub {
            tally(&mut report.sub_counts, v);
            report.verdict_sub.push(v);
            report.witnesses.extend(w);
        }
        if let Some((v, w)) = o.sup {
            tally(&mut report.super_counts, v);
            report.verdict_super.push(v);
            report.witnesses.extend(w);
        }
    }
    Ok(report)
}

fn unit(n: usize, d: usize, s: i64) -> Vec<i64> {
    let mut v = vec![0i64; n];
    v[d] = s;
    v
}

/// Hessian candidates: centered, plus every combination of one-sided
/// (two-step) second differences on the diagonal.
fn hessian_candidates(u: &GridFunction, k: usize, centered: &SymMatrix) -> Vec<SymMatrix> {
    let n = u.dim();
    let h2 = u.spacing * u.spacing;
    let v = &u.values;
    let mut options: Vec<Vec<f64>> = Vec::with_capacity(n);
    for d in 0..n {
        let mut opts = vec![centered.get(d, d)];
        for s in [1i64, -1] {
            if let (Some(a), Some(b)) =
                (u.offset(k, &unit(n, d, s)), u.offset(k, &unit(n, d, 2 * s)))
            {
                opts.push((v[b] - 2.0 * v[a] + v[k]) / h2);
            }
        }
        options.push(opts);
    }
    let mut out = Vec::new();
    let total: usize = options.iter().map(|o| o.len()).product();
    for mut code in 0..total {
        let mut m = centered.clone();
        for (d, o) in options.iter().enumerate() {
            m.set(d, d, o[code % o.len()]);
            code /= o.len();
        }
        out.push(m);
    }
    out
}

/// Slope candidates: the centered gradient, then per axis a sweep across the
/// inflated interval between the one-sided differences, other components
/// centered.
fn slope_candidates(
    u: &GridFunction,
    k: usize,
    centered: &[f64],
    opts: &ViscosityOptions,
) -> Vec<Vec<f64>> {
    let n = u.dim();
    let h = u.spacing;
    let v = &u.values;
    let mut out = vec![centered.to_vec()];
    for d in 0..n {
        let fw = u.offset(k, &unit(n, d, 1)).map(|a| (v[a] - v[k]) / h);
        let bw = u.offset(k, &unit(n, d, -1)).map(|b| (v[k] - v[b]) / h);
        let (Some(fw), Some(bw)) = (fw, bw) else {
            continue;
        };
        let (lo, hi) = (fw.min(bw), fw.max(bw));
        let pad = opts.inflation * (hi - lo).max(1e-12 * (1.0 + hi.abs().max(lo.abs())));
        let (lo, hi) = (lo - pad, hi + pad);
        for j in 0..opts.slopes {
            let mut p = centered.to_vec();
            p[d] = lo + (hi - lo) * j as f64 / (opts.slopes - 1) as f64;
            out.push(p);
        }
    }
    out
}

fn check_node(
    u: &GridFunction,
    op: &OperatorSpec,
    f: &GridFunction,
    k: usize,
    side: Side,
    tol: f64,
    opts: &ViscosityOptions,
) -> NodeOutcome {
    let n = u.dim();
    let h = u.spacing;
    let v = &u.values;
    let x0 = u.point(k);
    let jet = discrete_jet(u, k).expect("interior node");
    let ms = hessian_candidates(u, k, &jet.m);
    let ps = slope_candidates(u, k, &jet.p, opts);
    let offsets: Vec<Vec<i64>> = if n == 1 {
        vec![vec![-1], vec![1]]
    } else {
        let mut o = Vec::new();
        for a in -1..=1 {
            for b in -1..=1 {
                if a != 0 || b != 0 {
                    o.push(vec![a, b]);
                }
            }
        }
        o
    };
    let nbrs: Vec<(Vec<f64>, f64)> = offsets
        .iter()
        .filter_map(|off| {
            u.offset(k, off)
                .map(|j| (off.iter().map(|&s| s as f64 * h).collect(), v[j] - v[k]))
        })
        .collect();
    let touch_tol =
        1e-10 * (1.0 + v[k].abs() + nbrs.iter().fold(0.0f64, |a, (_, d)| a.max(d.abs())));
    let f0 = f.values[k];
    let mut rejected = 0;
    // (touched, witness, Hessian norm of the witness): the flattest failing
    // test function is reported.
    let mut sub = (false, None::<Witness>, f64::INFINITY);
    let mut sup = (false, None::<Witness>, f64::INFINITY);
    let want_sub = matches!(side, Side::Sub | Side::Both);
    let want_sup = matches!(side, Side::Super | Side::Both);
    for m in &ms {
        let mnorm = m.spectral_radius().unwrap_or(f64::INFINITY);
        if !op.admissible(m).unwrap_or(false) {
            continue;
        }
        for p in &ps {
            if let Some(rho) = opts.rho {
                let pn = p.iter().map(|a| a * a).sum::<f64>().sqrt();
                if v[k].abs().max(pn).max(mnorm) > rho {
                    rejected += 1;
                    continue;
                }
            }
            // φ(x0 + y) − u(x0 + y) over the neighborhood.
            let mut above = f64::NEG_INFINITY;
            let mut below = f64::INFINITY;
            for (y, du) in &nbrs {
                let phi = p.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() + 0.5 * m.quad_form(y);
                let gap = phi - du;
                above = above.max(gap);
                below = below.min(gap);
            }
            let touches_below = above <= touch_tol;
            let touches_above = below >= -touch_tol;
            if !(touches_below && want_sup || touches_above && want_sub) {
                continue;
            }
            let test = Jet {
                m: m.clone(),
                p: p.clone(),
                s: v[k],
                x: x0.clone(),
            };
            let Ok(value) = op.evaluate(&test) else {
                continue;
            };
            let witness = |s: Side| Witness {
                point: x0.clone(),
                side: s,
                m: m.clone(),
                p: p.clone(),
                value,
                f: f0,
            };
            if touches_below && want_sup {
                sup.0 = true;
                if value - f0 - tol > 0.0 && mnorm < sup.2 {
                    sup.1 = Some(witness(Side::Super));
                    sup.2 = mnorm;
                }
            }
            if touches_above && want_sub {
                sub.0 = true;
                if f0 - value - tol > 0.0 && mnorm < sub.2 {
                    sub.1 = Some(witness(Side::Sub));
                    sub.2 = mnorm;
                }
            }
        }
    }
    let verdict = |(touched, w, _): (bool, Option<Witness>, f64)| -> (Verdict, Option<Witness>) {
        match (touched, w) {
            (_, Some(w)) => (Verdict::Fail, Some(w)),
            (true, None) => (Verdict::Pass, None),
            (false, None) => (Verdict::Vacuous, None),
        }
    };
    NodeOutcome {
        sub: want_sub.then(|| verdict(sub)),
        sup: want_sup.then(|| verdict(sup)),
        rejected,
    }
}
