//! Sampling estimates of the ellipticity and structure constants of an
//! operator on the jet ball `|M|, |p|, |s| ≤ ρ`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{pucci_of_eigenvalues, Jet, OperatorSpec, PucciSign};
use crate::error::{Error, Result};
use crate::linalg::SymMatrix;

const GAUSS_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const CONSTANT_TOL: f64 = 1e-6;
const MODULUS_BASE_SAMPLES: usize = 64;
const MODULUS_LEVELS: i32 = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub rho: f64,
    /// Dimension; defaults to what the operator needs (at least 2).
    pub n: Option<usize>,
    pub samples: usize,
    pub seed: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            rho: 1.0,
            n: None,
            samples: 512,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureConstants {
    pub rho: f64,
    pub n: usize,
    pub samples: usize,
    pub lambda_hat: f64,
    #[serde(rename = "Lambda_hat")]
    pub big_lambda_hat: f64,
    pub b0_hat: f64,
    pub c0_hat: f64,
    pub modulus_samples: Vec<(f64, f64)>,
    pub violations: usize,
    pub pairs_checked: usize,
    /// Candidate jets discarded because they left the admissible set.
    pub rejected: usize,
}

/// Low-discrepancy points in [0,1)^d: a Halton sequence with a seeded
/// random shift modulo 1.
struct Halton {
    primes: Vec<u64>,
    shift: Vec<f64>,
}

impl Halton {
    fn new(dim: usize, seed: u64) -> Self {
        let mut primes = Vec::with_capacity(dim);
        let mut c = 2u64;
        while primes.len() < dim {
            if (2..c).take_while(|d| d * d <= c).all(|d| c % d != 0) {
                primes.push(c);
            }
            c += 1;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift = (0..dim).map(|_| rng.gen::<f64>()).collect();
        Halton { primes, shift }
    }

    fn point(&self, index: u64) -> Vec<f64> {
        self.primes
            .iter()
            .zip(&self.shift)
            .map(|(&b, &s)| {
                let mut i = index + 1;
                let mut f = 1.0;
                let mut r = 0.0;
                while i > 0 {
                    f /= b as f64;
                    r += f * (i % b) as f64;
                    i /= b;
                }
                (r + s).fract()
            })
            .collect()
    }
}

/// Radial law with a fifth of the mass on the sphere, so the extreme jets
/// of the ball are actually visited.
fn radial(u: f64) -> f64 {
    (1.25 * u).min(1.0)
}

fn sample_jet(coords: &[f64], n: usize, rho: f64) -> Result<Jet> {
    let nm = n * (n + 1) / 2;
    let dir = SymMatrix::from_upper(n, coords[..nm].iter().map(|c| 2.0 * c - 1.0).collect())?;
    let norm = dir.spectral_radius()?;
    let m = if norm > 0.0 {
        dir.scale(rho * radial(coords[nm]) / norm)
    } else {
        SymMatrix::zeros(n)
    };
    let d: Vec<f64> = coords[nm + 1..nm + 1 + n]
        .iter()
        .map(|c| 2.0 * c - 1.0)
        .collect();
    let dn = d.iter().map(|v| v * v).sum::<f64>().sqrt();
    let pr = rho * radial(coords[nm + 1 + n]);
    let p = if dn > 0.0 {
        d.iter().map(|v| v * pr / dn).collect()
    } else {
        vec![0.0; n]
    };
    let s = rho * (2.0 * coords[nm + 2 + n] - 1.0);
    Ok(Jet {
        m,
        p,
        s,
        x: vec![0.0; n],
    })
}

fn describe(jet: &Jet) -> String {
    format!("M={:?}, p={:?}, s={}", jet.m.upper(), jet.p, jet.s)
}

fn eval_at(op: &OperatorSpec, jet: &Jet) -> Result<f64> {
    op.evaluate(jet).map_err(|e| Error::ProbeDomain {
        jet: describe(jet),
        reason: e.to_string(),
    })
}

/// Central-difference D_M F at a jet.
pub(crate) fn dm_f(op: &OperatorSpec, jet: &Jet) -> Result<SymMatrix> {
    let n = jet.dim();
    let h = 1e-5 * jet.m.spectral_radius()?.max(1.0);
    let mut out = SymMatrix::zeros(n);
    let mut probe = jet.clone();
    for i in 0..n {
        for j in i..n {
            let base = jet.m.get(i, j);
            probe.m.set(i, j, base + h);
            let fp = eval_at(op, &probe)?;
            probe.m.set(i, j, base - h);
            let fm = eval_at(op, &probe)?;
            probe.m.set(i, j, base);
            let d = (fp - fm) / (2.0 * h);
            out.set(i, j, if i == j { d } else { d / 2.0 });
        }
    }
    Ok(out)
}

struct PairStats {
    eig_min: f64,
    eig_max: f64,
    diff: f64,
    n_eigs: Vec<f64>,
    n_norm: f64,
    b0: f64,
    c0: f64,
}

fn pair_stats(op: &OperatorSpec, a: &Jet, b: &Jet) -> Result<PairStats> {
    let mut eig_min = f64::INFINITY;
    let mut eig_max = f64::NEG_INFINITY;
    let mut track = |jet: &Jet| -> Result<()> {
        let e = dm_f(op, jet)?.eigenvalues()?;
        eig_min = eig_min.min(e[0]);
        eig_max = eig_max.max(e[e.len() - 1]);
        Ok(())
    };
    track(a)?;
    let nmat = b.m.sub(&a.m);
    for xi in GAUSS_NODES {
        let tau = 0.5 * (1.0 + xi);
        let mut node = a.clone();
        node.m = a.m.add(&nmat.scale(tau));
        track(&node)?;
    }
    let fa = eval_at(op, a)?;
    let mut moved = a.clone();
    moved.m = b.m.clone();
    let diff = eval_at(op, &moved)? - fa;

    let dp: f64 =
        a.p.iter()
            .zip(&b.p)
            .map(|(u, v)| (u - v).powi(2))
            .sum::<f64>()
            .sqrt();
    let b0 = if dp > 1e-12 {
        let mut q = a.clone();
        q.p = b.p.clone();
        (eval_at(op, &q)? - fa).abs() / dp
    } else {
        0.0
    };
    let ds = (a.s - b.s).abs();
    let c0 = if ds > 1e-12 {
        let mut q = a.clone();
        q.s = b.s;
        (eval_at(op, &q)? - fa).abs() / ds
    } else {
        0.0
    };
    Ok(PairStats {
        eig_min,
        eig_max,
        diff,
        n_norm: nmat.spectral_radius()?,
        n_eigs: nmat.eigenvalues()?,
        b0,
        c0,
    })
}

pub fn ellipticity_probe(op: &OperatorSpec, cfg: &ProbeConfig) -> Result<StructureConstants> {
    if !(cfg.rho > 0.0 && cfg.rho.is_finite()) {
        return Err(Error::Parameter(format!(
            "probe radius must be positive, got {}",
            cfg.rho
        )));
    }
    if cfg.samples < 2 {
        return Err(Error::Parameter("probe needs at least 2 samples".into()));
    }
    let n = cfg
        .n
        .or(op.dim_hint())
        .unwrap_or_else(|| op.min_dim().max(2));
    if n < op.min_dim() {
        return Err(Error::Parameter(format!(
            "dimension {n} is too small for {}",
            op.family
        )));
    }
    let rho = cfg.rho;
    let dim = n * (n + 1) / 2 + n + 3;
    let seq = Halton::new(dim, cfg.seed);

    // Anchor jet at p = 0, s = 0.
    let mut jets = Vec::with_capacity(cfg.samples);
    let zero = SymMatrix::zeros(n);
    let anchor = if op.admissible(&zero)? {
        zero
    } else {
        SymMatrix::scaled_identity(n, rho / 2.0)
    };
    jets.push(Jet::hessian(anchor));
    let mut rejected = 0usize;
    let mut index = 0u64;
    let max_candidates = 1000 * cfg.samples as u64;
    while jets.len() < cfg.samples {
        if index >= max_candidates {
            return Err(Error::ProbeDomain {
                jet: "(none)".into(),
                reason: "admissible set too thin to sample".into(),
            });
        }
        let jet = sample_jet(&seq.point(index), n, rho)?;
        index += 1;
        if op.admissible(&jet.m)? {
            jets.push(jet);
        } else {
            rejected += 1;
        }
    }

    let stats: Vec<Result<PairStats>> = (0..jets.len() - 1)
        .into_par_iter()
        .map(|i| pair_stats(op, &jets[i], &jets[i + 1]))
        .collect();
    let stats: Vec<PairStats> = stats.into_iter().collect::<Result<_>>()?;

    let mut lambda_hat = f64::INFINITY;
    let mut big_lambda_hat = f64::NEG_INFINITY;
    let mut b0_hat = 0.0f64;
    let mut c0_hat = 0.0f64;
    for s in &stats {
        lambda_hat = lambda_hat.min(s.eig_min);
        big_lambda_hat = big_lambda_hat.max(s.eig_max);
        b0_hat = b0_hat.max(s.b0);
        c0_hat = c0_hat.max(s.c0);
    }
    let last = dm_f(op, &jets[jets.len() - 1])?.eigenvalues()?;
    lambda_hat = lambda_hat.min(last[0]).max(0.0);
    big_lambda_hat = big_lambda_hat.max(last[last.len() - 1]).max(lambda_hat);

    let lo = (lambda_hat - CONSTANT_TOL).max(0.0);
    let hi = big_lambda_hat + CONSTANT_TOL;
    let violations = stats
        .iter()
        .filter(|s| {
            let tol = CONSTANT_TOL * (1.0 + s.n_norm);
            let lower = pucci_of_eigenvalues(&s.n_eigs, lo, hi, PucciSign::Minus);
            let upper = pucci_of_eigenvalues(&s.n_eigs, lo, hi, PucciSign::Plus);
            s.diff < lower - tol || s.diff > upper + tol
        })
        .count();

    let modulus_samples = modulus(op, &jets, &seq, n, rho)?;

    Ok(StructureConstants {
        rho,
        n,
        samples: jets.len(),
        lambda_hat,
        big_lambda_hat,
        b0_hat,
        c0_hat,
        modulus_samples,
        violations,
        pairs_checked: stats.len(),
        rejected,
    })
}

/// ω̂(r) on a dyadic ladder: largest change of D_M F under jet perturbations
/// of size r, followed by a running maximum so the estimate is monotone.
fn modulus(
    op: &OperatorSpec,
    jets: &[Jet],
    seq: &Halton,
    n: usize,
    rho: f64,
) -> Result<Vec<(f64, f64)>> {
    let base: Vec<&Jet> = jets.iter().take(MODULUS_BASE_SAMPLES).collect();
    let radii: Vec<f64> = (0..=MODULUS_LEVELS)
        .rev()
        .map(|j| rho * 2f64.powi(-j))
        .collect();
    let per_jet: Vec<Result<Vec<f64>>> = base
        .par_iter()
        .enumerate()
        .map(|(i, jet)| {
            // Unit perturbation direction drawn from the tail of the sequence.
            let dir = sample_jet(&seq.point(1_000_000 + i as u64), n, 1.0)?;
            let mn = dir.m.spectral_radius()?.max(1e-300);
            let pn = dir.p.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
            let d0 = dm_f(op, jet)?;
            radii
                .iter()
                .map(|&r| {
                    let moved = Jet {
                        m: jet.m.add(&dir.m.scale(r / mn)),
                        p: jet
                            .p
                            .iter()
                            .zip(&dir.p)
                            .map(|(a, b)| a + r * b / pn)
                            .collect(),
                        s: jet.s + r * dir.s.signum(),
                        x: jet.x.clone(),
                    };
                    if !op.admissible(&moved.m)? {
                        return Ok(0.0);
                    }
                    dm_f(op, &moved)?.sub(&d0).spectral_radius()
                })
                .collect()
        })
        .collect();
    let mut best = vec![0.0f64; radii.len()];
    for row in per_jet {
        for (b, v) in best.iter_mut().zip(row?) {
            *b = b.max(v);
        }
    }
    let mut running = 0.0f64;
    Ok(radii
        .into_iter()
        .zip(best)
        .map(|(r, w)| {
            running = running.max(w);
            (r, running)
        })
        .collect())
}
