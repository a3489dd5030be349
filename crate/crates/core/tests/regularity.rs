use nelliptic::fixtures::{fixture, FixtureSampler};
use nelliptic::polyfit::{BallSampler, LatticeSampler};
use nelliptic::regularity::{campanato_table, estimate_exponent, CampanatoConfig, Classification};
use nelliptic::Polynomial;
use proptest::prelude::*;

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn alpha_of(f: &(dyn Fn(&[f64]) -> f64 + Sync), k: usize) -> f64 {
    let s = LatticeSampler { f, dim: 2, m: 8 };
    let rep = campanato_table(&s, &[0.0, 0.0], &CampanatoConfig::new(k, 0.5, 6)).unwrap();
    rep.alpha_hat.unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn synthetic_exponents_are_recovered(
        k in 0usize..3,
        a in prop::sample::select(vec![0.2, 0.5, 0.8]),
        raw in prop::collection::vec(-1.0f64..1.0, 6),
    ) {
        // Q of degree k with ‖Q‖₁ ≤ 1.
        let len = (k + 1) * (k + 2) / 2;
        let total: f64 = raw[..len].iter().map(|v| v.abs()).sum::<f64>().max(1.0);
        let q = Polynomial::from_coeffs(2, k, raw[..len].iter().map(|v| v / total).collect()).unwrap();
        let f = move |x: &[f64]| norm(x).powf(k as f64 + a) + q.eval(x);
        let got = alpha_of(&f, k);
        prop_assert!((got - a).abs() <= 0.02, "k={k} alpha={a} got {got}");
    }

    #[test]
    fn error_ladder_is_sandwiched(theta in 0.1f64..0.9) {
        let fx = fixture(&format!("slag:{theta}")).unwrap();
        let s = FixtureSampler { fixture: &fx, m: 8 };
        let rep = campanato_table(&s, &[0.0, 0.0], &CampanatoConfig::new(1, 0.5, 5)).unwrap();
        for w in rep.scales.windows(2) {
            let (prev, cur) = (&w[0], &w[1]);
            let resid = |x: &[f64], v: f64| (v - prev.fit.eval(x)).abs();
            // The lattices of successive balls differ, so each half of
            // E_m ≤ sup_{B_m}|u − P_{m−1}| ≤ E_{m−1} is checked on its own samples.
            let inner = s.sample_ball(&[0.0, 0.0], cur.r);
            let sup_inner = inner.points.iter().zip(&inner.values).map(|(x, v)| resid(x, *v)).fold(0.0, f64::max);
            prop_assert!(cur.error <= sup_inner + 1e-12);
            let outer = s.sample_ball(&[0.0, 0.0], prev.r);
            let sup_outer = outer
                .points
                .iter()
                .zip(&outer.values)
                .filter(|(x, _)| norm(x) <= cur.r)
                .map(|(x, v)| resid(x, *v))
                .fold(0.0, f64::max);
            prop_assert!(sup_outer <= prev.error + 1e-12);
        }
    }

    #[test]
    fn exponent_is_invariant_under_scaling(c in 0.1f64..10.0, s in 0.5f64..2.0) {
        let base = |x: &[f64]| norm(x).powf(1.3);
        let scaled = move |x: &[f64]| c * norm(&[s * x[0], s * x[1]]).powf(1.3);
        let a = alpha_of(&base, 1);
        let b = alpha_of(&scaled, 1);
        prop_assert!((a - b).abs() < 1e-6);
    }
}

#[test]
fn regression_recovers_exact_power_laws() {
    let data: Vec<(f64, f64)> = (0..6)
        .map(|m| {
            let r = 0.5f64.powi(m);
            (r, 3.0 * r.powf(1.7))
        })
        .collect();
    let e = estimate_exponent(&data, 1).unwrap();
    assert!((e.alpha_hat - 0.7).abs() < 1e-12);
    assert!((e.c_hat - 3.0).abs() < 1e-10);
}

#[test]
fn polynomials_are_classified_exact() {
    let f = |x: &[f64]| 1.0 + x[0] - 2.0 * x[1];
    let s = LatticeSampler {
        f: &f,
        dim: 2,
        m: 6,
    };
    let rep = campanato_table(&s, &[0.2, 0.1], &CampanatoConfig::new(1, 0.5, 5)).unwrap();
    assert_eq!(rep.classification, Classification::PolynomialExact);
    assert!(rep.alpha_hat.is_none());
}

#[test]
fn harmonic_data_is_smooth_beyond_degree_one() {
    let fx = fixture("harmonic:3").unwrap();
    let s = FixtureSampler { fixture: &fx, m: 8 };
    let rep = campanato_table(&s, &[0.0, 0.0], &CampanatoConfig::new(1, 0.5, 6)).unwrap();
    assert!(rep.alpha_clamped || rep.alpha_hat.unwrap() > 0.99);
}
