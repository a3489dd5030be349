use nelliptic::operators::{pucci, shift, sigma, PucciSign};
use nelliptic::{Family, Jet, OperatorSpec, Polynomial, SymMatrix};
use proptest::prelude::*;

/// Number of eigenvalues of `m` below `t`, from the inertia of an LDLᵀ
/// factorization of m − tI (Sylvester's law).
fn count_below(m: &SymMatrix, t: f64) -> usize {
    let n = m.dim();
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| m.get(i, j) - if i == j { t } else { 0.0 })
                .collect()
        })
        .collect();
    let mut neg = 0;
    for k in 0..n {
        let mut d = a[k][k];
        if d == 0.0 {
            d = -1e-300;
        }
        if d < 0.0 {
            neg += 1;
        }
        for i in k + 1..n {
            let l = a[i][k] / d;
            for j in k + 1..n {
                a[i][j] -= l * a[k][j];
            }
        }
    }
    neg
}

/// Eigenvalues by bisection on the inertia count.
fn bisection_eigenvalues(m: &SymMatrix) -> Vec<f64> {
    let n = m.dim();
    let bound = (0..n)
        .map(|i| (0..n).map(|j| m.get(i, j).abs()).sum::<f64>())
        .fold(0.0, f64::max)
        + 1.0;
    (0..n)
        .map(|k| {
            let (mut lo, mut hi) = (-bound, bound);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if count_below(m, mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

fn sym(n: usize, max: f64) -> impl Strategy<Value = SymMatrix> {
    prop::collection::vec(-max..max, n * (n + 1) / 2)
        .prop_map(move |u| SymMatrix::from_upper(n, u).unwrap())
}

fn pair(max: f64) -> impl Strategy<Value = (SymMatrix, SymMatrix)> {
    (1usize..=5).prop_flat_map(move |n| (sym(n, max), sym(n, max)))
}

fn lambdas() -> impl Strategy<Value = (f64, f64)> {
    (0.1f64..2.0, 0.0f64..3.0).prop_map(|(l, d)| (l, l + d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn jacobi_matches_bisection(m in (1usize..=6).prop_flat_map(|n| sym(n, 5.0))) {
        let got = m.eigenvalues().unwrap();
        let want = bisection_eigenvalues(&m);
        for (g, w) in got.iter().zip(&want) {
            prop_assert!((g - w).abs() < 1e-9 * (1.0 + w.abs()), "{got:?} vs {want:?}");
        }
        let prod: f64 = got.iter().product();
        prop_assert!((got.iter().sum::<f64>() - m.trace()).abs() < 1e-10 * (1.0 + m.frobenius_norm()));
        prop_assert!((prod - m.det()).abs() < 1e-8 * (1.0 + m.frobenius_norm()).powi(m.dim() as i32));
    }

    #[test]
    fn pucci_ordering_and_reflection((a, _) in pair(10.0), (l, big) in lambdas()) {
        let plus = pucci(&a, l, big, PucciSign::Plus).unwrap();
        let minus = pucci(&a, l, big, PucciSign::Minus).unwrap();
        prop_assert!(minus <= plus + 1e-12);
        let reflected = pucci(&a.scale(-1.0), l, big, PucciSign::Plus).unwrap();
        prop_assert!((minus + reflected).abs() < 1e-10 * (1.0 + plus.abs()));
        // Positive homogeneity.
        let scaled = pucci(&a.scale(2.5), l, big, PucciSign::Plus).unwrap();
        prop_assert!((scaled - 2.5 * plus).abs() < 1e-10 * (1.0 + plus.abs()));
    }

    #[test]
    fn pucci_sub_and_superadditivity((a, b) in pair(10.0), (l, big) in lambdas()) {
        let p = |m: &SymMatrix| pucci(m, l, big, PucciSign::Plus).unwrap();
        let q = |m: &SymMatrix| pucci(m, l, big, PucciSign::Minus).unwrap();
        let s = a.add(&b);
        let tol = 1e-10 * (1.0 + a.frobenius_norm() + b.frobenius_norm()) * big;
        prop_assert!(q(&a) + q(&b) <= q(&s) + tol);
        prop_assert!(q(&s) <= q(&a) + p(&b) + tol);
        prop_assert!(q(&a) + p(&b) <= p(&s) + tol);
        prop_assert!(p(&s) <= p(&a) + p(&b) + tol);
    }

    #[test]
    fn pucci_operators_satisfy_the_ellipticity_inequality((m, n) in pair(10.0), (l, big) in lambdas()) {
        for family in [
            Family::PucciPlus { lambda: l, big_lambda: big },
            Family::PucciMinus { lambda: l, big_lambda: big },
        ] {
            let op = OperatorSpec::new(family).unwrap();
            let f = |h: &SymMatrix| op.evaluate(&Jet::hessian(h.clone())).unwrap();
            let d = f(&m.add(&n)) - f(&m);
            let tol = 1e-10 * (1.0 + m.frobenius_norm() + n.frobenius_norm()) * big;
            prop_assert!(pucci(&n, l, big, PucciSign::Minus).unwrap() <= d + tol);
            prop_assert!(d <= pucci(&n, l, big, PucciSign::Plus).unwrap() + tol);
        }
    }

    #[test]
    fn shifted_operator_evaluates_the_moved_jet(
        m in sym(2, 3.0),
        coeffs in prop::collection::vec(-2.0f64..2.0, 6),
        p in prop::collection::vec(-2.0f64..2.0, 2),
        x in prop::collection::vec(-1.0f64..1.0, 2),
    ) {
        let poly = Polynomial::from_coeffs(2, 2, coeffs).unwrap();
        let op: OperatorSpec = "mc".parse().unwrap();
        let g = shift(&op, &poly, false).unwrap();
        let jet = Jet::new(m.clone(), p.clone(), 0.0, x.clone()).unwrap();
        let moved = Jet::new(
            m.add(&poly.hessian(&x)),
            p.iter().zip(poly.gradient(&x)).map(|(a, b)| a + b).collect(),
            poly.eval(&x),
            x.clone(),
        ).unwrap();
        let lhs = g.evaluate(&jet).unwrap();
        let rhs = op.evaluate(&moved).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);

        let g0 = shift(&op, &poly, true).unwrap();
        let origin = Jet::new(SymMatrix::zeros(2), vec![0.0; 2], 0.0, vec![0.0; 2]).unwrap();
        prop_assert!(g0.evaluate(&origin).unwrap().abs() < 1e-12);
    }

    #[test]
    fn operators_ignore_translations(m in sym(3, 3.0), x in prop::collection::vec(-5.0f64..5.0, 3)) {
        for text in ["pucci+:1:2", "sigma:2", "ma", "mc", "slag"] {
            let op: OperatorSpec = text.parse().unwrap();
            let at0 = Jet::new(m.clone(), vec![0.1, -0.2, 0.3], 0.0, vec![0.0; 3]).unwrap();
            let atx = Jet::new(m.clone(), vec![0.1, -0.2, 0.3], 0.0, x.clone()).unwrap();
            prop_assert_eq!(op.evaluate(&at0).unwrap(), op.evaluate(&atx).unwrap());
        }
    }

    #[test]
    fn sigma_two_is_the_sum_of_principal_minors(m in sym(3, 4.0)) {
        let e = m.eigenvalues().unwrap();
        let minors = m.get(0, 0) * m.get(1, 1) - m.get(0, 1).powi(2)
            + m.get(0, 0) * m.get(2, 2) - m.get(0, 2).powi(2)
            + m.get(1, 1) * m.get(2, 2) - m.get(1, 2).powi(2);
        prop_assert!((sigma(&e, 2) - minors).abs() < 1e-9 * (1.0 + minors.abs()));
        prop_assert!((sigma(&e, 3) - m.det()).abs() < 1e-8 * (1.0 + m.det().abs()));
    }
}

#[test]
fn mean_curvature_at_zero_gradient_is_the_laplacian() {
    let op: OperatorSpec = "mc".parse().unwrap();
    let m = SymMatrix::from_rows(&[vec![1.5, 0.3], vec![0.3, -0.25]]).unwrap();
    assert!((op.evaluate(&Jet::hessian(m)).unwrap() - 1.25).abs() < 1e-15);
}

#[test]
fn text_forms_round_trip() {
    for text in [
        "pucci+:1:2",
        "pucci-:0.5:3",
        "sigma:2",
        "quotient:3:1",
        "mc",
        "ma",
        "slag",
    ] {
        let op: OperatorSpec = text.parse().unwrap();
        let again: OperatorSpec = op.to_string().parse().unwrap();
        assert_eq!(op, again, "{text}");
    }
}
