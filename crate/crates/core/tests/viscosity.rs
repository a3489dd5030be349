use nelliptic::fixtures::fixture;
use nelliptic::regularity::{
    check_viscosity, check_viscosity_with, Side, Verdict, ViscosityOptions,
};
use nelliptic::{GridFunction, OperatorSpec};
use proptest::prelude::*;

fn quadratic_grid(a: f64, b: f64, c: f64) -> GridFunction {
    GridFunction::on_box(2, -1.0, 1.0, 0.125, |x| {
        0.5 * a * x[0] * x[0] + b * x[0] * x[1] + 0.5 * c * x[1] * x[1]
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    // A smooth u with F(D²u) < f strictly is a supersolution and nothing else.
    #[test]
    fn strict_supersolutions_pass_the_supersolution_test(
        a in -2.0f64..2.0, b in -1.0f64..1.0, c in -2.0f64..2.0, gap in 0.1f64..1.0,
    ) {
        let u = quadratic_grid(a, b, c);
        let op: OperatorSpec = "pucci+:1:2".parse().unwrap();
        let m = nelliptic::SymMatrix::from_rows(&[vec![a, b], vec![b, c]]).unwrap();
        let fu = nelliptic::operators::pucci(&m, 1.0, 2.0, nelliptic::operators::PucciSign::Plus).unwrap();
        let f = u.with_values(|_| fu + gap);
        let r = check_viscosity(&u, &op, &f, Side::Both, 1e-8).unwrap();
        prop_assert_eq!(r.super_counts.fail, 0);
        prop_assert!(r.sub_counts.fail > 0);

        let g = u.with_values(|_| fu - gap);
        let r = check_viscosity(&u, &op, &g, Side::Both, 1e-8).unwrap();
        prop_assert_eq!(r.sub_counts.fail, 0);
        prop_assert!(r.super_counts.fail > 0);
    }
}

#[test]
fn classical_monge_ampere_solution_passes() {
    let u = quadratic_grid(2.0, 0.5, 1.0);
    let op: OperatorSpec = "ma".parse().unwrap();
    let f = u.with_values(|_| 2.0 * 1.0 - 0.25);
    let r = check_viscosity(&u, &op, &f, Side::Both, 1e-8).unwrap();
    assert_eq!(r.failures(), 0);
}

#[test]
fn kink_is_not_a_supersolution_of_the_negative_laplace_problem() {
    let u =
        GridFunction::on_box(2, -0.5, 0.5, 0.0625, |x| (x[0] * x[0] + x[1] * x[1]).sqrt()).unwrap();
    let op: OperatorSpec = "pucci+:1:1".parse().unwrap();
    let f = u.with_values(|_| -1.0);
    let r = check_viscosity(&u, &op, &f, Side::Super, 1e-8).unwrap();
    let at0 = r
        .points
        .iter()
        .position(|x| x.iter().all(|v| *v == 0.0))
        .unwrap();
    assert_eq!(r.verdict_super[at0], Verdict::Fail);
    let w = r
        .witnesses
        .iter()
        .find(|w| w.point.iter().all(|v| *v == 0.0))
        .unwrap();
    assert!(w.m.spectral_radius().unwrap() < 1e-9);
    assert!(w.value > w.f);
}

#[test]
fn mean_curvature_profile_is_a_viscosity_solution_across_its_kink() {
    let fx = fixture("pmc:0.3").unwrap();
    let op = fx.operator().unwrap().clone();
    let h = 1.0 / 32.0;
    let u = GridFunction::on_box(2, 0.5, 1.5, h, |x| fx.eval(x)).unwrap();
    let f = u.with_values(|x| fx.rhs(x).unwrap_or(1.0));
    let opts = ViscosityOptions {
        rho: Some(4.0),
        ..Default::default()
    };
    let r = check_viscosity_with(&u, &op, &f, Side::Both, 0.01, &opts).unwrap();
    assert_eq!(r.failures(), 0, "{:?} {:?}", r.sub_counts, r.super_counts);
    // Nodes that straddle the unit circle are actually tested.
    let straddle: Vec<usize> = (0..r.points.len())
        .filter(|&i| ((r.points[i][0].powi(2) + r.points[i][1].powi(2)).sqrt() - 1.0).abs() <= h)
        .collect();
    assert!(!straddle.is_empty());
}
