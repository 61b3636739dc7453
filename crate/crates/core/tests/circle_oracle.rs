mod common;

use ccvms::circle::{solve_circle, Membership};
use ccvms::space::{Point, SpaceInstance, SpaceKind};
use common::*;
use proptest::prelude::*;

#[test]
fn analytic_circles_match_brute_force_on_the_corpus() {
    let mut compared = 0;
    for (name, sc) in corpus() {
        let p = sc.prepare().unwrap();
        if !p.space.kind().is_real_line() {
            continue;
        }
        for c in &p.circles {
            oracle_agrees(&p.space, c).unwrap_or_else(|e| panic!("{name}: {e}"));
            compared += 1;
        }
    }
    assert!(compared >= 10, "only {compared} circles compared");
}

#[test]
fn oracle_finds_known_roots() {
    let s = SpaceInstance::new(SpaceKind::RealLineDiag { alpha: 3.0 }).unwrap();
    let r = s.algebra().diag(&[2.0, 6.0]).unwrap();
    let roots = oracle_roots(&s, &Point::Scalar(0.0), &r, -8.0, 8.0);
    assert_eq!(roots.len(), 2);
    assert!(roots.iter().any(|x| (x + 2.0).abs() < 1e-9));
    assert!(roots.iter().any(|x| (x - 2.0).abs() < 1e-9));
}

#[test]
fn example9_closed_forms() {
    let s = SpaceInstance::new(SpaceKind::RealLineExpDiag { alpha: 2.0 }).unwrap();
    let e = std::f64::consts::E;
    let c1 = solve_circle(&s, &Point::Scalar(1.0), &s.algebra().diag(&[2.0 * e, 4.0 * e]).unwrap()).unwrap();
    let c2 = solve_circle(&s, &Point::Scalar(1.0), &s.algebra().diag(&[e / 2.0, e]).unwrap()).unwrap();
    let xs = |c: &ccvms::Circle| -> Vec<f64> { c.explicit_members().iter().map(|p| p.coords()[0]).collect() };
    let (l2, l3) = (2f64.ln(), 3f64.ln());
    assert_eq!(xs(&c1).len(), 1);
    assert!((xs(&c1)[0] - (1.0 + l3)).abs() <= 1e-9);
    let m2 = xs(&c2);
    assert_eq!(m2.len(), 2);
    assert!((m2[0] - (1.0 - l2)).abs() <= 1e-9);
    assert!((m2[1] - (1.0 + l3 - l2)).abs() <= 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn random_diag_circles_match_oracle(alpha in 0.5..4.0f64, x0 in -3.0..3.0f64, c in 0.1..4.0f64) {
        let s = SpaceInstance::new(SpaceKind::RealLineDiag { alpha }).unwrap();
        let circle = solve_circle(&s, &Point::Scalar(x0), &s.algebra().diag(&[c, alpha * c]).unwrap()).unwrap();
        prop_assert!(matches!(&circle.membership, Membership::ExplicitFinite(v) if v.len() == 2));
        oracle_agrees(&s, &circle).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn random_exp_circles_match_oracle(x0 in -2.0..2.0f64, c in 0.05..5.0f64) {
        let s = SpaceInstance::new(SpaceKind::RealLineExpDiag { alpha: 2.0 }).unwrap();
        let circle = solve_circle(&s, &Point::Scalar(x0), &s.algebra().diag(&[c, 2.0 * c]).unwrap()).unwrap();
        oracle_agrees(&s, &circle).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn off_range_radii_give_empty_circles(a in 0.1..4.0f64, b in 0.1..4.0f64) {
        prop_assume!((b - 3.0 * a).abs() > 1e-3);
        let s = SpaceInstance::new(SpaceKind::RealLineDiag { alpha: 3.0 }).unwrap();
        let circle = solve_circle(&s, &Point::Scalar(0.0), &s.algebra().diag(&[a, b]).unwrap()).unwrap();
        prop_assert!(circle.is_empty());
        prop_assert!(oracle_roots(&s, &Point::Scalar(0.0), &circle.radius, -8.0, 8.0).is_empty());
    }
}
