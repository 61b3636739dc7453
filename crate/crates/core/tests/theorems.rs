mod common;

use ccvms::space::{sample_points, Point, Region, Rule, SelfMapping, SpaceInstance, SpaceKind};
use ccvms::theorems::{
    build_multi_circle_fixer, check_theorem5, check_theorem8, check_uniqueness, enumerate_fixed_circles,
    is_fixed_circle, picard_fixed_point, verify_contraction, Contraction, UniquenessKind,
};
use ccvms::{solve_circle, Circle, Error};
use proptest::prelude::*;

fn diag3() -> SpaceInstance {
    SpaceInstance::new(SpaceKind::RealLineDiag { alpha: 3.0 }).unwrap()
}

fn circle(s: &SpaceInstance, c: f64) -> Circle {
    solve_circle(s, &Point::Scalar(0.0), &s.algebra().diag(&[c, 3.0 * c]).unwrap()).unwrap()
}

fn halve(s: SpaceInstance) -> SelfMapping {
    SelfMapping::new(s, Rule::Affine { scale: 0.5, shift: Point::Scalar(0.0) })
}

#[test]
fn picard_halving_converges_within_sixty_steps() {
    let s = diag3();
    let t = halve(s);
    let a = s.algebra().diag(&[0.8, 0.8]).unwrap();
    let sample = sample_points(&s, 0, 60, &[Point::Scalar(10.0)]).unwrap();
    assert!(verify_contraction(&s, &t, &Contraction::Banach(a), &sample).unwrap().holds);

    let out = picard_fixed_point(&s, &t, &Point::Scalar(10.0), 1e-9, 60).unwrap();
    assert!(out.iterations <= 60);
    assert!(out.point.coords()[0].abs() <= 1e-9);
    // The residual halves at every step.
    for w in out.residuals.windows(2) {
        assert!(w[1] <= 0.5 * w[0] * (1.0 + 1e-12), "{w:?}");
    }
}

#[test]
fn picard_from_two_starts_agrees() {
    let s = diag3();
    let t = halve(s);
    let a = picard_fixed_point(&s, &t, &Point::Scalar(10.0), 1e-9, 60).unwrap();
    let b = picard_fixed_point(&s, &t, &Point::Scalar(-4.5), 1e-9, 60).unwrap();
    assert!((a.point.coords()[0] - b.point.coords()[0]).abs() <= 1e-8);
}

#[test]
fn picard_reports_divergence() {
    let s = diag3();
    let t = SelfMapping::new(s, Rule::Affine { scale: 2.0, shift: Point::Scalar(0.0) });
    let r = picard_fixed_point(&s, &t, &Point::Scalar(1.0), 1e-9, 10);
    assert!(matches!(r, Err(Error::NoConvergence { iterations: 10, .. })));
}

#[test]
fn doubling_is_not_a_banach_contraction() {
    let s = diag3();
    let t = SelfMapping::new(s, Rule::Affine { scale: 2.0, shift: Point::Scalar(0.0) });
    let a = s.algebra().diag(&[0.8, 0.8]).unwrap();
    let sample = sample_points(&s, 3, 20, &[]).unwrap();
    let r = verify_contraction(&s, &t, &Contraction::Banach(a), &sample).unwrap();
    assert!(!r.holds);
    assert!(r.witness().is_some());
}

#[test]
fn uniqueness_excludes_other_fixed_points() {
    let s = diag3();
    let c = circle(&s, 2.0);
    let a = s.algebra().diag(&[0.4, 0.4]).unwrap();
    let outside = sample_points(&s, 5, 80, &[Point::Scalar(1.0)]).unwrap();
    let members = sample_points(&s, 5, 10, &[]).unwrap();

    // Fixes the circle, sends the rest to 1, so 1 is a second fixed point.
    let extra = SelfMapping::new(s, Rule::Constant(Point::Scalar(1.0)))
        .with_circles(vec![c.clone()])
        .with_rule(Region::OnCircle, Rule::Identity);
    for kind in [UniquenessKind::Banach, UniquenessKind::Kannan, UniquenessKind::Ciric] {
        let r = check_uniqueness(&s, &extra, &c, kind, &a, &outside, &members).unwrap();
        assert!(!r.holds, "{kind:?} accepted a second fixed point");
    }
}

#[test]
fn uniqueness_soundness_over_constant_maps() {
    let s = diag3();
    let c = circle(&s, 2.0);
    let a = s.algebra().diag(&[0.4, 0.4]).unwrap();
    let outside = sample_points(&s, 9, 80, &[]).unwrap();
    for target in [-2.0, 0.0, 1.0, 2.0, 4.0] {
        let t = SelfMapping::new(s, Rule::Constant(Point::Scalar(target)))
            .with_circles(vec![c.clone()])
            .with_rule(Region::OnCircle, Rule::Identity);
        for kind in [UniquenessKind::Banach, UniquenessKind::Kannan, UniquenessKind::Ciric] {
            let r = check_uniqueness(&s, &t, &c, kind, &a, &outside, &outside).unwrap();
            if r.holds {
                for y in outside.iter().filter(|y| !c.contains(&s, y)) {
                    assert!(!t.apply(y).unwrap().approx_eq(y, 1e-9), "{kind:?}: {y} is fixed");
                }
            }
        }
    }
}

#[test]
fn multi_circle_fixer_round_trip() {
    let s = diag3();
    let circles = vec![circle(&s, 2.0), circle(&s, 1.0)];
    let t = build_multi_circle_fixer(&s, &circles, &Point::Scalar(5.0)).unwrap();
    let members: Vec<Point> = circles.iter().flat_map(|c| c.explicit_members().to_vec()).collect();
    let sample = sample_points(&s, 0, 200, &members).unwrap();
    for c in &circles {
        assert!(is_fixed_circle(&s, &t, c, &sample).unwrap().fixed);
        assert!(check_theorem5(&s, &t, c, &sample).unwrap().conclusion_fixed);
    }
    let found = enumerate_fixed_circles(&s, &t, &[Point::Scalar(0.0)], &sample).unwrap();
    for c in &circles {
        assert!(found.iter().any(|f| f.radius.approx_eq(&c.radius)), "missing {}", c.radius);
    }
    let on = build_multi_circle_fixer(&s, &circles, &Point::Scalar(-1.0));
    assert!(matches!(on, Err(Error::Contract(_))));
}

#[test]
fn theorem8_separates_identity() {
    let s = diag3();
    let c = circle(&s, 2.0);
    let a = s.algebra().diag(&[2.0, 2.0]).unwrap();
    let sample = sample_points(&s, 0, 200, &[]).unwrap();
    let id = check_theorem8(&s, &SelfMapping::identity(s), &c, &a, &sample).unwrap();
    assert!(id.hypotheses_hold() && id.identity_on_sample == Some(true));
    let moved = check_theorem8(&s, &halve(s), &c, &a, &sample).unwrap();
    assert!(!moved.hypotheses_hold());
    assert!(moved.consistency);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // A fixed point found by iteration is fixed, and the contraction check
    // accepts every affine map with |scale| < 0.64 = ||A||^2.
    #[test]
    fn affine_contractions_converge(scale in -0.63..0.63f64, shift in -2.0..2.0f64, start in -5.0..5.0f64) {
        let s = diag3();
        let t = SelfMapping::new(s, Rule::Affine { scale, shift: Point::Scalar(shift) });
        let a = s.algebra().diag(&[0.8, 0.8]).unwrap();
        let sample = sample_points(&s, 1, 25, &[]).unwrap();
        prop_assert!(verify_contraction(&s, &t, &Contraction::Banach(a), &sample).unwrap().holds);
        let out = picard_fixed_point(&s, &t, &Point::Scalar(start), 1e-10, 200).unwrap();
        let want = shift / (1.0 - scale);
        prop_assert!((out.point.coords()[0] - want).abs() <= 1e-8);
    }
}
