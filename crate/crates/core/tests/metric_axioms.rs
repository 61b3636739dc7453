mod common;

use ccvms::algebra::{AlgebraDescriptor, AlgebraKind};
use ccvms::space::{
    check_triples, distance, sample_points, verify_axioms, verify_axioms_with, Point, SpaceInstance,
    SpaceKind,
};
use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    // 1000 random triples per instance and per case.
    #[test]
    fn axioms_hold_on_random_triples(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (name, s) in space_instances() {
            let triples: Vec<[Point; 3]> = (0..1000)
                .map(|_| [random_point(&s, &mut rng), random_point(&s, &mut rng), random_point(&s, &mut rng)])
                .collect();
            if let Some(w) = check_triples(&s, &triples) {
                return Err(TestCaseError::fail(format!("{name}: axioms fail at {w:?}")));
            }
        }
    }

    #[test]
    fn distance_is_bitwise_symmetric(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (_, s) in space_instances() {
            for _ in 0..200 {
                let (x, y) = (random_point(&s, &mut rng), random_point(&s, &mut rng));
                prop_assert_eq!(distance(&s, &x, &y).unwrap(), distance(&s, &y, &x).unwrap());
                prop_assert!(distance(&s, &x, &x).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn discrete_metric_shape(x in -5.0..5.0f64, y in -5.0..5.0f64) {
        let s = SpaceInstance::new(SpaceKind::RealLineDiscrete).unwrap();
        let d = distance(&s, &Point::Scalar(x), &Point::Scalar(y)).unwrap();
        if x == y {
            prop_assert!(d.is_zero());
        } else {
            prop_assert_eq!(d, s.algebra().unit());
        }
    }
}

#[test]
fn axiom_report_examples() {
    let s = SpaceInstance::new(SpaceKind::RealLineDiag { alpha: 3.0 }).unwrap();
    assert!(verify_axioms(&s, &sample_points(&s, 0, 40, &[]).unwrap()).passed());
    let f = SpaceInstance::new(SpaceKind::StepFn { pieces: 3 }).unwrap();
    assert!(verify_axioms(&f, &sample_points(&f, 0, 20, &[]).unwrap()).passed());
}

#[test]
fn broken_metric_is_caught() {
    let d = AlgebraDescriptor::new(AlgebraKind::MatEntrywise, 2).unwrap();
    let points: Vec<Point> = [0.0, 1.0, 2.5].iter().map(|v| Point::Scalar(*v)).collect();
    let report = verify_axioms_with(&points, 1e-9, |x, y| {
        let t = x.coords()[0] - y.coords()[0];
        d.diag(&[t, t])
    });
    assert!(!report.passed());
    let sym = report.get("symmetry").unwrap();
    assert!(!sym.passed);
    assert_eq!(sym.witness.as_ref().unwrap().len(), 2);
}
