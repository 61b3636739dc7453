//! Classical contraction conditions and Picard iteration.

use crate::algebra::Element;
use crate::error::{Error, Result};
use crate::par;
use crate::space::{distance, Point, SampleSet, SelfMapping, SpaceInstance};

use super::uniqueness::{check_a, pair_record};
use super::{record, ConditionId, ConditionReport, UniquenessKind};

/// Potential for the Caristi-type condition; must map into the positive cone.
pub type Potential<'a> = &'a (dyn Fn(&Point) -> Result<Element> + Sync);

pub enum Contraction<'a> {
    Banach(Element),
    Kannan(Element),
    Ciric(Element),
    Caristi(Potential<'a>),
}

impl Contraction<'_> {
    pub fn condition(&self) -> ConditionId {
        match self {
            Contraction::Banach(_) => ConditionId::BanachPairs,
            Contraction::Kannan(_) => ConditionId::KannanPairs,
            Contraction::Ciric(_) => ConditionId::CiricPairs,
            Contraction::Caristi(_) => ConditionId::CaristiPoints,
        }
    }
}

/// Checks a contraction condition over all unordered sample pairs (single
/// points for the Caristi-type condition).
pub fn verify_contraction(
    s: &SpaceInstance,
    t: &SelfMapping,
    kind: &Contraction<'_>,
    sample: &SampleSet,
) -> Result<ConditionReport> {
    let id = kind.condition();
    let (pair_kind, a) = match kind {
        Contraction::Banach(a) => (UniquenessKind::Banach, a),
        Contraction::Kannan(a) => (UniquenessKind::Kannan, a),
        Contraction::Ciric(a) => (UniquenessKind::Ciric, a),
        Contraction::Caristi(phi) => {
            let records = par::try_map(&sample.points, |x| {
                let tx = t.apply(x)?;
                let (px, ptx) = (phi(x)?, phi(&tx)?);
                for v in [&px, &ptx] {
                    if !v.is_positive() {
                        return Err(Error::Contract(format!(
                            "potential value {v} is not positive"
                        )));
                    }
                }
                record(x, None, distance(s, x, &tx)?, px.sub(&ptx)?)
            })?;
            return Ok(ConditionReport::from_records(id, records));
        }
    };
    check_a(pair_kind, a, s)?;
    let n = sample.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let records = par::try_map(&pairs, |&(i, j)| {
        pair_record(pair_kind, s, t, a, &sample.points[i], &sample.points[j])
    })?;
    Ok(ConditionReport::from_records(id, records))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardOutcome {
    pub point: Point,
    /// Number of applications of `T` performed.
    pub iterations: usize,
    /// `||d(x_k, T x_k)||` for each visited iterate, starting with the start point.
    pub residuals: Vec<f64>,
}

/// Iterates `x <- T x` until `||d(x, T x)|| <= tol`.
pub fn picard_fixed_point(
    s: &SpaceInstance,
    t: &SelfMapping,
    start: &Point,
    tol: f64,
    max_iter: usize,
) -> Result<PicardOutcome> {
    if max_iter == 0 {
        return Err(Error::Contract("max_iter must be at least 1".into()));
    }
    let mut x = start.clone();
    let mut residuals = Vec::new();
    for k in 0..=max_iter {
        let tx = t.apply(&x)?;
        let r = distance(s, &x, &tx)?.norm();
        residuals.push(r);
        if r <= tol {
            return Ok(PicardOutcome {
                point: x,
                iterations: k,
                residuals,
            });
        }
        if k == max_iter {
            break;
        }
        x = tx;
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual: *residuals.last().unwrap(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{sample_points, Rule, SpaceKind};

    fn diag3() -> SpaceInstance {
        SpaceInstance::new(SpaceKind::RealLineDiag { alpha: 3.0 }).unwrap()
    }

    fn halve(s: SpaceInstance) -> SelfMapping {
        SelfMapping::new(
            s,
            Rule::Affine {
                scale: 0.5,
                shift: Point::Scalar(0.0),
            },
        )
    }

    #[test]
    fn halving_is_a_banach_contraction() {
        let s = diag3();
        let sample = sample_points(&s, 9, 60, &[]).unwrap();
        let a = s.algebra().diag(&[0.8, 0.8]).unwrap();
        let r = verify_contraction(&s, &halve(s), &Contraction::Banach(a), &sample).unwrap();
        assert!(r.holds);
        assert_eq!(r.records.len(), 60 * 59 / 2);
    }

    #[test]
    fn translation_is_not() {
        let s = diag3();
        let sample = sample_points(&s, 9, 30, &[]).unwrap();
        let t = SelfMapping::new(
            s,
            Rule::Affine {
                scale: 1.0,
                shift: Point::Scalar(1.0),
            },
        );
        for a in [[0.99, 0.99], [0.5, 0.9]] {
            let a = s.algebra().diag(&a).unwrap();
            assert!(!verify_contraction(&s, &t, &Contraction::Banach(a), &sample).unwrap().holds);
        }
    }

    #[test]
    fn identity_satisfies_caristi_for_any_potential() {
        let s = diag3();
        let sample = sample_points(&s, 9, 30, &[]).unwrap();
        let phi = |x: &Point| s.algebra().diag(&[x.coords()[0].abs(), 1.0]);
        let r = verify_contraction(&s, &SelfMapping::identity(s), &Contraction::Caristi(&phi), &sample)
            .unwrap();
        assert!(r.holds);
        let bad = |_: &Point| s.algebra().diag(&[-1.0, 0.0]);
        assert!(verify_contraction(&s, &SelfMapping::identity(s), &Contraction::Caristi(&bad), &sample)
            .is_err());
    }

    #[test]
    fn picard_converges_geometrically() {
        let s = diag3();
        let out = picard_fixed_point(&s, &halve(s), &Point::Scalar(10.0), 1e-9, 100).unwrap();
        assert!(out.point.coords()[0].abs() <= 1e-9);
        assert!(out.iterations <= 60);
        for w in out.residuals.windows(2) {
            assert!((w[1] - 0.5 * w[0]).abs() <= 1e-12 * w[0].max(1.0));
        }
    }

    #[test]
    fn picard_identity_and_divergence() {
        let s = diag3();
        let out = picard_fixed_point(&s, &SelfMapping::identity(s), &Point::Scalar(4.2), 1e-9, 5)
            .unwrap();
        assert_eq!(out.point, Point::Scalar(4.2));
        assert_eq!(out.iterations, 0);
        assert_eq!(out.residuals.len(), 1);

        let t = SelfMapping::new(
            s,
            Rule::Affine {
                scale: 1.0,
                shift: Point::Scalar(1.0),
            },
        );
        let err = picard_fixed_point(&s, &t, &Point::Scalar(0.0), 1e-9, 50).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { iterations: 50, .. }));
        assert!(picard_fixed_point(&s, &t, &Point::Scalar(0.0), 1e-9, 0).is_err());
    }
}
