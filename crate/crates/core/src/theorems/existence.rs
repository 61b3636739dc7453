//! Existence conditions for fixed circles and the identity characterisation.

use crate::algebra::Element;
use crate::circle::Circle;
use crate::error::{Error, Result};
use crate::par;
use crate::space::{distance, Point, SampleSet, SelfMapping, SpaceInstance};

use super::{fixed_on, record, ConditionId, ConditionRecord, ConditionReport, TheoremReport};

/// Everything the circle conditions need at one member `x`.
pub(crate) struct MemberData {
    pub x: Point,
    pub tx: Point,
    /// `d(x, Tx)`
    pub displacement: Element,
    /// `phi(x) = d(x, x0)`
    pub phi_x: Element,
    /// `phi(Tx) = d(Tx, x0)`
    pub phi_tx: Element,
}

pub(crate) fn member_data(
    s: &SpaceInstance,
    t: &SelfMapping,
    center: &Point,
    members: &[Point],
) -> Result<Vec<MemberData>> {
    par::try_map(members, |x| {
        let tx = t.apply(x)?;
        Ok(MemberData {
            displacement: distance(s, x, &tx)?,
            phi_x: distance(s, x, center)?,
            phi_tx: distance(s, &tx, center)?,
            x: x.clone(),
            tx,
        })
    })
}

fn circle_record(
    id: ConditionId,
    radius: &Element,
    a: Option<&Element>,
    m: &MemberData,
) -> Result<ConditionRecord> {
    let (lhs, rhs) = match id {
        ConditionId::DisplacementBelowDrop | ConditionId::DropWithConjugate => {
            (m.displacement.clone(), m.phi_x.sub(&m.phi_tx)?)
        }
        ConditionId::RadiusBelowImage => (radius.clone(), m.phi_tx.clone()),
        ConditionId::DisplacementBelowExcess => (
            m.displacement.clone(),
            m.phi_x.add(&m.phi_tx)?.sub(&radius.scale(2.0))?,
        ),
        ConditionId::ImageBelowRadius => (m.phi_tx.clone(), radius.clone()),
        ConditionId::RadiusBelowConjugated => {
            let a = a.ok_or_else(|| Error::Contract("condition 2.7 needs A".into()))?;
            (
                radius.clone(),
                m.displacement.conjugate_by(a)?.add(&m.phi_tx)?,
            )
        }
        other => {
            return Err(Error::Contract(format!(
                "{other} is not a circle condition"
            )))
        }
    };
    record(&m.x, None, lhs, rhs)
}

fn circle_condition(
    id: ConditionId,
    radius: &Element,
    a: Option<&Element>,
    data: &[MemberData],
) -> Result<ConditionReport> {
    let records = par::try_map(data, |m| circle_record(id, radius, a, m))?;
    Ok(ConditionReport::from_records(id, records))
}

/// Evaluates any pair of circle conditions and the fixed-circle conclusion.
pub(crate) fn check_circle_pair(
    name: &str,
    ids: [ConditionId; 2],
    s: &SpaceInstance,
    t: &SelfMapping,
    c: &Circle,
    a: Option<&Element>,
    sample: &SampleSet,
) -> Result<TheoremReport> {
    let members = c.members(s, sample);
    let data = member_data(s, t, &c.center, &members)?;
    let conditions = ids
        .iter()
        .map(|id| circle_condition(*id, &c.radius, a, &data))
        .collect::<Result<Vec<_>>>()?;
    // Conclusion is computed from scratch, not from the condition data.
    let fixed = fixed_on(s, t, &members)?;
    let hypotheses = conditions.iter().all(|c| c.holds);
    TheoremReport {
        theorem: name.to_string(),
        conditions,
        conclusion_fixed: fixed.fixed,
        vacuous: fixed.vacuous,
        identity_on_sample: None,
        consistency: !hypotheses || fixed.fixed,
    }
    .into_checked()
}

/// `d(x, Tx) <= phi(x) - phi(Tx)` and `r <= d(Tx, x0)` on the circle.
///
/// `sample` supplies members for complement circles and is otherwise unused.
pub fn check_theorem5(
    s: &SpaceInstance,
    t: &SelfMapping,
    c: &Circle,
    sample: &SampleSet,
) -> Result<TheoremReport> {
    check_circle_pair(
        "5",
        [ConditionId::DisplacementBelowDrop, ConditionId::RadiusBelowImage],
        s,
        t,
        c,
        None,
        sample,
    )
}

/// `d(x, Tx) <= phi(x) + phi(Tx) - 2r` and `d(Tx, x0) <= r` on the circle.
pub fn check_theorem6(
    s: &SpaceInstance,
    t: &SelfMapping,
    c: &Circle,
    sample: &SampleSet,
) -> Result<TheoremReport> {
    check_circle_pair(
        "6",
        [
            ConditionId::DisplacementBelowExcess,
            ConditionId::ImageBelowRadius,
        ],
        s,
        t,
        c,
        None,
        sample,
    )
}

fn require_contractive(a: &Element, s: &SpaceInstance, bound: f64) -> Result<()> {
    if !a.descriptor().compatible(s.algebra()) {
        return Err(Error::Contract(format!("A = {a} is not in the space's algebra")));
    }
    let n = a.norm();
    if n >= bound {
        return Err(Error::Contract(format!("||A|| = {n} must be < {bound}")));
    }
    Ok(())
}

/// `d(x, Tx) <= phi(x) - phi(Tx)` and `r <= A* d(x, Tx) A + d(Tx, x0)` on the
/// circle, for a fixed `A` with `||A|| < 1`.
pub fn check_theorem7(
    s: &SpaceInstance,
    t: &SelfMapping,
    c: &Circle,
    a: &Element,
    sample: &SampleSet,
) -> Result<TheoremReport> {
    require_contractive(a, s, 1.0)?;
    check_circle_pair(
        "7",
        [
            ConditionId::DropWithConjugate,
            ConditionId::RadiusBelowConjugated,
        ],
        s,
        t,
        c,
        Some(a),
        sample,
    )
}

/// Result of scanning diagonal candidates `A` for the conjugated radius bound.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalScan {
    pub step: f64,
    pub candidates: usize,
    /// Candidates for which `r <= A* d(x, Tx) A + d(Tx, x0)` holds on every member.
    pub satisfying: usize,
    /// First satisfying candidate in scan order.
    pub first_satisfying: Option<Element>,
    /// The `A`-independent companion condition.
    pub drop_condition: ConditionReport,
    pub vacuous: bool,
}

/// Scans every diagonal `A` whose diagonal entries lie on the grid
/// `k * step` strictly inside `(-1, 1)`, as evidence for or against the
/// existence of an `A` satisfying the conjugated radius bound.
pub fn scan_theorem7_diagonal(
    s: &SpaceInstance,
    t: &SelfMapping,
    c: &Circle,
    sample: &SampleSet,
    step: f64,
) -> Result<DiagonalScan> {
    if !(step > 0.0 && step < 1.0) {
        return Err(Error::Contract(format!("grid step must lie in (0, 1), got {step}")));
    }
    let members = c.members(s, sample);
    let data = member_data(s, t, &c.center, &members)?;
    let drop_condition = circle_condition(ConditionId::DropWithConjugate, &c.radius, None, &data)?;

    let alg = *s.algebra();
    let dim = alg.dimension();
    let half = ((1.0 - 1e-12) / step).floor() as i64;
    let per_axis = (2 * half + 1) as usize;
    let candidates = per_axis
        .checked_pow(dim as u32)
        .filter(|n| *n <= 50_000_000)
        .ok_or_else(|| {
            Error::Contract(format!(
                "{per_axis}^{dim} candidates is too many for a grid scan"
            ))
        })?;
    let candidate = |mut idx: usize| -> Element {
        let mut diag = Vec::with_capacity(dim);
        for _ in 0..dim {
            let k = (idx % per_axis) as i64 - half;
            idx /= per_axis;
            diag.push(k as f64 * step);
        }
        alg.diag(&diag).expect("diagonal has the algebra's dimension")
    };
    let satisfies = |a: &Element| {
        data.iter().all(|m| {
            circle_record(ConditionId::RadiusBelowConjugated, &c.radius, Some(a), m)
                .map(|r| r.holds())
                .unwrap_or(false)
        })
    };
    let hits = par::map_range(candidates, |i| satisfies(&candidate(i)));
    let satisfying = hits.iter().filter(|h| **h).count();
    let first_satisfying = hits.iter().position(|h| *h).map(candidate);
    Ok(DiagonalScan {
        step,
        candidates,
        satisfying,
        first_satisfying,
        drop_condition,
        vacuous: members.is_empty(),
    })
}

/// `A* d(x, Tx) A <= phi(x) - phi(Tx)` over the whole sample, for invertible
/// `A` with `||A^-1|| < 1`. This holds exactly when `T` is the identity, so
/// the consistency flag requires the condition and the identity test to agree.
pub fn check_theorem8(
    s: &SpaceInstance,
    t: &SelfMapping,
    c: &Circle,
    a: &Element,
    sample: &SampleSet,
) -> Result<TheoremReport> {
    if !a.descriptor().compatible(s.algebra()) {
        return Err(Error::Contract(format!("A = {a} is not in the space's algebra")));
    }
    let inv = a
        .invert()
        .map_err(|e| Error::Contract(format!("A must be invertible: {e}")))?;
    if inv.norm() >= 1.0 {
        return Err(Error::Contract(format!(
            "||A^-1|| = {} must be < 1",
            inv.norm()
        )));
    }
    let data = member_data(s, t, &c.center, &sample.points)?;
    let records = par::try_map(&data, |m| {
        record(
            &m.x,
            None,
            m.displacement.conjugate_by(a)?,
            m.phi_x.sub(&m.phi_tx)?,
        )
    })?;
    let condition = ConditionReport::from_records(ConditionId::ConjugatedBelowDrop, records);
    let tol = s.tolerance();
    let identity = data.iter().all(|m| m.x.approx_eq(&m.tx, tol));
    let fixed = fixed_on(s, t, &c.members(s, sample))?;
    let holds = condition.holds;
    TheoremReport {
        theorem: "8".into(),
        conditions: vec![condition],
        conclusion_fixed: fixed.fixed && identity,
        vacuous: fixed.vacuous,
        identity_on_sample: Some(identity),
        consistency: holds == identity,
    }
    .into_checked()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::solve_circle;
    use crate::space::{sample_points, Region, Rule, SpaceKind};

    fn diag3() -> SpaceInstance {
        SpaceInstance::new(SpaceKind::RealLineDiag { alpha: 3.0 }).unwrap()
    }

    fn circle_2(s: &SpaceInstance) -> Circle {
        solve_circle(s, &Point::Scalar(0.0), &s.algebra().diag(&[2.0, 6.0]).unwrap()).unwrap()
    }

    #[test]
    fn reciprocal_mapping_breaks_radius_bound() {
        let s = diag3();
        let c = circle_2(&s);
        let t = SelfMapping::new(s, Rule::ReciprocalOrZero);
        let sample = sample_points(&s, 0, 10, &[]).unwrap();
        let r = check_theorem5(&s, &t, &c, &sample).unwrap();
        assert!(r.condition(ConditionId::DisplacementBelowDrop).unwrap().holds);
        let c23 = r.condition(ConditionId::RadiusBelowImage).unwrap();
        assert!(!c23.holds);
        assert_eq!(c23.records.len(), 2);
        assert!(!r.conclusion_fixed);
        assert!(r.consistency);
    }

    #[test]
    fn empty_circle_is_vacuous() {
        let s = diag3();
        let r2 = s.algebra().element(vec![2.0, 0.0, -1.0, 5.0]).unwrap();
        let c = solve_circle(&s, &Point::Scalar(0.0), &r2).unwrap();
        let t = SelfMapping::new(s, Rule::ReciprocalOrZero);
        let sample = sample_points(&s, 0, 10, &[]).unwrap();
        let r = check_theorem6(&s, &t, &c, &sample).unwrap();
        assert!(r.vacuous && r.conclusion_fixed && r.hypotheses_hold());
    }

    #[test]
    fn theorem7_rejects_large_a() {
        let s = diag3();
        let c = circle_2(&s);
        let t = SelfMapping::identity(s);
        let sample = sample_points(&s, 0, 10, &[]).unwrap();
        let a = s.algebra().diag(&[1.0, 0.5]).unwrap();
        assert!(matches!(
            check_theorem7(&s, &t, &c, &a, &sample),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn theorem8_identity_and_preconditions() {
        let s = diag3();
        let c = circle_2(&s);
        let sample = sample_points(&s, 4, 50, &[Point::Scalar(2.0), Point::Scalar(-2.0)]).unwrap();
        let a = s.algebra().diag(&[2.0, 2.0]).unwrap();
        let r = check_theorem8(&s, &SelfMapping::identity(s), &c, &a, &sample).unwrap();
        assert!(r.hypotheses_hold());
        assert_eq!(r.identity_on_sample, Some(true));
        assert!(r.conclusion_fixed);

        let half = s.algebra().diag(&[0.5, 0.5]).unwrap();
        assert!(check_theorem8(&s, &SelfMapping::identity(s), &c, &half, &sample).is_err());
        let singular = s.algebra().element(vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(check_theorem8(&s, &SelfMapping::identity(s), &c, &singular, &sample).is_err());
    }

    #[test]
    fn theorem8_fails_for_circle_fixer_that_is_not_identity() {
        let s = diag3();
        let c = circle_2(&s);
        let t = SelfMapping::new(s, Rule::Constant(Point::Scalar(0.0)))
            .with_circles(vec![c.clone()])
            .with_rule(Region::OnCircle, Rule::Identity);
        let sample = sample_points(&s, 4, 50, &[Point::Scalar(2.0), Point::Scalar(-2.0)]).unwrap();
        let a = s.algebra().diag(&[2.0, 2.0]).unwrap();
        let r = check_theorem8(&s, &t, &c, &a, &sample).unwrap();
        assert!(!r.hypotheses_hold());
        assert_eq!(r.identity_on_sample, Some(false));
        assert!(!r.conclusion_fixed);
    }

    #[test]
    fn diagonal_scan_counts() {
        let s = diag3();
        let c = circle_2(&s);
        let t = SelfMapping::identity(s);
        let sample = sample_points(&s, 0, 10, &[]).unwrap();
        let scan = scan_theorem7_diagonal(&s, &t, &c, &sample, 0.25).unwrap();
        // entries in {-0.75, ..., 0.75}: 7 per axis
        assert_eq!(scan.candidates, 49);
        // identity on the circle: r <= d(x, x0) always holds
        assert_eq!(scan.satisfying, 49);
        assert!(scan.drop_condition.holds);
        assert!(scan_theorem7_diagonal(&s, &t, &c, &sample, 0.0).is_err());
    }
}
