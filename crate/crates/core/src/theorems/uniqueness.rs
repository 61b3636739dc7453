//! Uniqueness conditions, fixed-circle enumeration and the multi-circle fixer.

use crate::algebra::Element;
use crate::circle::{on_circle, solve_circle, Circle};
use crate::error::{Error, Result};
use crate::par;
use crate::space::{distance, Point, Region, Rule, SampleSet, SelfMapping, SpaceInstance};

use super::{fixed_on, record, ConditionId, ConditionRecord, ConditionReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UniquenessKind {
    /// `d(Tx, Ty) <= A* d(x, y) A`, `||A|| < 1`.
    Banach,
    /// `d(Tx, Ty) <= A (d(Tx, y) + d(Ty, x))`, `A` positive and central, `||A|| < 1/2`.
    Kannan,
    /// `d(Tx, Ty) <= A* u(x, y) A` for some `u` among five distances, `||A|| < 1`.
    Ciric,
}

impl UniquenessKind {
    pub fn condition(self) -> ConditionId {
        match self {
            UniquenessKind::Banach => ConditionId::BanachUniqueness,
            UniquenessKind::Kannan => ConditionId::KannanUniqueness,
            UniquenessKind::Ciric => ConditionId::CiricUniqueness,
        }
    }
}

impl std::str::FromStr for UniquenessKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "banach" => Ok(UniquenessKind::Banach),
            "kannan" => Ok(UniquenessKind::Kannan),
            "ciric" => Ok(UniquenessKind::Ciric),
            other => Err(format!("unknown contraction kind `{other}`")),
        }
    }
}

pub(crate) fn check_a(kind: UniquenessKind, a: &Element, s: &SpaceInstance) -> Result<()> {
    if !a.descriptor().compatible(s.algebra()) {
        return Err(Error::Contract(format!("A = {a} is not in the space's algebra")));
    }
    let n = a.norm();
    match kind {
        UniquenessKind::Banach | UniquenessKind::Ciric if n >= 1.0 => {
            Err(Error::Contract(format!("||A|| = {n} must be < 1")))
        }
        UniquenessKind::Kannan if n >= 0.5 => {
            Err(Error::Contract(format!("||A|| = {n} must be < 1/2")))
        }
        UniquenessKind::Kannan if !a.is_positive() => {
            Err(Error::Contract(format!("A = {a} must be positive")))
        }
        _ => Ok(()),
    }
}

const CIRIC_CHOICES: [&str; 5] = ["d(x,y)", "d(x,Tx)", "d(y,Ty)", "d(x,Ty)", "d(y,Tx)"];

/// Evaluates one pairwise contraction inequality at `(x, y)`.
pub(crate) fn pair_record(
    kind: UniquenessKind,
    s: &SpaceInstance,
    t: &SelfMapping,
    a: &Element,
    x: &Point,
    y: &Point,
) -> Result<ConditionRecord> {
    let tx = t.apply(x)?;
    let ty = t.apply(y)?;
    let lhs = distance(s, &tx, &ty)?;
    match kind {
        UniquenessKind::Banach => {
            let rhs = distance(s, x, y)?.conjugate_by(a)?;
            record(x, Some(y), lhs, rhs)
        }
        UniquenessKind::Kannan => {
            let d1 = distance(s, &tx, y)?;
            let d2 = distance(s, &ty, x)?;
            // Central-element proxy: A must commute with everything it meets.
            for v in [&lhs, &d1, &d2] {
                if !a.commutes_with(v)? {
                    return Err(Error::Contract(format!(
                        "A = {a} does not commute with metric value {v} at x={x}, y={y}"
                    )));
                }
            }
            let rhs = a.mul(&d1.add(&d2)?)?;
            record(x, Some(y), lhs, rhs)
        }
        UniquenessKind::Ciric => {
            let us = [
                distance(s, x, y)?,
                distance(s, x, &tx)?,
                distance(s, y, &ty)?,
                distance(s, x, &ty)?,
                distance(s, y, &tx)?,
            ];
            let mut best: Option<ConditionRecord> = None;
            for (u, name) in us.iter().zip(CIRIC_CHOICES) {
                let mut r = record(x, Some(y), lhs.clone(), u.conjugate_by(a)?)?;
                r.choice = Some(name);
                if r.holds() {
                    return Ok(r);
                }
                if best
                    .as_ref()
                    .map_or(true, |b| r.verdict.slack < b.verdict.slack)
                {
                    best = Some(r);
                }
            }
            Ok(best.expect("five choices evaluated"))
        }
    }
}

/// Checks a uniqueness condition for every pair `x` on the circle, `y` in
/// `outside` but not on the circle.
///
/// `circle_sample` supplies members for complement circles.
pub fn check_uniqueness(
    s: &SpaceInstance,
    t: &SelfMapping,
    c: &Circle,
    kind: UniquenessKind,
    a: &Element,
    outside: &SampleSet,
    circle_sample: &SampleSet,
) -> Result<ConditionReport> {
    check_a(kind, a, s)?;
    let members = c.members(s, circle_sample);
    let off: Vec<Point> = outside
        .iter()
        .filter(|y| !on_circle(s, c, y))
        .cloned()
        .collect();
    let pairs: Vec<(Point, Point)> = members
        .iter()
        .flat_map(|x| off.iter().map(move |y| (x.clone(), y.clone())))
        .collect();
    let id = kind.condition();
    let records = par::try_map(&pairs, |(x, y)| pair_record(kind, s, t, a, x, y))?;
    Ok(ConditionReport::from_records(id, records))
}

fn distinct_radii(s: &SpaceInstance, center: &Point, sample: &SampleSet) -> Result<Vec<Element>> {
    let ds = par::try_map(&sample.points, |x| distance(s, x, center))?;
    let mut radii: Vec<Element> = Vec::new();
    for d in ds {
        if !radii.iter().any(|r| r.approx_eq(&d)) {
            radii.push(d);
        }
    }
    Ok(radii)
}

/// Every circle `C(center, r)` fixed by `T`, for the candidate centers and
/// every radius realised as a distance from the center within `sample`.
/// Empty circles are skipped.
pub fn enumerate_fixed_circles(
    s: &SpaceInstance,
    t: &SelfMapping,
    centers: &[Point],
    sample: &SampleSet,
) -> Result<Vec<Circle>> {
    let mut out = Vec::new();
    for center in centers {
        for r in distinct_radii(s, center, sample)? {
            let c = solve_circle(s, center, &r)?;
            let verdict = fixed_on(s, t, &c.members(s, sample))?;
            if verdict.fixed && !verdict.vacuous {
                out.push(c);
            }
        }
    }
    Ok(out)
}

/// The mapping that fixes every point of the given circles and sends every
/// other point to `alpha`. Requires `d(alpha, x_i) != r_i` for each circle.
pub fn build_multi_circle_fixer(
    s: &SpaceInstance,
    circles: &[Circle],
    alpha: &Point,
) -> Result<SelfMapping> {
    s.validate(alpha)?;
    for (i, c) in circles.iter().enumerate() {
        if on_circle(s, c, alpha) {
            return Err(Error::Contract(format!(
                "alpha = {alpha} lies on circle #{} (center {}, radius {})",
                i + 1,
                c.center,
                c.radius
            )));
        }
    }
    Ok(SelfMapping::new(*s, Rule::Constant(alpha.clone()))
        .with_circles(circles.to_vec())
        .with_rule(Region::OnCircle, Rule::Identity))
}
