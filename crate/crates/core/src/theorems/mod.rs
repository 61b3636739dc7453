//! Mechanical checkers for the fixed-point and fixed-circle conditions.
//!
//! Each condition is an inequality `lhs <= rhs` in the algebra's partial
//! order, evaluated at every circle member (existence conditions), every
//! sample point, or every relevant pair of points (contraction and
//! uniqueness conditions). Reports keep the full [`OrderVerdict`] so that an
//! incomparable pair is distinguishable from a reversed inequality; both
//! count as "does not hold".

mod contraction;
mod existence;
mod uniqueness;

use std::fmt;

use crate::algebra::{Element, OrderVerdict};
use crate::circle::Circle;
use crate::error::{Error, Result};
use crate::space::{distance, Point, SampleSet, SelfMapping, SpaceInstance};

pub use contraction::{picard_fixed_point, verify_contraction, Contraction, PicardOutcome};
pub use existence::{
    check_theorem5, check_theorem6, check_theorem7, check_theorem8, scan_theorem7_diagonal,
    DiagonalScan,
};
pub use uniqueness::{
    build_multi_circle_fixer, check_uniqueness, enumerate_fixed_circles, UniquenessKind,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConditionId {
    /// `d(Tx, Ty) <= A* d(x, y) A` on all pairs.
    BanachPairs,
    /// `d(Tx, Ty) <= A (d(Tx, y) + d(Ty, x))` on all pairs.
    KannanPairs,
    /// `d(x, Tx) <= phi(x) - phi(Tx)` for a user potential.
    CaristiPoints,
    /// `d(Tx, Ty) <= A* u(x, y) A` for some `u` among five distances.
    CiricPairs,
    /// `d(x, Tx) <= phi(x) - phi(Tx)` on the circle, `phi = d(., x0)`.
    DisplacementBelowDrop,
    /// `r <= d(Tx, x0)` on the circle.
    RadiusBelowImage,
    /// `d(x, Tx) <= phi(x) + phi(Tx) - 2r` on the circle.
    DisplacementBelowExcess,
    /// `d(Tx, x0) <= r` on the circle.
    ImageBelowRadius,
    /// Same inequality as `DisplacementBelowDrop`, paired with the conjugated bound.
    DropWithConjugate,
    /// `r <= A* d(x, Tx) A + d(Tx, x0)` on the circle.
    RadiusBelowConjugated,
    /// `A* d(x, Tx) A <= phi(x) - phi(Tx)` on the whole space.
    ConjugatedBelowDrop,
    /// Banach-type bound between circle members and outside points.
    BanachUniqueness,
    /// Kannan-type bound between circle members and outside points.
    KannanUniqueness,
    /// Ciric-type bound between circle members and outside points.
    CiricUniqueness,
}

impl ConditionId {
    pub const ALL: [ConditionId; 14] = [
        ConditionId::BanachPairs,
        ConditionId::KannanPairs,
        ConditionId::CaristiPoints,
        ConditionId::CiricPairs,
        ConditionId::DisplacementBelowDrop,
        ConditionId::RadiusBelowImage,
        ConditionId::DisplacementBelowExcess,
        ConditionId::ImageBelowRadius,
        ConditionId::DropWithConjugate,
        ConditionId::RadiusBelowConjugated,
        ConditionId::ConjugatedBelowDrop,
        ConditionId::BanachUniqueness,
        ConditionId::KannanUniqueness,
        ConditionId::CiricUniqueness,
    ];

    /// Short numeric tag used in scenario files and reports.
    pub fn tag(self) -> &'static str {
        match self {
            ConditionId::BanachPairs => "1.1",
            ConditionId::KannanPairs => "1.2",
            ConditionId::CaristiPoints => "1.3",
            ConditionId::CiricPairs => "1.4",
            ConditionId::DisplacementBelowDrop => "2.2",
            ConditionId::RadiusBelowImage => "2.3",
            ConditionId::DisplacementBelowExcess => "2.4",
            ConditionId::ImageBelowRadius => "2.5",
            ConditionId::DropWithConjugate => "2.6",
            ConditionId::RadiusBelowConjugated => "2.7",
            ConditionId::ConjugatedBelowDrop => "2.8",
            ConditionId::BanachUniqueness => "2.9",
            ConditionId::KannanUniqueness => "2.10",
            ConditionId::CiricUniqueness => "2.11",
        }
    }

    /// Whether the condition is evaluated pointwise on circle members.
    pub fn is_circle_condition(self) -> bool {
        matches!(
            self,
            ConditionId::DisplacementBelowDrop
                | ConditionId::RadiusBelowImage
                | ConditionId::DisplacementBelowExcess
                | ConditionId::ImageBelowRadius
                | ConditionId::DropWithConjugate
                | ConditionId::RadiusBelowConjugated
        )
    }
}

impl std::str::FromStr for ConditionId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        ConditionId::ALL
            .into_iter()
            .find(|c| c.tag() == s.trim())
            .ok_or_else(|| format!("unknown condition `{s}`"))
    }
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// One evaluated instance of a condition.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionRecord {
    pub point: Point,
    /// Second point for pairwise conditions.
    pub partner: Option<Point>,
    pub lhs: Element,
    pub rhs: Element,
    pub verdict: OrderVerdict,
    /// Which distance was used as `u(x, y)` for Ciric-type conditions.
    pub choice: Option<&'static str>,
}

impl ConditionRecord {
    pub fn holds(&self) -> bool {
        self.verdict.relation.is_le()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub id: ConditionId,
    pub records: Vec<ConditionRecord>,
    pub holds: bool,
    /// Index of the failing record with the largest slack.
    pub worst: Option<usize>,
}

impl ConditionReport {
    pub fn from_records(id: ConditionId, records: Vec<ConditionRecord>) -> Self {
        let mut worst: Option<usize> = None;
        for (i, r) in records.iter().enumerate() {
            if r.holds() {
                continue;
            }
            match worst {
                Some(w) if records[w].verdict.slack >= r.verdict.slack => {}
                _ => worst = Some(i),
            }
        }
        ConditionReport {
            id,
            holds: worst.is_none(),
            worst,
            records,
        }
    }

    pub fn witness(&self) -> Option<&ConditionRecord> {
        self.worst.map(|i| &self.records[i])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoremReport {
    pub theorem: String,
    pub conditions: Vec<ConditionReport>,
    /// `Tx = x` on every checked circle member.
    pub conclusion_fixed: bool,
    /// The circle had no members to check; `conclusion_fixed` holds vacuously.
    pub vacuous: bool,
    /// For the identity characterisation: whether `T` is the identity on the sample.
    pub identity_on_sample: Option<bool>,
    /// Hypotheses holding implies the conclusion.
    pub consistency: bool,
}

impl TheoremReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.conditions.iter().all(|c| c.holds)
    }

    pub fn condition(&self, id: ConditionId) -> Option<&ConditionReport> {
        self.conditions.iter().find(|c| c.id == id)
    }

    /// Human-readable dump used when the consistency flag fails.
    pub fn dump(&self) -> String {
        let mut out = format!(
            "theorem {}: fixed={} vacuous={} identity={:?}\n",
            self.theorem, self.conclusion_fixed, self.vacuous, self.identity_on_sample
        );
        for c in &self.conditions {
            out.push_str(&format!("  {} holds={}\n", c.id, c.holds));
            for r in &c.records {
                out.push_str(&format!(
                    "    x={} {} lhs={} rhs={} {:?}\n",
                    r.point,
                    r.partner.as_ref().map(|p| format!("y={p}")).unwrap_or_default(),
                    r.lhs,
                    r.rhs,
                    r.verdict.relation
                ));
            }
        }
        out
    }

    fn into_checked(self) -> Result<Self> {
        if self.consistency {
            Ok(self)
        } else {
            Err(Error::Inconsistent(self.dump()))
        }
    }
}

/// `phi(x) = d(x, x0)`, the potential attached to a circle center.
pub fn phi<'a>(s: &'a SpaceInstance, center: &'a Point) -> impl Fn(&Point) -> Result<Element> + 'a {
    move |x| distance(s, x, center)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedVerdict {
    pub fixed: bool,
    /// No members were available to check.
    pub vacuous: bool,
    /// First member that `T` moves.
    pub moved: Option<Point>,
}

/// Whether `Tx = x` for every member of `c` (complement circles are checked
/// on their members within `sample`).
pub fn is_fixed_circle(
    s: &SpaceInstance,
    t: &SelfMapping,
    c: &Circle,
    sample: &SampleSet,
) -> Result<FixedVerdict> {
    let members = c.members(s, sample);
    fixed_on(s, t, &members)
}

pub(crate) fn fixed_on(s: &SpaceInstance, t: &SelfMapping, members: &[Point]) -> Result<FixedVerdict> {
    let images = crate::par::try_map(members, |x| t.apply(x))?;
    let moved = members
        .iter()
        .zip(&images)
        .find(|(x, tx)| !x.approx_eq(tx, s.tolerance()))
        .map(|(x, _)| x.clone());
    Ok(FixedVerdict {
        fixed: moved.is_none(),
        vacuous: members.is_empty(),
        moved,
    })
}

pub(crate) fn record(
    point: &Point,
    partner: Option<&Point>,
    lhs: Element,
    rhs: Element,
) -> Result<ConditionRecord> {
    let verdict = lhs.leq(&rhs)?;
    Ok(ConditionRecord {
        point: point.clone(),
        partner: partner.cloned(),
        lhs,
        rhs,
        verdict,
        choice: None,
    })
}
