//! Circles `C(x0, r) = {x : d(x, x0) = r}`.
//!
//! Every built-in space has a closed-form circle, so `solve_circle` never
//! needs to search. The brute-force grid oracle used to cross-check these
//! closed forms lives in the test suite.

use serde::Serialize;

use crate::algebra::Element;
use crate::error::{Error, Result};
use crate::space::{distance, Point, SampleSet, SpaceInstance, SpaceKind};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "points", rename_all = "snake_case")]
pub enum Membership {
    /// Exactly these points (possibly none).
    ExplicitFinite(Vec<Point>),
    /// Every point of the space except these.
    ComplementOfFinite(Vec<Point>),
    /// Members found in a sample.
    Sampled(Vec<Point>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circle {
    pub center: Point,
    pub radius: Element,
    pub membership: Membership,
}

impl Circle {
    /// An empty explicit circle.
    pub fn is_empty(&self) -> bool {
        matches!(&self.membership, Membership::ExplicitFinite(v) if v.is_empty())
    }

    /// Explicitly known members; empty for complement circles.
    pub fn explicit_members(&self) -> &[Point] {
        match &self.membership {
            Membership::ExplicitFinite(v) | Membership::Sampled(v) => v,
            Membership::ComplementOfFinite(_) => &[],
        }
    }

    /// Members to check: the explicit list, or for complement circles the
    /// sample points that are not excluded.
    pub fn members(&self, s: &SpaceInstance, sample: &SampleSet) -> Vec<Point> {
        match &self.membership {
            Membership::ExplicitFinite(v) | Membership::Sampled(v) => v.clone(),
            Membership::ComplementOfFinite(excluded) => {
                let tol = s.tolerance();
                sample
                    .iter()
                    .filter(|p| !excluded.iter().any(|e| e.approx_eq(p, tol)))
                    .cloned()
                    .collect()
            }
        }
    }

    /// Membership by representation (no distance evaluation).
    pub fn contains(&self, s: &SpaceInstance, x: &Point) -> bool {
        let tol = s.tolerance();
        match &self.membership {
            Membership::ExplicitFinite(v) | Membership::Sampled(v) => {
                v.iter().any(|p| p.approx_eq(x, tol))
            }
            Membership::ComplementOfFinite(ex) => {
                s.validate(x).is_ok() && !ex.iter().any(|p| p.approx_eq(x, tol))
            }
        }
    }
}

fn push_unique(out: &mut Vec<Point>, p: Point, tol: f64) {
    if !out.iter().any(|q| q.approx_eq(&p, tol)) {
        out.push(p);
    }
}

/// Closed-form circle for each built-in space.
///
/// A radius outside the range of the metric gives an empty circle. In
/// particular a radius outside the positive cone (for example a matrix with a
/// negative off-diagonal entry) can never equal a distance value, so it
/// yields the empty circle rather than an error.
pub fn solve_circle(s: &SpaceInstance, center: &Point, radius: &Element) -> Result<Circle> {
    s.validate(center)?;
    if !radius.descriptor().compatible(s.algebra()) {
        return Err(Error::Contract(format!(
            "radius {radius} is not an element of {}({})",
            s.algebra().kind(),
            s.algebra().dimension()
        )));
    }
    let tol = s.tolerance();
    let circle = |members: Membership| Circle {
        center: center.clone(),
        radius: radius.clone(),
        membership: members,
    };
    let empty = || circle(Membership::ExplicitFinite(Vec::new()));

    if !radius.is_positive() {
        return Ok(empty());
    }
    if radius.is_zero() {
        return Ok(circle(Membership::ExplicitFinite(vec![center.clone()])));
    }

    let mut members = Vec::new();
    match s.kind() {
        SpaceKind::RealLineDiag { alpha } | SpaceKind::RealLineExpDiag { alpha } => {
            // Range is {diag(c, alpha c) : c >= 0}.
            if !radius.is_diagonal() {
                return Ok(empty());
            }
            let diag = radius.diagonal();
            let c = diag[0];
            if (diag[1] - alpha * c).abs() > tol {
                return Ok(empty());
            }
            let x0 = center.coords()[0];
            if matches!(s.kind(), SpaceKind::RealLineDiag { .. }) {
                push_unique(&mut members, Point::Scalar(x0 - c), tol);
                push_unique(&mut members, Point::Scalar(x0 + c), tol);
            } else {
                // |e^x - e^x0| = c  =>  x = x0 + ln(1 +- c e^-x0).
                let rel = c * (-x0).exp();
                if rel < 1.0 {
                    push_unique(&mut members, Point::Scalar(x0 + (-rel).ln_1p()), tol);
                }
                push_unique(&mut members, Point::Scalar(x0 + rel.ln_1p()), tol);
            }
        }
        SpaceKind::RealLineDiscrete => {
            if radius.approx_eq(&s.algebra().unit()) {
                return Ok(circle(Membership::ComplementOfFinite(vec![center.clone()])));
            }
            return Ok(empty());
        }
        SpaceKind::SquareTuple => {
            let c = center.coords();
            let r = radius.coefficients();
            for sx in [-1.0, 1.0] {
                for sy in [-1.0, 1.0] {
                    let p = Point::Pair([c[0] + sx * r[0], c[1] + sy * r[1]]);
                    if s.validate(&p).is_ok() {
                        push_unique(&mut members, p, tol);
                    }
                }
            }
        }
        SpaceKind::StepFn { pieces } => {
            let f = center.coords();
            let h = radius.coefficients();
            // Pieces with h = 0 have a single choice; enumerate the rest.
            let free: Vec<usize> = (0..pieces).filter(|&i| h[i] > tol).collect();
            for mask in 0u64..(1u64 << free.len()) {
                let mut g: Vec<f64> = f.to_vec();
                for (bit, &i) in free.iter().enumerate() {
                    let sign = if mask & (1 << bit) == 0 { -1.0 } else { 1.0 };
                    g[i] = f[i] + sign * h[i];
                }
                push_unique(&mut members, Point::Pieces(g), tol);
            }
        }
    }
    members.sort_by(|a, b| a.total_cmp(b));
    Ok(circle(Membership::ExplicitFinite(members)))
}

/// `x` lies on `c`: `d(x, center)` equals the radius within tolerance.
pub fn on_circle(s: &SpaceInstance, c: &Circle, x: &Point) -> bool {
    match distance(s, x, &c.center) {
        Ok(d) => d.approx_eq(&c.radius),
        Err(_) => false,
    }
}

/// Circle built from a sample: every sample point at distance `radius`.
pub fn sampled_circle(
    s: &SpaceInstance,
    center: &Point,
    radius: &Element,
    sample: &SampleSet,
) -> Circle {
    let probe = Circle {
        center: center.clone(),
        radius: radius.clone(),
        membership: Membership::Sampled(Vec::new()),
    };
    let members = sample
        .iter()
        .filter(|p| on_circle(s, &probe, p))
        .cloned()
        .collect();
    Circle {
        membership: Membership::Sampled(members),
        ..probe
    }
}
