//! Concrete C*-algebra valued metric spaces, their points, self-mappings and
//! deterministic sampling.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{AlgebraDescriptor, AlgebraKind, Element};
use crate::circle::{on_circle, Circle};
use crate::error::{Error, Result};
use crate::par;

/// A point of one of the spaces: a real, a pair, or the piece values of a
/// step function.
#[derive(Debug, Clone, PartialEq)]
pub enum Point {
    Scalar(f64),
    Pair([f64; 2]),
    Pieces(Vec<f64>),
}

impl Point {
    pub fn coords(&self) -> &[f64] {
        match self {
            Point::Scalar(x) => std::slice::from_ref(x),
            Point::Pair(p) => p,
            Point::Pieces(v) => v,
        }
    }

    fn map_coords(&self, f: impl Fn(f64) -> f64) -> Point {
        match self {
            Point::Scalar(x) => Point::Scalar(f(*x)),
            Point::Pair([a, b]) => Point::Pair([f(*a), f(*b)]),
            Point::Pieces(v) => Point::Pieces(v.iter().map(|x| f(*x)).collect()),
        }
    }

    fn same_shape(&self, other: &Point) -> bool {
        match (self, other) {
            (Point::Scalar(_), Point::Scalar(_)) | (Point::Pair(_), Point::Pair(_)) => true,
            (Point::Pieces(a), Point::Pieces(b)) => a.len() == b.len(),
            _ => false,
        }
    }

    /// Coordinatewise equality within `tol`.
    pub fn approx_eq(&self, other: &Point, tol: f64) -> bool {
        self.same_shape(other)
            && self
                .coords()
                .iter()
                .zip(other.coords())
                .all(|(a, b)| (a - b).abs() <= tol)
    }

    /// Lexicographic total order on coordinates, used for deterministic sorting.
    pub fn total_cmp(&self, other: &Point) -> std::cmp::Ordering {
        let a = self.coords();
        let b = other.coords();
        for (x, y) in a.iter().zip(b) {
            match x.total_cmp(y) {
                std::cmp::Ordering::Equal => continue,
                o => return o,
            }
        }
        a.len().cmp(&b.len())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Scalar(x) => write!(f, "{x}"),
            _ => {
                f.write_str("[")?;
                for (i, c) in self.coords().iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str("]")
            }
        }
    }
}

impl Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpaceKind {
    /// `d(x, y) = diag(|x - y|, alpha |x - y|)` on the real line.
    RealLineDiag { alpha: f64 },
    /// `d(x, y) = diag(|e^x - e^y|, alpha |e^x - e^y|)` on the real line.
    RealLineExpDiag { alpha: f64 },
    /// Unit matrix for distinct points, zero otherwise.
    RealLineDiscrete,
    /// `d(x, y) = (|x1 - y1|, |x2 - y2|)` on `[-1, 1]^2` (or `R^2` when ambient).
    SquareTuple,
    /// `d(f, g) = |f - g|` on step functions with a fixed number of pieces.
    StepFn { pieces: usize },
}

impl SpaceKind {
    pub fn name(&self) -> &'static str {
        match self {
            SpaceKind::RealLineDiag { .. } => "real-line-diag",
            SpaceKind::RealLineExpDiag { .. } => "real-line-exp-diag",
            SpaceKind::RealLineDiscrete => "real-line-discrete",
            SpaceKind::SquareTuple => "square-tuple",
            SpaceKind::StepFn { .. } => "stepfn",
        }
    }

    pub fn is_real_line(&self) -> bool {
        matches!(
            self,
            SpaceKind::RealLineDiag { .. }
                | SpaceKind::RealLineExpDiag { .. }
                | SpaceKind::RealLineDiscrete
        )
    }

    /// The algebra instance the metric takes values in.
    pub fn default_algebra(&self) -> AlgebraDescriptor {
        let (kind, dim) = match self {
            SpaceKind::SquareTuple => (AlgebraKind::Tuple, 2),
            SpaceKind::StepFn { pieces } => (AlgebraKind::StepFn, *pieces),
            _ => (AlgebraKind::MatEntrywise, 2),
        };
        AlgebraDescriptor::new(kind, dim.max(1)).expect("dimension is positive")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceInstance {
    kind: SpaceKind,
    algebra: AlgebraDescriptor,
    ambient: bool,
    bounds: (f64, f64),
}

impl SpaceInstance {
    pub fn new(kind: SpaceKind) -> Result<Self> {
        match kind {
            SpaceKind::RealLineDiag { alpha } | SpaceKind::RealLineExpDiag { alpha }
                if !(alpha >= 0.0 && alpha.is_finite()) =>
            {
                return Err(Error::Contract(format!("alpha must be >= 0, got {alpha}")));
            }
            SpaceKind::StepFn { pieces: 0 } => {
                return Err(Error::Contract("step functions need at least one piece".into()));
            }
            _ => {}
        }
        let bounds = match kind {
            SpaceKind::RealLineExpDiag { .. } => (-4.0, 3.0),
            SpaceKind::SquareTuple => (-1.0, 1.0),
            SpaceKind::StepFn { .. } => (-3.0, 3.0),
            _ => (-6.0, 6.0),
        };
        Ok(SpaceInstance {
            kind,
            algebra: kind.default_algebra(),
            ambient: false,
            bounds,
        })
    }

    /// Replaces the value algebra. Only the tolerance and, for real-line
    /// spaces, the entrywise/Loewner choice may differ from the default.
    pub fn with_algebra(mut self, algebra: AlgebraDescriptor) -> Result<Self> {
        let default = self.kind.default_algebra();
        let ok = match self.kind {
            SpaceKind::SquareTuple | SpaceKind::StepFn { .. } => algebra.compatible(&default),
            _ => algebra.kind().is_matrix() && algebra.dimension() == 2,
        };
        if !ok {
            return Err(Error::Contract(format!(
                "space `{}` takes values in {}({}), not {}({})",
                self.kind.name(),
                default.kind(),
                default.dimension(),
                algebra.kind(),
                algebra.dimension()
            )));
        }
        self.algebra = algebra;
        Ok(self)
    }

    pub fn with_tolerance(self, tol: f64) -> Result<Self> {
        let algebra = self.algebra.with_tolerance(tol)?;
        Ok(SpaceInstance { algebra, ..self })
    }

    /// Square-tuple only: admit all of `R^2` as points.
    pub fn with_ambient(mut self, ambient: bool) -> Self {
        self.ambient = ambient;
        if self.kind == SpaceKind::SquareTuple {
            self.bounds = if ambient { (-3.0, 3.0) } else { (-1.0, 1.0) };
        }
        self
    }

    pub fn with_bounds(mut self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi && lo.is_finite() && hi.is_finite()) {
            return Err(Error::Contract(format!("bad sampling bounds [{lo}, {hi}]")));
        }
        self.bounds = (lo, hi);
        Ok(self)
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn algebra(&self) -> &AlgebraDescriptor {
        &self.algebra
    }

    pub fn ambient(&self) -> bool {
        self.ambient
    }

    pub fn bounds(&self) -> (f64, f64) {
        self.bounds
    }

    pub fn tolerance(&self) -> f64 {
        self.algebra.tolerance()
    }

    /// Shape and domain check for a point of this space.
    pub fn validate(&self, x: &Point) -> Result<()> {
        let shape_ok = match (self.kind, x) {
            (k, Point::Scalar(_)) if k.is_real_line() => true,
            (SpaceKind::SquareTuple, Point::Pair(_)) => true,
            (SpaceKind::StepFn { pieces }, Point::Pieces(v)) => v.len() == pieces,
            _ => false,
        };
        if !shape_ok {
            return Err(Error::Domain(format!(
                "{x} is not a point of {}",
                self.kind.name()
            )));
        }
        if x.coords().iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain(format!("{x} has non-finite coordinates")));
        }
        if self.kind == SpaceKind::SquareTuple && !self.ambient {
            let tol = self.tolerance();
            if x.coords().iter().any(|c| c.abs() > 1.0 + tol) {
                return Err(Error::Domain(format!("{x} lies outside [-1, 1]^2")));
            }
        }
        Ok(())
    }

    fn metric(&self, x: &Point, y: &Point) -> Result<Element> {
        let a = &self.algebra;
        match self.kind {
            SpaceKind::RealLineDiag { alpha } => {
                let t = (x.coords()[0] - y.coords()[0]).abs();
                a.diag(&[t, alpha * t])
            }
            SpaceKind::RealLineExpDiag { alpha } => {
                let t = (x.coords()[0].exp() - y.coords()[0].exp()).abs();
                a.diag(&[t, alpha * t])
            }
            SpaceKind::RealLineDiscrete => {
                if x.coords()[0] == y.coords()[0] {
                    Ok(a.zero())
                } else {
                    Ok(a.unit())
                }
            }
            SpaceKind::SquareTuple | SpaceKind::StepFn { .. } => a.element(
                x.coords()
                    .iter()
                    .zip(y.coords())
                    .map(|(p, q)| (p - q).abs())
                    .collect(),
            ),
        }
    }
}

/// The algebra-valued distance `d(x, y)`.
pub fn distance(s: &SpaceInstance, x: &Point, y: &Point) -> Result<Element> {
    s.validate(x)?;
    s.validate(y)?;
    s.metric(x, y)
}

/// Where a mapping rule applies.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    /// On any of the mapping's reference circles.
    OnCircle,
    /// On none of the mapping's reference circles.
    NotOnCircle,
    /// At exactly this point (within tolerance).
    Eq(Point),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Rule {
    Identity,
    Constant(Point),
    /// `x -> 1/x` coordinatewise, with `0 -> 0`.
    ReciprocalOrZero,
    /// `x -> scale * x + shift` coordinatewise; a scalar shift is broadcast.
    Affine { scale: f64, shift: Point },
    /// Finite lookup table; points not listed are left unchanged.
    Table(Vec<(Point, Point)>),
}

impl Rule {
    fn eval(&self, x: &Point, tol: f64) -> Result<Point> {
        Ok(match self {
            Rule::Identity => x.clone(),
            Rule::Constant(p) => p.clone(),
            Rule::ReciprocalOrZero => x.map_coords(|c| if c == 0.0 { 0.0 } else { 1.0 / c }),
            Rule::Affine { scale, shift } => match shift {
                Point::Scalar(b) => x.map_coords(|c| scale * c + b),
                _ if shift.same_shape(x) => {
                    let coords: Vec<f64> = x
                        .coords()
                        .iter()
                        .zip(shift.coords())
                        .map(|(c, b)| scale * c + b)
                        .collect();
                    match x {
                        Point::Pair(_) => Point::Pair([coords[0], coords[1]]),
                        _ => Point::Pieces(coords),
                    }
                }
                _ => {
                    return Err(Error::Domain(format!(
                        "affine shift {shift} does not match point {x}"
                    )))
                }
            },
            Rule::Table(entries) => entries
                .iter()
                .find(|(k, _)| k.approx_eq(x, tol))
                .map(|(_, v)| v.clone())
                .unwrap_or_else(|| x.clone()),
        })
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Identity => f.write_str("identity"),
            Rule::Constant(p) => write!(f, "const {p}"),
            Rule::ReciprocalOrZero => f.write_str("reciprocal"),
            Rule::Affine { scale, shift } => write!(f, "affine {scale} {shift}"),
            Rule::Table(entries) => {
                f.write_str("table")?;
                for (i, (k, v)) in entries.iter().enumerate() {
                    write!(f, "{} {k} => {v}", if i == 0 { "" } else { ";" })?;
                }
                Ok(())
            }
        }
    }
}

/// Piecewise self-mapping: the first matching region's rule wins, otherwise
/// the default rule applies.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfMapping {
    space: SpaceInstance,
    circles: Vec<Circle>,
    rules: Vec<(Region, Rule)>,
    default: Rule,
}

impl SelfMapping {
    pub fn new(space: SpaceInstance, default: Rule) -> Self {
        SelfMapping {
            space,
            circles: Vec::new(),
            rules: Vec::new(),
            default,
        }
    }

    pub fn identity(space: SpaceInstance) -> Self {
        Self::new(space, Rule::Identity)
    }

    /// Circles consulted by the `OnCircle` / `NotOnCircle` regions.
    pub fn with_circles(mut self, circles: Vec<Circle>) -> Self {
        self.circles = circles;
        self
    }

    pub fn with_rule(mut self, region: Region, rule: Rule) -> Self {
        self.rules.push((region, rule));
        self
    }

    pub fn space(&self) -> &SpaceInstance {
        &self.space
    }

    pub fn circles(&self) -> &[Circle] {
        &self.circles
    }

    pub fn rules(&self) -> &[(Region, Rule)] {
        &self.rules
    }

    pub fn default_rule(&self) -> &Rule {
        &self.default
    }

    fn on_any_circle(&self, x: &Point) -> bool {
        self.circles.iter().any(|c| on_circle(&self.space, c, x))
    }

    fn matches(&self, region: &Region, x: &Point) -> bool {
        match region {
            Region::OnCircle => self.on_any_circle(x),
            Region::NotOnCircle => !self.on_any_circle(x),
            Region::Eq(p) => p.approx_eq(x, self.space.tolerance()),
        }
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        self.space.validate(x)?;
        let rule = self
            .rules
            .iter()
            .find(|(region, _)| self.matches(region, x))
            .map(|(_, rule)| rule)
            .unwrap_or(&self.default);
        let y = rule.eval(x, self.space.tolerance())?;
        self.space
            .validate(&y)
            .map_err(|e| Error::Domain(format!("image of {x} under `{rule}`: {e}")))?;
        Ok(y)
    }

    /// Human-readable one-line summary of the rule list.
    pub fn summary(&self) -> String {
        let mut parts: Vec<String> = self
            .rules
            .iter()
            .map(|(region, rule)| {
                let r = match region {
                    Region::OnCircle => "on_circle".to_string(),
                    Region::NotOnCircle => "not_on_circle".to_string(),
                    Region::Eq(p) => format!("eq {p}"),
                };
                format!("{r} -> {rule}")
            })
            .collect();
        parts.push(format!("default -> {}", self.default));
        parts.join(" | ")
    }
}

pub fn apply_mapping(t: &SelfMapping, x: &Point) -> Result<Point> {
    t.apply(x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub points: Vec<Point>,
    pub seed: u64,
    pub budget: usize,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point> {
        self.points.iter()
    }
}

/// Deterministic sample of `budget` points: `must_include` first (deduplicated),
/// then a jittered uniform grid over the space's bounds. Step-function
/// samples draw each piece value uniformly from the bounds.
///
/// If `must_include` alone exceeds the budget, all of it is kept.
pub fn sample_points(
    s: &SpaceInstance,
    seed: u64,
    budget: usize,
    must_include: &[Point],
) -> Result<SampleSet> {
    let tol = s.tolerance();
    let mut points: Vec<Point> = Vec::with_capacity(budget.max(must_include.len()));
    for p in must_include {
        s.validate(p)?;
        if !points.iter().any(|q| q.approx_eq(p, tol)) {
            points.push(p.clone());
        }
    }
    let remaining = budget.saturating_sub(points.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = s.bounds();
    let mut fill = Vec::with_capacity(remaining);
    match s.kind() {
        k if k.is_real_line() => {
            let step = (hi - lo) / remaining.max(1) as f64;
            for i in 0..remaining {
                let jitter: f64 = rng.gen_range(-0.25..0.25);
                fill.push(Point::Scalar(lo + (i as f64 + 0.5 + jitter) * step));
            }
        }
        SpaceKind::SquareTuple => {
            let side = (remaining as f64).sqrt().ceil().max(1.0) as usize;
            let step = (hi - lo) / side as f64;
            for i in 0..remaining {
                let (r, c) = (i / side, i % side);
                let jx: f64 = rng.gen_range(-0.25..0.25);
                let jy: f64 = rng.gen_range(-0.25..0.25);
                let x = (lo + (c as f64 + 0.5 + jx) * step).clamp(lo, hi);
                let y = (lo + (r as f64 + 0.5 + jy) * step).clamp(lo, hi);
                fill.push(Point::Pair([x, y]));
            }
        }
        SpaceKind::StepFn { pieces } => {
            for _ in 0..remaining {
                fill.push(Point::Pieces(
                    (0..pieces).map(|_| rng.gen_range(lo..hi)).collect(),
                ));
            }
        }
        _ => unreachable!("all real-line kinds handled above"),
    }
    points.extend(fill);
    Ok(SampleSet {
        points,
        seed,
        budget,
    })
}

/// Outcome of checking one metric axiom.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomResult {
    pub axiom: &'static str,
    pub passed: bool,
    /// Points of the first violation found (in sample order).
    pub witness: Option<Vec<Point>>,
    pub checked: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub results: Vec<AxiomResult>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn get(&self, axiom: &str) -> Option<&AxiomResult> {
        self.results.iter().find(|r| r.axiom == axiom)
    }
}

fn first_violation<F>(n: usize, bad: F) -> Option<usize>
where
    F: Fn(usize) -> bool + Sync + Send,
{
    par::map_range(n, |i| bad(i)).iter().position(|b| *b)
}

/// Checks the metric axioms of an arbitrary candidate metric over `points`:
/// positivity and identity of indiscernibles on all pairs, symmetry on all
/// pairs, and the triangle inequality on all triples.
pub fn verify_axioms_with<M>(points: &[Point], tol: f64, metric: M) -> AxiomReport
where
    M: Fn(&Point, &Point) -> Result<Element> + Sync + Send,
{
    let n = points.len();
    let pair = |i: usize| (&points[i / n], &points[i % n]);

    let positivity = first_violation(n * n, |i| {
        let (x, y) = pair(i);
        match metric(x, y) {
            Ok(d) => {
                let same = x.approx_eq(y, tol);
                !d.is_positive() || d.is_zero() != same
            }
            Err(_) => true,
        }
    });
    let symmetry = first_violation(n * n, |i| {
        let (x, y) = pair(i);
        match (metric(x, y), metric(y, x)) {
            (Ok(a), Ok(b)) => !a.approx_eq(&b),
            _ => true,
        }
    });
    let triangle = first_violation(n * n * n, |i| {
        let (x, y, z) = (&points[i / (n * n)], &points[(i / n) % n], &points[i % n]);
        let lhs = metric(x, y);
        let rhs = metric(x, z).and_then(|a| metric(z, y).and_then(|b| a.add(&b)));
        match (lhs, rhs) {
            (Ok(l), Ok(r)) => !matches!(l.leq(&r), Ok(v) if v.relation.is_le()),
            _ => true,
        }
    });

    let result = |axiom, hit: Option<usize>, checked, arity: usize| AxiomResult {
        axiom,
        passed: hit.is_none(),
        witness: hit.map(|i| match arity {
            2 => vec![points[i / n].clone(), points[i % n].clone()],
            _ => vec![
                points[i / (n * n)].clone(),
                points[(i / n) % n].clone(),
                points[i % n].clone(),
            ],
        }),
        checked,
    };
    AxiomReport {
        results: vec![
            result("positivity", positivity, n * n, 2),
            result("symmetry", symmetry, n * n, 2),
            result("triangle", triangle, n * n * n, 3),
        ],
    }
}

/// Metric axioms of the space's own distance over a sample.
pub fn verify_axioms(s: &SpaceInstance, sample: &SampleSet) -> AxiomReport {
    verify_axioms_with(&sample.points, s.tolerance(), |x, y| distance(s, x, y))
}

/// Triangle, symmetry and positivity checks on explicit triples `(x, y, z)`.
/// Returns the first violating triple, if any.
pub fn check_triples(s: &SpaceInstance, triples: &[[Point; 3]]) -> Option<[Point; 3]> {
    let bad = par::map(triples, |[x, y, z]| {
        let run = || -> Result<bool> {
            let dxy = distance(s, x, y)?;
            let dyx = distance(s, y, x)?;
            let dxz = distance(s, x, z)?;
            let dzy = distance(s, z, y)?;
            let pos = dxy.is_positive() && dxy.is_zero() == x.approx_eq(y, s.tolerance());
            let sym = dxy == dyx;
            let tri = dxy.leq(&dxz.add(&dzy)?)?.relation.is_le();
            Ok(pos && sym && tri)
        };
        !run().unwrap_or(false)
    });
    bad.iter().position(|b| *b).map(|i| triples[i].clone())
}
