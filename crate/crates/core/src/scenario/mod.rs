//! Scenario files: parsing, emission, validation and execution.
//!
//! A scenario is a line-oriented INI-style file:
//!
//! ```text
//! id = example11
//!
//! [space]
//! kind = real-line-diag
//! alpha = 3
//!
//! [circle]
//! center = 0
//! radius = [[2,0],[0,6]]
//!
//! [mapping]
//! rule.1 = on_circle -> reciprocal
//! rule.2 = default -> const 0
//!
//! [check]
//! theorem = 5
//! ```
//!
//! `#` starts a comment. Numeric values admit `e`, `pi`, `ln(v)`, `exp(v)`,
//! `sqrt(v)` and arithmetic; points and algebra elements are bracket
//! literals such as `[1, -1]` or `[[2,0],[0,6]]`.

mod literal;
mod report;
mod search;

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use crate::algebra::{AlgebraDescriptor, AlgebraKind, Element};
use crate::circle::{solve_circle, Circle};
use crate::error::{Error, Result};
use crate::space::{sample_points, Point, Region, Rule, SampleSet, SelfMapping, SpaceInstance, SpaceKind};

pub use literal::{parse_literal, parse_number, Literal, LiteralError};
pub use report::{
    emit_report, run_scenario, run_scenario_with, CircleSummary, ConditionResult, Conclusion,
    PicardSummary, ReportFormat, RunOptions, RunReport, ScanSummary,
};
pub use search::{search_counterexamples, SearchHit};

pub const DEFAULT_SAMPLE_SIZE: usize = 200;
pub const DEFAULT_GRID_STEP: f64 = 0.01;
pub const DEFAULT_MAX_ITER: usize = 200;
pub const DEFAULT_PICARD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremSel {
    T5,
    T6,
    T7,
    T8,
    T9,
    T10,
    T11,
    Prop1,
    Contraction,
    Picard,
}

impl TheoremSel {
    pub fn name(self) -> &'static str {
        match self {
            TheoremSel::T5 => "5",
            TheoremSel::T6 => "6",
            TheoremSel::T7 => "7",
            TheoremSel::T8 => "8",
            TheoremSel::T9 => "9",
            TheoremSel::T10 => "10",
            TheoremSel::T11 => "11",
            TheoremSel::Prop1 => "prop1",
            TheoremSel::Contraction => "contraction",
            TheoremSel::Picard => "picard",
        }
    }
}

impl std::str::FromStr for TheoremSel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "5" => TheoremSel::T5,
            "6" => TheoremSel::T6,
            "7" => TheoremSel::T7,
            "8" => TheoremSel::T8,
            "9" => TheoremSel::T9,
            "10" => TheoremSel::T10,
            "11" => TheoremSel::T11,
            "prop1" => TheoremSel::Prop1,
            "contraction" => TheoremSel::Contraction,
            "picard" => TheoremSel::Picard,
            other => {
                return Err(format!(
                    "unknown theorem `{other}` (expected 5..11, prop1, contraction or picard)"
                ))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KindSel {
    Banach,
    Kannan,
    Ciric,
    Caristi,
}

impl KindSel {
    pub fn name(self) -> &'static str {
        match self {
            KindSel::Banach => "banach",
            KindSel::Kannan => "kannan",
            KindSel::Ciric => "ciric",
            KindSel::Caristi => "caristi",
        }
    }
}

impl std::str::FromStr for KindSel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "banach" => KindSel::Banach,
            "kannan" => KindSel::Kannan,
            "ciric" => KindSel::Ciric,
            "caristi" => KindSel::Caristi,
            other => return Err(format!("unknown kind `{other}`")),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraSpec {
    pub kind: AlgebraKind,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceSpec {
    pub kind: SpaceKind,
    pub ambient: bool,
    pub bounds: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircleSpec {
    pub center: Literal,
    pub radius: Literal,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RegionSpec {
    OnCircle,
    NotOnCircle,
    Eq(Literal),
}

#[derive(Debug, Clone, PartialEq)]
pub enum RuleSpec {
    Identity,
    Const(Literal),
    Reciprocal,
    Affine { scale: f64, shift: Literal },
    Table(Vec<(Literal, Literal)>),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MappingSpec {
    pub rules: Vec<(RegionSpec, RuleSpec)>,
    /// Applies where no rule matches; identity when absent.
    pub default: Option<RuleSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckSpec {
    /// `None` only solves the circles.
    pub theorem: Option<TheoremSel>,
    pub a: Option<Literal>,
    pub kind: Option<KindSel>,
    pub sample_size: usize,
    pub seed: u64,
    pub grid_step: f64,
    /// Theorem 7: scan diagonal `A` instead of using a fixed one.
    pub scan: bool,
    pub alpha_point: Option<Literal>,
    pub start: Option<Literal>,
    pub max_iter: usize,
    pub picard_tol: f64,
}

impl Default for CheckSpec {
    fn default() -> Self {
        CheckSpec {
            theorem: None,
            a: None,
            kind: None,
            sample_size: DEFAULT_SAMPLE_SIZE,
            seed: 0,
            grid_step: DEFAULT_GRID_STEP,
            scan: false,
            alpha_point: None,
            start: None,
            max_iter: DEFAULT_MAX_ITER,
            picard_tol: DEFAULT_PICARD_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub id: Option<String>,
    pub algebra: Option<AlgebraSpec>,
    pub space: SpaceSpec,
    pub circles: Vec<CircleSpec>,
    pub mapping: Option<MappingSpec>,
    pub check: Option<CheckSpec>,
}

/// A scenario with every literal resolved against its space.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub space: SpaceInstance,
    pub circles: Vec<Circle>,
    pub mapping: SelfMapping,
    pub check: CheckSpec,
    pub a: Option<Element>,
    pub alpha_point: Option<Point>,
    pub start: Option<Point>,
}

impl Prepared {
    /// The run's deterministic sample. Circle centers, explicit members and
    /// their images, the alpha point and the start point are always included.
    pub fn sample(&self) -> Result<SampleSet> {
        let s = &self.space;
        let mut must = Vec::new();
        for c in &self.circles {
            must.push(c.center.clone());
            for m in c.explicit_members() {
                must.push(m.clone());
                if let Ok(tm) = self.mapping.apply(m) {
                    must.push(tm);
                }
            }
        }
        must.extend(self.alpha_point.iter().cloned());
        must.extend(self.start.iter().cloned());
        sample_points(s, self.check.seed, self.check.sample_size, &must)
    }
}

type Spans = HashMap<String, (usize, usize)>;

/// Attaches a source location to validation errors when spans are known.
struct Locate<'a>(Option<&'a Spans>);

impl Locate<'_> {
    fn at<T>(&self, key: &str, r: Result<T>) -> Result<T> {
        r.map_err(|e| match (self.0, &e) {
            (_, Error::Parse { .. }) | (None, _) => e,
            (Some(spans), _) => {
                let (line, column) = spans.get(key).copied().unwrap_or((1, 1));
                Error::parse(line, column, e.to_string())
            }
        })
    }
}

impl Scenario {
    pub fn id_or<'a>(&'a self, fallback: &'a str) -> &'a str {
        self.id.as_deref().unwrap_or(fallback)
    }

    /// Resolves literals, builds the space, circles and mapping.
    pub fn prepare(&self) -> Result<Prepared> {
        self.prepare_located(None)
    }

    fn prepare_located(&self, spans: Option<&Spans>) -> Result<Prepared> {
        let loc = Locate(spans);
        let mut space = loc.at("space.kind", SpaceInstance::new(self.space.kind))?;
        if self.space.ambient && self.space.kind != SpaceKind::SquareTuple {
            return loc.at(
                "space.ambient",
                Err(Error::Contract("ambient only applies to square-tuple".into())),
            );
        }
        space = space.with_ambient(self.space.ambient);
        if let Some([lo, hi]) = self.space.bounds {
            space = loc.at("space.bounds", space.with_bounds(lo, hi))?;
        }
        if let Some(alg) = &self.algebra {
            let dim = space.algebra().dimension();
            let mut desc = loc.at("algebra.kind", AlgebraDescriptor::new(alg.kind, dim))?;
            if let Some(tol) = alg.tolerance {
                desc = loc.at("algebra.tol", desc.with_tolerance(tol))?;
            }
            space = loc.at("algebra.kind", space.with_algebra(desc))?;
        }

        let mut circles = Vec::with_capacity(self.circles.len());
        for (i, c) in self.circles.iter().enumerate() {
            let key = |k: &str| format!("circle.{}.{k}", i + 1);
            let center = loc.at(&key("center"), c.center.to_point(&space))?;
            let radius = loc.at(&key("radius"), c.radius.to_element(space.algebra()))?;
            circles.push(loc.at(&key("radius"), solve_circle(&space, &center, &radius))?);
        }

        let spec = self.mapping.clone().unwrap_or_default();
        let default = match &spec.default {
            Some(r) => loc.at("mapping.default", resolve_rule(r, &space))?,
            None => Rule::Identity,
        };
        let mut mapping = SelfMapping::new(space, default).with_circles(circles.clone());
        for (i, (region, rule)) in spec.rules.iter().enumerate() {
            let key = format!("mapping.rule.{}", i + 1);
            let region = match region {
                RegionSpec::OnCircle => Region::OnCircle,
                RegionSpec::NotOnCircle => Region::NotOnCircle,
                RegionSpec::Eq(p) => Region::Eq(loc.at(&key, p.to_point(&space))?),
            };
            if matches!(region, Region::OnCircle | Region::NotOnCircle) && circles.is_empty() {
                return loc.at(
                    &key,
                    Err(Error::Contract("circle regions need a [circle] section".into())),
                );
            }
            mapping = mapping.with_rule(region, loc.at(&key, resolve_rule(rule, &space))?);
        }

        let check = self.check.clone().unwrap_or_default();
        let a = match &check.a {
            Some(l) => Some(loc.at("check.A", l.to_element(space.algebra()))?),
            None => None,
        };
        let alpha_point = match &check.alpha_point {
            Some(l) => Some(loc.at("check.alpha_point", l.to_point(&space))?),
            None => None,
        };
        let start = match &check.start {
            Some(l) => Some(loc.at("check.start", l.to_point(&space))?),
            None => None,
        };
        if check.sample_size == 0 {
            return loc.at(
                "check.sample_size",
                Err(Error::Contract("sample_size must be at least 1".into())),
            );
        }
        if let Some(th) = check.theorem {
            let missing = |what: &str| -> Result<()> {
                loc.at(
                    "check.theorem",
                    Err(Error::Contract(format!("theorem {} needs {what}", th.name()))),
                )
            };
            let needs_circle = !matches!(th, TheoremSel::Contraction | TheoremSel::Picard)
                || check.kind == Some(KindSel::Caristi);
            if needs_circle && circles.is_empty() {
                missing("a [circle] section")?;
            }
            let needs_a = match th {
                TheoremSel::T7 | TheoremSel::T11 => !check.scan || th == TheoremSel::T11,
                TheoremSel::T8 | TheoremSel::T9 | TheoremSel::T10 => true,
                TheoremSel::Contraction => check.kind != Some(KindSel::Caristi),
                _ => false,
            };
            if needs_a && a.is_none() {
                missing("an A")?;
            }
            if th == TheoremSel::Prop1 && alpha_point.is_none() {
                missing("an alpha_point")?;
            }
            if th == TheoremSel::Picard && start.is_none() {
                missing("a start point")?;
            }
        }
        Ok(Prepared {
            space,
            circles,
            mapping,
            check,
            a,
            alpha_point,
            start,
        })
    }

    /// Serializes back to scenario-file syntax; `parse_scenario` on the
    /// result gives an equal scenario.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        if let Some(id) = &self.id {
            let _ = writeln!(w, "id = {id}\n");
        }
        if let Some(alg) = &self.algebra {
            let _ = writeln!(w, "[algebra]\nkind = {}", alg.kind);
            if let Some(tol) = alg.tolerance {
                let _ = writeln!(w, "tol = {tol:?}");
            }
            w.push('\n');
        }
        let _ = writeln!(w, "[space]\nkind = {}", self.space.kind.name());
        match self.space.kind {
            SpaceKind::RealLineDiag { alpha } | SpaceKind::RealLineExpDiag { alpha } => {
                let _ = writeln!(w, "alpha = {alpha:?}");
            }
            SpaceKind::StepFn { pieces } => {
                let _ = writeln!(w, "pieces = {pieces}");
            }
            _ => {}
        }
        if self.space.ambient {
            let _ = writeln!(w, "ambient = true");
        }
        if let Some([lo, hi]) = self.space.bounds {
            let _ = writeln!(w, "bounds = [{lo:?}, {hi:?}]");
        }
        for c in &self.circles {
            let _ = writeln!(w, "\n[circle]\ncenter = {}\nradius = {}", c.center, c.radius);
        }
        if let Some(m) = &self.mapping {
            w.push_str("\n[mapping]\n");
            for (i, (region, rule)) in m.rules.iter().enumerate() {
                let _ = writeln!(w, "rule.{} = {region} -> {rule}", i + 1);
            }
            if let Some(d) = &m.default {
                let _ = writeln!(w, "rule.{} = default -> {d}", m.rules.len() + 1);
            }
        }
        if let Some(c) = &self.check {
            w.push_str("\n[check]\n");
            if let Some(t) = c.theorem {
                let _ = writeln!(w, "theorem = {}", t.name());
            }
            if let Some(a) = &c.a {
                let _ = writeln!(w, "A = {a}");
            }
            if let Some(k) = c.kind {
                let _ = writeln!(w, "kind = {}", k.name());
            }
            let _ = writeln!(w, "sample_size = {}", c.sample_size);
            let _ = writeln!(w, "seed = {}", c.seed);
            let _ = writeln!(w, "grid_step = {:?}", c.grid_step);
            if c.scan {
                let _ = writeln!(w, "scan = true");
            }
            if let Some(p) = &c.alpha_point {
                let _ = writeln!(w, "alpha_point = {p}");
            }
            if let Some(p) = &c.start {
                let _ = writeln!(w, "start = {p}");
            }
            let _ = writeln!(w, "max_iter = {}", c.max_iter);
            let _ = writeln!(w, "picard_tol = {:?}", c.picard_tol);
        }
        out
    }

    /// Mutable access to the check section, creating a default one.
    pub fn check_mut(&mut self) -> &mut CheckSpec {
        self.check.get_or_insert_with(CheckSpec::default)
    }

    /// Overrides the comparison tolerance.
    pub fn set_tolerance(&mut self, tol: f64) {
        let kind = self.space.kind.default_algebra().kind();
        self.algebra
            .get_or_insert(AlgebraSpec {
                kind,
                tolerance: None,
            })
            .tolerance = Some(tol);
    }
}

fn resolve_rule(r: &RuleSpec, s: &SpaceInstance) -> Result<Rule> {
    Ok(match r {
        RuleSpec::Identity => Rule::Identity,
        RuleSpec::Reciprocal => Rule::ReciprocalOrZero,
        RuleSpec::Const(p) => Rule::Constant(p.to_point(s)?),
        RuleSpec::Affine { scale, shift } => {
            let shift = match shift {
                Literal::Num(b) => Point::Scalar(*b),
                other => other.to_point(s)?,
            };
            Rule::Affine {
                scale: *scale,
                shift,
            }
        }
        RuleSpec::Table(entries) => Rule::Table(
            entries
                .iter()
                .map(|(k, v)| Ok((k.to_point(s)?, v.to_point(s)?)))
                .collect::<Result<_>>()?,
        ),
    })
}

impl fmt::Display for RegionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegionSpec::OnCircle => f.write_str("on_circle"),
            RegionSpec::NotOnCircle => f.write_str("not_on_circle"),
            RegionSpec::Eq(p) => write!(f, "eq {p}"),
        }
    }
}

impl fmt::Display for RuleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleSpec::Identity => f.write_str("identity"),
            RuleSpec::Reciprocal => f.write_str("reciprocal"),
            RuleSpec::Const(p) => write!(f, "const {p}"),
            RuleSpec::Affine { scale, shift } => write!(f, "affine {scale:?}, {shift}"),
            RuleSpec::Table(entries) => {
                f.write_str("table")?;
                for (i, (k, v)) in entries.iter().enumerate() {
                    write!(f, "{} {k} => {v}", if i == 0 { "" } else { ";" })?;
                }
                Ok(())
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing

struct Entry<'a> {
    key: &'a str,
    value: &'a str,
    line: usize,
    key_col: usize,
    val_col: usize,
    full: &'a str,
}

impl Entry<'_> {
    /// Column of a subslice of this entry's line.
    fn col_of(&self, sub: &str) -> usize {
        sub.as_ptr() as usize - self.full.as_ptr() as usize + 1
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::parse(self.line, self.val_col, message)
    }

    fn literal_in(&self, text: &str) -> Result<Literal> {
        let col = self.col_of(text);
        if text.is_empty() {
            return Err(Error::parse(self.line, col, "missing value"));
        }
        parse_literal(text).map_err(|e| e.at(self.line, col))
    }

    fn literal(&self) -> Result<Literal> {
        self.literal_in(self.value)
    }

    fn number(&self) -> Result<f64> {
        match self.literal()? {
            Literal::Num(v) => Ok(v),
            Literal::List(_) => Err(self.err("expected a number")),
        }
    }

    fn integer<T: std::str::FromStr>(&self) -> Result<T> {
        self.value
            .parse()
            .map_err(|_| self.err(format!("expected a non-negative integer, got `{}`", self.value)))
    }

    fn boolean(&self) -> Result<bool> {
        match self.value {
            "true" => Ok(true),
            "false" => Ok(false),
            v => Err(self.err(format!("expected true or false, got `{v}`"))),
        }
    }

    fn parsed<T>(&self) -> Result<T>
    where
        T: std::str::FromStr<Err = String>,
    {
        self.value.parse().map_err(|m: String| self.err(m))
    }
}

struct Section<'a> {
    name: &'a str,
    line: usize,
    entries: Vec<Entry<'a>>,
}

impl<'a> Section<'a> {
    fn get(&self, key: &str) -> Option<&Entry<'a>> {
        self.entries.iter().find(|e| e.key == key)
    }

    fn only(&self, allowed: &[&str]) -> Result<()> {
        for e in &self.entries {
            let ok = allowed.iter().any(|a| {
                a.strip_suffix('*')
                    .map_or(e.key == *a, |prefix| e.key.starts_with(prefix))
            });
            if !ok {
                return Err(Error::parse(
                    e.line,
                    e.key_col,
                    format!("unknown key `{}` in [{}]", e.key, self.name),
                ));
            }
        }
        Ok(())
    }
}

fn split_sections(text: &str) -> Result<Vec<Section<'_>>> {
    let mut sections = vec![Section {
        name: "",
        line: 0,
        entries: Vec::new(),
    }];
    for (i, full) in text.lines().enumerate() {
        let line = i + 1;
        let content = full.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let col = |sub: &str| sub.as_ptr() as usize - full.as_ptr() as usize + 1;
        if let Some(rest) = trimmed.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| {
                Error::parse(line, col(trimmed), "section header is missing `]`")
            })?;
            let name = name.trim();
            if !matches!(name, "algebra" | "space" | "circle" | "mapping" | "check") {
                return Err(Error::parse(line, col(trimmed), format!("unknown section [{name}]")));
            }
            if name != "circle" && sections.iter().any(|s| s.name == name) {
                return Err(Error::parse(line, col(trimmed), format!("duplicate section [{name}]")));
            }
            sections.push(Section {
                name,
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let eq = trimmed
            .find('=')
            .ok_or_else(|| Error::parse(line, col(trimmed), "expected `key = value`"))?;
        let key = trimmed[..eq].trim();
        let value = trimmed[eq + 1..].trim();
        let key_col = col(trimmed);
        let val_col = if value.is_empty() {
            col(&trimmed[eq + 1..]) + trimmed[eq + 1..].len()
        } else {
            col(value)
        };
        if key.is_empty() {
            return Err(Error::parse(line, key_col, "missing key"));
        }
        let section = sections.last_mut().expect("top-level section exists");
        if section.entries.iter().any(|e| e.key == key) {
            return Err(Error::parse(line, key_col, format!("duplicate key `{key}`")));
        }
        section.entries.push(Entry {
            key,
            value,
            line,
            key_col,
            val_col,
            full,
        });
    }
    Ok(sections)
}

fn parse_space(sec: &Section<'_>, spans: &mut Spans) -> Result<SpaceSpec> {
    sec.only(&["kind", "alpha", "pieces", "ambient", "bounds"])?;
    for e in &sec.entries {
        spans.insert(format!("space.{}", e.key), (e.line, e.val_col));
    }
    let kind_entry = sec
        .get("kind")
        .ok_or_else(|| Error::parse(sec.line, 1, "[space] needs a kind"))?;
    let alpha = sec.get("alpha").map(|e| e.number()).transpose()?;
    let pieces = sec.get("pieces").map(|e| e.integer::<usize>()).transpose()?;
    let needs_alpha = |alpha: Option<f64>| {
        alpha.ok_or_else(|| kind_entry.err(format!("`{}` needs alpha", kind_entry.value)))
    };
    let kind = match kind_entry.value {
        "real-line-diag" => SpaceKind::RealLineDiag {
            alpha: needs_alpha(alpha)?,
        },
        "real-line-exp-diag" => SpaceKind::RealLineExpDiag {
            alpha: needs_alpha(alpha)?,
        },
        "real-line-discrete" => SpaceKind::RealLineDiscrete,
        "square-tuple" => SpaceKind::SquareTuple,
        "stepfn" => SpaceKind::StepFn {
            pieces: pieces.ok_or_else(|| kind_entry.err("`stepfn` needs pieces"))?,
        },
        other => return Err(kind_entry.err(format!("unknown space kind `{other}`"))),
    };
    if alpha.is_some() && !matches!(kind, SpaceKind::RealLineDiag { .. } | SpaceKind::RealLineExpDiag { .. }) {
        return Err(sec.get("alpha").unwrap().err(format!("alpha does not apply to `{}`", kind.name())));
    }
    if pieces.is_some() && !matches!(kind, SpaceKind::StepFn { .. }) {
        return Err(sec.get("pieces").unwrap().err(format!("pieces does not apply to `{}`", kind.name())));
    }
    let ambient = sec.get("ambient").map(|e| e.boolean()).transpose()?.unwrap_or(false);
    let bounds = match sec.get("bounds") {
        Some(e) => match e.literal()? {
            Literal::List(v) if v.len() == 2 => match (&v[0], &v[1]) {
                (Literal::Num(lo), Literal::Num(hi)) => Some([*lo, *hi]),
                _ => return Err(e.err("bounds must be [lo, hi]")),
            },
            _ => return Err(e.err("bounds must be [lo, hi]")),
        },
        None => None,
    };
    Ok(SpaceSpec {
        kind,
        ambient,
        bounds,
    })
}

fn parse_rule_entry(e: &Entry<'_>) -> Result<(Option<RegionSpec>, RuleSpec)> {
    let arrow = e
        .value
        .find("->")
        .ok_or_else(|| e.err("expected `<region> -> <rule>`"))?;
    let region_text = e.value[..arrow].trim();
    let rule_text = e.value[arrow + 2..].trim();
    let region = match region_text {
        "on_circle" => Some(RegionSpec::OnCircle),
        "not_on_circle" => Some(RegionSpec::NotOnCircle),
        "default" => None,
        t => match t.strip_prefix("eq") {
            Some(p) if p.starts_with(char::is_whitespace) => {
                Some(RegionSpec::Eq(e.literal_in(p.trim())?))
            }
            _ => {
                return Err(Error::parse(
                    e.line,
                    e.col_of(region_text),
                    format!("unknown region `{t}` (expected on_circle, not_on_circle, eq <point>, default)"),
                ))
            }
        },
    };
    let (word, rest) = match rule_text.find(char::is_whitespace) {
        Some(i) => (&rule_text[..i], rule_text[i..].trim()),
        None => (rule_text, ""),
    };
    let rule_col = e.col_of(rule_text);
    let no_args = |r: RuleSpec| {
        if rest.is_empty() {
            Ok(r)
        } else {
            Err(Error::parse(e.line, e.col_of(rest), format!("`{word}` takes no arguments")))
        }
    };
    let rule = match word {
        "identity" => no_args(RuleSpec::Identity)?,
        "reciprocal" => no_args(RuleSpec::Reciprocal)?,
        "const" => RuleSpec::Const(e.literal_in(rest)?),
        "affine" => {
            let comma = rest
                .find(',')
                .ok_or_else(|| Error::parse(e.line, rule_col, "expected `affine <scale>, <shift>`"))?;
            let scale_text = rest[..comma].trim();
            let scale = match e.literal_in(scale_text)? {
                Literal::Num(v) => v,
                Literal::List(_) => {
                    return Err(Error::parse(e.line, e.col_of(scale_text), "scale must be a number"))
                }
            };
            RuleSpec::Affine {
                scale,
                shift: e.literal_in(rest[comma + 1..].trim())?,
            }
        }
        "table" => {
            let mut entries = Vec::new();
            for part in rest.split(';') {
                let part = part.trim();
                if part.is_empty() {
                    continue;
                }
                let arrow = part.find("=>").ok_or_else(|| {
                    Error::parse(e.line, e.col_of(part), "expected `<point> => <point>`")
                })?;
                entries.push((
                    e.literal_in(part[..arrow].trim())?,
                    e.literal_in(part[arrow + 2..].trim())?,
                ));
            }
            RuleSpec::Table(entries)
        }
        other => {
            return Err(Error::parse(
                e.line,
                rule_col,
                format!("unknown rule `{other}` (expected identity, const, reciprocal, affine, table)"),
            ))
        }
    };
    Ok((region, rule))
}

fn parse_mapping(sec: &Section<'_>, spans: &mut Spans) -> Result<MappingSpec> {
    sec.only(&["rule.*"])?;
    let mut numbered = Vec::new();
    for e in &sec.entries {
        let n: usize = e.key["rule.".len()..].parse().map_err(|_| {
            Error::parse(e.line, e.key_col, format!("rule keys look like `rule.N`, got `{}`", e.key))
        })?;
        numbered.push((n, e));
    }
    numbered.sort_by_key(|(n, _)| *n);
    let mut spec = MappingSpec::default();
    for (_, e) in numbered {
        match parse_rule_entry(e)? {
            (Some(region), rule) => {
                spec.rules.push((region, rule));
                spans.insert(format!("mapping.rule.{}", spec.rules.len()), (e.line, e.val_col));
            }
            (None, rule) => {
                if spec.default.is_some() {
                    return Err(e.err("more than one default rule"));
                }
                spec.default = Some(rule);
                spans.insert("mapping.default".into(), (e.line, e.val_col));
            }
        }
    }
    Ok(spec)
}

fn parse_check(sec: &Section<'_>, spans: &mut Spans) -> Result<CheckSpec> {
    sec.only(&[
        "theorem",
        "A",
        "kind",
        "sample_size",
        "seed",
        "grid_step",
        "scan",
        "alpha_point",
        "start",
        "max_iter",
        "picard_tol",
    ])?;
    for e in &sec.entries {
        spans.insert(format!("check.{}", e.key), (e.line, e.val_col));
    }
    let mut c = CheckSpec::default();
    for e in &sec.entries {
        match e.key {
            "theorem" => c.theorem = Some(e.parsed()?),
            "A" => c.a = Some(e.literal()?),
            "kind" => c.kind = Some(e.parsed()?),
            "sample_size" => c.sample_size = e.integer()?,
            "seed" => c.seed = e.integer()?,
            "grid_step" => c.grid_step = e.number()?,
            "scan" => c.scan = e.boolean()?,
            "alpha_point" => c.alpha_point = Some(e.literal()?),
            "start" => c.start = Some(e.literal()?),
            "max_iter" => c.max_iter = e.integer()?,
            "picard_tol" => c.picard_tol = e.number()?,
            _ => unreachable!("keys filtered above"),
        }
    }
    Ok(c)
}

/// Parses and fully validates a scenario file. Errors carry the 1-based
/// line and column of the offending token.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let mut spans = Spans::new();
    let sections = split_sections(text)?;
    let top = &sections[0];
    top.only(&["id"])?;
    let id = top.get("id").map(|e| e.value.to_string());

    let mut algebra = None;
    let mut space = None;
    let mut circles = Vec::new();
    let mut mapping = None;
    let mut check = None;
    for sec in &sections[1..] {
        match sec.name {
            "algebra" => {
                sec.only(&["kind", "tol"])?;
                let kind = sec
                    .get("kind")
                    .ok_or_else(|| Error::parse(sec.line, 1, "[algebra] needs a kind"))?;
                spans.insert("algebra.kind".into(), (kind.line, kind.val_col));
                let tolerance = match sec.get("tol") {
                    Some(e) => {
                        spans.insert("algebra.tol".into(), (e.line, e.val_col));
                        Some(e.number()?)
                    }
                    None => None,
                };
                algebra = Some(AlgebraSpec {
                    kind: kind.parsed()?,
                    tolerance,
                });
            }
            "space" => space = Some(parse_space(sec, &mut spans)?),
            "circle" => {
                sec.only(&["center", "radius"])?;
                let n = circles.len() + 1;
                let get = |k: &str| {
                    sec.get(k)
                        .ok_or_else(|| Error::parse(sec.line, 1, format!("[circle] needs a {k}")))
                };
                let (center, radius) = (get("center")?, get("radius")?);
                spans.insert(format!("circle.{n}.center"), (center.line, center.val_col));
                spans.insert(format!("circle.{n}.radius"), (radius.line, radius.val_col));
                circles.push(CircleSpec {
                    center: center.literal()?,
                    radius: radius.literal()?,
                });
            }
            "mapping" => mapping = Some(parse_mapping(sec, &mut spans)?),
            "check" => check = Some(parse_check(sec, &mut spans)?),
            _ => unreachable!("section names validated while splitting"),
        }
    }
    let space = space.ok_or_else(|| Error::parse(1, 1, "missing [space] section"))?;
    let sc = Scenario {
        id,
        algebra,
        space,
        circles,
        mapping,
        check,
    };
    sc.prepare_located(Some(&spans))?;
    Ok(sc)
}
