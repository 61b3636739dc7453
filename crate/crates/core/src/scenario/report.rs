//! Running a scenario and rendering the result.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

use crate::algebra::Relation;
use crate::circle::{Circle, Membership};
use crate::error::{Error, Result};
use crate::space::{Point, SampleSet};
use crate::theorems::{
    self, check_theorem5, check_theorem6, check_theorem7, check_theorem8, check_uniqueness,
    enumerate_fixed_circles, is_fixed_circle, picard_fixed_point, scan_theorem7_diagonal,
    verify_contraction, ConditionId, ConditionReport, Contraction, TheoremReport, UniquenessKind,
};

use super::{KindSel, Prepared, Scenario, TheoremSel};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionResult {
    pub id: String,
    /// 1-based circle index when a run checks several circles.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub circle: Option<usize>,
    pub holds: bool,
    /// Number of points or pairs evaluated.
    pub checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Relation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partner: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<String>,
    /// Ciric-type conditions: how often each distance was chosen as `u(x, y)`.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub choices: BTreeMap<String, usize>,
}

impl ConditionResult {
    fn from_report(r: &ConditionReport, circle: Option<usize>) -> Self {
        let w = r.witness();
        let mut choices = BTreeMap::new();
        for rec in &r.records {
            if let Some(c) = rec.choice {
                *choices.entry(c.to_string()).or_insert(0) += 1;
            }
        }
        ConditionResult {
            id: r.id.tag().to_string(),
            circle,
            holds: r.holds,
            checked: r.records.len(),
            verdict: w.map(|w| w.verdict.relation),
            witness: w.map(|w| w.point.to_string()),
            partner: w.and_then(|w| w.partner.as_ref().map(|p| p.to_string())),
            lhs: w.map(|w| w.lhs.to_string()),
            rhs: w.map(|w| w.rhs.to_string()),
            choices,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircleSummary {
    pub center: String,
    pub radius: String,
    /// `explicit_finite`, `complement_of_finite` or `sampled`.
    pub membership: &'static str,
    /// Members, or excluded points for a complement circle.
    pub points: Vec<String>,
    pub empty: bool,
}

impl CircleSummary {
    pub fn new(c: &Circle) -> Self {
        let (membership, points) = match &c.membership {
            Membership::ExplicitFinite(v) => ("explicit_finite", v),
            Membership::ComplementOfFinite(v) => ("complement_of_finite", v),
            Membership::Sampled(v) => ("sampled", v),
        };
        CircleSummary {
            center: c.center.to_string(),
            radius: c.radius.to_string(),
            membership,
            points: points.iter().map(Point::to_string).collect(),
            empty: c.is_empty(),
        }
    }

    /// `{-2, 2}`, `X \ {3}` or `{}`.
    pub fn set_notation(&self) -> String {
        let inner = self.points.join(", ");
        match self.membership {
            "complement_of_finite" => format!("X \\ {{{inner}}}"),
            _ => format!("{{{inner}}}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSummary {
    pub step: f64,
    pub candidates: usize,
    pub satisfying: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_satisfying: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PicardSummary {
    pub start: String,
    pub point: String,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Conclusion {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorem: Option<String>,
    /// `Tx = x` on every checked member of the (first) circle.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed: Option<bool>,
    /// The first circle is empty.
    pub empty_circle: bool,
    /// Nothing was available to check, so `fixed` holds vacuously.
    pub vacuous: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moved: Option<String>,
    pub circles: Vec<CircleSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub identity_on_sample: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed_circles: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub picard: Option<PicardSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub conditions: Vec<ConditionResult>,
    pub conclusion: Conclusion,
    pub consistency: bool,
    pub wall_ms: u64,
    pub version: String,
}

impl RunReport {
    pub fn condition(&self, tag: &str) -> Option<&ConditionResult> {
        self.conditions.iter().find(|c| c.id == tag)
    }

    /// Exit status: 0 ran, 1 contract error, 2 consistency violation.
    pub fn exit_code(&self) -> i32 {
        if !self.consistency {
            2
        } else if self.conclusion.error.is_some() {
            1
        } else {
            0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunOptions {
    /// Record wall time. Off by default so reports are byte-reproducible.
    pub timing: bool,
}

pub fn run_scenario(sc: &Scenario) -> RunReport {
    run_scenario_with(sc, RunOptions::default())
}

pub fn run_scenario_with(sc: &Scenario, opts: RunOptions) -> RunReport {
    let started = Instant::now();
    let mut report = RunReport {
        scenario: sc.id_or("scenario").to_string(),
        conditions: Vec::new(),
        conclusion: Conclusion::default(),
        consistency: true,
        wall_ms: 0,
        version: crate::VERSION.to_string(),
    };
    match execute(sc, &mut report) {
        Ok(()) => {}
        Err(Error::Inconsistent(dump)) => {
            report.consistency = false;
            report.conclusion.error = Some(dump);
        }
        Err(e) => report.conclusion.error = Some(e.to_string()),
    }
    if opts.timing {
        report.wall_ms = started.elapsed().as_millis() as u64;
    }
    report
}

fn first_circle(p: &Prepared) -> Result<&Circle> {
    p.circles
        .first()
        .ok_or_else(|| Error::Contract("a [circle] section is required".into()))
}

fn need_a(p: &Prepared) -> Result<&crate::algebra::Element> {
    p.a.as_ref()
        .ok_or_else(|| Error::Contract("an A is required".into()))
}

fn absorb(report: &mut RunReport, t: &TheoremReport, circle: Option<usize>) {
    report
        .conditions
        .extend(t.conditions.iter().map(|c| ConditionResult::from_report(c, circle)));
    let c = &mut report.conclusion;
    c.fixed = Some(c.fixed.unwrap_or(true) && t.conclusion_fixed);
    c.vacuous |= t.vacuous;
    if t.identity_on_sample.is_some() {
        c.identity_on_sample = t.identity_on_sample;
    }
}

fn existence(p: &Prepared, th: TheoremSel, sample: &SampleSet, report: &mut RunReport) -> Result<()> {
    let (s, t) = (&p.space, &p.mapping);
    let c = first_circle(p)?;
    let r = match th {
        TheoremSel::T5 | TheoremSel::T9 => check_theorem5(s, t, c, sample)?,
        TheoremSel::T6 | TheoremSel::T10 => check_theorem6(s, t, c, sample)?,
        _ if p.check.scan && th == TheoremSel::T7 => {
            let scan = scan_theorem7_diagonal(s, t, c, sample, p.check.grid_step)?;
            let fixed = is_fixed_circle(s, t, c, sample)?;
            report
                .conditions
                .push(ConditionResult::from_report(&scan.drop_condition, None));
            report.conditions.push(ConditionResult {
                id: ConditionId::RadiusBelowConjugated.tag().to_string(),
                circle: None,
                holds: scan.satisfying > 0,
                checked: scan.candidates,
                verdict: None,
                witness: None,
                partner: None,
                lhs: None,
                rhs: None,
                choices: BTreeMap::new(),
            });
            let hypotheses = scan.drop_condition.holds && scan.satisfying > 0;
            report.conclusion.fixed = Some(fixed.fixed);
            report.conclusion.vacuous = fixed.vacuous;
            report.conclusion.moved = fixed.moved.map(|m| m.to_string());
            report.conclusion.scan = Some(ScanSummary {
                step: scan.step,
                candidates: scan.candidates,
                satisfying: scan.satisfying,
                first_satisfying: scan.first_satisfying.map(|a| a.to_string()),
            });
            if hypotheses && !fixed.fixed {
                return Err(Error::Inconsistent(format!(
                    "scan found a satisfying A and the drop condition holds, but {} is moved",
                    report.conclusion.moved.as_deref().unwrap_or("?")
                )));
            }
            return Ok(());
        }
        _ => {
            let a = need_a(p)?;
            report.conclusion.a_norm = Some(a.norm());
            check_theorem7(s, t, c, a, sample)?
        }
    };
    absorb(report, &r, None);
    report.conclusion.moved = theorems::is_fixed_circle(s, t, c, sample)?
        .moved
        .map(|m| m.to_string());
    Ok(())
}

fn execute(sc: &Scenario, report: &mut RunReport) -> Result<()> {
    let p = sc.prepare()?;
    report.conclusion.circles = p.circles.iter().map(CircleSummary::new).collect();
    report.conclusion.empty_circle = p.circles.first().is_some_and(Circle::is_empty);
    let sample = p.sample()?;
    let (s, t) = (&p.space, &p.mapping);
    let Some(th) = p.check.theorem else {
        if let Some(c) = p.circles.first() {
            let v = is_fixed_circle(s, t, c, &sample)?;
            report.conclusion.fixed = Some(v.fixed);
            report.conclusion.vacuous = v.vacuous;
            report.conclusion.moved = v.moved.map(|m| m.to_string());
        }
        return Ok(());
    };
    report.conclusion.theorem = Some(th.name().to_string());
    match th {
        TheoremSel::T5 | TheoremSel::T6 | TheoremSel::T7 => existence(&p, th, &sample, report)?,
        TheoremSel::T9 | TheoremSel::T10 | TheoremSel::T11 => {
            existence(&p, th, &sample, report)?;
            let kind = match (p.check.kind, th) {
                (Some(KindSel::Banach), _) | (None, TheoremSel::T9) => UniquenessKind::Banach,
                (Some(KindSel::Kannan), _) | (None, TheoremSel::T10) => UniquenessKind::Kannan,
                (Some(KindSel::Ciric), _) | (None, _) => UniquenessKind::Ciric,
                (Some(KindSel::Caristi), _) => {
                    return Err(Error::Contract("caristi is not a uniqueness condition".into()))
                }
            };
            let a = need_a(&p)?;
            report.conclusion.a_norm = Some(a.norm());
            let c = first_circle(&p)?;
            let u = check_uniqueness(s, t, c, kind, a, &sample, &sample)?;
            report.conditions.push(ConditionResult::from_report(&u, None));
        }
        TheoremSel::T8 => {
            let a = need_a(&p)?;
            report.conclusion.a_norm = Some(a.norm());
            let r = check_theorem8(s, t, first_circle(&p)?, a, &sample)?;
            absorb(report, &r, None);
        }
        TheoremSel::Prop1 => {
            let alpha = p.alpha_point.as_ref().expect("validated");
            let fixer = theorems::build_multi_circle_fixer(s, &p.circles, alpha)?;
            for (i, c) in p.circles.iter().enumerate() {
                let r = check_theorem5(s, &fixer, c, &sample)?;
                absorb(report, &r, Some(i + 1));
            }
            let mut centers: Vec<Point> = Vec::new();
            for c in &p.circles {
                if !centers.iter().any(|x| x.approx_eq(&c.center, s.tolerance())) {
                    centers.push(c.center.clone());
                }
            }
            let found = enumerate_fixed_circles(s, &fixer, &centers, &sample)?;
            report.conclusion.fixed_circles = Some(
                found
                    .iter()
                    .map(|c| format!("C({}, {})", c.center, c.radius))
                    .collect(),
            );
            let missing: Vec<String> = p
                .circles
                .iter()
                .filter(|c| !c.is_empty())
                .filter(|c| {
                    !found
                        .iter()
                        .any(|f| f.center.approx_eq(&c.center, s.tolerance()) && f.radius.approx_eq(&c.radius))
                })
                .map(|c| format!("C({}, {})", c.center, c.radius))
                .collect();
            if !missing.is_empty() {
                return Err(Error::Inconsistent(format!(
                    "fixer does not fix {}",
                    missing.join(", ")
                )));
            }
        }
        TheoremSel::Contraction => {
            let kind = p.check.kind.unwrap_or(KindSel::Banach);
            let r = match kind {
                KindSel::Caristi => {
                    let center = first_circle(&p)?.center.clone();
                    let phi = theorems::phi(s, &center);
                    verify_contraction(s, t, &Contraction::Caristi(&phi), &sample)?
                }
                other => {
                    let a = need_a(&p)?.clone();
                    report.conclusion.a_norm = Some(a.norm());
                    let k = match other {
                        KindSel::Banach => Contraction::Banach(a),
                        KindSel::Kannan => Contraction::Kannan(a),
                        _ => Contraction::Ciric(a),
                    };
                    verify_contraction(s, t, &k, &sample)?
                }
            };
            report.conditions.push(ConditionResult::from_report(&r, None));
        }
        TheoremSel::Picard => {
            if let Some(a) = &p.a {
                report.conclusion.a_norm = Some(a.norm());
                let r = verify_contraction(s, t, &Contraction::Banach(a.clone()), &sample)?;
                report.conditions.push(ConditionResult::from_report(&r, None));
            }
            let start = p.start.as_ref().expect("validated");
            let summary = match picard_fixed_point(s, t, start, p.check.picard_tol, p.check.max_iter) {
                Ok(out) => PicardSummary {
                    start: start.to_string(),
                    point: out.point.to_string(),
                    iterations: out.iterations,
                    residual: *out.residuals.last().expect("at least one residual"),
                    converged: true,
                },
                Err(Error::NoConvergence {
                    iterations,
                    residual,
                }) => PicardSummary {
                    start: start.to_string(),
                    point: String::new(),
                    iterations,
                    residual,
                    converged: false,
                },
                Err(e) => return Err(e),
            };
            report.conclusion.picard = Some(summary);
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "text" => Ok(ReportFormat::Text),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown format `{other}`")),
        }
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn render_text(r: &RunReport) -> String {
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "scenario {}", r.scenario);
    let c = &r.conclusion;
    for (i, circle) in c.circles.iter().enumerate() {
        let _ = writeln!(
            w,
            "circle #{}: C({}, {}) = {}",
            i + 1,
            circle.center,
            circle.radius,
            circle.set_notation()
        );
    }
    if let Some(th) = &c.theorem {
        let _ = writeln!(w, "theorem {th}");
    }
    for cond in &r.conditions {
        let _ = write!(w, "{} {}", cond.id, if cond.holds { "HOLDS" } else { "FAILS" });
        if let Some(i) = cond.circle {
            let _ = write!(w, "  circle #{i}");
        }
        let _ = write!(w, "  checked {}", cond.checked);
        if let Some(x) = &cond.witness {
            let _ = write!(w, "  at x = {x}");
            if let Some(y) = &cond.partner {
                let _ = write!(w, ", y = {y}");
            }
            let _ = write!(
                w,
                ": {} vs {} ({:?})",
                cond.lhs.as_deref().unwrap_or("?"),
                cond.rhs.as_deref().unwrap_or("?"),
                cond.verdict.unwrap_or(Relation::Incomparable)
            );
        }
        w.push('\n');
        for (choice, n) in &cond.choices {
            let _ = writeln!(w, "    u = {choice}: {n} pairs");
        }
    }
    if let Some(n) = c.a_norm {
        let _ = writeln!(w, "||A|| = {n}");
    }
    if let Some(scan) = &c.scan {
        let _ = writeln!(
            w,
            "scan: step {} over {} diagonal candidates, {} satisfy 2.7{}",
            scan.step,
            scan.candidates,
            scan.satisfying,
            scan.first_satisfying
                .as_ref()
                .map(|a| format!(" (first {a})"))
                .unwrap_or_default()
        );
    }
    if let Some(found) = &c.fixed_circles {
        let _ = writeln!(w, "fixed circles found: {}", found.join(", "));
    }
    if let Some(pc) = &c.picard {
        if pc.converged {
            let _ = writeln!(
                w,
                "picard from {}: {} after {} iterations (residual {:e})",
                pc.start, pc.point, pc.iterations, pc.residual
            );
        } else {
            let _ = writeln!(
                w,
                "picard from {}: no convergence after {} iterations (residual {:e})",
                pc.start, pc.iterations, pc.residual
            );
        }
    }
    if c.empty_circle {
        let _ = writeln!(w, "circle is empty");
    }
    if let Some(fixed) = c.fixed {
        let _ = write!(w, "fixed: {}", yes_no(fixed));
        if c.vacuous {
            w.push_str(" (vacuous)");
        }
        if let Some(m) = &c.moved {
            let _ = write!(w, ", moves {m}");
        }
        w.push('\n');
    }
    if let Some(id) = c.identity_on_sample {
        let _ = writeln!(w, "identity on sample: {}", yes_no(id));
    }
    if let Some(e) = &c.error {
        let _ = writeln!(w, "error: {e}");
    }
    let _ = writeln!(w, "consistency: {}", if r.consistency { "ok" } else { "VIOLATED" });
    if r.wall_ms > 0 {
        let _ = writeln!(w, "wall: {} ms", r.wall_ms);
    }
    let _ = writeln!(w, "version {}", r.version);
    out
}

pub fn emit_report(r: &RunReport, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Json => {
            let mut v = serde_json::to_vec_pretty(r).expect("report serializes");
            v.push(b'\n');
            v
        }
        ReportFormat::Text => render_text(r).into_bytes(),
    }
}
