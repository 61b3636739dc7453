//! Random search for mappings that separate two circle conditions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circle::on_circle;
use crate::error::{Error, Result};
use crate::par;
use crate::space::{distance, Point, Region, Rule, SelfMapping};
use crate::theorems::{check_theorem5, check_theorem6, check_theorem7, ConditionId};

use super::{Literal, MappingSpec, RegionSpec, RuleSpec, Scenario, TheoremSel};

#[derive(Debug, Clone, PartialEq)]
pub struct SearchHit {
    /// The input scenario with the mapping replaced by the hit.
    pub scenario: Scenario,
    /// One-line description of the mapping.
    pub summary: String,
    /// Total displacement `sum ||d(x, Tx)||` over the circle members.
    pub score: f64,
    /// Trial index that produced the hit.
    pub trial: usize,
}

fn theorem_for(pair: (ConditionId, ConditionId)) -> Result<TheoremSel> {
    use ConditionId::*;
    let of = |id| match id {
        DisplacementBelowDrop | RadiusBelowImage => Some(TheoremSel::T5),
        DisplacementBelowExcess | ImageBelowRadius => Some(TheoremSel::T6),
        DropWithConjugate | RadiusBelowConjugated => Some(TheoremSel::T7),
        _ => None,
    };
    match (of(pair.0), of(pair.1)) {
        (Some(a), Some(b)) if a == b && pair.0 != pair.1 => Ok(a),
        _ => Err(Error::Contract(format!(
            "conditions {} and {} are not two distinct conditions of one existence theorem",
            pair.0, pair.1
        ))),
    }
}

/// Draws `budget` random mappings that send each member of the first circle
/// to a random sample point and every other point to one random off-circle
/// constant. Keeps those where the first condition holds, the second fails
/// and the circle is not fixed, and returns up to 10 with the smallest total
/// displacement. Trial `i` uses ChaCha stream `i` of `seed`, so results do
/// not depend on thread scheduling.
pub fn search_counterexamples(
    sc: &Scenario,
    pair: (ConditionId, ConditionId),
    budget: usize,
    seed: u64,
) -> Result<Vec<SearchHit>> {
    let theorem = theorem_for(pair)?;
    let p = sc.prepare()?;
    let s = p.space;
    let c = p
        .circles
        .first()
        .ok_or_else(|| Error::Contract("search needs a [circle] section".into()))?;
    let a = match theorem {
        TheoremSel::T7 => Some(
            p.a.clone()
                .ok_or_else(|| Error::Contract("conditions 2.6/2.7 need an A".into()))?,
        ),
        _ => None,
    };
    let sample = p.sample()?;
    let members = c.members(&s, &sample);
    if members.is_empty() || budget == 0 {
        return Ok(Vec::new());
    }
    let pool = &sample.points;
    let off: Vec<&Point> = pool.iter().filter(|x| !on_circle(&s, c, x)).collect();
    let off: Vec<&Point> = if off.is_empty() { pool.iter().collect() } else { off };

    let trials: Vec<usize> = (0..budget).collect();
    let outcomes = par::try_map(&trials, |&i| -> Result<Option<(f64, Vec<(Point, Point)>, Point)>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let table: Vec<(Point, Point)> = members
            .iter()
            .map(|m| (m.clone(), pool[rng.gen_range(0..pool.len())].clone()))
            .collect();
        let constant = off[rng.gen_range(0..off.len())].clone();
        let t = SelfMapping::new(s, Rule::Constant(constant.clone()))
            .with_circles(p.circles.clone())
            .with_rule(Region::OnCircle, Rule::Table(table.clone()));
        let report = match theorem {
            TheoremSel::T5 => check_theorem5(&s, &t, c, &sample)?,
            TheoremSel::T6 => check_theorem6(&s, &t, c, &sample)?,
            _ => check_theorem7(&s, &t, c, a.as_ref().expect("checked above"), &sample)?,
        };
        let holds = |id| report.condition(id).is_some_and(|r| r.holds);
        if !(holds(pair.0) && !holds(pair.1) && !report.conclusion_fixed) {
            return Ok(None);
        }
        let mut score = 0.0;
        for (x, tx) in &table {
            score += distance(&s, x, tx)?.norm();
        }
        Ok(Some((score, table, constant)))
    })?;

    let mut hits: Vec<(usize, f64, Vec<(Point, Point)>, Point)> = outcomes
        .into_iter()
        .enumerate()
        .filter_map(|(i, o)| o.map(|(score, table, k)| (i, score, table, k)))
        .collect();
    hits.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let mut out: Vec<SearchHit> = Vec::new();
    for (trial, score, table, constant) in hits {
        if out.len() == 10 {
            break;
        }
        let mapping = MappingSpec {
            rules: vec![(
                RegionSpec::OnCircle,
                RuleSpec::Table(
                    table
                        .iter()
                        .map(|(x, y)| (Literal::from_point(x), Literal::from_point(y)))
                        .collect(),
                ),
            )],
            default: Some(RuleSpec::Const(Literal::from_point(&constant))),
        };
        let mut scenario = sc.clone();
        scenario.mapping = Some(mapping);
        scenario.check_mut().theorem = Some(theorem);
        scenario.check_mut().scan = false;
        if out.iter().any(|h| h.scenario.mapping == scenario.mapping) {
            continue;
        }
        let summary = {
            let pairs: Vec<String> = table.iter().map(|(x, y)| format!("{x} -> {y}")).collect();
            let shown = if pairs.len() > 6 {
                format!("{} ... ({} members)", pairs[..6].join(", "), pairs.len())
            } else {
                pairs.join(", ")
            };
            format!("on circle: {shown}; elsewhere -> {constant}")
        };
        out.push(SearchHit {
            scenario,
            summary,
            score,
            trial,
        });
    }
    Ok(out)
}
