mod common;

use ccvms::scenario::{run_scenario, search_counterexamples, SearchHit};
use ccvms::theorems::ConditionId;
use common::*;

fn tag(t: &str) -> ConditionId {
    t.parse().unwrap()
}

fn assert_reproduces(hits: &[SearchHit], first: &str, second: &str) {
    for h in hits {
        let r = run_scenario(&h.scenario);
        assert!(r.consistency && r.conclusion.error.is_none(), "{}", h.summary);
        assert!(r.condition(first).unwrap().holds, "{}", h.summary);
        assert!(!r.condition(second).unwrap().holds, "{}", h.summary);
        assert_eq!(r.conclusion.fixed, Some(false), "{}", h.summary);
    }
}

#[test]
fn finds_theorem5_counterexamples_on_example6() {
    let sc = load("example6");
    let hits = search_counterexamples(&sc, (tag("2.2"), tag("2.3")), 10_000, 1).unwrap();
    assert!(!hits.is_empty());
    assert!(hits.len() <= 10);
    assert!(hits.windows(2).all(|w| w[0].score <= w[1].score));
    assert_reproduces(&hits, "2.2", "2.3");
    // Same inputs, same hits.
    let again = search_counterexamples(&sc, (tag("2.2"), tag("2.3")), 10_000, 1).unwrap();
    assert_eq!(hits, again);
}

#[test]
fn finds_theorem6_counterexamples_on_discrete_space() {
    let sc = load("example8");
    let hits = search_counterexamples(&sc, (tag("2.5"), tag("2.4")), 2_000, 0).unwrap();
    assert!(!hits.is_empty());
    assert_reproduces(&hits, "2.5", "2.4");
}

#[test]
fn finds_theorem7_counterexamples() {
    let sc = load("example18");
    let hits = search_counterexamples(&sc, (tag("2.7"), tag("2.6")), 2_000, 3).unwrap();
    assert_reproduces(&hits, "2.7", "2.6");
}

#[test]
fn tiny_budget_may_be_empty() {
    let sc = load("example6");
    let hits = search_counterexamples(&sc, (tag("2.2"), tag("2.3")), 1, 7).unwrap();
    assert!(hits.len() <= 1);
    assert_reproduces(&hits, "2.2", "2.3");
}

#[test]
fn rejects_mixed_pairs() {
    let sc = load("example6");
    assert!(search_counterexamples(&sc, (tag("2.2"), tag("2.4")), 10, 0).is_err());
    assert!(search_counterexamples(&sc, (tag("2.2"), tag("2.2")), 10, 0).is_err());
}
