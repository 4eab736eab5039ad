//! Runs a scenario's evaluations under every theory of individual
//! well-being.
//!
//! Individual evaluations (events and lives) are expected to keep their
//! declared sign under each theory. Group evaluations must come out
//! identical, bit for bit, whichever theory is configured. Besides the
//! declared group expectations, every group is evaluated in the actual world
//! over that world's whole span.

use serde::Serialize;

use crate::dsl::ParseDiagnostic;
use crate::error::EvalError;
use crate::group_calc::GroupFlourishingReport;
use crate::query::{evaluate, expectations, Outcome, Overrides, Query, Settings, Sign};
use crate::scenario::Scenario;
use crate::theory::TheoryKind;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoryResult {
    pub theory: TheoryKind,
    pub value: Option<f64>,
    pub sign: Option<Sign>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndividualRow {
    pub name: String,
    pub description: String,
    pub expected: Sign,
    pub results: Vec<TheoryResult>,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupRow {
    pub name: String,
    pub description: String,
    /// Declared sign, if the row comes from an expectation.
    pub expected: Option<Sign>,
    pub results: Vec<TheoryResult>,
    /// All three evaluations agree in every reported number.
    pub identical: bool,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NeutralityReport {
    pub scenario: String,
    pub individual: Vec<IndividualRow>,
    pub group: Vec<GroupRow>,
    pub passed: bool,
}

fn run(doc: &Scenario, query: &Query, kind: TheoryKind, overrides: &Overrides) -> Result<Outcome, String> {
    let theory_fixed = Overrides { theory: Some(kind), ..*overrides };
    let settings = Settings::resolve(doc, Some(query), &theory_fixed)?;
    evaluate(doc, query, &settings).map_err(|e: EvalError| format!("{}: {e}", e.code()))
}

fn result(kind: TheoryKind, outcome: &Result<Outcome, String>) -> TheoryResult {
    match outcome {
        Ok(o) => TheoryResult { theory: kind, value: Some(o.value()), sign: Some(Sign::of(o.value())), error: None },
        Err(e) => TheoryResult { theory: kind, value: None, sign: None, error: Some(e.clone()) },
    }
}

/// Bitwise equality of two group reports.
fn same_report(a: &GroupFlourishingReport, b: &GroupFlourishingReport) -> bool {
    let bits = |r: &GroupFlourishingReport| {
        let mut v: Vec<u64> = r.synchronic.iter().map(|x| x.to_bits()).collect();
        v.extend(
            [r.diachronic_aggregate, r.group_welfare, r.comparison_welfare, r.group_life_value]
                .map(f64::to_bits),
        );
        v
    };
    bits(a) == bits(b) && a.comparison_worlds == b.comparison_worlds && a.interval == b.interval
}

fn group_row(
    doc: &Scenario,
    name: String,
    query: &Query,
    expected: Option<Sign>,
    overrides: &Overrides,
) -> GroupRow {
    let outcomes: Vec<_> = TheoryKind::ALL.iter().map(|&k| (k, run(doc, query, k, overrides))).collect();
    let reports: Vec<_> = outcomes
        .iter()
        .map(|(_, o)| match o {
            Ok(Outcome::Group(r)) => Ok(r),
            Ok(_) => Err("not a group outcome".to_owned()),
            Err(e) => Err(e.clone()),
        })
        .collect();
    let identical = match reports.as_slice() {
        [Ok(first), rest @ ..] => rest.iter().all(|r| matches!(r, Ok(r) if same_report(first, r))),
        // All failing the same way is agreement too.
        [Err(first), rest @ ..] => rest.iter().all(|r| matches!(r, Err(e) if e == first)),
        [] => true,
    };
    let results: Vec<_> = outcomes.iter().map(|(k, o)| result(*k, o)).collect();
    let holds = identical
        && expected.is_none_or(|want| results.iter().all(|r| r.sign == Some(want)));
    GroupRow { name, description: query.describe(doc), expected, results, identical, holds }
}

/// Evaluates every expectation, and every group, under all three theories.
pub fn neutrality(doc: &Scenario, overrides: &Overrides) -> Result<NeutralityReport, Vec<ParseDiagnostic>> {
    let exps = expectations(doc)?;
    let mut individual = Vec::new();
    let mut group = Vec::new();
    for e in &exps {
        if let Query::Group { .. } = e.query {
            group.push(group_row(doc, e.name.clone(), &e.query, Some(e.sign), overrides));
            continue;
        }
        let results: Vec<_> = TheoryKind::ALL
            .iter()
            .map(|&k| result(k, &run(doc, &e.query, k, overrides)))
            .collect();
        let holds = results.iter().all(|r| r.sign == Some(e.sign));
        individual.push(IndividualRow {
            name: e.name.clone(),
            description: e.query.describe(doc),
            expected: e.sign,
            results,
            holds,
        });
    }
    if let Some(actual) = doc.default_world() {
        for g in &doc.groups {
            let query = Query::Group {
                world: Some(actual.id.clone()),
                group: g.id.clone(),
                interval: Some(actual.span()),
                baseline: None,
                lambda_group: None,
            };
            group.push(group_row(doc, format!("{}-in-{}", g.id, actual.id), &query, None, overrides));
        }
    }
    let passed = individual.iter().all(|r| r.holds) && group.iter().all(|r| r.holds);
    Ok(NeutralityReport { scenario: doc.name.to_string(), individual, group, passed })
}
