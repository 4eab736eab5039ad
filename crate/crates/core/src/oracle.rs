//! Brute-force nearest-world search, kept apart from the indexed
//! implementation so the two can check each other.
//!
//! Similarity is a nested loop over the two assertion lists and occurrence is
//! decided by scanning for the two relevant assertions. Nothing here uses the
//! world index.

use serde::Serialize;

use crate::error::{EvalError, Result};
use crate::world::{Event, Ident, PropertyAssertion, TimePoint, Value, World};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleRow {
    pub world: Ident,
    pub similarity: usize,
    pub is_reference: bool,
    pub event_occurs: bool,
    /// Not the reference and the event does not occur.
    pub candidate: bool,
    pub maximal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub reference: Ident,
    pub event: Event,
    pub rows: Vec<OracleRow>,
    /// Candidates of maximal similarity, sorted by id. Empty when the event
    /// occurs in every world.
    pub maximizers: Vec<Ident>,
}

impl OracleReport {
    /// The maximizers, or `NoCounterfactualWorld` when there are none.
    pub fn require_maximizers(&self) -> Result<&[Ident]> {
        if self.maximizers.is_empty() {
            return Err(EvalError::NoCounterfactualWorld {
                event: self.event.to_string(),
                reference: self.reference.to_string(),
            });
        }
        Ok(&self.maximizers)
    }
}

fn scan<'a>(list: &'a [PropertyAssertion], subject: &Ident, key: &Ident, time: TimePoint) -> Option<&'a Value> {
    list.iter()
        .find(|a| a.subject == *subject && a.key == *key && a.time == time)
        .map(|a| &a.value)
}

fn scan_occurs(list: &[PropertyAssertion], e: &Event) -> bool {
    let Some(prev) = e.time.pred() else { return false };
    let now = scan(list, &e.subject, &e.key, e.time);
    let before = scan(list, &e.subject, &e.key, prev);
    matches!((now, before), (Some(n), Some(b)) if *n == e.to_value && b != n)
}

fn scan_similarity(a: &[PropertyAssertion], b: &[PropertyAssertion]) -> usize {
    a.iter().filter(|x| b.iter().any(|y| y == *x)).count()
}

/// Scores every world against `reference` and lists the maximizers among
/// worlds where `event` does not occur.
///
/// Fails when the event is malformed or does not occur in the reference.
pub fn full_scan(worlds: &[World], reference: &str, event: &Event) -> Result<OracleReport> {
    if event.time.tick() == 0 {
        return Err(EvalError::InvalidEvent { event: event.to_string() });
    }
    let r = worlds
        .iter()
        .find(|w| w.id == reference)
        .ok_or_else(|| EvalError::UnknownId { kind: "world", id: reference.to_owned() })?;
    let r_list: Vec<PropertyAssertion> = r.assertions().collect();
    if !scan_occurs(&r_list, event) {
        return Err(EvalError::EventNotOccurring { event: event.to_string(), world: reference.to_owned() });
    }
    let mut rows: Vec<OracleRow> = worlds
        .iter()
        .map(|w| {
            let list: Vec<PropertyAssertion> = w.assertions().collect();
            let is_reference = w.id == reference;
            let event_occurs = scan_occurs(&list, event);
            OracleRow {
                world: w.id.clone(),
                similarity: scan_similarity(&r_list, &list),
                is_reference,
                event_occurs,
                candidate: !is_reference && !event_occurs,
                maximal: false,
            }
        })
        .collect();
    if let Some(best) = rows.iter().filter(|r| r.candidate).map(|r| r.similarity).max() {
        for row in &mut rows {
            row.maximal = row.candidate && row.similarity == best;
        }
    }
    let mut maximizers: Vec<Ident> = rows.iter().filter(|r| r.maximal).map(|r| r.world.clone()).collect();
    maximizers.sort();
    Ok(OracleReport { reference: r.id.clone(), event: event.clone(), rows, maximizers })
}
