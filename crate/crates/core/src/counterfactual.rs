//! Similarity between worlds, nearest-world selection and the value of an
//! event for an agent.
//!
//! Two worlds are more similar the more assertions they share exactly. The
//! value of an event `e` for `S` at `t` in `w` is `S`'s well-being at `t` in
//! `w` minus the well-being of `S`'s counterpart at `t` in the nearest world
//! where `e` does not occur. When several worlds tie for nearest, the
//! [`NearestPolicy`] decides whether one is picked (smallest id) or all of
//! them are averaged.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{EvalError, Result};
use crate::theory::WellbeingTheory;
use crate::world::{occurs, Event, Ident, TimePoint, World};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NearestPolicy {
    /// A single nearest world; ties go to the lexicographically smallest id.
    #[default]
    UniqueMin,
    /// Every nearest world; values are averaged over them.
    AverageOverTies,
}

impl fmt::Display for NearestPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NearestPolicy::UniqueMin => "unique",
            NearestPolicy::AverageOverTies => "ties",
        })
    }
}

impl FromStr for NearestPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "unique" | "unique_min" => Ok(NearestPolicy::UniqueMin),
            "ties" | "average_over_ties" => Ok(NearestPolicy::AverageOverTies),
            _ => Err(format!("unknown policy `{s}` (unique|ties)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EventValue {
    pub value: f64,
    pub actual_wellbeing: f64,
    pub counterfactual_wellbeing: f64,
    pub actual_world: Ident,
    pub comparison_worlds: Vec<Ident>,
    pub theory: String,
    /// `no-counterpart-data` when the agent has no assertions at `t` in some
    /// comparison world.
    pub annotations: Vec<&'static str>,
}

/// Number of assertions (subject, key, time and value) present in both worlds.
pub fn similarity(a: &World, b: &World) -> usize {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small
        .entries()
        .iter()
        .filter(|(k, v)| large.entries().get(*k) == Some(*v))
        .count()
}

/// The worlds other than `reference` that satisfy `admit` and are maximally
/// similar to `reference`, ordered by id.
fn maximally_similar<'w>(
    worlds: &'w [World],
    reference: &World,
    policy: NearestPolicy,
    mut admit: impl FnMut(&World) -> Result<bool>,
) -> Result<Vec<&'w World>> {
    let mut best: Option<usize> = None;
    let mut winners: Vec<&World> = Vec::new();
    for w in worlds {
        if w.id == reference.id || !admit(w)? {
            continue;
        }
        let score = similarity(reference, w);
        match best {
            Some(b) if score < b => {}
            Some(b) if score == b => winners.push(w),
            _ => {
                best = Some(score);
                winners.clear();
                winners.push(w);
            }
        }
    }
    winners.sort_by(|a, b| a.id.cmp(&b.id));
    if policy == NearestPolicy::UniqueMin {
        winners.truncate(1);
    }
    Ok(winners)
}

/// Nearest worlds to `reference` in which `absent_event` does not occur.
pub fn nearest_worlds<'w>(
    worlds: &'w [World],
    reference: &World,
    absent_event: &Event,
    policy: NearestPolicy,
) -> Result<Vec<&'w World>> {
    let found = maximally_similar(worlds, reference, policy, |w| Ok(!occurs(w, absent_event)?))?;
    if found.is_empty() {
        return Err(EvalError::NoCounterfactualWorld {
            event: absent_event.to_string(),
            reference: reference.id.to_string(),
        });
    }
    Ok(found)
}

/// Nearest distinct worlds to `reference`, with no event restriction.
pub fn nearest_distinct_worlds<'w>(
    worlds: &'w [World],
    reference: &World,
    policy: NearestPolicy,
) -> Result<Vec<&'w World>> {
    let found = maximally_similar(worlds, reference, policy, |_| Ok(true))?;
    if found.is_empty() {
        return Err(EvalError::NoComparisonWorld { world: reference.id.to_string() });
    }
    Ok(found)
}

pub(crate) fn mean(values: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = values.len();
    values.fold(0.0, |acc, x| acc + x) / n as f64
}

/// Value of `event` for `agent` at `t` in `world`.
pub fn event_value(
    worlds: &[World],
    world: &World,
    event: &Event,
    agent: &Ident,
    t: TimePoint,
    theory: &dyn WellbeingTheory,
    policy: NearestPolicy,
) -> Result<EventValue> {
    if !occurs(world, event)? {
        return Err(EvalError::EventNotOccurring {
            event: event.to_string(),
            world: world.id.to_string(),
        });
    }
    let nearest = nearest_worlds(worlds, world, event, policy)?;
    let actual = theory.wellbeing(agent, t, world);
    let counterfactual = mean(nearest.iter().map(|w| theory.wellbeing(agent, t, w)));
    let mut annotations = Vec::new();
    if nearest.iter().any(|w| !w.mentions_at(agent.as_str(), t)) {
        annotations.push("no-counterpart-data");
    }
    Ok(EventValue {
        value: actual - counterfactual,
        actual_wellbeing: actual,
        counterfactual_wellbeing: counterfactual,
        actual_world: world.id.clone(),
        comparison_worlds: nearest.iter().map(|w| w.id.clone()).collect(),
        theory: theory.name().to_owned(),
        annotations,
    })
}
