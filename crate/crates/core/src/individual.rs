//! Aggregate well-being, welfare and the value of a stretch of life.
//!
//! Welfare is aggregate well-being plus a shape term: `λ` times the
//! least-squares slope of the per-tick well-being series. With `λ = 0` welfare
//! is plain aggregation; with `λ > 0` an improving life is worth more than a
//! declining one with the same total, so welfare stays positively correlated
//! with the aggregate without being identical to it.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::counterfactual::{mean, nearest_distinct_worlds, NearestPolicy};
use crate::error::{EvalError, Result};
use crate::stats::{series_slope, spearman, total};
use crate::theory::WellbeingTheory;
use crate::world::{Ident, Interval, World};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregator {
    #[default]
    Sum,
    Mean,
}

impl Aggregator {
    pub fn apply(self, values: &[f64]) -> f64 {
        let sum = total(values);
        match self {
            Aggregator::Sum => sum,
            Aggregator::Mean if values.is_empty() => 0.0,
            Aggregator::Mean => sum / values.len() as f64,
        }
    }
}

impl fmt::Display for Aggregator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Aggregator::Sum => "sum",
            Aggregator::Mean => "mean",
        })
    }
}

impl FromStr for Aggregator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sum" => Ok(Aggregator::Sum),
            "mean" => Ok(Aggregator::Mean),
            _ => Err(format!("unknown aggregator `{s}` (sum|mean)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WelfareConfig {
    /// Weight of the slope term, `λ ≥ 0`.
    pub shape_weight: f64,
    pub aggregator: Aggregator,
}

impl Default for WelfareConfig {
    fn default() -> Self {
        WelfareConfig { shape_weight: 1.0, aggregator: Aggregator::Sum }
    }
}

impl WelfareConfig {
    pub fn with_lambda(shape_weight: f64) -> Self {
        WelfareConfig { shape_weight, ..Self::default() }
    }

    /// Welfare of a series sampled at consecutive ticks from `first_tick`.
    pub fn welfare_of_series(&self, first_tick: u64, series: &[f64]) -> f64 {
        self.aggregator.apply(series) + self.shape_weight * series_slope(first_tick, series)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LifeValue {
    pub value: f64,
    pub subject_welfare: f64,
    pub comparison_welfare: f64,
    pub comparison_worlds: Vec<Ident>,
}

pub(crate) fn check_interval(world: &World, interval: Interval) -> Result<()> {
    let horizon = world.horizon();
    if interval.end() > horizon {
        return Err(EvalError::IntervalOutOfRange {
            interval: interval.to_string(),
            world: world.id.to_string(),
            horizon: horizon.tick(),
        });
    }
    Ok(())
}

/// Per-tick well-being of `agent` over `interval`.
pub fn wellbeing_trace(
    agent: &Ident,
    world: &World,
    interval: Interval,
    theory: &dyn WellbeingTheory,
) -> Result<Vec<f64>> {
    check_interval(world, interval)?;
    Ok(interval.ticks().map(|t| theory.wellbeing(agent, t, world)).collect())
}

pub fn aggregate_wellbeing(
    agent: &Ident,
    world: &World,
    interval: Interval,
    theory: &dyn WellbeingTheory,
    aggregator: Aggregator,
) -> Result<f64> {
    Ok(aggregator.apply(&wellbeing_trace(agent, world, interval, theory)?))
}

/// Aggregate well-being plus `λ` times the slope of the well-being series.
pub fn welfare(
    agent: &Ident,
    world: &World,
    interval: Interval,
    theory: &dyn WellbeingTheory,
    config: &WelfareConfig,
) -> Result<f64> {
    let trace = wellbeing_trace(agent, world, interval, theory)?;
    Ok(config.welfare_of_series(interval.start().tick(), &trace))
}

/// Welfare of `agent` in `world` minus its mean welfare across the comparison
/// worlds: `baseline` when given, otherwise the most similar distinct worlds.
#[allow(clippy::too_many_arguments)]
pub fn life_value(
    worlds: &[World],
    agent: &Ident,
    world: &World,
    interval: Interval,
    theory: &dyn WellbeingTheory,
    config: &WelfareConfig,
    policy: NearestPolicy,
    baseline: Option<&World>,
) -> Result<LifeValue> {
    let comparison: Vec<&World> = match baseline {
        Some(b) => vec![b],
        None => nearest_distinct_worlds(worlds, world, policy)?,
    };
    let subject_welfare = welfare(agent, world, interval, theory, config)?;
    let others = comparison
        .iter()
        .map(|w| welfare(agent, w, interval, theory, config))
        .collect::<Result<Vec<_>>>()?;
    let comparison_welfare = mean(others.into_iter());
    Ok(LifeValue {
        value: subject_welfare - comparison_welfare,
        subject_welfare,
        comparison_welfare,
        comparison_worlds: comparison.iter().map(|w| w.id.clone()).collect(),
    })
}

/// How well welfare tracks aggregate well-being across a family of lives.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub members: usize,
    /// Pairs whose slope terms are identical.
    pub equal_slope_pairs: usize,
    /// Equal-slope pairs whose welfare order disagrees with aggregate order.
    pub ordering_violations: usize,
    pub spearman_rho: f64,
}

impl CorrelationReport {
    pub fn ordering_preserved(&self) -> bool {
        self.ordering_violations == 0
    }
}

pub(crate) fn correlation_report(aggregates: &[f64], slopes: &[f64], welfares: &[f64]) -> Result<CorrelationReport> {
    let n = aggregates.len();
    if n < 3 {
        return Err(EvalError::DegenerateFamily { reason: format!("{n} members, need at least 3") });
    }
    if aggregates.iter().all(|a| *a == aggregates[0]) {
        return Err(EvalError::DegenerateFamily { reason: "all aggregates are equal".into() });
    }
    let (mut equal_slope_pairs, mut ordering_violations) = (0, 0);
    for i in 0..n {
        for j in i + 1..n {
            if slopes[i] != slopes[j] {
                continue;
            }
            equal_slope_pairs += 1;
            if aggregates[i].total_cmp(&aggregates[j]) != welfares[i].total_cmp(&welfares[j]) {
                ordering_violations += 1;
            }
        }
    }
    let spearman_rho = spearman(aggregates, welfares)
        .ok_or_else(|| EvalError::DegenerateFamily { reason: "welfare has no variation".into() })?;
    Ok(CorrelationReport { members: n, equal_slope_pairs, ordering_violations, spearman_rho })
}

/// Checks positive correlation of aggregate well-being and welfare over a
/// family of well-being series (each starting at tick 0).
pub fn bridge_check(family: &[Vec<f64>], config: &WelfareConfig) -> Result<CorrelationReport> {
    let aggregates: Vec<f64> = family.iter().map(|s| config.aggregator.apply(s)).collect();
    let slopes: Vec<f64> = family.iter().map(|s| series_slope(0, s)).collect();
    let welfares: Vec<f64> = family.iter().map(|s| config.welfare_of_series(0, s)).collect();
    correlation_report(&aggregates, &slopes, &welfares)
}
