//! Group flourishing: activity values, synchronic and diachronic aggregates,
//! group welfare and the value of a group's life.
//!
//! Nothing here reads member well-being. A group's state at a tick is the
//! aggregate of the values of its members' role-borne activities at that
//! tick, so every result is the same whichever theory of individual
//! well-being is in force.

use serde::Serialize;

use crate::counterfactual::{mean, nearest_distinct_worlds, NearestPolicy};
use crate::error::{EvalError, Result};
use crate::group::{Activity, Group};
use crate::individual::{check_interval, correlation_report, Aggregator, CorrelationReport};
use crate::scenario::Scenario;
use crate::stats::{series_slope, total};
use crate::world::{decimal_to_f64, Ident, Interval, TimePoint, World};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GroupCalcConfig {
    /// Minimum value of an attempted activity, in `(0, 1)`.
    pub attempt_floor: f64,
    pub sync_aggregator: Aggregator,
    /// Weight of the slope term in group welfare, `λ_G ≥ 0`.
    pub shape_weight: f64,
}

impl Default for GroupCalcConfig {
    fn default() -> Self {
        GroupCalcConfig { attempt_floor: 0.01, sync_aggregator: Aggregator::Sum, shape_weight: 1.0 }
    }
}

impl GroupCalcConfig {
    pub fn check(&self) -> Result<(), String> {
        if !(self.attempt_floor > 0.0 && self.attempt_floor < 1.0) {
            return Err(format!("epsilon must lie in (0, 1), got {}", self.attempt_floor));
        }
        if !(self.shape_weight >= 0.0 && self.shape_weight.is_finite()) {
            return Err(format!("lambda-group must be a non-negative number, got {}", self.shape_weight));
        }
        Ok(())
    }

    /// Group welfare of a synchronic series starting at `first_tick`.
    pub fn welfare_of_series(&self, first_tick: u64, synchronic: &[f64]) -> f64 {
        total(synchronic) + self.shape_weight * series_slope(first_tick, synchronic)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupFlourishingReport {
    pub group: Ident,
    pub world: Ident,
    pub interval: Interval,
    /// Synchronic aggregates, one per tick of `interval`.
    pub synchronic: Vec<f64>,
    pub diachronic_aggregate: f64,
    pub group_welfare: f64,
    pub comparison_welfare: f64,
    pub group_life_value: f64,
    pub comparison_worlds: Vec<Ident>,
}

/// Value of one activity: zero if not attempted, otherwise its realization
/// degree floored at `ε` and capped at 1.
pub fn activity_value(activity: &Activity, group: &Group, config: &GroupCalcConfig) -> Result<f64> {
    let bound = activity.group == group.id
        && group
            .bindings
            .iter()
            .any(|b| b.covers(&activity.agent, &activity.role, activity.time));
    if !bound {
        return Err(EvalError::UnboundActivity {
            activity: activity.id.to_string(),
            time: activity.time.tick(),
        });
    }
    if !activity.attempted {
        return Ok(0.0);
    }
    let degree = decimal_to_f64(activity.realization_degree);
    Ok(degree.max(config.attempt_floor).min(1.0))
}

/// Aggregated activity values of `group`'s members at `t` in `world`.
pub fn sync_aggregate(
    scenario: &Scenario,
    group: &Group,
    t: TimePoint,
    world: &World,
    config: &GroupCalcConfig,
) -> Result<f64> {
    let values = scenario
        .activities_of(&group.id)
        .filter(|a| a.time == t && a.in_world(&world.id))
        .map(|a| activity_value(a, group, config))
        .collect::<Result<Vec<_>>>()?;
    Ok(config.sync_aggregator.apply(&values))
}

/// Well-being of a group at a tick, which is its synchronic aggregate.
pub fn group_wellbeing_at(
    scenario: &Scenario,
    group: &Group,
    t: TimePoint,
    world: &World,
    config: &GroupCalcConfig,
) -> Result<f64> {
    sync_aggregate(scenario, group, t, world, config)
}

/// Group well-being at each tick of `interval`.
pub fn synchronic_series(
    scenario: &Scenario,
    group: &Group,
    world: &World,
    interval: Interval,
    config: &GroupCalcConfig,
) -> Result<Vec<f64>> {
    check_interval(world, interval)?;
    interval
        .ticks()
        .map(|t| group_wellbeing_at(scenario, group, t, world, config))
        .collect()
}

pub fn diachronic_aggregate(
    scenario: &Scenario,
    group: &Group,
    world: &World,
    interval: Interval,
    config: &GroupCalcConfig,
) -> Result<f64> {
    Ok(total(&synchronic_series(scenario, group, world, interval, config)?))
}

/// Diachronic aggregate plus `λ_G` times the slope of the synchronic series.
pub fn group_welfare(
    scenario: &Scenario,
    group: &Group,
    world: &World,
    interval: Interval,
    config: &GroupCalcConfig,
) -> Result<f64> {
    let series = synchronic_series(scenario, group, world, interval, config)?;
    Ok(config.welfare_of_series(interval.start().tick(), &series))
}

/// Group welfare in `world` minus the mean group welfare of the same group
/// across the comparison worlds (`baseline`, or the most similar distinct
/// worlds).
pub fn group_life_value(
    scenario: &Scenario,
    group: &Group,
    world: &World,
    interval: Interval,
    config: &GroupCalcConfig,
    policy: NearestPolicy,
    baseline: Option<&World>,
) -> Result<GroupFlourishingReport> {
    let comparison: Vec<&World> = match baseline {
        Some(b) => vec![b],
        None => nearest_distinct_worlds(&scenario.worlds, world, policy)?,
    };
    let synchronic = synchronic_series(scenario, group, world, interval, config)?;
    let diachronic_aggregate = total(&synchronic);
    let welfare = config.welfare_of_series(interval.start().tick(), &synchronic);
    let others = comparison
        .iter()
        .map(|w| group_welfare(scenario, group, w, interval, config))
        .collect::<Result<Vec<_>>>()?;
    let comparison_welfare = mean(others.into_iter());
    Ok(GroupFlourishingReport {
        group: group.id.clone(),
        world: world.id.clone(),
        interval,
        synchronic,
        diachronic_aggregate,
        group_welfare: welfare,
        comparison_welfare,
        group_life_value: welfare - comparison_welfare,
        comparison_worlds: comparison.iter().map(|w| w.id.clone()).collect(),
    })
}

/// Checks positive correlation of diachronic aggregates and group welfare
/// across a family of synchronic series (each starting at tick 0).
pub fn diabridge_check(family: &[Vec<f64>], config: &GroupCalcConfig) -> Result<CorrelationReport> {
    let aggregates: Vec<f64> = family.iter().map(|s| total(s.iter())).collect();
    let slopes: Vec<f64> = family.iter().map(|s| series_slope(0, s)).collect();
    let welfares: Vec<f64> = family.iter().map(|s| config.welfare_of_series(0, s)).collect();
    correlation_report(&aggregates, &slopes, &welfares)
}
