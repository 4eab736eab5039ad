//! Well-being at a time, under three interchangeable theories.
//!
//! Every theory maps `(agent, tick, world)` to a finite real number and reads
//! only the world's assertions (plus the desires or list items it was
//! configured with). Absent data reads as zero contribution.
//!
//! * **hedonic**: `pleasure - pain` at the tick.
//! * **desire**: total weight of the agent's satisfied desires. Dead agents
//!   score zero unless posthumous satisfaction is explicitly allowed.
//! * **objective**: total weight of list items whose asserted numeric value
//!   reaches the item's threshold.

use std::fmt;
use std::str::FromStr;

use rust_decimal::Decimal;
use serde::Serialize;

use crate::dsl::SourcePos;
use crate::world::{decimal_to_f64, Ident, TimePoint, Value, World};

pub const PLEASURE: &str = "pleasure";
pub const PAIN: &str = "pain";
pub const ALIVE: &str = "alive";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DesireMode {
    /// Satisfied at `t` only by an assertion at `t`.
    #[default]
    Concurrent,
    /// Satisfied at `t` by a matching assertion at any tick up to `t`.
    Achievement,
}

impl fmt::Display for DesireMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DesireMode::Concurrent => "concurrent",
            DesireMode::Achievement => "achievement",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TimePattern {
    At(TimePoint),
    Any,
}

impl fmt::Display for TimePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimePattern::At(t) => write!(f, "{t}"),
            TimePattern::Any => f.write_str("any"),
        }
    }
}

/// `subject.key@time = value` where `time` may be a wildcard.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AssertionPattern {
    pub subject: Ident,
    pub key: Ident,
    pub time: TimePattern,
    pub value: Value,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Desire {
    pub agent: Ident,
    pub target: AssertionPattern,
    /// Strictly positive.
    pub weight: Decimal,
    pub mode: DesireMode,
    pub pos: SourcePos,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjectiveItem {
    pub key: Ident,
    pub threshold: Decimal,
    /// Strictly positive.
    pub weight: Decimal,
    pub pos: SourcePos,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TheoryKind {
    Hedonic,
    Desire,
    Objective,
}

impl TheoryKind {
    pub const ALL: [TheoryKind; 3] = [TheoryKind::Hedonic, TheoryKind::Desire, TheoryKind::Objective];

    pub fn name(self) -> &'static str {
        match self {
            TheoryKind::Hedonic => "hedonic",
            TheoryKind::Desire => "desire",
            TheoryKind::Objective => "objective",
        }
    }
}

impl fmt::Display for TheoryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TheoryKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hedonic" => Ok(TheoryKind::Hedonic),
            "desire" => Ok(TheoryKind::Desire),
            "objective" => Ok(TheoryKind::Objective),
            _ => Err(format!("unknown theory `{s}` (hedonic|desire|objective)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TheoryConfig {
    pub kind: TheoryKind,
    pub allow_posthumous: bool,
}

impl TheoryConfig {
    pub fn new(kind: TheoryKind) -> Self {
        TheoryConfig { kind, allow_posthumous: false }
    }
}

/// A well-being evaluator. Implementations must be pure and total.
pub trait WellbeingTheory {
    fn name(&self) -> &str;

    fn wellbeing(&self, agent: &Ident, t: TimePoint, world: &World) -> f64;
}

/// The three built-in theories, configured against a scenario's data.
#[derive(Clone, Copy, Debug)]
pub enum Theory<'a> {
    Hedonic,
    Desire { desires: &'a [Desire], allow_posthumous: bool },
    Objective { items: &'a [ObjectiveItem] },
}

impl<'a> Theory<'a> {
    pub fn configure(config: TheoryConfig, desires: &'a [Desire], items: &'a [ObjectiveItem]) -> Self {
        match config.kind {
            TheoryKind::Hedonic => Theory::Hedonic,
            TheoryKind::Desire => Theory::Desire { desires, allow_posthumous: config.allow_posthumous },
            TheoryKind::Objective => Theory::Objective { items },
        }
    }

    pub fn kind(&self) -> TheoryKind {
        match self {
            Theory::Hedonic => TheoryKind::Hedonic,
            Theory::Desire { .. } => TheoryKind::Desire,
            Theory::Objective { .. } => TheoryKind::Objective,
        }
    }
}

impl WellbeingTheory for Theory<'_> {
    fn name(&self) -> &str {
        self.kind().name()
    }

    fn wellbeing(&self, agent: &Ident, t: TimePoint, world: &World) -> f64 {
        match *self {
            Theory::Hedonic => wellbeing_hedonic(agent, t, world),
            Theory::Desire { desires, allow_posthumous } => {
                wellbeing_desire(agent, t, world, desires, allow_posthumous)
            }
            Theory::Objective { items } => wellbeing_objective(agent, t, world, items),
        }
    }
}

fn numeric_at(world: &World, agent: &Ident, key: &str, t: TimePoint) -> f64 {
    world
        .lookup(agent.as_str(), key, t)
        .and_then(Value::as_f64)
        .unwrap_or(0.0)
}

/// Pleasure minus pain at `t`; absent assertions contribute zero.
pub fn wellbeing_hedonic(agent: &Ident, t: TimePoint, world: &World) -> f64 {
    numeric_at(world, agent, PLEASURE, t) - numeric_at(world, agent, PAIN, t)
}

/// Whether `agent` counts as dead at `t` in `world`.
///
/// Dead if `alive` is asserted false at `t`, or if it is not asserted true at
/// `t`, some `alive` assertion exists at or before `t`, and `t` is later than
/// the last tick at which the agent is asserted alive.
pub fn is_dead(agent: &Ident, t: TimePoint, world: &World) -> bool {
    let mut seen_by_t = false;
    let mut last_alive: Option<TimePoint> = None;
    for (tick, v) in world.series(agent.as_str(), ALIVE) {
        let alive = v.as_bool();
        if tick == t {
            match alive {
                Some(false) => return true,
                Some(true) => return false,
                None => {}
            }
        }
        if tick <= t {
            seen_by_t = true;
        }
        if alive == Some(true) {
            last_alive = Some(tick);
        }
    }
    seen_by_t && last_alive.is_none_or(|last| t > last)
}

fn satisfied(desire: &Desire, t: TimePoint, world: &World) -> bool {
    let target = &desire.target;
    let (subject, key) = (target.subject.as_str(), target.key.as_str());
    let matches = |tick: TimePoint| world.lookup(subject, key, tick) == Some(&target.value);
    match (desire.mode, target.time) {
        (DesireMode::Concurrent, TimePattern::At(at)) => at == t && matches(at),
        (DesireMode::Concurrent, TimePattern::Any) => matches(t),
        (DesireMode::Achievement, TimePattern::At(at)) => at <= t && matches(at),
        (DesireMode::Achievement, TimePattern::Any) => world
            .series(subject, key)
            .any(|(tick, v)| tick <= t && *v == target.value),
    }
}

/// Total weight of `agent`'s desires satisfied at `t`.
///
/// With `allow_posthumous = false` a dead agent scores zero.
pub fn wellbeing_desire(
    agent: &Ident,
    t: TimePoint,
    world: &World,
    desires: &[Desire],
    allow_posthumous: bool,
) -> f64 {
    if !allow_posthumous && is_dead(agent, t, world) {
        return 0.0;
    }
    let weight: Decimal = desires
        .iter()
        .filter(|d| d.agent == *agent && satisfied(d, t, world))
        .map(|d| d.weight)
        .sum();
    decimal_to_f64(weight)
}

/// Total weight of list items whose value for `agent` at `t` is numeric and at
/// least the item's threshold.
pub fn wellbeing_objective(agent: &Ident, t: TimePoint, world: &World, items: &[ObjectiveItem]) -> f64 {
    let weight: Decimal = items
        .iter()
        .filter(|item| {
            world
                .lookup(agent.as_str(), item.key.as_str(), t)
                .and_then(Value::as_number)
                .is_some_and(|v| v >= item.threshold)
        })
        .map(|item| item.weight)
        .sum();
    decimal_to_f64(weight)
}
