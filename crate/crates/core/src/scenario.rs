//! The scenario document: a multiverse of worlds plus the agents, desires,
//! list items, groups, activities and configuration evaluated against it.

use crate::dsl::SourcePos;
use crate::error::{EvalError, Result};
use crate::group::{Activity, Group};
use crate::theory::{Desire, ObjectiveItem, Theory, TheoryConfig};
use crate::world::{Agent, Ident, TimePoint, Value, World};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConfigEntry {
    pub key: Ident,
    pub value: Value,
    pub pos: SourcePos,
}

/// A parsed scenario.
///
/// Declarations keep source order. Equality is order-insensitive and ignores
/// source positions: two documents are equal when they declare the same
/// things.
#[derive(Clone, Debug, Default)]
pub struct Scenario {
    pub name: Ident,
    pub worlds: Vec<World>,
    pub agents: Vec<Agent>,
    pub desires: Vec<Desire>,
    pub objective_items: Vec<ObjectiveItem>,
    pub groups: Vec<Group>,
    pub activities: Vec<Activity>,
    pub config: Vec<ConfigEntry>,
}

/// Alias matching the document vocabulary used by the scenario language.
pub type ScenarioDocument = Scenario;

impl Scenario {
    pub fn world(&self, id: &str) -> Option<&World> {
        self.worlds.iter().find(|w| w.id == id)
    }

    pub fn agent(&self, id: &str) -> Option<&Agent> {
        self.agents.iter().find(|a| a.id == id)
    }

    pub fn group(&self, id: &str) -> Option<&Group> {
        self.groups.iter().find(|g| g.id == id)
    }

    pub fn require_world(&self, id: &str) -> Result<&World> {
        self.world(id)
            .ok_or_else(|| EvalError::UnknownId { kind: "world", id: id.to_owned() })
    }

    pub fn require_agent(&self, id: &str) -> Result<&Agent> {
        self.agent(id)
            .ok_or_else(|| EvalError::UnknownId { kind: "agent", id: id.to_owned() })
    }

    pub fn require_group(&self, id: &str) -> Result<&Group> {
        self.group(id)
            .ok_or_else(|| EvalError::UnknownId { kind: "group", id: id.to_owned() })
    }

    pub fn config_value(&self, key: &str) -> Option<&Value> {
        self.config.iter().find(|c| c.key == key).map(|c| &c.value)
    }

    /// Maximum horizon over all worlds.
    pub fn horizon(&self) -> TimePoint {
        self.worlds.iter().map(World::horizon).max().unwrap_or_default()
    }

    /// The world evaluations default to: `config actual_world`, else the first
    /// declared world.
    pub fn default_world(&self) -> Option<&World> {
        match self.config_value("actual_world") {
            Some(Value::Symbol(id)) => self.world(id.as_str()),
            _ => self.worlds.first(),
        }
    }

    pub fn theory(&self, config: TheoryConfig) -> Theory<'_> {
        Theory::configure(config, &self.desires, &self.objective_items)
    }

    /// Activities of `group`, in declaration order.
    pub fn activities_of<'a>(&'a self, group: &'a Ident) -> impl Iterator<Item = &'a Activity> + 'a {
        self.activities.iter().filter(move |a| a.group == *group)
    }

    /// A copy with every declaration list sorted and positions cleared.
    pub fn canonical(&self) -> Scenario {
        let clear = SourcePos::default();
        let mut s = self.clone();
        s.worlds.sort_by(|a, b| a.id.cmp(&b.id));
        s.agents.sort();
        for d in &mut s.desires {
            d.pos = clear;
        }
        s.desires.sort();
        for o in &mut s.objective_items {
            o.pos = clear;
        }
        s.objective_items.sort();
        for g in &mut s.groups {
            g.pos = clear;
            for b in &mut g.bindings {
                b.pos = clear;
            }
            g.bindings.sort();
        }
        s.groups.sort();
        for a in &mut s.activities {
            a.pos = clear;
            a.worlds.sort();
        }
        s.activities.sort();
        for c in &mut s.config {
            c.pos = clear;
        }
        s.config.sort();
        s
    }
}

impl PartialEq for Scenario {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = (self.canonical(), other.canonical());
        a.name == b.name
            && a.worlds == b.worlds
            && a.agents == b.agents
            && a.desires == b.desires
            && a.objective_items == b.objective_items
            && a.groups == b.groups
            && a.activities == b.activities
            && a.config == b.config
    }
}
