//! Groups, their functions, member roles and role-borne activities.
//!
//! The types follow the Basic Formal Ontology reading used throughout the
//! crate: a group bears exactly one *function* (a disposition that exists
//! because of design or evolution), and its members bear *roles* that they
//! hold only because they sit in an optional context. Activities are what
//! members do in a role; each carries a declared degree to which it realized
//! the group's function.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::dsl::SourcePos;
use crate::scenario::Scenario;
use crate::world::{Ident, Interval, TimePoint};

/// Top-level BFO category a type in this module instantiates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BfoCategory {
    /// An object aggregate; groups.
    ObjectAggregate,
    /// A disposition grounded in design or evolution.
    Function,
    /// A disposition held in virtue of an optional context.
    Role,
    /// A process realizing a role.
    Process,
}

/// Why a group's function exists.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Provenance {
    Designed,
    Evolved,
    /// A token that names neither; kept so validation can report it.
    Unrecognized(String),
}

impl Provenance {
    pub fn parse(token: &str) -> Provenance {
        match token {
            "designed" => Provenance::Designed,
            "evolved" => Provenance::Evolved,
            other => Provenance::Unrecognized(other.to_owned()),
        }
    }

    pub fn is_legal(&self) -> bool {
        !matches!(self, Provenance::Unrecognized(_))
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Designed => f.write_str("designed"),
            Provenance::Evolved => f.write_str("evolved"),
            Provenance::Unrecognized(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupFunction {
    pub id: Ident,
    pub description: String,
    pub provenance: Provenance,
}

impl GroupFunction {
    pub const CATEGORY: BfoCategory = BfoCategory::Function;
}

/// A member's role in a group over an interval.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoleBinding {
    pub agent: Ident,
    pub role: Ident,
    pub group: Ident,
    pub span: Interval,
    pub optional_context: bool,
    pub pos: SourcePos,
}

impl RoleBinding {
    pub const CATEGORY: BfoCategory = BfoCategory::Role;

    pub fn covers(&self, agent: &Ident, role: &Ident, t: TimePoint) -> bool {
        self.agent == *agent && self.role == *role && self.span.contains(t)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Group {
    pub id: Ident,
    pub function: GroupFunction,
    pub bindings: Vec<RoleBinding>,
    pub pos: SourcePos,
}

impl Group {
    pub const CATEGORY: BfoCategory = BfoCategory::ObjectAggregate;

    pub fn new(id: &str, function: &str, provenance: Provenance) -> Group {
        Group {
            id: id.into(),
            function: GroupFunction {
                id: function.into(),
                description: String::new(),
                provenance,
            },
            bindings: Vec::new(),
            pos: SourcePos::default(),
        }
    }

    /// Adds an optional-context binding.
    pub fn with_member(mut self, agent: &str, role: &str, span: Interval) -> Group {
        self.bindings.push(RoleBinding {
            agent: agent.into(),
            role: role.into(),
            group: self.id.clone(),
            span,
            optional_context: true,
            pos: SourcePos::default(),
        });
        self
    }
}

/// Something a member did (or did not attempt) in a role at one tick.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Activity {
    pub id: Ident,
    pub agent: Ident,
    pub role: Ident,
    pub group: Ident,
    pub time: TimePoint,
    pub attempted: bool,
    /// Declared realization of the group's function, in `[0, 1]`.
    pub realization_degree: rust_decimal::Decimal,
    /// Worlds in which the activity takes place; empty means every world.
    pub worlds: Vec<Ident>,
    pub pos: SourcePos,
}

impl Activity {
    pub const CATEGORY: BfoCategory = BfoCategory::Process;

    pub fn in_world(&self, world: &Ident) -> bool {
        self.worlds.is_empty() || self.worlds.contains(world)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationFailure {
    pub code: &'static str,
    pub message: String,
}

/// Outcome of a well-formedness check. Failures are data, not faults.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub subject: String,
    pub failures: Vec<ValidationFailure>,
}

impl ValidationReport {
    fn new(subject: String) -> Self {
        ValidationReport { subject, failures: Vec::new() }
    }

    fn fail(&mut self, code: &'static str, message: String) {
        self.failures.push(ValidationFailure { code, message });
    }

    pub fn passes(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn codes(&self) -> Vec<&'static str> {
        self.failures.iter().map(|f| f.code).collect()
    }
}

/// Checks that `group` declares a function with a legal provenance.
pub fn validate_function(group: &Group) -> ValidationReport {
    let mut report = ValidationReport::new(format!("group {}", group.id));
    if let Provenance::Unrecognized(tok) = &group.function.provenance {
        report.fail(
            "illegal-provenance",
            format!(
                "function {} of group {} has provenance `{tok}`; expected designed or evolved",
                group.function.id, group.id
            ),
        );
    }
    report
}

/// Checks a binding against the scenario: referenced agent and group exist,
/// the span lies within the scenario horizon and the context is optional.
pub fn validate_role_binding(binding: &RoleBinding, scenario: &Scenario) -> ValidationReport {
    let mut report = ValidationReport::new(format!(
        "binding {} as {} in {}",
        binding.agent, binding.role, binding.group
    ));
    if scenario.agent(binding.agent.as_str()).is_none() {
        report.fail("unknown-agent", format!("agent `{}` is not declared", binding.agent));
    }
    if scenario.group(binding.group.as_str()).is_none() {
        report.fail("unknown-group", format!("group `{}` is not declared", binding.group));
    }
    let horizon = scenario.horizon();
    if binding.span.end() > horizon {
        report.fail(
            "span-beyond-horizon",
            format!("span {} extends past scenario horizon {horizon}", binding.span),
        );
    }
    if !binding.optional_context {
        report.fail(
            "context-not-optional",
            format!(
                "{} holds role {} without an optional context",
                binding.agent, binding.role
            ),
        );
    }
    report
}

/// `(agent, role)` pairs whose binding span contains `time`.
pub fn members_at(group: &Group, time: TimePoint) -> BTreeSet<(Ident, Ident)> {
    group
        .bindings
        .iter()
        .filter(|b| b.span.contains(time))
        .map(|b| (b.agent.clone(), b.role.clone()))
        .collect()
}
