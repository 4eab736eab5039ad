//! Evaluation requests, their settings, and the expectations a scenario
//! declares about them.
//!
//! A scenario states an expected sign with `config expect_sign_NAME = ...`,
//! where `NAME` starts with `event`, `life` or `group`. The query itself is
//! read from keys prefixed `NAME_`:
//!
//! | kind  | required                                     | optional                 |
//! |-------|----------------------------------------------|--------------------------|
//! | event | `world` `subject` `key` `time` `value` `agent` | `at`                     |
//! | life  | `agent`                                      | `world` `from` `to` `baseline` `lambda` |
//! | group | `group`                                      | `world` `from` `to` `baseline` `lambda_group` |
//!
//! ```text
//! config expect_sign_event = negative
//! config event_world = W_HIT
//! config event_subject = jack
//! ...
//! ```

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::counterfactual::{event_value, EventValue, NearestPolicy};
use crate::dsl::{ParseDiagnostic, SourcePos};
use crate::error::{EvalError, Result};
use crate::group_calc::{group_life_value, GroupCalcConfig, GroupFlourishingReport};
use crate::individual::{life_value, Aggregator, LifeValue, WelfareConfig};
use crate::scenario::Scenario;
use crate::theory::{TheoryConfig, TheoryKind};
use crate::world::{Event, Ident, Interval, TimePoint, Value, World};

/// Everything an evaluation can be tuned by.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Settings {
    pub theory: TheoryConfig,
    pub policy: NearestPolicy,
    pub welfare: WelfareConfig,
    pub group: GroupCalcConfig,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            theory: TheoryConfig::new(TheoryKind::Hedonic),
            policy: NearestPolicy::default(),
            welfare: WelfareConfig::default(),
            group: GroupCalcConfig::default(),
        }
    }
}

/// Settings given explicitly, for instance on the command line. They win
/// over anything the scenario says.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Overrides {
    pub theory: Option<TheoryKind>,
    pub allow_posthumous: Option<bool>,
    pub policy: Option<NearestPolicy>,
    pub lambda: Option<f64>,
    pub lambda_group: Option<f64>,
    pub epsilon: Option<f64>,
    pub aggregator: Option<Aggregator>,
    pub sync_aggregator: Option<Aggregator>,
}

impl Overrides {
    /// Fields set in `self` replace those in `other`.
    fn over(self, other: Overrides) -> Overrides {
        Overrides {
            theory: self.theory.or(other.theory),
            allow_posthumous: self.allow_posthumous.or(other.allow_posthumous),
            policy: self.policy.or(other.policy),
            lambda: self.lambda.or(other.lambda),
            lambda_group: self.lambda_group.or(other.lambda_group),
            epsilon: self.epsilon.or(other.epsilon),
            aggregator: self.aggregator.or(other.aggregator),
            sync_aggregator: self.sync_aggregator.or(other.sync_aggregator),
        }
    }

    fn apply(&self, s: &mut Settings) {
        if let Some(k) = self.theory {
            s.theory.kind = k;
        }
        if let Some(b) = self.allow_posthumous {
            s.theory.allow_posthumous = b;
        }
        if let Some(p) = self.policy {
            s.policy = p;
        }
        if let Some(l) = self.lambda {
            s.welfare.shape_weight = l;
        }
        if let Some(l) = self.lambda_group {
            s.group.shape_weight = l;
        }
        if let Some(e) = self.epsilon {
            s.group.attempt_floor = e;
        }
        if let Some(a) = self.aggregator {
            s.welfare.aggregator = a;
        }
        if let Some(a) = self.sync_aggregator {
            s.group.sync_aggregator = a;
        }
    }
}

impl Settings {
    /// Defaults, then scenario-wide config keys, then the query's own keys,
    /// then `overrides`.
    pub fn resolve(doc: &Scenario, query: Option<&Query>, overrides: &Overrides) -> Result<Settings, String> {
        let from_doc = scenario_overrides(doc).map_err(|d| d[0].message.clone())?;
        let from_query = query.map(Query::overrides).unwrap_or_default();
        let mut s = Settings::default();
        overrides.over(from_query.over(from_doc)).apply(&mut s);
        s.check()?;
        Ok(s)
    }

    pub fn check(&self) -> Result<(), String> {
        let l = self.welfare.shape_weight;
        if !(l >= 0.0 && l.is_finite()) {
            return Err(format!("lambda must be a non-negative number, got {l}"));
        }
        self.group.check()
    }
}

fn config_number(doc: &Scenario, key: &str, diags: &mut Vec<ParseDiagnostic>) -> Option<f64> {
    let entry = doc.config.iter().find(|c| c.key == key)?;
    match entry.value.as_f64() {
        Some(x) => Some(x),
        None => {
            diags.push(bad_value(entry.pos, format!("config {key} must be a number, got `{}`", entry.value)));
            None
        }
    }
}

fn config_parsed<T: FromStr<Err = String>>(doc: &Scenario, key: &str, diags: &mut Vec<ParseDiagnostic>) -> Option<T> {
    let entry = doc.config.iter().find(|c| c.key == key)?;
    match entry.value.to_string().parse() {
        Ok(v) => Some(v),
        Err(e) => {
            diags.push(bad_value(entry.pos, format!("config {key}: {e}")));
            None
        }
    }
}

pub(crate) fn config_bool(doc: &Scenario, key: &str, diags: &mut Vec<ParseDiagnostic>) -> Option<bool> {
    let entry = doc.config.iter().find(|c| c.key == key)?;
    match entry.value.as_bool() {
        Some(b) => Some(b),
        None => {
            diags.push(bad_value(entry.pos, format!("config {key} must be true or false, got `{}`", entry.value)));
            None
        }
    }
}

fn bad_value(pos: SourcePos, message: String) -> ParseDiagnostic {
    ParseDiagnostic::error(pos, "bad-value", message)
}

/// Scenario-wide settings read from config keys.
pub fn scenario_overrides(doc: &Scenario) -> Result<Overrides, Vec<ParseDiagnostic>> {
    let mut diags = Vec::new();
    let o = Overrides {
        theory: config_parsed(doc, "theory", &mut diags),
        allow_posthumous: config_bool(doc, "allow_posthumous", &mut diags),
        policy: config_parsed(doc, "policy", &mut diags),
        lambda: config_number(doc, "lambda", &mut diags),
        lambda_group: config_number(doc, "lambda_group", &mut diags),
        epsilon: config_number(doc, "epsilon", &mut diags),
        aggregator: config_parsed(doc, "aggregator", &mut diags),
        sync_aggregator: config_parsed(doc, "sync_aggregator", &mut diags),
    };
    config_bool(doc, "allow_memberless_groups", &mut diags);
    let mut s = Settings::default();
    o.apply(&mut s);
    if let Err(msg) = s.check() {
        let pos = doc.config.first().map(|c| c.pos).unwrap_or_default();
        diags.push(bad_value(pos, msg));
    }
    if diags.is_empty() {
        Ok(o)
    } else {
        Err(diags)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Query {
    Event {
        world: Option<Ident>,
        event: Event,
        agent: Ident,
        /// Tick at which well-being is compared; the event's tick if absent.
        at: Option<TimePoint>,
    },
    Life {
        world: Option<Ident>,
        agent: Ident,
        interval: Option<Interval>,
        baseline: Option<Ident>,
        lambda: Option<f64>,
    },
    Group {
        world: Option<Ident>,
        group: Ident,
        interval: Option<Interval>,
        baseline: Option<Ident>,
        lambda_group: Option<f64>,
    },
}

impl Query {
    pub fn kind(&self) -> &'static str {
        match self {
            Query::Event { .. } => "event",
            Query::Life { .. } => "life",
            Query::Group { .. } => "group",
        }
    }

    fn overrides(&self) -> Overrides {
        match self {
            Query::Life { lambda, .. } => Overrides { lambda: *lambda, ..Overrides::default() },
            Query::Group { lambda_group, .. } => Overrides { lambda_group: *lambda_group, ..Overrides::default() },
            Query::Event { .. } => Overrides::default(),
        }
    }

    pub fn world<'d>(&self, doc: &'d Scenario) -> Result<&'d World> {
        let id = match self {
            Query::Event { world, .. } | Query::Life { world, .. } | Query::Group { world, .. } => world,
        };
        match id {
            Some(id) => doc.require_world(id.as_str()),
            None => doc
                .default_world()
                .ok_or_else(|| EvalError::UnknownId { kind: "world", id: "(default)".into() }),
        }
    }

    /// Checks that every id the query names is declared.
    pub fn check_ids(&self, doc: &Scenario) -> Result<()> {
        self.world(doc)?;
        match self {
            Query::Event { agent, .. } => {
                doc.require_agent(agent.as_str())?;
            }
            Query::Life { agent, baseline, .. } => {
                doc.require_agent(agent.as_str())?;
                if let Some(b) = baseline {
                    doc.require_world(b.as_str())?;
                }
            }
            Query::Group { group, baseline, .. } => {
                doc.require_group(group.as_str())?;
                if let Some(b) = baseline {
                    doc.require_world(b.as_str())?;
                }
            }
        }
        Ok(())
    }

    /// Short human description, e.g. `life of jack in W_A over 0..3`.
    pub fn describe(&self, doc: &Scenario) -> String {
        let world = self.world(doc).map(|w| w.id.to_string()).unwrap_or_else(|_| "?".into());
        let span = |i: &Option<Interval>| i.map(|i| format!(" over {i}")).unwrap_or_default();
        let base = |b: &Option<Ident>| b.as_ref().map(|b| format!(" against {b}")).unwrap_or_default();
        match self {
            Query::Event { event, agent, at, .. } => {
                let at = at.map(|t| format!(" at {t}")).unwrap_or_default();
                format!("event {event} for {agent}{at} in {world}")
            }
            Query::Life { agent, interval, baseline, .. } => {
                format!("life of {agent} in {world}{}{}", span(interval), base(baseline))
            }
            Query::Group { group, interval, baseline, .. } => {
                format!("group {group} in {world}{}{}", span(interval), base(baseline))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Outcome {
    Event(EventValue),
    Life(LifeValue),
    Group(GroupFlourishingReport),
}

impl Outcome {
    /// The number the query asks for.
    pub fn value(&self) -> f64 {
        match self {
            Outcome::Event(e) => e.value,
            Outcome::Life(l) => l.value,
            Outcome::Group(g) => g.group_life_value,
        }
    }
}

fn default_interval(world: &World, interval: Option<Interval>) -> Interval {
    interval.unwrap_or_else(|| world.span())
}

/// Runs `query` against `doc`.
pub fn evaluate(doc: &Scenario, query: &Query, settings: &Settings) -> Result<Outcome> {
    query.check_ids(doc)?;
    let world = query.world(doc)?;
    let baseline = |b: &Option<Ident>| b.as_ref().map(|b| doc.require_world(b.as_str())).transpose();
    match query {
        Query::Event { event, agent, at, .. } => {
            let theory = doc.theory(settings.theory);
            let t = at.unwrap_or(event.time);
            event_value(&doc.worlds, world, event, agent, t, &theory, settings.policy).map(Outcome::Event)
        }
        Query::Life { agent, interval, baseline: b, .. } => {
            let theory = doc.theory(settings.theory);
            life_value(
                &doc.worlds,
                agent,
                world,
                default_interval(world, *interval),
                &theory,
                &settings.welfare,
                settings.policy,
                baseline(b)?,
            )
            .map(Outcome::Life)
        }
        Query::Group { group, interval, baseline: b, .. } => {
            let group = doc.require_group(group.as_str())?;
            group_life_value(
                doc,
                group,
                world,
                default_interval(world, *interval),
                &settings.group,
                settings.policy,
                baseline(b)?,
            )
            .map(Outcome::Group)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(x: f64) -> Sign {
        if x > 0.0 {
            Sign::Positive
        } else if x < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Negative => "negative",
            Sign::Zero => "zero",
            Sign::Positive => "positive",
        })
    }
}

impl FromStr for Sign {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "negative" => Ok(Sign::Negative),
            "zero" => Ok(Sign::Zero),
            "positive" => Ok(Sign::Positive),
            _ => Err(format!("unknown sign `{s}` (negative|zero|positive)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Expectation {
    pub name: String,
    pub sign: Sign,
    pub query: Query,
    #[serde(skip)]
    pub pos: SourcePos,
}

pub const EXPECT_PREFIX: &str = "expect_sign_";

/// Declared expectations, in declaration order.
pub fn expectations(doc: &Scenario) -> Result<Vec<Expectation>, Vec<ParseDiagnostic>> {
    let mut out = Vec::new();
    let mut diags = Vec::new();
    for entry in &doc.config {
        let Some(name) = entry.key.as_str().strip_prefix(EXPECT_PREFIX) else {
            continue;
        };
        let bad = |msg: String| ParseDiagnostic::error(entry.pos, "bad-expectation", msg);
        let sign = match entry.value.to_string().parse::<Sign>() {
            Ok(s) => s,
            Err(e) => {
                diags.push(bad(e));
                continue;
            }
        };
        match read_query(doc, name) {
            Ok(query) => match query.check_ids(doc) {
                Ok(()) => out.push(Expectation { name: name.to_owned(), sign, query, pos: entry.pos }),
                Err(e) => diags.push(ParseDiagnostic::error(entry.pos, "unresolved", format!("{name}: {e}"))),
            },
            Err(msg) => diags.push(bad(format!("{name}: {msg}"))),
        }
    }
    if diags.is_empty() {
        Ok(out)
    } else {
        Err(diags)
    }
}

fn read_query(doc: &Scenario, name: &str) -> Result<Query, String> {
    let get = |field: &str| doc.config_value(&format!("{name}_{field}"));
    let need = |field: &str| get(field).ok_or_else(|| format!("missing config {name}_{field}"));
    let symbol = |field: &str| -> Result<Option<Ident>, String> {
        match get(field) {
            None => Ok(None),
            Some(Value::Symbol(s)) => Ok(Some(s.clone())),
            Some(v) => Err(format!("{name}_{field} must be an identifier, got `{v}`")),
        }
    };
    let tick = |field: &str| -> Result<Option<TimePoint>, String> {
        match get(field) {
            None => Ok(None),
            Some(v) => v
                .to_string()
                .parse::<u64>()
                .map(|t| Some(TimePoint(t)))
                .map_err(|_| format!("{name}_{field} must be a tick, got `{v}`")),
        }
    };
    let number = |field: &str| -> Result<Option<f64>, String> {
        match get(field) {
            None => Ok(None),
            Some(v) => v.as_f64().map(Some).ok_or_else(|| format!("{name}_{field} must be a number, got `{v}`")),
        }
    };
    let interval = || -> Result<Option<Interval>, String> {
        match (tick("from")?, tick("to")?) {
            (None, None) => Ok(None),
            (Some(a), Some(b)) => Interval::new(a, b)
                .map(Some)
                .ok_or_else(|| format!("{name}_from is after {name}_to")),
            _ => Err(format!("{name}_from and {name}_to go together")),
        }
    };
    let required = |field: &str| -> Result<Ident, String> {
        need(field)?;
        Ok(symbol(field)?.expect("present"))
    };
    let kind = name.split('_').next().unwrap_or_default();
    match kind {
        "event" => {
            let time = tick("time")?.ok_or_else(|| format!("missing config {name}_time"))?;
            let event = Event {
                subject: required("subject")?,
                key: required("key")?,
                to_value: need("value")?.clone(),
                time,
            };
            if time.tick() == 0 {
                return Err("an event needs a preceding tick".into());
            }
            Ok(Query::Event { world: Some(required("world")?), event, agent: required("agent")?, at: tick("at")? })
        }
        "life" => Ok(Query::Life {
            world: symbol("world")?,
            agent: required("agent")?,
            interval: interval()?,
            baseline: symbol("baseline")?,
            lambda: number("lambda")?,
        }),
        "group" => Ok(Query::Group {
            world: symbol("world")?,
            group: required("group")?,
            interval: interval()?,
            baseline: symbol("baseline")?,
            lambda_group: number("lambda_group")?,
        }),
        _ => Err("expectation names must start with event, life or group".into()),
    }
}
