//! Worlds, timed property assertions and derived events.
//!
//! A [`World`] is a finite, closed set of assertions `subject.key@tick = value`.
//! Nothing is inferred: an assertion missing at some tick is absent, it is not
//! carried forward from an earlier tick. Events are never declared; an event is
//! a property whose asserted value at `t` differs from its asserted value at
//! `t - 1`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rust_decimal::Decimal;
use serde::Serialize;

use crate::error::EvalError;

/// An identifier: world, agent, group, role, property key or symbolic value.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Ident(String);

impl Ident {
    /// Wraps a string without checking it against the scenario grammar.
    pub fn new(s: impl Into<String>) -> Self {
        Ident(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// True if `s` lexes as a single identifier in the scenario language.
    pub fn is_valid(s: &str) -> bool {
        let mut chars = s.chars();
        match chars.next() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
            _ => return false,
        }
        chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Ident {
    fn from(s: &str) -> Self {
        Ident(s.to_owned())
    }
}

impl From<String> for Ident {
    fn from(s: String) -> Self {
        Ident(s)
    }
}

impl PartialEq<str> for Ident {
    fn eq(&self, other: &str) -> bool {
        self.0 == other
    }
}

impl PartialEq<&str> for Ident {
    fn eq(&self, other: &&str) -> bool {
        self.0 == *other
    }
}

/// A discrete, non-negative tick.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct TimePoint(pub u64);

impl TimePoint {
    pub fn tick(self) -> u64 {
        self.0
    }

    /// The preceding tick, if there is one.
    pub fn pred(self) -> Option<TimePoint> {
        self.0.checked_sub(1).map(TimePoint)
    }
}

impl fmt::Display for TimePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u64> for TimePoint {
    fn from(t: u64) -> Self {
        TimePoint(t)
    }
}

/// A closed tick interval `[start, end]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Interval {
    start: TimePoint,
    end: TimePoint,
}

impl Interval {
    /// Returns `None` when `start > end`.
    pub fn new(start: impl Into<TimePoint>, end: impl Into<TimePoint>) -> Option<Interval> {
        let (start, end) = (start.into(), end.into());
        (start <= end).then_some(Interval { start, end })
    }

    pub fn start(&self) -> TimePoint {
        self.start
    }

    pub fn end(&self) -> TimePoint {
        self.end
    }

    pub fn contains(&self, t: TimePoint) -> bool {
        self.start <= t && t <= self.end
    }

    /// Whether `other` lies entirely inside `self`.
    pub fn covers(&self, other: &Interval) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    /// Number of ticks, always at least one.
    pub fn tick_count(&self) -> u64 {
        self.end.0 - self.start.0 + 1
    }

    pub fn ticks(&self) -> impl Iterator<Item = TimePoint> + Clone {
        (self.start.0..=self.end.0).map(TimePoint)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

impl FromStr for Interval {
    type Err = String;

    /// Parses `A..B`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once("..")
            .ok_or_else(|| format!("expected A..B, got `{s}`"))?;
        let a: u64 = a.trim().parse().map_err(|_| format!("bad interval start `{a}`"))?;
        let b: u64 = b.trim().parse().map_err(|_| format!("bad interval end `{b}`"))?;
        Interval::new(a, b).ok_or_else(|| format!("interval start {a} exceeds end {b}"))
    }
}

/// An asserted property value. Numbers are exact decimals.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Bool(bool),
    Number(Decimal),
    Symbol(Ident),
}

impl Value {
    /// Builds a number in normal form (no trailing zeros, no negative zero).
    pub fn number(d: Decimal) -> Value {
        Value::Number(normalize(d))
    }

    pub fn as_number(&self) -> Option<Decimal> {
        match self {
            Value::Number(d) => Some(*d),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        self.as_number().map(decimal_to_f64)
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Number(d) => write!(f, "{}", normalize(*d)),
            Value::Symbol(s) => write!(f, "{s}"),
        }
    }
}

impl From<i64> for Value {
    fn from(n: i64) -> Self {
        Value::number(Decimal::from(n))
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl FromStr for Value {
    type Err = String;

    /// Parses the textual value forms used by the scenario language.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "true" => return Ok(Value::Bool(true)),
            "false" => return Ok(Value::Bool(false)),
            _ => {}
        }
        if Ident::is_valid(s) {
            return Ok(Value::Symbol(Ident::from(s)));
        }
        if is_decimal_literal(s) {
            return Decimal::from_str_exact(s)
                .map(Value::number)
                .map_err(|e| format!("number `{s}` out of range: {e}"));
        }
        Err(format!("`{s}` is not a number, identifier or boolean"))
    }
}

pub(crate) fn is_decimal_literal(s: &str) -> bool {
    let digits = s.strip_prefix('-').unwrap_or(s);
    let (int, frac) = match digits.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (digits, None),
    };
    let all_digits = |p: &str| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit());
    all_digits(int) && frac.is_none_or(all_digits)
}

pub(crate) fn normalize(d: Decimal) -> Decimal {
    if d.is_zero() {
        Decimal::ZERO
    } else {
        d.normalize()
    }
}

pub(crate) fn decimal_to_f64(d: Decimal) -> f64 {
    use rust_decimal::prelude::ToPrimitive;
    d.to_f64().unwrap_or(f64::NAN)
}

/// `subject.key@time = value`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PropertyAssertion {
    pub subject: Ident,
    pub key: Ident,
    pub time: TimePoint,
    pub value: Value,
}

impl fmt::Display for PropertyAssertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}@{} = {}", self.subject, self.key, self.time, self.value)
    }
}

/// A change of `subject.key` to `to_value` at `time`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Event {
    pub subject: Ident,
    pub key: Ident,
    pub to_value: Value,
    pub time: TimePoint,
}

impl Event {
    pub fn new(subject: &str, key: &str, to_value: impl Into<Value>, time: u64) -> Event {
        Event {
            subject: subject.into(),
            key: key.into(),
            to_value: to_value.into(),
            time: TimePoint(time),
        }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}@{}={}", self.subject, self.key, self.time, self.to_value)
    }
}

impl Serialize for Event {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for Event {
    type Err = String;

    /// Parses `subject.key@time=value`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("expected subject.key@time=value, got `{s}`");
        let (lhs, value) = s.split_once('=').ok_or_else(bad)?;
        let (path, time) = lhs.split_once('@').ok_or_else(bad)?;
        let (subject, key) = path.split_once('.').ok_or_else(bad)?;
        let (subject, key) = (subject.trim(), key.trim());
        if !Ident::is_valid(subject) || !Ident::is_valid(key) {
            return Err(bad());
        }
        let time: u64 = time.trim().parse().map_err(|_| bad())?;
        Ok(Event {
            subject: subject.into(),
            key: key.into(),
            to_value: value.trim().parse()?,
            time: TimePoint(time),
        })
    }
}

pub type AssertionKey = (Ident, Ident, TimePoint);

/// A possible world: an identifier and a closed set of assertions.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct World {
    pub id: Ident,
    assertions: BTreeMap<AssertionKey, Value>,
}

impl World {
    pub fn new(id: impl Into<Ident>) -> World {
        World { id: id.into(), assertions: BTreeMap::new() }
    }

    /// Adds an assertion. Returns the previous value if `(subject, key, time)`
    /// was already asserted, in which case the world is left unchanged.
    pub fn assert(&mut self, a: PropertyAssertion) -> Result<(), Value> {
        use std::collections::btree_map::Entry;
        match self.assertions.entry((a.subject, a.key, a.time)) {
            Entry::Occupied(e) => Err(e.get().clone()),
            Entry::Vacant(v) => {
                v.insert(a.value);
                Ok(())
            }
        }
    }

    /// Builder-style variant of [`World::assert`] that panics on duplicates.
    pub fn with(mut self, subject: &str, key: &str, time: u64, value: impl Into<Value>) -> World {
        self.assert(PropertyAssertion {
            subject: subject.into(),
            key: key.into(),
            time: TimePoint(time),
            value: value.into(),
        })
        .expect("duplicate assertion");
        self
    }

    pub fn len(&self) -> usize {
        self.assertions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assertions.is_empty()
    }

    /// Assertions ordered by `(subject, key, time)`.
    pub fn assertions(&self) -> impl Iterator<Item = PropertyAssertion> + '_ {
        self.assertions.iter().map(|((s, k, t), v)| PropertyAssertion {
            subject: s.clone(),
            key: k.clone(),
            time: *t,
            value: v.clone(),
        })
    }

    pub(crate) fn entries(&self) -> &BTreeMap<AssertionKey, Value> {
        &self.assertions
    }

    /// Maximum tick mentioned by any assertion; 0 for an empty world.
    pub fn horizon(&self) -> TimePoint {
        self.assertions.keys().map(|(_, _, t)| *t).max().unwrap_or_default()
    }

    /// The full `[0, horizon]` interval.
    pub fn span(&self) -> Interval {
        Interval { start: TimePoint(0), end: self.horizon() }
    }

    /// The asserted value of `subject.key` at exactly `time`.
    pub fn lookup(&self, subject: &str, key: &str, time: TimePoint) -> Option<&Value> {
        self.assertions.get(&(Ident::from(subject), Ident::from(key), time))
    }

    /// All `(time, value)` pairs for `subject.key`, ascending in time.
    pub fn series<'a>(&'a self, subject: &str, key: &str) -> impl Iterator<Item = (TimePoint, &'a Value)> + 'a {
        let (subject, key) = (Ident::from(subject), Ident::from(key));
        let lo = (subject.clone(), key.clone(), TimePoint(0));
        self.assertions
            .range(lo..)
            .take_while(move |((s, k, _), _)| *s == subject && *k == key)
            .map(|((_, _, t), v)| (*t, v))
    }

    /// Whether `subject` has any assertion at `time`.
    pub fn mentions_at(&self, subject: &str, time: TimePoint) -> bool {
        self.assertions
            .keys()
            .any(|(s, _, t)| s == subject && *t == time)
    }
}

/// A named agent; the same id designates its counterpart in every world.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Agent {
    pub id: Ident,
}

/// Looks up the asserted value of `subject.key` at `time` in `world`.
pub fn assertion_lookup<'w>(
    world: &'w World,
    subject: &str,
    key: &str,
    time: TimePoint,
) -> Option<&'w Value> {
    world.lookup(subject, key, time)
}

/// Whether `event` occurs in `world`: the value at `event.time` equals
/// `to_value` and the value at the previous tick exists and differs.
pub fn occurs(world: &World, event: &Event) -> Result<bool, EvalError> {
    let prev = event
        .time
        .pred()
        .ok_or_else(|| EvalError::InvalidEvent { event: event.to_string() })?;
    let now = world.lookup(event.subject.as_str(), event.key.as_str(), event.time);
    if now != Some(&event.to_value) {
        return Ok(false);
    }
    let before = world.lookup(event.subject.as_str(), event.key.as_str(), prev);
    Ok(matches!(before, Some(v) if *v != event.to_value))
}

/// Every event that occurs in `world`, ordered by `(subject, key, time)`.
pub fn derive_events(world: &World) -> Vec<Event> {
    let mut out = Vec::new();
    let mut prev: Option<(&AssertionKey, &Value)> = None;
    for (k @ (s, key, t), v) in &world.assertions {
        if let Some(((ps, pk, pt), pv)) = prev {
            if ps == s && pk == key && pt.0 + 1 == t.0 && pv != v {
                out.push(Event { subject: s.clone(), key: key.clone(), to_value: v.clone(), time: *t });
            }
        }
        prev = Some((k, v));
    }
    out
}
