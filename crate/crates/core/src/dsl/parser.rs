use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use rust_decimal::Decimal;

use super::lexer::{lex, Tok, Token};
use super::{ParseDiagnostic, SourcePos};
use crate::group::{Activity, Group, GroupFunction, Provenance, RoleBinding};
use crate::scenario::{ConfigEntry, Scenario};
use crate::theory::{
    AssertionPattern, Desire, DesireMode, ObjectiveItem, TimePattern, ALIVE, PAIN, PLEASURE,
};
use crate::world::{normalize, Agent, Ident, Interval, PropertyAssertion, TimePoint, Value, World};

type Diags = Vec<ParseDiagnostic>;

/// Parses scenario source text.
///
/// Syntax errors stop the parse at the first offending token. Duplicate,
/// unresolved and out-of-range declarations are all collected, so a single
/// run reports every one of them.
pub fn parse(source: &str) -> Result<Scenario, Diags> {
    let tokens = lex(source).map_err(|d| vec![d])?;
    let mut p = Parser { tokens, at: 0, diags: Vec::new() };
    let doc = match p.document() {
        Ok(doc) => doc,
        Err(d) => {
            p.diags.push(d);
            return Err(sorted(p.diags));
        }
    };
    let mut diags = p.diags;
    resolve(&doc, &mut diags);
    if diags.is_empty() {
        Ok(doc)
    } else {
        Err(sorted(diags))
    }
}

/// Like [`parse`], for input that may not be UTF-8.
pub fn parse_bytes(source: &[u8]) -> Result<Scenario, Diags> {
    match std::str::from_utf8(source) {
        Ok(s) => parse(s),
        Err(e) => {
            let before = &source[..e.valid_up_to()];
            let line = before.iter().filter(|&&b| b == b'\n').count() as u32 + 1;
            let line_start = before.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
            let column = String::from_utf8_lossy(&before[line_start..]).chars().count() as u32 + 1;
            Err(vec![ParseDiagnostic::error(
                SourcePos::new(line, column),
                "syntax",
                "source is not valid UTF-8",
            )])
        }
    }
}

fn sorted(mut diags: Diags) -> Diags {
    diags.sort_by_key(|d| (d.line, d.column));
    diags
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
    diags: Diags,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.at.min(self.tokens.len() - 1)]
    }

    fn next(&mut self) -> Token {
        let t = self.peek().clone();
        if self.at < self.tokens.len() - 1 {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> ParseDiagnostic {
        let t = self.peek();
        ParseDiagnostic::error(t.pos, "syntax", format!("expected {wanted}, found {}", t.tok.describe()))
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn keyword(&mut self, kw: &str) -> Result<SourcePos, ParseDiagnostic> {
        if self.at_keyword(kw) {
            Ok(self.next().pos)
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    fn punct(&mut self, tok: Tok) -> Result<SourcePos, ParseDiagnostic> {
        if self.peek().tok == tok {
            Ok(self.next().pos)
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(Ident, SourcePos), ParseDiagnostic> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let id = Ident::from(s.as_str());
                Ok((id, self.next().pos))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn int(&mut self, what: &str) -> Result<(u64, SourcePos), ParseDiagnostic> {
        match &self.peek().tok {
            Tok::Num(s) if !s.starts_with('-') && !s.contains('.') => {
                let parsed = s.parse::<u64>();
                let pos = self.next().pos;
                match parsed {
                    Ok(n) => Ok((n, pos)),
                    Err(_) => {
                        self.diags.push(ParseDiagnostic::error(pos, "bad-value", format!("{what} is too large")));
                        Ok((0, pos))
                    }
                }
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn number(&mut self, what: &str) -> Result<(Decimal, SourcePos), ParseDiagnostic> {
        match &self.peek().tok {
            Tok::Num(s) => {
                let parsed = Decimal::from_str_exact(s);
                let pos = self.next().pos;
                match parsed {
                    Ok(d) => Ok((normalize(d), pos)),
                    Err(_) => {
                        self.diags.push(ParseDiagnostic::error(pos, "bad-value", format!("{what} is out of range")));
                        Ok((Decimal::ZERO, pos))
                    }
                }
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn value(&mut self) -> Result<(Value, SourcePos), ParseDiagnostic> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let v = match s.as_str() {
                    "true" => Value::Bool(true),
                    "false" => Value::Bool(false),
                    s => Value::Symbol(Ident::from(s)),
                };
                Ok((v, self.next().pos))
            }
            Tok::Num(_) => {
                let (d, pos) = self.number("a value")?;
                Ok((Value::Number(d), pos))
            }
            _ => Err(self.unexpected("a number, identifier, `true` or `false`")),
        }
    }

    fn positive(&mut self, what: &str) -> Result<Decimal, ParseDiagnostic> {
        let (w, pos) = self.number(what)?;
        if w <= Decimal::ZERO {
            self.diags.push(ParseDiagnostic::error(pos, "bad-value", format!("{what} must be positive, got {w}")));
        }
        Ok(w)
    }

    fn document(&mut self) -> Result<Scenario, ParseDiagnostic> {
        if self.peek().tok == Tok::Eof {
            return Err(ParseDiagnostic::error(
                self.peek().pos,
                "syntax",
                "a scenario must start with `scenario NAME`",
            ));
        }
        let header = self.keyword("scenario")?;
        let (name, _) = self.ident("a scenario name")?;
        let mut doc = Scenario { name, ..Scenario::default() };
        let mut seen = Seen::default();
        loop {
            let t = self.peek().clone();
            let kw = match &t.tok {
                Tok::Eof => break,
                Tok::Ident(s) => s.clone(),
                _ => return Err(self.unexpected("a declaration")),
            };
            match kw.as_str() {
                "world" => {
                    let w = self.world()?;
                    seen.check(&mut self.diags, "world", w.id.as_str(), t.pos);
                    doc.worlds.push(w);
                }
                "agent" => {
                    self.next();
                    let (id, _) = self.ident("an agent name")?;
                    seen.check(&mut self.diags, "agent", id.as_str(), t.pos);
                    doc.agents.push(Agent { id });
                }
                "desire" => doc.desires.push(self.desire()?),
                "objective" => {
                    let item = self.objective()?;
                    seen.check(&mut self.diags, "objective", item.key.as_str(), t.pos);
                    doc.objective_items.push(item);
                }
                "group" => {
                    let g = self.group()?;
                    seen.check(&mut self.diags, "group", g.id.as_str(), t.pos);
                    doc.groups.push(g);
                }
                "activity" => {
                    let a = self.activity()?;
                    seen.check(&mut self.diags, "activity", a.id.as_str(), t.pos);
                    doc.activities.push(a);
                }
                "config" => {
                    self.next();
                    let (key, _) = self.ident("a config key")?;
                    self.punct(Tok::Eq)?;
                    let (value, _) = self.value()?;
                    seen.check(&mut self.diags, "config key", key.as_str(), t.pos);
                    doc.config.push(ConfigEntry { key, value, pos: t.pos });
                }
                _ => return Err(self.unexpected("a declaration")),
            }
        }
        if doc.worlds.is_empty() {
            self.diags.push(ParseDiagnostic::error(header, "syntax", "a scenario needs at least one world"));
        }
        Ok(doc)
    }

    fn world(&mut self) -> Result<World, ParseDiagnostic> {
        self.keyword("world")?;
        let (id, _) = self.ident("a world name")?;
        self.punct(Tok::LBrace)?;
        let mut world = World::new(id);
        let mut lines: BTreeMap<(Ident, Ident, TimePoint), u32> = BTreeMap::new();
        while !matches!(self.peek().tok, Tok::RBrace) {
            let at = self.keyword("assert").map_err(|_| self.unexpected("`assert` or `}`"))?;
            let (subject, _) = self.ident("a subject")?;
            self.punct(Tok::Dot)?;
            let (key, _) = self.ident("a property key")?;
            self.punct(Tok::At)?;
            let (tick, _) = self.int("a tick")?;
            self.punct(Tok::Eq)?;
            let (value, vpos) = self.value()?;
            self.check_reserved(&key, &value, vpos);
            let time = TimePoint(tick);
            let slot = (subject.clone(), key.clone(), time);
            if let Some(first) = lines.get(&slot) {
                self.diags.push(ParseDiagnostic::error(
                    at,
                    "dup-assert",
                    format!(
                        "{subject}.{key}@{tick} in world {} asserted on line {first} and again on line {}",
                        world.id, at.line
                    ),
                ));
                continue;
            }
            lines.insert(slot, at.line);
            // Cannot fail: the slot was checked above.
            let _ = world.assert(PropertyAssertion { subject, key, time, value });
        }
        self.punct(Tok::RBrace)?;
        Ok(world)
    }

    fn check_reserved(&mut self, key: &Ident, value: &Value, pos: SourcePos) {
        let ok = match key.as_str() {
            k if k == PLEASURE || k == PAIN => value.as_number().is_some_and(|d| d >= Decimal::ZERO),
            k if k == ALIVE => value.as_bool().is_some(),
            _ => true,
        };
        if !ok {
            let wanted = if key == ALIVE { "true or false" } else { "a non-negative number" };
            self.diags.push(ParseDiagnostic::error(
                pos,
                "bad-value",
                format!("`{key}` must be {wanted}, got `{value}`"),
            ));
        }
    }

    fn desire(&mut self) -> Result<Desire, ParseDiagnostic> {
        let pos = self.keyword("desire")?;
        let (agent, _) = self.ident("an agent name")?;
        self.keyword("wants")?;
        let (subject, _) = self.ident("a subject")?;
        self.punct(Tok::Dot)?;
        let (key, _) = self.ident("a property key")?;
        self.punct(Tok::At)?;
        let time = if self.at_keyword("any") {
            self.next();
            TimePattern::Any
        } else {
            TimePattern::At(TimePoint(self.int("a tick or `any`")?.0))
        };
        self.punct(Tok::Eq)?;
        let (value, _) = self.value()?;
        self.keyword("weight")?;
        let weight = self.positive("desire weight")?;
        let mode = if self.at_keyword("mode") {
            self.next();
            let (m, mpos) = self.ident("`concurrent` or `achievement`")?;
            match m.as_str() {
                "concurrent" => DesireMode::Concurrent,
                "achievement" => DesireMode::Achievement,
                other => {
                    return Err(ParseDiagnostic::error(
                        mpos,
                        "syntax",
                        format!("expected `concurrent` or `achievement`, found `{other}`"),
                    ))
                }
            }
        } else {
            DesireMode::default()
        };
        Ok(Desire {
            agent,
            target: AssertionPattern { subject, key, time, value },
            weight,
            mode,
            pos,
        })
    }

    fn objective(&mut self) -> Result<ObjectiveItem, ParseDiagnostic> {
        let pos = self.keyword("objective")?;
        let (key, _) = self.ident("a property key")?;
        self.punct(Tok::Ge)?;
        let (threshold, _) = self.number("a threshold")?;
        self.keyword("weight")?;
        let weight = self.positive("item weight")?;
        Ok(ObjectiveItem { key, threshold, weight, pos })
    }

    fn group(&mut self) -> Result<Group, ParseDiagnostic> {
        let pos = self.keyword("group")?;
        let (id, _) = self.ident("a group name")?;
        self.punct(Tok::LBrace)?;
        self.keyword("function")?;
        let (function, _) = self.ident("a function name")?;
        self.keyword("provenance")?;
        let (prov, _) = self.ident("`designed` or `evolved`")?;
        let mut bindings = Vec::new();
        while self.at_keyword("member") {
            let mpos = self.next().pos;
            let (agent, _) = self.ident("an agent name")?;
            self.keyword("role")?;
            let (role, _) = self.ident("a role name")?;
            self.keyword("from")?;
            let (from, fpos) = self.int("a tick")?;
            self.keyword("to")?;
            let (to, _) = self.int("a tick")?;
            let optional_context = self.at_keyword("optional");
            if optional_context {
                self.next();
            }
            let span = Interval::new(from, to).unwrap_or_else(|| {
                self.diags.push(ParseDiagnostic::error(
                    fpos,
                    "bad-value",
                    format!("member span {from}..{to} ends before it starts"),
                ));
                Interval::new(from, from).expect("degenerate interval")
            });
            bindings.push(RoleBinding { agent, role, group: id.clone(), span, optional_context, pos: mpos });
        }
        self.punct(Tok::RBrace).map_err(|_| self.unexpected("`member` or `}`"))?;
        Ok(Group {
            id,
            function: GroupFunction {
                id: function,
                description: String::new(),
                provenance: Provenance::parse(prov.as_str()),
            },
            bindings,
            pos,
        })
    }

    fn activity(&mut self) -> Result<Activity, ParseDiagnostic> {
        let pos = self.keyword("activity")?;
        let (id, _) = self.ident("an activity name")?;
        self.punct(Tok::LBrace)?;
        self.keyword("agent")?;
        let (agent, _) = self.ident("an agent name")?;
        self.keyword("role")?;
        let (role, _) = self.ident("a role name")?;
        self.keyword("group")?;
        let (group, _) = self.ident("a group name")?;
        self.keyword("time")?;
        let (tick, _) = self.int("a tick")?;
        let attempted = if self.at_keyword("attempted") {
            true
        } else if self.at_keyword("unattempted") {
            false
        } else {
            return Err(self.unexpected("`attempted` or `unattempted`"));
        };
        self.next();
        self.keyword("degree")?;
        let (degree, dpos) = self.number("a degree")?;
        if degree < Decimal::ZERO || degree > Decimal::ONE {
            self.diags.push(ParseDiagnostic::error(dpos, "bad-value", format!("degree must lie in [0, 1], got {degree}")));
        } else if !attempted && !degree.is_zero() {
            self.diags.push(ParseDiagnostic::error(
                dpos,
                "bad-value",
                format!("an unattempted activity has degree 0, got {degree}"),
            ));
        }
        let mut worlds = Vec::new();
        while self.at_keyword("world") {
            self.next();
            worlds.push(self.ident("a world name")?.0);
        }
        self.punct(Tok::RBrace).map_err(|_| self.unexpected("`world` or `}`"))?;
        Ok(Activity {
            id,
            agent,
            role,
            group,
            time: TimePoint(tick),
            attempted,
            realization_degree: degree,
            worlds,
            pos,
        })
    }
}

#[derive(Default)]
struct Seen(BTreeMap<(&'static str, String), SourcePos>);

impl Seen {
    fn check(&mut self, diags: &mut Diags, kind: &'static str, id: &str, pos: SourcePos) {
        if let Some(first) = self.0.get(&(kind, id.to_owned())) {
            diags.push(ParseDiagnostic::error(
                pos,
                "dup-decl",
                format!("{kind} `{id}` already declared on line {}", first.line),
            ));
        } else {
            self.0.insert((kind, id.to_owned()), pos);
        }
    }
}

/// Cross-reference checks run once the whole document is read, so
/// declarations may appear in any order.
fn resolve(doc: &Scenario, diags: &mut Diags) {
    let agents: BTreeSet<&str> = doc.agents.iter().map(|a| a.id.as_str()).collect();
    let worlds: BTreeSet<&str> = doc.worlds.iter().map(|w| w.id.as_str()).collect();
    let mut unresolved = |pos: SourcePos, msg: String| diags.push(ParseDiagnostic::error(pos, "unresolved", msg));

    for d in &doc.desires {
        if !agents.contains(d.agent.as_str()) {
            unresolved(d.pos, format!("desire names unknown agent `{}`", d.agent));
        }
    }
    for g in &doc.groups {
        for b in &g.bindings {
            if !agents.contains(b.agent.as_str()) {
                unresolved(b.pos, format!("member `{}` of group {} is not a declared agent", b.agent, g.id));
            }
        }
    }
    for a in &doc.activities {
        if !agents.contains(a.agent.as_str()) {
            unresolved(a.pos, format!("activity {} names unknown agent `{}`", a.id, a.agent));
        }
        match doc.group(a.group.as_str()) {
            None => unresolved(a.pos, format!("activity {} names unknown group `{}`", a.id, a.group)),
            Some(g) => {
                if !g.bindings.iter().any(|b| b.agent == a.agent && b.role == a.role) {
                    unresolved(
                        a.pos,
                        format!("{} never holds role `{}` in group {}", a.agent, a.role, g.id),
                    );
                }
            }
        }
        for w in &a.worlds {
            if !worlds.contains(w.as_str()) {
                unresolved(a.pos, format!("activity {} names unknown world `{w}`", a.id));
            }
        }
    }
    // Keys belonging to evaluation queries are checked by `validate_scenario`.
    for c in doc.config.iter().filter(|c| c.key == "actual_world") {
        match &c.value {
            Value::Symbol(w) if worlds.contains(w.as_str()) => {}
            v => unresolved(c.pos, format!("actual_world names unknown world `{v}`")),
        }
    }
}

impl FromStr for Scenario {
    type Err = Diags;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
scenario small
agent jack
world W_A {
  assert jack.pain@3 = 5
  assert jack.pain@2 = 0
}
world W_B {
  assert jack.pain@2 = 0
}
desire jack wants jack.pain@any = 0 weight 1
objective health >= 0.5 weight 2
config actual_world = W_A
";

    fn codes(src: &str) -> Vec<String> {
        parse(src).unwrap_err().into_iter().map(|d| d.code).collect()
    }

    #[test]
    fn parses_small_document() {
        let doc = parse(SMALL).unwrap();
        assert_eq!(doc.name, "small");
        assert_eq!(doc.worlds.len(), 2);
        assert_eq!(doc.agents.len(), 1);
        assert_eq!(doc.worlds[0].len(), 2);
        assert_eq!(doc.desires[0].mode, DesireMode::Concurrent);
        assert_eq!(doc.desires[0].target.time, TimePattern::Any);
        assert_eq!(doc.objective_items[0].threshold, Decimal::new(5, 1));
        assert_eq!(doc.default_world().unwrap().id, "W_A");
    }

    #[test]
    fn empty_file_is_a_syntax_error() {
        let d = parse("").unwrap_err();
        assert_eq!(d[0].code, "syntax");
        assert_eq!((d[0].line, d[0].column), (1, 1));
        assert_eq!(codes("  # only a comment\n"), ["syntax"]);
    }

    #[test]
    fn duplicate_assertion_reports_both_lines() {
        let src = "scenario s\nworld W {\n  assert jack.pain@3 = 5\n  assert jack.pain@3 = 5\n}\n";
        let d = parse(src).unwrap_err();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].code, "dup-assert");
        assert_eq!(d[0].line, 4);
        assert!(d[0].message.contains("line 3") && d[0].message.contains("line 4"), "{}", d[0].message);
    }

    #[test]
    fn reserved_keys_are_typed() {
        assert_eq!(codes("scenario s\nworld W { assert a.pain@0 = -1 }"), ["bad-value"]);
        assert_eq!(codes("scenario s\nworld W { assert a.pleasure@0 = lots }"), ["bad-value"]);
        assert_eq!(codes("scenario s\nworld W { assert a.alive@0 = 1 }"), ["bad-value"]);
        assert!(parse("scenario s\nworld W { assert a.mood@0 = -1 }").is_ok());
    }

    #[test]
    fn unresolved_references() {
        assert_eq!(codes("scenario s\nworld W {}\ndesire bob wants x.y@0 = 1 weight 1"), ["unresolved"]);
        assert_eq!(codes("scenario s\nworld W {}\nconfig actual_world = W_X"), ["unresolved"]);
        let src = "scenario s\nagent a\nworld W {}\n\
                   group g { function f provenance designed member a role r from 0 to 1 optional }\n\
                   activity x { agent a role boss group g time 0 attempted degree 1 world W2 }";
        assert_eq!(codes(src), ["unresolved", "unresolved"]);
    }

    #[test]
    fn values_out_of_range() {
        assert_eq!(codes("scenario s\nworld W {}\nobjective h >= 1 weight 0"), ["bad-value"]);
        assert_eq!(codes("scenario s\nworld W { assert a.b@99999999999999999999999 = 1 }"), ["bad-value"]);
        let src = "scenario s\nagent a\nworld W {}\n\
                   group g { function f provenance designed member a role r from 3 to 1 optional }\n\
                   activity x { agent a role r group g time 0 unattempted degree 0.5 }";
        assert_eq!(codes(src), ["bad-value", "bad-value"]);
    }

    #[test]
    fn syntax_errors_point_at_the_token() {
        let d = parse("scenario s\nworld W {\n  assert jack pain@3 = 5\n}").unwrap_err();
        assert_eq!((d[0].code.as_str(), d[0].line, d[0].column), ("syntax", 3, 15));
        assert_eq!(codes("scenario s\nworld W {}\nworld W {}"), ["dup-decl"]);
        assert_eq!(codes("scenario s"), ["syntax"]);
    }

    #[test]
    fn invalid_utf8_is_a_diagnostic() {
        let d = parse_bytes(b"scenario s\nworld \xff").unwrap_err();
        assert_eq!((d[0].line, d[0].column), (2, 7));
    }
}
