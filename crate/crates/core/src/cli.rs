//! The `flourish` command line.
//!
//! [`run`] takes the argument list and returns the exit code together with
//! everything that would go to stdout and stderr, so the binary is a thin
//! wrapper and tests can drive the CLI in-process.
//!
//! Exit codes: 0 on success, 1 for evaluation errors and failed
//! expectations, 2 for unreadable, malformed or invalid input.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::dsl::{self, ParseDiagnostic};
use crate::error::EvalError;
use crate::individual::Aggregator;
use crate::neutrality::{neutrality, NeutralityReport, TheoryResult};
use crate::oracle::{full_scan, OracleReport};
use crate::query::{evaluate, Outcome, Overrides, Query, Settings};
use crate::scenario::Scenario;
use crate::theory::TheoryKind;
use crate::counterfactual::NearestPolicy;
use crate::world::{Event, Ident, Interval, TimePoint};

#[derive(Debug, Parser)]
#[command(name = "flourish", version, about = "Evaluate events, lives and group flourishing in scenario files")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate an event, a life or a group.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Run every declared expectation, and every group, under all theories.
    Neutrality { scenario: PathBuf },
    /// Brute-force listing of every world's similarity to a reference world.
    Oracle {
        scenario: PathBuf,
        /// Reference world [default: the scenario's actual world]
        #[arg(long)]
        world: Option<Ident>,
        /// Event as subject.key@tick=value
        #[arg(long)]
        event: Event,
    },
    /// Report parse and validation diagnostics.
    Validate { scenario: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum EvalCommand {
    /// Value of an event for an agent.
    Event {
        scenario: PathBuf,
        #[arg(long)]
        world: Option<Ident>,
        /// Event as subject.key@tick=value
        #[arg(long)]
        event: Event,
        #[arg(long)]
        agent: Ident,
        /// Tick at which well-being is compared [default: the event's tick]
        #[arg(long)]
        at: Option<u64>,
    },
    /// Value of a stretch of an agent's life.
    Life {
        scenario: PathBuf,
        #[arg(long)]
        world: Option<Ident>,
        #[arg(long)]
        agent: Ident,
        /// A..B [default: the whole world]
        #[arg(long)]
        interval: Option<Interval>,
        /// Compare against this world instead of the nearest ones
        #[arg(long)]
        baseline: Option<Ident>,
    },
    /// Flourishing of a group.
    Group {
        scenario: PathBuf,
        #[arg(long)]
        world: Option<Ident>,
        #[arg(long)]
        group: Ident,
        /// A..B [default: the whole world]
        #[arg(long)]
        interval: Option<Interval>,
        /// Compare against this world instead of the nearest ones
        #[arg(long)]
        baseline: Option<Ident>,
    },
}

/// Flags shared by every command. Each one, when given, beats the
/// scenario's own config.
#[derive(Debug, Default, Args)]
pub struct Options {
    /// hedonic, desire or objective
    #[arg(long, global = true)]
    pub theory: Option<TheoryKind>,
    /// unique or ties
    #[arg(long, global = true)]
    pub policy: Option<NearestPolicy>,
    /// Weight of the slope term in individual welfare
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    /// Weight of the slope term in group welfare
    #[arg(long, global = true)]
    pub lambda_group: Option<f64>,
    /// Floor on the value of an attempted activity
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// sum or mean, over an agent's well-being series
    #[arg(long, global = true)]
    pub aggregator: Option<Aggregator>,
    /// sum or mean, over a group's activities at one tick
    #[arg(long, global = true)]
    pub sync_aggregator: Option<Aggregator>,
    /// Let desire satisfaction count after death
    #[arg(long, global = true)]
    pub allow_posthumous: bool,
    #[arg(long, global = true)]
    pub json: bool,
    /// Echo resolved settings on stderr
    #[arg(long, global = true)]
    pub verbose: bool,
}

impl Options {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            theory: self.theory,
            allow_posthumous: self.allow_posthumous.then_some(true),
            policy: self.policy,
            lambda: self.lambda,
            lambda_group: self.lambda_group,
            epsilon: self.epsilon,
            aggregator: self.aggregator,
            sync_aggregator: self.sync_aggregator,
        }
    }
}

/// Result of one invocation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CliOutput {
    fn input_error(stderr: String) -> Self {
        CliOutput { code: 2, stdout: String::new(), stderr }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                CliOutput::input_error(text)
            } else {
                CliOutput { code: 0, stdout: text, stderr: String::new() }
            }
        }
    }
}

pub fn execute(cli: &Cli) -> CliOutput {
    let opts = &cli.options;
    match &cli.command {
        Command::Validate { scenario } => cmd_validate(scenario, opts),
        Command::Eval(e) => cmd_eval(e, opts),
        Command::Neutrality { scenario } => cmd_neutrality(scenario, opts),
        Command::Oracle { scenario, world, event } => cmd_oracle(scenario, world.as_ref(), event, opts),
    }
}

fn render_diags(path: &Path, diags: &[ParseDiagnostic]) -> String {
    let mut s = String::new();
    for d in diags {
        let _ = writeln!(s, "{}:{d}", path.display());
    }
    s
}

/// Reads, parses and validates. Warnings go to `stderr`; errors abort.
fn load(path: &Path, stderr: &mut String) -> Result<Scenario, CliOutput> {
    let bytes = std::fs::read(path).map_err(|e| {
        CliOutput::input_error(format!("{}: error[io-error]: cannot read file: {e}\n", path.display()))
    })?;
    let doc = dsl::parse_bytes(&bytes).map_err(|d| CliOutput::input_error(render_diags(path, &d)))?;
    let diags = dsl::validate_scenario(&doc);
    stderr.push_str(&render_diags(path, &diags));
    if diags.iter().any(ParseDiagnostic::is_error) {
        return Err(CliOutput::input_error(std::mem::take(stderr)));
    }
    Ok(doc)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// `key  value` lines with the values aligned.
fn table(rows: &[(&str, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
}

fn list(ids: &[Ident]) -> String {
    if ids.is_empty() {
        return "(none)".into();
    }
    ids.iter().map(Ident::as_str).collect::<Vec<_>>().join(" ")
}

fn eval_error(op: &str, e: &EvalError) -> String {
    format!("error: {op}: {}: {e}\n", e.code())
}

fn cmd_validate(path: &Path, opts: &Options) -> CliOutput {
    let bytes = match std::fs::read(path) {
        Ok(b) => b,
        Err(e) => {
            let d = ParseDiagnostic::error(crate::dsl::SourcePos::new(1, 1), "io-error", format!("cannot read file: {e}"));
            return finish_validate(path, None, vec![d], opts);
        }
    };
    match dsl::parse_bytes(&bytes) {
        Ok(doc) => {
            let diags = dsl::validate_scenario(&doc);
            finish_validate(path, Some(doc.name.as_str()), diags, opts)
        }
        Err(diags) => finish_validate(path, None, diags, opts),
    }
}

#[derive(Serialize)]
struct ValidateJson<'a> {
    command: &'static str,
    file: String,
    scenario: Option<&'a str>,
    errors: usize,
    warnings: usize,
    diagnostics: &'a [ParseDiagnostic],
}

fn finish_validate(path: &Path, name: Option<&str>, diags: Vec<ParseDiagnostic>, opts: &Options) -> CliOutput {
    let errors = diags.iter().filter(|d| d.is_error()).count();
    let warnings = diags.len() - errors;
    let stdout = if opts.json {
        to_json(&ValidateJson {
            command: "validate",
            file: path.display().to_string(),
            scenario: name,
            errors,
            warnings,
            diagnostics: &diags,
        })
    } else {
        format!(
            "{}: {errors} error(s), {warnings} warning(s)\n",
            name.map_or_else(|| path.display().to_string(), str::to_owned)
        )
    };
    CliOutput { code: if errors > 0 { 2 } else { 0 }, stdout, stderr: render_diags(path, &diags) }
}

#[derive(Serialize)]
struct EventJson<'a> {
    command: &'static str,
    scenario: &'a str,
    world: &'a Ident,
    event: String,
    agent: &'a Ident,
    time: u64,
    theory: TheoryKind,
    allow_posthumous: bool,
    policy: String,
    comparison_worlds: &'a [Ident],
    actual_wellbeing: f64,
    counterfactual_wellbeing: f64,
    value: f64,
    annotations: &'a [&'static str],
}

#[derive(Serialize)]
struct LifeJson<'a> {
    command: &'static str,
    scenario: &'a str,
    world: &'a Ident,
    agent: &'a Ident,
    interval: String,
    theory: TheoryKind,
    allow_posthumous: bool,
    policy: String,
    lambda: f64,
    aggregator: Aggregator,
    baseline: Option<&'a Ident>,
    comparison_worlds: &'a [Ident],
    subject_welfare: f64,
    comparison_welfare: f64,
    value: f64,
}

#[derive(Serialize)]
struct GroupJson<'a> {
    command: &'static str,
    scenario: &'a str,
    world: &'a Ident,
    group: &'a Ident,
    interval: String,
    policy: String,
    epsilon: f64,
    lambda_group: f64,
    sync_aggregator: Aggregator,
    baseline: Option<&'a Ident>,
    comparison_worlds: &'a [Ident],
    synchronic: &'a [f64],
    diachronic_aggregate: f64,
    group_welfare: f64,
    comparison_welfare: f64,
    group_life_value: f64,
}

fn cmd_eval(cmd: &EvalCommand, opts: &Options) -> CliOutput {
    let (path, query, op) = match cmd {
        EvalCommand::Event { scenario, world, event, agent, at } => (
            scenario,
            Query::Event { world: world.clone(), event: event.clone(), agent: agent.clone(), at: at.map(TimePoint) },
            "eval event",
        ),
        EvalCommand::Life { scenario, world, agent, interval, baseline } => (
            scenario,
            Query::Life {
                world: world.clone(),
                agent: agent.clone(),
                interval: *interval,
                baseline: baseline.clone(),
                lambda: None,
            },
            "eval life",
        ),
        EvalCommand::Group { scenario, world, group, interval, baseline } => (
            scenario,
            Query::Group {
                world: world.clone(),
                group: group.clone(),
                interval: *interval,
                baseline: baseline.clone(),
                lambda_group: None,
            },
            "eval group",
        ),
    };
    let mut stderr = String::new();
    let doc = match load(path, &mut stderr) {
        Ok(doc) => doc,
        Err(out) => return out,
    };
    let settings = match Settings::resolve(&doc, None, &opts.overrides()) {
        Ok(s) => s,
        Err(msg) => return CliOutput::input_error(format!("{stderr}error: {op}: {msg}\n")),
    };
    if let Err(e) = query.check_ids(&doc) {
        stderr.push_str(&eval_error(op, &e));
        return CliOutput::input_error(stderr);
    }
    if opts.verbose {
        let _ = writeln!(stderr, "settings: {}", serde_json::to_string(&settings).expect("settings serialize"));
    }
    let outcome = match evaluate(&doc, &query, &settings) {
        Ok(o) => o,
        Err(e) => {
            stderr.push_str(&eval_error(op, &e));
            return CliOutput { code: 1, stdout: String::new(), stderr };
        }
    };
    let world = query.world(&doc).expect("checked above");
    let name = doc.name.as_str();
    let stdout = match (&query, &outcome) {
        (Query::Event { event, agent, at, .. }, Outcome::Event(v)) => {
            let j = EventJson {
                command: op,
                scenario: name,
                world: &world.id,
                event: event.to_string(),
                agent,
                time: at.unwrap_or(event.time).tick(),
                theory: settings.theory.kind,
                allow_posthumous: settings.theory.allow_posthumous,
                policy: settings.policy.to_string(),
                comparison_worlds: &v.comparison_worlds,
                actual_wellbeing: v.actual_wellbeing,
                counterfactual_wellbeing: v.counterfactual_wellbeing,
                value: v.value,
                annotations: &v.annotations,
            };
            if opts.json {
                to_json(&j)
            } else {
                table(&[
                    ("scenario", name.to_owned()),
                    ("event", j.event.clone()),
                    ("agent", agent.to_string()),
                    ("world", world.id.to_string()),
                    ("time", j.time.to_string()),
                    ("theory", j.theory.to_string()),
                    ("allow posthumous", j.allow_posthumous.to_string()),
                    ("policy", j.policy.clone()),
                    ("comparison worlds", list(j.comparison_worlds)),
                    ("actual well-being", j.actual_wellbeing.to_string()),
                    ("counterfactual well-being", j.counterfactual_wellbeing.to_string()),
                    ("annotations", if v.annotations.is_empty() { "(none)".into() } else { v.annotations.join(" ") }),
                    ("value", j.value.to_string()),
                ])
            }
        }
        (Query::Life { agent, interval, baseline, .. }, Outcome::Life(v)) => {
            let j = LifeJson {
                command: op,
                scenario: name,
                world: &world.id,
                agent,
                interval: interval.unwrap_or_else(|| world.span()).to_string(),
                theory: settings.theory.kind,
                allow_posthumous: settings.theory.allow_posthumous,
                policy: settings.policy.to_string(),
                lambda: settings.welfare.shape_weight,
                aggregator: settings.welfare.aggregator,
                baseline: baseline.as_ref(),
                comparison_worlds: &v.comparison_worlds,
                subject_welfare: v.subject_welfare,
                comparison_welfare: v.comparison_welfare,
                value: v.value,
            };
            if opts.json {
                to_json(&j)
            } else {
                table(&[
                    ("scenario", name.to_owned()),
                    ("agent", agent.to_string()),
                    ("world", world.id.to_string()),
                    ("interval", j.interval.clone()),
                    ("theory", j.theory.to_string()),
                    ("allow posthumous", j.allow_posthumous.to_string()),
                    ("policy", j.policy.clone()),
                    ("lambda", j.lambda.to_string()),
                    ("aggregator", j.aggregator.to_string()),
                    ("comparison worlds", list(j.comparison_worlds)),
                    ("welfare", j.subject_welfare.to_string()),
                    ("comparison welfare", j.comparison_welfare.to_string()),
                    ("value", j.value.to_string()),
                ])
            }
        }
        (Query::Group { group, baseline, .. }, Outcome::Group(r)) => {
            let j = GroupJson {
                command: op,
                scenario: name,
                world: &world.id,
                group,
                interval: r.interval.to_string(),
                policy: settings.policy.to_string(),
                epsilon: settings.group.attempt_floor,
                lambda_group: settings.group.shape_weight,
                sync_aggregator: settings.group.sync_aggregator,
                baseline: baseline.as_ref(),
                comparison_worlds: &r.comparison_worlds,
                synchronic: &r.synchronic,
                diachronic_aggregate: r.diachronic_aggregate,
                group_welfare: r.group_welfare,
                comparison_welfare: r.comparison_welfare,
                group_life_value: r.group_life_value,
            };
            if opts.json {
                to_json(&j)
            } else {
                let series: Vec<String> = r.synchronic.iter().map(f64::to_string).collect();
                table(&[
                    ("scenario", name.to_owned()),
                    ("group", group.to_string()),
                    ("world", world.id.to_string()),
                    ("interval", j.interval.clone()),
                    ("policy", j.policy.clone()),
                    ("epsilon", j.epsilon.to_string()),
                    ("lambda group", j.lambda_group.to_string()),
                    ("sync aggregator", j.sync_aggregator.to_string()),
                    ("comparison worlds", list(j.comparison_worlds)),
                    ("synchronic", series.join(" ")),
                    ("diachronic aggregate", j.diachronic_aggregate.to_string()),
                    ("group welfare", j.group_welfare.to_string()),
                    ("comparison welfare", j.comparison_welfare.to_string()),
                    ("group life value", j.group_life_value.to_string()),
                ])
            }
        }
        _ => unreachable!("evaluate answers in the query's kind"),
    };
    CliOutput { code: 0, stdout, stderr }
}

fn theory_cells(results: &[TheoryResult]) -> String {
    let mut s = String::new();
    for r in results {
        let cell = match (&r.value, &r.error) {
            (Some(v), _) => format!("{v} ({})", r.sign.expect("sign accompanies value")),
            (None, Some(e)) => format!("n/a ({e})"),
            (None, None) => "n/a".into(),
        };
        let _ = writeln!(s, "    {:<10} {cell}", r.theory.name());
    }
    s
}

fn render_neutrality(r: &NeutralityReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "scenario {}", r.scenario);
    let _ = writeln!(s, "\nindividual");
    if r.individual.is_empty() {
        let _ = writeln!(s, "  (no expectations)");
    }
    for row in &r.individual {
        let _ = writeln!(s, "  {}: {}, expect {}", row.name, row.description, row.expected);
        s.push_str(&theory_cells(&row.results));
        let _ = writeln!(s, "    {:<10} {}", "holds", if row.holds { "yes" } else { "NO" });
    }
    let _ = writeln!(s, "\ngroup");
    if r.group.is_empty() {
        let _ = writeln!(s, "  (no groups)");
    }
    for row in &r.group {
        let expect = row.expected.map(|e| format!(", expect {e}")).unwrap_or_default();
        let _ = writeln!(s, "  {}: {}{expect}", row.name, row.description);
        s.push_str(&theory_cells(&row.results));
        let _ = writeln!(s, "    {:<10} {}", "identical", if row.identical { "yes" } else { "NO" });
        if row.expected.is_some() {
            let _ = writeln!(s, "    {:<10} {}", "holds", if row.holds { "yes" } else { "NO" });
        }
    }
    let _ = writeln!(s, "\nresult: {}", if r.passed { "pass" } else { "fail" });
    s
}

fn cmd_neutrality(path: &Path, opts: &Options) -> CliOutput {
    let mut stderr = String::new();
    let doc = match load(path, &mut stderr) {
        Ok(doc) => doc,
        Err(out) => return out,
    };
    let overrides = opts.overrides();
    if let Err(msg) = Settings::resolve(&doc, None, &overrides) {
        return CliOutput::input_error(format!("{stderr}error: neutrality: {msg}\n"));
    }
    let report = match neutrality(&doc, &overrides) {
        Ok(r) => r,
        Err(d) => return CliOutput::input_error(stderr + &render_diags(path, &d)),
    };
    for row in report.individual.iter().filter(|r| !r.holds) {
        let _ = writeln!(stderr, "neutrality: expectation `{}` ({}) does not hold", row.name, row.description);
    }
    for row in report.group.iter().filter(|r| !r.holds) {
        let why = if row.identical { "does not have the expected sign" } else { "differs between theories" };
        let _ = writeln!(stderr, "neutrality: group evaluation `{}` ({}) {why}", row.name, row.description);
    }
    let stdout = if opts.json { to_json(&report) } else { render_neutrality(&report) };
    CliOutput { code: if report.passed { 0 } else { 1 }, stdout, stderr }
}

fn render_oracle(r: &OracleReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "reference  {}", r.reference);
    let _ = writeln!(s, "event      {}", r.event);
    let width = r.rows.iter().map(|row| row.world.as_str().len()).max().unwrap_or(0).max(5);
    let _ = writeln!(s, "\n{:<width$}  similarity  occurs  candidate  maximal", "world");
    let yes = |b: bool| if b { "yes" } else { "no" };
    for row in &r.rows {
        let candidate = if row.is_reference { "reference" } else { yes(row.candidate) };
        let _ = writeln!(
            s,
            "{:<width$}  {:<10}  {:<6}  {:<9}  {}",
            row.world.as_str(),
            row.similarity,
            yes(row.event_occurs),
            candidate,
            yes(row.maximal)
        );
    }
    let _ = writeln!(s, "\nmaximizers: {}", list(&r.maximizers));
    s
}

fn cmd_oracle(path: &Path, world: Option<&Ident>, event: &Event, opts: &Options) -> CliOutput {
    let mut stderr = String::new();
    let doc = match load(path, &mut stderr) {
        Ok(doc) => doc,
        Err(out) => return out,
    };
    let reference = match world {
        Some(w) => w.clone(),
        None => doc.default_world().expect("a parsed scenario has a world").id.clone(),
    };
    if let Err(e) = doc.require_world(reference.as_str()) {
        stderr.push_str(&eval_error("oracle", &e));
        return CliOutput::input_error(stderr);
    }
    let report = match full_scan(&doc.worlds, reference.as_str(), event) {
        Ok(r) => r,
        Err(e) => {
            stderr.push_str(&eval_error("oracle", &e));
            return CliOutput { code: 1, stdout: String::new(), stderr };
        }
    };
    let mut code = 0;
    if let Err(e) = report.require_maximizers() {
        stderr.push_str(&eval_error("oracle", &e));
        code = 1;
    }
    let stdout = if opts.json { to_json(&report) } else { render_oracle(&report) };
    CliOutput { code, stdout, stderr }
}
