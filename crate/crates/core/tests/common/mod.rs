#![allow(dead_code)]

use std::fmt::Write;
use std::path::PathBuf;

use flourish::cli::{run, CliOutput};
use flourish::{dsl, Scenario};
use rand::seq::SliceRandom;
use rand::Rng;

pub const FIXTURES: [&str; 6] = ["jack_hill", "jill_exercise", "jack_paths", "jessica", "jill_gift", "hiring"];

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.scn"))
}

pub fn fixture_source(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap()
}

pub fn fixture(name: &str) -> Scenario {
    dsl::parse(&fixture_source(name)).unwrap_or_else(|d| panic!("{name}: {d:?}"))
}

/// Runs the CLI in-process. `args` excludes the program name; the first
/// argument naming a fixture (e.g. `@jack_hill`) is replaced by its path.
pub fn cli(args: &[&str]) -> CliOutput {
    let mut argv = vec!["flourish".to_owned()];
    for a in args {
        match a.strip_prefix('@') {
            Some(name) => argv.push(fixture_path(name).display().to_string()),
            None => argv.push((*a).to_owned()),
        }
    }
    run(argv)
}

fn pick<'a, R: Rng>(rng: &mut R, xs: &'a [&'a str]) -> &'a str {
    xs.choose(rng).unwrap()
}

fn number<R: Rng>(rng: &mut R, non_negative: bool) -> String {
    let int: i64 = rng.gen_range(0..1000);
    let sign = if !non_negative && rng.gen_bool(0.2) { "-" } else { "" };
    match rng.gen_range(0..3) {
        0 => format!("{sign}{int}"),
        1 => format!("{sign}{int}.{}", rng.gen_range(0..100)),
        // Trailing zeros must not survive canonicalization.
        _ => format!("{sign}{int}.{}0", rng.gen_range(1..10)),
    }
}

fn value<R: Rng>(rng: &mut R, key: &str) -> String {
    match key {
        "alive" => pick(rng, &["true", "false"]).to_owned(),
        "pleasure" | "pain" => number(rng, true),
        _ => match rng.gen_range(0..3) {
            0 => number(rng, false),
            1 => pick(rng, &["true", "false"]).to_owned(),
            _ => pick(rng, &["red", "blue", "on_hold", "x-1"]).to_owned(),
        },
    }
}

/// Whitespace that the grammar treats as a separator.
fn gap<R: Rng>(rng: &mut R) -> &'static str {
    [" ", "  ", "\t", " \n  ", " # note\n "].choose(rng).unwrap()
}

/// A random, valid scenario source. Declarations come in shuffled order with
/// varied layout, so serializing it exercises the canonical ordering.
pub fn random_document<R: Rng>(rng: &mut R, index: usize) -> String {
    let agents: Vec<String> = (0..rng.gen_range(1..4)).map(|i| format!("a{i}")).collect();
    let worlds: Vec<String> = (0..rng.gen_range(1..4)).map(|i| format!("W_{i}")).collect();
    let keys = ["pleasure", "pain", "alive", "health", "mood"];
    let horizon = rng.gen_range(1..8u64);
    let mut blocks: Vec<String> = Vec::new();

    for a in &agents {
        blocks.push(format!("agent{}{a}", gap(rng)));
    }
    for w in &worlds {
        let mut body = String::new();
        let mut used = std::collections::BTreeSet::new();
        for _ in 0..rng.gen_range(0..12) {
            let subject = agents.choose(rng).unwrap().clone();
            let key = pick(rng, &keys);
            let t = rng.gen_range(0..=horizon);
            if !used.insert((subject.clone(), key, t)) {
                continue;
            }
            let v = value(rng, key);
            write!(body, "\n  assert {subject}.{key}@{t}{}={}{v}", gap(rng), gap(rng)).unwrap();
        }
        blocks.push(format!("world {w} {{{body}\n}}"));
    }
    for _ in 0..rng.gen_range(0..3) {
        let a = agents.choose(rng).unwrap();
        let key = pick(rng, &keys);
        let time = if rng.gen_bool(0.5) { "any".to_owned() } else { rng.gen_range(0..=horizon).to_string() };
        let mode = pick(rng, &["", " mode concurrent", " mode achievement"]);
        let w = number(rng, true).replace('-', "");
        let w = if w.trim_start_matches(['0', '.']).is_empty() { "1".to_owned() } else { w };
        blocks.push(format!("desire {a} wants {a}.{key}@{time} = {} weight {w}{mode}", value(rng, key)));
    }
    for key in ["health", "mood"] {
        if rng.gen_bool(0.5) {
            blocks.push(format!("objective {key} >= {} weight {}", number(rng, false), rng.gen_range(1..5)));
        }
    }
    let mut bound: Vec<(String, String, u64, u64)> = Vec::new();
    for g in 0..rng.gen_range(0..3) {
        let mut body = format!(
            "group g{g} {{\n  function f{g} provenance {}",
            pick(rng, &["designed", "evolved"])
        );
        for a in &agents {
            if rng.gen_bool(0.6) {
                let from = rng.gen_range(0..=horizon);
                let to = rng.gen_range(from..=horizon);
                let role = pick(rng, &["member", "chair"]);
                let optional = if rng.gen_bool(0.9) { " optional" } else { "" };
                write!(body, "\n  member {a} role {role} from {from} to {to}{optional}").unwrap();
                bound.push((format!("g{g}"), format!("{a} role {role}"), from, to));
            }
        }
        body.push_str("\n}");
        blocks.push(body);
    }
    for (i, (g, agent_role, from, to)) in bound.iter().enumerate() {
        if rng.gen_bool(0.5) {
            continue;
        }
        let attempted = rng.gen_bool(0.7);
        let degree = if attempted { pick(rng, &["0", "0.25", "0.5", "1", "0.10"]) } else { "0" };
        let mut ws = String::new();
        for w in &worlds {
            if rng.gen_bool(0.3) {
                write!(ws, " world {w}").unwrap();
            }
        }
        blocks.push(format!(
            "activity act{i} {{ agent {agent_role} group {g} time {} {} degree {degree}{ws} }}",
            rng.gen_range(*from..=*to),
            if attempted { "attempted" } else { "unattempted" }
        ));
    }
    blocks.push(format!("config actual_world = {}", worlds.choose(rng).unwrap()));
    if rng.gen_bool(0.5) {
        blocks.push(format!("config lambda = {}", number(rng, true)));
    }
    blocks.shuffle(rng);
    format!("# generated {index}\nscenario doc{index}\n{}\n", blocks.join("\n"))
}

/// Compares `actual` with `tests/golden/<name>`. Run with `UPDATE_GOLDEN=1`
/// to rewrite the file instead.
pub fn check_golden(name: &str, actual: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("{}: {e}; run with UPDATE_GOLDEN=1 to create it", path.display()));
    assert_eq!(actual, expected, "output differs from {}", path.display());
}
