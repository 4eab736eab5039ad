//! Acceptance suite. Each criterion prints one line; the process exits
//! nonzero if any of them fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use flourish::counterfactual::{nearest_worlds, NearestPolicy};
use flourish::dsl::{parse, parse_bytes, serialize, validate_scenario};
use flourish::group::{Activity, Group, Provenance};
use flourish::group_calc::{
    activity_value, diabridge_check, group_wellbeing_at, sync_aggregate, synchronic_series, GroupCalcConfig,
};
use flourish::individual::{aggregate_wellbeing, bridge_check, welfare, Aggregator, WelfareConfig};
use flourish::oracle::full_scan;
use flourish::query::{evaluate, expectations, Outcome, Overrides, Query, Settings, Sign};
use flourish::theory::{wellbeing_desire, Theory};
use flourish::world::derive_events;
use flourish::{Ident, Interval, Scenario, TheoryConfig, TheoryKind, TimePoint, World};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rust_decimal::Decimal;

use common::{cli, fixture, fixture_source, random_document, FIXTURES};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {{
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($msg)+));
        }
    }};
}

fn settings(doc: &Scenario, q: &Query, theory: TheoryKind, posthumous: Option<bool>) -> Settings {
    let o = Overrides { theory: Some(theory), allow_posthumous: posthumous, ..Overrides::default() };
    Settings::resolve(doc, Some(q), &o).unwrap()
}

fn value_under(doc: &Scenario, q: &Query, theory: TheoryKind) -> Result<f64, String> {
    evaluate(doc, q, &settings(doc, q, theory, None)).map(|o| o.value()).map_err(|e| e.to_string())
}

fn queries(doc: &Scenario, kind: &str) -> Vec<Query> {
    expectations(doc).unwrap().into_iter().filter(|e| e.query.kind() == kind).map(|e| e.query).collect()
}

fn only(doc: &Scenario, kind: &str) -> Result<Query, String> {
    let mut qs = queries(doc, kind);
    ensure!(qs.len() == 1, "{}: expected one {kind} query, found {}", doc.name, qs.len());
    Ok(qs.remove(0))
}

/// Values under all three theories, failing unless each has sign `want`.
fn all_theories(doc: &Scenario, q: &Query, want: Sign) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for k in TheoryKind::ALL {
        let v = value_under(doc, q, k)?;
        ensure!(Sign::of(v) == want, "{} under {k}: {v} is not {want}", q.describe(doc));
        out.push(v);
    }
    Ok(out)
}

fn iv(a: u64, b: u64) -> Interval {
    Interval::new(a, b).unwrap()
}

// Independent numeric oracles: raw-moment formulas and counting ranks, none
// of which share code with the library's statistics.

fn oracle_slope(first_tick: u64, ys: &[f64]) -> f64 {
    let n = ys.len() as f64;
    if ys.len() < 2 {
        return 0.0;
    }
    let (mut sx, mut sy, mut sxy, mut sxx) = (0.0, 0.0, 0.0, 0.0);
    for (i, y) in ys.iter().enumerate() {
        let x = (first_tick + i as u64) as f64;
        sx += x;
        sy += y;
        sxy += x * y;
        sxx += x * x;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

fn oracle_ranks(xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .map(|x| {
            let below = xs.iter().filter(|y| *y < x).count() as f64;
            let same = xs.iter().filter(|y| *y == x).count() as f64;
            below + (same + 1.0) / 2.0
        })
        .collect()
}

fn oracle_spearman(xs: &[f64], ys: &[f64]) -> f64 {
    let (a, b) = (oracle_ranks(xs), oracle_ranks(ys));
    let n = a.len() as f64;
    let (mut sa, mut sb, mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(&b) {
        sa += x;
        sb += y;
        sab += x * y;
        saa += x * x;
        sbb += y * y;
    }
    (n * sab - sa * sb) / ((n * saa - sa * sa) * (n * sbb - sb * sb)).sqrt()
}

fn criterion_1() -> Check {
    let doc = fixture("jack_hill");
    let q = only(&doc, "event")?;
    let vs = all_theories(&doc, &q, Sign::Negative)?;
    ensure!(vs[0] == -5.0, "hedonic value {} is not exactly -5", vs[0]);

    let out = cli(&["eval", "event", "@jack_hill", "--world", "W_HIT", "--event", "jack.pain@3=5", "--agent", "jack", "--json"]);
    ensure!(out.code == 0, "cli exit {}: {}", out.code, out.stderr);
    let json: serde_json::Value = serde_json::from_str(&out.stdout).map_err(|e| e.to_string())?;
    ensure!(json["value"] == serde_json::json!(-5.0), "cli value {}", json["value"]);
    Ok(format!("hedonic {}, desire {}, objective {}", vs[0], vs[1], vs[2]))
}

fn criterion_2() -> Check {
    let doc = fixture("jill_exercise");
    let event = all_theories(&doc, &only(&doc, "event")?, Sign::Negative)?;
    let life = only(&doc, "life")?;
    for k in TheoryKind::ALL {
        let lambda = settings(&doc, &life, k, None).welfare.shape_weight;
        ensure!(lambda == 1.0, "life query runs at lambda {lambda}");
    }
    let life = all_theories(&doc, &life, Sign::Positive)?;
    Ok(format!("event {event:?}, life {life:?}"))
}

fn criterion_3() -> Check {
    let doc = fixture("jack_paths");
    let jack = Ident::from("jack");
    let (calm, struggle) = (doc.require_world("W_CALM").unwrap(), doc.require_world("W_STRUGGLE").unwrap());
    let span = iv(0, 3);
    let agg = |w: &World| aggregate_wellbeing(&jack, w, span, &Theory::Hedonic, Aggregator::Sum).unwrap();
    ensure!(agg(struggle) == 0.0 && agg(calm) == 8.0, "aggregates {} and {}", agg(struggle), agg(calm));

    let cfg = WelfareConfig::with_lambda(5.0);
    let wf = |w: &World| welfare(&jack, w, span, &Theory::Hedonic, &cfg).unwrap();
    ensure!(wf(struggle) == 12.0, "welfare(W_STRUGGLE) = {}", wf(struggle));
    ensure!(wf(calm) == 8.0, "welfare(W_CALM) = {}", wf(calm));

    let trace: Vec<f64> = span.ticks().map(|t| flourish::theory::wellbeing_hedonic(&jack, t, struggle)).collect();
    let oracle = oracle_slope(0, &trace);
    let library = flourish::stats::series_slope(0, &trace);
    ensure!((oracle - 2.4).abs() < 1e-9, "oracle slope {oracle}");
    ensure!((library - oracle).abs() < 1e-9, "library slope {library} vs oracle {oracle}");
    Ok(format!("aggregates 0 < 8, welfare 12 > 8, slope {library}"))
}

fn criterion_4() -> Check {
    let doc = fixture("jessica");
    let life = only(&doc, "life")?;
    let mut values = Vec::new();
    for k in TheoryKind::ALL {
        let s = settings(&doc, &life, k, Some(false));
        let v = evaluate(&doc, &life, &s).map_err(|e| e.to_string())?.value();
        ensure!(v < 0.0, "life value under {k} is {v}");
        values.push(v);
    }

    let group = only(&doc, "group")?;
    let Outcome::Group(report) = evaluate(&doc, &group, &Settings::resolve(&doc, Some(&group), &Overrides::default()).unwrap())
        .map_err(|e| e.to_string())?
    else {
        return Err("group query gave a non-group outcome".into());
    };
    ensure!(report.group_life_value > 0.0, "group life value {}", report.group_life_value);

    let g = doc.require_group("equality-league").unwrap();
    let actual = doc.require_world("W_ACTUAL").unwrap();
    let cfg = GroupCalcConfig::default();
    let sync = |a, b| synchronic_series(&doc, g, actual, iv(a, b), &cfg).unwrap();
    let (early, late) = (sync(0, 10), sync(20, 30));
    let early_max = early.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let late_min = late.iter().copied().fold(f64::INFINITY, f64::min);
    ensure!(late_min > early_max, "later era min {late_min} does not exceed Jessica era max {early_max}");
    Ok(format!(
        "life {values:?}, group life value {:.4}, sync {early_max} < {late_min}",
        report.group_life_value
    ))
}

fn criterion_5() -> Check {
    let doc = fixture("jessica");
    let w = doc.require_world("W_ACTUAL").unwrap();
    let jessica = Ident::from("jessica");
    let death = w.series("jessica", "alive").find(|(_, v)| v.as_bool() == Some(false)).map(|(t, _)| t);
    let death = death.ok_or("jessica never dies in W_ACTUAL")?;
    for t in death.tick()..=w.horizon().tick() {
        let v = wellbeing_desire(&jessica, TimePoint(t), w, &doc.desires, false);
        ensure!(v == 0.0, "desire well-being {v} at tick {t}, after death at {death}");
    }
    let flipped = wellbeing_desire(&jessica, TimePoint(30), w, &doc.desires, true);
    ensure!(flipped == 1.0, "with posthumous goods, well-being at 30 is {flipped}");
    let theory = doc.theory(TheoryConfig { kind: TheoryKind::Desire, allow_posthumous: true });
    let via_theory = flourish::WellbeingTheory::wellbeing(&theory, &jessica, TimePoint(30), w);
    ensure!(via_theory == 1.0, "configured theory gives {via_theory}");
    Ok(format!("0 at ticks {death}..={}, 1 at tick 30 with the flag", w.horizon()))
}

fn criterion_6() -> Check {
    let doc = fixture("jill_gift");
    let q = only(&doc, "event")?;
    ensure!(matches!(&q, Query::Event { agent, .. } if agent.as_str() == "jill"), "event is not evaluated for jill");
    let vs = all_theories(&doc, &q, Sign::Negative)?;
    Ok(format!("{vs:?}"))
}

fn criterion_7() -> Check {
    for name in FIXTURES {
        let at = format!("@{name}");
        let out = cli(&["neutrality", &at]);
        ensure!(out.code == 0, "{name}: exit {}\n{}{}", out.code, out.stdout, out.stderr);
    }
    Ok(format!("{} fixtures", FIXTURES.len()))
}

fn criterion_8() -> Check {
    let mut checked = 0;
    for name in FIXTURES {
        let doc = fixture(name);
        for reference in &doc.worlds {
            for event in derive_events(reference) {
                let report = full_scan(&doc.worlds, reference.id.as_str(), &event).map_err(|e| e.to_string())?;
                for policy in [NearestPolicy::UniqueMin, NearestPolicy::AverageOverTies] {
                    let want: Vec<Ident> = match policy {
                        NearestPolicy::UniqueMin => report.maximizers.iter().take(1).cloned().collect(),
                        NearestPolicy::AverageOverTies => report.maximizers.clone(),
                    };
                    match nearest_worlds(&doc.worlds, reference, &event, policy) {
                        Ok(ws) => {
                            let got: Vec<Ident> = ws.iter().map(|w| w.id.clone()).collect();
                            ensure!(got == want, "{name} {} {event} {policy}: {got:?} vs {want:?}", reference.id);
                        }
                        Err(e) => ensure!(
                            want.is_empty() && e.code() == "NoCounterfactualWorld",
                            "{name} {} {event} {policy}: {e}, oracle {want:?}",
                            reference.id
                        ),
                    }
                    checked += 1;
                }
            }
        }
    }
    ensure!(checked > 0, "no events derived from any fixture");
    Ok(format!("{checked} (event, policy) pairs"))
}

fn random_group_doc(rng: &mut ChaCha8Rng, ticks: u64) -> Scenario {
    let members = rng.gen_range(1..5);
    let mut g = Group::new("g", "f", Provenance::Designed);
    for m in 0..members {
        g = g.with_member(&format!("m{m}"), "r", iv(0, ticks - 1));
    }
    let mut activities = Vec::new();
    for t in 0..ticks {
        for m in 0..members {
            if rng.gen_bool(0.2) {
                continue;
            }
            let attempted = rng.gen_bool(0.8);
            let degree = if attempted { Decimal::new(rng.gen_range(0..=100), 2) } else { Decimal::ZERO };
            activities.push(Activity {
                id: format!("a{t}_{m}").into(),
                agent: format!("m{m}").into(),
                role: "r".into(),
                group: "g".into(),
                time: TimePoint(t),
                attempted,
                realization_degree: degree,
                worlds: Vec::new(),
                pos: Default::default(),
            });
        }
    }
    Scenario {
        name: "family".into(),
        worlds: vec![World::new("W").with("x", "k", ticks - 1, 0)],
        groups: vec![g],
        activities,
        ..Scenario::default()
    }
}

fn criterion_9() -> Check {
    // Zero shape weight leaves the aggregate, on every fixture life.
    let flat = WelfareConfig::with_lambda(0.0);
    let mut lives = 0;
    for name in FIXTURES {
        let doc = fixture(name);
        for k in TheoryKind::ALL {
            let theory = doc.theory(TheoryConfig::new(k));
            for w in &doc.worlds {
                for a in &doc.agents {
                    let agg = aggregate_wellbeing(&a.id, w, w.span(), &theory, Aggregator::Sum).unwrap();
                    let wf = welfare(&a.id, w, w.span(), &theory, &flat).unwrap();
                    ensure!(wf.to_bits() == agg.to_bits(), "{name} {} {} {k}: {wf} vs {agg}", w.id, a.id);
                    lives += 1;
                }
            }
        }
    }

    // Group well-being at a tick is the synchronic aggregate, bit for bit.
    let cfg = GroupCalcConfig::default();
    let mut ticks = 0;
    for name in FIXTURES {
        let doc = fixture(name);
        for g in &doc.groups {
            for w in &doc.worlds {
                for t in w.span().ticks() {
                    let a = group_wellbeing_at(&doc, g, t, w, &cfg).unwrap();
                    let b = sync_aggregate(&doc, g, t, w, &cfg).unwrap();
                    ensure!(a.to_bits() == b.to_bits(), "{name} {} {} @{t}: {a} vs {b}", g.id, w.id);
                    ticks += 1;
                }
            }
        }
    }

    // Activity values lie in {0} ∪ [ε, 1].
    let mut rng = ChaCha8Rng::seed_from_u64(0x0ac7_17e5);
    let cases = 2000;
    for i in 0..cases {
        let ticks = rng.gen_range(1..6);
        let doc = random_group_doc(&mut rng, ticks);
        let eps = rng.gen_range(0.0001..0.9);
        let cfg = GroupCalcConfig { attempt_floor: eps, ..GroupCalcConfig::default() };
        let g = &doc.groups[0];
        for a in &doc.activities {
            let v = activity_value(a, g, &cfg).map_err(|e| e.to_string())?;
            let ok = if a.attempted { (eps..=1.0).contains(&v) } else { v == 0.0 };
            ensure!(ok, "case {i}: {} attempted={} degree={} eps={eps} gave {v}", a.id, a.attempted, a.realization_degree);
        }
    }

    // Aggregate and welfare stay rank-correlated at λ = 1.
    let mut rng = ChaCha8Rng::seed_from_u64(0xb41d6e);
    let family: Vec<Vec<f64>> =
        (0..100).map(|_| (0..10).map(|_| rng.gen_range(-10.0..=10.0)).collect()).collect();
    let cfg = WelfareConfig::with_lambda(1.0);
    let report = bridge_check(&family, &cfg).map_err(|e| e.to_string())?;
    let aggregates: Vec<f64> = family.iter().map(|s| s.iter().sum()).collect();
    let welfares: Vec<f64> = family.iter().zip(&aggregates).map(|(s, a)| a + oracle_slope(0, s)).collect();
    let rho = oracle_spearman(&aggregates, &welfares);
    ensure!((report.spearman_rho - rho).abs() < 1e-9, "bridge rho {} vs oracle {rho}", report.spearman_rho);
    ensure!(rho > 0.9, "bridge rho {rho}");

    let gcfg = GroupCalcConfig { shape_weight: 1.0, ..GroupCalcConfig::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(0xd1ab76);
    let docs: Vec<Scenario> = (0..100).map(|_| random_group_doc(&mut rng, 10)).collect();
    let mut series = Vec::new();
    let mut oracle_series = Vec::new();
    for doc in &docs {
        series.push(synchronic_series(doc, &doc.groups[0], &doc.worlds[0], iv(0, 9), &gcfg).unwrap());
        oracle_series.push(
            (0..10)
                .map(|t| {
                    doc.activities
                        .iter()
                        .filter(|a| a.time == TimePoint(t))
                        .map(|a| match a.attempted {
                            false => 0.0,
                            true => a.realization_degree.to_string().parse::<f64>().unwrap().clamp(gcfg.attempt_floor, 1.0),
                        })
                        .sum::<f64>()
                })
                .collect::<Vec<f64>>(),
        );
    }
    for (s, o) in series.iter().zip(&oracle_series) {
        ensure!(s.iter().zip(o).all(|(a, b)| (a - b).abs() < 1e-9), "synchronic {s:?} vs oracle {o:?}");
    }
    let group_report = diabridge_check(&series, &gcfg).map_err(|e| e.to_string())?;
    let g_aggs: Vec<f64> = oracle_series.iter().map(|s| s.iter().sum()).collect();
    let g_welfare: Vec<f64> = oracle_series.iter().zip(&g_aggs).map(|(s, a)| a + oracle_slope(0, s)).collect();
    let g_rho = oracle_spearman(&g_aggs, &g_welfare);
    ensure!(
        (group_report.spearman_rho - g_rho).abs() < 1e-9,
        "diachronic rho {} vs oracle {g_rho}",
        group_report.spearman_rho
    );
    ensure!(g_rho > 0.9, "diachronic rho {g_rho}");

    Ok(format!(
        "{lives} flat lives, {ticks} group ticks, {cases} activity families, rho {rho:.4} / {g_rho:.4}"
    ))
}

fn criterion_10() -> Check {
    let mut sources: Vec<String> = FIXTURES.iter().map(|n| fixture_source(n)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7041_d7e9);
    sources.extend((0..1000).map(|i| random_document(&mut rng, i)));
    for src in &sources {
        let first = parse(src).map_err(|d| format!("{d:?}\n{src}"))?;
        let text = serialize(&first);
        let second = parse(&text).map_err(|d| format!("{d:?}\n{text}"))?;
        ensure!(first == second, "round trip changed the document:\n{src}");
        ensure!(serialize(&second) == text, "serialization is not a fixpoint:\n{text}");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0xf022);
    let cases = 12_000;
    for i in 0..cases {
        let bytes: Vec<u8> = if i % 2 == 0 {
            (0..rng.gen_range(0..300)).map(|_| rng.gen()).collect()
        } else {
            let mut b = fixture_source(FIXTURES[i % FIXTURES.len()]).into_bytes();
            for _ in 0..rng.gen_range(1..8) {
                let at = rng.gen_range(0..=b.len());
                match rng.gen_range(0..3) {
                    0 if at < b.len() => b[at] = rng.gen(),
                    1 => b.insert(at, rng.gen()),
                    _ if at < b.len() => {
                        b.remove(at);
                    }
                    _ => {}
                }
            }
            b
        };
        let lines = bytes.iter().filter(|&&c| c == b'\n').count() as u32 + 1;
        let outcome = catch_unwind(|| match parse_bytes(&bytes) {
            Ok(doc) => {
                validate_scenario(&doc);
                Ok(())
            }
            Err(d) => Err(d),
        });
        match outcome {
            Err(_) => return Err(format!("parser panicked on case {i}: {:?}", String::from_utf8_lossy(&bytes))),
            Ok(Ok(())) => {}
            Ok(Err(d)) => {
                ensure!(d.iter().any(|x| x.is_error()), "case {i}: rejected without an error");
                ensure!(
                    d.iter().all(|x| x.line >= 1 && x.line <= lines && x.column >= 1),
                    "case {i}: diagnostic outside the input: {d:?}"
                );
            }
        }
    }
    Ok(format!("{} documents round-trip, {cases} fuzz inputs", sources.len()))
}

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    payload
        .downcast_ref::<String>()
        .cloned()
        .or_else(|| payload.downcast_ref::<&str>().map(|s| (*s).to_owned()))
        .unwrap_or_else(|| "panic".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("a head injury is bad for Jack", criterion_1),
        ("exercise: a bad event in a good life", criterion_2),
        ("two paths: lower aggregate, higher welfare", criterion_3),
        ("Jessica: a poor life, a valuable contribution", criterion_4),
        ("posthumous gate", criterion_5),
        ("a withheld gift harms Jill", criterion_6),
        ("group results do not depend on the theory", criterion_7),
        ("nearest worlds agree with the full scan", criterion_8),
        ("functional laws", criterion_9),
        ("scenario round trip and fuzzing", criterion_10),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (title, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| Err(panic_message(p)));
        match result {
            Ok(detail) => println!("criterion {}: PASS - {title} ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL - {title}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
