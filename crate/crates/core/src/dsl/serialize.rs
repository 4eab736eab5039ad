use std::fmt::Write;

use crate::scenario::Scenario;

/// Canonical text of `doc`.
///
/// Declarations come out grouped by kind (agents, worlds, desires, list
/// items, groups, activities, config) and sorted within each kind; a world's
/// assertions are sorted by subject, key and tick. Desire modes are always
/// spelled out. Two documents that are equal serialize to the same bytes.
pub fn serialize(doc: &Scenario) -> String {
    let doc = doc.canonical();
    let mut out = String::new();
    // Writing to a String cannot fail.
    let _ = write_doc(&mut out, &doc);
    out
}

fn write_doc(out: &mut String, doc: &Scenario) -> std::fmt::Result {
    writeln!(out, "scenario {}", doc.name)?;
    if !doc.agents.is_empty() {
        writeln!(out)?;
        for a in &doc.agents {
            writeln!(out, "agent {}", a.id)?;
        }
    }
    for w in &doc.worlds {
        writeln!(out)?;
        writeln!(out, "world {} {{", w.id)?;
        for a in w.assertions() {
            writeln!(out, "  assert {}.{}@{} = {}", a.subject, a.key, a.time, a.value)?;
        }
        writeln!(out, "}}")?;
    }
    if !doc.desires.is_empty() {
        writeln!(out)?;
        for d in &doc.desires {
            let t = &d.target;
            writeln!(
                out,
                "desire {} wants {}.{}@{} = {} weight {} mode {}",
                d.agent, t.subject, t.key, t.time, t.value, d.weight, d.mode
            )?;
        }
    }
    if !doc.objective_items.is_empty() {
        writeln!(out)?;
        for o in &doc.objective_items {
            writeln!(out, "objective {} >= {} weight {}", o.key, o.threshold, o.weight)?;
        }
    }
    for g in &doc.groups {
        writeln!(out)?;
        writeln!(out, "group {} {{", g.id)?;
        writeln!(out, "  function {} provenance {}", g.function.id, g.function.provenance)?;
        for b in &g.bindings {
            write!(out, "  member {} role {} from {} to {}", b.agent, b.role, b.span.start(), b.span.end())?;
            if b.optional_context {
                write!(out, " optional")?;
            }
            writeln!(out)?;
        }
        writeln!(out, "}}")?;
    }
    for a in &doc.activities {
        writeln!(out)?;
        writeln!(out, "activity {} {{", a.id)?;
        writeln!(out, "  agent {} role {} group {}", a.agent, a.role, a.group)?;
        let attempted = if a.attempted { "attempted" } else { "unattempted" };
        write!(out, "  time {} {attempted} degree {}", a.time, a.realization_degree)?;
        for w in &a.worlds {
            write!(out, " world {w}")?;
        }
        writeln!(out)?;
        writeln!(out, "}}")?;
    }
    if !doc.config.is_empty() {
        writeln!(out)?;
        for c in &doc.config {
            writeln!(out, "config {} = {}", c.key, c.value)?;
        }
    }
    Ok(())
}
