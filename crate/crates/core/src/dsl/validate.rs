use super::{ParseDiagnostic, SourcePos};
use crate::group::{members_at, validate_function, validate_role_binding};
use crate::group_calc::{activity_value, GroupCalcConfig};
use crate::query::{config_bool, expectations, scenario_overrides};
use crate::scenario::Scenario;

/// Everything that stands between a parsed document and evaluation.
///
/// Group function and role binding reports are turned into diagnostics at
/// the declaration they concern. A binding past the horizon is only a
/// warning; everything else is an error. An empty list means every calculus
/// can run on the document.
pub fn validate_scenario(doc: &Scenario) -> Vec<ParseDiagnostic> {
    let mut out = Vec::new();
    for g in &doc.groups {
        for f in validate_function(g).failures {
            out.push(ParseDiagnostic::error(g.pos, f.code, f.message));
        }
        for b in &g.bindings {
            for f in validate_role_binding(b, doc).failures {
                out.push(if f.code == "span-beyond-horizon" {
                    ParseDiagnostic::warning(b.pos, f.code, f.message)
                } else {
                    ParseDiagnostic::error(b.pos, f.code, f.message)
                });
            }
        }
    }

    if let Err(d) = scenario_overrides(doc) {
        out.extend(d);
    }
    let mut ignored = Vec::new();
    if config_bool(doc, "allow_memberless_groups", &mut ignored) == Some(false) {
        let horizon = doc.horizon();
        for g in &doc.groups {
            let empty = (0..=horizon.tick()).map(crate::world::TimePoint).find(|&t| members_at(g, t).is_empty());
            if let Some(t) = empty {
                out.push(ParseDiagnostic::error(
                    g.pos,
                    "memberless-group",
                    format!("group {} has no members at tick {t}", g.id),
                ));
            }
        }
    }

    let horizon = doc.horizon();
    let floor = GroupCalcConfig::default();
    for a in &doc.activities {
        let Some(g) = doc.group(a.group.as_str()) else { continue };
        if let Err(e) = activity_value(a, g, &floor) {
            out.push(ParseDiagnostic::error(
                a.pos,
                "unbound-activity",
                format!("{e}: {} holds no role {} in {} at tick {}", a.agent, a.role, g.id, a.time),
            ));
        }
        if a.time > horizon {
            out.push(ParseDiagnostic::warning(
                a.pos,
                "activity-beyond-horizon",
                format!("activity {} at tick {} lies past scenario horizon {horizon}", a.id, a.time),
            ));
        }
    }

    if let Err(d) = expectations(doc) {
        out.extend(d);
    }
    out.sort_by_key(|d| (SourcePos::new(d.line, d.column), d.severity));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;

    fn codes(src: &str) -> Vec<(String, bool)> {
        validate_scenario(&parse(src).unwrap()).into_iter().map(|d| (d.code.clone(), d.is_error())).collect()
    }

    const HEAD: &str = "scenario s\nagent a\nworld W { assert a.pain@5 = 0 }\n";

    #[test]
    fn clean_document() {
        let src = format!(
            "{HEAD}group g {{ function f provenance designed member a role r from 0 to 5 optional }}\n\
             activity x {{ agent a role r group g time 2 attempted degree 0.5 }}"
        );
        assert!(codes(&src).is_empty());
    }

    #[test]
    fn binding_checks() {
        let src = format!("{HEAD}group g {{ function f provenance designed member a role r from 0 to 9 }}");
        assert_eq!(
            codes(&src),
            [("context-not-optional".to_owned(), true), ("span-beyond-horizon".to_owned(), false)]
        );
        let src = format!("{HEAD}group g {{ function f provenance accidental }}");
        assert_eq!(codes(&src), [("illegal-provenance".to_owned(), true)]);
    }

    #[test]
    fn activity_outside_binding() {
        let src = format!(
            "{HEAD}group g {{ function f provenance designed member a role r from 0 to 1 optional }}\n\
             activity x {{ agent a role r group g time 3 attempted degree 0.5 }}"
        );
        assert_eq!(codes(&src), [("unbound-activity".to_owned(), true)]);
    }

    #[test]
    fn memberless_groups_are_configurable() {
        let g = "group g { function f provenance designed member a role r from 0 to 2 optional }\n";
        assert!(codes(&format!("{HEAD}{g}")).is_empty());
        assert_eq!(
            codes(&format!("{HEAD}{g}config allow_memberless_groups = false")),
            [("memberless-group".to_owned(), true)]
        );
    }

    #[test]
    fn typed_config() {
        assert_eq!(codes(&format!("{HEAD}config epsilon = 2")), [("bad-value".to_owned(), true)]);
        assert_eq!(codes(&format!("{HEAD}config policy = nearest")), [("bad-value".to_owned(), true)]);
        assert!(codes(&format!("{HEAD}config policy = ties\nconfig lambda = 0.5")).is_empty());
    }
}
