//! The `.scn` scenario language.
//!
//! ```text
//! scenario    = "scenario" IDENT { block } ;
//! block       = world | agentD | desireD | objD | groupD | activityD | configD ;
//! world       = "world" IDENT "{" { assertS } "}" ;
//! assertS     = "assert" IDENT "." IDENT "@" INT "=" value ;
//! agentD      = "agent" IDENT ;
//! desireD     = "desire" IDENT "wants" IDENT "." IDENT "@" (INT | "any")
//!               "=" value "weight" NUMBER [ "mode" ("concurrent"|"achievement") ] ;
//! objD        = "objective" IDENT ">=" NUMBER "weight" NUMBER ;
//! groupD      = "group" IDENT "{" "function" IDENT "provenance" IDENT
//!               { memberD } "}" ;
//! memberD     = "member" IDENT "role" IDENT "from" INT "to" INT [ "optional" ] ;
//! activityD   = "activity" IDENT "{" "agent" IDENT "role" IDENT "group" IDENT
//!               "time" INT ("attempted"|"unattempted") "degree" NUMBER
//!               { "world" IDENT } "}" ;
//! configD     = "config" IDENT "=" value ;
//! value       = NUMBER | IDENT | "true" | "false" ;
//! ```
//!
//! `#` starts a comment that runs to the end of the line. An activity without
//! `world` clauses takes place in every world.

mod lexer;
mod parser;
mod serialize;
mod validate;

use std::fmt;

use serde::Serialize;

pub use parser::{parse, parse_bytes};
pub use serialize::serialize;
pub use validate::validate_scenario;

/// 1-based line and column. `0:0` marks a declaration built in code.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SourcePos {
    pub line: u32,
    pub column: u32,
}

impl SourcePos {
    pub fn new(line: u32, column: u32) -> Self {
        SourcePos { line, column }
    }
}

impl fmt::Display for SourcePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParseDiagnostic {
    pub severity: Severity,
    pub line: u32,
    pub column: u32,
    pub code: String,
    pub message: String,
}

impl ParseDiagnostic {
    pub fn error(pos: SourcePos, code: &str, message: impl Into<String>) -> Self {
        Self::new(Severity::Error, pos, code, message)
    }

    pub fn warning(pos: SourcePos, code: &str, message: impl Into<String>) -> Self {
        Self::new(Severity::Warning, pos, code, message)
    }

    fn new(severity: Severity, pos: SourcePos, code: &str, message: impl Into<String>) -> Self {
        ParseDiagnostic {
            severity,
            line: pos.line,
            column: pos.column,
            code: code.to_owned(),
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {}[{}]: {}",
            self.line, self.column, self.severity, self.code, self.message
        )
    }
}
