//! Textual formats for knowledge bases and utility boxes.
//!
//! Knowledge-base files are sequences of `;`-terminated statements:
//!
//! ```text
//! role hasPrice : concrete(EUR);
//! role equipped : abstract closed;
//! concept Tablet EQUIV Device AND EXISTS hasPrice GT 200 EUR;
//! axiom Convertible SUBSUMED-BY UpperclassTablet;
//! assert tab_3 : Convertible @ 0.8;
//! assert (tab_1, equipment_1) : equipped;
//! assert (tab_1, 999 EUR) : hasPrice;
//! ```
//!
//! Utility boxes are a single block: `ubox expert1 { InexpensiveTablet = 50; }`.

use std::fmt;

mod lexer;
mod parser;
mod serialize;

pub use parser::{parse_concept, parse_kb, parse_kb_with_diagnostics, parse_ubox};
pub use serialize::serialize_kb;

/// Position in the input: 1-based line and column (in characters), plus the
/// length of the offending text.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl Span {
    pub fn new(line: usize, column: usize, length: usize) -> Self {
        Span {
            line,
            column,
            length,
        }
    }

    /// True if the span starts inside `text` (or at its very end) and does not
    /// run past the end of its line.
    pub fn lies_within(&self, text: &str) -> bool {
        let lines: Vec<&str> = text.split('\n').collect();
        let Some(line) = lines.get(self.line.wrapping_sub(1)) else {
            return self.line == 1 && text.is_empty();
        };
        let width = line.trim_end_matches('\r').chars().count();
        self.column >= 1 && self.column + self.length <= width + 1 + usize::from(self.length == 0)
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DiagnosticKind {
    Lexical,
    Syntax,
    DegreeRange,
    UndeclaredRole,
    DuplicateRole,
    RoleKind,
    UnitMismatch,
    DuplicateConcreteFact,
    DuplicateAttribute,
    NegativeWeight,
    Redeclaration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub kind: DiagnosticKind,
    pub message: String,
    pub span: Span,
}

impl Diagnostic {
    pub(crate) fn error(kind: DiagnosticKind, message: impl Into<String>, span: Span) -> Self {
        Diagnostic {
            severity: Severity::Error,
            kind,
            message: message.into(),
            span,
        }
    }

    pub(crate) fn warning(kind: DiagnosticKind, message: impl Into<String>, span: Span) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            kind,
            message: message.into(),
            span,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}: {sev}: {}", self.span, self.message)
    }
}
