//! MiniLang frontend: parsing, 1-CFA call graph, and the system dependence
//! graph.
//!
//! MiniLang is a small Java-shaped language: classes and interfaces with
//! single inheritance, fields, static and instance methods, constructors,
//! typed locals, `new`, calls, field reads and writes, `if`/`while`/`try`
//! and `return`. Nested expressions are flattened so that every
//! instantiation, call and field access becomes its own [`Statement`].

mod ast;
mod callgraph;
mod lexer;
mod lower;
mod parser;
mod reaching;
mod sdg;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use callgraph::{build_call_graph, CallEdge, CallGraph1Cfa, Context, ContextId};
pub use ir::*;
pub use reaching::{reaching_definitions, ReachingDefs};
pub use sdg::{build_sdg, Dependence, EntryTrace, NodeId, Sdg, SdgEdge, SdgNode};

mod ir;

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    Syntax,
    DuplicateDeclaration,
    UnresolvedType,
    InheritanceCycle,
    NoEntrypoint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub line: u32,
    pub col: u32,
    pub message: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub expected: Vec<String>,
}

impl Diagnostic {
    pub fn new(kind: DiagnosticKind, line: u32, col: u32, message: impl Into<String>) -> Self {
        Diagnostic { kind, line, col, message: message.into(), expected: Vec::new() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

/// Parses one MiniLang unit. Hard errors (syntax, duplicates, unresolved
/// types, inheritance cycles) fail the parse; a unit without an entrypoint
/// parses and carries a `NoEntrypoint` diagnostic.
pub fn parse(source: &str, unit_name: &str) -> Result<ProgramIR, Error> {
    let tokens = lexer::tokenize(source).map_err(|d| Error::Parse(vec![d]))?;
    let unit = parser::Parser::new(tokens).unit().map_err(|d| Error::Parse(vec![d]))?;
    lower::lower(&unit, unit_name).map_err(Error::Parse)
}

/// Parses several framework source files as one program, so classes of the
/// same package see each other.
pub fn parse_many(sources: &[(String, String)], unit_name: &str) -> Result<ProgramIR, Error> {
    let mut merged = ast::Unit { package: None, imports: Vec::new(), types: Vec::new() };
    let mut package: Option<String> = None;
    for (name, src) in sources {
        let tokens = lexer::tokenize(src).map_err(|d| Error::Parse(vec![located(d, name)]))?;
        let unit = parser::Parser::new(tokens)
            .unit()
            .map_err(|d| Error::Parse(vec![located(d, name)]))?;
        match (&package, &unit.package) {
            (Some(p), Some(q)) if p != q => {
                return Err(Error::Parse(vec![Diagnostic::new(
                    DiagnosticKind::Syntax,
                    0,
                    0,
                    format!("{name}: package `{q}` differs from `{p}`"),
                )]))
            }
            (None, Some(q)) => package = Some(q.clone()),
            _ => {}
        }
        merged.imports.extend(unit.imports);
        merged.types.extend(unit.types);
    }
    merged.package = package;
    lower::lower(&merged, unit_name).map_err(Error::Parse)
}

fn located(mut d: Diagnostic, file: &str) -> Diagnostic {
    d.message = format!("{file}: {}", d.message);
    d
}
