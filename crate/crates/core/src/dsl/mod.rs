//! Text format (`.csys`) and JSON interchange.

use std::fmt;

/// Byte range plus the 1-based line and column of its start.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

mod json;
mod lexer;
mod parser;
mod printer;

pub use json::{emit_json, parse_json, Model, SCHEMA_VERSION};
pub use parser::{parse_formula, parse_literal, parse_system};
pub use printer::{print_det, print_formula, print_literal, print_maxent};

use crate::system::{DetCausalSystem, MaxEntCausalSystem};

#[derive(Debug, Clone, PartialEq)]
pub enum ParsedSystem {
    Det(DetCausalSystem),
    MaxEnt(MaxEntCausalSystem),
}

/// A parsed `.csys` document.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemFile {
    pub name: String,
    pub system: ParsedSystem,
}

impl SystemFile {
    /// Text that parses back to an equal value.
    pub fn print(&self) -> String {
        match &self.system {
            ParsedSystem::Det(s) => print_det(&self.name, s),
            ParsedSystem::MaxEnt(s) => print_maxent(&self.name, s),
        }
    }
}
