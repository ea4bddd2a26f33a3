//! Cross-reference, numbering and bibliography engine for a plain-TeX
//! document dialect.
//!
//! The crate is split along the lines of the macro package it models:
//!
//! - [`numbering`]: the counter state machine for sections, appendices,
//!   theorem-like statements, equations and list items.
//! - [`auxfiles`]: bit-exact encoders and decoders for the `.toc`, `.lab`
//!   and `.inx` side files, plus the math-protection transform.
//! - [`bib`]: the reference database, the plain and structured formatters
//!   and citation resolution.
//! - [`parse`]: the tokenizer and event parser for the document dialect.
//! - [`build`]: the multi-pass build driver used by the `texaux` binary.

pub mod auxfiles;
pub mod bib;
pub mod build;
pub mod parse;

pub mod numbering;

use std::fmt;

/// A 1-based line/column location in a source file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    pub line: u32,
    pub column: u32,
}

impl Position {
    pub const fn new(line: u32, column: u32) -> Self {
        Position { line, column }
    }

    pub const fn start() -> Self {
        Position { line: 1, column: 1 }
    }
}

impl Default for Position {
    fn default() -> Self {
        Position::start()
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

pub use auxfiles::{AuxLine, AuxStream, LabContents, LabLine, ProtectedString, TocEntry};
pub use bib::{Citation, Pages, RefDatabase, RefKind, RefRecord, StyledText};
pub use build::{build, BuildConfig, BuildError, BuildOutcome, BuildReport, RefsMode};

pub use numbering::{CounterState, MarkRecord, Numberer, StructLabel};
pub use parse::{parse_document, tokenize, DocEvent, EventKind, Token};
