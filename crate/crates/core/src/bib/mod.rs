//! The reference database and its two output styles.

mod cite;
mod format;
mod ingest;
mod pages;
mod structured;
mod styled;

use std::fmt;

use thiserror::Error;

use crate::Position;

pub use cite::{resolve_citation, Citation, KeyMap};
pub use format::{format_reference, render_entry, EntryLayout};
pub use ingest::{ingest_refs, RefDatabase};
pub use pages::{format_pages, normalize_pages, PageMode, Pages};
pub use structured::{emit_structured, write_structured};
pub(crate) use styled::escape_html;
pub use styled::{Span, StyledText};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BibError {
    #[error("{pos}: Unrecognised reference {key:?}: one of \\journal, \\inbook, \\publ or \\report is required")]
    UnrecognisedReference { key: String, pos: Position },
    #[error("{pos}: Multiple definition of \\{field} within reference")]
    DuplicateField { field: Field, pos: Position },
    #[error("{pos}: reference key {key:?} is defined twice")]
    DuplicateKey { key: String, pos: Position },
    #[error("{pos}: reference {key:?} lacks the required \\{field} field")]
    MissingField {
        key: String,
        field: Field,
        pos: Position,
    },
    #[error("{pos}: malformed reference entry: {message}")]
    MalformedEntry { message: String, pos: Position },
    #[error("malformed page range {raw:?}")]
    MalformedRange { raw: String },
    #[error("Reference to undefined label {key:?}")]
    UndefinedReference { key: String },
    #[error("unsupported citation form {raw:?}")]
    InvalidCitation { raw: String },
}

impl BibError {
    pub fn pos(&self) -> Option<Position> {
        match self {
            BibError::UnrecognisedReference { pos, .. }
            | BibError::DuplicateField { pos, .. }
            | BibError::DuplicateKey { pos, .. }
            | BibError::MissingField { pos, .. }
            | BibError::MalformedEntry { pos, .. } => Some(*pos),
            BibError::MalformedRange { .. }
            | BibError::UndefinedReference { .. }
            | BibError::InvalidCitation { .. } => None,
        }
    }
}

/// Fields a reference entry can carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Field {
    Key,
    Mark,
    Ident,
    Author,
    Title,
    Journal,
    Inbook,
    Publ,
    Report,
    Series,
    Ed,
    Vol,
    Idno,
    Year,
    Isbn,
    Endnote,
    Pages,
}

impl Field {
    pub const ALL: [Field; 17] = [
        Field::Key,
        Field::Mark,
        Field::Ident,
        Field::Author,
        Field::Title,
        Field::Journal,
        Field::Inbook,
        Field::Publ,
        Field::Report,
        Field::Series,
        Field::Ed,
        Field::Vol,
        Field::Idno,
        Field::Year,
        Field::Isbn,
        Field::Endnote,
        Field::Pages,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Field::Key => "key",
            Field::Mark => "mark",
            Field::Ident => "ident",
            Field::Author => "author",
            Field::Title => "title",
            Field::Journal => "journal",
            Field::Inbook => "inbook",
            Field::Publ => "publ",
            Field::Report => "report",
            Field::Series => "series",
            Field::Ed => "ed",
            Field::Vol => "vol",
            Field::Idno => "idno",
            Field::Year => "year",
            Field::Isbn => "ISBN",
            Field::Endnote => "endnote",
            Field::Pages => "pages",
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RefKind {
    Proceedings,
    Article,
    Book,
    Report,
}

/// One bibliography entry.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RefRecord {
    pub key: String,
    /// Printed tag; equal to `key` unless given separately.
    pub mark: String,
    /// Document label bound to the mark.
    pub ident: Option<String>,
    pub author: String,
    pub title: String,
    pub journal: Option<String>,
    pub inbook: Option<String>,
    pub publ: Option<String>,
    pub report: Option<String>,
    pub series: Option<String>,
    pub ed: Option<String>,
    pub vol: Option<String>,
    pub idno: Option<String>,
    pub year: Option<String>,
    pub isbn: Option<String>,
    pub endnote: Option<String>,
    pub pages: Option<Pages>,
    /// Where the entry starts in its source file.
    pub pos: Position,
}

impl RefRecord {
    pub fn new(key: &str, author: &str, title: &str) -> Self {
        RefRecord {
            key: key.to_string(),
            mark: key.to_string(),
            author: author.to_string(),
            title: title.to_string(),
            ..RefRecord::default()
        }
    }

    fn missing(&self, field: Field) -> BibError {
        BibError::MissingField {
            key: self.key.clone(),
            field,
            pos: self.pos,
        }
    }

    fn required<'a>(&self, value: &'a Option<String>, field: Field) -> Result<&'a str, BibError> {
        value.as_deref().ok_or_else(|| self.missing(field))
    }
}

/// Kind of a record: `inbook` beats `journal` beats `publ` beats `report`.
pub fn classify(record: &RefRecord) -> Result<RefKind, BibError> {
    if record.inbook.is_some() {
        Ok(RefKind::Proceedings)
    } else if record.journal.is_some() {
        Ok(RefKind::Article)
    } else if record.publ.is_some() {
        Ok(RefKind::Book)
    } else if record.report.is_some() {
        Ok(RefKind::Report)
    } else {
        Err(BibError::UnrecognisedReference {
            key: record.key.clone(),
            pos: record.pos,
        })
    }
}

/// `"eds"` for a comma-separated editor list, `"ed"` otherwise.
pub fn pluralize_ed(field: &str) -> &'static str {
    if field.contains(',') {
        "eds"
    } else {
        "ed"
    }
}
