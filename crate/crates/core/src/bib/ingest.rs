//! Reading `.ref` files.
//!
//! ```text
//! \ref
//! \key{K84} \mark{Knu}
//! \author{D. Knuth}
//! \title{The \TeX book}
//! \publ{Addison-Wesley} \year{1984}
//!
//! \ref
//! ...
//! ```
//!
//! An entry opens with `\ref` and runs to the next blank line (or the next
//! `\ref`). Fields are `\name{value}` with balanced braces; values may span
//! lines but not blank lines. `%` starts a comment. `\beginrefs` and
//! `\endrefs` lines are accepted and ignored.

use super::cite::KeyMap;
use super::pages::Pages;
use super::{BibError, Field, RefRecord};
use crate::Position;

/// The ingested reference file: the key map (pass one) and the records in
/// file order (pass two).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RefDatabase {
    pub keys: KeyMap,
    pub records: Vec<RefRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PagesForm {
    Range,
    Amount,
}

#[derive(Debug)]
struct RawField {
    field: Field,
    value: String,
    pos: Position,
    pages_form: PagesForm,
}

#[derive(Debug)]
struct RawEntry {
    pos: Position,
    fields: Vec<RawField>,
}

impl RawEntry {
    fn get(&self, field: Field) -> Option<&RawField> {
        self.fields.iter().find(|f| f.field == field)
    }

    fn value(&self, field: Field) -> Option<String> {
        self.get(field).map(|f| f.value.clone())
    }
}

fn field_by_name(name: &str) -> Option<(Field, PagesForm)> {
    let field = match name {
        "key" => Field::Key,
        "mark" => Field::Mark,
        "ident" => Field::Ident,
        "author" => Field::Author,
        "title" => Field::Title,
        "journal" => Field::Journal,
        "inbook" => Field::Inbook,
        "publ" => Field::Publ,
        "report" => Field::Report,
        "series" => Field::Series,
        "ed" => Field::Ed,
        "vol" => Field::Vol,
        "idno" => Field::Idno,
        "year" => Field::Year,
        "ISBN" | "isbn" => Field::Isbn,
        "endnote" | "note" => Field::Endnote,
        "pages" => Field::Pages,
        "amount" => return Some((Field::Pages, PagesForm::Amount)),
        _ => return None,
    };
    Some((field, PagesForm::Range))
}

struct OpenField {
    field: Field,
    form: PagesForm,
    pos: Position,
    value: String,
    depth: usize,
}

struct Scanner {
    entries: Vec<RawEntry>,
    current: Option<RawEntry>,
    open: Option<OpenField>,
}

fn malformed(message: impl Into<String>, pos: Position) -> BibError {
    BibError::MalformedEntry {
        message: message.into(),
        pos,
    }
}

fn strip_comment(line: &str) -> &str {
    let bytes = line.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => i += 2,
            b'%' => return &line[..i],
            _ => i += 1,
        }
    }
    line
}

impl Scanner {
    fn close_entry(&mut self) {
        if let Some(entry) = self.current.take() {
            self.entries.push(entry);
        }
    }

    fn finish_field(&mut self) -> Result<(), BibError> {
        let open = self.open.take().expect("open field");
        let value = open.value.split_whitespace().collect::<Vec<_>>().join(" ");
        if value.is_empty() {
            return Err(malformed(format!("empty \\{} field", open.field), open.pos));
        }
        let entry = self.current.as_mut().expect("field inside entry");
        if entry.get(open.field).is_some() {
            return Err(BibError::DuplicateField {
                field: open.field,
                pos: open.pos,
            });
        }
        entry.fields.push(RawField {
            field: open.field,
            value,
            pos: open.pos,
            pages_form: open.form,
        });
        Ok(())
    }

    fn scan_line(&mut self, line_no: u32, line: &str) -> Result<(), BibError> {
        let chars: Vec<char> = line.chars().collect();
        let pos_at = |i: usize| Position::new(line_no, i as u32 + 1);
        let mut i = 0;
        while i < chars.len() {
            if let Some(open) = self.open.as_mut() {
                let c = chars[i];
                match c {
                    '\\' => {
                        open.value.push(c);
                        if let Some(&next) = chars.get(i + 1) {
                            open.value.push(next);
                            i += 1;
                        }
                    }
                    '{' => {
                        open.depth += 1;
                        open.value.push(c);
                    }
                    '}' if open.depth == 0 => {
                        self.finish_field()?;
                    }
                    '}' => {
                        open.depth -= 1;
                        open.value.push(c);
                    }
                    _ => open.value.push(c),
                }
                i += 1;
                continue;
            }
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c != '\\' {
                return Err(malformed(format!("unexpected text {c:?}"), pos_at(i)));
            }
            let start = i;
            i += 1;
            while i < chars.len() && chars[i].is_ascii_alphabetic() {
                i += 1;
            }
            let name: String = chars[start + 1..i].iter().collect();
            match name.as_str() {
                "ref" => {
                    self.close_entry();
                    self.current = Some(RawEntry {
                        pos: pos_at(start),
                        fields: Vec::new(),
                    });
                }
                "beginrefs" | "endrefs" => self.close_entry(),
                _ => {
                    let (field, form) = field_by_name(&name).ok_or_else(|| {
                        malformed(format!("unknown field \\{name}"), pos_at(start))
                    })?;
                    if self.current.is_none() {
                        return Err(malformed(
                            format!("\\{name} outside a \\ref entry"),
                            pos_at(start),
                        ));
                    }
                    while i < chars.len() && chars[i].is_whitespace() {
                        i += 1;
                    }
                    if chars.get(i) != Some(&'{') {
                        return Err(malformed(
                            format!("expected {{ after \\{name}"),
                            pos_at(start),
                        ));
                    }
                    i += 1;
                    self.open = Some(OpenField {
                        field,
                        form,
                        pos: pos_at(start),
                        value: String::new(),
                        depth: 0,
                    });
                }
            }
        }
        if let Some(open) = self.open.as_mut() {
            open.value.push(' ');
        }
        Ok(())
    }
}

fn scan_entries(source: &str) -> Result<Vec<RawEntry>, BibError> {
    let mut scanner = Scanner {
        entries: Vec::new(),
        current: None,
        open: None,
    };
    for (idx, line) in source.lines().enumerate() {
        let line_no = idx as u32 + 1;
        if let Some(col) = line.find(|c: char| !c.is_ascii()) {
            let column = line[..col].chars().count() as u32 + 1;
            return Err(malformed(
                "non-ASCII character",
                Position::new(line_no, column),
            ));
        }
        if line.trim().is_empty() {
            if let Some(open) = &scanner.open {
                return Err(malformed(
                    format!("blank line inside \\{} value", open.field),
                    open.pos,
                ));
            }
            scanner.close_entry();
            continue;
        }
        scanner.scan_line(line_no, strip_comment(line))?;
    }
    if let Some(open) = &scanner.open {
        return Err(malformed(
            format!("unterminated \\{} value", open.field),
            open.pos,
        ));
    }
    scanner.close_entry();
    Ok(scanner.entries)
}

fn key_pass(entries: &[RawEntry]) -> Result<KeyMap, BibError> {
    let mut keys = KeyMap::new();
    for entry in entries {
        let key = entry
            .get(Field::Key)
            .ok_or_else(|| BibError::MissingField {
                key: String::new(),
                field: Field::Key,
                pos: entry.pos,
            })?;
        let mark = entry
            .value(Field::Mark)
            .unwrap_or_else(|| key.value.clone());
        let mut names = vec![(key.value.clone(), key.pos)];
        if let Some(ident) = entry.get(Field::Ident) {
            if ident.value != key.value {
                names.push((ident.value.clone(), ident.pos));
            }
        }
        for (name, pos) in names {
            if keys.contains_key(&name) {
                return Err(BibError::DuplicateKey { key: name, pos });
            }
            keys.insert(name, mark.clone());
        }
    }
    Ok(keys)
}

fn record_pass(entries: &[RawEntry]) -> Result<Vec<RefRecord>, BibError> {
    entries
        .iter()
        .map(|entry| {
            let key = entry.value(Field::Key).unwrap_or_default();
            let required = |field: Field| {
                entry.value(field).ok_or_else(|| BibError::MissingField {
                    key: key.clone(),
                    field,
                    pos: entry.pos,
                })
            };
            let pages = match entry.get(Field::Pages) {
                None => None,
                Some(raw) if raw.pages_form == PagesForm::Amount => {
                    Some(Pages::Amount(raw.value.clone()))
                }
                Some(raw) => {
                    Some(Pages::range(&raw.value).map_err(|e| malformed(e.to_string(), raw.pos))?)
                }
            };
            Ok(RefRecord {
                mark: entry.value(Field::Mark).unwrap_or_else(|| key.clone()),
                ident: entry.value(Field::Ident),
                author: required(Field::Author)?,
                title: required(Field::Title)?,
                journal: entry.value(Field::Journal),
                inbook: entry.value(Field::Inbook),
                publ: entry.value(Field::Publ),
                report: entry.value(Field::Report),
                series: entry.value(Field::Series),
                ed: entry.value(Field::Ed),
                vol: entry.value(Field::Vol),
                idno: entry.value(Field::Idno),
                year: entry.value(Field::Year),
                isbn: entry.value(Field::Isbn),
                endnote: entry.value(Field::Endnote),
                pages,
                pos: entry.pos,
                key,
            })
        })
        .collect()
}

/// Reads a reference file in two passes: the first builds the key map, the
/// second yields the records in file order.
pub fn ingest_refs(source: &str) -> Result<RefDatabase, BibError> {
    let entries = scan_entries(source)?;
    let keys = key_pass(&entries)?;
    let records = record_pass(&entries)?;
    Ok(RefDatabase { keys, records })
}

impl RefDatabase {
    pub fn get(&self, key: &str) -> Option<&RefRecord> {
        self.records.iter().find(|r| r.key == key)
    }
}
