//! Encoders and decoders for the auxiliary streams.
//!
//! Every stream is line oriented: one record per line, no trailing
//! whitespace, and a final newline after the last record.
//!
//! ```text
//! .toc   \NotocSection Table of contents. \noindent\medskip
//!        \tocitem 2=Main results \onpage 17.
//!        \Appendices
//! .lab   \def\ThmA{2.3.1}
//!        \secno=5
//!        \advancepageno
//! .inx   $K$-theory @3.
//! ```

use std::collections::BTreeMap;
use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

use crate::numbering::CounterState;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AuxError {
    #[error("unbalanced math delimiters in {text:?}")]
    UnbalancedMath { text: String },
    #[error("malformed .lab line {line}: {text:?}")]
    MalformedLabLine { line: usize, text: String },
    #[error("malformed index line {line}: {text:?}")]
    MalformedIndexLine { line: usize, text: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AuxStream {
    Toc,
    Lab,
    Index,
    RefKeymap,
}

/// One serialized line of an auxiliary stream, without its newline.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AuxLine {
    pub stream: AuxStream,
    pub text: String,
}

impl AuxLine {
    pub fn new(stream: AuxStream, text: impl Into<String>) -> Self {
        AuxLine {
            stream,
            text: text.into(),
        }
    }
}

impl fmt::Display for AuxLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Joins lines into file contents. An empty stream is an empty file.
pub fn write_stream<'a, I, T>(lines: I) -> String
where
    I: IntoIterator<Item = &'a T>,
    T: fmt::Display + 'a,
{
    let mut out = String::new();
    for line in lines {
        out.push_str(line.to_string().trim_end());
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Segment {
    Text(String),
    Math(String),
}

/// Text with its `$...$` math spans split out so they can be written
/// verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ProtectedString {
    pub segments: Vec<Segment>,
}

impl ProtectedString {
    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }
}

impl fmt::Display for ProtectedString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for seg in &self.segments {
            match seg {
                Segment::Text(t) => f.write_str(t)?,
                Segment::Math(m) => write!(f, "${m}$")?,
            }
        }
        Ok(())
    }
}

/// Splits `raw` at its `$` delimiters. Math content is carried verbatim.
pub fn protect_math(raw: &str) -> Result<ProtectedString, AuxError> {
    let mut segments = Vec::new();
    let mut in_math = false;
    let mut current = String::new();
    let mut chars = raw.chars();
    while let Some(c) = chars.next() {
        match c {
            // `\$` is a literal dollar, not a delimiter
            '\\' => {
                current.push(c);
                if let Some(next) = chars.next() {
                    current.push(next);
                }
            }
            '$' => {
                let piece = std::mem::take(&mut current);
                if in_math {
                    segments.push(Segment::Math(piece));
                } else if !piece.is_empty() {
                    segments.push(Segment::Text(piece));
                }
                in_math = !in_math;
            }
            _ => current.push(c),
        }
    }
    if !in_math && !current.is_empty() {
        segments.push(Segment::Text(current));
    }
    if in_math {
        return Err(AuxError::UnbalancedMath {
            text: raw.to_string(),
        });
    }
    Ok(ProtectedString { segments })
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TocEntry {
    pub label: String,
    pub title: ProtectedString,
    pub page: String,
}

pub fn toc_header() -> AuxLine {
    AuxLine::new(
        AuxStream::Toc,
        "\\NotocSection Table of contents. \\noindent\\medskip",
    )
}

pub fn appendices_divider() -> AuxLine {
    AuxLine::new(AuxStream::Toc, "\\Appendices")
}

pub fn toc_line(entry: &TocEntry) -> AuxLine {
    AuxLine::new(
        AuxStream::Toc,
        format!(
            "\\tocitem {}={} \\onpage {}.",
            entry.label, entry.title, entry.page
        ),
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexEntry {
    pub term: ProtectedString,
    pub page: String,
}

pub fn index_line(entry: &IndexEntry) -> AuxLine {
    AuxLine::new(AuxStream::Index, format!("{} @{}.", entry.term, entry.page))
}

/// Inverse of [`index_line`]. The page is whatever follows the last ` @`.
pub fn parse_index_line(line_no: usize, line: &str) -> Result<IndexEntry, AuxError> {
    let bad = || AuxError::MalformedIndexLine {
        line: line_no,
        text: line.to_string(),
    };
    let body = line.strip_suffix('.').ok_or_else(bad)?;
    let at = body.rfind(" @").ok_or_else(bad)?;
    let page = &body[at + 2..];
    if page.is_empty() {
        return Err(bad());
    }
    let term = protect_math(&body[..at]).map_err(|_| bad())?;
    Ok(IndexEntry {
        term,
        page: page.to_string(),
    })
}

/// An index term with its merged page list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexGroup {
    pub term: String,
    pub pages: Vec<String>,
}

impl fmt::Display for IndexGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.term)?;
        for page in &self.pages {
            write!(f, ", {page}")?;
        }
        Ok(())
    }
}

/// Merges index entries by term. Terms are ordered case-insensitively (ties
/// broken bytewise); pages are deduplicated and ordered numerically where
/// they are numbers, with non-numeric folios after them.
pub fn sort_index(entries: &[IndexEntry]) -> Vec<IndexGroup> {
    let mut groups: BTreeMap<(String, String), Vec<String>> = BTreeMap::new();
    for entry in entries {
        let term = entry.term.to_string();
        let pages = groups.entry((term.to_ascii_lowercase(), term)).or_default();
        if !pages.contains(&entry.page) {
            pages.push(entry.page.clone());
        }
    }
    groups
        .into_iter()
        .map(|((_, term), mut pages)| {
            pages.sort_by(|a, b| match (a.parse::<i64>(), b.parse::<i64>()) {
                (Ok(x), Ok(y)) => x.cmp(&y),
                (Ok(_), Err(_)) => std::cmp::Ordering::Less,
                (Err(_), Ok(_)) => std::cmp::Ordering::Greater,
                (Err(_), Err(_)) => a.cmp(b),
            });
            IndexGroup { term, pages }
        })
        .collect()
}

/// A line of the label/checkpoint file.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LabLine {
    Define { name: String, value: String },
    CounterSave { register: String, value: i64 },
    AdvancePage,
}

impl LabLine {
    fn save(register: &str, value: i64) -> Self {
        LabLine::CounterSave {
            register: register.to_string(),
            value,
        }
    }
}

impl fmt::Display for LabLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabLine::Define { name, value } => write!(f, "\\def\\{name}{{{value}}}"),
            LabLine::CounterSave { register, value } => write!(f, "\\{register}={value}"),
            LabLine::AdvancePage => f.write_str("\\advancepageno"),
        }
    }
}

/// The end-of-document checkpoint block.
pub fn emit_checkpoint(state: &CounterState) -> Vec<LabLine> {
    vec![
        LabLine::save("secno", state.secno),
        LabLine::save("subsecno", state.subsecno),
        LabLine::save("proclno", state.proclno),
        LabLine::save("eqnumber", state.eqnumber),
        LabLine::save("pageno", state.pageno),
        LabLine::AdvancePage,
    ]
}

/// Parsed contents of a `.lab` file.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LabContents {
    /// Every line in file order.
    pub lines: Vec<LabLine>,
    /// Label bindings, later definitions overriding earlier ones.
    pub bindings: IndexMap<String, String>,
    /// Saves of registers other than the five checkpointed ones.
    pub extra_registers: IndexMap<String, i64>,
    pub warnings: Vec<String>,
}

impl LabContents {
    /// Replays the register saves and page advances over `state`.
    pub fn apply_counters(&self, state: &mut CounterState) {
        for line in &self.lines {
            match line {
                LabLine::CounterSave { register, value } => {
                    let slot = match register.as_str() {
                        "secno" => &mut state.secno,
                        "subsecno" => &mut state.subsecno,
                        "proclno" => &mut state.proclno,
                        "eqnumber" => &mut state.eqnumber,
                        "pageno" => &mut state.pageno,
                        _ => continue,
                    };
                    *slot = *value;
                }
                LabLine::AdvancePage => state.pageno += 1,
                LabLine::Define { .. } => {}
            }
        }
    }

    pub fn counters_over(&self, mut base: CounterState) -> CounterState {
        self.apply_counters(&mut base);
        base
    }
}

const SAVED_REGISTERS: [&str; 5] = ["secno", "subsecno", "proclno", "eqnumber", "pageno"];

fn is_control_word(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphabetic())
}

fn parse_lab_line(text: &str) -> Option<LabLine> {
    if text == "\\advancepageno" {
        return Some(LabLine::AdvancePage);
    }
    if let Some(rest) = text.strip_prefix("\\def\\") {
        let open = rest.find('{')?;
        let name = &rest[..open];
        let value = rest[open + 1..].strip_suffix('}')?;
        if !is_control_word(name) || !braces_balanced(value) {
            return None;
        }
        return Some(LabLine::Define {
            name: name.to_string(),
            value: value.to_string(),
        });
    }
    let rest = text.strip_prefix('\\')?;
    let (register, number) = rest.split_once('=')?;
    if !is_control_word(register) {
        return None;
    }
    let digits = number.strip_prefix('-').unwrap_or(number);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some(LabLine::CounterSave {
        register: register.to_string(),
        value: number.parse().ok()?,
    })
}

fn braces_balanced(s: &str) -> bool {
    let mut depth = 0i32;
    for c in s.chars() {
        match c {
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth < 0 {
                    return false;
                }
            }
            _ => {}
        }
    }
    depth == 0
}

/// Reads a `.lab` file. Blank lines are skipped; line numbers are 1-based.
pub fn parse_lab(text: &str) -> Result<LabContents, AuxError> {
    let mut contents = LabContents::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim_end();
        if line.is_empty() {
            continue;
        }
        let parsed = parse_lab_line(line).ok_or_else(|| AuxError::MalformedLabLine {
            line: idx + 1,
            text: raw.to_string(),
        })?;
        match &parsed {
            LabLine::Define { name, value } => {
                contents.bindings.insert(name.clone(), value.clone());
            }
            LabLine::CounterSave { register, value }
                if !SAVED_REGISTERS.contains(&register.as_str()) =>
            {
                contents.warnings.push(format!(
                    "line {}: unexpected register \\{register}",
                    idx + 1
                ));
                contents.extra_registers.insert(register.clone(), *value);
            }
            _ => {}
        }
        contents.lines.push(parsed);
    }
    Ok(contents)
}
