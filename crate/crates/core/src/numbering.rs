//! The counter state machine.
//!
//! [`CounterState`] holds the numbering registers and implements the pure
//! counter arithmetic of each structural command. [`Numberer`] wraps it with
//! the label side of things: the current `\lastlabel`, the table of bound
//! label names and the queue of `.lab` lines those bindings produce.

use indexmap::IndexMap;
use thiserror::Error;

use crate::auxfiles::{self, AuxLine, LabLine};

/// Letters available for appendix labels.
const APPENDIX_LETTERS: [char; 10] = ['A', 'B', 'C', 'D', 'E', 'F', 'G', 'H', 'I', 'J'];

/// `secno` value a supplement takes when it follows the appendices.
pub const SUPPLEMENT_SENTINEL: i64 = 1000;

/// Name under which the current structural label is bound.
pub const LAST_LABEL: &str = "lastlabel";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumberingError {
    #[error("structure conflict: {0}")]
    StructureConflict(String),
    #[error("appendix {ordinal} has no letter (the letter table ends at J)")]
    AppendixOverflow { ordinal: i64 },
    #[error("Incorrect label {text}")]
    IncorrectLabel { text: String },
    #[error("equation suffix {suffix:?} must consist of ASCII letters and digits")]
    InvalidSuffix { suffix: String },
    #[error("item number {n} is out of range for {style:?} numbering")]
    ItemOutOfRange { style: ItemStyle, n: i64 },
    #[error("cannot read {input:?} as an integer")]
    ParseError { input: String },
}

/// The numbering registers.
///
/// `secno` is positive for ordinary sections, negative (the negated ordinal)
/// inside appendices, and [`SUPPLEMENT_SENTINEL`] or above after a supplement
/// that follows the appendices. `subsecno == -1` means the document does not
/// use subsections and proclaim labels omit that component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CounterState {
    pub secno: i64,
    pub subsecno: i64,
    pub proclno: i64,
    pub eqnumber: i64,
    pub itemno: i64,
    pub pageno: i64,
}

impl Default for CounterState {
    fn default() -> Self {
        CounterState::new(true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LabelKind {
    Section,
    Subsection,
    Appendix,
    Supplement,
    Proclaim,
    Equation,
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StructLabel {
    pub text: String,
    pub kind: LabelKind,
}

impl StructLabel {
    fn new(text: impl Into<String>, kind: LabelKind) -> Self {
        StructLabel {
            text: text.into(),
            kind,
        }
    }
}

/// Running-head record: the counters at the time of the mark and the
/// headline text built from the label and title.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MarkRecord {
    pub secno: i64,
    pub subsecno: i64,
    pub proclno: i64,
    pub headline: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionStart {
    pub label: StructLabel,
    pub mark: MarkRecord,
    /// The `\Appendices` divider for the table of contents, emitted by the
    /// first appendix that follows an ordinary section.
    pub divider: Option<AuxLine>,
}

/// What occupies the label position of an equation number.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EquationLabel {
    None,
    Key(String),
    /// Literal text where a control word was expected.
    Literal(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ItemStyle {
    Arabic,
    Roman,
    Alpha,
}

impl CounterState {
    /// Fresh registers. With `subsections == false` the subsection register
    /// starts at the `-1` sentinel.
    pub fn new(subsections: bool) -> Self {
        CounterState {
            secno: 0,
            subsecno: if subsections { 0 } else { -1 },
            proclno: 0,
            eqnumber: 0,
            itemno: 0,
            pageno: 1,
        }
    }

    fn mark(&self, label: &str, title: &str) -> MarkRecord {
        let headline = if self.secno < 0 {
            format!("Appendix {label}. {title}")
        } else if label.is_empty() {
            title.to_string()
        } else {
            format!("{label} {title}")
        };
        MarkRecord {
            secno: self.secno,
            subsecno: self.subsecno,
            proclno: self.proclno,
            headline: headline.trim().to_string(),
        }
    }

    pub fn begin_section(&mut self, title: &str) -> SectionStart {
        self.secno += 1;
        if self.subsecno > -1 {
            self.subsecno = 0;
        }
        self.proclno = 0;
        let label = self.secno.to_string();
        SectionStart {
            mark: self.mark(&label, title),
            label: StructLabel::new(label, LabelKind::Section),
            divider: None,
        }
    }

    pub fn begin_subsection(&mut self, title: &str) -> Result<SectionStart, NumberingError> {
        if self.subsecno == -1 {
            return Err(NumberingError::StructureConflict(
                "subsection in a document configured without subsections".into(),
            ));
        }
        if self.secno < 1 {
            return Err(NumberingError::StructureConflict(format!(
                "subsection outside a numbered section (secno = {})",
                self.secno
            )));
        }
        self.subsecno += 1;
        self.proclno = 0;
        let label = format!("{}.{}", self.secno, self.subsecno);
        Ok(SectionStart {
            mark: self.mark(&label, title),
            label: StructLabel::new(label, LabelKind::Subsection),
            divider: None,
        })
    }

    pub fn begin_appendix(&mut self, title: &str) -> Result<SectionStart, NumberingError> {
        let (start, divider) = if self.secno > 0 {
            (0, Some(auxfiles::appendices_divider()))
        } else {
            (self.secno, None)
        };
        let secno = start - 1;
        let ordinal = -secno;
        let letter = usize::try_from(ordinal - 1)
            .ok()
            .and_then(|i| APPENDIX_LETTERS.get(i))
            .ok_or(NumberingError::AppendixOverflow { ordinal })?;
        self.secno = secno;
        self.subsecno = 0;
        self.proclno = 0;
        let label = letter.to_string();
        Ok(SectionStart {
            mark: self.mark(&label, title),
            label: StructLabel::new(label, LabelKind::Appendix),
            divider,
        })
    }

    pub fn begin_supplement(&mut self, title: &str) -> SectionStart {
        if self.secno < 0 {
            self.secno = SUPPLEMENT_SENTINEL;
        } else {
            self.secno += 1;
        }
        SectionStart {
            mark: self.mark("", title),
            label: StructLabel::new("", LabelKind::Supplement),
            divider: None,
        }
    }

    pub fn begin_notoc_section(&mut self, title: &str) -> SectionStart {
        self.secno = 0;
        SectionStart {
            mark: self.mark("", title),
            label: StructLabel::new("", LabelKind::None),
            divider: None,
        }
    }

    pub fn next_proclaim(&mut self) -> StructLabel {
        self.proclno += 1;
        self.itemno = 0;
        let text = if self.subsecno > -1 {
            format!("{}.{}.{}", self.secno, self.subsecno, self.proclno)
        } else {
            format!("{}.{}", self.secno, self.proclno)
        };
        StructLabel::new(text, LabelKind::Proclaim)
    }

    /// Advances the equation counter and returns the printed tag. The label
    /// is only validated here; binding it is up to the caller.
    pub fn next_equation(
        &mut self,
        label: &EquationLabel,
        suffix: &str,
    ) -> Result<String, NumberingError> {
        if let EquationLabel::Literal(text) = label {
            return Err(NumberingError::IncorrectLabel { text: text.clone() });
        }
        if !suffix.chars().all(|c| c.is_ascii_alphanumeric()) {
            return Err(NumberingError::InvalidSuffix {
                suffix: suffix.to_string(),
            });
        }
        self.eqnumber += 1;
        Ok(format!("({}{suffix})", self.eqnumber))
    }

    pub fn next_item(&mut self, style: ItemStyle) -> Result<String, NumberingError> {
        let text = item_number(style, self.itemno + 1)?;
        self.itemno += 1;
        Ok(text)
    }

    pub fn reset_items(&mut self) {
        self.itemno = 0;
    }
}

/// `base + delta` on decimal strings.
pub fn add_offset(base: &str, delta: i64) -> Result<String, NumberingError> {
    let value: i64 = base
        .trim()
        .parse()
        .map_err(|_| NumberingError::ParseError {
            input: base.to_string(),
        })?;
    Ok((value + delta).to_string())
}

pub fn item_number(style: ItemStyle, n: i64) -> Result<String, NumberingError> {
    if n < 1 {
        return Err(NumberingError::ItemOutOfRange { style, n });
    }
    match style {
        ItemStyle::Arabic => Ok(format!("({n})")),
        ItemStyle::Roman => Ok(format!("({})", roman_lower(n as u64))),
        ItemStyle::Alpha => {
            if n > 26 {
                return Err(NumberingError::ItemOutOfRange { style, n });
            }
            let c = char::from(96 + n as u8);
            Ok(format!("{c}."))
        }
    }
}

fn roman_lower(mut n: u64) -> String {
    const TABLE: [(u64, &str); 13] = [
        (1000, "m"),
        (900, "cm"),
        (500, "d"),
        (400, "cd"),
        (100, "c"),
        (90, "xc"),
        (50, "l"),
        (40, "xl"),
        (10, "x"),
        (9, "ix"),
        (5, "v"),
        (4, "iv"),
        (1, "i"),
    ];
    let mut out = String::new();
    for &(value, digits) in &TABLE {
        while n >= value {
            out.push_str(digits);
            n -= value;
        }
    }
    out
}

/// Result of a proclaim: its label and what happened to the key candidate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProclaimStart {
    pub label: StructLabel,
    /// Set when the key was bound to the label.
    pub bound: Option<String>,
    /// Set when the key was already bound; it stays in the body as text.
    pub demoted: Option<String>,
}

/// Counter state plus label bindings for one build pass.
#[derive(Debug, Clone)]
pub struct Numberer {
    state: CounterState,
    last_label: Option<String>,
    bindings: IndexMap<String, String>,
    lab: Vec<LabLine>,
    warnings: Vec<String>,
}

impl Numberer {
    pub fn new(state: CounterState) -> Self {
        Numberer {
            state,
            last_label: None,
            bindings: IndexMap::new(),
            lab: Vec::new(),
            warnings: Vec::new(),
        }
    }

    /// Starts from `state` with `bindings` already known (a seed checkpoint).
    /// Seeded bindings count as bound but are not written to the `.lab` queue.
    pub fn with_bindings(state: CounterState, bindings: IndexMap<String, String>) -> Self {
        Numberer {
            bindings,
            ..Numberer::new(state)
        }
    }

    pub fn state(&self) -> &CounterState {
        &self.state
    }

    pub fn state_mut(&mut self) -> &mut CounterState {
        &mut self.state
    }

    pub fn last_label(&self) -> Option<&str> {
        self.last_label.as_deref()
    }

    pub fn bindings(&self) -> &IndexMap<String, String> {
        &self.bindings
    }

    pub fn lookup(&self, name: &str) -> Option<&str> {
        if name == LAST_LABEL {
            return self.last_label.as_deref();
        }
        self.bindings.get(name).map(String::as_str)
    }

    pub fn lab_lines(&self) -> &[LabLine] {
        &self.lab
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    /// Binds `name` and queues its `.lab` line. Empty values and the
    /// `\lastlabel` name itself are never written.
    pub fn bind(&mut self, name: &str, value: &str) {
        if name == LAST_LABEL {
            self.last_label = Some(value.to_string());
            return;
        }
        self.bindings.insert(name.to_string(), value.to_string());
        if !value.is_empty() {
            self.lab.push(LabLine::Define {
                name: name.to_string(),
                value: value.to_string(),
            });
        }
    }

    fn record(&mut self, start: SectionStart) -> SectionStart {
        self.last_label = Some(start.label.text.clone());
        start
    }

    pub fn section(&mut self, title: &str) -> SectionStart {
        let start = self.state.begin_section(title);
        self.record(start)
    }

    pub fn subsection(&mut self, title: &str) -> Result<SectionStart, NumberingError> {
        let start = self.state.begin_subsection(title)?;
        Ok(self.record(start))
    }

    pub fn appendix(&mut self, title: &str) -> Result<SectionStart, NumberingError> {
        let start = self.state.begin_appendix(title)?;
        Ok(self.record(start))
    }

    pub fn supplement(&mut self, title: &str) -> SectionStart {
        let start = self.state.begin_supplement(title);
        self.record(start)
    }

    pub fn notoc_section(&mut self, title: &str) -> SectionStart {
        let start = self.state.begin_notoc_section(title);
        self.record(start)
    }

    pub fn proclaim(&mut self, heading: &str, key: Option<&str>) -> ProclaimStart {
        let label = self.state.next_proclaim();
        self.last_label = Some(label.text.clone());
        let mut start = ProclaimStart {
            label,
            bound: None,
            demoted: None,
        };
        if let Some(key) = key {
            if self.bindings.contains_key(key) || key == LAST_LABEL {
                self.warn(format!(
                    "proclaim {heading:?}: \\{key} is already bound; kept as body text"
                ));
                start.demoted = Some(key.to_string());
            } else {
                let text = start.label.text.clone();
                self.bind(key, &text);
                start.bound = Some(key.to_string());
            }
        }
        start
    }

    /// Numbers an equation. A key binds to the bare number; the suffix only
    /// shows up in the printed tag.
    pub fn equation(
        &mut self,
        label: &EquationLabel,
        suffix: &str,
    ) -> Result<String, NumberingError> {
        let tag = self.state.next_equation(label, suffix)?;
        if let EquationLabel::Key(name) = label {
            let number = self.state.eqnumber.to_string();
            self.bind(name, &number);
        }
        Ok(tag)
    }

    /// `\labelsec`: binds `name` to the current structural label.
    pub fn label_section(&mut self, name: &str) {
        let value = match &self.last_label {
            Some(v) => v.clone(),
            None => {
                self.warn(format!("\\labelsec\\{name} before any labelled structure"));
                String::new()
            }
        };
        self.bind(name, &value);
    }
}
