use std::collections::HashSet;

use super::token::{to_source, tokenize, Token, TokenKind};
use super::ParseError;
use crate::bib::Citation;
use crate::numbering::{EquationLabel, ItemStyle, LAST_LABEL};
use crate::Position;

/// Second operand and base of `\add`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AddBase {
    Label(String),
    Literal(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventKind {
    Section {
        title: String,
    },
    Subsection {
        title: String,
    },
    Appendix {
        title: String,
    },
    Supplement {
        title: String,
    },
    NotocSection {
        title: String,
    },
    Proclaim {
        heading: String,
        key: Option<String>,
        body: Vec<DocEvent>,
    },
    Equation {
        label: EquationLabel,
        suffix: String,
    },
    /// A math span. Equations inside it are numbered like any other.
    Math {
        display: bool,
        body: Vec<DocEvent>,
    },
    Cite(Citation),
    /// An index term; `\index` and `\newterm` also print it as a following
    /// text event.
    Index(String),
    Text(String),
    LabelSec(String),
    /// A control word naming a label (or `\lastlabel`).
    LabelRef(String),
    Add {
        base: AddBase,
        delta: i64,
    },
    Item(ItemStyle),
    ListReset,
    /// Paragraph break (a blank line).
    Par,
    OpenToc,
    /// Where the reference list goes.
    Bibliography,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocEvent {
    pub kind: EventKind,
    pub pos: Position,
}

impl DocEvent {
    pub fn new(kind: EventKind, pos: Position) -> Self {
        DocEvent { kind, pos }
    }
}

/// Commands with a meaning in the dialect. None of them can be a label key.
pub const DIALECT_COMMANDS: &[&str] = &[
    "newsection",
    "subsection",
    "Appendix",
    "Supplement",
    "NotocSection",
    "labelsec",
    "proclaim",
    "eqn",
    "neqn",
    "label",
    "add",
    "ref",
    "inx",
    "index",
    "newterm",
    "statitem",
    "eqitem",
    "defitem",
    "resetitems",
    "opentoc",
    "beginrefs",
    "endrefs",
    "refsfile",
    "bye",
    "lastlabel",
];

#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    /// Names already bound before the document starts (a seed `.lab`).
    pub seed_labels: HashSet<String>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ctx {
    Top,
    Nested,
}

#[derive(Default)]
struct TextBuf {
    text: String,
    pos: Option<Position>,
}

impl TextBuf {
    fn push(&mut self, s: &str, pos: Position) {
        if self.pos.is_none() {
            self.pos = Some(pos);
        }
        self.text.push_str(s);
    }

    fn flush(&mut self, out: &mut Vec<DocEvent>) {
        if let Some(pos) = self.pos.take() {
            out.push(DocEvent::new(
                EventKind::Text(std::mem::take(&mut self.text)),
                pos,
            ));
        }
    }
}

struct Parser<'o> {
    opts: &'o ParseOptions,
    /// Names bound so far, in document order.
    bound: HashSet<String>,
    /// Every name bound anywhere in the document, plus the seed.
    declared: HashSet<String>,
    stopped: bool,
}

/// Index just past the blank line starting at `toks[i]`, if one does.
fn blank_line_at(toks: &[Token], i: usize) -> Option<usize> {
    if !toks.get(i)?.is_char('\n') {
        return None;
    }
    let mut j = i + 1;
    while j < toks.len() && matches!(toks[j].kind, TokenKind::Char(' ' | '\t' | '\r')) {
        j += 1;
    }
    if !toks.get(j)?.is_char('\n') {
        return None;
    }
    while j < toks.len() && toks[j].is_space() {
        j += 1;
    }
    Some(j)
}

fn skip_spaces(toks: &[Token], mut i: usize) -> usize {
    while i < toks.len() && toks[i].is_space() && blank_line_at(toks, i).is_none() {
        i += 1;
    }
    i
}

fn collapse(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn is_dialect(name: &str) -> bool {
    DIALECT_COMMANDS.contains(&name)
}

impl Parser<'_> {
    fn bind(&mut self, name: &str) {
        if name != LAST_LABEL {
            self.bound.insert(name.to_string());
        }
    }

    /// Tokens up to (not including) the first top-level period. With
    /// `need_space` the period must be followed by a space or the end.
    fn until_period(
        &self,
        toks: &[Token],
        start: usize,
        command: &str,
        at: Position,
        need_space: bool,
    ) -> Result<(String, usize), ParseError> {
        let mut j = start;
        while j < toks.len() {
            if blank_line_at(toks, j).is_some() {
                break;
            }
            if toks[j].is_char('.') && (!need_space || toks.get(j + 1).is_none_or(Token::is_space))
            {
                return Ok((collapse(&to_source(&toks[start..j])), j + 1));
            }
            j += 1;
        }
        Err(ParseError::MissingDelimiter {
            command: command.to_string(),
            expected: if need_space { ". " } else { "." }.to_string(),
            pos: at,
        })
    }

    fn group_arg<'t>(
        &self,
        toks: &'t [Token],
        i: usize,
        command: &str,
        at: Position,
    ) -> Result<(&'t Token, usize), ParseError> {
        let j = skip_spaces(toks, i);
        match toks.get(j) {
            Some(
                t @ Token {
                    kind: TokenKind::Group(_),
                    ..
                },
            ) => Ok((t, j + 1)),
            _ => Err(ParseError::MissingArgument {
                command: command.to_string(),
                pos: at,
            }),
        }
    }

    /// `(\Key suffix)` after `\eqn`/`\neqn`. No parenthesis means an
    /// unlabelled number.
    fn equation(
        &mut self,
        toks: &[Token],
        i: usize,
        command: &str,
        at: Position,
    ) -> Result<(EventKind, usize), ParseError> {
        if !toks.get(i).is_some_and(|t| t.is_char('(')) {
            let kind = EventKind::Equation {
                label: EquationLabel::None,
                suffix: String::new(),
            };
            return Ok((kind, i));
        }
        let close = toks[i + 1..]
            .iter()
            .position(|t| t.is_char(')'))
            .map(|k| i + 1 + k)
            .ok_or_else(|| ParseError::MissingDelimiter {
                command: command.to_string(),
                expected: ")".to_string(),
                pos: at,
            })?;
        let inner = &toks[i + 1..close];
        let label = match inner.first() {
            None => {
                return Err(ParseError::MissingArgument {
                    command: command.to_string(),
                    pos: at,
                })
            }
            Some(first) => match first.control_word() {
                Some(name) if name == LAST_LABEL || !is_dialect(name) => {
                    let suffix = to_source(&inner[1..]).trim().to_string();
                    self.bind(name);
                    let kind = EventKind::Equation {
                        label: EquationLabel::Key(name.to_string()),
                        suffix,
                    };
                    return Ok((kind, close + 1));
                }
                _ => EquationLabel::Literal(to_source(inner)),
            },
        };
        Ok((
            EventKind::Equation {
                label,
                suffix: String::new(),
            },
            close + 1,
        ))
    }

    fn add(
        &self,
        toks: &[Token],
        i: usize,
        at: Position,
    ) -> Result<(EventKind, usize), ParseError> {
        let missing = || ParseError::MissingArgument {
            command: "add".to_string(),
            pos: at,
        };
        let j = skip_spaces(toks, i);
        let first = toks.get(j).ok_or_else(missing)?;
        let base = match &first.kind {
            TokenKind::Command(name) => AddBase::Label(name.clone()),
            TokenKind::Group(inner) => match inner.as_slice() {
                [only] if only.control_word().is_some() => {
                    AddBase::Label(only.control_word().unwrap_or_default().to_string())
                }
                _ => AddBase::Literal(to_source(inner).trim().to_string()),
            },
            TokenKind::Char(c) if c.is_ascii_digit() => AddBase::Literal(c.to_string()),
            _ => return Err(missing()),
        };
        let k = skip_spaces(toks, j + 1);
        let second = toks.get(k).ok_or_else(missing)?;
        let raw = match &second.kind {
            TokenKind::Group(inner) => to_source(inner),
            TokenKind::Char(c) => c.to_string(),
            _ => return Err(missing()),
        };
        let delta = raw.trim().parse().map_err(|_| missing())?;
        Ok((EventKind::Add { base, delta }, k + 1))
    }

    fn structural(name: &str, title: String) -> Option<EventKind> {
        Some(match name {
            "newsection" => EventKind::Section { title },
            "subsection" => EventKind::Subsection { title },
            "Appendix" => EventKind::Appendix { title },
            "Supplement" => EventKind::Supplement { title },
            "NotocSection" => EventKind::NotocSection { title },
            _ => return None,
        })
    }

    fn seq(
        &mut self,
        toks: &[Token],
        ctx: Ctx,
        buf: &mut TextBuf,
        out: &mut Vec<DocEvent>,
    ) -> Result<(), ParseError> {
        let mut i = 0;
        while i < toks.len() && !self.stopped {
            let tok = &toks[i];
            let pos = tok.pos;
            match &tok.kind {
                TokenKind::Char('\n') if blank_line_at(toks, i).is_some() => {
                    buf.flush(out);
                    out.push(DocEvent::new(EventKind::Par, pos));
                    i = blank_line_at(toks, i).unwrap_or(i + 1);
                }
                TokenKind::Char(c) => {
                    buf.push(&c.to_string(), pos);
                    i += 1;
                }
                TokenKind::Group(inner) => {
                    buf.push("{", pos);
                    self.seq(inner, Ctx::Nested, buf, out)?;
                    buf.push("}", pos);
                    i += 1;
                }
                TokenKind::MathSpan { display, inner, .. } => {
                    buf.flush(out);
                    let body = self.math(inner)?;
                    out.push(DocEvent::new(
                        EventKind::Math {
                            display: *display,
                            body,
                        },
                        pos,
                    ));
                    i += 1;
                }
                TokenKind::Command(name) => {
                    i = self.command(toks, i, name, ctx, buf, out)?;
                }
            }
        }
        Ok(())
    }

    fn math(&mut self, toks: &[Token]) -> Result<Vec<DocEvent>, ParseError> {
        let mut out = Vec::new();
        let mut buf = TextBuf::default();
        self.math_seq(toks, &mut buf, &mut out)?;
        buf.flush(&mut out);
        Ok(out)
    }

    fn math_seq(
        &mut self,
        toks: &[Token],
        buf: &mut TextBuf,
        out: &mut Vec<DocEvent>,
    ) -> Result<(), ParseError> {
        let mut i = 0;
        while i < toks.len() {
            let tok = &toks[i];
            match (&tok.kind, tok.command()) {
                (_, Some(name @ ("eqn" | "neqn"))) => {
                    buf.flush(out);
                    let (kind, next) = self.equation(toks, i + 1, name, tok.pos)?;
                    out.push(DocEvent::new(kind, tok.pos));
                    i = next;
                }
                (_, Some("label")) => {
                    buf.flush(out);
                    out.push(DocEvent::new(
                        EventKind::Equation {
                            label: EquationLabel::Key(LAST_LABEL.to_string()),
                            suffix: String::new(),
                        },
                        tok.pos,
                    ));
                    i += 1;
                }
                (TokenKind::Group(inner), _) => {
                    buf.push("{", tok.pos);
                    self.math_seq(inner, buf, out)?;
                    buf.push("}", tok.pos);
                    i += 1;
                }
                _ => {
                    buf.push(&to_source(std::slice::from_ref(tok)), tok.pos);
                    i += 1;
                }
            }
        }
        Ok(())
    }

    /// Handles the command at `toks[i]` and returns the index to resume at.
    fn command(
        &mut self,
        toks: &[Token],
        i: usize,
        name: &str,
        ctx: Ctx,
        buf: &mut TextBuf,
        out: &mut Vec<DocEvent>,
    ) -> Result<usize, ParseError> {
        let at = toks[i].pos;
        let misplaced = || ParseError::Misplaced {
            command: name.to_string(),
            pos: at,
        };
        let emit = |buf: &mut TextBuf, out: &mut Vec<DocEvent>, kind: EventKind| {
            buf.flush(out);
            out.push(DocEvent::new(kind, at));
        };
        match name {
            "newsection" | "subsection" | "Appendix" | "Supplement" | "NotocSection" => {
                if ctx != Ctx::Top {
                    return Err(misplaced());
                }
                let (title, next) = self.until_period(toks, i + 1, name, at, false)?;
                let kind = Self::structural(name, title).ok_or_else(misplaced)?;
                emit(buf, out, kind);
                Ok(next)
            }
            "labelsec" => {
                let j = skip_spaces(toks, i + 1);
                let target = match toks.get(j).map(|t| &t.kind) {
                    Some(TokenKind::Group(inner)) if inner.len() == 1 => inner[0].control_word(),
                    Some(_) => toks[j].control_word(),
                    None => None,
                };
                let target = target
                    .filter(|n| !is_dialect(n))
                    .ok_or_else(|| ParseError::MissingArgument {
                        command: name.to_string(),
                        pos: at,
                    })?
                    .to_string();
                self.bind(&target);
                emit(buf, out, EventKind::LabelSec(target));
                Ok(j + 1)
            }
            "proclaim" => {
                if ctx != Ctx::Top {
                    return Err(misplaced());
                }
                let (heading, next) = self.until_period(toks, i + 1, name, at, true)?;
                let j = skip_spaces(toks, next);
                let key = toks
                    .get(j)
                    .and_then(Token::control_word)
                    .filter(|n| !is_dialect(n) && !self.bound.contains(*n))
                    .filter(|n| !self.opts.seed_labels.contains(*n))
                    .map(str::to_string);
                let body_start = if key.is_some() { j + 1 } else { j };
                if let Some(k) = &key {
                    self.bind(k);
                }
                let end = (body_start..toks.len())
                    .find(|&k| blank_line_at(toks, k).is_some())
                    .unwrap_or(toks.len());
                let mut body = Vec::new();
                let mut body_buf = TextBuf::default();
                let body_toks = &toks[skip_spaces(toks, body_start).min(end)..end];
                self.seq(body_toks, Ctx::Nested, &mut body_buf, &mut body)?;
                body_buf.flush(&mut body);
                emit(buf, out, EventKind::Proclaim { heading, key, body });
                Ok(end)
            }
            "eqn" | "neqn" => {
                let (kind, next) = self.equation(toks, i + 1, name, at)?;
                emit(buf, out, kind);
                Ok(next)
            }
            "label" => {
                let kind = EventKind::Equation {
                    label: EquationLabel::Key(LAST_LABEL.to_string()),
                    suffix: String::new(),
                };
                emit(buf, out, kind);
                Ok(i + 1)
            }
            "add" => {
                let (kind, next) = self.add(toks, i + 1, at)?;
                emit(buf, out, kind);
                Ok(next)
            }
            "ref" => {
                let (group, next) = self.group_arg(toks, i + 1, name, at)?;
                let TokenKind::Group(inner) = &group.kind else {
                    unreachable!()
                };
                let raw = to_source(inner);
                let citation = Citation::parse(&raw)
                    .map_err(|_| ParseError::InvalidCitation { raw, pos: at })?;
                emit(buf, out, EventKind::Cite(citation));
                Ok(next)
            }
            "inx" | "index" | "newterm" => {
                let (group, next) = self.group_arg(toks, i + 1, name, at)?;
                let TokenKind::Group(inner) = &group.kind else {
                    unreachable!()
                };
                emit(buf, out, EventKind::Index(collapse(&to_source(inner))));
                if name != "inx" {
                    self.seq(inner, Ctx::Nested, buf, out)?;
                }
                Ok(next)
            }
            "statitem" | "eqitem" | "defitem" => {
                let style = match name {
                    "statitem" => ItemStyle::Arabic,
                    "eqitem" => ItemStyle::Roman,
                    _ => ItemStyle::Alpha,
                };
                emit(buf, out, EventKind::Item(style));
                Ok(i + 1)
            }
            "resetitems" => {
                emit(buf, out, EventKind::ListReset);
                Ok(i + 1)
            }
            "opentoc" => {
                if ctx != Ctx::Top {
                    return Err(misplaced());
                }
                emit(buf, out, EventKind::OpenToc);
                Ok(i + 1)
            }
            "beginrefs" => {
                if ctx != Ctx::Top {
                    return Err(misplaced());
                }
                emit(buf, out, EventKind::Bibliography);
                Ok(i + 1)
            }
            "endrefs" => Ok(i + 1),
            "refsfile" => {
                let j = skip_spaces(toks, i + 1);
                let is_group = matches!(toks.get(j).map(|t| &t.kind), Some(TokenKind::Group(_)));
                Ok(if is_group { j + 1 } else { i + 1 })
            }
            "bye" => {
                buf.flush(out);
                self.stopped = true;
                Ok(toks.len())
            }
            _ if name == LAST_LABEL || self.declared.contains(name) => {
                emit(buf, out, EventKind::LabelRef(name.to_string()));
                Ok(i + 1)
            }
            _ => {
                buf.push(&to_source(&toks[i..i + 1]), at);
                Ok(i + 1)
            }
        }
    }

    fn run(&mut self, toks: &[Token]) -> Result<Vec<DocEvent>, ParseError> {
        self.bound = self.opts.seed_labels.clone();
        self.stopped = false;
        let mut out = Vec::new();
        let mut buf = TextBuf::default();
        self.seq(toks, Ctx::Top, &mut buf, &mut out)?;
        buf.flush(&mut out);
        Ok(out)
    }
}

/// Turns tokens into document events.
///
/// Control words that name a label are resolved against every name the
/// document binds, so the parse runs twice: once to collect the names, once
/// to produce the events.
pub fn parse_events_with(
    tokens: &[Token],
    opts: &ParseOptions,
) -> Result<Vec<DocEvent>, ParseError> {
    let mut parser = Parser {
        opts,
        bound: HashSet::new(),
        declared: HashSet::new(),
        stopped: false,
    };
    parser.run(tokens)?;
    parser.declared = &parser.bound | &opts.seed_labels;
    parser.run(tokens)
}

pub fn parse_events(tokens: &[Token]) -> Result<Vec<DocEvent>, ParseError> {
    parse_events_with(tokens, &ParseOptions::default())
}

pub fn parse_document(source: &str, opts: &ParseOptions) -> Result<Vec<DocEvent>, ParseError> {
    parse_events_with(&tokenize(source)?, opts)
}

/// Pre-order walk over events and their nested bodies.
pub fn flatten(events: &[DocEvent]) -> Vec<&DocEvent> {
    let mut out = Vec::new();
    fn walk<'e>(events: &'e [DocEvent], out: &mut Vec<&'e DocEvent>) {
        for e in events {
            out.push(e);
            match &e.kind {
                EventKind::Proclaim { body, .. } | EventKind::Math { body, .. } => walk(body, out),
                _ => {}
            }
        }
    }
    walk(events, &mut out);
    out
}

/// Writes events back as dialect source.
pub fn events_to_source(events: &[DocEvent]) -> String {
    let mut out = String::new();
    for e in events {
        match &e.kind {
            EventKind::Section { title } => out.push_str(&format!("\\newsection {title}.")),
            EventKind::Subsection { title } => out.push_str(&format!("\\subsection {title}.")),
            EventKind::Appendix { title } => out.push_str(&format!("\\Appendix {title}.")),
            EventKind::Supplement { title } => out.push_str(&format!("\\Supplement {title}.")),
            EventKind::NotocSection { title } => out.push_str(&format!("\\NotocSection {title}.")),
            EventKind::Proclaim { heading, key, body } => {
                out.push_str(&format!("\\proclaim {heading}. "));
                if let Some(k) = key {
                    out.push_str(&format!("\\{k} "));
                }
                out.push_str(&events_to_source(body));
            }
            EventKind::Equation { label, suffix } => match label {
                EquationLabel::None => out.push_str("\\eqn{}"),
                EquationLabel::Key(k) if k == LAST_LABEL && suffix.is_empty() => {
                    out.push_str("\\label{}")
                }
                EquationLabel::Key(k) if suffix.is_empty() => {
                    out.push_str(&format!("\\eqn(\\{k})"))
                }
                EquationLabel::Key(k) => out.push_str(&format!("\\eqn(\\{k} {suffix})")),
                EquationLabel::Literal(text) => out.push_str(&format!("\\eqn({text})")),
            },
            EventKind::Math { display, body } => {
                let delim = if *display { "$$" } else { "$" };
                out.push_str(delim);
                out.push_str(&events_to_source(body));
                out.push_str(delim);
            }
            EventKind::Cite(c) => out.push_str(&format!(
                "\\ref{{{}{}}}",
                c.key,
                c.suffix.as_deref().unwrap_or_default()
            )),
            EventKind::Index(term) => out.push_str(&format!("\\inx{{{term}}}")),
            EventKind::Text(t) => out.push_str(t),
            EventKind::LabelSec(name) => out.push_str(&format!("\\labelsec\\{name}{{}}")),
            EventKind::LabelRef(name) => out.push_str(&format!("\\{name}{{}}")),
            EventKind::Add { base, delta } => match base {
                AddBase::Label(name) => out.push_str(&format!("\\add\\{name}{{{delta}}}")),
                AddBase::Literal(v) => out.push_str(&format!("\\add{{{v}}}{{{delta}}}")),
            },
            EventKind::Item(style) => out.push_str(match style {
                ItemStyle::Arabic => "\\statitem{}",
                ItemStyle::Roman => "\\eqitem{}",
                ItemStyle::Alpha => "\\defitem{}",
            }),
            EventKind::ListReset => out.push_str("\\resetitems{}"),
            EventKind::Par => out.push_str("\n\n"),
            EventKind::OpenToc => out.push_str("\\opentoc{}"),
            EventKind::Bibliography => out.push_str("\\beginrefs{}"),
        }
    }
    out
}
