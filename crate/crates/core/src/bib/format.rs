//! Plain-style formatting of reference entries.

use super::pages::{pages_spans, PageMode};
use super::styled::{Span, StyledText};
use super::{classify, pluralize_ed, BibError, Field, Pages, RefKind, RefRecord};

fn emph(text: &str) -> Span {
    Span::Emph(vec![Span::Text(text.to_string())])
}

/// `(ed-field, ed.)` or `(ed-field, eds.)`, with its leading space.
fn editors(out: &mut StyledText, ed: &str) {
    out.text(&format!(" ({ed}, {}.)", pluralize_ed(ed)));
}

fn article(r: &RefRecord, out: &mut StyledText) -> Result<(), BibError> {
    let journal = r.required(&r.journal, Field::Journal)?;
    out.text("``").text(&r.title).text("'', ");
    let mut journal_spans = vec![Span::Text(journal.to_string())];
    if let Some(vol) = &r.vol {
        journal_spans.push(Span::Text(" ".into()));
        journal_spans.push(Span::Bold(vec![Span::Text(vol.clone())]));
    }
    out.push(Span::Emph(journal_spans));
    if let Some(idno) = &r.idno {
        out.text(", ").text(idno);
    }
    if let Some(year) = &r.year {
        out.text(", (").text(year).text(")");
    }
    if let Some(pages) = &r.pages {
        out.text(", ")
            .extend(pages_spans(pages, PageMode::Implicit));
    }
    Ok(())
}

fn book(r: &RefRecord, out: &mut StyledText) -> Result<(), BibError> {
    let publ = r.required(&r.publ, Field::Publ)?;
    let year = r.required(&r.year, Field::Year)?;
    out.push(emph(&r.title)).text(",");
    match &r.pages {
        // The unit of an amount is set after the group holding the comma.
        Some(Pages::Amount(count)) => {
            out.text(" ")
                .text(count)
                .text(",")
                .push(Span::Tie)
                .text("pp");
        }
        Some(pages) => {
            out.text(" ")
                .extend(pages_spans(pages, PageMode::Explicit))
                .text(",");
        }
        None => {}
    }
    if let Some(series) = &r.series {
        out.text(" ").text(series);
        if let Some(ed) = &r.ed {
            editors(out, ed);
        }
        if let Some(vol) = &r.vol {
            out.text(" ").text(vol);
        }
        if let Some(idno) = &r.idno {
            out.text(", ").text(idno);
        }
        out.text(",");
    }
    out.text(" ").text(publ).text(", ").text(year);
    if let Some(isbn) = &r.isbn {
        out.text(", ISBN ").text(isbn);
    }
    Ok(())
}

fn proceedings(r: &RefRecord, out: &mut StyledText) -> Result<(), BibError> {
    let inbook = r.required(&r.inbook, Field::Inbook)?;
    let year = r.required(&r.year, Field::Year)?;
    out.text("``").text(&r.title).text("'',");
    if let Some(pages) = &r.pages {
        out.text(" ").extend(pages_spans(pages, PageMode::Explicit));
    }
    out.text(" in ").push(emph(inbook));
    if let Some(ed) = &r.ed {
        editors(out, ed);
    }
    out.text(", ");
    if let Some(series) = &r.series {
        out.text(series);
        if let Some(vol) = &r.vol {
            out.text(" ").text(vol);
        }
        if let Some(idno) = &r.idno {
            out.text(", ").text(idno);
        }
        out.text(", ");
    }
    if let Some(publ) = &r.publ {
        out.text(publ).text(", ");
    }
    out.text(year);
    Ok(())
}

fn report(r: &RefRecord, out: &mut StyledText) -> Result<(), BibError> {
    let report = r.required(&r.report, Field::Report)?;
    out.push(emph(&r.title)).text(", ").text(report);
    if let Some(pages) = &r.pages {
        out.text(", ")
            .extend(pages_spans(pages, PageMode::Explicit));
    }
    if let Some(year) = &r.year {
        out.text(", (").text(year).text(")");
    }
    Ok(())
}

/// The plain-style body of an entry: author, kind-specific fields, optional
/// end note and the closing period. The `[mark]` column is added by
/// [`render_entry`].
pub fn format_reference(record: &RefRecord) -> Result<StyledText, BibError> {
    let kind = classify(record)?;
    let mut out = StyledText::new();
    out.text(&record.author).text(", ");
    match kind {
        RefKind::Article => article(record, &mut out)?,
        RefKind::Book => book(record, &mut out)?,
        RefKind::Proceedings => proceedings(record, &mut out)?,
        RefKind::Report => report(record, &mut out)?,
    }
    out.unskip();
    if let Some(note) = &record.endnote {
        out.text(". ").text(note);
    }
    out.text(".");
    Ok(out)
}

/// Column geometry for rendered entries, in character cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EntryLayout {
    /// Width of the `[mark]` column and of the hanging indent.
    pub key_width: usize,
    /// Total line width.
    pub line_width: usize,
}

impl Default for EntryLayout {
    fn default() -> Self {
        EntryLayout {
            key_width: 36,
            line_width: 80,
        }
    }
}

/// Lays out `[mark]` and the formatted body with a hanging indent.
///
/// The mark, followed by one space, is padded to the key column when it fits
/// strictly inside it; otherwise it is followed by a single space. Lines
/// break at ordinary spaces only, never at ties.
pub fn render_entry(record: &RefRecord, body: &StyledText, layout: EntryLayout) -> Vec<String> {
    let mark = format!("[{}]", record.mark);
    let mark_len = mark.chars().count();
    let prefix = if mark_len + 1 < layout.key_width {
        format!("{mark:<width$}", width = layout.key_width)
    } else {
        format!("{mark} ")
    };
    let text = body.to_plain_with_ties();
    let words: Vec<String> = text
        .split(' ')
        .filter(|w| !w.is_empty())
        .map(|w| w.replace('\u{a0}', " "))
        .collect();
    if words.is_empty() {
        return vec![mark];
    }

    let indent = " ".repeat(layout.key_width);
    let mut lines = Vec::new();
    let mut current = prefix;
    let mut has_word = false;
    for word in words {
        let len = current.chars().count();
        let wlen = word.chars().count();
        if !has_word {
            current.push_str(&word);
        } else if len + 1 + wlen <= layout.line_width {
            current.push(' ');
            current.push_str(&word);
        } else {
            lines.push(std::mem::replace(&mut current, format!("{indent}{word}")));
        }
        has_word = true;
    }
    lines.push(current);
    lines
}
