use super::styled::{Span, StyledText};
use super::BibError;

/// Page information of a reference.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Pages {
    Range {
        first: String,
        last: Option<String>,
    },
    /// Total page count of a book or report.
    Amount(String),
}

impl Pages {
    /// Parses a range field such as `12-34`, `12--34` or `7`.
    pub fn range(raw: &str) -> Result<Pages, BibError> {
        let normalized = normalize_pages(raw)?;
        Ok(match normalized.split_once("--") {
            Some((first, last)) => Pages::Range {
                first: first.to_string(),
                last: Some(last.to_string()),
            },
            None => Pages::Range {
                first: normalized,
                last: None,
            },
        })
    }

    /// The page text without any `pp.` decoration: `12--34` or `301 pp`.
    pub fn plain(&self) -> String {
        match self {
            Pages::Range { first, last: None } => first.clone(),
            Pages::Range {
                first,
                last: Some(last),
            } => format!("{first}--{last}"),
            Pages::Amount(count) => format!("{count} pp"),
        }
    }
}

/// Whether a range is introduced by `pp.`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PageMode {
    Explicit,
    Implicit,
}

/// Rewrites a single hyphen between the two ends of a range as `--`.
///
/// `a-b` and `a--b` both give `a--b`; a single page is returned unchanged.
pub fn normalize_pages(raw: &str) -> Result<String, BibError> {
    let malformed = || BibError::MalformedRange {
        raw: raw.to_string(),
    };
    let raw_trimmed = raw.trim();
    if raw_trimmed.is_empty() {
        return Err(malformed());
    }
    let Some(dash) = raw_trimmed.find('-') else {
        return Ok(raw_trimmed.to_string());
    };
    let first = raw_trimmed[..dash].trim();
    let after = &raw_trimmed[dash + 1..];
    let last = after.strip_prefix('-').unwrap_or(after).trim();
    if first.is_empty() || last.is_empty() || last.contains('-') {
        return Err(malformed());
    }
    Ok(format!("{first}--{last}"))
}

pub(crate) fn pages_spans(pages: &Pages, mode: PageMode) -> Vec<Span> {
    match (pages, mode) {
        (Pages::Amount(count), _) => vec![
            Span::Text(count.clone()),
            Span::Tie,
            Span::Text("pp".into()),
        ],
        (range, PageMode::Explicit) => vec![
            Span::Text("pp.".into()),
            Span::Tie,
            Span::Text(range.plain()),
        ],
        (range, PageMode::Implicit) => vec![Span::Text(range.plain())],
    }
}

/// Page text as it appears in plain output; ties become spaces.
pub fn format_pages(pages: &Pages, mode: PageMode) -> String {
    StyledText::from(pages_spans(pages, mode)).to_plain()
}
