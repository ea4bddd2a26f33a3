/// A piece of styled text. Quotation marks stay literal (`` `` `` and `''`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Span {
    Text(String),
    /// Non-breaking space.
    Tie,
    Emph(Vec<Span>),
    Bold(Vec<Span>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct StyledText {
    pub spans: Vec<Span>,
}

impl From<Vec<Span>> for StyledText {
    fn from(spans: Vec<Span>) -> Self {
        StyledText { spans }
    }
}

impl StyledText {
    pub fn new() -> Self {
        StyledText::default()
    }

    pub fn text(&mut self, s: &str) -> &mut Self {
        if let Some(Span::Text(last)) = self.spans.last_mut() {
            last.push_str(s);
        } else {
            self.spans.push(Span::Text(s.to_string()));
        }
        self
    }

    pub fn push(&mut self, span: Span) -> &mut Self {
        match span {
            Span::Text(s) => self.text(&s),
            other => {
                self.spans.push(other);
                self
            }
        }
    }

    pub fn extend(&mut self, spans: impl IntoIterator<Item = Span>) -> &mut Self {
        for span in spans {
            self.push(span);
        }
        self
    }

    /// Removes trailing spaces from the last text span, like `\unskip`.
    pub fn unskip(&mut self) {
        if let Some(Span::Text(last)) = self.spans.last_mut() {
            let len = last.trim_end_matches(' ').len();
            last.truncate(len);
            if last.is_empty() {
                self.spans.pop();
            }
        }
    }

    /// Emphasis and bold flatten to their contents; ties become spaces.
    pub fn to_plain(&self) -> String {
        let mut out = String::new();
        flatten(&self.spans, &mut out, ' ');
        out
    }

    /// Plain text with ties kept as U+00A0 so a line breaker can avoid them.
    pub(crate) fn to_plain_with_ties(&self) -> String {
        let mut out = String::new();
        flatten(&self.spans, &mut out, '\u{a0}');
        out
    }

    pub fn to_html(&self) -> String {
        let mut out = String::new();
        html(&self.spans, &mut out);
        out
    }
}

fn flatten(spans: &[Span], out: &mut String, tie: char) {
    for span in spans {
        match span {
            Span::Text(t) => out.push_str(t),
            Span::Tie => out.push(tie),
            Span::Emph(inner) | Span::Bold(inner) => flatten(inner, out, tie),
        }
    }
}

pub(crate) fn escape_html(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '&' => out.push_str("&amp;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
}

fn html(spans: &[Span], out: &mut String) {
    for span in spans {
        match span {
            Span::Text(t) => {
                let quoted = t.replace("``", "\u{201c}").replace("''", "\u{201d}");
                escape_html(&quoted.replace("--", "\u{2013}"), out);
            }
            Span::Tie => out.push_str("&nbsp;"),
            Span::Emph(inner) => {
                out.push_str("<i>");
                html(inner, out);
                out.push_str("</i>");
            }
            Span::Bold(inner) => {
                out.push_str("<b>");
                html(inner, out);
                out.push_str("</b>");
            }
        }
    }
}
