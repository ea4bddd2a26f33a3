//! The structured (amsrefs-style) tag/value output.

use super::{classify, pluralize_ed, BibError, Field, RefKind, RefRecord};

type Tagged = Vec<(&'static str, String)>;

fn vol_with_idno(r: &RefRecord, out: &mut Tagged) {
    if let Some(vol) = &r.vol {
        let value = match &r.idno {
            Some(idno) => format!("{vol}, {idno}"),
            None => vol.clone(),
        };
        out.push(("vol", value));
    }
}

fn editors(r: &RefRecord, out: &mut Tagged) {
    if let Some(ed) = &r.ed {
        out.push((pluralize_ed(ed), ed.clone()));
    }
}

fn pages(r: &RefRecord, out: &mut Tagged) {
    if let Some(p) = &r.pages {
        out.push(("pages", p.plain()));
    }
}

/// The tag sequence of a record: `key` and `by`, the kind-specific tags,
/// then `finalinfo` when an end note is present.
pub fn emit_structured(r: &RefRecord) -> Result<Vec<(&'static str, String)>, BibError> {
    let kind = classify(r)?;
    let mut out: Tagged = vec![("key", r.mark.clone()), ("by", r.author.clone())];
    match kind {
        RefKind::Report => {
            let report = r.required(&r.report, Field::Report)?;
            out.push(("paper", r.title.clone()));
            out.push(("paperinfo", report.to_string()));
            pages(r, &mut out);
            if let Some(year) = &r.year {
                out.push(("yr", year.clone()));
            }
        }
        RefKind::Book => {
            let publ = r.required(&r.publ, Field::Publ)?;
            let year = r.required(&r.year, Field::Year)?;
            out.push(("book", r.title.clone()));
            pages(r, &mut out);
            if let Some(series) = &r.series {
                out.push(("bookinfo", series.clone()));
                editors(r, &mut out);
                vol_with_idno(r, &mut out);
            }
            out.push(("publ", publ.to_string()));
            out.push(("yr", year.to_string()));
            if let Some(isbn) = &r.isbn {
                out.push(("bookinfo", isbn.clone()));
            }
        }
        RefKind::Article => {
            let journal = r.required(&r.journal, Field::Journal)?;
            out.push(("paper", r.title.clone()));
            out.push(("jour", journal.to_string()));
            vol_with_idno(r, &mut out);
            if let Some(year) = &r.year {
                out.push(("yr", year.clone()));
            }
            pages(r, &mut out);
        }
        RefKind::Proceedings => {
            let inbook = r.required(&r.inbook, Field::Inbook)?;
            let year = r.required(&r.year, Field::Year)?;
            out.push(("paper", r.title.clone()));
            pages(r, &mut out);
            out.push(("inbook", inbook.to_string()));
            editors(r, &mut out);
            if let Some(series) = &r.series {
                out.push(("bookinfo", series.clone()));
                vol_with_idno(r, &mut out);
            }
            if let Some(publ) = &r.publ {
                out.push(("publ", publ.clone()));
            }
            out.push(("yr", year.to_string()));
        }
    }
    if let Some(note) = &r.endnote {
        out.push(("finalinfo", note.clone()));
    }
    Ok(out)
}

/// Serializes a record as `\ref`, one `\tag{value}` line per tag, `\endref`.
pub fn write_structured(r: &RefRecord) -> Result<Vec<String>, BibError> {
    let mut lines = vec!["\\ref".to_string()];
    for (tag, value) in emit_structured(r)? {
        lines.push(format!("\\{tag}{{{value}}}"));
    }
    lines.push("\\endref".to_string());
    Ok(lines)
}
