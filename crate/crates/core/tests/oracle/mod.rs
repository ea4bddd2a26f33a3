//! Test-only reference models, written independently of the library.

#![allow(dead_code)]

pub mod counters;
pub mod macros;

use macros::Fields;

/// One entry of a reference file as seen by the oracle.
#[derive(Debug, Clone)]
pub struct OracleEntry {
    pub key: String,
    pub fields: Fields,
}

/// Minimal reader for the fixture reference files: entries start at `\ref`,
/// fields are `\name{value}` with balanced braces.
pub fn read_refs(src: &str) -> Vec<OracleEntry> {
    let mut entries = Vec::new();
    for chunk in entry_chunks(src) {
        let mut key = String::new();
        let mut fields = Vec::new();
        let bytes: Vec<char> = chunk.chars().collect();
        let mut i = 0;
        while i < bytes.len() {
            if bytes[i] == '%' {
                while i < bytes.len() && bytes[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            if bytes[i] != '\\' {
                i += 1;
                continue;
            }
            i += 1;
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                i += 1;
            }
            let name: String = bytes[start..i].iter().collect();
            assert_eq!(bytes.get(i), Some(&'{'), "field {name} needs a value");
            i += 1;
            let vstart = i;
            let mut depth = 0;
            while !(bytes[i] == '}' && depth == 0) {
                match bytes[i] {
                    '{' => depth += 1,
                    '}' => depth -= 1,
                    _ => {}
                }
                i += 1;
            }
            let value: String = bytes[vstart..i].iter().collect();
            i += 1;
            match name.as_str() {
                "key" => key = value,
                "mark" | "ident" => {}
                "pages" => fields.push(("pages".to_string(), format!("range:{value}"))),
                "amount" => fields.push(("pages".to_string(), format!("amount:{value}"))),
                "note" => fields.push(("endnote".to_string(), value)),
                "isbn" => fields.push(("ISBN".to_string(), value)),
                _ => fields.push((name, value)),
            }
        }
        entries.push(OracleEntry { key, fields });
    }
    entries
}

fn entry_chunks(src: &str) -> Vec<&str> {
    let starts: Vec<usize> = src
        .match_indices("\\ref")
        .map(|(i, _)| i)
        .filter(|&i| {
            !src[i + 4..]
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_alphabetic())
        })
        .collect();
    starts
        .iter()
        .enumerate()
        .map(|(n, &s)| &src[s + 4..starts.get(n + 1).copied().unwrap_or(src.len())])
        .collect()
}

/// Oracle text for every entry, one `key<TAB>text` line each.
pub fn golden_lines(src: &str) -> Vec<String> {
    read_refs(src)
        .iter()
        .map(|e| {
            let text = macros::typeset(&e.fields)
                .unwrap_or_else(|errs| format!("ERROR {}", errs.join("; ")));
            format!("{}\t{}", e.key, text)
        })
        .collect()
}
