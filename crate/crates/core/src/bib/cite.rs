use indexmap::IndexMap;

use super::BibError;

/// Citation key (or label alias) to printed mark.
pub type KeyMap = IndexMap<String, String>;

/// A `\ref{key}` or `\ref{key, note}` occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Citation {
    pub key: String,
    /// Everything from the first comma on, comma included: `", p. 5"`.
    pub suffix: Option<String>,
}

impl Citation {
    pub fn new(key: &str) -> Self {
        Citation {
            key: key.to_string(),
            suffix: None,
        }
    }

    /// Parses the argument of `\ref`. Only `key` and `key, free text` are
    /// accepted; empty keys and `,,` anywhere are rejected.
    pub fn parse(raw: &str) -> Result<Citation, BibError> {
        let invalid = || BibError::InvalidCitation {
            raw: raw.to_string(),
        };
        if raw.contains(",,") {
            return Err(invalid());
        }
        let (key, suffix) = match raw.find(',') {
            Some(i) => (&raw[..i], Some(raw[i..].to_string())),
            None => (raw, None),
        };
        let key = key.trim();
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(invalid());
        }
        Ok(Citation {
            key: key.to_string(),
            suffix,
        })
    }

    /// The `[??key]` placeholder used while a key is unresolved.
    pub fn placeholder(&self) -> String {
        format!("[??{}]", self.key)
    }
}

/// `[mark]` or `[mark, note]`; an unknown key is always an error.
pub fn resolve_citation(db: &KeyMap, citation: &Citation) -> Result<String, BibError> {
    let mark = db
        .get(&citation.key)
        .ok_or_else(|| BibError::UndefinedReference {
            key: citation.key.clone(),
        })?;
    Ok(format!(
        "[{mark}{}]",
        citation.suffix.as_deref().unwrap_or_default()
    ))
}
