//! Tokenizer and event parser for the document dialect.

mod events;
mod token;

use thiserror::Error;

use crate::Position;

pub use events::{
    events_to_source, flatten, parse_document, parse_events, parse_events_with, AddBase, DocEvent,
    EventKind, ParseOptions, DIALECT_COMMANDS,
};
pub use token::{to_source, tokenize, Token, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{pos}: unbalanced group")]
    UnbalancedGroup { pos: Position },
    #[error("{pos}: unbalanced math delimiter")]
    UnbalancedMath { pos: Position },
    #[error("{pos}: non-ASCII character")]
    NonAscii { pos: Position },
    #[error("{pos}: \\{command} is missing its closing {expected:?}")]
    MissingDelimiter {
        command: String,
        expected: String,
        pos: Position,
    },
    #[error("{pos}: \\{command} is missing its argument")]
    MissingArgument { command: String, pos: Position },
    #[error("{pos}: \\{command} is not allowed here")]
    Misplaced { command: String, pos: Position },
    #[error("{pos}: invalid citation {raw:?}")]
    InvalidCitation { raw: String, pos: Position },
}

impl ParseError {
    pub fn pos(&self) -> Position {
        match self {
            ParseError::UnbalancedGroup { pos }
            | ParseError::UnbalancedMath { pos }
            | ParseError::NonAscii { pos }
            | ParseError::MissingDelimiter { pos, .. }
            | ParseError::MissingArgument { pos, .. }
            | ParseError::Misplaced { pos, .. }
            | ParseError::InvalidCitation { pos, .. } => *pos,
        }
    }
}
