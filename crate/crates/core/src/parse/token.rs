use super::ParseError;
use crate::Position;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    /// `\name` (a maximal letter run) or a control symbol such as `\$`.
    Command(String),
    Group(Vec<Token>),
    /// `$...$` or `$$...$$`. `verbatim` is the content without delimiters
    /// and comments; `inner` is the same content tokenized.
    MathSpan {
        verbatim: String,
        display: bool,
        inner: Vec<Token>,
    },
    Char(char),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub pos: Position,
}

impl Token {
    pub fn is_char(&self, c: char) -> bool {
        self.kind == TokenKind::Char(c)
    }

    pub fn is_space(&self) -> bool {
        matches!(self.kind, TokenKind::Char(' ' | '\t' | '\r' | '\n'))
    }

    pub fn command(&self) -> Option<&str> {
        match &self.kind {
            TokenKind::Command(name) => Some(name),
            _ => None,
        }
    }

    /// A command whose name is a letter run, as opposed to a control symbol.
    pub fn control_word(&self) -> Option<&str> {
        self.command()
            .filter(|n| !n.is_empty() && n.bytes().all(|b| b.is_ascii_alphabetic()))
    }
}

/// Writes tokens back as source text. Comments are gone; everything else
/// round-trips.
pub fn to_source(tokens: &[Token]) -> String {
    let mut out = String::new();
    write_source(tokens, &mut out);
    out
}

fn write_source(tokens: &[Token], out: &mut String) {
    for t in tokens {
        match &t.kind {
            TokenKind::Command(name) => {
                out.push('\\');
                out.push_str(name);
            }
            TokenKind::Group(inner) => {
                out.push('{');
                write_source(inner, out);
                out.push('}');
            }
            TokenKind::MathSpan {
                verbatim, display, ..
            } => {
                let delim = if *display { "$$" } else { "$" };
                out.push_str(delim);
                out.push_str(verbatim);
                out.push_str(delim);
            }
            TokenKind::Char(c) => out.push(*c),
        }
    }
}

struct Lexer {
    chars: Vec<char>,
    i: usize,
    line: u32,
    column: u32,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Text,
    Group,
    Math { display: bool },
}

impl Lexer {
    fn pos(&self) -> Position {
        Position::new(self.line, self.column)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.i).copied()
    }

    fn peek_at(&self, k: usize) -> Option<char> {
        self.chars.get(self.i + k).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.i += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_comment(&mut self) {
        while let Some(c) = self.bump() {
            if c == '\n' {
                break;
            }
        }
    }

    /// Whether the upcoming newline starts a blank line.
    fn at_blank_line(&self) -> bool {
        if self.peek() != Some('\n') {
            return false;
        }
        let mut k = 1;
        while let Some(c) = self.peek_at(k) {
            match c {
                '\n' => return true,
                ' ' | '\t' | '\r' => k += 1,
                _ => return false,
            }
        }
        false
    }

    fn command(&mut self) -> TokenKind {
        let mut name = String::new();
        while let Some(c) = self.peek() {
            if !c.is_ascii_alphabetic() {
                break;
            }
            name.push(c);
            self.bump();
        }
        if name.is_empty() {
            match self.bump() {
                Some(c) => name.push(c),
                None => return TokenKind::Char('\\'),
            }
        }
        TokenKind::Command(name)
    }

    /// Lexes until the terminator for `mode`. `open` is where the construct
    /// started, for error reporting.
    fn run(&mut self, mode: Mode, open: Position) -> Result<Vec<Token>, ParseError> {
        let mut out = Vec::new();
        loop {
            let pos = self.pos();
            let Some(c) = self.peek() else {
                return match mode {
                    Mode::Text => Ok(out),
                    Mode::Group => Err(ParseError::UnbalancedGroup { pos: open }),
                    Mode::Math { .. } => Err(ParseError::UnbalancedMath { pos: open }),
                };
            };
            if !c.is_ascii() {
                return Err(ParseError::NonAscii { pos });
            }
            match c {
                '%' => self.skip_comment(),
                '\\' => {
                    self.bump();
                    let kind = self.command();
                    out.push(Token { kind, pos });
                }
                '{' => {
                    self.bump();
                    let inner = self.run(Mode::Group, pos)?;
                    out.push(Token {
                        kind: TokenKind::Group(inner),
                        pos,
                    });
                }
                '}' => {
                    if mode == Mode::Group {
                        self.bump();
                        return Ok(out);
                    }
                    if let Mode::Math { .. } = mode {
                        return Err(ParseError::UnbalancedMath { pos: open });
                    }
                    return Err(ParseError::UnbalancedGroup { pos });
                }
                '$' => {
                    if let Mode::Math { display } = mode {
                        self.bump();
                        if display {
                            if self.peek() != Some('$') {
                                return Err(ParseError::UnbalancedMath { pos: open });
                            }
                            self.bump();
                        }
                        return Ok(out);
                    }
                    self.bump();
                    let display = self.peek() == Some('$');
                    if display {
                        self.bump();
                    }
                    let inner = self.run(Mode::Math { display }, pos)?;
                    out.push(Token {
                        kind: TokenKind::MathSpan {
                            verbatim: to_source(&inner),
                            display,
                            inner,
                        },
                        pos,
                    });
                }
                '\n' if matches!(mode, Mode::Math { .. }) && self.at_blank_line() => {
                    return Err(ParseError::UnbalancedMath { pos: open });
                }
                _ => {
                    self.bump();
                    out.push(Token {
                        kind: TokenKind::Char(c),
                        pos,
                    });
                }
            }
        }
    }
}

/// Splits ASCII source into tokens. `%` comments are dropped through the end
/// of their line.
pub fn tokenize(input: &str) -> Result<Vec<Token>, ParseError> {
    let mut lexer = Lexer {
        chars: input.chars().collect(),
        i: 0,
        line: 1,
        column: 1,
    };
    lexer.run(Mode::Text, Position::start())
}
