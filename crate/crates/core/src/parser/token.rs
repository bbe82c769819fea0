use std::fmt;

use serde::{Deserialize, Serialize};

/// Location of a token or node in the source text.
///
/// `line` and `col` are 1-based; `col` counts characters, `offset` and `len`
/// count bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Span {
    pub line: u32,
    pub col: u32,
    pub offset: usize,
    pub len: usize,
}

impl Span {
    pub fn end(&self) -> usize {
        self.offset + self.len
    }

    /// Span starting at `self` and extending to `end_offset`.
    pub fn to_offset(self, end_offset: usize) -> Span {
        Span {
            len: end_offset.saturating_sub(self.offset),
            ..self
        }
    }

    pub fn to(self, other: Span) -> Span {
        self.to_offset(other.end().max(self.end()))
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.offset <= other.offset && other.end() <= self.end()
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TokenKind {
    Keyword,
    Identifier,
    Number,
    String,
    /// A complete formatted-string literal; holes are split out by the parser.
    FString,
    Operator,
    Delimiter,
    Indent,
    Dedent,
    Newline,
    Comment,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub span: Span,
}

impl Token {
    pub fn is(&self, kind: TokenKind, lexeme: &str) -> bool {
        self.kind == kind && self.lexeme == lexeme
    }

    /// Layout tokens carry no source content of their own.
    pub fn is_layout(&self) -> bool {
        matches!(self.kind, TokenKind::Indent | TokenKind::Dedent | TokenKind::Newline)
    }
}

pub const KEYWORDS: &[&str] = &[
    "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class", "continue", "def", "del",
    "elif", "else", "except", "finally", "for", "from", "global", "if", "import", "in", "is", "lambda", "nonlocal",
    "not", "or", "pass", "raise", "return", "try", "while", "with", "yield",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}
