//! Converts source text into tokens, turning leading whitespace into
//! indent/dedent tokens the way the host language does.

use super::token::{is_keyword, Span, Token, TokenKind};
use super::{ParseError, Phase};

const OPERATORS: &[&str] = &[
    "**=", "//=", ">>=", "<<=", "->", "**", "//", "<<", ">>", "<=", ">=", "==", "!=", "+=", "-=", "*=", "/=", "%=",
    "&=", "|=", "^=", "@=", ":=", "+", "-", "*", "/", "%", "@", "&", "|", "^", "~", "<", ">", "=", "(", ")", "[", "]",
    "{", "}", ",", ":", ".", ";",
];

const DELIMITERS: &[&str] = &["(", ")", "[", "]", "{", "}", ",", ":", ".", ";", "->"];

/// Tokenize a whole program.
pub fn tokenize_source(text: &str) -> Result<Vec<Token>, ParseError> {
    Lexer::new(text, Origin::default(), false).run()
}

/// Where a piece of text sits inside the enclosing source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Origin {
    pub offset: usize,
    pub line: u32,
    pub col: u32,
}

impl Default for Origin {
    fn default() -> Self {
        Origin {
            offset: 0,
            line: 1,
            col: 1,
        }
    }
}

/// Tokenize an expression embedded in a larger source (a format-string hole).
/// Layout is ignored, as inside brackets.
pub(crate) fn tokenize_embedded(text: &str, origin: Origin) -> Result<Vec<Token>, ParseError> {
    Lexer::new(text, origin, true).run()
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    col: u32,
    base: usize,
    embedded: bool,
    indents: Vec<usize>,
    depth: usize,
    tokens: Vec<Token>,
    line_has_content: bool,
}

fn lex_error(message: impl Into<String>, span: Span, lexeme: impl Into<String>) -> ParseError {
    ParseError {
        message: message.into(),
        span,
        lexeme: lexeme.into(),
        phase: Phase::Lex,
    }
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str, origin: Origin, embedded: bool) -> Self {
        Lexer {
            src,
            pos: 0,
            line: origin.line,
            col: origin.col,
            base: origin.offset,
            embedded,
            indents: vec![0],
            depth: 0,
            tokens: Vec::new(),
            line_has_content: false,
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn here(&self) -> Span {
        Span {
            line: self.line,
            col: self.col,
            offset: self.base + self.pos,
            len: 0,
        }
    }

    fn push(&mut self, kind: TokenKind, start: Span, start_pos: usize) {
        let lexeme = self.src[start_pos..self.pos].to_string();
        let span = start.to_offset(self.base + self.pos);
        if !matches!(kind, TokenKind::Comment) && !matches!(kind, TokenKind::Newline) {
            self.line_has_content = true;
        }
        self.tokens.push(Token { kind, lexeme, span });
    }

    fn in_brackets(&self) -> bool {
        self.embedded || self.depth > 0
    }

    fn run(mut self) -> Result<Vec<Token>, ParseError> {
        let mut at_line_start = !self.embedded;
        while self.pos < self.src.len() {
            if at_line_start {
                at_line_start = self.indentation()?;
                if at_line_start {
                    continue;
                }
            }
            let c = self.peek().unwrap();
            match c {
                ' ' | '\t' | '\x0c' => {
                    self.bump();
                }
                '\r' if self.peek_at(1) == Some('\n') => {
                    self.bump();
                }
                '\n' | '\r' => {
                    let start = self.here();
                    let start_pos = self.pos;
                    self.bump();
                    if !self.in_brackets() {
                        self.push(TokenKind::Newline, start, start_pos);
                        self.line_has_content = false;
                        at_line_start = true;
                    }
                }
                '\\' => {
                    let start = self.here();
                    self.bump();
                    match self.peek() {
                        Some('\n') => {
                            self.bump();
                        }
                        Some('\r') if self.peek_at(1) == Some('\n') => {
                            self.bump();
                            self.bump();
                        }
                        _ => {
                            return Err(lex_error(
                                "unexpected character after line continuation character",
                                start.to_offset(self.base + self.pos),
                                "\\",
                            ))
                        }
                    }
                }
                '#' => self.comment(),
                '"' | '\'' => self.string(self.here(), self.pos, false)?,
                c if c.is_ascii_digit() => self.number()?,
                '.' if self.peek_at(1).is_some_and(|d| d.is_ascii_digit()) => self.number()?,
                c if c == '_' || c.is_alphabetic() => self.word()?,
                _ => self.operator()?,
            }
        }
        if !self.embedded {
            let end = self.here();
            if self.line_has_content {
                self.tokens.push(Token {
                    kind: TokenKind::Newline,
                    lexeme: String::new(),
                    span: end,
                });
            }
            while self.indents.len() > 1 {
                self.indents.pop();
                self.tokens.push(Token {
                    kind: TokenKind::Dedent,
                    lexeme: String::new(),
                    span: end,
                });
            }
        }
        Ok(self.tokens)
    }

    /// Handle leading whitespace of a physical line. Returns true when the
    /// line was blank or comment-only and has been consumed entirely.
    fn indentation(&mut self) -> Result<bool, ParseError> {
        let start = self.here();
        let start_pos = self.pos;
        let mut width = 0usize;
        while let Some(c) = self.peek() {
            match c {
                ' ' => width += 1,
                '\t' => {
                    let span = self.here();
                    return Err(lex_error(
                        "tab character in indentation",
                        span.to_offset(span.offset + 1),
                        "\t",
                    ));
                }
                '\x0c' => width = 0,
                _ => break,
            }
            self.bump();
        }
        match self.peek() {
            None => return Ok(true),
            Some('#') => {
                self.comment();
                self.newline_after_blank();
                return Ok(true);
            }
            Some('\n') | Some('\r') => {
                self.newline_after_blank();
                return Ok(true);
            }
            _ => {}
        }
        let current = *self.indents.last().unwrap();
        if width > current {
            self.indents.push(width);
            self.push(TokenKind::Indent, start, start_pos);
            self.line_has_content = false;
        } else if width < current {
            while width < *self.indents.last().unwrap() {
                self.indents.pop();
                self.tokens.push(Token {
                    kind: TokenKind::Dedent,
                    lexeme: String::new(),
                    span: self.here(),
                });
            }
            if width != *self.indents.last().unwrap() {
                let span = self.here();
                return Err(lex_error(
                    "unindent does not match any outer indentation level",
                    start.to_offset(span.offset),
                    &self.src[start_pos..self.pos],
                ));
            }
        }
        Ok(false)
    }

    fn newline_after_blank(&mut self) {
        if self.peek() == Some('\r') {
            self.bump();
        }
        if self.peek() == Some('\n') {
            self.bump();
        }
    }

    fn comment(&mut self) {
        let start = self.here();
        let start_pos = self.pos;
        while let Some(c) = self.peek() {
            if c == '\n' || c == '\r' {
                break;
            }
            self.bump();
        }
        self.push(TokenKind::Comment, start, start_pos);
    }

    fn word(&mut self) -> Result<(), ParseError> {
        let start = self.here();
        let start_pos = self.pos;
        while let Some(c) = self.peek() {
            if c == '_' || c.is_alphanumeric() {
                self.bump();
            } else {
                break;
            }
        }
        let word = &self.src[start_pos..self.pos];
        if matches!(self.peek(), Some('"') | Some('\'')) {
            let prefix = word.to_ascii_lowercase();
            match prefix.as_str() {
                "r" | "u" | "f" | "rf" | "fr" => return self.string(start, start_pos, true),
                "b" | "br" | "rb" => {
                    return Err(lex_error(
                        "bytes literals are not supported",
                        start.to_offset(self.base + self.pos),
                        word,
                    ))
                }
                _ => {}
            }
        }
        let kind = if is_keyword(word) {
            TokenKind::Keyword
        } else {
            TokenKind::Identifier
        };
        self.push(kind, start, start_pos);
        Ok(())
    }

    fn number(&mut self) -> Result<(), ParseError> {
        let start = self.here();
        let start_pos = self.pos;
        let radix_prefix =
            self.peek() == Some('0') && matches!(self.peek_at(1), Some('x' | 'X' | 'o' | 'O' | 'b' | 'B'));
        if radix_prefix {
            self.bump();
            self.bump();
            while self.peek().is_some_and(|c| c.is_ascii_hexdigit() || c == '_') {
                self.bump();
            }
        } else {
            self.digits();
            if self.peek() == Some('.') {
                self.bump();
                self.digits();
            }
            if matches!(self.peek(), Some('e' | 'E')) {
                let sign = matches!(self.peek_at(1), Some('+' | '-'));
                let digit_at = if sign { 2 } else { 1 };
                if self.peek_at(digit_at).is_some_and(|c| c.is_ascii_digit()) {
                    self.bump();
                    if sign {
                        self.bump();
                    }
                    self.digits();
                }
            }
        }
        if let Some(c) = self.peek() {
            if c == '_' || c.is_alphanumeric() {
                let end = self.pos + c.len_utf8();
                let message = if c == 'j' || c == 'J' {
                    "imaginary literals are not supported"
                } else {
                    "invalid numeric literal"
                };
                return Err(lex_error(
                    message,
                    start.to_offset(self.base + end),
                    &self.src[start_pos..end],
                ));
            }
        }
        self.push(TokenKind::Number, start, start_pos);
        Ok(())
    }

    fn digits(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '_') {
            self.bump();
        }
    }

    /// Lex a string literal. `start`/`start_pos` include any prefix already
    /// consumed.
    fn string(&mut self, start: Span, start_pos: usize, prefixed: bool) -> Result<(), ParseError> {
        let prefix = self.src[start_pos..self.pos].to_ascii_lowercase();
        let formatted = prefixed && prefix.contains('f');
        let quote = self.bump().unwrap();
        let triple = self.peek() == Some(quote) && self.peek_at(1) == Some(quote);
        if triple {
            self.bump();
            self.bump();
        }
        let unterminated = |lexer: &Self| {
            lex_error(
                "unterminated string literal",
                start.to_offset(lexer.base + lexer.pos),
                &lexer.src[start_pos..lexer.pos],
            )
        };
        // Brace depth and nested quote for format-string holes.
        let mut depth = 0usize;
        let mut nested: Option<char> = None;
        loop {
            let Some(c) = self.peek() else {
                return Err(unterminated(self));
            };
            if let Some(q) = nested {
                if c == '\n' && !triple {
                    return Err(unterminated(self));
                }
                self.bump();
                if c == q {
                    nested = None;
                }
                continue;
            }
            if c == '\\' {
                self.bump();
                if self.peek().is_some() {
                    self.bump();
                }
                continue;
            }
            if (c == '\n' || c == '\r') && !triple {
                return Err(unterminated(self));
            }
            if formatted {
                if c == '{' {
                    if depth == 0 && self.peek_at(1) == Some('{') {
                        self.bump();
                        self.bump();
                        continue;
                    }
                    depth += 1;
                    self.bump();
                    continue;
                }
                if c == '}' && depth > 0 {
                    depth -= 1;
                    self.bump();
                    continue;
                }
                if depth > 0 && (c == '"' || c == '\'') && c != quote {
                    nested = Some(c);
                    self.bump();
                    continue;
                }
            }
            if c == quote {
                if !triple {
                    self.bump();
                    break;
                }
                if self.peek_at(1) == Some(quote) && self.peek_at(2) == Some(quote) {
                    self.bump();
                    self.bump();
                    self.bump();
                    break;
                }
            }
            self.bump();
        }
        let kind = if formatted {
            TokenKind::FString
        } else {
            TokenKind::String
        };
        self.push(kind, start, start_pos);
        Ok(())
    }

    fn operator(&mut self) -> Result<(), ParseError> {
        let start = self.here();
        let start_pos = self.pos;
        let rest = &self.src[self.pos..];
        let Some(op) = OPERATORS.iter().find(|op| rest.starts_with(**op)) else {
            let c = self.peek().unwrap();
            return Err(lex_error(
                format!("illegal character {c:?}"),
                start.to_offset(self.base + self.pos + c.len_utf8()),
                c.to_string(),
            ));
        };
        for _ in 0..op.len() {
            self.bump();
        }
        // Bracket balance is checked by the parser; the lexer only needs the
        // depth to decide whether newlines are significant.
        match *op {
            "(" | "[" | "{" => self.depth += 1,
            ")" | "]" | "}" => self.depth = self.depth.saturating_sub(1),
            _ => {}
        }
        let kind = if DELIMITERS.contains(op) {
            TokenKind::Delimiter
        } else {
            TokenKind::Operator
        };
        self.push(kind, start, start_pos);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<(TokenKind, String)> {
        tokenize_source(src)
            .unwrap()
            .into_iter()
            .map(|t| (t.kind, t.lexeme))
            .collect()
    }

    #[test]
    fn empty_input_has_no_tokens() {
        assert!(tokenize_source("").unwrap().is_empty());
    }

    #[test]
    fn simple_assignment() {
        use TokenKind::*;
        assert_eq!(
            kinds("x = 1"),
            vec![
                (Identifier, "x".into()),
                (Operator, "=".into()),
                (Number, "1".into()),
                (Newline, "".into()),
            ]
        );
    }

    #[test]
    fn malformed_header_still_lexes() {
        assert!(tokenize_source("def f(:").is_ok());
    }

    #[test]
    fn indent_and_dedent_balance() {
        let toks = tokenize_source("if a:\n    if b:\n        c\nd\n").unwrap();
        let indents = toks.iter().filter(|t| t.kind == TokenKind::Indent).count();
        let dedents = toks.iter().filter(|t| t.kind == TokenKind::Dedent).count();
        assert_eq!(indents, 2);
        assert_eq!(dedents, 2);
    }

    #[test]
    fn dedent_at_eof_without_newline() {
        let toks = tokenize_source("if a:\n    b").unwrap();
        let last: Vec<_> = toks.iter().rev().take(2).map(|t| t.kind).collect();
        assert_eq!(last, vec![TokenKind::Dedent, TokenKind::Newline]);
    }

    #[test]
    fn blank_and_comment_lines_do_not_affect_layout() {
        use TokenKind::*;
        let toks = kinds("a\n\n    # note\nb\n");
        assert_eq!(
            toks,
            vec![
                (Identifier, "a".into()),
                (Newline, "\n".into()),
                (Comment, "# note".into()),
                (Identifier, "b".into()),
                (Newline, "\n".into()),
            ]
        );
    }

    #[test]
    fn newlines_inside_brackets_are_ignored() {
        let toks = tokenize_source("x = (1,\n     2)\n").unwrap();
        assert_eq!(toks.iter().filter(|t| t.kind == TokenKind::Newline).count(), 1);
        assert!(!toks.iter().any(|t| t.kind == TokenKind::Indent));
    }

    #[test]
    fn tabs_in_indentation_are_rejected() {
        let err = tokenize_source("if x:\n\ty = 1\n").unwrap_err();
        assert_eq!(err.phase, Phase::Lex);
        assert_eq!(err.span.line, 2);
        assert_eq!(err.span.col, 1);
    }

    #[test]
    fn inconsistent_dedent_is_rejected() {
        let err = tokenize_source("if a:\n        b = 1\n    c = 2\n").unwrap_err();
        assert_eq!(err.phase, Phase::Lex);
        assert_eq!(err.span.line, 3);
        assert!(err.message.contains("unindent"));
    }

    #[test]
    fn unterminated_string_is_rejected() {
        let err = tokenize_source("x = \"abc\n").unwrap_err();
        assert_eq!(err.phase, Phase::Lex);
        assert_eq!((err.span.line, err.span.col), (1, 5));
    }

    #[test]
    fn illegal_character_is_rejected() {
        let err = tokenize_source("x = 1 $ 2").unwrap_err();
        assert_eq!(err.lexeme, "$");
        assert_eq!(err.span.col, 7);
    }

    #[test]
    fn string_prefixes_and_fstrings() {
        use TokenKind::*;
        let toks = kinds(r#"a = f"{d['k']} x" r'\d' "plain""#);
        assert_eq!(toks[2], (FString, r#"f"{d['k']} x""#.into()));
        assert_eq!(toks[3], (String, r"r'\d'".into()));
        assert_eq!(toks[4], (String, r#""plain""#.into()));
    }

    #[test]
    fn triple_quoted_strings_span_lines() {
        let toks = tokenize_source("s = \"\"\"a\nb\"\"\"\nt = 1\n").unwrap();
        assert_eq!(toks[2].kind, TokenKind::String);
        assert_eq!(toks[4].span.line, 3);
    }

    #[test]
    fn columns_count_characters() {
        let toks = tokenize_source("é = 'ü' + x").unwrap();
        let x = toks.iter().find(|t| t.lexeme == "x").unwrap();
        assert_eq!(x.span.col, 11);
        assert_eq!(x.span.offset, 12);
    }

    #[test]
    fn keywords_are_classified() {
        let toks = tokenize_source("for i in range(3): pass").unwrap();
        assert_eq!(toks[0].kind, TokenKind::Keyword);
        assert_eq!(toks[2].kind, TokenKind::Keyword);
        assert_eq!(toks[3].kind, TokenKind::Identifier);
    }
}
