//! Decoding of string literal tokens, including the literal/hole structure
//! of formatted strings.

use super::lexer::Origin;
use super::token::{Span, Token};
use super::{ParseError, Phase};

/// One piece of a decoded string literal.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Piece {
    Text {
        value: String,
        span: Span,
    },
    Hole {
        /// Source text of the interpolated expression.
        expr: String,
        origin: Origin,
        conversion: Option<char>,
        spec: Option<Vec<Piece>>,
        span: Span,
    },
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    idx: usize,
    line: u32,
    col: u32,
}

struct Cursor<'a> {
    body: &'a str,
    idx: usize,
    line: u32,
    col: u32,
    base: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.body[self.idx..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.body[self.idx..].chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.idx += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Pos {
        Pos {
            idx: self.idx,
            line: self.line,
            col: self.col,
        }
    }

    fn span_from(&self, start: Pos) -> Span {
        Span {
            line: start.line,
            col: start.col,
            offset: self.base + start.idx,
            len: self.idx - start.idx,
        }
    }

    fn origin(&self, at: Pos) -> Origin {
        Origin {
            offset: self.base + at.idx,
            line: at.line,
            col: at.col,
        }
    }
}

fn error(message: impl Into<String>, span: Span, lexeme: &str) -> ParseError {
    ParseError {
        message: message.into(),
        span,
        lexeme: lexeme.to_string(),
        phase: Phase::Parse,
    }
}

/// Split a string token into prefix flags and a cursor over its body.
fn open(token: &Token) -> (bool, bool, Cursor<'_>, usize) {
    let lexeme = token.lexeme.as_str();
    let quote_at = lexeme.find(['"', '\'']).expect("string token has a quote");
    let prefix = lexeme[..quote_at].to_ascii_lowercase();
    let quote = lexeme.as_bytes()[quote_at];
    let rest = &lexeme[quote_at..];
    let qlen = if rest.len() >= 6 && rest.as_bytes()[1] == quote && rest.as_bytes()[2] == quote {
        3
    } else {
        1
    };
    let body = &lexeme[quote_at + qlen..lexeme.len() - qlen];
    let cursor = Cursor {
        body,
        idx: 0,
        line: token.span.line,
        col: token.span.col + (quote_at + qlen) as u32,
        base: token.span.offset + quote_at + qlen,
    };
    (prefix.contains('f'), prefix.contains('r'), cursor, qlen)
}

/// Decode a token into pieces. Plain strings yield a single text piece.
pub(crate) fn decode(token: &Token) -> Result<(bool, Vec<Piece>), ParseError> {
    let (formatted, raw, mut cur, _) = open(token);
    let pieces = if formatted {
        let pieces = fstring_pieces(&mut cur, raw, token, false)?;
        if cur.peek().is_some() {
            return Err(error(
                "f-string: single '}' is not allowed",
                cur.span_from(cur.pos()),
                &token.lexeme,
            ));
        }
        pieces
    } else {
        let start = cur.pos();
        let mut value = String::new();
        while cur.peek().is_some() {
            escape_or_char(&mut cur, raw, &mut value, token)?;
        }
        vec![Piece::Text {
            value,
            span: cur.span_from(start),
        }]
    };
    Ok((formatted, pieces))
}

/// Consume one character, or one escape sequence, into `out`.
fn escape_or_char(cur: &mut Cursor, raw: bool, out: &mut String, token: &Token) -> Result<(), ParseError> {
    let start = cur.pos();
    let c = cur.bump().unwrap();
    if c != '\\' {
        out.push(c);
        return Ok(());
    }
    let Some(next) = cur.bump() else {
        out.push('\\');
        return Ok(());
    };
    if raw {
        out.push('\\');
        out.push(next);
        return Ok(());
    }
    let bad = |cur: &Cursor, what: &str| error(format!("invalid {what} escape"), cur.span_from(start), &token.lexeme);
    match next {
        '\n' => {}
        '\\' => out.push('\\'),
        '\'' => out.push('\''),
        '"' => out.push('"'),
        'a' => out.push('\x07'),
        'b' => out.push('\x08'),
        'f' => out.push('\x0c'),
        'n' => out.push('\n'),
        'r' => out.push('\r'),
        't' => out.push('\t'),
        'v' => out.push('\x0b'),
        '0'..='7' => {
            let mut value = next.to_digit(8).unwrap();
            for _ in 0..2 {
                match cur.peek().and_then(|d| d.to_digit(8)) {
                    Some(d) => {
                        value = value * 8 + d;
                        cur.bump();
                    }
                    None => break,
                }
            }
            out.push(char::from_u32(value).ok_or_else(|| bad(cur, "octal"))?);
        }
        'x' | 'u' | 'U' => {
            let width = match next {
                'x' => 2,
                'u' => 4,
                _ => 8,
            };
            let mut value = 0u32;
            for _ in 0..width {
                let d = cur.peek().and_then(|d| d.to_digit(16)).ok_or_else(|| bad(cur, "hex"))?;
                cur.bump();
                value = value * 16 + d;
            }
            out.push(char::from_u32(value).ok_or_else(|| bad(cur, "unicode"))?);
        }
        'N' => {
            return Err(error(
                "named unicode escapes are not supported",
                cur.span_from(start),
                &token.lexeme,
            ))
        }
        other => {
            out.push('\\');
            out.push(other);
        }
    }
    Ok(())
}

/// Parse the literal/hole structure of a formatted string body (or of a
/// format spec, when `in_spec` is set, which stops at the closing brace).
fn fstring_pieces(cur: &mut Cursor, raw: bool, token: &Token, in_spec: bool) -> Result<Vec<Piece>, ParseError> {
    let mut pieces = Vec::new();
    let mut text = String::new();
    let mut text_start = cur.pos();
    let flush = |pieces: &mut Vec<Piece>, text: &mut String, cur: &Cursor, start: Pos| {
        if !text.is_empty() {
            pieces.push(Piece::Text {
                value: std::mem::take(text),
                span: cur.span_from(start),
            });
        }
    };
    while let Some(c) = cur.peek() {
        match c {
            '{' if cur.peek_at(1) == Some('{') && !in_spec => {
                cur.bump();
                cur.bump();
                text.push('{');
            }
            '}' if cur.peek_at(1) == Some('}') && !in_spec => {
                cur.bump();
                cur.bump();
                text.push('}');
            }
            '}' => {
                if in_spec {
                    break;
                }
                return Err(error(
                    "f-string: single '}' is not allowed",
                    cur.span_from(cur.pos()).to_offset(cur.base + cur.idx + 1),
                    &token.lexeme,
                ));
            }
            '{' => {
                flush(&mut pieces, &mut text, cur, text_start);
                pieces.push(hole(cur, raw, token)?);
                text_start = cur.pos();
            }
            _ => escape_or_char(cur, raw, &mut text, token)?,
        }
    }
    flush(&mut pieces, &mut text, cur, text_start);
    Ok(pieces)
}

fn hole(cur: &mut Cursor, raw: bool, token: &Token) -> Result<Piece, ParseError> {
    let open = cur.pos();
    cur.bump();
    let expr_start = cur.pos();
    let mut depth = 0usize;
    let mut quote: Option<char> = None;
    loop {
        let Some(c) = cur.peek() else {
            return Err(error("f-string: expecting '}'", cur.span_from(open), &token.lexeme));
        };
        if let Some(q) = quote {
            cur.bump();
            if c == q {
                quote = None;
            }
            continue;
        }
        match c {
            '\'' | '"' => quote = Some(c),
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' if depth > 0 => depth -= 1,
            '}' | ':' if depth == 0 => break,
            '!' if depth == 0 && cur.peek_at(1) != Some('=') => break,
            _ => {}
        }
        cur.bump();
    }
    let expr = cur.body[expr_start.idx..cur.idx].to_string();
    if expr.trim().is_empty() {
        return Err(error(
            "f-string: empty expression not allowed",
            cur.span_from(open),
            &token.lexeme,
        ));
    }
    let trimmed = expr.trim_end();
    if trimmed.ends_with('=') && !trimmed.ends_with("==") && !trimmed[..trimmed.len() - 1].ends_with(['!', '<', '>']) {
        return Err(error(
            "f-string: self-documenting expressions are not supported",
            cur.span_from(open),
            &token.lexeme,
        ));
    }
    let origin = cur.origin(expr_start);
    let mut conversion = None;
    if cur.peek() == Some('!') {
        cur.bump();
        match cur.bump() {
            Some(c @ ('r' | 's' | 'a')) => conversion = Some(c),
            _ => {
                return Err(error(
                    "f-string: invalid conversion character: expected 's', 'r', or 'a'",
                    cur.span_from(open),
                    &token.lexeme,
                ))
            }
        }
    }
    let mut spec = None;
    if cur.peek() == Some(':') {
        cur.bump();
        spec = Some(fstring_pieces(cur, raw, token, true)?);
    }
    if cur.peek() != Some('}') {
        return Err(error("f-string: expecting '}'", cur.span_from(open), &token.lexeme));
    }
    cur.bump();
    Ok(Piece::Hole {
        expr,
        origin,
        conversion,
        spec,
        span: cur.span_from(open),
    })
}
