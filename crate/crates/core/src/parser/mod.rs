//! Lexing and parsing of VPLang, the indentation-based scripting subset used
//! by visual programs.

mod ast;
mod dump;
mod grammar;
mod lexer;
mod strings;
mod token;

use std::fmt;
use std::path::PathBuf;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

pub use ast::{AstNode, Attr, Child, Field, NodeKind, Value, Walk, NODE_KIND_VERSION};
pub use dump::{dump_tree, python_float_repr, DumpFormat};
pub use lexer::tokenize_source;
pub use token::{is_keyword, Span, Token, TokenKind, KEYWORDS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Lex,
    Parse,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Lex => "lex",
            Phase::Parse => "parse",
        })
    }
}

/// First error found in a source file. Parsing never recovers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[serde(deny_unknown_fields)]
#[error("{phase} error at {span}: {message}")]
pub struct ParseError {
    pub message: String,
    pub span: Span,
    pub lexeme: String,
    pub phase: Phase,
}

/// One program file together with its corpus identity.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SourceProgram {
    pub path: Option<PathBuf>,
    pub dataset: Option<String>,
    pub text: String,
}

impl SourceProgram {
    pub fn from_text(text: impl Into<String>) -> Self {
        SourceProgram {
            text: text.into(),
            ..Default::default()
        }
    }
}

/// A parsed program. The root is always a `Module` node.
#[derive(Debug, Clone)]
pub struct SyntaxTree {
    root: AstNode,
    source: Arc<SourceProgram>,
    node_count: OnceLock<usize>,
}

impl SyntaxTree {
    pub fn root(&self) -> &AstNode {
        &self.root
    }

    pub fn source(&self) -> &SourceProgram {
        &self.source
    }

    pub fn text(&self) -> &str {
        &self.source.text
    }

    pub fn node_count(&self) -> usize {
        *self.node_count.get_or_init(|| self.root.walk().count())
    }

    /// Source text covered by `span`.
    pub fn slice(&self, span: Span) -> &str {
        self.source.text.get(span.offset..span.end()).unwrap_or("")
    }
}

impl PartialEq for SyntaxTree {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root
    }
}

/// Parse a program from text.
pub fn parse_program(text: &str) -> Result<SyntaxTree, ParseError> {
    parse_source(Arc::new(SourceProgram::from_text(text)))
}

/// Parse a program, keeping its corpus identity attached to the tree.
pub fn parse_source(source: Arc<SourceProgram>) -> Result<SyntaxTree, ParseError> {
    let text = source.text.as_str();
    let tokens = tokenize_source(text)?;
    let eof = eof_span(text);
    let root = grammar::Parser::new(text, tokens, eof).parse_module()?;
    Ok(SyntaxTree {
        root,
        source,
        node_count: OnceLock::new(),
    })
}

fn eof_span(text: &str) -> Span {
    let line = text.matches('\n').count() as u32 + 1;
    let last_line = text.rsplit('\n').next().unwrap_or("");
    Span {
        line,
        col: last_line.chars().count() as u32 + 1,
        offset: text.len(),
        len: 0,
    }
}
