//! Recursive-descent parser from tokens to [`AstNode`]s.
//!
//! Every composite node spans from its first token to the end of its last
//! consumed token, so parent spans always contain child spans.

use super::ast::{AstNode, Field, NodeKind, Value};
use super::lexer::tokenize_embedded;
use super::strings::{self, Piece};
use super::token::{Span, Token, TokenKind};
use super::{ParseError, Phase};

type PResult<T> = Result<T, ParseError>;

const AUG_OPS: &[&str] = &[
    "+=", "-=", "*=", "/=", "//=", "%=", "**=", "@=", "&=", "|=", "^=", "<<=", ">>=",
];

const UNSUPPORTED_STATEMENTS: &[&str] = &[
    "class", "with", "try", "except", "finally", "raise", "assert", "del", "global", "nonlocal", "async", "yield",
    "lambda", "await",
];

pub(crate) struct Parser<'a> {
    src: &'a str,
    tokens: Vec<Token>,
    pos: usize,
    prev_end: usize,
    eof: Span,
}

impl<'a> Parser<'a> {
    /// `tokens` may contain comments; they are dropped here.
    pub(crate) fn new(src: &'a str, tokens: Vec<Token>, eof: Span) -> Self {
        let tokens: Vec<Token> = tokens.into_iter().filter(|t| t.kind != TokenKind::Comment).collect();
        Parser {
            src,
            tokens,
            pos: 0,
            prev_end: eof.offset,
            eof,
        }
    }

    // ----- token helpers -------------------------------------------------

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_nth(&self, n: usize) -> Option<&Token> {
        self.tokens.get(self.pos + n)
    }

    fn span(&self) -> Span {
        self.peek().map(|t| t.span).unwrap_or(self.eof)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn at_kind(&self, kind: TokenKind) -> bool {
        self.peek().is_some_and(|t| t.kind == kind)
    }

    fn at_op(&self, op: &str) -> bool {
        self.peek()
            .is_some_and(|t| matches!(t.kind, TokenKind::Operator | TokenKind::Delimiter) && t.lexeme == op)
    }

    fn at_kw(&self, kw: &str) -> bool {
        self.peek().is_some_and(|t| t.is(TokenKind::Keyword, kw))
    }

    /// Consume the current token. The parser never rewinds, so the token
    /// is moved out rather than copied.
    fn advance(&mut self) -> Token {
        let slot = &mut self.tokens[self.pos];
        let tok = Token {
            kind: slot.kind,
            lexeme: std::mem::take(&mut slot.lexeme),
            span: slot.span,
        };
        self.pos += 1;
        if !tok.is_layout() {
            self.prev_end = tok.span.end();
        }
        tok
    }

    fn eat_op(&mut self, op: &str) -> bool {
        if self.at_op(op) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        match self.peek() {
            Some(t) => ParseError {
                message: message.into(),
                span: t.span,
                lexeme: t.lexeme.clone(),
                phase: Phase::Parse,
            },
            None => ParseError {
                message: message.into(),
                span: self.eof,
                lexeme: String::new(),
                phase: Phase::Parse,
            },
        }
    }

    fn error_at(&self, span: Span, message: impl Into<String>) -> ParseError {
        let lexeme = self.src.get(span.offset..span.end()).unwrap_or_default().to_string();
        ParseError {
            message: message.into(),
            span,
            lexeme,
            phase: Phase::Parse,
        }
    }

    fn describe_current(&self) -> String {
        match self.peek() {
            None => "end of input".to_string(),
            Some(t) => match t.kind {
                TokenKind::Newline => "end of line".to_string(),
                TokenKind::Indent => "indent".to_string(),
                TokenKind::Dedent => "dedent".to_string(),
                _ => format!("'{}'", t.lexeme),
            },
        }
    }

    fn expect_op(&mut self, op: &str) -> PResult<Token> {
        if self.at_op(op) {
            Ok(self.advance())
        } else {
            Err(self.error_here(format!("expected '{op}', found {}", self.describe_current())))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<Token> {
        if self.at_kw(kw) {
            Ok(self.advance())
        } else {
            Err(self.error_here(format!("expected '{kw}', found {}", self.describe_current())))
        }
    }

    fn expect_name(&mut self, what: &str) -> PResult<Token> {
        if self.at_kind(TokenKind::Identifier) {
            Ok(self.advance())
        } else {
            Err(self.error_here(format!("expected {what}, found {}", self.describe_current())))
        }
    }

    fn expect_newline(&mut self) -> PResult<()> {
        if self.at_end() {
            return Ok(());
        }
        if self.at_kind(TokenKind::Newline) {
            self.advance();
            Ok(())
        } else {
            Err(self.error_here(format!("expected end of statement, found {}", self.describe_current())))
        }
    }

    fn finish(&self, start: Span) -> Span {
        start.to_offset(self.prev_end.max(start.offset))
    }

    // ----- statements ----------------------------------------------------

    pub(crate) fn parse_module(&mut self) -> PResult<AstNode> {
        let mut module = AstNode::new(
            NodeKind::Module,
            Span {
                line: 1,
                col: 1,
                offset: 0,
                len: self.src.len(),
            },
        );
        let mut body = Vec::new();
        while !self.at_end() {
            if self.at_kind(TokenKind::Indent) {
                return Err(self.error_here("unexpected indent"));
            }
            if self.at_kind(TokenKind::Newline) {
                self.advance();
                continue;
            }
            self.statement(&mut body)?;
        }
        for stmt in body {
            module.push_child(Field::Body, stmt);
        }
        Ok(module)
    }

    fn statement(&mut self, out: &mut Vec<AstNode>) -> PResult<()> {
        if let Some(tok) = self.peek() {
            if tok.kind == TokenKind::Keyword {
                match tok.lexeme.as_str() {
                    "def" => return self.function_def().map(|n| out.push(n)),
                    "if" => return self.if_statement().map(|n| out.push(n)),
                    "for" => return self.for_statement().map(|n| out.push(n)),
                    "while" => return self.while_statement().map(|n| out.push(n)),
                    _ => {}
                }
            }
            if tok.kind == TokenKind::Dedent {
                return Err(self.error_here("unexpected dedent"));
            }
        }
        self.simple_statements(out)
    }

    fn simple_statements(&mut self, out: &mut Vec<AstNode>) -> PResult<()> {
        loop {
            if let Some(node) = self.small_statement()? {
                out.push(node);
            }
            if self.eat_op(";") {
                if self.at_kind(TokenKind::Newline) || self.at_end() {
                    break;
                }
            } else {
                break;
            }
        }
        self.expect_newline()
    }

    fn small_statement(&mut self) -> PResult<Option<AstNode>> {
        let start = self.span();
        let Some(tok) = self.peek() else {
            return Err(self.error_here("expected a statement"));
        };
        if tok.kind == TokenKind::Keyword {
            match tok.lexeme.as_str() {
                "pass" => {
                    self.advance();
                    return Ok(Some(AstNode::new(NodeKind::Pass, start)));
                }
                "break" => {
                    self.advance();
                    return Ok(Some(AstNode::new(NodeKind::Break, start)));
                }
                "continue" => {
                    self.advance();
                    return Ok(Some(AstNode::new(NodeKind::Continue, start)));
                }
                "return" => {
                    self.advance();
                    let mut node = AstNode::new(NodeKind::Return, start);
                    if self.starts_expression() {
                        node.push_child(Field::Value, self.test_list()?);
                    }
                    node.span = self.finish(start);
                    return Ok(Some(node));
                }
                "import" | "from" => {
                    self.import_statement()?;
                    return Ok(None);
                }
                kw if UNSUPPORTED_STATEMENTS.contains(&kw) => {
                    return Err(self.error_here(format!("unsupported construct '{kw}'")));
                }
                _ => {}
            }
        }
        self.expression_statement().map(Some)
    }

    /// Imports are accepted and dropped: they carry no analyzable structure.
    fn import_statement(&mut self) -> PResult<()> {
        let kw = self.advance();
        if kw.lexeme == "from" {
            while self.eat_op(".") {}
            if !self.at_kw("import") {
                self.dotted_name()?;
            }
            self.expect_kw("import")?;
            if self.eat_op("*") {
                return Ok(());
            }
            let parens = self.eat_op("(");
            self.import_names(false)?;
            if parens {
                self.expect_op(")")?;
            }
        } else {
            self.import_names(true)?;
        }
        Ok(())
    }

    fn import_names(&mut self, dotted: bool) -> PResult<()> {
        loop {
            if dotted {
                self.dotted_name()?;
            } else {
                self.expect_name("imported name")?;
            }
            if self.at_kw("as") {
                self.advance();
                self.expect_name("alias")?;
            }
            if !self.eat_op(",") || self.at_op(")") {
                return Ok(());
            }
        }
    }

    fn dotted_name(&mut self) -> PResult<()> {
        self.expect_name("module name")?;
        while self.eat_op(".") {
            self.expect_name("module name")?;
        }
        Ok(())
    }

    fn expression_statement(&mut self) -> PResult<AstNode> {
        let start = self.span();
        let first = self.test_list()?;
        if self.at_op("=") {
            let mut items = vec![first];
            while self.eat_op("=") {
                items.push(self.test_list()?);
            }
            let value = items.pop().unwrap();
            let mut node = AstNode::new(NodeKind::Assign, start);
            for target in items {
                self.check_target(&target)?;
                node.push_child(Field::Targets, target);
            }
            node.push_child(Field::Value, value);
            node.span = self.finish(start);
            return Ok(node);
        }
        if let Some(op) = self
            .peek()
            .filter(|t| t.kind == TokenKind::Operator && AUG_OPS.contains(&t.lexeme.as_str()))
            .map(|t| t.lexeme.trim_end_matches('=').to_string())
        {
            if !matches!(first.kind, NodeKind::Name | NodeKind::Attribute | NodeKind::Subscript) {
                return Err(self.error_at(
                    first.span,
                    format!("illegal target for augmented assignment: {}", first.kind),
                ));
            }
            self.advance();
            let value = self.test_list()?;
            let node = AstNode::new(NodeKind::AugAssign, start)
                .with_attr(Field::Op, Value::Text(op))
                .with_child(Field::Target, first)
                .with_child(Field::Value, value);
            return Ok(AstNode {
                span: self.finish(start),
                ..node
            });
        }
        if self.at_op(":") {
            return Err(self.error_here("annotated assignments are not supported"));
        }
        if self.at_op(":=") {
            return Err(self.error_here("assignment expressions are not supported"));
        }
        Ok(AstNode::new(NodeKind::ExprStmt, self.finish(start)).with_child(Field::Value, first))
    }

    fn check_target(&self, node: &AstNode) -> PResult<()> {
        match node.kind {
            NodeKind::Name | NodeKind::Attribute | NodeKind::Subscript => Ok(()),
            NodeKind::Tuple | NodeKind::List => node.child_nodes().try_for_each(|c| self.check_target(c)),
            kind => Err(self.error_at(node.span, format!("cannot assign to {kind}"))),
        }
    }

    fn block(&mut self) -> PResult<Vec<AstNode>> {
        self.expect_op(":")?;
        let mut body = Vec::new();
        if !self.at_kind(TokenKind::Newline) {
            self.simple_statements(&mut body)?;
            return Ok(body);
        }
        self.advance();
        if !self.at_kind(TokenKind::Indent) {
            return Err(self.error_here("expected an indented block"));
        }
        self.advance();
        while !self.at_kind(TokenKind::Dedent) && !self.at_end() {
            self.statement(&mut body)?;
        }
        if self.at_kind(TokenKind::Dedent) {
            self.advance();
        }
        Ok(body)
    }

    fn function_def(&mut self) -> PResult<AstNode> {
        let start = self.advance().span;
        let name = self.expect_name("function name")?;
        let mut node = AstNode::new(NodeKind::FunctionDef, start).with_attr(Field::Name, Value::Text(name.lexeme));
        self.expect_op("(")?;
        let mut seen_default = false;
        while !self.at_op(")") {
            if self.at_op("*") || self.at_op("**") || self.at_op("/") {
                return Err(self.error_here("only positional parameters are supported"));
            }
            let pname = self.expect_name("parameter name")?;
            let mut param =
                AstNode::new(NodeKind::Parameter, pname.span).with_attr(Field::Arg, Value::Text(pname.lexeme));
            if self.eat_op(":") {
                param.push_child(Field::Annotation, self.test()?);
            }
            if self.eat_op("=") {
                param.push_child(Field::Default, self.test()?);
                seen_default = true;
            } else if seen_default {
                return Err(self.error_at(param.span, "non-default argument follows default argument"));
            }
            param.span = self.finish(pname.span);
            node.push_child(Field::Args, param);
            if !self.eat_op(",") {
                break;
            }
        }
        self.expect_op(")")?;
        let returns = if self.eat_op("->") { Some(self.test()?) } else { None };
        for stmt in self.block()? {
            node.push_child(Field::Body, stmt);
        }
        if let Some(r) = returns {
            node.push_child(Field::Returns, r);
        }
        node.span = self.finish(start);
        Ok(node)
    }

    fn if_statement(&mut self) -> PResult<AstNode> {
        let start = self.advance().span;
        let test = self.test()?;
        let mut node = AstNode::new(NodeKind::If, start).with_child(Field::Test, test);
        for stmt in self.block()? {
            node.push_child(Field::Body, stmt);
        }
        if self.at_kw("elif") {
            let nested = self.if_statement()?;
            node.push_child(Field::Orelse, nested);
        } else if self.at_kw("else") {
            self.advance();
            for stmt in self.block()? {
                node.push_child(Field::Orelse, stmt);
            }
        }
        node.span = self.finish(start);
        Ok(node)
    }

    fn for_statement(&mut self) -> PResult<AstNode> {
        let start = self.advance().span;
        let target = self.target_list()?;
        self.check_target(&target)?;
        self.expect_kw("in")?;
        let iter = self.test_list()?;
        let mut node = AstNode::new(NodeKind::For, start)
            .with_child(Field::Target, target)
            .with_child(Field::Iter, iter);
        for stmt in self.block()? {
            node.push_child(Field::Body, stmt);
        }
        self.loop_else(&mut node)?;
        node.span = self.finish(start);
        Ok(node)
    }

    fn while_statement(&mut self) -> PResult<AstNode> {
        let start = self.advance().span;
        let test = self.test()?;
        let mut node = AstNode::new(NodeKind::While, start).with_child(Field::Test, test);
        for stmt in self.block()? {
            node.push_child(Field::Body, stmt);
        }
        self.loop_else(&mut node)?;
        node.span = self.finish(start);
        Ok(node)
    }

    fn loop_else(&mut self, node: &mut AstNode) -> PResult<()> {
        if self.at_kw("else") {
            self.advance();
            for stmt in self.block()? {
                node.push_child(Field::Orelse, stmt);
            }
        }
        Ok(())
    }

    // ----- expressions ---------------------------------------------------

    fn starts_expression(&self) -> bool {
        let Some(t) = self.peek() else { return false };
        match t.kind {
            TokenKind::Identifier | TokenKind::Number | TokenKind::String | TokenKind::FString => true,
            TokenKind::Keyword => matches!(
                t.lexeme.as_str(),
                "None" | "True" | "False" | "not" | "lambda" | "await" | "yield"
            ),
            TokenKind::Operator | TokenKind::Delimiter => {
                matches!(t.lexeme.as_str(), "(" | "[" | "{" | "-" | "+" | "~" | "*")
            }
            _ => false,
        }
    }

    /// Comma-separated expressions; more than one (or a trailing comma)
    /// makes a tuple.
    fn test_list(&mut self) -> PResult<AstNode> {
        let start = self.span();
        let first = self.test()?;
        if !self.at_op(",") {
            return Ok(first);
        }
        let mut tuple = AstNode::new(NodeKind::Tuple, start).with_child(Field::Elts, first);
        while self.eat_op(",") {
            if !self.starts_expression() {
                break;
            }
            tuple.push_child(Field::Elts, self.test()?);
        }
        tuple.span = self.finish(start);
        Ok(tuple)
    }

    /// Targets of a `for` loop: stops before `in`.
    fn target_list(&mut self) -> PResult<AstNode> {
        let start = self.span();
        let first = self.bit_or()?;
        if !self.at_op(",") {
            return Ok(first);
        }
        let mut tuple = AstNode::new(NodeKind::Tuple, start).with_child(Field::Elts, first);
        while self.eat_op(",") {
            if self.at_kw("in") {
                break;
            }
            tuple.push_child(Field::Elts, self.bit_or()?);
        }
        tuple.span = self.finish(start);
        Ok(tuple)
    }

    fn test(&mut self) -> PResult<AstNode> {
        if self.at_kw("lambda") {
            return Err(self.error_here("lambda expressions are not supported"));
        }
        if self.at_kw("yield") || self.at_kw("await") {
            return Err(self.error_here(format!("unsupported construct '{}'", self.peek().unwrap().lexeme)));
        }
        if self.at_op("*") {
            return Err(self.error_here("starred expressions are not supported"));
        }
        let node = self.or_test()?;
        if self.at_kw("if") {
            return Err(self.error_here("conditional expressions are not supported"));
        }
        Ok(node)
    }

    fn bool_chain(&mut self, op: &str, next: fn(&mut Self) -> PResult<AstNode>) -> PResult<AstNode> {
        let start = self.span();
        let first = next(self)?;
        if !self.at_kw(op) {
            return Ok(first);
        }
        let mut node = AstNode::new(NodeKind::BoolOp, start)
            .with_attr(Field::Op, Value::Text(op.to_string()))
            .with_child(Field::Values, first);
        while self.at_kw(op) {
            self.advance();
            node.push_child(Field::Values, next(self)?);
        }
        node.span = self.finish(start);
        Ok(node)
    }

    fn or_test(&mut self) -> PResult<AstNode> {
        self.bool_chain("or", Self::and_test)
    }

    fn and_test(&mut self) -> PResult<AstNode> {
        self.bool_chain("and", Self::not_test)
    }

    fn not_test(&mut self) -> PResult<AstNode> {
        if self.at_kw("not") {
            let start = self.advance().span;
            let operand = self.not_test()?;
            return Ok(AstNode::new(NodeKind::UnaryOp, self.finish(start))
                .with_attr(Field::Op, Value::Text("not".into()))
                .with_child(Field::Operand, operand));
        }
        self.comparison()
    }

    fn comparison_op(&self) -> Option<(&'static str, usize)> {
        let t = self.peek()?;
        match (t.kind, t.lexeme.as_str()) {
            (TokenKind::Operator, "<") => Some(("<", 1)),
            (TokenKind::Operator, ">") => Some((">", 1)),
            (TokenKind::Operator, "==") => Some(("==", 1)),
            (TokenKind::Operator, ">=") => Some((">=", 1)),
            (TokenKind::Operator, "<=") => Some(("<=", 1)),
            (TokenKind::Operator, "!=") => Some(("!=", 1)),
            (TokenKind::Keyword, "in") => Some(("in", 1)),
            (TokenKind::Keyword, "not") if self.peek_nth(1).is_some_and(|n| n.is(TokenKind::Keyword, "in")) => {
                Some(("not in", 2))
            }
            (TokenKind::Keyword, "is") if self.peek_nth(1).is_some_and(|n| n.is(TokenKind::Keyword, "not")) => {
                Some(("is not", 2))
            }
            (TokenKind::Keyword, "is") => Some(("is", 1)),
            _ => None,
        }
    }

    fn comparison(&mut self) -> PResult<AstNode> {
        let start = self.span();
        let left = self.bit_or()?;
        if self.comparison_op().is_none() {
            return Ok(left);
        }
        let mut node = AstNode::new(NodeKind::Compare, start).with_child(Field::Left, left);
        while let Some((op, width)) = self.comparison_op() {
            for _ in 0..width {
                self.advance();
            }
            node.attrs.push(super::ast::Attr {
                field: Field::Ops,
                value: Value::Text(op.to_string()),
            });
            node.push_child(Field::Comparators, self.bit_or()?);
        }
        node.span = self.finish(start);
        Ok(node)
    }

    fn binary(&mut self, ops: &[&str], next: fn(&mut Self) -> PResult<AstNode>) -> PResult<AstNode> {
        let start = self.span();
        let mut left = next(self)?;
        loop {
            let op = match self.peek() {
                Some(t) if t.kind == TokenKind::Operator && ops.contains(&t.lexeme.as_str()) => t.lexeme.clone(),
                _ => return Ok(left),
            };
            self.advance();
            let right = next(self)?;
            left = AstNode::new(NodeKind::BinOp, self.finish(start))
                .with_attr(Field::Op, Value::Text(op))
                .with_child(Field::Left, left)
                .with_child(Field::Right, right);
        }
    }

    fn bit_or(&mut self) -> PResult<AstNode> {
        self.binary(&["|"], Self::bit_xor)
    }

    fn bit_xor(&mut self) -> PResult<AstNode> {
        self.binary(&["^"], Self::bit_and)
    }

    fn bit_and(&mut self) -> PResult<AstNode> {
        self.binary(&["&"], Self::shift)
    }

    fn shift(&mut self) -> PResult<AstNode> {
        self.binary(&["<<", ">>"], Self::arith)
    }

    fn arith(&mut self) -> PResult<AstNode> {
        self.binary(&["+", "-"], Self::term)
    }

    fn term(&mut self) -> PResult<AstNode> {
        self.binary(&["*", "/", "//", "%", "@"], Self::factor)
    }

    fn factor(&mut self) -> PResult<AstNode> {
        let op = match self.peek() {
            Some(t) if t.kind == TokenKind::Operator && matches!(t.lexeme.as_str(), "-" | "+" | "~") => {
                t.lexeme.clone()
            }
            _ => return self.power(),
        };
        let start = self.advance().span;
        let operand = self.factor()?;
        Ok(AstNode::new(NodeKind::UnaryOp, self.finish(start))
            .with_attr(Field::Op, Value::Text(op))
            .with_child(Field::Operand, operand))
    }

    fn power(&mut self) -> PResult<AstNode> {
        let start = self.span();
        let base = self.primary()?;
        if !self.at_op("**") {
            return Ok(base);
        }
        self.advance();
        let exponent = self.factor()?;
        Ok(AstNode::new(NodeKind::BinOp, self.finish(start))
            .with_attr(Field::Op, Value::Text("**".into()))
            .with_child(Field::Left, base)
            .with_child(Field::Right, exponent))
    }

    fn primary(&mut self) -> PResult<AstNode> {
        let start = self.span();
        let mut node = self.atom()?;
        loop {
            if self.eat_op(".") {
                let attr = self.expect_name("attribute name")?;
                node = AstNode::new(NodeKind::Attribute, self.finish(start))
                    .with_attr(Field::Attr, Value::Text(attr.lexeme))
                    .with_child(Field::Value, node);
            } else if self.at_op("(") {
                node = self.call(node, start)?;
            } else if self.at_op("[") {
                self.advance();
                let slice = self.subscript_list()?;
                self.expect_op("]")?;
                node = AstNode::new(NodeKind::Subscript, self.finish(start))
                    .with_child(Field::Value, node)
                    .with_child(Field::Slice, slice);
            } else {
                return Ok(node);
            }
        }
    }

    fn call(&mut self, func: AstNode, start: Span) -> PResult<AstNode> {
        self.expect_op("(")?;
        let mut node = AstNode::new(NodeKind::Call, start).with_child(Field::Func, func);
        let mut keywords = Vec::new();
        while !self.at_op(")") {
            if self.at_op("*") || self.at_op("**") {
                return Err(self.error_here("star arguments are not supported"));
            }
            let is_keyword =
                self.at_kind(TokenKind::Identifier) && self.peek_nth(1).is_some_and(|t| t.is(TokenKind::Operator, "="));
            if is_keyword {
                let name = self.advance();
                self.advance();
                let value = self.test()?;
                keywords.push(
                    AstNode::new(NodeKind::Keyword, self.finish(name.span))
                        .with_attr(Field::Arg, Value::Text(name.lexeme))
                        .with_child(Field::Value, value),
                );
            } else {
                let arg_start = self.span();
                let arg = self.test()?;
                if self.at_kw("for") {
                    return Err(self.error_here("generator expressions are not supported"));
                }
                if !keywords.is_empty() {
                    return Err(self.error_at(
                        arg_start.to_offset(arg.span.end()),
                        "positional argument follows keyword argument",
                    ));
                }
                node.push_child(Field::Args, arg);
            }
            if !self.eat_op(",") {
                break;
            }
        }
        self.expect_op(")")?;
        for kw in keywords {
            node.push_child(Field::Keywords, kw);
        }
        node.span = self.finish(start);
        Ok(node)
    }

    fn subscript_list(&mut self) -> PResult<AstNode> {
        let start = self.span();
        let first = self.subscript()?;
        if !self.at_op(",") {
            return Ok(first);
        }
        let mut tuple = AstNode::new(NodeKind::Tuple, start).with_child(Field::Elts, first);
        while self.eat_op(",") {
            if self.at_op("]") {
                break;
            }
            tuple.push_child(Field::Elts, self.subscript()?);
        }
        tuple.span = self.finish(start);
        Ok(tuple)
    }

    fn subscript(&mut self) -> PResult<AstNode> {
        let start = self.span();
        let lower = if self.at_op(":") {
            None
        } else {
            let e = self.test()?;
            if !self.at_op(":") {
                return Ok(e);
            }
            Some(e)
        };
        self.expect_op(":")?;
        let mut node = AstNode::new(NodeKind::Slice, start);
        if let Some(l) = lower {
            node.push_child(Field::Lower, l);
        }
        let bound_follows = |p: &Self| !(p.at_op(":") || p.at_op("]") || p.at_op(","));
        if bound_follows(self) {
            node.push_child(Field::Upper, self.test()?);
        }
        if self.eat_op(":") && bound_follows(self) {
            node.push_child(Field::Step, self.test()?);
        }
        node.span = self.finish(start);
        Ok(node)
    }

    fn atom(&mut self) -> PResult<AstNode> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.error_here("expected an expression, found end of input"));
        };
        match tok.kind {
            TokenKind::Identifier => {
                self.advance();
                Ok(AstNode::new(NodeKind::Name, tok.span).with_attr(Field::Id, Value::Text(tok.lexeme)))
            }
            TokenKind::Number => {
                self.advance();
                let value = parse_number(&tok.lexeme).map_err(|m| self.error_at(tok.span, m))?;
                Ok(AstNode::new(NodeKind::Constant, tok.span).with_attr(Field::Value, value))
            }
            TokenKind::String | TokenKind::FString => self.strings(),
            TokenKind::Keyword => {
                let value = match tok.lexeme.as_str() {
                    "None" => Value::None,
                    "True" => Value::Bool(true),
                    "False" => Value::Bool(false),
                    _ => return Err(self.error_here(format!("expected an expression, found '{}'", tok.lexeme))),
                };
                self.advance();
                Ok(AstNode::new(NodeKind::Constant, tok.span).with_attr(Field::Value, value))
            }
            TokenKind::Delimiter if tok.lexeme == "(" => self.paren(),
            TokenKind::Delimiter if tok.lexeme == "[" => self.list(),
            TokenKind::Delimiter if tok.lexeme == "{" => self.dict(),
            _ => Err(self.error_here(format!("expected an expression, found {}", self.describe_current()))),
        }
    }

    fn paren(&mut self) -> PResult<AstNode> {
        let start = self.advance().span;
        if self.eat_op(")") {
            return Ok(AstNode::new(NodeKind::Tuple, self.finish(start)));
        }
        let first = self.test()?;
        if self.at_kw("for") {
            return Err(self.error_here("generator expressions are not supported"));
        }
        if !self.at_op(",") {
            self.expect_op(")")?;
            return Ok(first);
        }
        let mut tuple = AstNode::new(NodeKind::Tuple, start).with_child(Field::Elts, first);
        while self.eat_op(",") {
            if self.at_op(")") {
                break;
            }
            tuple.push_child(Field::Elts, self.test()?);
        }
        self.expect_op(")")?;
        tuple.span = self.finish(start);
        Ok(tuple)
    }

    fn list(&mut self) -> PResult<AstNode> {
        let start = self.advance().span;
        let mut node = AstNode::new(NodeKind::List, start);
        while !self.at_op("]") {
            node.push_child(Field::Elts, self.test()?);
            if self.at_kw("for") {
                return Err(self.error_here("comprehensions are not supported"));
            }
            if !self.eat_op(",") {
                break;
            }
        }
        self.expect_op("]")?;
        node.span = self.finish(start);
        Ok(node)
    }

    fn dict(&mut self) -> PResult<AstNode> {
        let start = self.advance().span;
        let mut keys = Vec::new();
        let mut values = Vec::new();
        while !self.at_op("}") {
            if self.at_op("**") {
                return Err(self.error_here("dict unpacking is not supported"));
            }
            let key = self.test()?;
            if self.at_kw("for") {
                return Err(self.error_here("comprehensions are not supported"));
            }
            if !self.at_op(":") {
                return Err(self.error_at(start.to_offset(self.prev_end), "set literals are not supported"));
            }
            self.advance();
            keys.push(key);
            values.push(self.test()?);
            if self.at_kw("for") {
                return Err(self.error_here("comprehensions are not supported"));
            }
            if !self.eat_op(",") {
                break;
            }
        }
        self.expect_op("}")?;
        let mut node = AstNode::new(NodeKind::Dict, self.finish(start));
        for k in keys {
            node.push_child(Field::Keys, k);
        }
        for v in values {
            node.push_child(Field::Values, v);
        }
        Ok(node)
    }

    /// Adjacent string literals concatenate; any formatted part turns the
    /// result into a FormattedString.
    fn strings(&mut self) -> PResult<AstNode> {
        let start = self.span();
        let mut any_formatted = false;
        let mut merged: Vec<Piece> = Vec::new();
        while self.at_kind(TokenKind::String) || self.at_kind(TokenKind::FString) {
            let tok = self.advance();
            let (formatted, pieces) = strings::decode(&tok)?;
            any_formatted |= formatted;
            for piece in pieces {
                match (merged.last_mut(), piece) {
                    (
                        Some(Piece::Text { value, span }),
                        Piece::Text {
                            value: more,
                            span: more_span,
                        },
                    ) => {
                        value.push_str(&more);
                        *span = span.to(more_span);
                    }
                    (_, piece) => merged.push(piece),
                }
            }
        }
        let span = self.finish(start);
        if !any_formatted {
            let value = match merged.pop() {
                Some(Piece::Text { value, .. }) => value,
                _ => String::new(),
            };
            return Ok(AstNode::new(NodeKind::StringLiteral, span).with_attr(Field::Value, Value::Text(value)));
        }
        let mut node = AstNode::new(NodeKind::FormattedString, span);
        for piece in merged {
            if let Some(child) = self.piece_node(piece)? {
                node.push_child(Field::Values, child);
            }
        }
        Ok(node)
    }

    fn piece_node(&self, piece: Piece) -> PResult<Option<AstNode>> {
        match piece {
            Piece::Text { value, span } => {
                if value.is_empty() {
                    return Ok(None);
                }
                Ok(Some(
                    AstNode::new(NodeKind::StringLiteral, span).with_attr(Field::Value, Value::Text(value)),
                ))
            }
            Piece::Hole {
                expr,
                origin,
                conversion,
                spec,
                span,
            } => {
                let tokens = tokenize_embedded(&expr, origin)?;
                let eof = Span {
                    line: origin.line,
                    col: origin.col,
                    offset: origin.offset + expr.len(),
                    len: 0,
                };
                let mut sub = Parser::new(self.src, tokens, eof);
                let value = sub.test_list()?;
                if !sub.at_end() {
                    return Err(sub.error_here(format!("f-string: expected '}}', found {}", sub.describe_current())));
                }
                let mut hole = AstNode::new(NodeKind::FormatHole, span);
                if let Some(c) = conversion {
                    hole = hole.with_attr(Field::Conversion, Value::Text(c.to_string()));
                }
                hole.push_child(Field::Value, value);
                if let Some(spec) = spec {
                    let spec_span = match (spec.first(), spec.last()) {
                        (Some(a), Some(b)) => piece_span(a).to(piece_span(b)),
                        _ => Span { len: 0, ..span },
                    };
                    let mut spec_node = AstNode::new(NodeKind::FormattedString, spec_span);
                    for p in spec {
                        if let Some(child) = self.piece_node(p)? {
                            spec_node.push_child(Field::Values, child);
                        }
                    }
                    hole.push_child(Field::FormatSpec, spec_node);
                }
                Ok(Some(hole))
            }
        }
    }
}

fn piece_span(p: &Piece) -> Span {
    match p {
        Piece::Text { span, .. } | Piece::Hole { span, .. } => *span,
    }
}

fn parse_number(lexeme: &str) -> Result<Value, String> {
    let clean: String = lexeme.chars().filter(|c| *c != '_').collect();
    let lower = clean.to_ascii_lowercase();
    let radix = match lower.get(..2) {
        Some("0x") => Some(16),
        Some("0o") => Some(8),
        Some("0b") => Some(2),
        _ => None,
    };
    if let Some(radix) = radix {
        return i64::from_str_radix(&clean[2..], radix)
            .map(Value::Int)
            .map_err(|_| format!("invalid or too large integer literal '{lexeme}'"));
    }
    if lower.contains(['.', 'e']) {
        return clean
            .parse::<f64>()
            .map(Value::Float)
            .map_err(|_| format!("invalid float literal '{lexeme}'"));
    }
    if clean.len() > 1 && clean.starts_with('0') && clean.chars().any(|c| c != '0') {
        return Err("leading zeros in decimal integer literals are not permitted".to_string());
    }
    clean
        .parse::<i64>()
        .map(Value::Int)
        .map_err(|_| format!("integer literal '{lexeme}' is too large"))
}
