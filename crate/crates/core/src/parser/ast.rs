use std::fmt;

use serde::{Deserialize, Serialize};

use super::token::Span;

/// Version tag of the node-kind enumeration. Bump whenever a kind is added,
/// removed or changes meaning, since counts are only comparable within one
/// version.
pub const NODE_KIND_VERSION: &str = "vplang-kinds/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeKind {
    Module,
    FunctionDef,
    Parameter,
    For,
    If,
    While,
    Assign,
    AugAssign,
    Return,
    Continue,
    Break,
    Pass,
    ExprStmt,
    Call,
    Attribute,
    Subscript,
    Name,
    Constant,
    StringLiteral,
    FormattedString,
    FormatHole,
    Dict,
    List,
    Tuple,
    BinOp,
    BoolOp,
    UnaryOp,
    Compare,
    Keyword,
    Slice,
}

impl NodeKind {
    pub const ALL: [NodeKind; 30] = [
        NodeKind::Module,
        NodeKind::FunctionDef,
        NodeKind::Parameter,
        NodeKind::For,
        NodeKind::If,
        NodeKind::While,
        NodeKind::Assign,
        NodeKind::AugAssign,
        NodeKind::Return,
        NodeKind::Continue,
        NodeKind::Break,
        NodeKind::Pass,
        NodeKind::ExprStmt,
        NodeKind::Call,
        NodeKind::Attribute,
        NodeKind::Subscript,
        NodeKind::Name,
        NodeKind::Constant,
        NodeKind::StringLiteral,
        NodeKind::FormattedString,
        NodeKind::FormatHole,
        NodeKind::Dict,
        NodeKind::List,
        NodeKind::Tuple,
        NodeKind::BinOp,
        NodeKind::BoolOp,
        NodeKind::UnaryOp,
        NodeKind::Compare,
        NodeKind::Keyword,
        NodeKind::Slice,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NodeKind::Module => "Module",
            NodeKind::FunctionDef => "FunctionDef",
            NodeKind::Parameter => "Parameter",
            NodeKind::For => "For",
            NodeKind::If => "If",
            NodeKind::While => "While",
            NodeKind::Assign => "Assign",
            NodeKind::AugAssign => "AugAssign",
            NodeKind::Return => "Return",
            NodeKind::Continue => "Continue",
            NodeKind::Break => "Break",
            NodeKind::Pass => "Pass",
            NodeKind::ExprStmt => "ExprStmt",
            NodeKind::Call => "Call",
            NodeKind::Attribute => "Attribute",
            NodeKind::Subscript => "Subscript",
            NodeKind::Name => "Name",
            NodeKind::Constant => "Constant",
            NodeKind::StringLiteral => "StringLiteral",
            NodeKind::FormattedString => "FormattedString",
            NodeKind::FormatHole => "FormatHole",
            NodeKind::Dict => "Dict",
            NodeKind::List => "List",
            NodeKind::Tuple => "Tuple",
            NodeKind::BinOp => "BinOp",
            NodeKind::BoolOp => "BoolOp",
            NodeKind::UnaryOp => "UnaryOp",
            NodeKind::Compare => "Compare",
            NodeKind::Keyword => "Keyword",
            NodeKind::Slice => "Slice",
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Name of the link between a node and a child or attribute. Mirrors the
/// field names of the host language's own AST.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    // attributes
    Id,
    Attr,
    Name,
    Arg,
    Op,
    Ops,
    Conversion,
    // children (`value` and `args` appear in both roles)
    Value,
    Args,
    Body,
    Orelse,
    Test,
    Target,
    Iter,
    Targets,
    Keywords,
    Func,
    Slice,
    Lower,
    Upper,
    Step,
    Left,
    Right,
    Operand,
    Values,
    Comparators,
    Keys,
    Elts,
    Returns,
    Annotation,
    Default,
    FormatSpec,
}

impl Field {
    pub fn name(self) -> &'static str {
        match self {
            Field::Id => "id",
            Field::Attr => "attr",
            Field::Name => "name",
            Field::Arg => "arg",
            Field::Op => "op",
            Field::Ops => "ops",
            Field::Conversion => "conversion",
            Field::Value => "value",
            Field::Args => "args",
            Field::Body => "body",
            Field::Orelse => "orelse",
            Field::Test => "test",
            Field::Target => "target",
            Field::Iter => "iter",
            Field::Targets => "targets",
            Field::Keywords => "keywords",
            Field::Func => "func",
            Field::Slice => "slice",
            Field::Lower => "lower",
            Field::Upper => "upper",
            Field::Step => "step",
            Field::Left => "left",
            Field::Right => "right",
            Field::Operand => "operand",
            Field::Values => "values",
            Field::Comparators => "comparators",
            Field::Keys => "keys",
            Field::Elts => "elts",
            Field::Returns => "returns",
            Field::Annotation => "annotation",
            Field::Default => "default",
            Field::FormatSpec => "format_spec",
        }
    }
}

/// Primitive attribute value. Child nodes never appear here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
    None,
}

impl Value {
    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Attr {
    pub field: Field,
    pub value: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Child {
    pub field: Field,
    pub node: AstNode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AstNode {
    pub kind: NodeKind,
    pub span: Span,
    pub attrs: Vec<Attr>,
    pub children: Vec<Child>,
}

impl AstNode {
    pub fn new(kind: NodeKind, span: Span) -> Self {
        AstNode {
            kind,
            span,
            attrs: Vec::new(),
            children: Vec::new(),
        }
    }

    pub fn with_attr(mut self, field: Field, value: Value) -> Self {
        self.attrs.push(Attr { field, value });
        self
    }

    pub fn with_child(mut self, field: Field, node: AstNode) -> Self {
        self.children.push(Child { field, node });
        self
    }

    pub fn push_child(&mut self, field: Field, node: AstNode) {
        self.children.push(Child { field, node });
    }

    pub fn attr(&self, field: Field) -> Option<&Value> {
        self.attrs.iter().find(|a| a.field == field).map(|a| &a.value)
    }

    pub fn text_attr(&self, field: Field) -> Option<&str> {
        self.attr(field).and_then(Value::as_text)
    }

    pub fn child(&self, field: Field) -> Option<&AstNode> {
        self.children.iter().find(|c| c.field == field).map(|c| &c.node)
    }

    pub fn children_of(&self, field: Field) -> impl Iterator<Item = &AstNode> {
        self.children.iter().filter(move |c| c.field == field).map(|c| &c.node)
    }

    pub fn child_nodes(&self) -> impl Iterator<Item = &AstNode> {
        self.children.iter().map(|c| &c.node)
    }

    /// Pre-order traversal of this node and all descendants.
    pub fn walk(&self) -> Walk<'_> {
        Walk { stack: vec![self] }
    }

    /// Identifier of a `Name` node.
    pub fn name_id(&self) -> Option<&str> {
        (self.kind == NodeKind::Name)
            .then(|| self.text_attr(Field::Id))
            .flatten()
    }
}

pub struct Walk<'a> {
    stack: Vec<&'a AstNode>,
}

impl<'a> Iterator for Walk<'a> {
    type Item = &'a AstNode;

    fn next(&mut self) -> Option<&'a AstNode> {
        let node = self.stack.pop()?;
        self.stack.extend(node.children.iter().rev().map(|c| &c.node));
        Some(node)
    }
}
