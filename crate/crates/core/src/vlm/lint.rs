//! Checks of a program against the visual-programming API surface.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::parser::{AstNode, Field, NodeKind, Span, SyntaxTree};

/// Lint rule identifiers. The set is closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LintRule {
    /// No top-level function carries the entry-point name.
    EntryPointMissing,
    /// The entry point takes the wrong number of parameters.
    EntryPointArity,
    /// A method outside the API is called on a receiver of known API type.
    UnknownApiMethod,
    /// The entry point calls `select_answer` but never returns its result.
    SelectAnswerUnreturned,
}

impl LintRule {
    pub const ALL: [LintRule; 4] = [
        LintRule::EntryPointMissing,
        LintRule::EntryPointArity,
        LintRule::UnknownApiMethod,
        LintRule::SelectAnswerUnreturned,
    ];

    pub fn id(self) -> &'static str {
        match self {
            LintRule::EntryPointMissing => "entry-point-missing",
            LintRule::EntryPointArity => "entry-point-arity",
            LintRule::UnknownApiMethod => "unknown-api-method",
            LintRule::SelectAnswerUnreturned => "select-answer-unreturned",
        }
    }

    pub fn severity(self) -> Severity {
        match self {
            LintRule::SelectAnswerUnreturned => Severity::Warn,
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for LintRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warn,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warn => "warn",
            Severity::Error => "error",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LintFinding {
    pub rule: LintRule,
    pub severity: Severity,
    pub message: String,
    pub span: Span,
}

impl LintFinding {
    fn new(rule: LintRule, message: String, span: Span) -> Self {
        LintFinding {
            rule,
            severity: rule.severity(),
            message,
            span,
        }
    }
}

/// Methods of one API class. A method's return type is either a class name,
/// `[Class]` for a sequence of that class, or absent when the result is not
/// an API object.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassSpec {
    pub methods: BTreeMap<String, Option<String>>,
}

/// The documented VP API: entry-point shape and the methods of each class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApiSpec {
    pub entry_point: String,
    pub entry_arity: usize,
    pub classes: BTreeMap<String, ClassSpec>,
}

impl Default for ApiSpec {
    fn default() -> Self {
        let class = |methods: &[(&str, Option<&str>)]| ClassSpec {
            methods: methods
                .iter()
                .map(|(m, r)| (m.to_string(), r.map(str::to_string)))
                .collect(),
        };
        ApiSpec {
            entry_point: "execute_command".into(),
            entry_arity: 4,
            classes: BTreeMap::from([
                (
                    "VideoSegment".to_string(),
                    class(&[
                        ("frame_iterator", Some("[ImagePatch]")),
                        ("face_identify", None),
                        ("select_answer", None),
                    ]),
                ),
                (
                    "ImagePatch".to_string(),
                    class(&[
                        ("find", Some("[ImagePatch]")),
                        ("simple_query", None),
                        ("llm_query", None),
                    ]),
                ),
            ]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Ty {
    Class(String),
    Many(String),
    Tuple(Vec<Option<Ty>>),
}

impl Ty {
    fn parse(s: &str) -> Ty {
        match s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            Some(inner) => Ty::Many(inner.to_string()),
            None => Ty::Class(s.to_string()),
        }
    }
}

/// Lint a program. An empty result means the program is clean.
pub fn lint_api_usage(tree: &SyntaxTree, api: &ApiSpec) -> Vec<LintFinding> {
    let root = tree.root();
    let mut findings = Vec::new();
    let entry = root
        .children_of(Field::Body)
        .find(|s| s.kind == NodeKind::FunctionDef && s.text_attr(Field::Name) == Some(api.entry_point.as_str()));
    match entry {
        None => findings.push(LintFinding::new(
            LintRule::EntryPointMissing,
            format!("no top-level function named `{}`", api.entry_point),
            root.children_of(Field::Body)
                .find(|s| s.kind == NodeKind::FunctionDef)
                .map_or(Span { len: 0, ..root.span }, |f| f.span),
        )),
        Some(f) => {
            let arity = f.children_of(Field::Args).count();
            if arity != api.entry_arity {
                findings.push(LintFinding::new(
                    LintRule::EntryPointArity,
                    format!(
                        "`{}` takes {arity} parameter(s), expected {}",
                        api.entry_point, api.entry_arity
                    ),
                    f.span,
                ));
            }
            if let Some(f) = unreturned_select_answer(f) {
                findings.push(f);
            }
        }
    }
    for scope in std::iter::once(root).chain(root.walk().filter(|n| n.kind == NodeKind::FunctionDef)) {
        unknown_methods(scope, api, &mut findings);
    }
    findings.sort_by_key(|f| (f.span.offset, f.rule));
    findings
}

/// Statements directly in `scope`, without descending into nested functions.
fn scope_nodes(scope: &AstNode) -> Vec<&AstNode> {
    let mut out = Vec::new();
    let mut stack: Vec<&AstNode> = scope.children_of(Field::Body).collect();
    stack.reverse();
    while let Some(n) = stack.pop() {
        out.push(n);
        if n.kind != NodeKind::FunctionDef {
            stack.extend(n.children.iter().rev().map(|c| &c.node));
        }
    }
    out
}

/// Infer variable types inside one scope, then flag unknown methods called
/// on receivers of API type. A variable bound to conflicting types is
/// treated as untyped.
fn unknown_methods(scope: &AstNode, api: &ApiSpec, findings: &mut Vec<LintFinding>) {
    let nodes = scope_nodes(scope);
    let mut env: BTreeMap<String, Option<Ty>> = BTreeMap::new();
    // Bindings may refer to names bound later in the text (loops), so
    // iterate until the environment settles.
    for _ in 0..8 {
        let before = std::mem::take(&mut env);
        for node in &nodes {
            match node.kind {
                NodeKind::Assign => {
                    let ty = node.child(Field::Value).and_then(|v| infer(v, &before, api));
                    for t in node.children_of(Field::Targets) {
                        bind(t, ty.clone(), &mut env);
                    }
                }
                NodeKind::For => {
                    let ty = node.child(Field::Iter).and_then(|it| element_type(it, &before, api));
                    if let Some(t) = node.child(Field::Target) {
                        bind(t, ty, &mut env);
                    }
                }
                NodeKind::AugAssign => {
                    if let Some(t) = node.child(Field::Target) {
                        bind(t, None, &mut env);
                    }
                }
                _ => {}
            }
        }
        for arg in scope.children_of(Field::Args) {
            if let Some(name) = arg.text_attr(Field::Arg) {
                env.insert(name.to_string(), None);
            }
        }
        if env == before {
            break;
        }
    }
    for node in &nodes {
        if node.kind != NodeKind::Call {
            continue;
        }
        let Some(func) = node.child(Field::Func).filter(|f| f.kind == NodeKind::Attribute) else {
            continue;
        };
        let (Some(method), Some(receiver)) = (func.text_attr(Field::Attr), func.child(Field::Value)) else {
            continue;
        };
        if let Some(Ty::Class(class)) = infer(receiver, &env, api) {
            let known = api.classes.get(&class).is_some_and(|c| c.methods.contains_key(method));
            if !known {
                findings.push(LintFinding::new(
                    LintRule::UnknownApiMethod,
                    format!("`{method}` is not a method of `{class}`"),
                    node.span,
                ));
            }
        }
    }
}

fn bind(target: &AstNode, ty: Option<Ty>, env: &mut BTreeMap<String, Option<Ty>>) {
    match target.kind {
        NodeKind::Name => {
            let id = target.name_id().unwrap_or_default().to_string();
            match env.get(&id) {
                Some(prev) if *prev != ty => {
                    env.insert(id, None);
                }
                Some(_) => {}
                None => {
                    env.insert(id, ty);
                }
            }
        }
        NodeKind::Tuple | NodeKind::List => {
            let parts = match ty {
                Some(Ty::Tuple(parts)) if parts.len() == target.children.len() => parts,
                _ => vec![None; target.children.len()],
            };
            for (elt, t) in target.child_nodes().zip(parts) {
                bind(elt, t, env);
            }
        }
        _ => {}
    }
}

fn infer(node: &AstNode, env: &BTreeMap<String, Option<Ty>>, api: &ApiSpec) -> Option<Ty> {
    match node.kind {
        NodeKind::Name => env.get(node.name_id()?).cloned().flatten(),
        NodeKind::Call => {
            let func = node.child(Field::Func)?;
            match func.kind {
                NodeKind::Name => {
                    let name = func.name_id()?;
                    api.classes.contains_key(name).then(|| Ty::Class(name.to_string()))
                }
                NodeKind::Attribute => {
                    let Ty::Class(class) = infer(func.child(Field::Value)?, env, api)? else {
                        return None;
                    };
                    let ret = api.classes.get(&class)?.methods.get(func.text_attr(Field::Attr)?)?;
                    ret.as_deref().map(Ty::parse)
                }
                _ => None,
            }
        }
        NodeKind::Subscript => match infer(node.child(Field::Value)?, env, api)? {
            Ty::Many(c) if node.child(Field::Slice)?.kind != NodeKind::Slice => Some(Ty::Class(c)),
            _ => None,
        },
        _ => None,
    }
}

/// Type of the items produced by iterating `iter`.
fn element_type(iter: &AstNode, env: &BTreeMap<String, Option<Ty>>, api: &ApiSpec) -> Option<Ty> {
    if iter.kind == NodeKind::Call {
        let func = iter.child(Field::Func)?;
        if func.name_id() == Some("enumerate") {
            let inner = iter.children_of(Field::Args).next()?;
            let item = element_type(inner, env, api);
            return Some(Ty::Tuple(vec![None, item]));
        }
    }
    match infer(iter, env, api)? {
        Ty::Many(c) => Some(Ty::Class(c)),
        _ => None,
    }
}

fn is_select_answer(node: &AstNode) -> bool {
    node.kind == NodeKind::Call
        && node
            .child(Field::Func)
            .is_some_and(|f| f.kind == NodeKind::Attribute && f.text_attr(Field::Attr) == Some("select_answer"))
}

/// Names appearing anywhere inside `node`.
fn names_in(node: &AstNode) -> impl Iterator<Item = &str> {
    node.walk().filter_map(AstNode::name_id)
}

fn unreturned_select_answer(entry: &AstNode) -> Option<LintFinding> {
    let nodes = scope_nodes(entry);
    let returns: Vec<&AstNode> = nodes
        .iter()
        .copied()
        .filter(|n| n.kind == NodeKind::Return)
        .filter_map(|r| r.child(Field::Value))
        .collect();
    let returned_names: Vec<&str> = returns.iter().flat_map(|v| names_in(v)).collect();
    let returned_directly = returns.iter().any(|v| v.walk().any(is_select_answer));
    if returned_directly {
        return None;
    }
    let calls: Vec<&AstNode> = nodes.iter().copied().filter(|n| is_select_answer(n)).collect();
    if calls.is_empty() {
        return None;
    }
    let returned = nodes
        .iter()
        .filter(|n| n.kind == NodeKind::Assign && n.child(Field::Value).is_some_and(is_select_answer))
        .flat_map(|n| n.children_of(Field::Targets))
        .flat_map(names_in)
        .any(|name| returned_names.contains(&name));
    (!returned).then(|| {
        LintFinding::new(
            LintRule::SelectAnswerUnreturned,
            "the result of `select_answer` is never returned".to_string(),
            calls[0].span,
        )
    })
}
