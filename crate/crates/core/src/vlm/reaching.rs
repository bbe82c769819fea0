//! Recovery of a call's query text through intra-function reaching
//! definitions.
//!
//! Each local variable maps to the set of definitions that may reach a
//! program point. A string or formatted-string assignment is a textual
//! definition; every other binding (parameters, loop targets, tuple
//! unpacking, augmented assignment, arbitrary expressions) is opaque.
//! Loops are iterated to a fixpoint so definitions carried around a back
//! edge are never missed. Each scope is analyzed once for all of its calls.

use std::collections::{BTreeMap, BTreeSet};

use super::{QueryOrigin, QueryText, VlmCallSite};
use crate::parser::{AstNode, Field, NodeKind, Span, SyntaxTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Def {
    Opaque,
    /// Byte offset of the assigned literal.
    Text(usize),
}

type State<'a> = BTreeMap<&'a str, BTreeSet<Def>>;

/// Position key of a span; calls are identified by where they sit.
type Key = (usize, usize);

/// Calls of one scope whose query is a variable: index, call span, name.
type ScopeCalls<'a> = (&'a AstNode, Vec<(usize, Span, &'a str)>);

fn key(span: Span) -> Key {
    (span.offset, span.len)
}

pub fn resolve_query_text(site: &VlmCallSite, tree: &SyntaxTree) -> QueryText {
    resolve_query_texts(&[site.span], tree).remove(0)
}

/// Query text of each call at `calls`, in the same order.
pub(crate) fn resolve_query_texts(calls: &[Span], tree: &SyntaxTree) -> Vec<QueryText> {
    let root = tree.root();
    let mut out: Vec<QueryText> = calls.iter().map(|_| QueryText::unresolved()).collect();
    let mut pending: BTreeMap<Key, ScopeCalls> = BTreeMap::new();
    for (i, &span) in calls.iter().enumerate() {
        let Some((scope, call)) = locate(root, root, span) else {
            continue;
        };
        let Some(arg) = call.children_of(Field::Args).next() else {
            continue;
        };
        match arg.kind {
            NodeKind::StringLiteral | NodeKind::FormattedString => {
                if let Some(q) = QueryText::from_literal(arg, QueryOrigin::Direct) {
                    out[i] = q;
                }
            }
            NodeKind::Name => {
                let name = arg.name_id().unwrap_or_default();
                pending
                    .entry(key(scope.span))
                    .or_insert_with(|| (scope, Vec::new()))
                    .1
                    .push((i, call.span, name));
            }
            _ => {}
        }
    }
    for (scope, wanted) in pending.into_values() {
        let analysis = analyze_scope(scope, wanted.iter().map(|w| key(w.1)).collect());
        for (i, call, name) in wanted {
            if let Some(q) = analysis.query(call, name) {
                out[i] = q;
            }
        }
    }
    out
}

/// Innermost scope (function or module) whose body holds the call with
/// exactly `span`, together with that call.
fn locate<'a>(scope: &'a AstNode, node: &'a AstNode, span: Span) -> Option<(&'a AstNode, &'a AstNode)> {
    if node.kind == NodeKind::Call && node.span == span {
        return Some((scope, node));
    }
    node.children
        .iter()
        .filter(|c| c.node.span.contains(&span))
        .find_map(|c| {
            let inner = if node.kind == NodeKind::FunctionDef && c.field == Field::Body {
                node
            } else {
                scope
            };
            locate(inner, &c.node, span)
        })
}

fn analyze_scope(scope: &AstNode, targets: BTreeSet<Key>) -> Analysis<'_> {
    let mut analysis = Analysis {
        targets,
        captured: BTreeMap::new(),
        texts: BTreeMap::new(),
        loops: Vec::new(),
    };
    let mut entry = State::new();
    for param in scope.children_of(Field::Args) {
        if let Some(arg) = param.text_attr(Field::Arg) {
            entry.insert(arg, BTreeSet::from([Def::Opaque]));
        }
    }
    analysis.block(scope.children_of(Field::Body), Some(entry));
    analysis
}

#[derive(Default)]
struct LoopExits<'a> {
    breaks: Option<State<'a>>,
    continues: Option<State<'a>>,
}

struct Analysis<'a> {
    targets: BTreeSet<Key>,
    /// State on entry to the statement evaluating each target call.
    captured: BTreeMap<Key, State<'a>>,
    texts: BTreeMap<usize, &'a AstNode>,
    loops: Vec<LoopExits<'a>>,
}

fn join<'a>(a: Option<State<'a>>, b: Option<State<'a>>) -> Option<State<'a>> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(mut a), Some(b)) => {
            for (k, v) in b {
                a.entry(k).or_default().extend(v);
            }
            Some(a)
        }
    }
}

fn merge_into<'a>(into: &mut State<'a>, from: &State<'a>) {
    for (k, v) in from {
        into.entry(*k).or_default().extend(v.iter().copied());
    }
}

fn is_statement_field(field: Field) -> bool {
    matches!(field, Field::Body | Field::Orelse)
}

impl<'a> Analysis<'a> {
    fn query(&self, call: Span, name: &str) -> Option<QueryText> {
        let reaching = self.captured.get(&key(call))?.get(name)?;
        let mut defs = reaching.iter();
        match (defs.next(), defs.next()) {
            (Some(Def::Text(offset)), None) => QueryText::from_literal(
                self.texts[offset],
                QueryOrigin::Propagated {
                    variable: name.to_string(),
                },
            ),
            _ => None,
        }
    }

    fn block(&mut self, stmts: impl Iterator<Item = &'a AstNode>, mut state: Option<State<'a>>) -> Option<State<'a>> {
        for stmt in stmts {
            state = self.statement(stmt, state);
        }
        state
    }

    /// Target calls lying inside `span`.
    fn targets_within(&self, span: Span) -> Vec<Key> {
        self.targets
            .range((span.offset, 0)..(span.end(), 0))
            .filter(|(offset, len)| offset + len <= span.end())
            .copied()
            .collect()
    }

    /// Record `state` for every target evaluated by `node` itself rather
    /// than by a nested statement.
    fn capture_owned(&mut self, node: &AstNode, nested_statements: bool, state: &State<'a>) {
        for target in self.targets_within(node.span) {
            let nested = nested_statements
                && node.children.iter().any(|c| {
                    is_statement_field(c.field)
                        && c.node.span.offset <= target.0
                        && target.0 + target.1 <= c.node.span.end()
                });
            if !nested {
                merge_into(self.captured.entry(target).or_default(), state);
            }
        }
    }

    fn statement(&mut self, stmt: &'a AstNode, state: Option<State<'a>>) -> Option<State<'a>> {
        let mut state = state?;
        if stmt.kind != NodeKind::While {
            self.capture_owned(stmt, true, &state);
        }
        match stmt.kind {
            NodeKind::Assign => {
                let value = stmt.child(Field::Value)?;
                for target in stmt.children_of(Field::Targets) {
                    self.bind(target, Some(value), &mut state);
                }
                Some(state)
            }
            NodeKind::AugAssign => {
                if let Some(target) = stmt.child(Field::Target) {
                    self.bind(target, None, &mut state);
                }
                Some(state)
            }
            NodeKind::FunctionDef => {
                if let Some(name) = stmt.text_attr(Field::Name) {
                    state.insert(name, BTreeSet::from([Def::Opaque]));
                }
                Some(state)
            }
            NodeKind::Return => None,
            NodeKind::Break => {
                if let Some(l) = self.loops.last_mut() {
                    l.breaks = join(l.breaks.take(), Some(state));
                }
                None
            }
            NodeKind::Continue => {
                if let Some(l) = self.loops.last_mut() {
                    l.continues = join(l.continues.take(), Some(state));
                }
                None
            }
            NodeKind::If => {
                let then = self.block(stmt.children_of(Field::Body), Some(state.clone()));
                let other = self.block(stmt.children_of(Field::Orelse), Some(state));
                join(then, other)
            }
            NodeKind::While | NodeKind::For => self.looping(stmt, state),
            _ => Some(state),
        }
    }

    fn looping(&mut self, stmt: &'a AstNode, entry: State<'a>) -> Option<State<'a>> {
        let target = stmt.child(Field::Target);
        let test = stmt.child(Field::Test).filter(|_| stmt.kind == NodeKind::While);
        let mut head = entry.clone();
        loop {
            if let Some(test) = test {
                self.capture_owned(test, false, &head);
            }
            let mut body_entry = head.clone();
            if let Some(t) = target {
                self.bind(t, None, &mut body_entry);
            }
            self.loops.push(LoopExits::default());
            let body_exit = self.block(stmt.children_of(Field::Body), Some(body_entry));
            let exits = self.loops.pop().expect("loop context pushed above");
            let next = join(join(Some(entry.clone()), body_exit), exits.continues).expect("loop entry is reachable");
            if next == head {
                let normal = self.block(stmt.children_of(Field::Orelse), Some(head));
                return join(normal, exits.breaks);
            }
            head = next;
        }
    }

    /// Record the binding of `target`. `value` is the assigned expression
    /// when the target receives it whole.
    fn bind(&mut self, target: &'a AstNode, value: Option<&'a AstNode>, state: &mut State<'a>) {
        match target.kind {
            NodeKind::Name => {
                let def = match value {
                    Some(v) if matches!(v.kind, NodeKind::StringLiteral | NodeKind::FormattedString) => {
                        self.texts.insert(v.span.offset, v);
                        Def::Text(v.span.offset)
                    }
                    _ => Def::Opaque,
                };
                if let Some(id) = target.name_id() {
                    state.insert(id, BTreeSet::from([def]));
                }
            }
            NodeKind::Tuple | NodeKind::List => {
                for elt in target.child_nodes() {
                    self.bind(elt, None, state);
                }
            }
            _ => {}
        }
    }
}
