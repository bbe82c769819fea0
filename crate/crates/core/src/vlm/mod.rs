//! VLM call-site extraction, query-text recovery and query tokenization.

mod lint;
mod reaching;
mod tokenize;

use serde::{Deserialize, Serialize};

use crate::parser::{AstNode, Field, NodeKind, Span, SyntaxTree};

pub use lint::{lint_api_usage, ApiSpec, ClassSpec, LintFinding, LintRule, Severity};
pub use reaching::resolve_query_text;
pub use tokenize::{tokenize_query, tokenize_text, HOLE_TOKEN};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RegistryError {
    #[error("callee registry must not be empty")]
    Empty,
    #[error("callee name {0:?} is not a valid identifier")]
    InvalidName(String),
    #[error("callee name {0:?} is listed more than once")]
    Duplicate(String),
}

/// Method names treated as VLM interfaces. A call matches when the final
/// attribute of its callee is in the set, whatever the receiver.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct CalleeRegistry {
    names: Vec<String>,
}

impl CalleeRegistry {
    pub fn new<I, S>(names: I) -> Result<Self, RegistryError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out: Vec<String> = Vec::new();
        for name in names {
            let name = name.into();
            if !is_identifier(&name) {
                return Err(RegistryError::InvalidName(name));
            }
            if out.contains(&name) {
                return Err(RegistryError::Duplicate(name));
            }
            out.push(name);
        }
        if out.is_empty() {
            return Err(RegistryError::Empty);
        }
        Ok(CalleeRegistry { names: out })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }
}

impl Default for CalleeRegistry {
    fn default() -> Self {
        CalleeRegistry::new(["simple_query", "llm_query"]).expect("default registry is valid")
    }
}

impl TryFrom<Vec<String>> for CalleeRegistry {
    type Error = RegistryError;

    fn try_from(names: Vec<String>) -> Result<Self, Self::Error> {
        CalleeRegistry::new(names)
    }
}

impl From<CalleeRegistry> for Vec<String> {
    fn from(r: CalleeRegistry) -> Self {
        r.names
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_alphabetic() || c == '_') && chars.all(|c| c.is_alphanumeric() || c == '_')
}

/// One piece of a query template.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Segment {
    Text(String),
    /// An interpolated value; its runtime text is unknown.
    Hole,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum QueryOrigin {
    /// The query is a literal written at the call.
    Direct,
    /// The query is a variable holding a single reaching literal.
    Propagated {
        variable: String,
    },
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryText {
    pub segments: Vec<Segment>,
    pub origin: QueryOrigin,
}

impl QueryText {
    pub fn unresolved() -> Self {
        QueryText {
            segments: Vec::new(),
            origin: QueryOrigin::Unresolved,
        }
    }

    pub fn is_resolved(&self) -> bool {
        self.origin != QueryOrigin::Unresolved
    }

    /// Build from a string or formatted-string literal node.
    pub(crate) fn from_literal(node: &AstNode, origin: QueryOrigin) -> Option<Self> {
        let segments = match node.kind {
            NodeKind::StringLiteral => vec![Segment::Text(node.text_attr(Field::Value)?.to_string())],
            NodeKind::FormattedString => {
                let mut segs: Vec<Segment> = node
                    .child_nodes()
                    .map(|c| match c.kind {
                        NodeKind::StringLiteral => {
                            Segment::Text(c.text_attr(Field::Value).unwrap_or_default().to_string())
                        }
                        _ => Segment::Hole,
                    })
                    .collect();
                if segs.is_empty() {
                    segs.push(Segment::Text(String::new()));
                }
                segs
            }
            _ => return None,
        };
        Some(QueryText { segments, origin })
    }

    /// The template with each hole shown as `{}`.
    pub fn template(&self) -> String {
        self.segments
            .iter()
            .map(|s| match s {
                Segment::Text(t) => t.as_str(),
                Segment::Hole => "{}",
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VlmCallSite {
    pub callee: String,
    /// Source text of the receiver expression.
    pub receiver: String,
    /// Span of the whole call expression.
    pub span: Span,
    pub query: QueryText,
    /// Whether the call passes a `to_yesno` keyword.
    pub to_yesno: bool,
}

/// All registry calls in source order, each with its query resolved.
pub fn extract_call_sites(tree: &SyntaxTree, registry: &CalleeRegistry) -> Vec<VlmCallSite> {
    let mut sites: Vec<VlmCallSite> = tree
        .root()
        .walk()
        .filter_map(|node| {
            let (callee, receiver) = registry_callee(node, registry)?;
            Some(VlmCallSite {
                callee: callee.to_string(),
                receiver: tree.slice(receiver.span).to_string(),
                span: node.span,
                query: QueryText::unresolved(),
                to_yesno: node
                    .children_of(Field::Keywords)
                    .any(|k| k.text_attr(Field::Arg) == Some("to_yesno")),
            })
        })
        .collect();
    sites.sort_by_key(|s| (s.span.offset, s.span.len));
    let spans: Vec<_> = sites.iter().map(|s| s.span).collect();
    for (site, query) in sites.iter_mut().zip(reaching::resolve_query_texts(&spans, tree)) {
        site.query = query;
    }
    sites
}

/// Callee name and receiver node when `node` is a call to a registry method.
fn registry_callee<'a>(node: &'a AstNode, registry: &CalleeRegistry) -> Option<(&'a str, &'a AstNode)> {
    if node.kind != NodeKind::Call {
        return None;
    }
    let func = node.child(Field::Func)?;
    if func.kind != NodeKind::Attribute {
        return None;
    }
    let name = func.text_attr(Field::Attr)?;
    registry
        .contains(name)
        .then(|| func.child(Field::Value).map(|r| (name, r)))
        .flatten()
}

/// Call and token statistics for one program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VlmMetrics {
    pub call_count: usize,
    /// Token count of every resolved site, in source order.
    pub token_counts: Vec<usize>,
    /// Mean of `token_counts`; 0 when there is nothing to average.
    pub token_mean: f64,
    /// False when `token_mean` is the placeholder 0.
    pub token_mean_defined: bool,
    pub unresolved_sites: usize,
}

pub fn vlm_metrics(tree: &SyntaxTree, registry: &CalleeRegistry) -> VlmMetrics {
    metrics_from_sites(&extract_call_sites(tree, registry))
}

pub fn metrics_from_sites(sites: &[VlmCallSite]) -> VlmMetrics {
    let token_counts: Vec<usize> = sites
        .iter()
        .filter(|s| s.query.is_resolved())
        .map(|s| tokenize_query(&s.query).len())
        .collect();
    let defined = !token_counts.is_empty();
    let token_mean = if defined {
        token_counts.iter().sum::<usize>() as f64 / token_counts.len() as f64
    } else {
        0.0
    };
    VlmMetrics {
        call_count: sites.len(),
        unresolved_sites: sites.len() - token_counts.len(),
        token_counts,
        token_mean,
        token_mean_defined: defined,
    }
}
