//! Structural size metrics: AST node and edge counts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::parser::{AstNode, NodeKind, SyntaxTree};

/// Which links count as edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EdgeMode {
    /// Parent to child-node links only.
    Tree,
    /// Parent to child-node links plus one link per primitive attribute.
    #[default]
    Field,
}

impl EdgeMode {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeMode::Tree => "tree",
            EdgeMode::Field => "field",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructuralProfile {
    pub nodes_total: usize,
    pub edges_tree: usize,
    pub edges_field: usize,
    pub per_kind: BTreeMap<NodeKind, usize>,
    pub max_depth: usize,
}

pub fn count_nodes(tree: &SyntaxTree) -> usize {
    tree.node_count()
}

pub fn count_edges(tree: &SyntaxTree, mode: EdgeMode) -> usize {
    let root = tree.root();
    let links: usize = root.walk().map(|n| n.children.len()).sum();
    match mode {
        EdgeMode::Tree => links,
        EdgeMode::Field => links + root.walk().map(|n| n.attrs.len()).sum::<usize>(),
    }
}

pub fn structural_profile(tree: &SyntaxTree) -> StructuralProfile {
    let mut per_kind = BTreeMap::new();
    for node in tree.root().walk() {
        *per_kind.entry(node.kind).or_insert(0) += 1;
    }
    StructuralProfile {
        nodes_total: count_nodes(tree),
        edges_tree: count_edges(tree, EdgeMode::Tree),
        edges_field: count_edges(tree, EdgeMode::Field),
        per_kind,
        max_depth: depth(tree.root()),
    }
}

/// Depth of the deepest node, counting the root as 1.
fn depth(root: &AstNode) -> usize {
    let mut max = 0;
    let mut stack = vec![(root, 1)];
    while let Some((node, d)) = stack.pop() {
        max = max.max(d);
        stack.extend(node.child_nodes().map(|c| (c, d + 1)));
    }
    max
}
