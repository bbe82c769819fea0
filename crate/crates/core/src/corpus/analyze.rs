use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{AnalysisConfig, CorpusManifest, ManifestEntry};
use crate::metrics::{count_edges, count_nodes, structural_profile, EdgeMode, StructuralProfile};
use crate::parser::{parse_source, ParseError, SourceProgram, SyntaxTree};
use crate::vlm::{lint_api_usage, vlm_metrics, LintFinding, VlmMetrics};

/// The four diagnosis metrics of one program plus diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProgramMetrics {
    pub vlm: VlmMetrics,
    pub nodes: usize,
    pub edges_tree: usize,
    pub edges_field: usize,
    pub profile: StructuralProfile,
    pub lint_findings: Vec<LintFinding>,
}

impl ProgramMetrics {
    pub fn edges(&self, mode: EdgeMode) -> usize {
        match mode {
            EdgeMode::Tree => self.edges_tree,
            EdgeMode::Field => self.edges_field,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Analyzed(ProgramMetrics),
    /// The program did not parse and is left out of every aggregate.
    Excluded(ParseError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProgramRecord {
    pub id: String,
    pub dataset: String,
    pub outcome: Outcome,
}

impl ProgramRecord {
    pub fn metrics(&self) -> Option<&ProgramMetrics> {
        match &self.outcome {
            Outcome::Analyzed(m) => Some(m),
            Outcome::Excluded(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExclusionSummary {
    pub dataset: String,
    pub total: usize,
    pub excluded: usize,
    pub fraction: f64,
    /// Whether `fraction` exceeds the configured threshold.
    pub warning: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusRun {
    /// One record per manifest entry, in manifest order.
    pub records: Vec<ProgramRecord>,
    /// Per dataset label, in ascending label order.
    pub exclusions: Vec<ExclusionSummary>,
}

impl CorpusRun {
    pub fn warnings(&self) -> Vec<String> {
        self.exclusions
            .iter()
            .filter(|e| e.warning)
            .map(|e| {
                format!(
                    "dataset {:?}: {} of {} programs excluded ({:.2}%) exceeds the warning threshold",
                    e.dataset,
                    e.excluded,
                    e.total,
                    e.fraction * 100.0
                )
            })
            .collect()
    }
}

#[derive(Debug, thiserror::Error)]
#[error("cannot read program {id:?} at {}: {source}", path.display())]
pub struct CorpusError {
    pub id: String,
    pub path: PathBuf,
    #[source]
    pub source: std::io::Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

pub fn metrics_for_tree(tree: &SyntaxTree, config: &AnalysisConfig) -> ProgramMetrics {
    ProgramMetrics {
        vlm: vlm_metrics(tree, &config.registry),
        nodes: count_nodes(tree),
        edges_tree: count_edges(tree, EdgeMode::Tree),
        edges_field: count_edges(tree, EdgeMode::Field),
        profile: structural_profile(tree),
        lint_findings: lint_api_usage(tree, &config.api_spec),
    }
}

fn analyze_entry(entry: &ManifestEntry, config: &AnalysisConfig) -> Result<ProgramRecord, CorpusError> {
    let text = std::fs::read_to_string(&entry.path).map_err(|source| CorpusError {
        id: entry.id.clone(),
        path: entry.path.clone(),
        source,
    })?;
    let source = Arc::new(SourceProgram {
        path: Some(entry.path.clone()),
        dataset: Some(entry.dataset.clone()),
        text,
    });
    let outcome = match parse_source(source) {
        Ok(tree) => Outcome::Analyzed(metrics_for_tree(&tree, config)),
        Err(e) => Outcome::Excluded(e),
    };
    Ok(ProgramRecord {
        id: entry.id.clone(),
        dataset: entry.dataset.clone(),
        outcome,
    })
}

/// Analyze every manifest entry. Unparsable programs are excluded; an
/// unreadable file aborts the run with the first such error in manifest
/// order.
pub fn analyze_corpus(manifest: &CorpusManifest, config: &AnalysisConfig) -> Result<CorpusRun, CorpusError> {
    analyze_corpus_with(manifest, config, Execution::Parallel)
}

pub fn analyze_corpus_with(
    manifest: &CorpusManifest,
    config: &AnalysisConfig,
    execution: Execution,
) -> Result<CorpusRun, CorpusError> {
    let results: Vec<Result<ProgramRecord, CorpusError>> = match execution {
        Execution::Serial => manifest.entries.iter().map(|e| analyze_entry(e, config)).collect(),
        Execution::Parallel => manifest.entries.par_iter().map(|e| analyze_entry(e, config)).collect(),
    };
    let records = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let exclusions = exclusion_summary(&records, config.exclusion_warn_threshold);
    Ok(CorpusRun { records, exclusions })
}

pub fn exclusion_summary(records: &[ProgramRecord], threshold: f64) -> Vec<ExclusionSummary> {
    let mut counts: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for r in records {
        let c = counts.entry(r.dataset.as_str()).or_default();
        c.0 += 1;
        if r.metrics().is_none() {
            c.1 += 1;
        }
    }
    counts
        .into_iter()
        .map(|(dataset, (total, excluded))| {
            let fraction = excluded as f64 / total as f64;
            ExclusionSummary {
                dataset: dataset.to_string(),
                total,
                excluded,
                fraction,
                warning: fraction > threshold,
            }
        })
        .collect()
}
