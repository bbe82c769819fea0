//! Per-dataset aggregation, comparison and serialization of corpus results.

mod render;
mod serial;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{AnalysisConfig, CorpusRun, ProgramRecord, SamplingMode, TokenAggregation};
use crate::metrics::EdgeMode;
use crate::vlm::CalleeRegistry;

pub use render::{render_comparison, render_csv, render_table};
pub use serial::{deserialize_report, deserialize_tree, serialize_report, SchemaError};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Mean and population standard deviation; both absent over no values.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stat {
    pub mean: Option<f64>,
    pub std: Option<f64>,
}

impl Stat {
    /// Mean and population standard deviation. Values are summed in
    /// ascending order so the result does not depend on input order.
    pub fn of(values: &[f64]) -> Stat {
        if values.is_empty() {
            return Stat::default();
        }
        let mut values = values.to_vec();
        values.sort_by(f64::total_cmp);
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Stat {
            mean: Some(mean),
            std: Some(var.sqrt()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSummary {
    pub dataset: String,
    pub config_hash: String,
    pub n_analyzed: usize,
    pub n_excluded: usize,
    pub vlm_calls: Stat,
    /// Mean over programs of each program's mean tokens per call. Programs
    /// without a resolved call site do not contribute.
    pub vlm_tokens_macro: Stat,
    /// Mean over all resolved call sites pooled.
    pub vlm_tokens_micro: Stat,
    pub ast_nodes: Stat,
    pub ast_edges_field: Stat,
    pub ast_edges_tree: Stat,
    pub unresolved_sites: usize,
}

impl DatasetSummary {
    pub fn exclusion_fraction(&self) -> Option<f64> {
        let total = self.n_analyzed + self.n_excluded;
        (total > 0).then(|| self.n_excluded as f64 / total as f64)
    }

    pub fn stat(&self, metric: Metric) -> Stat {
        match metric {
            Metric::VlmCalls => self.vlm_calls,
            Metric::VlmTokensMacro => self.vlm_tokens_macro,
            Metric::VlmTokensMicro => self.vlm_tokens_micro,
            Metric::AstNodes => self.ast_nodes,
            Metric::AstEdgesField => self.ast_edges_field,
            Metric::AstEdgesTree => self.ast_edges_tree,
        }
    }
}

/// Summaries of one records group; `records` may hold several datasets.
pub fn aggregate(records: &[ProgramRecord], config_hash: &str) -> Vec<DatasetSummary> {
    let mut groups: BTreeMap<&str, Vec<&ProgramRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(r.dataset.as_str()).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|(dataset, group)| summarize(dataset, &group, config_hash))
        .collect()
}

fn summarize(dataset: &str, group: &[&ProgramRecord], config_hash: &str) -> DatasetSummary {
    let analyzed: Vec<_> = group.iter().filter_map(|r| r.metrics()).collect();
    let col =
        |f: &dyn Fn(&crate::corpus::ProgramMetrics) -> f64| -> Vec<f64> { analyzed.iter().map(|m| f(m)).collect() };
    let macro_tokens: Vec<f64> = analyzed
        .iter()
        .filter(|m| m.vlm.token_mean_defined)
        .map(|m| m.vlm.token_mean)
        .collect();
    let micro_tokens: Vec<f64> = analyzed
        .iter()
        .flat_map(|m| m.vlm.token_counts.iter().map(|&c| c as f64))
        .collect();
    DatasetSummary {
        dataset: dataset.to_string(),
        config_hash: config_hash.to_string(),
        n_analyzed: analyzed.len(),
        n_excluded: group.len() - analyzed.len(),
        vlm_calls: Stat::of(&col(&|m| m.vlm.call_count as f64)),
        vlm_tokens_macro: Stat::of(&macro_tokens),
        vlm_tokens_micro: Stat::of(&micro_tokens),
        ast_nodes: Stat::of(&col(&|m| m.nodes as f64)),
        ast_edges_field: Stat::of(&col(&|m| m.edges_field as f64)),
        ast_edges_tree: Stat::of(&col(&|m| m.edges_tree as f64)),
        unresolved_sites: analyzed.iter().map(|m| m.vlm.unresolved_sites).sum(),
    }
}

/// A full corpus report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub node_kind_version: String,
    pub config_hash: String,
    pub registry: CalleeRegistry,
    pub edge_mode: EdgeMode,
    pub token_aggregation: TokenAggregation,
    pub seed: u64,
    pub sample_size: Option<usize>,
    pub sampling: SamplingMode,
    pub datasets: Vec<DatasetSummary>,
    pub warnings: Vec<String>,
    pub programs: Vec<ProgramRecord>,
}

impl CorpusReport {
    pub fn new(run: &CorpusRun, config: &AnalysisConfig) -> Self {
        let config_hash = config.config_hash();
        CorpusReport {
            schema_version: REPORT_SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            node_kind_version: crate::parser::NODE_KIND_VERSION.to_string(),
            datasets: aggregate(&run.records, &config_hash),
            config_hash,
            registry: config.registry.clone(),
            edge_mode: config.edge_mode,
            token_aggregation: config.token_aggregation,
            seed: config.seed,
            sample_size: config.sample_size,
            sampling: config.sampling,
            warnings: run.warnings(),
            programs: run.records.clone(),
        }
    }

    /// Token statistic selected as the headline by the report's settings.
    pub fn headline_tokens(&self) -> Metric {
        match self.token_aggregation {
            TokenAggregation::Macro => Metric::VlmTokensMacro,
            TokenAggregation::Micro => Metric::VlmTokensMicro,
        }
    }

    /// Edge statistic selected as the headline by the report's settings.
    pub fn headline_edges(&self) -> Metric {
        match self.edge_mode {
            EdgeMode::Field => Metric::AstEdgesField,
            EdgeMode::Tree => Metric::AstEdgesTree,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    VlmCalls,
    VlmTokensMacro,
    VlmTokensMicro,
    AstNodes,
    AstEdgesField,
    AstEdgesTree,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::VlmCalls,
        Metric::VlmTokensMacro,
        Metric::VlmTokensMicro,
        Metric::AstNodes,
        Metric::AstEdgesField,
        Metric::AstEdgesTree,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::VlmCalls => "vlm_calls",
            Metric::VlmTokensMacro => "vlm_tokens_macro",
            Metric::VlmTokensMicro => "vlm_tokens_micro",
            Metric::AstNodes => "ast_nodes",
            Metric::AstEdgesField => "ast_edges_field",
            Metric::AstEdgesTree => "ast_edges_tree",
        }
    }
}

/// How B relates to A on one metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Greater,
    Less,
    /// Equal at two printed decimals.
    Equal,
    /// At least one side has no value.
    Undefined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricDelta {
    pub metric: Metric,
    pub a: Option<f64>,
    pub b: Option<f64>,
    /// `b - a`.
    pub delta: Option<f64>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonReport {
    pub a: DatasetSummary,
    pub b: DatasetSummary,
    pub deltas: Vec<MetricDelta>,
}

impl ComparisonReport {
    pub fn delta(&self, metric: Metric) -> &MetricDelta {
        self.deltas
            .iter()
            .find(|d| d.metric == metric)
            .expect("every metric is compared")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("summaries come from different configurations (config hash {a} vs {b}); rerun both with the same registry, edge mode and token aggregation")]
pub struct ConfigMismatch {
    pub a: String,
    pub b: String,
}

pub fn compare(a: &DatasetSummary, b: &DatasetSummary) -> Result<ComparisonReport, ConfigMismatch> {
    if a.config_hash != b.config_hash {
        return Err(ConfigMismatch {
            a: a.config_hash.clone(),
            b: b.config_hash.clone(),
        });
    }
    let deltas = Metric::ALL
        .iter()
        .map(|&metric| {
            let (x, y) = (a.stat(metric).mean, b.stat(metric).mean);
            let (delta, verdict) = match (x, y) {
                (Some(x), Some(y)) => {
                    let verdict = if format!("{x:.2}") == format!("{y:.2}") {
                        Verdict::Equal
                    } else if y > x {
                        Verdict::Greater
                    } else {
                        Verdict::Less
                    };
                    (Some(y - x), verdict)
                }
                _ => (None, Verdict::Undefined),
            };
            MetricDelta {
                metric,
                a: x,
                b: y,
                delta,
                verdict,
            }
        })
        .collect();
    Ok(ComparisonReport {
        a: a.clone(),
        b: b.clone(),
        deltas,
    })
}

/// Compare two reports: datasets with shared labels are paired by label,
/// otherwise every dataset of `a` is paired with every dataset of `b`.
pub fn compare_reports(a: &CorpusReport, b: &CorpusReport) -> Result<Vec<ComparisonReport>, ConfigMismatch> {
    if a.config_hash != b.config_hash {
        return Err(ConfigMismatch {
            a: a.config_hash.clone(),
            b: b.config_hash.clone(),
        });
    }
    let shared: Vec<(&DatasetSummary, &DatasetSummary)> = a
        .datasets
        .iter()
        .filter_map(|x| b.datasets.iter().find(|y| y.dataset == x.dataset).map(|y| (x, y)))
        .collect();
    let pairs = if shared.is_empty() {
        a.datasets
            .iter()
            .flat_map(|x| b.datasets.iter().map(move |y| (x, y)))
            .collect()
    } else {
        shared
    };
    pairs.into_iter().map(|(x, y)| compare(x, y)).collect()
}
