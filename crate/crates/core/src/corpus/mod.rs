//! Corpus ingestion, sampling and per-program analysis.

mod analyze;
mod config;
mod manifest;
mod sample;

pub use analyze::{
    analyze_corpus, analyze_corpus_with, exclusion_summary, metrics_for_tree, CorpusError, CorpusRun, ExclusionSummary,
    Execution, Outcome, ProgramMetrics, ProgramRecord,
};
pub use config::{AnalysisConfig, ConfigError, SamplingMode, TokenAggregation};
pub use manifest::{load_manifest, parse_manifest, CorpusManifest, ManifestEntry, ManifestError};
pub use sample::{sample_corpus, SampleError};
