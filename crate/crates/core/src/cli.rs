//! Command-line front end.
//!
//! Exit codes: 0 success, 1 analysis failure (unparsable input, unreadable
//! program, lint errors), 2 usage or configuration error, 3 manifest error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::corpus::{
    analyze_corpus_with, load_manifest, metrics_for_tree, sample_corpus, AnalysisConfig, Execution, ProgramMetrics,
    SamplingMode, TokenAggregation,
};
use crate::metrics::EdgeMode;
use crate::parser::{dump_tree, parse_program, DumpFormat, ParseError, NODE_KIND_VERSION};
use crate::report::{
    compare_reports, deserialize_report, render_comparison, render_csv, render_table, serialize_report, CorpusReport,
};
use crate::vlm::{extract_call_sites, lint_api_usage, CalleeRegistry, LintFinding, Severity, VlmCallSite};

pub const EXIT_OK: u8 = 0;
pub const EXIT_ANALYSIS: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_MANIFEST: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "abcd",
    version,
    about = "AST-based diagnosis metrics for visual-programming code"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the metrics of a single program.
    Analyze(AnalyzeArgs),
    /// Analyze a JSON Lines corpus manifest and report per-dataset means.
    Corpus(CorpusArgs),
    /// Compare two corpus reports metric by metric.
    Compare(CompareArgs),
    /// Print the syntax tree of a program.
    DumpAst(DumpArgs),
    /// Check a program against the visual-programming API.
    Lint(LintArgs),
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// JSON config file; individual flags override its values.
    #[arg(long, env = "ABCD_CONFIG")]
    pub config: Option<PathBuf>,
    /// Comma-separated method names counted as VLM calls.
    #[arg(long, value_delimiter = ',')]
    pub registry: Option<Vec<String>>,
    /// Edge counting mode used for the headline edge figure.
    #[arg(long, value_enum)]
    pub edge_mode: Option<EdgeMode>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Table,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SingleFormat {
    Json,
    Table,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub file: PathBuf,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long, value_enum, default_value = "table")]
    pub format: SingleFormat,
    /// Write the output here instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    pub manifest: PathBuf,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Number of programs to sample per dataset (or overall when pooled).
    #[arg(long)]
    pub sample: Option<usize>,
    /// Seed of the sampling generator.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Sample per dataset label or over the whole manifest.
    #[arg(long, value_enum)]
    pub sampling: Option<SamplingMode>,
    /// Headline token statistic.
    #[arg(long, value_enum)]
    pub token_aggregation: Option<TokenAggregation>,
    /// Exclusion fraction above which a warning is printed.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Analyze files one at a time instead of in parallel.
    #[arg(long)]
    pub serial: bool,
    #[arg(long, value_enum, default_value = "json")]
    pub format: ReportFormat,
    /// Write the output here instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Baseline report (A).
    pub report_a: PathBuf,
    /// Report compared against the baseline (B).
    pub report_b: PathBuf,
    #[arg(long, value_enum, default_value = "table")]
    pub format: SingleFormat,
    /// Write the output here instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DumpArgs {
    pub file: PathBuf,
    #[arg(long, value_enum, default_value = "sexpr")]
    pub format: DumpFormat,
    /// Write the output here instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LintArgs {
    pub file: PathBuf,
    /// JSON config file supplying `api_spec`.
    #[arg(long, env = "ABCD_CONFIG")]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    pub format: SingleFormat,
    /// Write the output here instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn new(code: u8, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }
}

type CliResult = Result<u8, CliError>;

/// Parse arguments, run the command and map the outcome to an exit code.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

pub fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Corpus(a) => corpus(a),
        Command::Compare(a) => compare(a),
        Command::DumpAst(a) => dump_ast(a),
        Command::Lint(a) => lint(a),
    }
}

fn load_config(path: Option<&Path>) -> Result<AnalysisConfig, CliError> {
    match path {
        Some(p) => AnalysisConfig::from_file(p).map_err(|e| CliError::new(EXIT_USAGE, e.to_string())),
        None => Ok(AnalysisConfig::default()),
    }
}

fn apply_common(config: &mut AnalysisConfig, args: &ConfigArgs) -> Result<(), CliError> {
    if let Some(names) = &args.registry {
        config.registry = CalleeRegistry::new(names.iter().map(|n| n.trim().to_string()))
            .map_err(|e| CliError::new(EXIT_USAGE, format!("--registry: {e}")))?;
    }
    if let Some(mode) = args.edge_mode {
        config.edge_mode = mode;
    }
    Ok(())
}

fn read_source(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::new(EXIT_ANALYSIS, format!("cannot read {}: {e}", path.display())))
}

fn parse_failure(path: &Path, e: &ParseError) -> CliError {
    CliError::new(
        EXIT_ANALYSIS,
        format!("{}:{}: {} error: {}", path.display(), e.span, e.phase, e.message),
    )
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::new(EXIT_ANALYSIS, format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::new(EXIT_ANALYSIS, format!("cannot write output: {e}")))
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct AnalyzeOutput<'a> {
    file: String,
    config_hash: String,
    node_kind_version: &'static str,
    edge_mode: EdgeMode,
    /// Edge count under `edge_mode`.
    edges: usize,
    #[serde(flatten)]
    metrics: &'a ProgramMetrics,
    sites: Vec<VlmCallSite>,
}

fn analyze(args: AnalyzeArgs) -> CliResult {
    let mut config = load_config(args.config.config.as_deref())?;
    apply_common(&mut config, &args.config)?;
    let text = read_source(&args.file)?;
    let tree = parse_program(&text).map_err(|e| parse_failure(&args.file, &e))?;
    let metrics = metrics_for_tree(&tree, &config);
    let sites = extract_call_sites(&tree, &config.registry);
    let out = match args.format {
        SingleFormat::Json => to_json(&AnalyzeOutput {
            file: args.file.display().to_string(),
            config_hash: config.config_hash(),
            node_kind_version: NODE_KIND_VERSION,
            edge_mode: config.edge_mode,
            edges: metrics.edges(config.edge_mode),
            metrics: &metrics,
            sites,
        }),
        SingleFormat::Table => {
            let tokens = if metrics.vlm.token_mean_defined {
                format!("{:.2}", metrics.vlm.token_mean)
            } else {
                "-".to_string()
            };
            let rows = [
                ("file".to_string(), args.file.display().to_string()),
                ("vlm calls".into(), metrics.vlm.call_count.to_string()),
                ("vlm tokens".into(), tokens),
                ("unresolved sites".into(), metrics.vlm.unresolved_sites.to_string()),
                ("ast nodes".into(), metrics.nodes.to_string()),
                (
                    format!("ast edges ({})", config.edge_mode.as_str()),
                    metrics.edges(config.edge_mode).to_string(),
                ),
                ("ast edges (tree)".into(), metrics.edges_tree.to_string()),
                ("lint findings".into(), metrics.lint_findings.len().to_string()),
            ];
            rows.iter().map(|(k, v)| format!("{k:<18}{v}\n")).collect()
        }
    };
    emit(args.output.as_deref(), &out)?;
    Ok(EXIT_OK)
}

fn corpus(args: CorpusArgs) -> CliResult {
    let mut config = load_config(args.config.config.as_deref())?;
    apply_common(&mut config, &args.config)?;
    if let Some(n) = args.sample {
        config.sample_size = Some(n);
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(mode) = args.sampling {
        config.sampling = mode;
    }
    if let Some(agg) = args.token_aggregation {
        config.token_aggregation = agg;
    }
    if let Some(t) = args.threshold {
        config.exclusion_warn_threshold = t;
    }
    config
        .validate()
        .map_err(|e| CliError::new(EXIT_USAGE, e.to_string()))?;

    let mut manifest = load_manifest(&args.manifest).map_err(|e| CliError::new(EXIT_MANIFEST, e.to_string()))?;
    if let Some(n) = config.sample_size {
        manifest = sample_corpus(&manifest, n, config.seed, config.sampling)
            .map_err(|e| CliError::new(EXIT_USAGE, format!("--sample: {e}")))?;
    }
    let execution = if args.serial {
        Execution::Serial
    } else {
        Execution::Parallel
    };
    let run =
        analyze_corpus_with(&manifest, &config, execution).map_err(|e| CliError::new(EXIT_ANALYSIS, e.to_string()))?;
    for w in run.warnings() {
        eprintln!("warning: {w}");
    }
    let report = CorpusReport::new(&run, &config);
    let out = match args.format {
        ReportFormat::Json => serialize_report(&report),
        ReportFormat::Table => render_table(&report),
        ReportFormat::Csv => render_csv(&report),
    };
    emit(args.output.as_deref(), &out)?;
    Ok(EXIT_OK)
}

fn read_report(path: &Path) -> Result<CorpusReport, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::new(EXIT_ANALYSIS, format!("cannot read {}: {e}", path.display())))?;
    deserialize_report(&text).map_err(|e| CliError::new(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn compare(args: CompareArgs) -> CliResult {
    let a = read_report(&args.report_a)?;
    let b = read_report(&args.report_b)?;
    let comparisons = compare_reports(&a, &b).map_err(|e| CliError::new(EXIT_USAGE, e.to_string()))?;
    let out = match args.format {
        SingleFormat::Json => to_json(&comparisons),
        SingleFormat::Table => render_comparison(&comparisons),
    };
    emit(args.output.as_deref(), &out)?;
    Ok(EXIT_OK)
}

fn dump_ast(args: DumpArgs) -> CliResult {
    let text = read_source(&args.file)?;
    let tree = parse_program(&text).map_err(|e| parse_failure(&args.file, &e))?;
    let mut out = dump_tree(&tree, args.format);
    out.push('\n');
    emit(args.output.as_deref(), &out)?;
    Ok(EXIT_OK)
}

fn lint(args: LintArgs) -> CliResult {
    let config = load_config(args.config.as_deref())?;
    let text = read_source(&args.file)?;
    let tree = parse_program(&text).map_err(|e| parse_failure(&args.file, &e))?;
    let findings: Vec<LintFinding> = lint_api_usage(&tree, &config.api_spec);
    let out = match args.format {
        SingleFormat::Json => to_json(&findings),
        SingleFormat::Table => findings
            .iter()
            .map(|f| {
                format!(
                    "{}:{}: {} [{}] {}\n",
                    args.file.display(),
                    f.span,
                    f.severity,
                    f.rule,
                    f.message
                )
            })
            .collect(),
    };
    emit(args.output.as_deref(), &out)?;
    let failed = findings.iter().any(|f| f.severity == Severity::Error);
    Ok(if failed { EXIT_ANALYSIS } else { EXIT_OK })
}
