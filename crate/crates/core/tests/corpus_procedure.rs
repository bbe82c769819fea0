mod common;

use abcd::corpus::{analyze_corpus_with, sample_corpus, AnalysisConfig, Execution, SamplingMode};
use abcd::parser::parse_program;
use abcd::report::{serialize_report, CorpusReport};
use common::synth;

fn report_json(manifest: &abcd::corpus::CorpusManifest, execution: Execution) -> String {
    let config = AnalysisConfig::default();
    let run = analyze_corpus_with(manifest, &config, execution).unwrap();
    serialize_report(&CorpusReport::new(&run, &config))
}

#[test]
fn synthetic_programs_parse_and_reach_requested_length() {
    for seed in 0..50 {
        let text = synth::program(seed, 150);
        assert!(text.lines().count() >= 150);
        parse_program(&text).unwrap_or_else(|e| panic!("seed {seed}: {e}\n{text}"));
        assert!(parse_program(&synth::unparsable(seed)).is_err(), "seed {seed}");
    }
}

#[test]
fn exclusion_fraction_below_threshold_has_no_warning() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth::write_corpus(dir.path(), 100, 20, &["d"], &[3, 71]);
    let run = analyze_corpus_with(&manifest, &AnalysisConfig::default(), Execution::Parallel).unwrap();
    assert_eq!(run.exclusions.len(), 1);
    assert_eq!(run.exclusions[0].excluded, 2);
    assert_eq!(run.exclusions[0].fraction, 0.02);
    assert!(!run.exclusions[0].warning);
    assert!(run.warnings().is_empty());
}

#[test]
fn exclusion_fraction_above_threshold_warns() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth::write_corpus(dir.path(), 100, 20, &["d"], &[0, 10, 20, 30, 40]);
    let run = analyze_corpus_with(&manifest, &AnalysisConfig::default(), Execution::Parallel).unwrap();
    assert_eq!(run.exclusions[0].fraction, 0.05);
    assert!(run.exclusions[0].warning);
    assert_eq!(run.warnings().len(), 1);
}

#[test]
fn excluded_programs_do_not_enter_aggregates() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth::write_corpus(dir.path(), 10, 20, &["d"], &[4]);
    let config = AnalysisConfig::default();
    let run = analyze_corpus_with(&manifest, &config, Execution::Serial).unwrap();
    let report = CorpusReport::new(&run, &config);
    assert_eq!(report.datasets[0].n_analyzed, 9);
    assert_eq!(report.datasets[0].n_excluded, 1);
}

#[test]
fn serial_and_parallel_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth::write_corpus(dir.path(), 60, 40, &["a", "b", "c"], &[7]);
    assert_eq!(
        report_json(&manifest, Execution::Serial),
        report_json(&manifest, Execution::Parallel)
    );
}

#[test]
fn seeded_sampling_is_reproducible_and_seed_sensitive() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth::write_corpus(dir.path(), 200, 10, &["a", "b"], &[]);
    let one = sample_corpus(&manifest, 40, 11, SamplingMode::Stratified).unwrap();
    let two = sample_corpus(&manifest, 40, 11, SamplingMode::Stratified).unwrap();
    let other = sample_corpus(&manifest, 40, 12, SamplingMode::Stratified).unwrap();
    assert_eq!(one.entries, two.entries);
    assert_ne!(one.entries, other.entries);
    assert_eq!(one.len(), 80);
    for label in ["a", "b"] {
        assert_eq!(one.entries.iter().filter(|e| e.dataset == label).count(), 40);
    }
    assert_eq!(
        report_json(&one, Execution::Serial),
        report_json(&two, Execution::Parallel)
    );
}

#[test]
fn pooled_sampling_draws_overall() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth::write_corpus(dir.path(), 30, 5, &["a", "b", "c"], &[]);
    let pooled = sample_corpus(&manifest, 25, 3, SamplingMode::Pooled).unwrap();
    assert_eq!(pooled.len(), 25);
    assert!(sample_corpus(&manifest, 11, 3, SamplingMode::Stratified).is_err());
    assert!(sample_corpus(&manifest, 31, 3, SamplingMode::Pooled).is_err());
}

#[test]
fn aggregates_are_stable_under_manifest_permutation() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth::write_corpus(dir.path(), 24, 30, &["a", "b"], &[5]);
    let mut shuffled = manifest.clone();
    shuffled.entries.reverse();
    let config = AnalysisConfig::default();
    let a = CorpusReport::new(
        &analyze_corpus_with(&manifest, &config, Execution::Parallel).unwrap(),
        &config,
    );
    let b = CorpusReport::new(
        &analyze_corpus_with(&shuffled, &config, Execution::Parallel).unwrap(),
        &config,
    );
    assert_eq!(a.datasets, b.datasets);
}
