mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use abcd::corpus::{
    analyze_corpus_with, load_manifest, sample_corpus, AnalysisConfig, CorpusManifest, Execution, SamplingMode,
    TokenAggregation,
};
use abcd::metrics::{count_edges, count_nodes, EdgeMode};
use abcd::parser::{dump_tree, parse_program, DumpFormat};
use abcd::report::{serialize_report, CorpusReport, Metric};
use abcd::vlm::{extract_call_sites, tokenize_query, vlm_metrics, CalleeRegistry};
use common::*;
use proptest::test_runner::{Config, TestRunner};
use serde_json::Value;

type Outcome = Result<String, String>;

type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(message())
    }
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let names = program_names();
    let coverage = names.iter().filter(|n| n.starts_with("cov_")).count();
    ensure(names.len() >= 20, || format!("only {} fixture programs", names.len()))?;
    ensure(coverage >= 10, || format!("only {coverage} grammar-coverage programs"))?;
    ensure(
        names.iter().any(|n| n == "fevori") && names.iter().any(|n| n == "conquer"),
        || "listing fixtures missing".into(),
    )?;
    let counts: Value = serde_json::from_str(&read_golden("counts.json")).unwrap();
    for name in &names {
        let tree = parse_program(&read_program(name)).map_err(|e| format!("{name}: {e}"))?;
        let sexpr = dump_tree(&tree, DumpFormat::Sexpr);
        ensure(
            sexpr == read_golden(&format!("{name}.sexpr")).trim_end_matches('\n'),
            || format!("{name}: sexpr dump differs"),
        )?;
        let mut json: Value = serde_json::from_str(&dump_tree(&tree, DumpFormat::Json)).unwrap();
        strip_spans(&mut json);
        let want: Value = serde_json::from_str(&read_golden(&format!("{name}.json"))).unwrap();
        ensure(json == want, || format!("{name}: json dump differs"))?;
        let c = &counts[name.as_str()];
        let got = [
            count_nodes(&tree),
            count_edges(&tree, EdgeMode::Tree),
            count_edges(&tree, EdgeMode::Field),
        ];
        let want = ["nodes", "edges_tree", "edges_field"].map(|k| c[k].as_u64().unwrap_or(u64::MAX) as usize);
        ensure(got == want, || format!("{name}: counts {got:?} != {want:?}"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:.2?}"))?;
    Ok(format!(
        "{} files ({coverage} coverage) byte-exact in {elapsed:.2?}",
        names.len()
    ))
}

fn tree_invariant() -> Outcome {
    let mut runner = TestRunner::new(Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    });
    let cases = std::cell::Cell::new(0usize);
    let result = runner.run(&program_gen::program(), |text| {
        cases.set(cases.get() + 1);
        let tree =
            parse_program(&text).map_err(|e| proptest::test_runner::TestCaseError::fail(format!("rejected: {e}")))?;
        let nodes = count_nodes(&tree);
        let tree_edges = count_edges(&tree, EdgeMode::Tree);
        let field_edges = count_edges(&tree, EdgeMode::Field);
        proptest::prop_assert_eq!(tree_edges, nodes - 1);
        proptest::prop_assert!(field_edges >= tree_edges);
        Ok(())
    });
    result.map_err(|e| e.to_string())?;
    Ok(format!("{} generated programs, 0 violations", cases.get()))
}

fn call_site_ground_truth() -> Outcome {
    let fevori = parse_program(&read_program("fevori")).map_err(|e| e.to_string())?;
    let f = vlm_metrics(&fevori, &CalleeRegistry::default());
    let conquer = parse_program(&read_program("conquer")).map_err(|e| e.to_string())?;
    let c = vlm_metrics(&conquer, &CalleeRegistry::new(["simple_query"]).unwrap());
    ensure((f.call_count, f.unresolved_sites) == (2, 0), || {
        format!("FEVoRI: {} sites, {} unresolved", f.call_count, f.unresolved_sites)
    })?;
    ensure((c.call_count, c.unresolved_sites) == (6, 0), || {
        format!("ConQueR: {} sites, {} unresolved", c.call_count, c.unresolved_sites)
    })?;
    Ok("FEVoRI 2 sites, ConQueR 6 sites, 0 unresolved".into())
}

fn tokenizer_goldens() -> Outcome {
    let golden: Value = serde_json::from_str(&read_golden("queries.json")).unwrap();
    let mut checked = 0;
    for file in ["fevori", "conquer"] {
        let tree = parse_program(&read_program(file)).map_err(|e| e.to_string())?;
        let sites = extract_call_sites(&tree, &CalleeRegistry::default());
        let want: Vec<&Value> = golden["sites"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|s| s["file"] == format!("{file}.vp"))
            .collect();
        ensure(sites.len() == want.len(), || {
            format!("{file}: {} sites vs {} golden", sites.len(), want.len())
        })?;
        for (site, w) in sites.iter().zip(want) {
            let expected: Vec<String> = serde_json::from_value(w["tokens"].clone()).unwrap();
            let got = tokenize_query(&site.query);
            ensure(got == expected, || {
                format!("{file}:{}: {got:?} != {expected:?}", site.span.line)
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} harvested queries token-for-token"))
}

fn trend() -> Outcome {
    let manifest = load_manifest(&fixtures().join("corpus.jsonl")).map_err(|e| e.to_string())?;
    let mut lines = Vec::new();
    for aggregation in [TokenAggregation::Macro, TokenAggregation::Micro] {
        let config = AnalysisConfig {
            token_aggregation: aggregation,
            ..AnalysisConfig::default()
        };
        let run = analyze_corpus_with(&manifest, &config, Execution::Parallel).map_err(|e| e.to_string())?;
        let report = CorpusReport::new(&run, &config);
        let mean = |label: &str, metric: Metric| {
            report
                .datasets
                .iter()
                .find(|d| d.dataset == label)
                .and_then(|d| d.stat(metric).mean)
                .unwrap_or(f64::NAN)
        };
        let (n, t, c) = ("nextqa-style", "tim-style", "tim-conquer-style");
        for metric in [Metric::AstNodes, Metric::AstEdgesField] {
            ensure(
                mean(c, metric) > mean(t, metric) && mean(t, metric) > mean(n, metric),
                || format!("{} ordering fails", metric.name()),
            )?;
        }
        let tokens = report.headline_tokens();
        for metric in [Metric::VlmCalls, tokens] {
            ensure(mean(c, metric) > mean(n, metric), || {
                format!("{} ordering fails", metric.name())
            })?;
        }
        if aggregation == TokenAggregation::Macro {
            lines.push(format!(
                "nodes {:.2} > {:.2} > {:.2}, tokens {:.2} > {:.2}",
                mean(c, Metric::AstNodes),
                mean(t, Metric::AstNodes),
                mean(n, Metric::AstNodes),
                mean(c, tokens),
                mean(n, tokens)
            ));
        }
    }
    Ok(format!("{} (macro and micro)", lines.join("")))
}

fn report_bytes(manifest: &CorpusManifest, execution: Execution) -> Result<String, String> {
    let config = AnalysisConfig::default();
    let run = analyze_corpus_with(manifest, &config, execution).map_err(|e| e.to_string())?;
    Ok(serialize_report(&CorpusReport::new(&run, &config)))
}

fn corpus_procedure() -> Outcome {
    let config = AnalysisConfig::default();
    for (bad, want_fraction, want_warning) in [(vec![13, 58], 0.02, false), (vec![2, 21, 40, 77, 99], 0.05, true)] {
        let dir = tempfile::tempdir().unwrap();
        let manifest = synth::write_corpus(dir.path(), 100, 30, &["synthetic"], &bad);
        let run = analyze_corpus_with(&manifest, &config, Execution::Parallel).map_err(|e| e.to_string())?;
        let e = &run.exclusions[0];
        ensure(e.fraction == want_fraction && e.warning == want_warning, || {
            format!("{} planted: fraction {} warning {}", bad.len(), e.fraction, e.warning)
        })?;
        ensure(run.warnings().is_empty() != want_warning, || {
            "warning list disagrees".into()
        })?;
    }

    let dir = tempfile::tempdir().unwrap();
    let manifest = synth::write_corpus(dir.path(), 1000, 30, &["synthetic"], &[]);
    let first = sample_corpus(&manifest, 512, 2024, SamplingMode::Stratified).map_err(|e| e.to_string())?;
    let second = sample_corpus(&manifest, 512, 2024, SamplingMode::Stratified).map_err(|e| e.to_string())?;
    ensure(first.len() == 512, || format!("sampled {} entries", first.len()))?;
    let a = report_bytes(&first, Execution::Parallel)?;
    let b = report_bytes(&second, Execution::Parallel)?;
    let c = report_bytes(&first, Execution::Serial)?;
    ensure(a == b, || "two seeded runs differ".into())?;
    ensure(a == c, || "serial and concurrent runs differ".into())?;
    Ok("0.02 without warning, 0.05 with warning, n=512 of 1000 reproducible".into())
}

fn performance() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth::write_corpus(dir.path(), 1000, 150, &["a", "b", "c", "d"], &[]);
    let start = Instant::now();
    let concurrent = report_bytes(&manifest, Execution::Parallel)?;
    let elapsed = start.elapsed();
    let serial = report_bytes(&manifest, Execution::Serial)?;
    ensure(concurrent == serial, || "serial and concurrent outputs differ".into())?;
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:.2?}"))?;
    Ok(format!(
        "1000 files x 150 lines in {elapsed:.2?} on {} threads, serial identical",
        rayon::current_num_threads()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("oracle equivalence", oracle_equivalence),
        ("tree invariant", tree_invariant),
        ("call-site ground truth", call_site_ground_truth),
        ("tokenizer goldens", tokenizer_goldens),
        ("dataset trend", trend),
        ("corpus procedure", corpus_procedure),
        ("performance bound", performance),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
