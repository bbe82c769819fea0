use super::{ComparisonReport, CorpusReport, DatasetSummary, Metric, Stat, Verdict};

fn fmt_mean(s: Stat) -> String {
    s.mean.map_or_else(|| "-".to_string(), |m| format!("{m:.2}"))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |m| format!("{m:.2}"))
}

fn exclusion_cell(d: &DatasetSummary) -> String {
    match d.exclusion_fraction() {
        Some(f) => format!("{} ({:.2}%)", d.n_excluded, f * 100.0),
        None => "0".to_string(),
    }
}

/// Right-aligned plain-text table; the first column is left-aligned.
fn layout(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<String>| -> String {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, &w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect();
        parts.join("  ").trim_end().to_string()
    };
    let mut out = line(header.iter().map(|h| h.to_string()).collect());
    out.push('\n');
    out.push_str(&line(widths.iter().map(|&w| "-".repeat(w)).collect()));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row.clone()));
        out.push('\n');
    }
    out
}

/// One row per dataset: the four headline means, secondary tree-mode edges
/// and the exclusion count.
pub fn render_table(report: &CorpusReport) -> String {
    let header = [
        "Dataset",
        "Programs",
        "Excluded",
        "VLM Calls",
        "VLM Tokens",
        "AST Nodes",
        "AST Edges",
        "Tree Edges",
    ];
    let tokens = report.headline_tokens();
    let edges = report.headline_edges();
    let rows: Vec<Vec<String>> = report
        .datasets
        .iter()
        .map(|d| {
            vec![
                d.dataset.clone(),
                d.n_analyzed.to_string(),
                exclusion_cell(d),
                fmt_mean(d.vlm_calls),
                fmt_mean(d.stat(tokens)),
                fmt_mean(d.ast_nodes),
                fmt_mean(d.stat(edges)),
                fmt_mean(d.ast_edges_tree),
            ]
        })
        .collect();
    layout(&header, &rows)
}

/// CSV with one header line and one line per dataset. Undefined values are
/// empty cells.
pub fn render_csv(report: &CorpusReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![
        "dataset".to_string(),
        "n_analyzed".to_string(),
        "n_excluded".to_string(),
        "exclusion_fraction".to_string(),
    ];
    for m in Metric::ALL {
        header.push(format!("{}_mean", m.name()));
        header.push(format!("{}_std", m.name()));
    }
    w.write_record(&header).expect("in-memory write");
    let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for d in &report.datasets {
        let mut row = vec![
            d.dataset.clone(),
            d.n_analyzed.to_string(),
            d.n_excluded.to_string(),
            cell(d.exclusion_fraction()),
        ];
        for m in Metric::ALL {
            let s = d.stat(m);
            row.push(cell(s.mean));
            row.push(cell(s.std));
        }
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}

fn verdict_word(v: Verdict) -> &'static str {
    match v {
        Verdict::Greater => "greater",
        Verdict::Less => "less",
        Verdict::Equal => "equal",
        Verdict::Undefined => "undefined",
    }
}

/// Per-metric table of B against A for each compared pair.
pub fn render_comparison(comparisons: &[ComparisonReport]) -> String {
    let mut out = String::new();
    for c in comparisons {
        out.push_str(&format!("A = {}, B = {}\n", c.a.dataset, c.b.dataset));
        let rows: Vec<Vec<String>> = c
            .deltas
            .iter()
            .map(|d| {
                vec![
                    d.metric.name().to_string(),
                    fmt_opt(d.a),
                    fmt_opt(d.b),
                    d.delta.map_or_else(|| "-".to_string(), |x| format!("{x:+.2}")),
                    verdict_word(d.verdict).to_string(),
                ]
            })
            .collect();
        out.push_str(&layout(&["Metric", "A", "B", "B - A", "Verdict"], &rows));
    }
    out
}
