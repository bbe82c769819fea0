//! Treebank-style word tokenizer, a rule-for-rule port of the improved
//! treebank tokenizer in the NLTK toolkit (`NLTKWordTokenizer`).
//!
//! The text goes through an ordered cascade of regex rewrites that pad
//! tokens with spaces, then is split on whitespace. End-of-text anchors
//! are written so they also accept a final newline, as in the source
//! engine. Rules that need lookaround run only when the text contains
//! their required literal.

use std::sync::LazyLock;

use fancy_regex::Regex;

use super::{QueryText, Segment};

/// The token standing for one interpolated value.
pub const HOLE_TOKEN: &str = "⟨HOLE⟩";

struct Rule {
    re: Regex,
    rep: &'static str,
    /// Lowercase literal every match contains.
    needle: Option<&'static str>,
}

fn rule(pattern: &str, rep: &'static str, needle: Option<&'static str>) -> Rule {
    Rule {
        re: Regex::new(pattern).expect("tokenizer pattern compiles"),
        rep,
        needle,
    }
}

fn rules(specs: &[(&str, &'static str)]) -> Vec<Rule> {
    specs.iter().map(|(pattern, rep)| rule(pattern, rep, None)).collect()
}

static STARTING_QUOTES: LazyLock<Vec<Rule>> = LazyLock::new(|| {
    let mut r = rules(&[
        ("([«“‘„]|[`]+)", " ${1} "),
        (r#"^""#, "``"),
        ("(``)", " ${1} "),
        (r#"([ (\[{<])("|'{2})"#, "${1} `` "),
    ]);
    r.push(rule(
        r"(?i)(?<!\w)(')(?!(?:re|ve|ll|m|t|s|d|n)\b)(?=\w)",
        "${1} ",
        Some("'"),
    ));
    r
});

static PUNCTUATION: LazyLock<Vec<Rule>> = LazyLock::new(|| {
    rules(&[
        (r#"([^.])(\.)([\])}>"'»”’ ]*)\s*\z"#, "${1} ${2} ${3} "),
        (r"([:,])([^\d])", " ${1} ${2}"),
        (r"([:,])(\n?)\z", " ${1} ${2}"),
        (r"\.{2,}", " ${0} "),
        (r"[;@#$%&]", " ${0} "),
        (r"[\x{2012}-\x{2015}]", " ${0} "),
        (r#"([^.])(\.)([\])}>"']*)\s*\z"#, "${1} ${2}${3} "),
        (r"[?!]", " ${0} "),
        (r"([^'])' ", "${1} ' "),
        (r"[*]", " ${0} "),
    ])
});

static PARENS_BRACKETS: LazyLock<Vec<Rule>> = LazyLock::new(|| rules(&[(r"[\]\[(){}<>]", " ${0} ")]));

static DOUBLE_DASHES: LazyLock<Vec<Rule>> = LazyLock::new(|| rules(&[("--", " -- ")]));

static ENDING_QUOTES: LazyLock<Vec<Rule>> = LazyLock::new(|| {
    rules(&[
        ("([»”’])", " ${1} "),
        ("''", " '' "),
        ("\"", " '' "),
        (r"\s+", " "),
        ("([^' ])('[sS]|'[mM]|'[dD]|') ", "${1} ${2} "),
        ("([^' ])('ll|'LL|'re|'RE|'ve|'VE|n't|N'T) ", "${1} ${2} "),
    ])
});

static CONTRACTIONS: LazyLock<Vec<Rule>> = LazyLock::new(|| {
    let mut r = rules(&[
        (r"(?i)\b(can)(not)\b", " ${1} ${2} "),
        (r"(?i)\b(d)('ye)\b", " ${1} ${2} "),
        (r"(?i)\b(gim)(me)\b", " ${1} ${2} "),
        (r"(?i)\b(gon)(na)\b", " ${1} ${2} "),
        (r"(?i)\b(got)(ta)\b", " ${1} ${2} "),
        (r"(?i)\b(lem)(me)\b", " ${1} ${2} "),
        (r"(?i)\b(more)('n)\b", " ${1} ${2} "),
        (r"(?i) ('t)(is)\b", " ${1} ${2} "),
        (r"(?i) ('t)(was)\b", " ${1} ${2} "),
    ]);
    r.insert(7, rule(r"(?i)\b(wan)(na)(?=\s)", " ${1} ${2} ", Some("wanna")));
    r
});

fn apply(text: String, rules: &[Rule]) -> String {
    let lower = text.to_lowercase();
    rules.iter().fold(text, |t, r| match r.needle {
        Some(needle) if !lower.contains(needle) => t,
        _ => r.re.replace_all(&t, r.rep).into_owned(),
    })
}

/// Split one literal string into treebank tokens.
pub fn tokenize_text(text: &str) -> Vec<String> {
    let mut t = apply(text.to_string(), &STARTING_QUOTES);
    t = apply(t, &PUNCTUATION);
    t = apply(t, &PARENS_BRACKETS);
    t = apply(t, &DOUBLE_DASHES);
    t = apply(format!(" {t} "), &ENDING_QUOTES);
    t = apply(t, &CONTRACTIONS);
    t.split_whitespace().map(str::to_string).collect()
}

/// Tokens of a query template; each hole contributes [`HOLE_TOKEN`].
pub fn tokenize_query(query: &QueryText) -> Vec<String> {
    query
        .segments
        .iter()
        .flat_map(|s| match s {
            Segment::Text(t) => tokenize_text(t),
            Segment::Hole => vec![HOLE_TOKEN.to_string()],
        })
        .collect()
}
