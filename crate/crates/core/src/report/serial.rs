use serde::de::DeserializeOwned;
use serde_path_to_error::Segment;

use super::{CorpusReport, REPORT_SCHEMA_VERSION};
use crate::parser::{AstNode, NodeKind};

/// A JSON document that does not match the expected schema.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("schema violation at {pointer}: {message}")]
pub struct SchemaError {
    /// JSON pointer to the offending location ("" is the document root).
    pub pointer: String,
    pub message: String,
}

fn json_pointer(path: &serde_path_to_error::Path) -> String {
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => {
                out.push('/');
                out.push_str(&key.replace('~', "~0").replace('/', "~1"));
            }
            Segment::Enum { variant } => {
                out.push('/');
                out.push_str(variant);
            }
            Segment::Unknown => out.push_str("/?"),
        }
    }
    out
}

fn from_json<T: DeserializeOwned>(text: &str) -> Result<T, SchemaError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let value: T = serde_path_to_error::deserialize(de).map_err(|e| SchemaError {
        pointer: json_pointer(e.path()),
        message: e.inner().to_string(),
    })?;
    Ok(value)
}

/// Canonical JSON text of a report. Field order follows the schema.
pub fn serialize_report(report: &CorpusReport) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    text
}

pub fn deserialize_report(text: &str) -> Result<CorpusReport, SchemaError> {
    let report: CorpusReport = from_json(text)?;
    if report.schema_version != REPORT_SCHEMA_VERSION {
        return Err(SchemaError {
            pointer: "/schema_version".into(),
            message: format!(
                "unsupported schema version {}, expected {REPORT_SCHEMA_VERSION}",
                report.schema_version
            ),
        });
    }
    Ok(report)
}

/// Read a tree written by the JSON tree dump.
pub fn deserialize_tree(text: &str) -> Result<AstNode, SchemaError> {
    let root: AstNode = from_json(text)?;
    if root.kind != NodeKind::Module {
        return Err(SchemaError {
            pointer: "/kind".into(),
            message: format!("root must be a Module, found {}", root.kind),
        });
    }
    Ok(root)
}

#[cfg(test)]
mod tests {
    use super::super::tests::{excluded, record};
    use super::*;
    use crate::corpus::{exclusion_summary, AnalysisConfig, CorpusRun};
    use crate::parser::{dump_tree, parse_program, DumpFormat};

    fn report() -> CorpusReport {
        let records = vec![record("a", 10, &[3, 4]), record("b", 7, &[]), excluded("b")];
        let run = CorpusRun {
            exclusions: exclusion_summary(&records, 0.03),
            records,
        };
        CorpusReport::new(&run, &AnalysisConfig::default())
    }

    #[test]
    fn round_trip() {
        let r = report();
        let text = serialize_report(&r);
        assert_eq!(deserialize_report(&text).unwrap(), r);
        assert_eq!(serialize_report(&deserialize_report(&text).unwrap()), text);
    }

    #[test]
    fn tampered_field_name_reports_path() {
        let text = serialize_report(&report()).replacen("\"n_analyzed\"", "\"n_analysed\"", 1);
        let err = deserialize_report(&text).unwrap_err();
        assert!(err.pointer.starts_with("/datasets/0"), "{err}");
        assert!(err.message.contains("n_analysed"), "{err}");
    }

    #[test]
    fn wrong_type_reports_path() {
        let text = serialize_report(&report()).replacen("\"seed\": 0", "\"seed\": \"zero\"", 1);
        let err = deserialize_report(&text).unwrap_err();
        assert_eq!(err.pointer, "/seed");
    }

    #[test]
    fn schema_version_checked() {
        let text = serialize_report(&report()).replacen("\"schema_version\": 1", "\"schema_version\": 9", 1);
        assert_eq!(deserialize_report(&text).unwrap_err().pointer, "/schema_version");
    }

    #[test]
    fn tree_dump_round_trips() {
        let tree = parse_program("def f(a):\n    return f\"{a!r:>3}\" + 'x'\n").unwrap();
        let back = deserialize_tree(&dump_tree(&tree, DumpFormat::Json)).unwrap();
        assert_eq!(&back, tree.root());
        assert!(deserialize_tree(
            r#"{"kind":"Pass","span":{"line":1,"col":1,"offset":0,"len":4},"attrs":[],"children":[]}"#
        )
        .is_err());
    }
}
