//! Deterministic text serializations of syntax trees.

use std::fmt::Write;

use super::ast::{AstNode, Field, Value};
use super::SyntaxTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum DumpFormat {
    #[default]
    Sexpr,
    Json,
}

/// Serialize a tree. Structurally equal trees produce identical output.
pub fn dump_tree(tree: &SyntaxTree, format: DumpFormat) -> String {
    match format {
        DumpFormat::Sexpr => {
            let mut out = String::new();
            write_sexpr(tree.root(), &mut out);
            out
        }
        DumpFormat::Json => serde_json::to_string_pretty(tree.root()).expect("tree serialization cannot fail"),
    }
}

fn write_sexpr(node: &AstNode, out: &mut String) {
    out.push('(');
    out.push_str(node.kind.name());
    for attr in &node.attrs {
        out.push(' ');
        out.push_str(attr.field.name());
        out.push('=');
        write_value(attr.field, &attr.value, out);
    }
    for child in &node.children {
        out.push(' ');
        write_sexpr(&child.node, out);
    }
    out.push(')');
}

fn write_value(field: Field, value: &Value, out: &mut String) {
    match value {
        Value::None => out.push_str("None"),
        Value::Bool(true) => out.push_str("True"),
        Value::Bool(false) => out.push_str("False"),
        Value::Int(i) => {
            let _ = write!(out, "{i}");
        }
        Value::Float(f) => out.push_str(&python_float_repr(*f)),
        Value::Text(s) => {
            if field != Field::Value && is_bare_identifier(s) {
                out.push_str(s);
            } else {
                out.push_str(&serde_json::to_string(s).expect("string serialization cannot fail"));
            }
        }
    }
}

fn is_bare_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    let head_ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
    head_ok && chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !matches!(s, "None" | "True" | "False")
}

/// Shortest round-trip rendering of a float, in the host language's `repr`
/// style: positional notation for decimal exponents in [-4, 16), scientific
/// otherwise, with a two-digit minimum exponent.
pub fn python_float_repr(f: f64) -> String {
    if f.is_nan() {
        return "nan".into();
    }
    if f.is_infinite() {
        return if f > 0.0 { "inf" } else { "-inf" }.into();
    }
    let sci = format!("{:e}", f.abs());
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let sign = if f.is_sign_negative() { "-" } else { "" };
    if (-4..16).contains(&exp) {
        let n = digits.len() as i32;
        let body = if exp < 0 {
            format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
        } else if exp + 1 >= n {
            format!("{}{}.0", digits, "0".repeat((exp + 1 - n) as usize))
        } else {
            let (int, frac) = digits.split_at((exp + 1) as usize);
            format!("{int}.{frac}")
        };
        format!("{sign}{body}")
    } else {
        let mut m = digits[..1].to_string();
        if digits.len() > 1 {
            m.push('.');
            m.push_str(&digits[1..]);
        }
        let esign = if exp < 0 { '-' } else { '+' };
        format!("{sign}{m}e{esign}{:02}", exp.abs())
    }
}
