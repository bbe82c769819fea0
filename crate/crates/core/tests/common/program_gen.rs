//! Random in-grammar programs for property tests.

use proptest::prelude::*;

const NAMES: &[&str] = &["a", "b", "frame", "video", "info", "x1", "_q", "patch"];
const ATTRS: &[&str] = &["simple_query", "llm_query", "find", "lower", "items", "value"];

fn name() -> impl Strategy<Value = String> {
    prop::sample::select(NAMES).prop_map(str::to_string)
}

fn text() -> impl Strategy<Value = String> {
    "[a-zA-Z ?.,']{0,12}"
}

fn quoted(s: &str) -> String {
    format!("\"{s}\"")
}

/// Expressions safe inside a formatted-string hole.
fn hole_expr() -> impl Strategy<Value = String> {
    prop_oneof![
        name(),
        (0i64..1000).prop_map(|i| i.to_string()),
        (name(), prop::sample::select(ATTRS)).prop_map(|(n, a)| format!("{n}.{a}")),
        (name(), name()).prop_map(|(x, y)| format!("{x} + {y}")),
    ]
}

fn fstring() -> impl Strategy<Value = String> {
    prop::collection::vec(
        prop_oneof![
            text().prop_map(|t| t),
            (hole_expr(), prop::option::of(prop::sample::select(&["!r", "!s"][..])))
                .prop_map(|(e, c)| format!("{{{e}{}}}", c.unwrap_or(""))),
        ],
        0..4,
    )
    .prop_map(|parts| format!("f\"{}\"", parts.concat()))
}

fn atom() -> impl Strategy<Value = String> {
    prop_oneof![
        name(),
        (0i64..100_000).prop_map(|i| i.to_string()),
        (0u32..10_000).prop_map(|i| format!("{}.{}", i / 100, i % 100)),
        text().prop_map(|t| quoted(&t)),
        fstring(),
        prop::sample::select(&["True", "False", "None"][..]).prop_map(str::to_string),
    ]
}

const BINOPS: &[&str] = &["+", "-", "*", "/", "//", "%", "**", "|", "&", "^", "<<", ">>", "@"];
const CMPOPS: &[&str] = &["<", ">", "==", "!=", "<=", ">=", "in", "not in", "is", "is not"];

pub fn expr() -> impl Strategy<Value = String> {
    atom().prop_recursive(4, 48, 4, |inner| {
        prop_oneof![
            (inner.clone(), prop::sample::select(BINOPS), inner.clone())
                .prop_map(|(l, op, r)| format!("({l} {op} {r})")),
            (prop::sample::select(&["-", "+", "~", "not "][..]), inner.clone())
                .prop_map(|(op, e)| format!("({op}{e})")),
            (
                prop::collection::vec(inner.clone(), 2..4),
                prop::sample::select(&["and", "or"][..])
            )
                .prop_map(|(v, op)| format!("({})", v.join(&format!(" {op} ")))),
            (
                inner.clone(),
                prop::collection::vec((prop::sample::select(CMPOPS), inner.clone()), 1..3)
            )
                .prop_map(|(l, rest)| {
                    let tail: String = rest.iter().map(|(op, e)| format!(" {op} {e}")).collect();
                    format!("({l}{tail})")
                }),
            (
                inner.clone(),
                prop::sample::select(ATTRS),
                prop::collection::vec(inner.clone(), 0..3),
                prop::collection::vec((name(), inner.clone()), 0..2)
            )
                .prop_map(|(recv, attr, args, kwargs)| {
                    let mut all: Vec<String> = args;
                    let mut seen = Vec::new();
                    for (k, v) in kwargs {
                        if !seen.contains(&k) {
                            all.push(format!("{k}={v}"));
                            seen.push(k);
                        }
                    }
                    format!("({recv}).{attr}({})", all.join(", "))
                }),
            (inner.clone(), inner.clone()).prop_map(|(v, i)| format!("({v})[{i}]")),
            (
                inner.clone(),
                prop::option::of(inner.clone()),
                prop::option::of(inner.clone())
            )
                .prop_map(|(v, lo, hi)| format!(
                    "({v})[{}:{}]",
                    lo.unwrap_or_default(),
                    hi.unwrap_or_default()
                )),
            prop::collection::vec(inner.clone(), 0..4).prop_map(|v| format!("[{}]", v.join(", "))),
            prop::collection::vec(inner.clone(), 0..4).prop_map(|v| match v.len() {
                1 => format!("({},)", v[0]),
                _ => format!("({})", v.join(", ")),
            }),
            prop::collection::vec((inner.clone(), inner), 0..3).prop_map(|v| {
                let items: Vec<String> = v.iter().map(|(k, x)| format!("{k}: {x}")).collect();
                format!("{{{}}}", items.join(", "))
            }),
        ]
    })
}

#[derive(Debug, Clone)]
enum Stmt {
    Simple(String),
    If(String, Vec<Stmt>, Vec<Stmt>),
    For(String, String, Vec<Stmt>),
    While(String, Vec<Stmt>),
    Def(String, Vec<String>, Vec<Stmt>),
}

fn simple() -> impl Strategy<Value = Stmt> {
    prop_oneof![
        (name(), expr()).prop_map(|(n, e)| Stmt::Simple(format!("{n} = {e}"))),
        (name(), name(), expr()).prop_map(|(a, b, e)| Stmt::Simple(format!("{a}, {b} = {e}"))),
        (name(), expr(), expr()).prop_map(|(n, i, e)| Stmt::Simple(format!("{n}[{i}] = {e}"))),
        (name(), prop::sample::select(&["+=", "-=", "*=", "|="][..]), expr())
            .prop_map(|(n, op, e)| Stmt::Simple(format!("{n} {op} {e}"))),
        expr().prop_map(Stmt::Simple),
        prop::option::of(expr()).prop_map(|e| Stmt::Simple(format!("return {}", e.unwrap_or_default()))),
        prop::sample::select(&["pass", "break", "continue"][..]).prop_map(|s| Stmt::Simple(s.to_string())),
    ]
}

fn stmt() -> impl Strategy<Value = Stmt> {
    simple().prop_recursive(3, 24, 3, |inner| {
        let body = || prop::collection::vec(inner.clone(), 1..3);
        prop_oneof![
            (expr(), body(), prop::collection::vec(inner.clone(), 0..2)).prop_map(|(t, b, o)| Stmt::If(t, b, o)),
            (name(), expr(), body()).prop_map(|(t, i, b)| Stmt::For(t, i, b)),
            (expr(), body()).prop_map(|(t, b)| Stmt::While(t, b)),
            (name(), prop::collection::btree_set(name(), 0..4), body()).prop_map(|(n, p, b)| Stmt::Def(
                n,
                p.into_iter().collect(),
                b
            )),
        ]
    })
}

fn render(stmts: &[Stmt], depth: usize, out: &mut String) {
    let pad = "    ".repeat(depth);
    for s in stmts {
        match s {
            Stmt::Simple(t) => out.push_str(&format!("{pad}{t}\n")),
            Stmt::If(t, body, orelse) => {
                out.push_str(&format!("{pad}if {t}:\n"));
                render(body, depth + 1, out);
                if !orelse.is_empty() {
                    out.push_str(&format!("{pad}else:\n"));
                    render(orelse, depth + 1, out);
                }
            }
            Stmt::For(t, i, body) => {
                out.push_str(&format!("{pad}for {t} in {i}:\n"));
                render(body, depth + 1, out);
            }
            Stmt::While(t, body) => {
                out.push_str(&format!("{pad}while {t}:\n"));
                render(body, depth + 1, out);
            }
            Stmt::Def(n, params, body) => {
                out.push_str(&format!("{pad}def {n}({}):\n", params.join(", ")));
                render(body, depth + 1, out);
            }
        }
    }
}

/// Source text of a random program inside the grammar.
pub fn program() -> impl Strategy<Value = String> {
    prop::collection::vec(stmt(), 0..6).prop_map(|stmts| {
        let mut out = String::new();
        render(&stmts, 0, &mut out);
        out
    })
}
