#!/usr/bin/env python3
"""Reference AST oracle for the VPLang fixture corpus.

Parses each fixture with CPython's own `ast` module, normalizes the tree to
the analyzer's node vocabulary and writes golden files:

  <name>.sexpr        s-expression dump (byte-exact target)
  <name>.json         structural JSON dump without spans
  counts.json         node / edge / depth counts per fixture

Normalization rules:
  * expr_context markers (Load/Store/Del) are dropped.
  * location attributes, type_comment, Constant.kind are dropped.
  * Import / ImportFrom statements are dropped.
  * `arguments` is flattened: each `arg` becomes a Parameter child of the
    FunctionDef (field "args"); defaults attach to the trailing parameters as
    a "default" child.
  * operator nodes become a text attribute holding the operator symbol.
  * str constants become StringLiteral, JoinedStr -> FormattedString,
    FormattedValue -> FormatHole (conversion kept only when given).
  * Expr -> ExprStmt, arg -> Parameter, keyword -> Keyword.

Usage: ast_oracle.py <programs-dir> <golden-dir>
"""

import ast
import json
import math
import re
import sys
from pathlib import Path

OPS = {
    ast.Add: "+", ast.Sub: "-", ast.Mult: "*", ast.Div: "/", ast.FloorDiv: "//",
    ast.Mod: "%", ast.Pow: "**", ast.MatMult: "@", ast.LShift: "<<",
    ast.RShift: ">>", ast.BitOr: "|", ast.BitXor: "^", ast.BitAnd: "&",
    ast.And: "and", ast.Or: "or", ast.Not: "not", ast.USub: "-", ast.UAdd: "+",
    ast.Invert: "~", ast.Eq: "==", ast.NotEq: "!=", ast.Lt: "<", ast.LtE: "<=",
    ast.Gt: ">", ast.GtE: ">=", ast.Is: "is", ast.IsNot: "is not", ast.In: "in",
    ast.NotIn: "not in",
}


class Unsupported(Exception):
    pass


def node(kind, attrs=(), children=()):
    return {"kind": kind, "attrs": list(attrs), "children": list(children)}


def attr(field, value):
    return {"field": field, "value": value}


def child(field, n):
    return {"field": field, "node": n}


def op_symbol(op):
    return OPS[type(op)]


def body(stmts, field="body"):
    out = []
    for s in stmts:
        if isinstance(s, (ast.Import, ast.ImportFrom)):
            continue
        out.append(child(field, conv(s)))
    return out


def conv(n):
    if isinstance(n, ast.Module):
        return node("Module", children=body(n.body))
    if isinstance(n, ast.FunctionDef):
        if n.decorator_list:
            raise Unsupported("decorators")
        a = n.args
        if a.posonlyargs or a.vararg or a.kwonlyargs or a.kwarg:
            raise Unsupported("non-positional parameters")
        params = []
        first_default = len(a.args) - len(a.defaults)
        for i, arg in enumerate(a.args):
            kids = []
            if arg.annotation is not None:
                kids.append(child("annotation", conv(arg.annotation)))
            if i >= first_default:
                kids.append(child("default", conv(a.defaults[i - first_default])))
            params.append(child("args", node("Parameter", [attr("arg", arg.arg)], kids)))
        kids = params + body(n.body)
        if n.returns is not None:
            kids.append(child("returns", conv(n.returns)))
        return node("FunctionDef", [attr("name", n.name)], kids)
    if isinstance(n, ast.For):
        return node("For", children=[child("target", conv(n.target)), child("iter", conv(n.iter))]
                    + body(n.body) + body(n.orelse, "orelse"))
    if isinstance(n, ast.While):
        return node("While", children=[child("test", conv(n.test))]
                    + body(n.body) + body(n.orelse, "orelse"))
    if isinstance(n, ast.If):
        return node("If", children=[child("test", conv(n.test))]
                    + body(n.body) + body(n.orelse, "orelse"))
    if isinstance(n, ast.Assign):
        return node("Assign", children=[child("targets", conv(t)) for t in n.targets]
                    + [child("value", conv(n.value))])
    if isinstance(n, ast.AugAssign):
        return node("AugAssign", [attr("op", op_symbol(n.op))],
                    [child("target", conv(n.target)), child("value", conv(n.value))])
    if isinstance(n, ast.Return):
        return node("Return", children=[] if n.value is None else [child("value", conv(n.value))])
    if isinstance(n, ast.Continue):
        return node("Continue")
    if isinstance(n, ast.Break):
        return node("Break")
    if isinstance(n, ast.Pass):
        return node("Pass")
    if isinstance(n, ast.Expr):
        return node("ExprStmt", children=[child("value", conv(n.value))])
    if isinstance(n, ast.Call):
        kids = [child("func", conv(n.func))]
        for a in n.args:
            if isinstance(a, ast.Starred):
                raise Unsupported("starred argument")
            kids.append(child("args", conv(a)))
        for k in n.keywords:
            if k.arg is None:
                raise Unsupported("**kwargs")
            kids.append(child("keywords", node("Keyword", [attr("arg", k.arg)], [child("value", conv(k.value))])))
        return node("Call", children=kids)
    if isinstance(n, ast.Attribute):
        return node("Attribute", [attr("attr", n.attr)], [child("value", conv(n.value))])
    if isinstance(n, ast.Subscript):
        return node("Subscript", children=[child("value", conv(n.value)), child("slice", conv(n.slice))])
    if isinstance(n, ast.Slice):
        kids = []
        for f in ("lower", "upper", "step"):
            v = getattr(n, f)
            if v is not None:
                kids.append(child(f, conv(v)))
        return node("Slice", children=kids)
    if isinstance(n, ast.Name):
        return node("Name", [attr("id", n.id)])
    if isinstance(n, ast.Constant):
        v = n.value
        if isinstance(v, str):
            return node("StringLiteral", [attr("value", v)])
        if v is None or isinstance(v, (bool, int, float)):
            return node("Constant", [attr("value", v)])
        raise Unsupported(f"constant of type {type(v).__name__}")
    if isinstance(n, ast.JoinedStr):
        return node("FormattedString", children=[child("values", conv(v)) for v in n.values])
    if isinstance(n, ast.FormattedValue):
        attrs = []
        if n.conversion != -1:
            attrs.append(attr("conversion", chr(n.conversion)))
        kids = [child("value", conv(n.value))]
        if n.format_spec is not None:
            kids.append(child("format_spec", conv(n.format_spec)))
        return node("FormatHole", attrs, kids)
    if isinstance(n, ast.Dict):
        if any(k is None for k in n.keys):
            raise Unsupported("dict unpacking")
        return node("Dict", children=[child("keys", conv(k)) for k in n.keys]
                    + [child("values", conv(v)) for v in n.values])
    if isinstance(n, ast.List):
        return node("List", children=[child("elts", conv(e)) for e in n.elts])
    if isinstance(n, ast.Tuple):
        return node("Tuple", children=[child("elts", conv(e)) for e in n.elts])
    if isinstance(n, ast.BinOp):
        return node("BinOp", [attr("op", op_symbol(n.op))],
                    [child("left", conv(n.left)), child("right", conv(n.right))])
    if isinstance(n, ast.BoolOp):
        return node("BoolOp", [attr("op", op_symbol(n.op))], [child("values", conv(v)) for v in n.values])
    if isinstance(n, ast.UnaryOp):
        return node("UnaryOp", [attr("op", op_symbol(n.op))], [child("operand", conv(n.operand))])
    if isinstance(n, ast.Compare):
        return node("Compare", [attr("ops", op_symbol(o)) for o in n.ops],
                    [child("left", conv(n.left))] + [child("comparators", conv(c)) for c in n.comparators])
    raise Unsupported(type(n).__name__)


IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def fmt_value(field, v):
    if v is None:
        return "None"
    if v is True:
        return "True"
    if v is False:
        return "False"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    if field != "value" and IDENT.match(v) and v not in ("None", "True", "False"):
        return v
    return json.dumps(v, ensure_ascii=False)


def sexpr(n):
    parts = [n["kind"]]
    parts += [f'{a["field"]}={fmt_value(a["field"], a["value"])}' for a in n["attrs"]]
    parts += [sexpr(c["node"]) for c in n["children"]]
    return "(" + " ".join(parts) + ")"


def counts(n, depth=1):
    nodes, attrs, max_depth = 1, len(n["attrs"]), depth
    per_kind = {n["kind"]: 1}
    for c in n["children"]:
        cn, ca, cd, ck = counts(c["node"], depth + 1)
        nodes += cn
        attrs += ca
        max_depth = max(max_depth, cd)
        for k, v in ck.items():
            per_kind[k] = per_kind.get(k, 0) + v
    return nodes, attrs, max_depth, per_kind


def main():
    src_dir, out_dir = Path(sys.argv[1]), Path(sys.argv[2])
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = {}
    for path in sorted(src_dir.glob("*.vp")):
        tree = conv(ast.parse(path.read_text(encoding="utf-8")))
        (out_dir / f"{path.stem}.sexpr").write_text(sexpr(tree) + "\n", encoding="utf-8")
        (out_dir / f"{path.stem}.json").write_text(
            json.dumps(tree, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")
        nodes, attrs, max_depth, per_kind = counts(tree)
        summary[path.stem] = {
            "nodes": nodes,
            "edges_tree": nodes - 1,
            "edges_field": nodes - 1 + attrs,
            "max_depth": max_depth,
            "per_kind": dict(sorted(per_kind.items())),
        }
    (out_dir / "counts.json").write_text(json.dumps(summary, indent=1, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
