#!/usr/bin/env python3
"""Reference treebank-tokenizer oracle for VLM query strings.

Harvests the query argument of every simple_query / llm_query call in the
given programs (direct literals, or a module-unique string / f-string
assignment to the named variable), splits f-strings into literal segments and
holes, and tokenizes each literal segment with NLTK's word_tokenize
(preserve_line=True: queries are single sentences and the Punkt sentence model
is not needed). Each hole contributes the single token "⟨HOLE⟩".

A list of extra standalone strings is tokenized as well, for unit coverage.

Usage: tokenize_oracle.py <out.json> <program.vp>...
"""

import ast
import json
import sys
from pathlib import Path

from nltk import word_tokenize

CALLEES = {"simple_query", "llm_query"}
HOLE = "⟨HOLE⟩"

EXTRA = [
    "What is it doing?",
    "Is there any negative event happening in the scene?",
    "",
    "What's happening in the scene",
    "What is caused by the person doing {action}?",
    "Please describe his/her appearance in 10 words",
    "a well-known \"quote\" (here), ok.",
    "don't, can't, won't; I'll go: now!",
    "Is it 3,000 or 3.5 [approx.] {maybe} <tag>?",
    "He said ''hello'' and `left`...",
    "cost $3.88 & 50% off #deal @shop",
    "wanna gonna gotta lemme gimme cannot",
    "'tis 'twas the night",
    "They're here; we've won -- we'd better leave.",
    "«Bonjour» “quoted” ‘single’",
    "end with quote.'",
    "multiple   spaces\tand\nnewlines",
    "Mr. Smith went to Washington.",
    "Is person with '",
    "' a potential cause of '",
    "'?",
]


def segments_of(value):
    if isinstance(value, ast.Constant) and isinstance(value.value, str):
        return [{"text": value.value}]
    if isinstance(value, ast.JoinedStr):
        out = []
        for v in value.values:
            if isinstance(v, ast.Constant):
                out.append({"text": v.value})
            else:
                out.append({"hole": True})
        return out
    return None


def tokens_of(segments):
    toks = []
    for s in segments:
        if "hole" in s:
            toks.append(HOLE)
        else:
            toks.extend(word_tokenize(s["text"], preserve_line=True))
    return toks


def harvest(path):
    tree = ast.parse(path.read_text(encoding="utf-8"))
    defs = {}
    for n in ast.walk(tree):
        if isinstance(n, ast.Assign) and len(n.targets) == 1 and isinstance(n.targets[0], ast.Name):
            segs = segments_of(n.value)
            if segs is not None:
                defs.setdefault(n.targets[0].id, []).append(segs)
    sites = []
    calls = [n for n in ast.walk(tree) if isinstance(n, ast.Call)
             and isinstance(n.func, ast.Attribute) and n.func.attr in CALLEES]
    calls.sort(key=lambda c: (c.lineno, c.col_offset))
    for call in calls:
        arg = call.args[0]
        segs = segments_of(arg)
        origin = "direct"
        if segs is None and isinstance(arg, ast.Name):
            cands = defs.get(arg.id, [])
            if len(cands) != 1:
                raise SystemExit(f"{path}:{call.lineno}: ambiguous query variable {arg.id}")
            segs = cands[0]
            origin = "propagated"
        if segs is None:
            raise SystemExit(f"{path}:{call.lineno}: unsupported query argument")
        sites.append({
            "file": path.name,
            "line": call.lineno,
            "callee": call.func.attr,
            "origin": origin,
            "segments": segs,
            "tokens": tokens_of(segs),
        })
    return sites


def main():
    out = Path(sys.argv[1])
    sites = []
    for p in sys.argv[2:]:
        sites.extend(harvest(Path(p)))
    extra = [{"text": s, "tokens": word_tokenize(s, preserve_line=True)} for s in EXTRA]
    out.write_text(json.dumps({"sites": sites, "strings": extra}, ensure_ascii=False, indent=1) + "\n",
                   encoding="utf-8")


if __name__ == "__main__":
    main()
