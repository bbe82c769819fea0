#!/usr/bin/env python3
"""Seeded random strings tokenized by NLTK's word_tokenize (preserve_line=True).

The alphabet favours punctuation, quotes, contractions and trailing newlines,
the places where regex cascades are easiest to get subtly wrong.

Usage: tokenize_random_oracle.py <out.json> [count] [seed]
"""

import json
import random
import sys

from nltk import word_tokenize

ALPHABET = list("abcWXY ") * 3 + list(".,:;'\"`?!()[]{}<>-$%&*@#\n\t") + [
    "wanna ", "can't ", "cannot ", "'tis ", "...", "--", "n't ", "'ll ", "«", "”", "’", "\u2014",
]
EDGE = ["a:\n", "a:", "a.\n", "end.  \n", "x,\n", "wanna\n", "'quoted' thing", "a: \n"]


def main() -> None:
    out = sys.argv[1]
    count = int(sys.argv[2]) if len(sys.argv) > 2 else 1000
    rng = random.Random(int(sys.argv[3]) if len(sys.argv) > 3 else 5)
    texts = ["".join(rng.choice(ALPHABET) for _ in range(rng.randint(0, 25))) for _ in range(count)]
    cases = [{"text": t, "tokens": word_tokenize(t, preserve_line=True)} for t in texts + EDGE]
    with open(out, "w", encoding="utf-8") as f:
        json.dump(cases, f, ensure_ascii=False, indent=0)
        f.write("\n")


if __name__ == "__main__":
    main()
