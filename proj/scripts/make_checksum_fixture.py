#!/usr/bin/env python3
"""Writes the 96-row metric checksum corpus: 72 rows the refiner repairs
exactly, 24 rows it cannot (first letter of the code term swapped, which
changes the phonetic key)."""

import json
import sys

LANGS = ["en", "hi", "mr", "gu", "ta", "te", "bn", "ml", "kn", "or"]

SNIPPETS = [
    ("C", "int sum_list(int *items, int count) {\n    int total = 0;\n    for (int k = 0; k < count; k++) total += items[k];\n    return total;\n}\n",
     ["total", "count", "items"], ["sum_list"]),
    ("PYTHON", "def max_value(numbers):\n    largest = numbers[0]\n    for number in numbers:\n        if number > largest:\n            largest = number\n    return largest\n",
     ["largest", "numbers"], ["max_value"]),
    ("C", "char first_letter(const char *word) {\n    return word[0];\n}\n",
     ["word"], ["first_letter"]),
]

SWAP = {"t": "z", "c": "j", "i": "o", "l": "r", "n": "g", "w": "v"}


def swap_first(term):
    return SWAP[term[0]] + term[1:]


def main(path):
    rows = []
    for i in range(96):
        lang_code, code, plain_terms, snake_terms = SNIPPETS[i % len(SNIPPETS)]
        kind = i % 4
        plain = plain_terms[(i // 4) % len(plain_terms)]
        snake = snake_terms[0]
        if kind == 0:
            expected = f"what is wrong with {plain}"
            corrupted = expected
            terms = [plain]
        elif kind == 1:
            expected = f"why does {snake} fail"
            corrupted = f"why does {snake.replace('_', ' underscore ')} fail"
            terms = [snake]
        elif kind == 2:
            expected = f"print the ASCII of {plain}"
            corrupted = f"print the ask key of {plain}"
            terms = [plain]
        else:
            expected = f"what is wrong with {plain}"
            corrupted = f"what is wrong with {swap_first(plain)}"
            terms = [plain]
        rows.append({
            "id": f"checksum-{i + 1:03d}",
            "language": LANGS[i % len(LANGS)],
            "corrupted_transcript": corrupted,
            "code": code,
            "code_lang": lang_code,
            "expected_refined": expected,
            "expected_terms": terms,
        })
    with open(path, "w", encoding="utf-8") as out:
        for row in rows:
            out.write(json.dumps(row, ensure_ascii=False, sort_keys=True) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/corpus/checksum_96.jsonl")
