from pathlib import Path

import pytest

from flatkit.flatness import FlatnessProblem
from flatkit.parsing import parse_problem

CORPUS = Path(__file__).resolve().parents[1] / "src" / "flatkit" / "corpus"


def blowup():
    return FlatnessProblem.from_strings(["y1", "y2"], ["x"], ["x*y1 - y2"])


def free_poly(n=2):
    return FlatnessProblem.from_strings([f"y{i}" for i in range(1, n + 1)], ["x"], [])


def double_cover(n=2):
    return FlatnessProblem.from_strings([f"y{i}" for i in range(1, n + 1)], ["x"], ["x^2 - y1"])


def r_mod_y1():
    return FlatnessProblem.from_strings(["y1", "y2"], [], [], (1, [["y1"]]))


def max_ideal(n=2):
    ys = [f"y{i}" for i in range(1, n + 1)]
    rows = []
    for i in range(n):
        for j in range(i + 1, n):
            row = ["0"] * n
            row[i], row[j] = ys[j], "-" + ys[i]
            rows.append(row)
    return FlatnessProblem.from_strings(ys, [], [], (n, rows))


def corpus_problem(name):
    return parse_problem((CORPUS / f"{name}.prob").read_text(), name)


@pytest.fixture
def corpus_dir():
    return CORPUS
