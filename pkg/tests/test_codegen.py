import shutil
import subprocess
from pathlib import Path

import pytest

from ldtpolicy.codegen import (CodegenParseError, emit_c, format_expr, interpret, parse_c,
                               parse_expr, tree_stats)
from ldtpolicy.fan import build_fan
from ldtpolicy.policy import PolicyError, policy_from_tree
from ldtpolicy.sampling import sample_ball_orthant, to_fractions
from ldtpolicy.synth import synthesize

from conftest import five_point, instance, policy_of

GOLDEN = Path(__file__).parent / "golden"


@pytest.mark.parametrize("normal, text", [
    ((1, 0, -1), "c[0] - c[2]"),
    ((0, -1, 3), "-c[1] + 3*c[2]"),
    ((-2, 1), "-2*c[0] + c[1]"),
])
def test_format_expr(normal, text):
    assert format_expr(normal) == text
    assert parse_expr(text, len(normal)) == normal


def test_zero_normal_rejected():
    with pytest.raises(PolicyError):
        format_expr((0, 0))


def test_golden_five_point():
    X, dom = five_point()
    policy, _ = synthesize(build_fan(X), dom)
    assert emit_c(policy) == (GOLDEN / "five_point.c").read_text()


def test_golden_cut3():
    policy, _ = policy_of("cut", 3, "iterative")
    assert emit_c(policy) == (GOLDEN / "cut3.c").read_text()


def test_single_leaf_has_no_conditionals():
    text = emit_c(policy_from_tree(2, (1, 0)))
    assert "if" not in text
    n, tree = parse_c(text)
    assert n == 2 and tree == ("leaf", (1, 0))


@pytest.mark.parametrize("cls, d", [("knp", 6), ("cut", 4), ("tsp", 4)])
def test_interpreter_matches_policy(cls, d):
    X, dom = instance(cls, d)
    policy, _ = policy_of(cls, d, "greedy")
    n, tree = parse_c(emit_c(policy))
    assert n == X.dim
    for c in to_fractions(sample_ball_orthant(X.dim, dom, 5, 500)):
        assert interpret(tree, c, exact=True) == policy.evaluate(c, exact=True)


def test_cut4_structure():
    policy, _ = policy_of("cut", 4, "greedy")
    stats = tree_stats(parse_c(emit_c(policy))[1])
    assert stats["conditionals"] == stats["leaves"] - 1
    assert stats["distinct_leaves"] == 7       # every nonempty cut; the empty one never wins
    assert policy.depth == 6


@pytest.mark.parametrize("text", [
    "",
    "int main() {}\n",
    "#define N 1\nstatic const int *query(double *c) {\n    if (c[0] < 0.0) {\n",
    "#define N 1\nstatic const int *query(double *c) {\n    static int x[N] = {0, 1};\n    return x;\n}\n",
])
def test_parse_errors(text):
    with pytest.raises((CodegenParseError, IndexError)):
        parse_c(text)


@pytest.mark.skipif(shutil.which("gcc") is None, reason="gcc not installed")
def test_emitted_source_compiles(tmp_path):
    src = tmp_path / "q.c"
    src.write_text((GOLDEN / "five_point.c").read_text())
    res = subprocess.run(["gcc", "-std=c99", "-c", "-o", str(tmp_path / "q.o"), str(src)],
                         capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
