"""Flatten a policy into one C function of nested if/else sign tests.

Each branch becomes ``if (<expr> < 0.0) { lo } else { hi }`` and each leaf
returns a static solution array.  ``interpret`` parses the emitted text back
into a tree and evaluates it, which is how the output is checked.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Sequence

from .policy import Branch, LdtPolicy, PolicyError

INDENT = "    "


def format_expr(normal: Sequence[int]) -> str:
    """Signed sum of c[i] terms: unit coefficients bare, zeros omitted."""
    parts = []
    for i, a in enumerate(normal):
        if a == 0:
            continue
        mag = abs(a)
        term = f"c[{i}]" if mag == 1 else f"{mag}*c[{i}]"
        if not parts:
            parts.append(term if a > 0 else f"-{term}")
        else:
            parts.append(f"+ {term}" if a > 0 else f"- {term}")
    if not parts:
        raise PolicyError("cannot emit a branch with a zero normal")
    return " ".join(parts)


def emit_c(policy: LdtPolicy, name: str = "query") -> str:
    """C source for ``policy``; shared DAG nodes are duplicated into a tree."""
    lines = [f"#define N {policy.dim}   // problem dimension", "",
             f"static const int *{name}(double *c) {{"]
    stack = [("node", policy.root, 1)]
    while stack:
        kind, payload, depth = stack.pop()
        pad = INDENT * depth
        if kind == "text":
            lines.append(pad + payload)
            continue
        nd = policy.nodes[payload]
        if isinstance(nd, Branch):
            lines.append(f"{pad}if ({format_expr(nd.normal)} < 0.0) {{")
            # pushed in reverse: lo body, "} else {", hi body, "}"
            stack.append(("text", "}", depth))
            stack.append(("node", nd.hi, depth + 1))
            stack.append(("text", "} else {", depth))
            stack.append(("node", nd.lo, depth + 1))
        else:
            vals = ", ".join(str(v) for v in nd.solution)
            lines.append(f"{pad}static int x[N] = {{{vals}}};")
            lines.append(f"{pad}return x;")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- interpreter for the emitted text -----------------------------------

_IF = re.compile(r"^if \((.+) < 0\.0\) \{$")
_LEAF = re.compile(r"^static int x\[N\] = \{([^}]*)\};$")
_TERM = re.compile(r"^(-?)(?:(\d+)\*)?c\[(\d+)\]$")
_DEFINE = re.compile(r"^#define N (\d+)\b")


class CodegenParseError(ValueError):
    pass


def parse_expr(expr: str, n: int) -> tuple:
    coef = [0] * n
    tokens = expr.split(" ")
    sign = 1
    first = True
    for tok in tokens:
        if tok in ("+", "-"):
            sign = 1 if tok == "+" else -1
            continue
        m = _TERM.match(tok)
        if not m:
            raise CodegenParseError(f"bad term {tok!r}")
        neg, mag, idx = m.groups()
        if neg and not first:
            raise CodegenParseError(f"unexpected unary minus in {expr!r}")
        k = int(mag) if mag else 1
        if neg:
            k = -k
        coef[int(idx)] += sign * k
        sign = 1
        first = False
    return tuple(coef)


def parse_c(text: str):
    """Return (n, tree) where tree is ('branch', normal, lo, hi) or ('leaf', x)."""
    raw = [ln.strip() for ln in text.splitlines()]
    raw = [ln for ln in raw if ln]
    m = _DEFINE.match(raw[0]) if raw else None
    if not m:
        raise CodegenParseError("missing dimension header")
    n = int(m.group(1))
    if not raw[1].endswith("(double *c) {"):
        raise CodegenParseError("missing function header")
    body = raw[2:-1]
    if raw[-1] != "}":
        raise CodegenParseError("unterminated function")
    pos = 0

    def block():
        nonlocal pos
        ln = body[pos]
        mi = _IF.match(ln)
        if mi:
            normal = parse_expr(mi.group(1), n)
            pos += 1
            lo = block()
            if body[pos] != "} else {":
                raise CodegenParseError(f"expected else at line {pos}")
            pos += 1
            hi = block()
            if body[pos] != "}":
                raise CodegenParseError(f"expected closing brace at line {pos}")
            pos += 1
            return ("branch", normal, lo, hi)
        ml = _LEAF.match(ln)
        if ml:
            x = tuple(int(v) for v in ml.group(1).split(","))
            if len(x) != n or body[pos + 1] != "return x;":
                raise CodegenParseError(f"malformed leaf at line {pos}")
            pos += 2
            return ("leaf", x)
        raise CodegenParseError(f"unexpected line {ln!r}")

    tree = block()
    if pos != len(body):
        raise CodegenParseError("trailing statements after the root block")
    return n, tree


def interpret(tree, c: Sequence, exact: bool = False):
    """Evaluate a parsed tree; returns (solution, number of tests)."""
    c = [Fraction(v) for v in c] if exact else [float(v) for v in c]
    steps = 0
    while tree[0] == "branch":
        s = sum(a * v for a, v in zip(tree[1], c) if a)
        tree = tree[2] if s < 0 else tree[3]
        steps += 1
    return tree[1], steps


def tree_stats(tree) -> dict:
    """Conditionals, leaves and distinct leaf vectors of a parsed tree."""
    conds = leaves = 0
    distinct = set()
    stack = [tree]
    while stack:
        t = stack.pop()
        if t[0] == "branch":
            conds += 1
            stack.extend((t[2], t[3]))
        else:
            leaves += 1
            distinct.add(t[1])
    return {"conditionals": conds, "leaves": leaves, "distinct_leaves": len(distinct)}
