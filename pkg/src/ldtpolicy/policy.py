"""Runtime linear-decision-tree policy: evaluation, statistics, persistence."""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .core import FeasibleSet

SCHEMA_VERSION = 1


class PolicyError(ValueError):
    pass


@dataclass(frozen=True)
class Branch:
    normal: tuple
    lo: int
    hi: int


@dataclass(frozen=True)
class Leaf:
    solution: tuple


@dataclass
class LdtPolicy:
    """Binary tree (stored as a DAG node array) of sign tests on integer normals.

    A query c goes to ``hi`` when normal.c >= 0 and to ``lo`` otherwise.
    """

    dim: int
    nodes: tuple
    root: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.nodes = tuple(self.nodes)
        validate_structure(self)

    @property
    def depth(self) -> int:
        return _heights(self)[self.root]

    def leaves(self) -> list:
        return [nd.solution for nd in self.nodes if isinstance(nd, Leaf)]

    def evaluate(self, c: Sequence, exact: bool = False):
        """Return (solution, number of tests performed) for cost vector c."""
        if len(c) != self.dim:
            raise ValueError(f"cost vector has {len(c)} entries, policy expects {self.dim}")
        if exact:
            c = [Fraction(x) for x in c]
        else:
            c = [float(x) for x in c]
        nodes = self.nodes
        k = self.root
        steps = 0
        while True:
            nd = nodes[k]
            if isinstance(nd, Leaf):
                return nd.solution, steps
            s = 0
            for a, x in zip(nd.normal, c):
                if a:
                    s += a * x
            k = nd.hi if s >= 0 else nd.lo
            steps += 1


def validate_structure(policy: LdtPolicy) -> None:
    nodes = policy.nodes
    if not nodes:
        raise PolicyError("policy has no nodes")
    if not 0 <= policy.root < len(nodes):
        raise PolicyError("root index out of range")
    for i, nd in enumerate(nodes):
        if isinstance(nd, Branch):
            if len(nd.normal) != policy.dim:
                raise PolicyError(f"node {i}: normal has wrong dimension")
            if not any(nd.normal):
                raise PolicyError(f"node {i}: zero normal")
            for ch in (nd.lo, nd.hi):
                if not 0 <= ch < len(nodes):
                    raise PolicyError(f"node {i}: dangling child index {ch}")
        elif isinstance(nd, Leaf):
            if len(nd.solution) != policy.dim:
                raise PolicyError(f"node {i}: leaf has wrong dimension")
        else:
            raise PolicyError(f"node {i}: unknown node type")
    # cycle and reachability check (iterative DFS with colours)
    colour = [0] * len(nodes)
    stack = [(policy.root, False)]
    while stack:
        k, done = stack.pop()
        if done:
            colour[k] = 2
            continue
        if colour[k] == 1:
            raise PolicyError(f"cycle through node {k}")
        if colour[k] == 2:
            continue
        colour[k] = 1
        stack.append((k, True))
        nd = nodes[k]
        if isinstance(nd, Branch):
            for ch in (nd.lo, nd.hi):
                if colour[ch] == 1:
                    raise PolicyError(f"cycle through node {ch}")
                if colour[ch] == 0:
                    stack.append((ch, False))
    unreachable = [i for i, col in enumerate(colour) if col == 0]
    if unreachable:
        raise PolicyError(f"unreachable nodes: {unreachable[:10]}")


def _heights(policy: LdtPolicy) -> list:
    """Height of every node, computed with an explicit stack."""
    h = [None] * len(policy.nodes)
    todo = [policy.root]
    while todo:
        j = todo[-1]
        nd = policy.nodes[j]
        if isinstance(nd, Leaf):
            h[j] = 0
            todo.pop()
            continue
        pending = [c for c in (nd.lo, nd.hi) if h[c] is None]
        if pending:
            todo.extend(pending)
            continue
        h[j] = 1 + max(h[nd.lo], h[nd.hi])
        todo.pop()
    return h


def policy_from_tree(dim: int, tree, meta=None) -> LdtPolicy:
    """Build a policy from nested tuples ``(normal, lo, hi)`` / solution tuples."""
    nodes = []

    def emit(t):
        if isinstance(t, tuple) and len(t) == 3 and isinstance(t[0], tuple):
            idx = len(nodes)
            nodes.append(None)
            lo = emit(t[1])
            hi = emit(t[2])
            nodes[idx] = Branch(tuple(t[0]), lo, hi)
            return idx
        nodes.append(Leaf(tuple(t)))
        return len(nodes) - 1

    root = emit(tree)
    return LdtPolicy(dim, tuple(nodes), root, dict(meta or {}))


# -- statistics ---------------------------------------------------------

@dataclass
class EvalStats:
    queries: int
    depth_max: int
    depth_min: int
    depth_avg: float
    nanos_per_query: float | None = None

    def as_dict(self) -> dict:
        return {"queries": self.queries, "depth_max": self.depth_max,
                "depth_min": self.depth_min, "depth_avg": self.depth_avg,
                "nanos_per_query": self.nanos_per_query}


def eval_stats(policy: LdtPolicy, costs: Sequence, timing: bool = False) -> EvalStats:
    if not costs:
        raise ValueError("eval_stats needs at least one query")
    depths = []
    t0 = time.perf_counter_ns()
    for c in costs:
        depths.append(policy.evaluate(c)[1])
    elapsed = time.perf_counter_ns() - t0
    return EvalStats(len(depths), max(depths), min(depths), sum(depths) / len(depths),
                     elapsed / len(depths) if timing else None)


# -- persistence --------------------------------------------------------

def _node_record(nd) -> dict:
    if isinstance(nd, Branch):
        return {"kind": "branch", "normal": list(nd.normal), "lo": nd.lo, "hi": nd.hi}
    return {"kind": "leaf", "solution": list(nd.solution)}


def nodes_hash(nodes) -> str:
    blob = json.dumps([_node_record(nd) for nd in nodes], separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def to_document(policy: LdtPolicy) -> dict:
    meta = dict(policy.meta)
    return {
        "version": SCHEMA_VERSION,
        "n": policy.dim,
        "instance": meta.pop("instance", None),
        "x_hash": meta.pop("x_hash", None),
        "meta": meta,
        "root": policy.root,
        "nodes": [_node_record(nd) for nd in policy.nodes],
        "nodes_hash": nodes_hash(policy.nodes),
    }


def save(policy: LdtPolicy, path) -> None:
    Path(path).write_text(json.dumps(to_document(policy), indent=1) + "\n")


def from_document(doc: dict, X: FeasibleSet | None = None) -> LdtPolicy:
    try:
        if doc["version"] != SCHEMA_VERSION:
            raise PolicyError(f"unsupported policy schema version {doc['version']}")
        n = int(doc["n"])
        nodes = []
        for i, rec in enumerate(doc["nodes"]):
            if rec["kind"] == "branch":
                nodes.append(Branch(tuple(int(x) for x in rec["normal"]),
                                    int(rec["lo"]), int(rec["hi"])))
            elif rec["kind"] == "leaf":
                nodes.append(Leaf(tuple(int(x) for x in rec["solution"])))
            else:
                raise PolicyError(f"node {i}: unknown kind {rec['kind']!r}")
        root = int(doc["root"])
        stored = doc["nodes_hash"]
    except (KeyError, TypeError) as exc:
        raise PolicyError(f"policy document violates the schema: {exc}") from exc
    if nodes_hash(nodes) != stored:
        raise PolicyError("integrity check failed: node array does not match its hash")
    meta = dict(doc.get("meta") or {})
    meta["instance"] = doc.get("instance")
    meta["x_hash"] = doc.get("x_hash")
    policy = LdtPolicy(n, tuple(nodes), root, meta)
    if X is not None:
        if meta["x_hash"] is not None and X.content_hash() != meta["x_hash"]:
            raise PolicyError("feasible set does not match the policy's recorded hash")
        members = set(X.points)
        bad = [s for s in policy.leaves() if s not in members]
        if bad:
            raise PolicyError(f"leaf solutions outside the feasible set: {bad[:3]}")
    return policy


def load(path, X: FeasibleSet | None = None) -> LdtPolicy:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise PolicyError(f"not a policy document: {exc}") from exc
    return from_document(doc, X)
