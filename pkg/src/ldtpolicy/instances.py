"""Feasible sets and cost domains of the Knp, Cut and Tsp instance classes."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from pathlib import Path

from .core import CostDomain, FeasibleSet, Sign, parse_feasible_set

CLASSES = ("knp", "cut", "tsp")


@dataclass(frozen=True)
class InstanceSpec:
    cls: str
    d: int | None = None
    path: str | None = None

    def label(self) -> str:
        if self.cls == "custom":
            return f"custom({self.path})"
        return f"{self.cls}({self.d})"


def edges(d: int) -> list:
    """Edges (i, j), 1 <= i < j <= d, in lexicographic order."""
    return [(i, j) for i in range(1, d + 1) for j in range(i + 1, d + 1)]


def gen_knp(d: int):
    """Binary packings of items with weights 1..d under capacity d."""
    if d < 1:
        raise ValueError("knp needs d >= 1")
    pts = [x for x in itertools.product((0, 1), repeat=d)
           if sum((i + 1) * xi for i, xi in enumerate(x)) <= d]
    return FeasibleSet(d, tuple(pts)), CostDomain.uniform(d, Sign.POSITIVE)


def cut_vector(d: int, S) -> tuple:
    S = set(S)
    return tuple(int((i in S) != (j in S)) for i, j in edges(d))


def gen_cut(d: int):
    """Crossing-edge vectors of all bipartitions of K_d (vertex 1 kept outside S)."""
    if d < 2:
        raise ValueError("cut needs d >= 2")
    pts = set()
    for r in range(d):
        for S in itertools.combinations(range(2, d + 1), r):
            pts.add(cut_vector(d, S))
    n = d * (d - 1) // 2
    return FeasibleSet(n, tuple(sorted(pts))), CostDomain.uniform(n, Sign.POSITIVE)


def tour_vector(d: int, tour) -> tuple:
    used = set()
    for a, b in zip(tour, tour[1:] + tour[:1]):
        used.add((min(a, b), max(a, b)))
    return tuple(int(e in used) for e in edges(d))


def gen_tsp(d: int):
    """Edge-incidence vectors of the undirected Hamiltonian cycles of K_d."""
    if d < 3:
        raise ValueError("tsp needs d >= 3")
    pts = set()
    for perm in itertools.permutations(range(2, d + 1)):
        if perm[0] < perm[-1]:
            pts.add(tour_vector(d, (1,) + perm))
    n = d * (d - 1) // 2
    return FeasibleSet(n, tuple(sorted(pts))), CostDomain.uniform(n, Sign.NEGATIVE)


def load_custom(path):
    text = Path(path).read_text()
    return parse_feasible_set(text)


GENERATORS = {"knp": gen_knp, "cut": gen_cut, "tsp": gen_tsp}


def make_instance(cls: str, d: int | None = None, path=None):
    cls = cls.lower()
    if cls == "custom":
        if path is None:
            raise ValueError("custom instances need a path")
        return load_custom(path)
    if cls not in GENERATORS:
        raise ValueError(f"unknown instance class {cls!r}")
    if d is None:
        raise ValueError(f"{cls} needs a size parameter d")
    return GENERATORS[cls](d)
