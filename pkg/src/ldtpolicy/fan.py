"""Normal fan of a finite integer set: optimality cones, dividers, positions."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

from .core import FeasibleSet, canonical_normal, integerize, sub
from .feasibility import FeasibilityOracle


class Position(enum.IntEnum):
    BELOW = -1
    STRADDLES = 0
    ABOVE = 1


@dataclass(frozen=True)
class Divider:
    id: int
    normal: tuple
    pairs: tuple  # (a, b) cone positions with normal a positive multiple of x_a - x_b


@dataclass
class NormalFan:
    X: FeasibleSet
    cones: list            # point indices whose cone is full-dimensional
    dividers: list         # Divider, ids dense and ordered by normal
    position: list         # position[k][h] for cone position k, divider id h
    cone_rows: list        # strict facet-side rows (x_k - x_j) of each cone
    witnesses: list        # integer interior point of each cone
    raw_dividers: int = 0
    oracle_calls: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.X.dim

    def solution(self, k: int) -> tuple:
        return self.X.points[self.cones[k]]

    def straddle_count(self) -> int:
        return sum(1 for row in self.position for p in row if p is Position.STRADDLES)

    def report(self) -> dict:
        total = len(self.cones) * len(self.dividers)
        return {
            "n": self.n,
            "points": len(self.X),
            "cones": len(self.cones),
            "dividers": self.raw_dividers,
            "canonical_dividers": len(self.dividers),
            "straddles": self.straddle_count(),
            "straddle_density": (self.straddle_count() / total) if total else 0.0,
        }


def cone_is_full_dimensional(X: FeasibleSet, i: int, oracle: FeasibilityOracle):
    rows = [sub(X.points[i], q) for j, q in enumerate(X.points) if j != i]
    return oracle.solve(strict=rows, dim=X.dim)


def _closed_rows(X, i, support):
    return [sub(X.points[i], X.points[j]) for j in support if j != i]


def pair_has_positive_dim(X: FeasibleSet, a: int, b: int, oracle: FeasibilityOracle,
                          support=None) -> bool:
    """True iff the optimality cones of points a and b share a nonzero vector.

    Probes {both cones, c_i >= 1} and {both cones, -c_i >= 1} for every
    coordinate and stops at the first feasible probe.
    """
    if a == b:
        raise ValueError("pair_has_positive_dim needs two distinct cones")
    if support is None:
        support = range(len(X))
    closed = _closed_rows(X, a, support) + _closed_rows(X, b, support)
    n = X.dim
    for i in range(n):
        for sgn in (1, -1):
            e = [0] * n
            e[i] = sgn
            if oracle.solve(strict=[tuple(e)], closed=closed, dim=n).feasible:
                return True
    return False


def pair_shares_facet(X: FeasibleSet, a: int, b: int, oracle: FeasibilityOracle,
                      support) -> bool:
    """True iff the cones of vertices a and b meet in a common facet.

    Equivalently [x_a, x_b] is an edge of conv(X): some c ties x_a with x_b
    and strictly beats every other vertex in ``support``.
    """
    if a == b:
        raise ValueError("pair_shares_facet needs two distinct cones")
    strict = [sub(X.points[a], X.points[j]) for j in support if j not in (a, b)]
    eq = [sub(X.points[a], X.points[b])]
    return oracle.solve(strict=strict, eqs=eq, dim=X.dim).feasible


def cone_position(X: FeasibleSet, point_idx: int, normal, oracle: FeasibilityOracle,
                  support=None) -> Position:
    if support is None:
        support = range(len(X))
    closed = _closed_rows(X, point_idx, support)
    neg = tuple(-x for x in normal)
    up = oracle.solve(strict=[tuple(normal)], closed=closed, dim=X.dim).feasible
    down = oracle.solve(strict=[neg], closed=closed, dim=X.dim).feasible
    if up and down:
        return Position.STRADDLES
    if up:
        return Position.ABOVE
    if down:
        return Position.BELOW
    raise AssertionError("full-dimensional cone lies on neither side of a divider")


def build_fan(X: FeasibleSet, oracle: FeasibilityOracle | None = None,
              infer_positions: bool = True, adjacency: str = "facet") -> NormalFan:
    """Detect full-dimensional cones, enumerate and merge dividers, tabulate positions.

    ``adjacency="facet"`` keeps the pairs whose cones share a facet (the edges
    of conv(X)); ``"ray"`` keeps every pair whose cones share a nonzero vector.

    With ``infer_positions`` a cone k is placed without solving anything when
    the divider normal is parallel to x_k - x_j for some point j (the cone
    then lies on the side where x_k beats x_j).
    """
    if len(X) < 2:
        raise ValueError("the normal fan needs at least two feasible points")
    oracle = oracle or FeasibilityOracle()
    before = oracle.counters().calls
    cones, witnesses = [], []
    for i in range(len(X)):
        res = cone_is_full_dimensional(X, i, oracle)
        if res.feasible:
            cones.append(i)
            witnesses.append(integerize(res.witness))
    if len(cones) < 2:
        raise ValueError("degenerate feasible set: fewer than two full-dimensional cones")
    calls_cones = oracle.counters().calls - before

    groups: dict = {}
    raw = 0
    neighbours = {k: set() for k in range(len(cones))}
    for ka, kb in itertools.combinations(range(len(cones)), 2):
        a, b = cones[ka], cones[kb]
        if adjacency == "facet":
            adjacent = pair_shares_facet(X, a, b, oracle, support=cones)
        elif adjacency == "ray":
            adjacent = pair_has_positive_dim(X, a, b, oracle, support=cones)
        else:
            raise ValueError(f"unknown adjacency rule {adjacency!r}")
        if not adjacent:
            continue
        raw += 1
        neighbours[ka].add(kb)
        neighbours[kb].add(ka)
        diff = sub(X.points[a], X.points[b])
        normal = canonical_normal(diff)
        pair = (ka, kb) if _same_direction(normal, diff) else (kb, ka)
        groups.setdefault(normal, []).append(pair)
    calls_pairs = oracle.counters().calls - before - calls_cones

    dividers = [Divider(i, nv, tuple(groups[nv])) for i, nv in enumerate(sorted(groups))]

    # orientation of every point difference, for position inference
    known: dict = {}
    if infer_positions:
        for k, i in enumerate(cones):
            for j in cones:
                if i == j:
                    continue
                diff = sub(X.points[i], X.points[j])
                nv = canonical_normal(diff)
                known[(k, nv)] = Position.ABOVE if _same_direction(nv, diff) else Position.BELOW
    position = []
    for k, i in enumerate(cones):
        row = []
        for dv in dividers:
            p = known.get((k, dv.normal))
            if p is None:
                p = cone_position(X, i, dv.normal, oracle, support=cones)
            row.append(p)
        position.append(row)
    for dv in dividers:
        for ka, kb in dv.pairs:
            assert position[ka][dv.id] is Position.ABOVE
            assert position[kb][dv.id] is Position.BELOW
    calls_pos = oracle.counters().calls - before - calls_cones - calls_pairs

    cone_rows = []
    for k, i in enumerate(cones):
        cone_rows.append([sub(X.points[i], X.points[cones[j]]) for j in sorted(neighbours[k])])
    return NormalFan(X=X, cones=cones, dividers=dividers, position=position,
                     cone_rows=cone_rows, witnesses=witnesses, raw_dividers=raw,
                     oracle_calls={"cones": calls_cones, "pairs": calls_pairs,
                                   "positions": calls_pos})


def _same_direction(canon, v) -> bool:
    first = next(i for i, x in enumerate(v) if x)
    return (v[first] > 0) == (canon[first] > 0)
