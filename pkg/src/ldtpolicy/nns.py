"""Binary ILPs as exact nearest-neighbour search over {-1, +1} points."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .core import FeasibleSet


@dataclass(frozen=True)
class SignedPointSet:
    dim: int
    points: tuple   # vectors over {-1, +1}
    index: tuple    # position of each point in the source FeasibleSet


def phi(X: FeasibleSet) -> SignedPointSet:
    """Map x -> 2x - 1 entrywise; X must be binary."""
    if not X.is_binary():
        raise ValueError("phi needs a binary feasible set")
    pts = tuple(tuple(2 * v - 1 for v in x) for x in X.points)
    return SignedPointSet(X.dim, pts, tuple(range(len(pts))))


def sq_dist(p: Sequence, c: Sequence):
    return sum((pi - ci) ** 2 for pi, ci in zip(p, c))


def linear_scan(S: SignedPointSet, c: Sequence) -> int:
    """Index of the closest point, smallest index on ties."""
    if len(c) != S.dim:
        raise ValueError(f"query has {len(c)} entries, expected {S.dim}")
    best, best_d = -1, None
    for i, p in enumerate(S.points):
        dd = sq_dist(p, c)
        if best_d is None or dd < best_d:
            best, best_d = i, dd
    return best


@dataclass(frozen=True)
class _KdLeaf:
    members: tuple


@dataclass(frozen=True)
class _KdSplit:
    axis: int
    threshold: object     # points with p[axis] <= threshold go left
    left: object
    right: object


class KdIndex:
    """Exact KD-tree over a SignedPointSet.

    Splits on the coordinate with the largest spread (lowest index on ties)
    at the median; queries run branch and bound and return the smallest
    index among the points at minimum distance.
    """

    def __init__(self, S: SignedPointSet, leaf_size: int = 4):
        self.S = S
        self.leaf_size = max(1, leaf_size)
        self.root = self._build(tuple(range(len(S.points))))

    def _build(self, members):
        pts = self.S.points
        if len(members) <= self.leaf_size:
            return _KdLeaf(members)
        best_axis, best_spread = -1, 0
        for a in range(self.S.dim):
            vals = [pts[i][a] for i in members]
            spread = max(vals) - min(vals)
            if spread > best_spread:
                best_axis, best_spread = a, spread
        if best_axis < 0:  # all members coincide
            return _KdLeaf(members)
        vals = sorted(pts[i][best_axis] for i in members)
        thr = vals[(len(vals) - 1) // 2]
        left = tuple(i for i in members if pts[i][best_axis] <= thr)
        right = tuple(i for i in members if pts[i][best_axis] > thr)
        if not right:  # median equals the maximum: split below it instead
            thr = max(v for v in vals if v < vals[-1])
            left = tuple(i for i in members if pts[i][best_axis] <= thr)
            right = tuple(i for i in members if pts[i][best_axis] > thr)
        return _KdSplit(best_axis, thr, self._build(left), self._build(right))

    def query(self, c: Sequence) -> int:
        if len(c) != self.S.dim:
            raise ValueError(f"query has {len(c)} entries, expected {self.S.dim}")
        pts = self.S.points
        best = [None, -1]  # (distance, index)

        def visit(node):
            if isinstance(node, _KdLeaf):
                for i in node.members:
                    dd = sq_dist(pts[i], c)
                    if best[0] is None or dd < best[0] or (dd == best[0] and i < best[1]):
                        best[0], best[1] = dd, i
                return
            diff = c[node.axis] - node.threshold
            near, far = (node.left, node.right) if diff <= 0 else (node.right, node.left)
            visit(near)
            # ties must be explored too so the smallest index wins
            if best[0] is None or diff * diff <= best[0]:
                visit(far)

        visit(self.root)
        return best[1]


def nns_policy_build(X: FeasibleSet) -> KdIndex:
    return KdIndex(phi(X))


def nns_policy_query(index: KdIndex, c: Sequence) -> tuple:
    """The feasible point whose image is closest to c (maximizes c.x)."""
    p = index.S.points[index.query(c)]
    return tuple((v + 1) // 2 for v in p)
