"""Independent minimal-depth oracle over the cells of the divider arrangement.

The open domain is cut by every divider hyperplane into full-dimensional
cells; each cell lies inside a single optimality cone.  The region of any
tree node is then a set of cells, so the minimal height recursion can be run
on cell bitmasks with no lower bounds, no pruning and no ordering.  It
shares nothing with the synthesizer beyond the fan and the exact oracle.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

from .baselines import brute_force
from .core import CostDomain, int_dot
from .fan import NormalFan
from .feasibility import FeasibilityOracle


@dataclass
class Arrangement:
    normals: list          # divider normals, in fan order
    cells: list            # integer witness point of each cell
    labels: list           # solution optimal throughout each cell
    below: list            # below[h]: bitmask of cells with h(c) < 0


def enumerate_cells(fan: NormalFan, domain: CostDomain,
                    oracle: FeasibilityOracle | None = None) -> Arrangement:
    """Incrementally split the open domain by each divider hyperplane."""
    oracle = oracle or FeasibilityOracle()
    n = fan.n
    dom = domain.strict_rows()
    # a cell is (list of strict rows, witness); the domain itself is the start
    if dom:
        res = oracle.solve(strict=dom, dim=n)
        start = res.direction
    else:
        start = (0,) * n
    cells = [(list(dom), start)]
    for nv in (dv.normal for dv in fan.dividers):
        neg = tuple(-x for x in nv)
        nxt = []
        for rows, w in cells:
            s = int_dot(nv, w)
            sides = []
            for row, sign in ((nv, 1), (neg, -1)):
                if s * sign > 0:
                    sides.append((row, w))
                    continue
                r = oracle.solve(strict=rows + [row], dim=n)
                if r.feasible:
                    sides.append((row, r.direction))
            for row, pt in sides:
                nxt.append((rows + [row], pt))
        cells = nxt
    normals = [dv.normal for dv in fan.dividers]
    witnesses = [w for _, w in cells]
    labels = [brute_force(fan.X, w)[0] for w in witnesses]
    below = []
    for nv in normals:
        mask = 0
        for i, w in enumerate(witnesses):
            if int_dot(nv, w) < 0:
                mask |= 1 << i
        below.append(mask)
    return Arrangement(normals, witnesses, labels, below)


def minimal_depth(arr: Arrangement, limit: int | None = None) -> int:
    """Exact minimal height of the root region by full memoized recursion."""
    ncells = len(arr.cells)
    full = (1 << ncells) - 1
    label_id = {}
    cell_label = [label_id.setdefault(x, len(label_id)) for x in arr.labels]
    memo: dict = {}
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 10000))

    def single_label(S):
        first = None
        while S:
            low = S & -S
            lab = cell_label[low.bit_length() - 1]
            if first is None:
                first = lab
            elif lab != first:
                return False
            S ^= low
        return True

    def delta(S):
        v = memo.get(S)
        if v is not None:
            return v
        if single_label(S):
            memo[S] = 0
            return 0
        best = None
        for b in arr.below:
            lo = S & b
            if not lo or lo == S:
                continue
            hi = S & ~b
            v = max(delta(lo), delta(hi)) + 1
            if best is None or v < best:
                best = v
        if best is None:
            raise AssertionError("region with several labels but no splitting divider")
        memo[S] = best
        if limit is not None and len(memo) > limit:
            raise MemoryError("exhaustive recursion exceeded its region limit")
        return best

    try:
        return delta(full)
    finally:
        sys.setrecursionlimit(old)
