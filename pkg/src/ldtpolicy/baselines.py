"""Reference solvers: brute force plus one classical exact method per class."""

from __future__ import annotations

from typing import Sequence

from .core import FeasibleSet
from .instances import cut_vector, edges, tour_vector


def brute_force(X: FeasibleSet, c: Sequence):
    """Exact argmax of c.x over X; the smallest index wins ties."""
    if len(X) == 0:
        raise ValueError("empty feasible set")
    if len(c) != X.dim:
        raise ValueError(f"cost vector has {len(c)} entries, expected {X.dim}")
    best, best_val = None, None
    for x in X.points:
        v = sum(ci * xi for ci, xi in zip(c, x) if xi)
        if best_val is None or v > best_val:
            best, best_val = x, v
    return best, best_val


def knapsack_dp(weights: Sequence[int], W: int, values: Sequence):
    """0/1 knapsack optimum by the capacity-indexed Bellman recursion.

    Returns (objective, chosen indicator vector).
    """
    if W < 0:
        raise ValueError("capacity must be nonnegative")
    if len(weights) != len(values):
        raise ValueError("weights and values differ in length")
    if any(w < 0 for w in weights):
        raise ValueError("weights must be nonnegative")
    n = len(weights)
    zero = values[0] * 0 if n else 0
    # table[i][w]: best value with the first i items and capacity w
    table = [[zero] * (W + 1)]
    for i in range(n):
        prev = table[-1]
        row = list(prev)
        wi, vi = weights[i], values[i]
        for w in range(wi, W + 1):
            cand = prev[w - wi] + vi
            if cand > row[w]:
                row[w] = cand
        table.append(row)
    x = [0] * n
    w = W
    for i in range(n, 0, -1):
        if table[i][w] != table[i - 1][w]:
            x[i - 1] = 1
            w -= weights[i - 1]
    return table[n][W], tuple(x)


def held_karp(d: int, dist):
    """Minimum Hamiltonian cycle on cities 1..d by the subset DP.

    ``dist`` is indexable as dist[i][j] with 0-based city indices.
    Returns (tour as a tuple of 1-based cities starting at 1, length).
    """
    if not 3 <= d <= 18:
        raise ValueError("held_karp supports 3 <= d <= 18")
    full = 1 << (d - 1)
    # cost[S][j]: shortest path from city 0 through set S (over cities 1..d-1) ending in j
    cost = [[None] * (d - 1) for _ in range(full)]
    parent = [[-1] * (d - 1) for _ in range(full)]
    for j in range(d - 1):
        cost[1 << j][j] = dist[0][j + 1]
    for S in range(1, full):
        row = cost[S]
        for j in range(d - 1):
            cj = row[j]
            if cj is None or not S >> j & 1:
                continue
            for k in range(d - 1):
                if S >> k & 1:
                    continue
                T = S | 1 << k
                v = cj + dist[j + 1][k + 1]
                if cost[T][k] is None or v < cost[T][k]:
                    cost[T][k] = v
                    parent[T][k] = j
    last = full - 1
    best, end = None, -1
    for j in range(d - 1):
        v = cost[last][j] + dist[j + 1][0]
        if best is None or v < best:
            best, end = v, j
    tour = []
    S, j = last, end
    while j >= 0:
        tour.append(j + 2)
        S, j = S & ~(1 << j), parent[S][j]
    tour.append(1)
    tour.reverse()
    return tuple(tour), best


def tsp_baseline(d: int, c: Sequence):
    """Max c.x over tours with c indexed by the edges of K_d (lengths are -c)."""
    dist = [[0] * d for _ in range(d)]
    for (i, j), ce in zip(edges(d), c):
        dist[i - 1][j - 1] = dist[j - 1][i - 1] = -ce
    tour, length = held_karp(d, dist)
    return tour_vector(d, list(tour)), -length


def best_cut(d: int, c: Sequence):
    """Max c.x over the cut vectors of K_d, by enumerating S with vertex 1 outside."""
    if not 2 <= d <= 24:
        raise ValueError("best_cut supports 2 <= d <= 24")
    E = edges(d)
    if len(c) != len(E):
        raise ValueError(f"expected {len(E)} edge costs")
    best, best_val = None, None
    for mask in range(1 << (d - 1)):
        S = {v + 2 for v in range(d - 1) if mask >> v & 1}
        val = sum(ce for (i, j), ce in zip(E, c) if (i in S) != (j in S))
        if best_val is None or val > best_val:
            best, best_val = S, val
    return cut_vector(d, best), best_val


def class_baseline(cls: str, d: int, c: Sequence):
    """(solution, objective) from the class-specific exact solver."""
    if cls == "knp":
        val, x = knapsack_dp(list(range(1, d + 1)), d, list(c))
        return x, val
    if cls == "cut":
        return best_cut(d, c)
    if cls == "tsp":
        return tsp_baseline(d, c)
    raise ValueError(f"no class baseline for {cls!r}")
