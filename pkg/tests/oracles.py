"""Independent reference computations used by the tests.

Nothing here imports the package's LP oracle or synthesizer: LPs go through
scipy's HiGHS in floating point and argmaxes are plain numpy scans.
"""

import itertools

import numpy as np
from scipy.optimize import linprog


def lp_feasible(A_ge1=(), A_eq=(), n=None):
    """Is {A_ge1 c >= 1, A_eq c = 0} feasible?  (float LP, generous margins)"""
    A_ge1 = np.array(A_ge1, dtype=float).reshape(-1, n)
    A_eq = np.array(A_eq, dtype=float).reshape(-1, n)
    res = linprog(np.zeros(n),
                  A_ub=-A_ge1 if len(A_ge1) else None,
                  b_ub=-np.ones(len(A_ge1)) if len(A_ge1) else None,
                  A_eq=A_eq if len(A_eq) else None,
                  b_eq=np.zeros(len(A_eq)) if len(A_eq) else None,
                  bounds=[(None, None)] * n, method="highs")
    return res.status == 0


def vertex_indices(points):
    """Indices of points that are the unique maximizer for some c."""
    P = np.array(points, dtype=float)
    out = []
    for i in range(len(P)):
        rows = [P[i] - P[j] for j in range(len(P)) if j != i]
        if lp_feasible(rows, n=P.shape[1]):
            out.append(i)
    return out


def edge_pairs(points, verts):
    """Pairs of vertices joined by an edge of the convex hull."""
    P = np.array(points, dtype=float)
    n = P.shape[1]
    pairs = []
    for a, b in itertools.combinations(verts, 2):
        rows = [P[a] - P[j] for j in verts if j not in (a, b)]
        if lp_feasible(rows, [P[a] - P[b]], n=n):
            pairs.append((a, b))
    return pairs


def canonical(v):
    v = [int(x) for x in v]
    g = 0
    for x in v:
        g = np.gcd(g, abs(x))
    v = [x // g for x in v]
    first = next(x for x in v if x)
    return tuple(v) if first > 0 else tuple(-x for x in v)


def fan_counts(points):
    """(cones, edge pairs, distinct edge directions) by float LPs."""
    verts = vertex_indices(points)
    pairs = edge_pairs(points, verts)
    dirs = {canonical(np.subtract(points[a], points[b])) for a, b in pairs}
    return len(verts), len(pairs), len(dirs)


def sampled_argmax(points, costs):
    """Index of the maximizer of each cost row, or -1 when the top two are within 1e-9."""
    P = np.array(points, dtype=float)
    vals = np.asarray(costs, dtype=float) @ P.T
    order = np.argsort(-vals, axis=1, kind="stable")
    top = vals[np.arange(len(vals)), order[:, 0]]
    second = vals[np.arange(len(vals)), order[:, 1]] if P.shape[0] > 1 else top - 1
    idx = order[:, 0].copy()
    idx[top - second < 1e-9] = -1
    return idx
