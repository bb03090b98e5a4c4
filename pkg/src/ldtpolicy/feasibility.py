"""Exact feasibility oracle for homogeneous integer linear systems.

A system mixes rows ``a.c >= 1`` (strict rows of a homogeneous system after
scaling), ``b.c >= 0`` and ``e.c = 0``.  By Motzkin's transposition theorem it
is infeasible iff there are multipliers y >= 0, z >= 0 and free w with

    sum y_i a_i + sum z_j b_j + sum w_k e_k = 0,   sum y_i = 1.

The oracle runs a phase-1 simplex (Bland's rule) on that transposed system,
which has only n + 1 equality rows.  The tableau is kept fraction-free
(integer pivoting with a common denominator), so every decision is exact.
A zero phase-1 optimum yields a Farkas certificate; a positive optimum yields
the simplex multipliers, from which a primal witness is read off.
"""

from __future__ import annotations

import enum
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence

import numpy as np

from .core import canonical_normal

_INT64_SAFE = 1 << 30


class Relation(enum.Enum):
    GE_ZERO = ">=0"
    EQ_ZERO = "=0"
    GE_ONE = ">=1"


@dataclass(frozen=True)
class LinSystem:
    dim: int
    rows: tuple  # of (normal, Relation)

    def __post_init__(self):
        rows = tuple((tuple(int(x) for x in a), Relation(rel)) for a, rel in self.rows)
        for a, _ in rows:
            if len(a) != self.dim:
                raise ValueError(f"row {a} does not have dimension {self.dim}")
        object.__setattr__(self, "rows", rows)

    def split(self):
        strict, closed, eqs = [], [], []
        for a, rel in self.rows:
            {Relation.GE_ONE: strict, Relation.GE_ZERO: closed,
             Relation.EQ_ZERO: eqs}[rel].append(a)
        return strict, closed, eqs


def strictify(strict_rows=(), closed_rows=(), eq_rows=(), dim: int | None = None) -> LinSystem:
    """Turn a mixed strict/closed homogeneous system into a LinSystem.

    ``a.c > 0`` becomes ``a.c >= 1``; this preserves feasibility because the
    system is invariant under positive scaling of c.
    """
    allrows = list(strict_rows) + list(closed_rows) + list(eq_rows)
    if dim is None:
        if not allrows:
            raise ValueError("cannot infer dimension of an empty system")
        dim = len(allrows[0])
    rows = [(a, Relation.GE_ONE) for a in strict_rows]
    rows += [(a, Relation.GE_ZERO) for a in closed_rows]
    rows += [(a, Relation.EQ_ZERO) for a in eq_rows]
    for a, _ in rows:
        if len(a) != dim:
            raise ValueError("dimension mismatch between rows")
    return LinSystem(dim, tuple(rows))


@dataclass
class FeasibilityResult:
    feasible: bool
    witness: tuple | None = None  # Fractions, satisfies every row
    direction: tuple | None = None  # integer positive multiple of the witness
    certificate: dict | None = None  # row index -> multiplier (Fraction)


@dataclass
class FeasibilityStats:
    calls: int = 0
    solves: int = 0
    cache_hits: int = 0
    pivots: int = 0

    def as_dict(self) -> dict:
        return {"calls": self.calls, "solves": self.solves,
                "cache_hits": self.cache_hits, "pivots": self.pivots}


def _positive_primitive(a):
    g = 0
    for x in a:
        g = gcd(g, x)
    if g <= 1:
        return tuple(a), max(g, 1)
    return tuple(x // g for x in a), g


def _pivot(T, r, s, D):
    p = T[r, s]
    col = T[:, s].copy()
    row = T[r].copy()
    if T.dtype != object and (abs(int(p)) >= _INT64_SAFE or np.abs(T).max() >= _INT64_SAFE):
        T = T.astype(object)
        col = col.astype(object)
        row = row.astype(object)
        p = int(p)
    T = (T * p - np.outer(col, row)) // D
    T[r] = row
    return T, p


def _solve_transposed(n: int, strict: list, closed: list, eqs: list):
    """Core exact decision.  Returns (feasible, witness | multipliers, pivots).

    multipliers are aligned with the column list strict + closed + eqs
    (one signed value per equality row).
    """
    cols = [tuple(a) + (1,) for a in strict]
    cols += [tuple(b) + (0,) for b in closed]
    cols += [tuple(e) + (0,) for e in eqs]
    cols += [tuple(-x for x in e) + (0,) for e in eqs]
    m = n + 1
    K = len(cols)
    width = K + m + 1
    T = np.zeros((m + 1, width), dtype=np.int64)
    if K:
        T[:m, :K] = np.array(cols, dtype=np.int64).T
    T[:m, K:K + m] = np.eye(m, dtype=np.int64)
    T[m - 1, -1] = 1
    # objective row: sum of constraint rows minus costs (cost 1 on artificials)
    T[m] = T[:m].sum(axis=0)
    T[m, K:K + m] = 0
    basis = list(range(K, K + m))
    D = 1
    pivots = 0
    while True:
        obj = T[m, :-1]
        enter = np.flatnonzero(obj > 0)
        if enter.size == 0:
            break
        s = int(enter[0])
        r = -1
        for i in range(m):
            a = T[i, s]
            if a <= 0:
                continue
            if r < 0:
                r = i
                continue
            lhs = int(T[i, -1]) * int(T[r, s])
            rhs = int(T[r, -1]) * int(a)
            if lhs < rhs or (lhs == rhs and basis[i] < basis[r]):
                r = i
        if r < 0:  # cannot happen: phase-1 objective is bounded below by 0
            raise AssertionError("unbounded phase-1 problem")
        T, D = _pivot(T, r, s, D)
        D = int(D)
        basis[r] = s
        pivots += 1
    value = Fraction(int(T[m, -1]), D)
    if value == 0:
        x = [Fraction(0)] * K
        for i, b in enumerate(basis):
            if b < K:
                x[b] = Fraction(int(T[i, -1]), D)
        ne = len(eqs)
        base = len(strict) + len(closed)
        mult = x[:base] + [x[base + k] - x[base + ne + k] for k in range(ne)]
        return False, mult, pivots
    # simplex multipliers: pi_k = reduced-cost-row entry of artificial k + 1
    # witness c = -pi[:n] / pi[n], kept as an integer numerator over den > 0
    P = [int(T[m, K + k]) + D for k in range(m)]
    sgn = 1 if P[n] > 0 else -1
    g = 0
    for v in P:
        g = gcd(g, v)
    num = tuple(-sgn * v // g for v in P[:n])
    return True, (num, abs(P[n]) // g), pivots


class FeasibilityOracle:
    """Exact feasibility service with a memo cache and call counters.

    Thread-safe: the cache and counters are guarded by a lock and the solver
    itself is a pure function.
    """

    def __init__(self, cache: bool = True):
        self.cache_enabled = cache
        self._cache: dict = {}
        self._lock = threading.Lock()
        self.stats = FeasibilityStats()

    def counters(self) -> FeasibilityStats:
        with self._lock:
            return FeasibilityStats(**self.stats.as_dict())

    def reset_counters(self) -> None:
        with self._lock:
            self.stats = FeasibilityStats()

    # -- canonical form -------------------------------------------------
    @staticmethod
    def _canonical(n, strict, closed, eqs):
        cs, cc, ce = {}, {}, {}
        trivially_infeasible = False
        for a in strict:
            if not any(a):
                trivially_infeasible = True
                continue
            cs.setdefault(_positive_primitive(a)[0], None)
        for b in closed:
            if any(b):
                cc.setdefault(_positive_primitive(b)[0], None)
        for e in eqs:
            if any(e):
                ce.setdefault(canonical_normal(e), None)
        key = (n, frozenset(cs), frozenset(cc), frozenset(ce))
        return key, list(cs), list(cc), list(ce), trivially_infeasible

    def solve(self, strict: Sequence = (), closed: Sequence = (), eqs: Sequence = (),
              dim: int | None = None) -> FeasibilityResult:
        """Decide {a.c >= 1 (strict), b.c >= 0 (closed), e.c = 0 (eqs)}.

        The witness (when feasible) is checked against the given rows before
        being returned.  The certificate maps positions in
        ``strict + closed + eqs`` to multipliers.
        """
        strict = [tuple(a) for a in strict]
        closed = [tuple(b) for b in closed]
        eqs = [tuple(e) for e in eqs]
        if dim is None:
            dim = len((strict + closed + eqs)[0])
        key, cs, cc, ce, bad = self._canonical(dim, strict, closed, eqs)
        with self._lock:
            self.stats.calls += 1
            hit = self._cache.get(key) if self.cache_enabled else None
            if hit is not None:
                self.stats.cache_hits += 1
        if hit is None:
            if bad:
                hit = (False, None, (cs, cc, ce), None)
            elif not cs:
                hit = (True, ((0,) * dim, 1), (cs, cc, ce), None)
            else:
                ok, payload, piv = _solve_transposed(dim, cs, cc, ce)
                hit = (ok, payload if ok else None, (cs, cc, ce), None if ok else payload)
                with self._lock:
                    self.stats.pivots += piv
            with self._lock:
                self.stats.solves += 1
                if self.cache_enabled:
                    self._cache[key] = hit
        ok, witness, canon_rows, canon_mult = hit
        if ok:
            num, den = witness
            if not _check_witness(num, den, strict, closed, eqs):
                raise AssertionError("feasibility witness failed exact verification")
            return FeasibilityResult(True, witness=tuple(Fraction(v, den) for v in num),
                                     direction=num)
        cert = _map_certificate(strict, closed, eqs, canon_rows, canon_mult)
        return FeasibilityResult(False, certificate=cert)

    def is_feasible(self, system: LinSystem) -> FeasibilityResult:
        strict, closed, eqs = system.split()
        if not system.rows:
            return FeasibilityResult(True, witness=tuple(Fraction(0) for _ in range(system.dim)),
                                     direction=(0,) * system.dim)
        return self.solve(strict, closed, eqs, dim=system.dim)


def _check_witness(num, den, strict, closed, eqs) -> bool:
    """Exact check of the witness num/den (den > 0) in integer arithmetic."""
    def val(a):
        return sum(ai * ci for ai, ci in zip(a, num) if ai)
    return (all(val(a) >= den for a in strict) and all(val(b) >= 0 for b in closed)
            and all(val(e) == 0 for e in eqs))


def _map_certificate(strict, closed, eqs, canon_rows, canon_mult):
    """Express a canonical-system certificate in terms of the caller's rows."""
    cs, cc, ce = canon_rows
    cert: dict = {}
    if canon_mult is None:  # a zero strict row is its own certificate
        for i, a in enumerate(strict):
            if not any(a):
                cert[i] = Fraction(1)
                return cert
        raise AssertionError("missing certificate")
    offset_c = len(strict)
    offset_e = len(strict) + len(closed)
    lookup_s = {a: i for i, a in enumerate(cs)}
    lookup_c = {b: len(cs) + i for i, b in enumerate(cc)}
    lookup_e = {e: len(cs) + len(cc) + i for i, e in enumerate(ce)}
    used = set()
    for i, a in enumerate(strict):
        if not any(a):
            continue
        prim, g = _positive_primitive(a)
        j = lookup_s[prim]
        if j not in used:
            used.add(j)
            if canon_mult[j]:
                cert[i] = canon_mult[j] / g
    for i, b in enumerate(closed):
        if not any(b):
            continue
        prim, g = _positive_primitive(b)
        j = lookup_c[prim]
        if j not in used:
            used.add(j)
            if canon_mult[j]:
                cert[offset_c + i] = canon_mult[j] / g
    for i, e in enumerate(eqs):
        if not any(e):
            continue
        canon = canonical_normal(e)
        j = lookup_e[canon]
        if j not in used:
            used.add(j)
            if canon_mult[j]:
                ratio = Fraction(next(x for x in e if x), next(x for x in canon if x))
                cert[offset_e + i] = canon_mult[j] / ratio
    return cert


def verify_certificate(strict, closed, eqs, cert: dict) -> bool:
    """True iff ``cert`` proves infeasibility of the system exactly."""
    rows = [tuple(a) for a in strict] + [tuple(b) for b in closed] + [tuple(e) for e in eqs]
    if not rows:
        return False
    n = len(rows[0])
    total = [Fraction(0)] * n
    ns, nc = len(strict), len(closed)
    strict_mass = Fraction(0)
    for i, y in cert.items():
        y = Fraction(y)
        if i < ns + nc and y < 0:
            return False
        if i < ns:
            strict_mass += y
        for k, x in enumerate(rows[i]):
            total[k] += y * x
    return strict_mass > 0 and all(t == 0 for t in total)


def verify_witness(system: LinSystem, c) -> bool:
    strict, closed, eqs = system.split()
    c = [Fraction(x) for x in c]
    den = 1
    for x in c:
        den = den * x.denominator // gcd(den, x.denominator)
    num = tuple(int(x * den) for x in c)
    return _check_witness(num, den, strict, closed, eqs)
