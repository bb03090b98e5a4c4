"""Exact integer/rational vector helpers, feasible sets and cost domains."""

from __future__ import annotations

import enum
import hashlib
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

IntVec = tuple  # tuple[int, ...]


class Sign(enum.Enum):
    FREE = "free"
    POSITIVE = "positive"
    NEGATIVE = "negative"

    @classmethod
    def parse(cls, token: str) -> "Sign":
        token = token.strip().lower()
        aliases = {"0": "free", "f": "free", "+": "positive", "p": "positive",
                   "-": "negative", "n": "negative"}
        return cls(aliases.get(token, token))


def dot(a: Sequence[int], c: Sequence) -> Fraction:
    if len(a) != len(c):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(c)}")
    total = Fraction(0)
    for ai, ci in zip(a, c):
        if ai:
            total += ai * Fraction(ci)
    return total


def int_dot(a: Sequence[int], c: Sequence[int]) -> int:
    return sum(ai * ci for ai, ci in zip(a, c))


def canonical_normal(v: Sequence[int]) -> IntVec:
    """Primitive representative of the line spanned by ``v``.

    Divides by the gcd of the entries and flips the sign so that the first
    nonzero entry is positive.
    """
    g = 0
    for x in v:
        g = math.gcd(g, int(x))
    if g == 0:
        raise ValueError("zero vector has no canonical normal")
    first = next(x for x in v if x)
    if first < 0:
        g = -g
    return tuple(int(x) // g for x in v)


def sub(a: Sequence[int], b: Sequence[int]) -> IntVec:
    return tuple(x - y for x, y in zip(a, b))


def integerize(c: Sequence) -> IntVec:
    """Positive integer multiple of a rational vector (clears denominators)."""
    fr = [Fraction(x) for x in c]
    den = 1
    for x in fr:
        den = den * x.denominator // math.gcd(den, x.denominator)
    return tuple(int(x * den) for x in fr)


@dataclass(frozen=True)
class FeasibleSet:
    """Explicit finite set X of integer points; list order is the canonical index."""

    dim: int
    points: tuple

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        pts = tuple(tuple(int(x) for x in p) for p in self.points)
        ragged = [i for i, p in enumerate(pts) if len(p) != self.dim]
        if ragged:
            raise ValueError(f"points with wrong dimension at rows {ragged}")
        seen: dict = {}
        dups = []
        for i, p in enumerate(pts):
            if p in seen:
                dups.append((seen[p], i))
            else:
                seen[p] = i
        if dups:
            raise ValueError(f"duplicate points (first, repeat): {dups}")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    def is_binary(self) -> bool:
        return all(x in (0, 1) for p in self.points for x in p)

    def content_hash(self) -> str:
        h = hashlib.sha256()
        h.update(f"{self.dim}\n".encode())
        for p in self.points:
            h.update((" ".join(map(str, p)) + "\n").encode())
        return h.hexdigest()


@dataclass(frozen=True)
class CostDomain:
    """Open sign orthant: coordinatewise Free, strictly positive or strictly negative."""

    signs: tuple

    def __post_init__(self):
        object.__setattr__(self, "signs", tuple(Sign(s) if not isinstance(s, Sign) else s
                                                for s in self.signs))

    @classmethod
    def uniform(cls, n: int, sign: Sign) -> "CostDomain":
        return cls(tuple([sign] * n))

    @property
    def dim(self) -> int:
        return len(self.signs)

    def strict_rows(self) -> list:
        """Normals a with a.c > 0 describing the open orthant."""
        rows = []
        n = len(self.signs)
        for i, s in enumerate(self.signs):
            if s is Sign.FREE:
                continue
            e = [0] * n
            e[i] = 1 if s is Sign.POSITIVE else -1
            rows.append(tuple(e))
        return rows

    def contains(self, c: Sequence) -> bool:
        for s, x in zip(self.signs, c):
            if s is Sign.POSITIVE and not x > 0:
                return False
            if s is Sign.NEGATIVE and not x < 0:
                return False
        return True


def check_domain(X: FeasibleSet, domain: CostDomain) -> None:
    if domain.dim != X.dim:
        raise ValueError(f"domain has {domain.dim} coordinates, feasible set has {X.dim}")


def parse_feasible_set(text: str) -> tuple[FeasibleSet, CostDomain]:
    """Parse the ``n m`` header + m rows text format.

    An optional extra line of n sign tokens (free/positive/negative, or 0/+/-)
    gives the cost domain; otherwise the domain is unrestricted.
    """
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError("empty feasible-set file")
    head = lines[0].split()
    if len(head) != 2:
        raise ValueError("header must be 'n m'")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError as exc:
        raise ValueError(f"bad header {lines[0]!r}") from exc
    if n < 1 or m < 0:
        raise ValueError("header values out of range")
    rows = lines[1:1 + m]
    if len(rows) < m:
        raise ValueError(f"expected {m} point rows, found {len(rows)}")
    points = []
    ragged = []
    for i, ln in enumerate(rows):
        try:
            p = tuple(int(tok) for tok in ln.split())
        except ValueError as exc:
            raise ValueError(f"row {i + 1}: non-integer entry") from exc
        if len(p) != n:
            ragged.append(i + 1)
        points.append(p)
    if ragged:
        raise ValueError(f"rows with wrong number of entries: {ragged}")
    extra = lines[1 + m:]
    if len(extra) > 1:
        raise ValueError("trailing content after the sign line")
    if extra:
        toks = extra[0].split()
        if len(toks) != n:
            raise ValueError("sign line must have n entries")
        domain = CostDomain(tuple(Sign.parse(t) for t in toks))
    else:
        domain = CostDomain.uniform(n, Sign.FREE)
    return FeasibleSet(n, tuple(points)), domain


def format_feasible_set(X: FeasibleSet, domain: CostDomain | None = None) -> str:
    out = [f"{X.dim} {len(X)}"]
    out.extend(" ".join(map(str, p)) for p in X.points)
    if domain is not None and any(s is not Sign.FREE for s in domain.signs):
        out.append(" ".join(s.value for s in domain.signs))
    return "\n".join(out) + "\n"


def as_fractions(c: Iterable) -> tuple:
    return tuple(Fraction(x) for x in c)
