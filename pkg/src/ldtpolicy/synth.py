"""Minimal-depth LDT synthesis: iterative dynamic programming with pruning.

Nodes are identified by the pair (H<, H>) of divider-id sets.  Each node
keeps its candidate cones F(N), one interior witness point per candidate
cone, and (once expanded) its candidate dividers H(N) together with the
candidate cones of both children for every divider in H(N).
"""

from __future__ import annotations

import math
import sys
import time
from dataclasses import dataclass, field
from typing import Sequence

from .core import CostDomain, check_domain, int_dot
from .fan import NormalFan, Position
from .feasibility import FeasibilityOracle
from .policy import Branch, LdtPolicy, Leaf

INF = math.inf


class SynthesisError(RuntimeError):
    pass


class BudgetExceeded(Exception):
    pass


@dataclass
class SynthConfig:
    cone_inference: bool = True      # position table decides non-straddling cones
    divider_inference: bool = True   # H(N) read off child candidate sets
    sort_dividers: bool = True       # discrepancy ordering of H(N)
    witness_reuse: bool = True       # parent witnesses settle one side for free
    short_circuit: bool = True       # skip a sibling that cannot beat the incumbent
    progress_only: bool = True       # branch only on dividers that drop a cone on both sides
    budget: float | None = None      # wall-clock seconds for the whole run
    pruning: bool = True


@dataclass
class SynthesisReport:
    depth: float
    nodes_processed: int
    nodes_expanded: int
    feas_checks: int
    feas_solves: int
    schedule: list
    per_iteration: list            # (kappa, depth, seconds)
    completed: bool
    minimal: bool
    mode: str
    root_cones: int
    dividers: int
    seconds: float

    def as_dict(self) -> dict:
        return {
            "mode": self.mode,
            "depth": self.depth if self.depth != INF else None,
            "completed": self.completed,
            "minimal": self.minimal,
            "seconds": round(self.seconds, 6),
            "nodes_processed": self.nodes_processed,
            "nodes_expanded": self.nodes_expanded,
            "feasibility_checks": self.feas_checks,
            "feasibility_solves": self.feas_solves,
            "root_cones": self.root_cones,
            "dividers": self.dividers,
            "schedule": list(self.schedule),
            "per_iteration": [{"kappa": k, "depth": d if d != INF else None,
                               "seconds": round(t, 6)} for k, d, t in self.per_iteration],
        }


class SynthNode:
    __slots__ = ("below", "above", "cones", "pool", "cand", "inherited", "dividers",
                 "children", "memo", "memo_div", "kval", "expanded")

    def __init__(self, below, above, cones, pool, cand, inherited=None):
        self.below = below          # frozenset of divider ids with h(c) < 0
        self.above = above          # frozenset of divider ids with h(c) > 0
        self.cones = cones          # tuple of cone positions, sorted
        self.pool = pool            # cone -> list of integer points of F_k in R(N)
        self.cand = cand            # divider ids that may still cross the region
        self.inherited = inherited  # a parent's children table (superset region)
        self.dividers = None        # branching candidates from H(N), sorted
        self.children = None        # every h in H(N) -> (lo cones, hi cones)
        self.memo = None
        self.memo_div = None
        self.kval = None            # (kappa, value, divider) from the latest pass
        self.expanded = False

    @property
    def key(self):
        return (self.below, self.above)

    def release(self):
        """Drop working data once the node's value is final."""
        self.pool = None
        self.children = None
        self.inherited = None

    @property
    def depth(self) -> int:
        return len(self.below) + len(self.above)


def lower_bound(num_cones: int) -> int:
    """ceil(log2 |F(N)|): each test at best halves the candidate cones."""
    if num_cones < 1:
        raise ValueError("a reachable node has at least one candidate cone")
    return (num_cones - 1).bit_length()


def discrepancy(n_lo: int, n_hi: int, n: int):
    half = n / 2
    return (n_lo - half) ** 2 + (n_hi - half) ** 2


def parse_schedule(text: str | None, num_dividers: int) -> list:
    """``full`` (1..|H|), ``greedy`` (1), ``geometric`` (1,2,4,..,|H|) or ``1,3,7``."""
    if text is None or text == "full":
        return list(range(1, num_dividers + 1)) or [1]
    if text == "greedy":
        return [1]
    if text == "geometric":
        out, k = [], 1
        while k < num_dividers:
            out.append(k)
            k *= 2
        out.append(max(num_dividers, 1))
        return out
    vals = [int(x) for x in text.split(",") if x.strip()]
    return vals


class Synthesizer:
    """Memoized min-max recursion over the tree nodes of a fixed normal fan and domain."""

    def __init__(self, fan: NormalFan, domain: CostDomain,
                 oracle: FeasibilityOracle | None = None, config: SynthConfig | None = None):
        check_domain(fan.X, domain)
        self.fan = fan
        self.domain = domain
        self.oracle = oracle or FeasibilityOracle()
        self.config = config or SynthConfig()
        self.normals = [dv.normal for dv in fan.dividers]
        self.neg_normals = [tuple(-x for x in nv) for nv in self.normals]
        self.domain_rows = domain.strict_rows()
        self.nodes: dict = {}
        self.nodes_processed = 0
        self.nodes_expanded = 0
        self._deadline = None
        self._ub = INF
        self._kappa = None
        self.root = self._make_root()

    # -- geometry --------------------------------------------------------
    def _region_rows(self, below, above):
        rows = [self.neg_normals[h] for h in below]
        rows += [self.normals[h] for h in above]
        return rows

    def _probe(self, cone, region_rows, extra):
        rows = list(self.fan.cone_rows[cone]) + region_rows + self.domain_rows + [extra]
        res = self.oracle.solve(strict=rows, dim=self.fan.n)
        return res.direction if res.feasible else None

    def _make_root(self):
        fan = self.fan
        cones, pool = [], {}
        restricted = bool(self.domain_rows)
        for k in range(len(fan.cones)):
            w = fan.witnesses[k]
            if restricted and not all(int_dot(r, w) > 0 for r in self.domain_rows):
                rows = list(fan.cone_rows[k]) + self.domain_rows
                res = self.oracle.solve(strict=rows, dim=fan.n)
                if not res.feasible:
                    continue
                w = res.direction
            cones.append(k)
            pool[k] = [tuple(w)]
        if not cones:
            raise SynthesisError("no optimality cone meets the open cost domain")
        root = SynthNode(frozenset(), frozenset(), tuple(cones), pool,
                         tuple(range(len(fan.dividers))))
        self.nodes[root.key] = root
        return root

    def child_candidates(self, node: SynthNode, h: int, region_rows=None):
        """Candidate cones of both children of ``node`` along divider h.

        A side is settled without solving anything when the position table,
        a parent region or a stored point of the cone already decides it;
        points found by solving are added to the node's pool.
        """
        if region_rows is None:
            region_rows = self._region_rows(node.below, node.above)
        pos = self.fan.position
        cfg = self.config
        nv, neg = self.normals[h], self.neg_normals[h]
        parent = node.inherited.get(h) if (node.inherited and cfg.cone_inference) else None
        lo, hi = [], []
        for k in node.cones:
            p = pos[k][h] if cfg.cone_inference else Position.STRADDLES
            if p is Position.BELOW:
                lo.append(k)
                continue
            if p is Position.ABOVE:
                hi.append(k)
                continue
            can_lo = can_hi = True
            if parent is not None:
                can_lo = k in parent[0]
                can_hi = k in parent[1]
            has_lo = has_hi = False
            if cfg.witness_reuse:
                for w in node.pool[k]:
                    s = int_dot(nv, w)
                    if s < 0:
                        has_lo = True
                    elif s > 0:
                        has_hi = True
            if can_lo and not has_lo:
                w = self._probe(k, region_rows, neg)
                if w is not None:
                    has_lo = True
                    node.pool[k].append(w)
            if can_hi and not has_hi:
                w = self._probe(k, region_rows, nv)
                if w is not None:
                    has_hi = True
                    node.pool[k].append(w)
            if has_lo:
                lo.append(k)
            if has_hi:
                hi.append(k)
        return frozenset(lo), frozenset(hi)

    def _crosses(self, node, h, region_rows) -> bool:
        rows = region_rows + self.domain_rows
        if not rows:
            return True
        return self.oracle.solve(strict=rows, eqs=[self.normals[h]], dim=self.fan.n).feasible

    def expand(self, node: SynthNode) -> None:
        """Compute H(N) (sorted) and the children's candidate cones."""
        if node.expanded:
            return
        region_rows = self._region_rows(node.below, node.above)
        cfg = self.config
        children = {}
        for h in node.cand:
            if not cfg.divider_inference and not self._crosses(node, h, region_rows):
                continue
            lo, hi = self.child_candidates(node, h, region_rows)
            if not lo or not hi:
                if not cfg.divider_inference:
                    raise AssertionError("a divider crossing the region leaves a side empty")
                continue
            children[h] = (lo, hi)
        n = len(node.cones)
        members = list(children)
        if cfg.progress_only:
            # a divider leaving one child with every cone only shrinks the region;
            # two cones adjacent inside R(N) always give one that does not
            members = [h for h in members
                       if len(children[h][0]) < n and len(children[h][1]) < n] or members
        if cfg.sort_dividers:
            members.sort(key=lambda h: (discrepancy(len(children[h][0]), len(children[h][1]), n), h))
        else:
            members.sort()
        node.dividers = tuple(members)
        node.children = children
        node.expanded = True
        self.nodes_expanded += 1
        if n >= 2 and not members:
            raise AssertionError("several candidate cones but no divider crosses the region")

    def _child(self, node: SynthNode, h: int, side: int) -> SynthNode:
        if side < 0:
            key = (node.below | {h}, node.above)
        else:
            key = (node.below, node.above | {h})
        ch = self.nodes.get(key)
        if ch is None:
            nv = self.normals[h]
            cones = tuple(sorted(node.children[h][0 if side < 0 else 1]))
            pool = {k: [w for w in node.pool[k] if side * int_dot(nv, w) > 0] for k in cones}
            cand = tuple(g for g in sorted(node.children) if g != h)
            ch = SynthNode(key[0], key[1], cones, pool, cand, inherited=node.children)
            self.nodes[key] = ch
        return ch

    # -- dynamic programming --------------------------------------------
    def evaluate(self, node: SynthNode, kappa: int, ub: float) -> float:
        if node.memo is not None:
            return node.memo
        if node.kval is not None and node.kval[0] == kappa:
            return node.kval[1]
        if self._deadline is not None and time.perf_counter() > self._deadline:
            raise BudgetExceeded
        if node.kval is None:
            self.nodes_processed += 1
        ncones = len(node.cones)
        if ncones == 1:
            node.memo = 0
            node.release()
            return 0
        lb = lower_bound(ncones)
        if self.config.pruning and node.depth + lb >= ub:
            node.memo = INF
            node.release()
            return INF
        self.expand(node)
        best, best_div = INF, None
        divs = node.dividers
        limit = min(kappa, len(divs))
        exact = kappa >= len(divs)
        for h in divs[:limit]:
            lo = self.evaluate(self._child(node, h, -1), kappa, ub)
            if self.config.short_circuit and lo + 1 >= best:
                continue
            hi = self.evaluate(self._child(node, h, +1), kappa, ub)
            v = max(lo, hi) + 1
            if v < best:
                best, best_div = v, h
                if self.config.short_circuit and best <= lb:
                    exact = True
                    break
        if exact:
            node.memo = best
            node.memo_div = best_div
            node.release()
        node.kval = (kappa, best, best_div)
        return best

    def _chosen(self, node: SynthNode):
        if node.memo is not None and node.memo != INF and node.memo_div is not None:
            return node.memo_div
        if node.kval is not None and node.kval[0] == self._kappa and node.kval[2] is not None:
            return node.kval[2]
        raise AssertionError("no recorded divider for a node on the incumbent tree")

    def extract(self, meta=None) -> LdtPolicy:
        nodes, index = [], {}
        fan = self.fan
        stack = [self.root]
        order = []
        while stack:
            nd = stack.pop()
            if nd.key in index:
                continue
            index[nd.key] = len(order)
            order.append(nd)
            if len(nd.cones) > 1:
                h = self._chosen(nd)
                stack.append(self._child(nd, h, +1))
                stack.append(self._child(nd, h, -1))
        for nd in order:
            if len(nd.cones) == 1:
                nodes.append(Leaf(fan.solution(nd.cones[0])))
            else:
                h = self._chosen(nd)
                lo = index[self._child(nd, h, -1).key]
                hi = index[self._child(nd, h, +1).key]
                nodes.append(Branch(self.normals[h], lo, hi))
        return LdtPolicy(fan.n, tuple(nodes), 0, dict(meta or {}))

    def run(self, schedule: Sequence[int], mode: str = "iterative", meta=None):
        if not schedule:
            raise SynthesisError("empty kappa schedule")
        if any(b <= a for a, b in zip(schedule, schedule[1:])) or schedule[0] < 1:
            raise SynthesisError("kappa schedule must be positive and strictly increasing")
        old_limit = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old_limit, 10000 + 20 * len(self.fan.dividers)))
        t0 = time.perf_counter()
        self._deadline = t0 + self.config.budget if self.config.budget else None
        calls0 = self.oracle.counters()
        policy = None
        per_iter = []
        completed = True
        ub = INF
        try:
            for kappa in schedule:
                self._kappa = kappa
                v = self.evaluate(self.root, kappa, ub)
                if v < ub:
                    ub = v
                    policy = self.extract(meta)
                per_iter.append((kappa, ub, time.perf_counter() - t0))
        except BudgetExceeded:
            completed = False
        finally:
            sys.setrecursionlimit(old_limit)
        calls1 = self.oracle.counters()
        full = bool(per_iter) and per_iter[-1][0] >= len(self.fan.dividers)
        report = SynthesisReport(
            depth=ub, nodes_processed=self.nodes_processed, nodes_expanded=self.nodes_expanded,
            feas_checks=calls1.calls - calls0.calls, feas_solves=calls1.solves - calls0.solves,
            schedule=list(schedule), per_iteration=per_iter, completed=completed,
            minimal=completed and full and self.config.pruning is not None, mode=mode,
            root_cones=len(self.root.cones), dividers=len(self.fan.dividers),
            seconds=time.perf_counter() - t0)
        if policy is not None:
            policy.meta.update({"mode": mode, "depth": policy.depth,
                                "minimal": report.minimal})
        return policy, report


def synthesize(fan: NormalFan, domain: CostDomain, schedule=None, config=None,
               oracle=None, meta=None):
    """Iterative synthesis; the default schedule is kappa = 1..|H(X)|."""
    synth = Synthesizer(fan, domain, oracle=oracle, config=config)
    if schedule is None or isinstance(schedule, str):
        schedule = parse_schedule(schedule, len(fan.dividers))
    policy, report = synth.run(list(schedule), mode="iterative", meta=meta)
    if policy is None:
        raise SynthesisError("budget exhausted before the first iteration completed")
    return policy, report


def synthesize_greedy(fan: NormalFan, domain: CostDomain, config=None, oracle=None, meta=None):
    """Single pass with kappa = 1: only the best-sorted divider is tried per node."""
    synth = Synthesizer(fan, domain, oracle=oracle, config=config)
    policy, report = synth.run([1], mode="greedy", meta=meta)
    if policy is None:
        raise SynthesisError("budget exhausted before the greedy pass completed")
    report.minimal = len(fan.dividers) <= 1 and report.completed
    return policy, report
