import os

import pytest

from ldtpolicy.core import CostDomain, FeasibleSet, Sign
from ldtpolicy.fan import build_fan
from ldtpolicy.feasibility import FeasibilityOracle
from ldtpolicy.instances import make_instance
from ldtpolicy.synth import synthesize, synthesize_greedy

SLOW = os.environ.get("LDT_SLOW") == "1"

FIVE_POINTS = ((-1, -1), (-1, 0), (0, 1), (1, 0), (2, 0))

# acceptance outcomes: criterion id -> list of (label, ok, detail); ok None means skipped
ACCEPTANCE: dict = {}
ACCEPTANCE_TITLES: dict = {}


def record(crit, title, label, ok, detail=""):
    ACCEPTANCE_TITLES[crit] = title
    ACCEPTANCE.setdefault(crit, []).append((label, ok, detail))


def five_point():
    return FeasibleSet(2, FIVE_POINTS), CostDomain.uniform(2, Sign.FREE)


_cache: dict = {}


def instance(cls, d):
    key = ("inst", cls, d)
    if key not in _cache:
        _cache[key] = make_instance(cls, d)
    return _cache[key]


def fan_of(cls, d):
    key = ("fan", cls, d)
    if key not in _cache:
        X, _ = instance(cls, d)
        oracle = FeasibilityOracle()
        _cache[key] = (build_fan(X, oracle), oracle)
    return _cache[key][0]


def policy_of(cls, d, mode="greedy"):
    """Cached (policy, report) for an instance; mode 'greedy' or 'iterative'."""
    key = ("policy", cls, d, mode)
    if key not in _cache:
        X, dom = instance(cls, d)
        fan = fan_of(cls, d)
        oracle = _cache[("fan", cls, d)][1]
        meta = {"instance": f"{cls}({d})", "x_hash": X.content_hash()}
        if mode == "greedy":
            _cache[key] = synthesize_greedy(fan, dom, oracle=oracle, meta=meta)
        else:
            _cache[key] = synthesize(fan, dom, oracle=oracle, meta=meta)
    return _cache[key]


def pytest_collection_modifyitems(config, items):
    if SLOW:
        return
    skip = pytest.mark.skip(reason="long-running tier; set LDT_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def _summary_line(crit):
    rows = ACCEPTANCE[crit]
    ran = [r for r in rows if r[1] is not None]
    bad = [r for r in ran if not r[1]]
    skipped = [r[0] for r in rows if r[1] is None]
    status = "FAIL" if bad else ("PASS" if ran else "SKIP")
    line = f"C{crit} {ACCEPTANCE_TITLES[crit]}: {status} ({len(ran) - len(bad)}/{len(ran)} checks)"
    if bad:
        line += "; failing: " + ", ".join(f"{lab} [{det}]" for lab, _, det in bad)
    if skipped:
        line += "; not run: " + ", ".join(skipped)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for crit in sorted(ACCEPTANCE):
            terminalreporter.write_line(_summary_line(crit))
