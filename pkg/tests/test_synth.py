import numpy as np
import pytest

from ldtpolicy.baselines import brute_force
from ldtpolicy.fan import build_fan
from ldtpolicy.policy import Branch
from ldtpolicy.feasibility import FeasibilityOracle
from ldtpolicy.synth import (SynthConfig, SynthesisError, Synthesizer, discrepancy,
                             lower_bound, parse_schedule, synthesize, synthesize_greedy)
from ldtpolicy.sampling import sample_ball_orthant, to_fractions

from conftest import fan_of, five_point, instance, policy_of


@pytest.mark.parametrize("k, lb", [(1, 0), (2, 1), (3, 2), (4, 2), (5, 3), (8, 3), (9, 4)])
def test_lower_bound(k, lb):
    assert lower_bound(k) == lb


def test_lower_bound_rejects_empty():
    with pytest.raises(ValueError):
        lower_bound(0)


@pytest.mark.parametrize("lo, hi, n, expected", [(5, 5, 10, 0), (9, 1, 10, 32), (3, 3, 4, 2)])
def test_discrepancy(lo, hi, n, expected):
    assert discrepancy(lo, hi, n) == expected


@pytest.mark.parametrize("text, expected", [
    ("full", [1, 2, 3, 4, 5]),
    (None, [1, 2, 3, 4, 5]),
    ("greedy", [1]),
    ("geometric", [1, 2, 4, 5]),
    ("1,3", [1, 3]),
])
def test_parse_schedule(text, expected):
    assert parse_schedule(text, 5) == expected


@pytest.mark.parametrize("schedule", [[], [2, 2], [0, 1]])
def test_bad_schedules(schedule):
    X, dom = five_point()
    with pytest.raises(SynthesisError):
        synthesize(build_fan(X), dom, schedule=schedule)


def test_five_point_policy_shape():
    X, dom = five_point()
    policy, report = synthesize(build_fan(X), dom)
    assert policy.depth == 3 == report.depth
    assert len(policy.leaves()) == 5
    assert sum(isinstance(nd, Branch) for nd in policy.nodes) == 4
    assert report.minimal and report.completed


def test_single_cone_is_a_leaf():
    from ldtpolicy.core import CostDomain, FeasibleSet, Sign
    X = FeasibleSet(2, ((0, 0), (1, 1)))
    dom = CostDomain.uniform(2, Sign.POSITIVE)   # (1,1) always wins
    policy, report = synthesize(build_fan(X), dom)
    assert policy.depth == 0 and report.root_cones == 1
    assert policy.evaluate((3, 5)) == ((1, 1), 0)


def test_root_children_partition_cones():
    X, dom = instance("knp", 5)
    syn = Synthesizer(fan_of("knp", 5), dom)
    root = syn.root
    syn.expand(root)
    for h in root.dividers:
        lo, hi = root.children[h]
        assert lo and hi                               # h genuinely splits R(N)
        assert set(lo) | set(hi) == set(root.cones)    # straddling cones land in both


@pytest.mark.parametrize("progress_only", [True, False])
def test_branching_candidates_drop_cones(progress_only):
    X, dom = instance("cut", 4)
    syn = Synthesizer(fan_of("cut", 4), dom, config=SynthConfig(progress_only=progress_only))
    root = syn.root
    syn.expand(root)
    n = len(root.cones)
    stalled = [h for h in root.children if n in (len(root.children[h][0]), len(root.children[h][1]))]
    if progress_only:
        assert not set(stalled) & set(root.dividers)
    else:
        assert set(root.dividers) == set(root.children)


def test_pruned_node_memoizes_infinity():
    # 5 cones meet the positive orthant, so the root needs 3 tests; ub = 3 is unbeatable
    X, dom = instance("knp", 5)
    syn = Synthesizer(fan_of("knp", 5), dom)
    syn._kappa, syn._deadline = 1, None
    assert len(syn.root.cones) == 5
    assert syn.evaluate(syn.root, 1, 3) == float("inf")
    assert syn.root.memo == float("inf")


@pytest.mark.parametrize("cls, d", [("knp", 4), ("knp", 5), ("cut", 3), ("tsp", 4)])
def test_iteration_depths_never_increase(cls, d):
    _, report = policy_of(cls, d, "iterative")
    depths = [dd for _, dd, _ in report.per_iteration]
    assert depths == sorted(depths, reverse=True)


@pytest.mark.parametrize("cls, d", [("knp", 5), ("knp", 6), ("cut", 4), ("tsp", 4)])
def test_policy_matches_brute_force(cls, d):
    X, dom = instance(cls, d)
    policy, _ = policy_of(cls, d, "greedy")
    for c in to_fractions(sample_ball_orthant(X.dim, dom, 7, 300)):
        x, _ = policy.evaluate(c, exact=True)
        _, best = brute_force(X, c)
        assert sum(a * b for a, b in zip(x, c)) == best


@pytest.mark.parametrize("flag", ["cone_inference", "divider_inference", "sort_dividers",
                                  "witness_reuse", "short_circuit", "progress_only"])
def test_ablations_keep_depth(flag):
    X, dom = instance("knp", 5)
    fan = build_fan(X, FeasibilityOracle())
    cfg = SynthConfig(**{flag: False})
    _, report = synthesize(fan, dom, config=cfg)
    assert report.depth == 4


def test_greedy_never_beats_optimum():
    X, dom = instance("knp", 6)
    _, sorted_rep = synthesize_greedy(fan_of("knp", 6), dom)
    _, plain_rep = synthesize_greedy(fan_of("knp", 6), dom, config=SynthConfig(sort_dividers=False))
    assert sorted_rep.depth >= 4 and plain_rep.depth >= 4


def test_budget_stops_run():
    X, dom = instance("knp", 7)
    fan = fan_of("knp", 7)
    try:
        _, report = synthesize(fan, dom, config=SynthConfig(budget=0.5))
    except SynthesisError:
        return   # nothing finished inside the budget
    assert not report.completed and not report.minimal


def test_report_is_json_ready():
    import json
    _, report = policy_of("knp", 4, "iterative")
    doc = report.as_dict()
    assert json.loads(json.dumps(doc))["depth"] == 2
    assert np.all(np.diff([it["kappa"] for it in doc["per_iteration"]]) > 0)
