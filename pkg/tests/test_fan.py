import numpy as np
import pytest

from ldtpolicy.core import FeasibleSet
from ldtpolicy.fan import Position, build_fan, cone_position, pair_has_positive_dim
from ldtpolicy.feasibility import FeasibilityOracle
from ldtpolicy.sampling import sample_ball_orthant

from conftest import fan_of, five_point, instance
from oracles import fan_counts, sampled_argmax

# Knp(5) straddle total, frozen from the first exact run (float-LP counts agree on cones/dividers)
KNP5_STRADDLES = 134


def test_five_point_cones():
    X, _ = five_point()
    fan = build_fan(X)
    assert [X.points[i] for i in fan.cones] == [(-1, -1), (-1, 0), (0, 1), (2, 0)]
    assert len(fan.dividers) == 4


def test_five_point_ray_adjacency():
    X, _ = five_point()
    o = FeasibilityOracle()
    assert pair_has_positive_dim(X, 0, 1, o)       # share the negative c1 axis
    assert not pair_has_positive_dim(X, 1, 4, o)   # opposite cones
    with pytest.raises(ValueError):
        pair_has_positive_dim(X, 2, 2, o)


@pytest.mark.parametrize("normal, expected", [
    ((1, 0), Position.ABOVE),       # F(x5) sits in c1 > 0
    ((0, 1), Position.STRADDLES),   # but meets both signs of c2
])
def test_five_point_position_of_x5(normal, expected):
    X, _ = five_point()
    assert cone_position(X, 4, normal, FeasibilityOracle()) is expected
    # cross-check on a fine grid of rays
    angles = np.linspace(-np.pi, np.pi, 3601)
    rays = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    arg = sampled_argmax(X.points, rays)
    signs = {np.sign(r @ normal) for r, a in zip(rays, arg) if a == 4 and abs(r @ normal) > 1e-9}
    assert len(signs) == (2 if expected is Position.STRADDLES else 1)


def test_generating_pairs_never_straddle():
    fan = fan_of("knp", 5)
    for dv in fan.dividers:
        for a, b in dv.pairs:
            assert fan.position[a][dv.id] is Position.ABOVE
            assert fan.position[b][dv.id] is Position.BELOW


def test_knp5_straddle_count_regression():
    assert fan_of("knp", 5).straddle_count() == KNP5_STRADDLES


def test_position_inference_matches_lp():
    X, _ = instance("knp", 4)
    inferred = build_fan(X, infer_positions=True)
    solved = build_fan(X, infer_positions=False)
    assert inferred.position == solved.position


@pytest.mark.parametrize("cls, d", [("knp", 4), ("knp", 6), ("cut", 4), ("tsp", 5)])
def test_counts_match_float_lp_oracle(cls, d):
    fan = fan_of(cls, d)
    r = fan.report()
    X, _ = instance(cls, d)
    assert (r["cones"], r["dividers"], r["canonical_dividers"]) == fan_counts(X.points)


@pytest.mark.parametrize("cls, d", [("knp", 5), ("cut", 4), ("tsp", 5)])
def test_sampled_argmaxes_are_detected_cones(cls, d):
    X, dom = instance(cls, d)
    fan = fan_of(cls, d)
    costs = sample_ball_orthant(X.dim, dom, 11, 20000)
    hit = {int(i) for i in sampled_argmax(X.points, costs) if i >= 0}
    assert hit <= set(fan.cones)


def test_degenerate_sets_rejected():
    with pytest.raises(ValueError):
        build_fan(FeasibleSet(2, ((0, 0),)))
    with pytest.raises(ValueError):
        build_fan(FeasibleSet(2, ((0, 0), (1, 1))), adjacency="bogus")
