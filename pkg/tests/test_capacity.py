import pytest

from maniac.capacity import (
    boundary_rates, check, max_sum_rate, normalize_model, region_points,
)
from maniac.errors import RateRegionViolation, TooManySources
from maniac.netsim import NetworkInstance, load_fixture, min_cut, random_dag


def parallel(C):
    return NetworkInstance(("S", "T"), (("S", "T"),) * C, ("S",), ("T",))


def test_single_source_bounds():
    net = parallel(5)
    assert check(net, [4], 1, "side-channel").feasible
    assert not check(net, [5], 1, "side-channel").feasible
    assert check(net, [3], 1, "omniscient").feasible
    assert not check(net, [4], 1, "omniscient").feasible
    assert [r.bound for r in check(net, [0], 1, "omniscient").rows] == [3]
    assert [r.bound for r in check(net, [0], 1, "side-channel").rows] == [4]


def test_fig2_region_is_three_inequalities():
    net = load_fixture("fig2")
    rep = check(net, [1, 1], 1, "omniscient")
    assert [(r.label, r.min_cut, r.bound, r.slack) for r in rep.rows] == [
        ("{S1}", 3, 1, 0), ("{S2}", 3, 1, 0), ("{S1,S2}", 4, 2, 0),
    ]
    assert region_points(net, 1, "omniscient") == {(0, 0), (1, 0), (0, 1), (1, 1)}
    assert region_points(net, 1, "side-channel") == {
        (a, b) for a in range(3) for b in range(3) if a + b <= 3
    }


def test_violation_lists_subset():
    net = NetworkInstance(
        ("S1", "S2", "T"), (("S1", "T"), ("S1", "T"), ("S1", "T"), ("S2", "T"), ("S2", "T"), ("S2", "T")),
        ("S1", "S2"), ("T",),
    )
    rep = check(net, [1, 1], 1, "omniscient")
    assert rep.feasible
    # m_{S1,S2} = 3 variant: funnel both through one 3-edge bottleneck
    net3 = NetworkInstance(
        ("S1", "S2", "A", "T"),
        (("S1", "A"), ("S1", "A"), ("S1", "A"), ("S2", "A"), ("S2", "A"), ("S2", "A"),
         ("A", "T"), ("A", "T"), ("A", "T")),
        ("S1", "S2"), ("T",),
    )
    rep = check(net3, [1, 1], 1, "omniscient")
    assert [v.label for v in rep.violations] == ["{S1,S2}"]
    err = RateRegionViolation(rep.violations)
    assert "{S1,S2}" in str(err)


def test_rows_cover_all_subsets():
    net = random_dag(8, 16, n_sources=3, n_sinks=2, seed=1)
    rep = check(net, [1, 1, 1], 0, "side-channel")
    assert len(rep.rows) == 7


@pytest.mark.parametrize("seed", range(5))
def test_z0_is_max_flow(seed):
    net = random_dag(7, 13, n_sources=2, n_sinks=2, seed=seed)
    for model in ("side-channel", "omniscient"):
        for row in check(net, [0, 0], 0, model).rows:
            assert row.bound == row.min_cut == min_cut(net, row.subset)


def test_monotone_in_z():
    net = load_fixture("toy")
    for model, c in (("side-channel", 1), ("omniscient", 2)):
        b0 = [r.bound for r in check(net, [0, 0], 0, model).rows]
        b2 = [r.bound for r in check(net, [0, 0], 2, model).rows]
        assert [x - y for x, y in zip(b0, b2)] == [2 * c] * len(b0)


def test_side_channel_strictly_larger():
    for name in ("fig2", "toy", "butterfly"):
        net = load_fixture(name)
        for z in (1,):
            sc, om = region_points(net, z, "side-channel"), region_points(net, z, "omniscient")
            assert om < sc
            assert max_sum_rate(net, z, "side-channel") > max_sum_rate(net, z, "omniscient")


def test_boundary_rates():
    assert boundary_rates(load_fixture("fig2"), 1, "omniscient") == [(1, 1)]


def test_too_many_sources():
    net = random_dag(14, 30, n_sources=11, n_sinks=1, seed=0)
    with pytest.raises(TooManySources):
        check(net, [1] * 11, 0, "side-channel")


def test_model_names():
    assert normalize_model("Side_Channel") == "side-channel"
    assert normalize_model("om") == "omniscient"
    with pytest.raises(ValueError):
        normalize_model("eavesdropper")


def test_report_text():
    txt = check(load_fixture("fig2"), [1, 1], 1, "side-channel").to_text()
    assert "feasible=True" in txt and "{S1,S2}" in txt
