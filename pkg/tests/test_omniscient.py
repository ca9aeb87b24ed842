import random

import pytest

from maniac.codec_omniscient import (
    OmniscientParams, om_decode, om_encode, om_rate_check, stage1_error_profile, theorem3_bound,
    transfer_invertible,
)
from maniac.errors import DecodeFailure, RateRegionViolation, ShapeMismatch
from maniac.experiments import good_network_code
from maniac.ff_tower import Mat, fold_to, unfold_to
from maniac.matrix import rank
from maniac.netsim import NetworkInstance, adversary_strategies, load_fixture, transmit


@pytest.fixture(scope="module")
def fig2():
    return load_fixture("fig2")


@pytest.fixture(scope="module")
def params251(fig2):
    return OmniscientParams.build(251, (1, 1), 1, 1, seed=0, net=fig2)


def random_payloads(P, seed):
    r = random.Random(seed)
    return [Mat.random(P.tower[i + 1], *P.payload_shape(i), r) for i in range(P.s)]


def test_parameter_identities(fig2):
    P = OmniscientParams.build(2, (1, 1), 1, 1, seed=0, net=fig2)
    assert P.n == (3, 3)
    assert P.ell == 15
    assert all(c.d == 3 for c in P.codes)
    assert P.payload_shape(0) == (1, 3) and P.payload_shape(1) == (1, 1)
    P3 = OmniscientParams.build(3, (2, 1, 1), 1, 2, seed=0)
    assert P3.n == (4, 3, 3)
    assert P3.ell == 10 + 2 * 36


def test_generators_derived_from_seed():
    a = OmniscientParams.build(3, (1, 1), 1, seed=4)
    b = OmniscientParams.build(3, (1, 1), 1, seed=4)
    assert [g.to_lists() for g in a.generators] == [g.to_lists() for g in b.generators]
    assert a.tower.moduli == b.tower.moduli


def test_encode_structure(params251):
    P = params251
    zero = om_encode(0, Mat.zeros(P.tower[1], 1, 3), P)
    assert zero.M_prime.is_zero()
    assert zero.M[:, list(range(6))].to_lists() == [[1, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0], [0, 0, 1, 0, 0, 0]]
    X = random_payloads(P, 0)
    m2 = om_encode(1, X[1], P)
    assert m2.M[:, list(range(6))].to_lists() == [[0, 0, 0, 1, 0, 0], [0, 0, 0, 0, 1, 0], [0, 0, 0, 0, 0, 1]]
    assert fold_to(m2.M_prime, P.tower[2]) == P.generators[1] @ X[1]
    m1 = om_encode(0, X[0], P)
    assert fold_to(m1.M_prime, P.tower[1]) == P.generators[0] @ X[0]


def test_encode_accepts_base_field_payload(params251):
    P = params251
    X = random_payloads(P, 1)[0]
    base = unfold_to(X, P.tower[0])
    assert om_encode(0, base, P).M == om_encode(0, X, P).M
    with pytest.raises(ShapeMismatch):
        om_encode(0, Mat.zeros(P.tower[1], 2, 3), P)


def test_rate_check_examples(fig2):
    P = OmniscientParams.build(251, (1, 1), 1)
    assert om_rate_check(P, fig2).feasible
    tight = NetworkInstance(
        ("S1", "S2", "A", "T"),
        (("S1", "A"),) * 3 + (("S2", "A"),) * 3 + (("A", "T"),) * 3,
        ("S1", "S2"), ("T",),
    )
    with pytest.raises(RateRegionViolation) as ei:
        om_rate_check(P, tight)
    assert [v.label for v in ei.value.violations] == ["{S1,S2}"]
    single = NetworkInstance(("S", "T"), (("S", "T"),) * 5, ("S",), ("T",))
    assert om_rate_check(OmniscientParams.build(251, (3,), 1), single).feasible
    with pytest.raises(RateRegionViolation):
        OmniscientParams.build(251, (2, 1), 1, net=fig2)
    OmniscientParams.build(251, (2, 1), 1, net=fig2, force=True)


def test_error_free_recovery(fig2, params251):
    P = params251
    for seed in range(30):
        X = random_payloads(P, seed)
        M = [om_encode(i, X[i], P).M for i in range(2)]
        out = transmit(fig2, M, None, seed)["T"]
        if good_network_code(out, P):
            assert om_decode(out.Y, P) == X


def test_single_link_adversary(fig2, params251):
    P = params251
    ok = 0
    for seed in range(40):
        X = random_payloads(P, seed)
        M = [om_encode(i, X[i], P).M for i in range(2)]
        adv = adversary_strategies(fig2, 1, seed, strategy="mincut" if seed % 2 else "random",
                                   field=P.tower[0], ell=P.ell)
        out = transmit(fig2, M, adv, 100 + seed)["T"]
        if not good_network_code(out, P):
            continue
        prof = stage1_error_profile(out.Y, P, X)
        assert prof["slack"] >= 0
        assert om_decode(out.Y, P) == X
        ok += 1
    assert ok >= 30


def test_truncating_the_adversary_keeps_success(fig2, params251):
    P = params251
    for seed in range(15):
        X = random_payloads(P, seed)
        M = [om_encode(i, X[i], P).M for i in range(2)]
        adv = adversary_strategies(fig2, 1, seed, strategy="random", field=P.tower[0], ell=P.ell)
        out = transmit(fig2, M, adv, seed)["T"]
        if good_network_code(out, P) and om_decode(out.Y, P) == X:
            weak = transmit(fig2, M, adv.truncated(0), seed)["T"]
            assert om_decode(weak.Y, P) == X


def test_surplus_sink_edges_and_interior_rates():
    net = load_fixture("toy")  # 7 sink in-edges, sum n = 6
    P = OmniscientParams.build(251, (1, 1), 1, seed=2, net=net)
    for seed in range(20):
        X = random_payloads(P, seed)
        M = [om_encode(i, X[i], P).M for i in range(2)]
        adv = adversary_strategies(net, 1, seed, strategy="random", field=P.tower[0], ell=P.ell)
        out = transmit(net, M, adv, seed)["T"]
        if good_network_code(out, P):
            assert om_decode(out.Y, P) == X


def test_three_source_recursion():
    edges = ((("S1", "T"),) * 2 + (("S2", "T"),) * 2 + (("S3", "T"),) * 2
             + (("S1", "A"), ("S2", "A"), ("S3", "A")) + (("A", "T"),) * 3)
    net = NetworkInstance(("S1", "S2", "S3", "A", "T"), edges, ("S1", "S2", "S3"), ("T",))
    P = OmniscientParams.build(5, (1, 1, 1), 1, seed=0, net=net)
    assert P.ell == 9 + 27
    decoded = 0
    for seed in range(6):
        X = random_payloads(P, seed)
        M = [om_encode(i, X[i], P).M for i in range(3)]
        adv = adversary_strategies(net, 1, seed, strategy="random", field=P.tower[0], ell=P.ell)
        out = transmit(net, M, adv, seed)["T"]
        if good_network_code(out, P):
            assert om_decode(out.Y, P) == X
            decoded += 1
    assert decoded >= 1


def test_failure_carries_stage(fig2, params251):
    P = params251
    X = random_payloads(P, 0)
    M = [om_encode(i, X[i], P).M for i in range(2)]
    # three attacked edges far exceed z = 1
    adv = adversary_strategies(fig2, 3, 0, strategy="random", field=P.tower[0], ell=P.ell)
    failures = 0
    for seed in range(10):
        out = transmit(fig2, M, adv, seed)["T"]
        try:
            failures += om_decode(out.Y, P) != X
        except DecodeFailure as exc:
            assert exc.stage.startswith("stage1:s=")
            failures += 1
    assert failures > 0
    with pytest.raises(ShapeMismatch):
        om_decode(Mat.zeros(P.tower[0], 4, 14), P)


def test_transfer_invertible_and_bound(fig2, params251):
    out = transmit(fig2, [Mat.zeros(params251.tower[0], 3, 15)] * 2, None, 0)["T"]
    assert isinstance(transfer_invertible(out.T, params251), bool)
    assert theorem3_bound(2, 8, 251) == pytest.approx(16 / 251)
    assert theorem3_bound(2, 8, 2) == 1.0


def test_intermediate_nodes_stay_in_base_field(fig2, params251):
    P = params251
    M = [om_encode(i, x, P).M for i, x in enumerate(random_payloads(P, 3))]
    assert all(m.field is P.tower[0] for m in M)
    out = transmit(fig2, M, None, 0)["T"]
    assert out.Y.field is P.tower[0] and rank(out.Y) <= 4
