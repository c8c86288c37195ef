import pytest

import mrv


def test_simulate_is_deterministic():
    cfg = mrv.RunConfig(n=4, f=1, w_max=2, seed=3)
    a = mrv.simulate(cfg, rounds=8, wave=2)
    b = mrv.simulate(cfg, rounds=8, wave=2)
    assert isinstance(a, bytes)
    assert a == b


def test_order_and_verify_honest_run():
    cfg = mrv.RunConfig(n=7, f=2, w_max=4, seed=1)
    log = mrv.simulate(cfg, rounds=6, wave=2, strategies={6: "conflict:0,1"}, sparse=True)
    out = mrv.order(log)
    assert out["invariants_hold"]
    assert out["metrics"]["kind"] == "metrics"
    assert out["metrics"]["slices_sealed"] == len(out["orders"]) == 3
    assert mrv.verify(log) == []


def test_scenarios_and_fault_injection():
    assert "three-cycle" in mrv.scenario_names()
    log, roles = mrv.scenario("three-cycle")
    (slice0,) = mrv.order(log)["orders"]
    assert slice0["ordered"] == [roles["A"], roles["B"], roles["C"]]
    assert slice0["enforceable"] == []

    log, _ = mrv.scenario("coexistence-lead")
    assert mrv.verify(log) == []
    assert mrv.verify(log, fault="window") != []


def test_bench_pair_counts():
    rows = mrv.bench([8, 16], repeats=1)
    assert [r["pair_evaluations"] for r in rows] == [28, 120]


def test_errors_surface_as_mrv_error():
    with pytest.raises(mrv.MrvError):
        mrv.scenario("no-such-scenario")
    with pytest.raises(mrv.MrvError):
        mrv.RunConfig(n=3, f=1)
    with pytest.raises(mrv.MrvError):
        mrv.order(b"garbage\n")
