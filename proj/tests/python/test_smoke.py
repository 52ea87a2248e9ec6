import pytest

import vnet


def test_simulate_is_deterministic():
    a = vnet.simulate({"events_per_client": "40", "seed": "3"})
    b = vnet.simulate({"events_per_client": "40", "seed": "3"})
    assert a["serialized"] == b["serialized"]
    assert a["violations"] == 0
    assert 0.0 < a["delivery_rate"] <= 1.0


def test_unknown_key_rejected():
    with pytest.raises(ValueError):
        vnet.simulate({"net.nope": "1"})


def test_closed_form_loss():
    _, fast = vnet.closed_form("fast", 5, 0.5)
    _, pb = vnet.closed_form("primary_backup", 5, 0.5)
    assert fast == pytest.approx(1 - (1 - 0.5**5) ** 2)
    assert pb == pytest.approx(0.75)


def test_loss_grid():
    points, violations, _ = vnet.check_loss_grid()
    assert points == 891
    assert violations == 0


def test_merkle_compare():
    r = vnet.merkle_compare(objects=20, changes=1, seed=2)
    assert r["files"] == 500
    assert r["sets_equal"]
    assert len(r["changed"]) == 1
    assert r["merkle_comparisons"] < r["flat_comparisons"]


def test_run_experiment_rows():
    assert "E-delivery-drop" in vnet.experiments()
    rows = vnet.run_experiment("E-gc-onoff", events_per_client=40, repetitions=1)
    assert [r["variant"] for r in rows] == ["gc_on", "gc_off"]
    assert all(r["violations"] == 0 for r in rows)


def test_resolve_master():
    assert vnet.resolve_master(10, [4, 16]) == 4
    assert vnet.resolve_master(12, [4, 16, 30]) == 16
