import math
import os

import pytest

import sslot


def test_worked_example_policy():
    sol = sslot.solve_sdp(sslot.worked_example())
    assert sol.policy.reorder_points[0] == 14.0
    assert sol.policy.order_up_to[0] == 70.0
    assert abs(sol.G(1, 70.0) - 262.58) < 0.5
    assert abs(sol.expected_cost - 362.58) < 0.5


def test_heuristics_agree():
    inst = sslot.worked_example()
    mp = sslot.solve_heuristic(inst, "mp")
    bs = sslot.solve_heuristic(inst, "bs", step=0.01)
    for a, b in zip(mp.policy.reorder_points, bs.policy.reorder_points):
        assert abs(a - b) <= 0.5
    assert abs(mp.linked_costs[0] - 366.138) < 1e-2


def test_simulation_is_seeded():
    inst = sslot.worked_example()
    policy = sslot.Policy([14, 28, 58, 28], [70, 54, 117, 54])
    a = sslot.simulate(inst, policy, replications=2000, seed=5)
    b = sslot.simulate(inst, policy, replications=2000, seed=5, threads=2)
    assert a.mean == b.mean
    assert a.std_error > 0


def test_loss_identity():
    for x in (-2.0, 0.0, 1.5):
        assert math.isclose(sslot.complementary_loss(x), x + sslot.loss(x), abs_tol=1e-12)
    assert sslot.approximation_error(6) > sslot.approximation_error(11)


def test_instances_and_errors():
    inst = sslot.make_instance(sslot.CostParameters(K=50, b=5), [10, 20], 0.2)
    assert inst.horizon == 2
    assert inst.std_devs == pytest.approx([2.0, 4.0])
    assert sslot.parse_instance(inst.to_json()).means == [10.0, 20.0]
    assert sslot.demand_means("STA") == [10.0] * 8
    with pytest.raises(sslot.ValidationError):
        sslot.solve_heuristic(inst, "nope")
    with pytest.raises(sslot.ParseError):
        sslot.read_instance("/nonexistent/instance.json")
    data = os.environ.get("SSLOT_DATA_DIR")
    if data:
        assert sslot.read_instance(os.path.join(data, "example4.json")).means == [20, 40, 60, 40]
