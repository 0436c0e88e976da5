import math

import numpy as np
import pytest

from gblab.costs import CostDomainError, eval_cost, make_builtin


def test_floor_power_values():
    c = make_builtin("floor_power", lambda_=2.0)
    assert eval_cost(c, 1, 0.3)[0] == pytest.approx(9.0)
    c_half = make_builtin("floor_power", lambda_=0.5)
    assert eval_cost(c_half, 1, 1 / 7)[0] == pytest.approx(math.sqrt(7))
    with pytest.raises(ValueError):
        make_builtin("floor_power", lambda_=-1.0)


def test_floor_power_constant_on_cells():
    c = make_builtin("floor_power", lambda_=1.3)
    for n in range(1, 101):
        lo, hi = 1 / (n + 1), 1 / n
        xs = np.linspace(lo + 1e-9, hi, 7)
        vals = c.eval_many(1, xs)[:, 0]
        assert np.all(vals == vals[0])
        assert vals[0] == pytest.approx(n**1.3)


def test_dedekind_cost_sign_alternation():
    c = make_builtin("dedekind")
    assert eval_cost(c, 2, 0.3)[0] == pytest.approx(-3.0)
    assert eval_cost(c, 1, 0.3)[0] == pytest.approx(3.0)
    xs = np.linspace(0.01, 1.0, 1000)
    assert np.allclose(c.eval_many(1, xs) + c.eval_many(2, xs), 0.0)


def test_constant_and_log():
    c5 = make_builtin("constant", value=5.0)
    for j in (1, 2, 7):
        assert eval_cost(c5, j, 0.123)[0] == 5.0
    clog = make_builtin("log")
    assert eval_cost(clog, 1, 1 / math.e)[0] == pytest.approx(1.0, abs=1e-12)


def test_periodicity_in_j():
    c = make_builtin("dedekind")
    xs = np.linspace(1e-3, 1.0, 1000)
    for j in (1, 2, 3):
        assert np.array_equal(c.eval_many(j, xs), c.eval_many(j + c.m, xs))


def test_domain_errors():
    c = make_builtin("log")
    with pytest.raises(CostDomainError):
        c.eval_many(1, np.array([0.0]))
    with pytest.raises(CostDomainError):
        c.eval_many(1, np.array([1.5]))


def test_modsym_estermann_require_provider():
    with pytest.raises(ValueError):
        make_builtin("modsym")
    with pytest.raises(ValueError):
        make_builtin("estermann")


def test_identity_kind():
    c = make_builtin("identity")
    assert eval_cost(c, 3, 0.77)[0] == pytest.approx(0.77)
    assert c.kernel_id is not None
