import numpy as np
import pytest
from numpy.testing import assert_allclose

from gssbo.objectives import make_objective


@pytest.mark.parametrize("oid,dim", [
    ("eggholder2", 2), ("hartmann6", 6), ("levy_10", 10),
    ("powell_8", 8), ("rastrigin_4", 4),
])
def test_dimensions_and_bounds(oid, dim):
    obj = make_objective(oid)
    assert obj.dim == dim
    assert obj.bounds.shape == (dim, 2)
    assert np.all(obj.bounds[:, 0] < obj.bounds[:, 1])


@pytest.mark.parametrize("oid", [
    "eggholder2", "hartmann6", "levy_3", "powell_4", "rastrigin_5",
])
def test_optimum_attained_at_stored_optimizer(oid):
    obj = make_objective(oid)
    assert obj.evaluate(obj.optimizer) == pytest.approx(obj.optimum_value, abs=1e-10)


@pytest.mark.parametrize("oid", [
    "eggholder2", "hartmann6", "levy_6", "powell_4", "rastrigin_3",
])
def test_optimum_is_an_upper_bound_on_samples(oid):
    obj = make_objective(oid)
    rng = np.random.default_rng(0)
    lo, hi = obj.bounds[:, 0], obj.bounds[:, 1]
    X = lo + rng.random((20000, obj.dim)) * (hi - lo)
    assert np.max(obj.evaluate_many(X)) <= obj.optimum_value + 1e-9


def test_known_optimum_values():
    assert make_objective("hartmann6").optimum_value == pytest.approx(3.322368, abs=1e-6)
    assert make_objective("eggholder2").optimum_value == pytest.approx(959.6407, abs=1e-4)
    for oid in ("levy_5", "powell_4", "rastrigin_7"):
        assert make_objective(oid).optimum_value == 0.0


def test_eggholder_frozen_point_value():
    obj = make_objective("eggholder2")
    # hand-computable reference point
    assert_allclose(obj.evaluate([0.0, 0.0]),
                    47.0 * np.sin(np.sqrt(47.0)), rtol=1e-12)


def test_vectorized_matches_scalar():
    obj = make_objective("levy_4")
    rng = np.random.default_rng(1)
    X = rng.uniform(-10, 10, size=(50, 4))
    many = obj.evaluate_many(X)
    for i in range(50):
        assert many[i] == pytest.approx(obj.evaluate(X[i]), rel=1e-12)


def test_out_of_bounds_rejected():
    obj = make_objective("hartmann6")
    with pytest.raises(ValueError, match="bounds"):
        obj.evaluate(np.full(6, 1.5))
    with pytest.raises(ValueError, match="bounds"):
        obj.evaluate_many(np.full((2, 6), -0.5))


def test_dimension_mismatch_rejected():
    obj = make_objective("rastrigin_3")
    with pytest.raises(ValueError):
        obj.evaluate([0.0, 0.0])


def test_bad_ids_rejected():
    for bad in ("nope", "powell_6", "levy_0", "levy_x"):
        with pytest.raises(ValueError):
            make_objective(bad)


def test_maximization_orientation():
    # every family is negated-minimization: generic points score below optimum
    for oid in ("levy_4", "powell_4", "rastrigin_4"):
        obj = make_objective(oid)
        assert obj.evaluate(np.full(obj.dim, 2.0)) < obj.optimum_value
