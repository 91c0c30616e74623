import numpy as np
import pytest
from sklearn.base import clone

from thermal_link.core import ParameterError, SystemParams, with_equal_occupation
from thermal_link.estimator import ThermalCorrelationModel
from thermal_link.simulate import COLUMNS, simulate


def test_transform_matches_simulate():
    times = np.array([1.0, 1e3, 1e6])
    model = ThermalCorrelationModel(nbar=1.0).fit()
    out = model.transform(times[:, None])
    ref = simulate(with_equal_occupation(SystemParams(), 1.0), times).table
    np.testing.assert_allclose(out, np.column_stack([ref[c] for c in COLUMNS]), atol=1e-12)


def test_transform_unsorted_and_repeated():
    model = ThermalCorrelationModel(nbar=1.0).fit()
    X = np.array([[1e4], [1.0], [1e4], [0.0]])
    out = model.transform(X)
    sorted_out = model.transform(np.array([[0.0], [1.0], [1e4]]))
    np.testing.assert_array_equal(out, sorted_out[[2, 1, 2, 0]])


def test_params_round_trip():
    model = ThermalCorrelationModel(nu=100.0, T3=6e6)
    copy = clone(model)
    assert copy.get_params() == model.get_params()
    assert copy.set_params(nu=5.0).nu == 5.0
    assert list(model.get_feature_names_out()) == list(COLUMNS)


def test_errors():
    with pytest.raises(ParameterError):
        ThermalCorrelationModel(g1=-1.0).fit()
    model = ThermalCorrelationModel().fit()
    with pytest.raises(ValueError):
        model.transform(np.ones((2, 2)))
    with pytest.raises(ValueError):
        model.transform([[-1.0]])
