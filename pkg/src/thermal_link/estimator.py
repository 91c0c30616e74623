"""scikit-learn style wrapper around the simulation pipeline.

``fit`` solves the dressed spectrum and transition rates for the configured
parameters; ``transform`` maps a column of ``gamma * t`` values to the
correlation measures at those times.  Hyper-parameters are plain constructor
arguments, so ``get_params``/``set_params``/``clone`` and grid utilities work.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .core import ParameterError, SystemParams, temperature_for_occupation, validate
from .correlations import correlation_arrays
from .dissipation import transition_rates
from .dynamics import DensityMatrix, propagate, trajectory_to_bare
from .simulate import COLUMNS
from .spectral import solve


class ThermalCorrelationModel(TransformerMixin, BaseEstimator):
    """Correlations of the two atoms as a function of ``gamma * t``.

    Parameters mirror :class:`~thermal_link.core.SystemParams`.  When
    ``nbar`` is given it overrides ``T1``, ``T2`` and ``T3`` with the
    temperature whose occupation at the lowest excited level equals ``nbar``.

    Examples
    --------
    >>> model = ThermalCorrelationModel(nbar=1.0).fit()
    >>> model.transform([[1e6]]).shape
    (1, 6)
    """

    def __init__(self, omega_a=4.0e6, delta=4.0e5, g1=5.0, g2=5.0, nu=5.0,
                 gamma1=1.0, gamma2=1.0, gamma3=1.0, T1=0.0, T2=0.0, T3=0.0,
                 nbar=None, delta_sign=1):
        self.omega_a = omega_a
        self.delta = delta
        self.g1 = g1
        self.g2 = g2
        self.nu = nu
        self.gamma1 = gamma1
        self.gamma2 = gamma2
        self.gamma3 = gamma3
        self.T1 = T1
        self.T2 = T2
        self.T3 = T3
        self.nbar = nbar
        self.delta_sign = delta_sign

    def _system_params(self) -> SystemParams:
        return SystemParams(self.omega_a, self.delta, self.g1, self.g2, self.nu,
                            self.gamma1, self.gamma2, self.gamma3,
                            self.T1, self.T2, self.T3, self.delta_sign)

    def fit(self, X=None, y=None):
        params = self._system_params()
        report = validate(params)
        if not report.ok:
            raise ParameterError("; ".join(report.problems))
        dressed = solve(params)
        if self.nbar is not None:
            T = 0.0 if self.nbar == 0 else temperature_for_occupation(self.nbar, dressed.bohr(6, 5))
            params = params.with_temperatures(T, T, T)
        self.params_ = params
        self.dressed_ = dressed
        self.rates_ = transition_rates(dressed, params)
        self.n_features_in_ = 1
        return self

    def trajectory(self, times):
        check_is_fitted(self, "rates_")
        return propagate(DensityMatrix.ground(), self.dressed_, self.rates_, np.asarray(times, dtype=float))

    def transform(self, X):
        """Columns ``C, E, QD, CC, I, P000`` for each ``gamma * t`` in ``X[:, 0]``."""
        check_is_fitted(self, "rates_")
        X = check_array(X, ensure_2d=True)
        if X.shape[1] != 1:
            raise ValueError("expected a single column of gamma*t values")
        times = X[:, 0]
        if np.any(times < 0):
            raise ValueError("times must be non-negative")
        order = np.argsort(times, kind="stable")
        unique, inverse = np.unique(times[order], return_inverse=True)
        traj = self.trajectory(unique)
        table = correlation_arrays(trajectory_to_bare(traj, self.dressed_))
        out = np.column_stack([table[c] for c in COLUMNS])[inverse]
        result = np.empty_like(out)
        result[order] = out
        return result

    def get_feature_names_out(self, input_features=None):
        return np.array(COLUMNS, dtype=object)
