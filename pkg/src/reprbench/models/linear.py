"""Least-squares baselines: demand (or its h-lag difference) regressed on the
168-hour history and the target-time calendar features."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import EmptyTrainingSet, ReprMismatch
from ..samples import Sample, SampleSet
from ..transforms import WINDOW

RIDGE = 1e-8


@dataclass
class LinearModel:
    intercept: float
    history_weights: np.ndarray
    calendar_weights: np.ndarray
    differenced: bool
    horizon: int

    def __post_init__(self):
        self.history_weights = np.asarray(self.history_weights, dtype=np.float64)
        self.calendar_weights = np.asarray(self.calendar_weights, dtype=np.float64)
        if self.history_weights.shape != (WINDOW,) or self.calendar_weights.shape != (8,):
            raise ValueError("LinearModel needs 168 history and 8 calendar weights")


def solve_least_squares(features: np.ndarray, targets: np.ndarray, ridge: float = RIDGE):
    """Intercept and weights minimising ``|y - a - F w|^2 + ridge |w|^2``.

    Columns are centred first, which leaves the solution unchanged (the intercept
    is not damped) but keeps the normal equations well conditioned.
    """
    F = np.asarray(features, dtype=np.float64)
    y = np.asarray(targets, dtype=np.float64)
    if len(y) == 0:
        raise EmptyTrainingSet("no samples to fit")
    mu, ybar = F.mean(axis=0), y.mean()
    Fc = F - mu
    gram = Fc.T @ Fc
    gram[np.diag_indices_from(gram)] += ridge
    w = np.linalg.solve(gram, Fc.T @ (y - ybar))
    return float(ybar - mu @ w), w


def _design(sset: SampleSet) -> np.ndarray:
    return np.hstack([sset.inputs.reshape(len(sset), -1), sset.calendar])


def _as_set(samples, differenced: bool) -> SampleSet:
    sset = SampleSet.from_samples(samples)
    if sset.kind.is_matrix or sset.kind.differenced != differenced:
        raise ReprMismatch(
            f"{'differenced' if differenced else 'plain'} linear model cannot use {sset.kind.value} samples"
        )
    return sset


def fit_linear(samples, differenced: bool, ridge: float = RIDGE) -> LinearModel:
    """Fit on absolute targets, or on ``x_{k+h} - x_k`` when ``differenced``."""
    if len(samples) == 0:
        raise EmptyTrainingSet("no samples to fit")
    sset = _as_set(samples, differenced)
    alpha, w = solve_least_squares(_design(sset), sset.targets, ridge)
    return LinearModel(alpha, w[:WINDOW], w[WINDOW:], differenced, sset.horizon)


def predict_linear(m: LinearModel, s):
    """Absolute demand forecast in GW for a :class:`Sample` or a :class:`SampleSet`."""
    single = isinstance(s, Sample)
    sset = _as_set([s] if single else s, m.differenced)
    out = m.intercept + _design(sset) @ np.concatenate([m.history_weights, m.calendar_weights])
    if m.differenced:
        out = sset.x_k + out
    return float(out[0]) if single else out
