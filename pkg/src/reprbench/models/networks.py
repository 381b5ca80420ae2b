"""The forecasting networks built on :mod:`reprbench.numerics`.

Every network maps ``(history, calendar)`` to one output per sample. History is
``(batch, 168)`` for the vector networks and ``(batch, 7, 24)`` for the CNN.
"""

from __future__ import annotations

import math

import numpy as np

from ..calendar_features import FEATURE_NAMES
from ..errors import ReprMismatch
from ..numerics import Tensor, concat, conv2d, dense, flatten, relu
from ..numerics.tensor import reshape
from ..transforms import DAYS, HOURS, WINDOW
from .spec import Family, ModelSpec, check_compatible

N_CAL = len(FEATURE_NAMES)


class Network:
    """Ordered collection of named parameter tensors plus a forward pass."""

    takes_matrix = False

    def __init__(self):
        self.params: dict[str, Tensor] = {}

    def _weight(self, name, shape, fan_in, rng, zero=False):
        # He-uniform; zeros when no rng is given
        if zero or rng is None:
            data = np.zeros(shape)
        else:
            bound = math.sqrt(6.0 / fan_in)
            data = rng.uniform(-bound, bound, size=shape)
        self.params[name] = Tensor(data, requires_grad=True)

    def _bias(self, name, shape):
        self.params[name] = Tensor(np.zeros(shape), requires_grad=True)

    def _layer(self, w, b, n_out, n_in, rng, zero):
        self._weight(w, (n_out, n_in), n_in, rng, zero)
        self._bias(b, (n_out,))

    def parameters(self) -> list[Tensor]:
        return list(self.params.values())

    def n_parameters(self) -> int:
        return sum(p.size for p in self.params.values())

    def state(self) -> dict[str, np.ndarray]:
        return {k: p.data.copy() for k, p in self.params.items()}

    def load_state(self, state: dict) -> None:
        for k, p in self.params.items():
            arr = np.asarray(state[k], dtype=np.float64)
            if arr.shape != p.shape:
                raise ValueError(f"parameter {k}: expected {p.shape}, got {arr.shape}")
            p.data = arr.copy()

    def _check_history(self, hist: Tensor):
        if (hist.data.ndim == 3) != self.takes_matrix:
            raise ReprMismatch(
                f"{type(self).__name__} got history of shape {hist.shape}"
            )

    def __call__(self, hist, cal) -> Tensor:
        hist = hist if isinstance(hist, Tensor) else Tensor(hist)
        cal = cal if isinstance(cal, Tensor) else Tensor(cal)
        self._check_history(hist)
        return self.forward(hist, cal)

    def forward(self, hist: Tensor, cal: Tensor) -> Tensor:
        raise NotImplementedError


class FCN(Network):
    """Two dense layers encode the history into a latent vector, which is joined
    with the calendar features and mapped to the forecast."""

    def __init__(self, hidden=(128, 64, 32), rng=None, zero=False):
        super().__init__()
        h1, latent, h2 = hidden
        self.latent_size = latent
        self._layer("W1", "b1", h1, WINDOW, rng, zero)
        self._layer("W2", "b2", latent, h1, rng, zero)
        self._layer("W3", "b3", h2, latent + N_CAL, rng, zero)
        self._layer("W4", "b4", 1, h2, rng, zero)

    def latent(self, hist: Tensor) -> Tensor:
        p = self.params
        h = relu(dense(hist, p["W1"], p["b1"]))
        return relu(dense(h, p["W2"], p["b2"]))

    def forward(self, hist, cal):
        p = self.params
        z = concat([self.latent(hist), cal], axis=-1)
        z = relu(dense(z, p["W3"], p["b3"]))
        return dense(z, p["W4"], p["b4"])


class CNN(Network):
    takes_matrix = True

    def __init__(self, filters=(16, 32), kernel=(3, 3), hidden=(128, 64, 32), rng=None, zero=False):
        super().__init__()
        f1, f2 = filters
        r, s = kernel
        self.feature_shape = (f2, DAYS - 2 * (r - 1), HOURS - 2 * (s - 1))
        if min(self.feature_shape[1:]) < 1:
            raise ValueError(f"kernel {kernel} too large for two stacked layers on {DAYS}x{HOURS}")
        self._weight("K1", (f1, 1, r, s), r * s, rng, zero)
        self._bias("c1", (f1,))
        self._weight("K2", (f2, f1, r, s), f1 * r * s, rng, zero)
        self._bias("c2", (f2,))
        width = int(np.prod(self.feature_shape)) + N_CAL
        for i, n in enumerate(tuple(hidden) + (1,), start=1):
            self._layer(f"W{i}", f"b{i}", n, width, rng, zero)
            width = n
        self.n_dense = len(hidden) + 1

    def features(self, hist: Tensor) -> Tensor:
        p = self.params
        x = reshape(hist, (hist.shape[0], 1, DAYS, HOURS))
        x = relu(conv2d(x, p["K1"], p["c1"]))
        return relu(conv2d(x, p["K2"], p["c2"]))

    def forward(self, hist, cal):
        p = self.params
        z = concat([flatten(self.features(hist), start_dim=1), cal], axis=-1)
        for i in range(1, self.n_dense):
            z = relu(dense(z, p[f"W{i}"], p[f"b{i}"]))
        return dense(z, p[f"W{self.n_dense}"], p[f"b{self.n_dense}"])


class MLP10(Network):
    """History and calendar features through one small hidden layer."""

    def __init__(self, hidden=10, rng=None, zero=False):
        super().__init__()
        n_in = WINDOW + N_CAL
        self._layer("W1", "b1", hidden, n_in, rng, zero)
        self._layer("W2", "b2", 1, hidden, rng, zero)

    def forward(self, hist, cal):
        p = self.params
        z = relu(dense(concat([hist, cal], axis=-1), p["W1"], p["b1"]))
        return dense(z, p["W2"], p["b2"])


def build_network(spec: ModelSpec, rng=None, zero: bool = False) -> Network:
    check_compatible(spec.family, spec.repr)
    if spec.family is Family.FCN:
        return FCN(spec.fcn_hidden, rng, zero)
    if spec.family is Family.CNN:
        return CNN(spec.cnn_filters, spec.cnn_kernel, spec.cnn_hidden, rng, zero)
    if spec.family is Family.MLP10:
        return MLP10(spec.mlp_hidden, rng, zero)
    raise ReprMismatch(f"{spec.family.value} is not a network family")
