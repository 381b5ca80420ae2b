"""Vector/matrix transformations and the four history representations.

All history windows are newest-first: element 0 is the value at the forecast
origin ``k``, element ``i`` the value ``i`` hours earlier.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyInput,
    IndexOutOfBounds,
    InputTooShort,
    InsufficientHistory,
    InvalidComponents,
    InvalidK,
    KernelTooLarge,
    ShapeMismatch,
)

WINDOW = 168
DAYS, HOURS = 7, 24


class ReprKind(str, enum.Enum):
    NAIVE = "naive"
    NAIVE_DIFFERENCES = "naive_differences"
    RESHAPED = "reshaped"
    RESHAPED_DIFFERENCES = "reshaped_differences"

    @property
    def differenced(self) -> bool:
        return self in (ReprKind.NAIVE_DIFFERENCES, ReprKind.RESHAPED_DIFFERENCES)

    @property
    def is_matrix(self) -> bool:
        return self in (ReprKind.RESHAPED, ReprKind.RESHAPED_DIFFERENCES)

    @classmethod
    def parse(cls, text: str) -> "ReprKind":
        key = text.strip().lower().replace("-", "_").replace(" ", "_")
        try:
            return cls(key)
        except ValueError:
            raise ValueError(
                f"unknown representation {text!r}; choose from {[k.value for k in cls]}"
            ) from None


@dataclass(frozen=True)
class ReprInput:
    data: np.ndarray
    kind: ReprKind
    origin_index: int
    horizon: int

    def __post_init__(self):
        want = (DAYS, HOURS) if self.kind.is_matrix else (WINDOW,)
        if self.data.shape != want:
            raise ShapeMismatch(f"{self.kind.value} expects shape {want}, got {self.data.shape}")


def _values(ts) -> np.ndarray:
    return np.asarray(getattr(ts, "values", ts), dtype=np.float64)


def window_naive(ts, k: int, length: int = WINDOW) -> np.ndarray:
    """``[x_k, x_{k-1}, ..., x_{k-length+1}]``."""
    x = _values(ts)
    if k - (length - 1) < 0 or k >= len(x):
        raise InsufficientHistory(f"origin {k} needs indices {k - length + 1}..{k}")
    return x[k - length + 1:k + 1][::-1].copy()


def window_differences(ts, k: int, h: int, length: int = WINDOW) -> np.ndarray:
    """``[x_k - x_{k-h}, ..., x_{k-length+1} - x_{k-length+1-h}]``."""
    if h < 1:
        raise ValueError("differencing lag must be >= 1")
    x = _values(ts)
    if k - (length - 1) - h < 0 or k >= len(x):
        raise InsufficientHistory(
            f"origin {k} with lag {h} needs indices {k - length + 1 - h}..{k}"
        )
    return window_naive(x, k, length) - window_naive(x, k - h, length)


def reshape(v, rows: int, cols: int) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.size != rows * cols:
        raise ShapeMismatch(f"cannot reshape {v.size} elements into {rows}x{cols}")
    return v.reshape(rows, cols).copy()


def build_representation(ts, k: int, kind: ReprKind, h: int) -> ReprInput:
    kind = ReprKind(kind)
    vec = window_differences(ts, k, h) if kind.differenced else window_naive(ts, k)
    data = reshape(vec, DAYS, HOURS) if kind.is_matrix else vec
    return ReprInput(data, kind, k, h)


def window_matrix(x: np.ndarray, origins: np.ndarray, kind: ReprKind, h: int) -> np.ndarray:
    """Stacked representations for many origins at once, shape ``(n, 168)`` or ``(n, 7, 24)``."""
    kind = ReprKind(kind)
    x = np.asarray(x, dtype=np.float64)
    origins = np.asarray(origins, dtype=np.int64)
    need = WINDOW - 1 + (h if kind.differenced else 0)
    if len(origins) and (origins.min() < need or origins.max() >= len(x)):
        raise InsufficientHistory(f"origins must lie in [{need}, {len(x) - 1}]")
    idx = origins[:, None] - np.arange(WINDOW)[None, :]
    out = x[idx]
    if kind.differenced:
        out = out - x[idx - h]
    if kind.is_matrix:
        out = out.reshape(len(origins), DAYS, HOURS)
    return out


def select(v, indices):
    """Pick elements by index. For a matrix pass one index list per axis."""
    a = np.asarray(v)
    if a.ndim == 1:
        idx = np.asarray(indices, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= a.shape[0]):
            raise IndexOutOfBounds(f"indices {list(idx)} out of bounds for length {a.shape[0]}")
        return a[idx]
    if len(indices) != a.ndim:
        raise ShapeMismatch(f"need {a.ndim} index lists, got {len(indices)}")
    out = a
    for axis, ix in enumerate(indices):
        ix = np.asarray(ix, dtype=np.int64)
        if ix.size and (ix.min() < 0 or ix.max() >= a.shape[axis]):
            raise IndexOutOfBounds(f"axis {axis} index out of bounds for size {a.shape[axis]}")
        out = np.take(out, ix, axis=axis)
    return out


_AGGREGATORS = {"mean": np.mean, "sum": np.sum, "min": np.min, "max": np.max}


def aggregate(m, axis: str = "rows", fn: str = "mean") -> np.ndarray:
    """Reduce a matrix along ``axis``.

    ``"rows"`` reduces within each row (one value per row), ``"cols"`` within each
    column.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.size == 0:
        raise EmptyInput("cannot aggregate an empty matrix")
    if m.ndim != 2:
        raise ShapeMismatch(f"aggregate expects a matrix, got shape {m.shape}")
    if axis not in ("rows", "cols"):
        raise ValueError(f"axis must be 'rows' or 'cols', not {axis!r}")
    return _AGGREGATORS[fn](m, axis=1 if axis == "rows" else 0)


def convolve(v, kernel) -> np.ndarray:
    """Valid cross-correlation with stride 1 (kernel not flipped)."""
    v = np.asarray(v, dtype=np.float64)
    kernel = np.asarray(kernel, dtype=np.float64)
    if v.ndim != kernel.ndim:
        raise ShapeMismatch("input and kernel must have the same rank")
    if any(kd > vd for kd, vd in zip(kernel.shape, v.shape)):
        raise KernelTooLarge(f"kernel {kernel.shape} larger than input {v.shape}")
    windows = np.lib.stride_tricks.sliding_window_view(v, kernel.shape)
    axes = tuple(range(v.ndim, 2 * v.ndim))
    return np.tensordot(windows, kernel, axes=(axes, tuple(range(v.ndim))))


def rescale_linear(v, n_out: int) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if len(v) < 2:
        raise InputTooShort("need at least two points to interpolate")
    if n_out < 2:
        raise ValueError("n_out must be >= 2")
    pos = np.arange(n_out) * (len(v) - 1) / (n_out - 1)
    out = np.interp(pos, np.arange(len(v)), v)
    out[0], out[-1] = v[0], v[-1]
    return out


def _assign(points, centroids):
    d2 = ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    # argmin returns the first minimum, i.e. the lowest centroid index on ties
    return np.argmin(d2, axis=1), d2


def kmeans_cost(points, centroids, assignments) -> float:
    points = np.asarray(points, dtype=np.float64)
    return float(((points - np.asarray(centroids)[assignments]) ** 2).sum())


def kmeans(points, k: int, seed: int = 0, max_iter: int = 100, history: list | None = None,
           n_init: int = 10):
    """Lloyd's algorithm, polished by single-point transfers, restarted ``n_init`` times.

    Restart ``r`` starts from ``k`` distinct sample points drawn with seed
    ``seed + r``; the lowest-cost run wins. After Lloyd converges, any single
    point whose move to another cluster lowers the total cost (centroid shifts
    included) is moved, and Lloyd resumes; this escapes fixed points that plain
    Lloyd cannot leave. If ``history`` is a list, it receives the cost after
    every step of the winning run. An emptied cluster keeps its previous centroid.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim == 1:
        points = points[:, None]
    n = len(points)
    if not 1 <= k <= n:
        raise InvalidK(f"k must be in [1, {n}], got {k}")
    best = None
    for r in range(max(1, n_init)):
        trace: list = []
        cent, assign = _lloyd(points, k, seed + r, max_iter, trace)
        if best is None or trace[-1] < best[2][-1]:
            best = (cent, assign, trace)
    if history is not None:
        history.extend(best[2])
    return best[0], best[1]


def _lloyd(points, k, seed, max_iter, history):
    from .numerics.rng import seeded_rng

    start = seeded_rng(seed).permutation(len(points))[:k]
    centroids = points[np.sort(start)].copy()
    assignments, _ = _assign(points, centroids)
    for _ in range(max_iter):
        history.append(kmeans_cost(points, centroids, assignments))
        for j in range(k):
            members = points[assignments == j]
            if len(members):
                centroids[j] = members.mean(axis=0)
        new, _ = _assign(points, centroids)
        if np.array_equal(new, assignments) and not _transfer(points, centroids, new):
            break
        assignments = new
    history.append(kmeans_cost(points, centroids, assignments))
    return centroids, assignments


def _transfer(points, centroids, assignments) -> bool:
    """Apply the best cost-lowering single-point move in place; False if none."""
    k = len(centroids)
    counts = np.bincount(assignments, minlength=k)
    _, d2 = _assign(points, centroids)
    own = d2[np.arange(len(points)), assignments]
    # removing x from a cluster of size n saves n/(n-1)|x-c|^2; adding costs n/(n+1)|x-c|^2
    with np.errstate(divide="ignore"):
        gain = np.where(counts[assignments] > 1, counts[assignments] / (counts[assignments] - 1.0), 0.0) * own
    delta = (counts / (counts + 1.0))[None, :] * d2 - gain[:, None]
    delta[np.arange(len(points)), assignments] = 0.0
    delta[counts[assignments] <= 1] = 0.0
    i, j = np.unravel_index(np.argmin(delta), delta.shape)
    if delta[i, j] >= -1e-12 * max(1.0, float(own.sum())):
        return False
    a = assignments[i]
    x = points[i]
    centroids[a] = (centroids[a] * counts[a] - x) / (counts[a] - 1)
    centroids[j] = (centroids[j] * counts[j] + x) / (counts[j] + 1)
    assignments[i] = j
    return True


def pca(points, n_components: int):
    """Principal components of the sample covariance.

    Returns ``(components, explained_variance, projected)``. Each component is
    unit-norm with its largest-magnitude entry positive.
    """
    points = np.asarray(points, dtype=np.float64)
    n, d = points.shape
    if n < 2 or not 1 <= n_components <= min(n, d):
        raise InvalidComponents(
            f"n_components must be in [1, {min(n, d)}] with n >= 2; got {n_components} for {n}x{d}"
        )
    mean = points.mean(axis=0)
    centered = points - mean
    cov = centered.T @ centered / (n - 1)
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals)[::-1][:n_components]
    comps = evecs[:, order].T
    pivot = np.argmax(np.abs(comps), axis=1)
    comps *= np.sign(comps[np.arange(n_components), pivot])[:, None]
    variance = np.clip(evals[order], 0.0, None)
    return comps, variance, centered @ comps.T
