import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import best_partition_cost, power_iteration_eigen
from reprbench.errors import (
    IndexOutOfBounds,
    InputTooShort,
    InsufficientHistory,
    InvalidComponents,
    InvalidK,
    KernelTooLarge,
    ShapeMismatch,
)
from reprbench.transforms import (
    ReprKind,
    aggregate,
    build_representation,
    convolve,
    kmeans,
    kmeans_cost,
    pca,
    reshape,
    rescale_linear,
    select,
    window_differences,
    window_matrix,
    window_naive,
)

SERIES = np.array([1.0, 2.0, 4.0, 8.0, 16.0, 32.0])


def test_window_naive_small():
    assert window_naive(SERIES, 5, length=3).tolist() == [32, 16, 8]


def test_window_naive_boundary():
    with pytest.raises(InsufficientHistory):
        window_naive(np.arange(400.0), 166)
    assert len(window_naive(np.arange(400.0), 167)) == 168


def test_window_naive_constant():
    assert np.all(window_naive(np.full(200, 7.0), 180) == 7.0)


def test_window_differences_small():
    assert window_differences(SERIES, 5, 1, length=3).tolist() == [16, 8, 4]


def test_window_differences_constant():
    assert np.all(window_differences(np.full(400, 3.5), 300, 24) == 0.0)


def test_window_differences_boundary():
    with pytest.raises(InsufficientHistory):
        window_differences(np.arange(400.0), 167, 1)


def test_reshape_row_major():
    assert reshape([1, 2, 3, 4, 5, 6], 2, 3).tolist() == [[1, 2, 3], [4, 5, 6]]


def test_reshape_day_rows():
    v = np.arange(168.0)
    m = reshape(v, 7, 24)
    assert m[0, 0] == v[0] and m[6, 23] == v[167]
    # row d holds x_{k-24d} ... x_{k-24d-23}
    assert m[6, 0] == v[144]


def test_reshape_mismatch():
    with pytest.raises(ShapeMismatch):
        reshape([1, 2, 3, 4, 5], 2, 3)


def test_build_reshaped_constant():
    r = build_representation(np.full(400, 7.0), 300, ReprKind.RESHAPED, 1)
    assert r.data.shape == (7, 24) and np.all(r.data == 7.0)
    assert r.origin_index == 300 and r.horizon == 1


def test_build_reshaped_differences_constant():
    r = build_representation(np.full(400, 7.0), 300, ReprKind.RESHAPED_DIFFERENCES, 24)
    assert r.data.shape == (7, 24) and np.all(r.data == 0.0)


@pytest.mark.parametrize("seed", range(20))
def test_flatten_reshaped_equals_naive(seed):
    x = np.random.default_rng(seed).normal(size=600)
    k = int(np.random.default_rng(seed + 100).integers(400, 600))
    for plain, shaped in [(ReprKind.NAIVE, ReprKind.RESHAPED),
                          (ReprKind.NAIVE_DIFFERENCES, ReprKind.RESHAPED_DIFFERENCES)]:
        a = build_representation(x, k, plain, 24).data
        b = build_representation(x, k, shaped, 24).data
        assert np.array_equal(b.reshape(-1), a)


@pytest.mark.parametrize("kind", list(ReprKind))
def test_window_matrix_matches_single_builds(kind):
    x = np.random.default_rng(1).normal(size=800)
    origins = np.array([400, 401, 555, 799])
    batch = window_matrix(x, origins, kind, 168)
    for row, k in zip(batch, origins):
        assert np.array_equal(row, build_representation(x, k, kind, 168).data)


series = arrays(np.float64, 500, elements=st.floats(-1e3, 1e3))


@settings(max_examples=50, deadline=None)
@given(series, st.integers(200, 499), st.sampled_from([1, 24]), st.floats(-10, 10))
def test_difference_properties(x, k, h, a):
    d = window_differences(x, k, h)
    np.testing.assert_allclose(window_differences(a * x, k, h), a * d, rtol=1e-9, atol=1e-9)
    # x_{k-i} = x_{k-h-i} + (x_{k-i} - x_{k-i-h}), exactly as floats are stored
    np.testing.assert_array_equal(window_naive(x, k) - window_naive(x, k - h), d)
    np.testing.assert_array_equal(np.asarray(x[k - np.arange(168)]), window_naive(x, k))


def test_select_vector():
    assert select([10, 20, 30, 40], [0, 2]).tolist() == [10, 30]
    assert select([10, 20, 30, 40], [0, 1, 2, 3]).tolist() == [10, 20, 30, 40]
    with pytest.raises(IndexOutOfBounds):
        select([10, 20, 30, 40], [9])


def test_select_matrix():
    m = np.arange(12).reshape(3, 4)
    assert select(m, [[2, 0], [1, 3]]).tolist() == [[9, 11], [1, 3]]
    with pytest.raises(IndexOutOfBounds):
        select(m, [[3], [0]])


def test_aggregate():
    m = [[1, 2], [3, 4]]
    assert aggregate(m, "rows", "mean").tolist() == [1.5, 3.5]
    assert aggregate(m, "cols", "sum").tolist() == [4, 6]
    assert aggregate(m, "rows", "max").tolist() == [2, 4]
    assert aggregate(m, "cols", "min").tolist() == [1, 2]
    assert aggregate(np.full((3, 5), 2.5), "cols", "mean").tolist() == [2.5] * 5


def test_convolve():
    assert convolve([1, 2, 3], [1, 1]).tolist() == [3, 5]
    assert convolve([[1, 2], [3, 4]], [[1, 1], [1, 1]]).tolist() == [[10]]
    assert convolve([1, 2, 3], [1, 0]).tolist() == [1, 2]  # not flipped
    with pytest.raises(KernelTooLarge):
        convolve([1, 2], [1, 1, 1])


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 6)), elements=st.floats(-1e6, 1e6)))
def test_delta_kernel_identity(m):
    assert np.array_equal(convolve(m, [[1.0]]), m)
    assert np.array_equal(convolve(m[0], [1.0]), m[0])


def test_convolve_matches_direct_sum():
    rng = np.random.default_rng(3)
    m, k = rng.normal(size=(7, 24)), rng.normal(size=(3, 4))
    expect = np.array([[np.sum(m[i:i + 3, j:j + 4] * k) for j in range(21)] for i in range(5)])
    np.testing.assert_allclose(convolve(m, k), expect, rtol=1e-12)


def test_rescale():
    assert rescale_linear([0, 2], 3).tolist() == [0, 1, 2]
    assert rescale_linear([0, 1, 2, 3], 2).tolist() == [0, 3]
    assert rescale_linear([0, 1, 2, 3], 3).tolist() == [0, 1.5, 3]
    with pytest.raises(InputTooShort):
        rescale_linear([1], 3)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.integers(2, 50), elements=st.floats(-1e6, 1e6)), st.integers(2, 100))
def test_rescale_endpoints(v, n):
    out = rescale_linear(v, n)
    assert len(out) == n and out[0] == v[0] and out[-1] == v[-1]


# -- k-means ---------------------------------------------------------------

def test_kmeans_separated_1d():
    cent, assign = kmeans([0, 0.1, 10, 10.1], 2, seed=0)
    assert sorted(cent[:, 0]) == pytest.approx([0.05, 10.05])
    assert assign[0] == assign[1] != assign[2] == assign[3]


def test_kmeans_k_equals_n():
    pts = np.random.default_rng(0).normal(size=(5, 2))
    cent, assign = kmeans(pts, 5, seed=4)
    assert kmeans_cost(pts, cent, assign) == 0.0
    assert sorted(assign) == [0, 1, 2, 3, 4]


def test_kmeans_invalid_k():
    with pytest.raises(InvalidK):
        kmeans(np.zeros((3, 2)), 4)
    with pytest.raises(InvalidK):
        kmeans(np.zeros((3, 2)), 0)


def test_kmeans_six_points_optimal():
    pts = np.array([[0, 0], [0.5, 0.2], [0.1, 0.9], [5, 5], [5.5, 4.1], [4.2, 5.3]])
    cent, assign = kmeans(pts, 2, seed=1, n_init=100)
    assert kmeans_cost(pts, cent, assign) == pytest.approx(best_partition_cost(pts, 2), rel=1e-12)


def test_kmeans_deterministic():
    pts = np.random.default_rng(8).normal(size=(30, 3))
    a = kmeans(pts, 4, seed=11)
    b = kmeans(pts, 4, seed=11)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


def test_kmeans_cost_non_increasing():
    pts = np.random.default_rng(2).normal(size=(60, 2))
    history = []
    kmeans(pts, 5, seed=3, history=history)
    assert len(history) >= 2
    assert all(b <= a + 1e-12 for a, b in zip(history, history[1:]))


def test_kmeans_tie_goes_to_lowest_centroid():
    from reprbench.transforms import _assign
    assign, _ = _assign(np.array([[1.0]]), np.array([[0.0], [2.0]]))
    assert assign[0] == 0


# -- PCA -------------------------------------------------------------------

def test_pca_rank_one_line():
    pts = np.array([[t, t] for t in [-2.0, -1.0, 0.5, 3.0, 4.0]])
    comps, var, _ = pca(pts, 2)
    np.testing.assert_allclose(comps[0], [np.sqrt(0.5), np.sqrt(0.5)], atol=1e-12)
    assert var[0] / var.sum() == pytest.approx(1.0, abs=1e-9)


def test_pca_full_basis_reconstructs():
    pts = np.random.default_rng(5).normal(size=(12, 4))
    comps, _, proj = pca(pts, 4)
    np.testing.assert_allclose(proj @ comps + pts.mean(axis=0), pts, atol=1e-9)


@pytest.mark.parametrize("seed", range(5))
def test_pca_matches_power_iteration(seed):
    pts = np.random.default_rng(seed).normal(size=(5, 3)) * [3.0, 1.5, 0.5]
    comps, var, _ = pca(pts, 3)
    centered = pts - pts.mean(axis=0)
    cov = centered.T @ centered / 4
    ovals, ovecs = power_iteration_eigen(cov)
    np.testing.assert_allclose(var, ovals, atol=1e-8)
    for c, o in zip(comps, ovecs):
        o = o * np.sign(o[np.argmax(np.abs(o))])
        np.testing.assert_allclose(c, o, atol=1e-8)


def test_pca_properties():
    pts = np.random.default_rng(9).normal(size=(40, 6))
    comps, var, _ = pca(pts, 6)
    np.testing.assert_allclose(comps @ comps.T, np.eye(6), atol=1e-9)
    assert np.all(var >= 0) and np.all(np.diff(var) <= 0)
    for c in comps:
        assert c[np.argmax(np.abs(c))] > 0


def test_pca_invalid():
    with pytest.raises(InvalidComponents):
        pca(np.zeros((5, 3)), 4)
    with pytest.raises(InvalidComponents):
        pca(np.zeros((1, 3)), 1)


@pytest.mark.parametrize("seed", range(40))
def test_kmeans_restarts_reach_brute_force_optimum(seed):
    # a local method: restarts plus single-point transfers make the optimum
    # reliable on tiny instances
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 9))
    pts = rng.normal(size=(n, 2))
    for k in range(2, min(n, 4) + 1):
        cent, assign = kmeans(pts, k, seed=seed, n_init=100)
        assert kmeans_cost(pts, cent, assign) == pytest.approx(best_partition_cost(pts, k), rel=1e-9, abs=1e-12)
