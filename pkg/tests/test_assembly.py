import numpy as np
import pytest

from spamcal.assembly import KERNEL_BACKEND, mean_column, pair_column, python_kernels


def random_inputs(rng, n, signed=False):
    m0 = rng.uniform(0.7, 1.0, n)
    means = np.column_stack([m0, 1.0 - m0])
    pairs = np.array(
        [(i, j) for i in range(n) for j in range(i + 1, n)], dtype=np.int64
    )
    if signed:
        # indicator-covariance structure: c * (-1)^(bi+bj)
        sign = np.array([[1.0, -1.0], [-1.0, 1.0]])
        covs = rng.uniform(-3e-4, 3e-4, len(pairs))[:, None, None] * sign
    else:
        covs = rng.uniform(-3e-4, 3e-4, (len(pairs), 2, 2))
    return means, pairs, np.ascontiguousarray(covs)


def test_backend_selected():
    assert KERNEL_BACKEND in ("cython", "numpy")


def brute_mean_column(means):
    n = means.shape[0]
    out = np.empty(1 << n)
    for x in range(1 << n):
        p = 1.0
        for l in range(n):
            p *= means[l, (x >> (n - 1 - l)) & 1]
        out[x] = p
    return out


def brute_pair_column(means, pairs, covs):
    n = means.shape[0]
    out = np.zeros(1 << n)
    for x in range(1 << n):
        for p, (i, j) in enumerate(pairs):
            bi = (x >> (n - 1 - i)) & 1
            bj = (x >> (n - 1 - j)) & 1
            # covs is already indexed by the outcome bits, so no extra sign
            term = covs[p, bi, bj]
            for l in range(n):
                if l not in (i, j):
                    term *= means[l, (x >> (n - 1 - l)) & 1]
            out[x] += term
    return out


@pytest.mark.parametrize("seed", range(3))
@pytest.mark.parametrize("n", [2, 4, 7])
def test_kernels_match_bruteforce(seed, n):
    rng = np.random.default_rng(seed)
    means, pairs, covs = random_inputs(rng, n)
    np.testing.assert_allclose(mean_column(means), brute_mean_column(means), atol=1e-14)
    np.testing.assert_allclose(
        pair_column(means, pairs, covs), brute_pair_column(means, pairs, covs),
        atol=1e-14,
    )


@pytest.mark.parametrize("seed", range(3))
def test_compiled_and_python_kernels_agree(seed):
    rng = np.random.default_rng(100 + seed)
    means, pairs, covs = random_inputs(rng, 6)
    np.testing.assert_allclose(
        mean_column(means), python_kernels.mean_column(means), atol=1e-15
    )
    np.testing.assert_allclose(
        pair_column(means, pairs, covs),
        python_kernels.pair_column(means, pairs, covs),
        atol=1e-15,
    )


def test_mean_column_normalized():
    rng = np.random.default_rng(0)
    means, _, _ = random_inputs(rng, 5)
    assert mean_column(means).sum() == pytest.approx(1.0, abs=1e-12)


def test_pair_column_sums_to_zero():
    rng = np.random.default_rng(1)
    means, pairs, covs = random_inputs(rng, 5, signed=True)
    assert abs(pair_column(means, pairs, covs).sum()) < 1e-14
