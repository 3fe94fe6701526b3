import math

import numpy as np
import pytest

from rffboot.exceptions import InvalidInput
from rffboot.kernels.enums import KernelFamily
from rffboot.kernels.module import (
    Kernel,
    eval_kernel,
    sample_spectral,
    sample_spectral_arrays,
)


def test_gaussian_value():
    kernel = Kernel(KernelFamily.GAUSSIAN, math.sqrt(5.0))
    x = np.zeros(2)
    x2 = np.array([1.0, 3.0])
    assert eval_kernel(kernel, x, x) == 1.0
    assert eval_kernel(kernel, x, x2) == pytest.approx(0.3678794, abs=1e-7)


def test_laplacian_value():
    kernel = Kernel(KernelFamily.LAPLACIAN, 10.0)
    value = kernel.eval([0.0, 0.0], [1.0, -2.0])
    assert value == pytest.approx(math.exp(-0.3), rel=1e-14)


def test_cauchy_value():
    kernel = Kernel(KernelFamily.CAUCHY, 10.0)
    assert kernel.eval(np.zeros(3), np.zeros(3)) == 1.0
    assert kernel.eval([1.0, 0.0], [0.0, 0.0]) == pytest.approx(1.0 / 1.1)
    assert kernel.eval([1.0, 2.0], [0.0, 0.0]) == pytest.approx(1.0 / (1.1 * 1.4))


def test_kernel_properties(kernel, rng):
    for _ in range(20):
        x, x2 = rng.normal(size=(2, 4))
        value = kernel.eval(x, x2)
        assert 0.0 < value <= 1.0
        assert value == kernel.eval(x2, x)
        assert kernel.eval(x, x) == 1.0
        assert value == pytest.approx(kernel.eval(x - x2, np.zeros(4)), rel=1e-12)


def test_matrix_matches_pointwise(kernel, rng):
    X = rng.normal(size=(6, 3))
    Y = rng.normal(size=(4, 3))
    K = kernel.matrix(X, Y)
    assert K.shape == (6, 4)
    for i in range(6):
        for j in range(4):
            assert K[i, j] == pytest.approx(kernel.eval(X[i], Y[j]), rel=1e-12)


def test_dimension_mismatch():
    kernel = Kernel(KernelFamily.GAUSSIAN, 1.0)
    with pytest.raises(InvalidInput):
        kernel.eval([0.0, 1.0], [0.0])
    with pytest.raises(InvalidInput):
        kernel.matrix(np.zeros((2, 2)), np.zeros((2, 3)))


@pytest.mark.parametrize("scale", [0.0, -1.0, float("nan")])
def test_scale_has_to_be_positive(scale):
    with pytest.raises(InvalidInput):
        Kernel(KernelFamily.CAUCHY, scale)


def test_from_name():
    assert Kernel.from_name("Laplacian", 3.0) == Kernel(KernelFamily.LAPLACIAN, 3.0)
    with pytest.raises(ValueError):
        Kernel.from_name("bspline", 1.0)


def test_sampling_is_reproducible(kernel):
    first = sample_spectral(kernel, 3, 25, np.random.default_rng(11))
    second = sample_spectral(kernel, 3, 25, np.random.default_rng(11))
    assert len(first) == 25
    for a, b in zip(first, second):
        assert np.array_equal(a.frequency, b.frequency)
        assert a.phase == b.phase
        assert 0.0 <= a.phase < 2.0 * math.pi


def test_sampling_rejects_empty_request(kernel, rng):
    with pytest.raises(InvalidInput):
        sample_spectral_arrays(kernel, 0, 5, rng)
    with pytest.raises(InvalidInput):
        sample_spectral_arrays(kernel, 2, 0, rng)


@pytest.mark.parametrize(
    "family,scale",
    [
        (KernelFamily.GAUSSIAN, 1.0),
        (KernelFamily.LAPLACIAN, 10.0),
        (KernelFamily.CAUCHY, 10.0),
        (KernelFamily.CAUCHY, 0.5),
    ],
)
def test_spectral_distribution_reproduces_kernel(family, scale):
    kernel = Kernel(family, scale)
    count = 10**6
    W, _ = sample_spectral_arrays(kernel, 1, count, np.random.default_rng(3))
    for delta in (0.5, 1.0, 2.0):
        empirical = float(np.mean(np.cos(W[:, 0] * delta)))
        expected = kernel.eval([delta], [0.0])
        assert abs(empirical - expected) <= 4.0 / math.sqrt(count)


def test_spectral_distribution_in_several_dimensions(kernel):
    count = 10**5
    W, _ = sample_spectral_arrays(kernel, 3, count, np.random.default_rng(5))
    for delta in ([0.3, -0.2, 0.5], [1.0, 0.0, -1.0]):
        empirical = float(np.mean(np.cos(W @ np.array(delta))))
        expected = kernel.eval(delta, np.zeros(3))
        assert abs(empirical - expected) <= 4.0 / math.sqrt(count)
