"""Cross-check the numba kernels against the pure-numpy fallback."""

import numpy as np
import pytest

from sparsepaint import kernels_numpy

numba_kernels = pytest.importorskip("sparsepaint.kernels_numba")


@pytest.fixture
def case():
    rng = np.random.default_rng(0)
    f = rng.random((24, 17)) * 255
    known = rng.random((24, 17)) < 0.1
    if not known.any():
        known[0, 0] = True
    c = rng.random((24, 17))
    return f, known, c


def test_laplacian_agrees(case):
    f, _, _ = case
    np.testing.assert_allclose(
        numba_kernels.laplacian(f), kernels_numpy.laplacian(f), atol=1e-12
    )


def test_residual_agrees(case):
    f, _, c = case
    rng = np.random.default_rng(1)
    u = rng.random(f.shape) * 255
    np.testing.assert_allclose(
        numba_kernels.residual(u, f, c), kernels_numpy.residual(u, f, c), atol=1e-12
    )


def test_cg_agrees(case):
    f, known, _ = case
    u1, it1, r1, c1 = numba_kernels.cg_inpaint(f, known, 1e-6, 10000)
    u2, it2, r2, c2 = kernels_numpy.cg_inpaint(f, known, 1e-6, 10000)
    assert c1 and c2
    assert it1 == it2
    np.testing.assert_allclose(u1, u2, atol=1e-9)


def test_jacobi_agrees(case):
    f, known, _ = case
    c = known.astype(np.float64)
    u1, it1, r1, c1 = numba_kernels.jacobi_inpaint(f, c, 1e-5, 50000)
    u2, it2, r2, c2 = kernels_numpy.jacobi_inpaint(f, c, 1e-5, 50000)
    assert c1 and c2
    assert it1 == it2
    np.testing.assert_allclose(u1, u2, atol=1e-9)


def test_floyd_steinberg_agrees():
    rng = np.random.default_rng(2)
    field = rng.random((40, 33)) * 0.5
    m1 = numba_kernels.floyd_steinberg(field)
    m2 = kernels_numpy.floyd_steinberg(field)
    assert np.array_equal(m1, m2)


def test_backend_env_flag_selects_numpy(monkeypatch):
    from sparsepaint import backend

    backend.set_backend("numpy")
    try:
        assert backend.backend_name() == "numpy"
        assert backend.get_kernels() is kernels_numpy
    finally:
        backend.set_backend("auto")
