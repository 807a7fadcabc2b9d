"""Numba-accelerated kernels (default backend).

Mirrors the signatures and semantics of ``kernels_numpy``; the two backends
are cross-checked in the test suite and in ``benchmarks/compare_backends.py``.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from . import kernels_numpy as _np_kernels

NAME = "numba"


@njit(cache=True)
def _laplacian_jit(u):
    h, w = u.shape
    out = np.empty_like(u)
    for i in range(h):
        im = i - 1 if i > 0 else 0
        ip = i + 1 if i < h - 1 else h - 1
        for j in range(w):
            jm = j - 1 if j > 0 else 0
            jp = j + 1 if j < w - 1 else w - 1
            out[i, j] = u[im, j] + u[ip, j] + u[i, jm] + u[i, jp] - 4.0 * u[i, j]
    return out


def laplacian(u: np.ndarray) -> np.ndarray:
    return _laplacian_jit(np.ascontiguousarray(u))


@njit(cache=True)
def _residual_jit(u, f, c):
    h, w = u.shape
    out = np.empty_like(u)
    for i in range(h):
        im = i - 1 if i > 0 else 0
        ip = i + 1 if i < h - 1 else h - 1
        for j in range(w):
            jm = j - 1 if j > 0 else 0
            jp = j + 1 if j < w - 1 else w - 1
            lap = u[im, j] + u[ip, j] + u[i, jm] + u[i, jp] - 4.0 * u[i, j]
            out[i, j] = (1.0 - c[i, j]) * lap - c[i, j] * (u[i, j] - f[i, j])
    return out


def residual(u, f, c):
    return _residual_jit(
        np.ascontiguousarray(u), np.ascontiguousarray(f), np.ascontiguousarray(c)
    )


@njit(cache=True)
def _neg_lap_masked(v, known, out):
    """out = (-A v) with rows/values zeroed on known pixels; v is 0 there."""
    h, w = v.shape
    for i in range(h):
        im = i - 1 if i > 0 else 0
        ip = i + 1 if i < h - 1 else h - 1
        for j in range(w):
            if known[i, j]:
                out[i, j] = 0.0
            else:
                jm = j - 1 if j > 0 else 0
                jp = j + 1 if j < w - 1 else w - 1
                out[i, j] = 4.0 * v[i, j] - (
                    v[im, j] + v[ip, j] + v[i, jm] + v[i, jp]
                )


@njit(cache=True)
def _cg_jit(f, known, tol, max_iter):
    target = 1e-3 * tol  # keep in sync with kernels_numpy.CG_SAFETY
    h, w = f.shape
    u_k = np.zeros((h, w))
    for i in range(h):
        for j in range(w):
            if known[i, j]:
                u_k[i, j] = f[i, j]
    # right-hand side: (A u_k) restricted to unknowns
    b = _laplacian_jit(u_k)
    bnorm2 = 0.0
    for i in range(h):
        for j in range(w):
            if known[i, j]:
                b[i, j] = 0.0
            else:
                bnorm2 += b[i, j] * b[i, j]
    bnorm = np.sqrt(bnorm2)
    if bnorm == 0.0:
        return u_k, 0, 0.0, True
    x = np.zeros((h, w))
    r = b.copy()
    p = b.copy()
    q = np.zeros((h, w))
    rs = bnorm2
    it = 0
    relres = 1.0
    converged = False
    while it < max_iter:
        _neg_lap_masked(p, known, q)
        pq = 0.0
        for i in range(h):
            for j in range(w):
                pq += p[i, j] * q[i, j]
        alpha = rs / pq
        rs_new = 0.0
        for i in range(h):
            for j in range(w):
                x[i, j] += alpha * p[i, j]
                r[i, j] -= alpha * q[i, j]
                rs_new += r[i, j] * r[i, j]
        it += 1
        relres = np.sqrt(rs_new) / bnorm
        if relres <= target:
            converged = True
            beta = 0.0
        else:
            beta = rs_new / rs
        rs = rs_new
        if converged:
            break
        for i in range(h):
            for j in range(w):
                p[i, j] = r[i, j] + beta * p[i, j]
    u = u_k + x
    for i in range(h):
        for j in range(w):
            if known[i, j]:
                u[i, j] = f[i, j]
    return u, it, relres, converged


def cg_inpaint(f, known, tol, max_iter, preconditioner=None):
    if preconditioner is not None:
        # callables cannot cross into nopython code; use the numpy PCG path
        return _np_kernels.cg_inpaint(f, known, tol, max_iter, preconditioner)
    u, it, relres, conv = _cg_jit(
        np.ascontiguousarray(f), np.ascontiguousarray(known), tol, max_iter
    )
    return u, int(it), float(relres), bool(conv)


@njit(cache=True)
def _jacobi_jit(f, c, tol, max_iter):
    h, w = f.shape
    mean_f2 = 0.0
    for i in range(h):
        for j in range(w):
            mean_f2 += f[i, j] * f[i, j]
    mean_f2 /= h * w
    eff = 1e-3 * tol  # keep in sync with kernels_numpy.JACOBI_SAFETY
    threshold = eff * eff * mean_f2
    u = f.copy()
    un = np.empty_like(u)
    it = 0
    loss = 0.0
    while True:
        loss = 0.0
        for i in range(h):
            im = i - 1 if i > 0 else 0
            ip = i + 1 if i < h - 1 else h - 1
            for j in range(w):
                jm = j - 1 if j > 0 else 0
                jp = j + 1 if j < w - 1 else w - 1
                lap = u[im, j] + u[ip, j] + u[i, jm] + u[i, jp] - 4.0 * u[i, j]
                r = (1.0 - c[i, j]) * lap - c[i, j] * (u[i, j] - f[i, j])
                loss += r * r
        loss /= h * w
        if loss <= threshold or it >= max_iter:
            break
        for i in range(h):
            im = i - 1 if i > 0 else 0
            ip = i + 1 if i < h - 1 else h - 1
            deg = 0.0
            if i > 0:
                deg += 1.0
            if i < h - 1:
                deg += 1.0
            for j in range(w):
                jm = j - 1 if j > 0 else 0
                jp = j + 1 if j < w - 1 else w - 1
                dj = deg
                if j > 0:
                    dj += 1.0
                if j < w - 1:
                    dj += 1.0
                s = 0.0
                if i > 0:
                    s += u[im, j]
                if i < h - 1:
                    s += u[ip, j]
                if j > 0:
                    s += u[i, jm]
                if j < w - 1:
                    s += u[i, jp]
                denom = (1.0 - c[i, j]) * dj + c[i, j]
                if denom == 0.0:
                    denom = 1.0
                un[i, j] = ((1.0 - c[i, j]) * s + c[i, j] * f[i, j]) / denom
        tmp = u
        u = un
        un = tmp
        it += 1
    if mean_f2 > 0.0:
        relres = np.sqrt(loss / mean_f2)
    else:
        relres = np.sqrt(loss)
    return u, it, relres, loss <= threshold


def jacobi_inpaint(f, c, tol, max_iter):
    u, it, relres, conv = _jacobi_jit(
        np.ascontiguousarray(f), np.ascontiguousarray(c), tol, max_iter
    )
    return u, int(it), float(relres), bool(conv)


@njit(cache=True)
def _fs_jit(field):
    h, w = field.shape
    v = field.copy()
    out = np.zeros((h, w), dtype=np.bool_)
    for y in range(h):
        for x in range(w):
            old = v[y, x]
            new = 1.0 if old >= 0.5 else 0.0
            out[y, x] = new == 1.0
            err = old - new
            if x + 1 < w:
                v[y, x + 1] += err * (7.0 / 16.0)
            if y + 1 < h:
                if x - 1 >= 0:
                    v[y + 1, x - 1] += err * (3.0 / 16.0)
                v[y + 1, x] += err * (5.0 / 16.0)
                if x + 1 < w:
                    v[y + 1, x + 1] += err * (1.0 / 16.0)
    return out


def floyd_steinberg(field: np.ndarray) -> np.ndarray:
    return _fs_jit(np.ascontiguousarray(field.astype(np.float64)))
