"""Pure-numpy reference kernels (fallback backend).

Shared conventions:
  * grids are float64 arrays of shape (h, w);
  * the discrete Laplacian uses the 5-point stencil with reflecting
    boundaries realised by neighbour mirroring (off-grid neighbour equals
    the nearest in-grid pixel, i.e. edge replication);
  * CG solves the reduced system on unknown pixels after eliminating the
    known values into the right-hand side.
"""

from __future__ import annotations

import numpy as np

NAME = "numpy"


def laplacian(u: np.ndarray) -> np.ndarray:
    p = np.pad(u, 1, mode="edge")
    return (
        p[:-2, 1:-1] + p[2:, 1:-1] + p[1:-1, :-2] + p[1:-1, 2:] - 4.0 * u
    )


def residual(u: np.ndarray, f: np.ndarray, c: np.ndarray) -> np.ndarray:
    return (1.0 - c) * laplacian(u) - c * (u - f)


def _neighbor_sum_ingrid(u: np.ndarray) -> np.ndarray:
    """Sum of strictly in-grid 4-neighbours (no mirroring)."""
    s = np.zeros_like(u)
    s[1:, :] += u[:-1, :]
    s[:-1, :] += u[1:, :]
    s[:, 1:] += u[:, :-1]
    s[:, :-1] += u[:, 1:]
    return s


def _degree(shape) -> np.ndarray:
    """Number of in-grid 4-neighbours per pixel.

    2 per axis in the interior, 1 at the ends, 0 if the axis has length 1.
    """
    h, w = shape
    ax_h = np.full(h, 2.0)
    if h == 1:
        ax_h[:] = 0.0
    else:
        ax_h[0] = ax_h[-1] = 1.0
    ax_w = np.full(w, 2.0)
    if w == 1:
        ax_w[:] = 0.0
    else:
        ax_w[0] = ax_w[-1] = 1.0
    return ax_h[:, None] + ax_w[None, :]


def _masked_neg_lap(v: np.ndarray, known: np.ndarray) -> np.ndarray:
    """(-A v) restricted to unknown pixels; v must vanish on known pixels."""
    q = -laplacian(v)
    q[known] = 0.0
    return q


CG_SAFETY = 1e-3  # residual-to-error margin, mirrors JACOBI_SAFETY below


def cg_inpaint(f, known, tol, max_iter, preconditioner=None):
    """Conjugate gradients on the known-eliminated SPD system.

    Iterates until the relative residual drops below CG_SAFETY * tol so the
    *solution* error is controlled at the level of tol despite the
    residual-to-error amplification of the reduced operator.
    Returns (u, iterations, final_relative_residual, converged).
    """
    target = CG_SAFETY * tol
    u_k = np.where(known, f, 0.0)
    b = laplacian(u_k)
    b[known] = 0.0
    bnorm = np.sqrt(np.sum(b * b))
    if bnorm == 0.0:
        return u_k.copy(), 0, 0.0, True
    x = np.zeros_like(f)
    r = b.copy()
    if preconditioner is not None:
        z = preconditioner(r)
        z[known] = 0.0
    else:
        z = r
    p = z.copy()
    rz = np.sum(r * z)
    it = 0
    relres = 1.0
    while it < max_iter:
        q = _masked_neg_lap(p, known)
        alpha = rz / np.sum(p * q)
        x += alpha * p
        r -= alpha * q
        it += 1
        relres = np.sqrt(np.sum(r * r)) / bnorm
        if relres <= target:
            break
        if preconditioner is not None:
            z = preconditioner(r)
            z[known] = 0.0
        else:
            z = r
        rz_new = np.sum(r * z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    u = u_k + x
    u[known] = f[known]  # bit-exact known data
    return u, it, float(relres), relres <= target


JACOBI_SAFETY = 1e-3  # residual-to-error margin so nominal tol bounds the solution


def jacobi_inpaint(f, c, tol, max_iter):
    """Jacobi fixed-point iteration on the full (possibly non-binary) system.

    Stops when residual_loss <= (JACOBI_SAFETY * tol)^2 * mean(f^2); the
    safety factor absorbs the residual-to-error amplification of the
    inpainting operator so that binary-mask results agree with the CG
    solver at the level of tol itself.
    Returns (u, sweeps, final_relative_residual, converged).
    """
    mean_f2 = float(np.mean(f * f))
    eff = JACOBI_SAFETY * tol
    threshold = eff * eff * mean_f2
    deg = _degree(f.shape)
    denom = (1.0 - c) * deg + c
    denom = np.where(denom == 0.0, 1.0, denom)  # isolated c=0 on 1x1 grids
    u = f.copy()
    it = 0
    while True:
        r = residual(u, f, c)
        loss = float(np.mean(r * r))
        if loss <= threshold or it >= max_iter:
            break
        u = ((1.0 - c) * _neighbor_sum_ingrid(u) + c * f) / denom
        it += 1
    relres = np.sqrt(loss / mean_f2) if mean_f2 > 0.0 else np.sqrt(loss)
    return u, it, float(relres), loss <= threshold


def floyd_steinberg(field: np.ndarray) -> np.ndarray:
    """Classic raster-order error diffusion; returns a boolean mask."""
    v = field.astype(np.float64).copy()
    h, w = v.shape
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
