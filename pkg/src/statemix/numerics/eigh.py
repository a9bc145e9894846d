"""Hermitian eigendecomposition built on the cyclic Jacobi kernel.

A complex hermitian matrix M = X + iY is handled through the standard
doubling embedding: the real symmetric matrix T = [[X, -Y], [Y, X]] is
diagonalized and every real eigenvector w = (u, w') of T yields the complex
eigenvector z = u + i*w' of M with the same eigenvalue.  Each eigenvalue of
M appears twice in T; an ordered Gram-Schmidt pass over the complex images
keeps one representative per copy.  This convention is fixed: column
stacking of (real, imaginary) parts, eigenvalues sorted descending with a
stable tie-break, phases gauged so the first significant entry of every
eigenvector is real positive.
"""

import os

import numpy as np

try:  # pragma: no cover - exercised when the extension is absent
    if os.environ.get("STATEMIX_DISABLE_EXTENSION"):
        raise ImportError("extension disabled via environment")
    from . import _cyclic_jacobi as _compiled_kernel
except ImportError:  # pragma: no cover
    _compiled_kernel = None

from . import _cyclic_jacobi_py as _python_kernel

_KERNELS = {"python": _python_kernel}
if _compiled_kernel is not None:
    _KERNELS["compiled"] = _compiled_kernel

_active_name = "compiled" if _compiled_kernel is not None else "python"

OFF_TARGET_REL = 1e-12
MAX_SWEEPS = 100
HERMITICITY_TOL = 1e-8
_GS_ACCEPT = 0.05


class EighConvergenceError(RuntimeError):
    """Jacobi iteration did not reach the off-diagonal target."""


def get_backend():
    """Name of the kernel in use, ``"compiled"`` or ``"python"``."""
    return _active_name


def set_backend(name):
    """Select the Jacobi kernel (benchmarking/testing hook)."""
    global _active_name
    if name not in _KERNELS:
        raise ValueError(f"unknown backend {name!r}; have {sorted(_KERNELS)}")
    _active_name = name


def available_backends():
    return sorted(_KERNELS)


def _run_kernel(t):
    n = t.shape[0]
    a = np.ascontiguousarray(t, dtype=np.float64).copy()
    d = np.empty(n)
    v = np.empty((n, n))
    norm = np.linalg.norm(a)
    sweeps, off = _KERNELS[_active_name].jacobi_sweeps(
        a, d, v, OFF_TARGET_REL * norm, MAX_SWEEPS
    )
    if off > OFF_TARGET_REL * norm:
        raise EighConvergenceError(
            f"off-diagonal mass {off:.3e} above target after {sweeps} sweeps"
        )
    return d, v


def _first_significant(v):
    mags = np.abs(v)
    thresh = 1e-8 * mags.max(axis=0, initial=0.0)
    return (mags > thresh).argmax(axis=0)


def eigh_symmetric(m):
    """Eigendecomposition of a real symmetric matrix.

    Returns ``(w, v)`` with eigenvalues ``w`` descending and orthonormal
    eigenvector columns ``v``; the sign of each column is gauged so its
    first significant entry is positive.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    scale = max(1.0, np.linalg.norm(m))
    if np.abs(m - m.T).max(initial=0.0) > HERMITICITY_TOL * scale:
        raise ValueError("matrix is not symmetric")
    s = (m + m.T) / 2.0
    d, v = _run_kernel(s)
    order = np.argsort(-d, kind="stable")
    d = d[order]
    v = v[:, order]
    if v.size:
        piv = v[_first_significant(v), np.arange(v.shape[1])]
        v[:, piv < 0] *= -1.0
    return d, v


def eigh_hermitian(m):
    """Eigendecomposition of a complex hermitian matrix.

    Returns ``(w, v)`` with eigenvalues ``w`` descending (real) and
    orthonormal complex eigenvector columns.  Raises ``ValueError`` when the
    hermiticity residual exceeds the tolerance.
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    n = m.shape[0]
    scale = max(1.0, np.linalg.norm(m))
    if np.abs(m - m.conj().T).max(initial=0.0) > HERMITICITY_TOL * scale:
        raise ValueError("matrix is not hermitian")
    h = (m + m.conj().T) / 2.0
    t = np.empty((2 * n, 2 * n))
    t[:n, :n] = h.real
    t[n:, n:] = h.real
    t[:n, n:] = -h.imag
    t[n:, :n] = h.imag
    d2, w2 = _run_kernel(t)
    order = np.argsort(-d2, kind="stable")
    d2 = d2[order]
    w2 = w2[:, order]

    vals = np.empty(n)
    vecs = np.empty((n, n), dtype=np.complex128)
    taken = 0
    for k in range(2 * n):
        z = w2[:n, k] + 1j * w2[n:, k]
        for _ in range(2):
            if taken:
                acc = vecs[:, :taken]
                z = z - acc @ (acc.conj().T @ z)
        nz = np.sqrt(np.vdot(z, z).real)
        if nz > _GS_ACCEPT:
            vecs[:, taken] = z / nz
            vals[taken] = d2[k]
            taken += 1
            if taken == n:
                break
    if taken < n:  # pragma: no cover - excluded by the frame bound
        raise EighConvergenceError("eigenvector extraction incomplete")

    piv = vecs[_first_significant(vecs), np.arange(n)]
    vecs *= (piv.conjugate() / np.abs(piv))[np.newaxis, :]
    return vals, vecs


def psd_project(m):
    """Nearest positive semidefinite matrix in Frobenius norm.

    Returns ``(p, min_eig)`` where ``min_eig`` is the smallest eigenvalue of
    the input (negative when clipping occurred).
    """
    w, v = eigh_hermitian(m)
    lo = float(w[-1]) if w.size else 0.0
    if lo >= 0.0:
        h = np.asarray(m, dtype=np.complex128)
        return (h + h.conj().T) / 2.0, lo
    clipped = np.clip(w, 0.0, None)
    p = (v * clipped) @ v.conj().T
    p = (p + p.conj().T) / 2.0
    return p, lo
