"""Pure-Python twin of the compiled cyclic Jacobi kernel.

Runs the identical rotation schedule as ``_cyclic_jacobi.pyx`` (row-cyclic
over the upper triangle with Numerical-Recipes thresholding); the inner
row/column updates are vectorized with numpy slices.  Selected at import
when the compiled extension is unavailable; much slower, see
``benchmarks/eigh_backends.py``.
"""

import math

import numpy as np


def _rotate(x, y, s, tau):
    # x, y are views; formulas match the compiled kernel entrywise.
    g = x.copy()
    h = y.copy()
    x[...] = g - s * (h + g * tau)
    y[...] = h + s * (g - h * tau)


def jacobi_sweeps(a, d, v, off_target, max_sweeps):
    """Diagonalize the symmetric matrix ``a`` in place.

    Same contract as the compiled kernel: destroys the upper triangle of
    ``a``, fills ``d`` with unsorted eigenvalues and the columns of ``v``
    with eigenvectors, returns ``(sweeps_used, final_off)``.
    """
    n = a.shape[0]
    v[...] = np.eye(n)
    b = np.diagonal(a).copy()
    d[...] = b
    z = np.zeros(n)

    iu = np.triu_indices(n, k=1)
    for sweep in range(1, max_sweeps + 1):
        upper = a[iu]
        off1 = np.abs(upper).sum()
        off2 = math.sqrt(2.0 * float(upper @ upper))
        if off2 <= off_target:
            return sweep - 1, off2

        tresh = 0.2 * off1 / (n * n) if sweep < 4 else 0.0

        for p in range(n - 1):
            for q in range(p + 1, n):
                g = 100.0 * abs(a[p, q])
                if sweep > 4 and abs(d[p]) + g == abs(d[p]) \
                        and abs(d[q]) + g == abs(d[q]):
                    a[p, q] = 0.0
                elif abs(a[p, q]) > tresh:
                    h = d[q] - d[p]
                    if abs(h) + g == abs(h):
                        t = a[p, q] / h
                    else:
                        theta = 0.5 * h / a[p, q]
                        t = 1.0 / (abs(theta) + math.sqrt(1.0 + theta * theta))
                        if theta < 0.0:
                            t = -t
                    c = 1.0 / math.sqrt(1.0 + t * t)
                    s = t * c
                    tau = s / (1.0 + c)
                    h = t * a[p, q]
                    z[p] -= h
                    z[q] += h
                    d[p] -= h
                    d[q] += h
                    a[p, q] = 0.0
                    _rotate(a[:p, p], a[:p, q], s, tau)
                    _rotate(a[p, p + 1:q], a[p + 1:q, q], s, tau)
                    _rotate(a[p, q + 1:], a[q, q + 1:], s, tau)
                    _rotate(v[:, p], v[:, q], s, tau)

        b += z
        d[...] = b
        z[:] = 0.0

    upper = a[iu]
    off2 = math.sqrt(2.0 * float(upper @ upper))
    return max_sweeps, off2
