# cython: boundscheck=False, wraparound=False, cdivision=True
"""Cyclic Jacobi eigensolver kernel for real symmetric matrices.

Compiled twin of ``_cyclic_jacobi_py``; both run the identical rotation
schedule (row-cyclic over the upper triangle, Numerical-Recipes style
thresholding) so results agree across backends.
"""

import numpy as np

from libc.math cimport fabs, sqrt


def jacobi_sweeps(double[:, ::1] a, double[::1] d, double[:, ::1] v,
                  double off_target, int max_sweeps):
    """Diagonalize the symmetric matrix ``a`` in place.

    ``a`` is destroyed (upper triangle annihilated), ``d`` receives the
    eigenvalues (unsorted) and ``v`` the eigenvectors as columns.
    ``off_target`` is the absolute Frobenius mass of the off-diagonal part
    at which the iteration stops.  Returns ``(sweeps_used, final_off)``.
    """
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q, j, sweep
    cdef double off1, off2, tresh, g, h, t, theta, c, s, tau
    cdef double ajp, ajq

    b = np.empty(n, dtype=np.float64)
    z = np.empty(n, dtype=np.float64)
    cdef double[::1] bv = b
    cdef double[::1] zv = z

    for p in range(n):
        for j in range(n):
            v[p, j] = 0.0
        v[p, p] = 1.0
        bv[p] = a[p, p]
        d[p] = a[p, p]
        zv[p] = 0.0

    for sweep in range(1, max_sweeps + 1):
        off1 = 0.0
        off2 = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off1 += fabs(a[p, q])
                off2 += a[p, q] * a[p, q]
        off2 = sqrt(2.0 * off2)
        if off2 <= off_target:
            return sweep - 1, off2

        if sweep < 4:
            tresh = 0.2 * off1 / (n * n)
        else:
            tresh = 0.0

        for p in range(n - 1):
            for q in range(p + 1, n):
                g = 100.0 * fabs(a[p, q])
                if sweep > 4 and fabs(d[p]) + g == fabs(d[p]) \
                        and fabs(d[q]) + g == fabs(d[q]):
                    a[p, q] = 0.0
                elif fabs(a[p, q]) > tresh:
                    h = d[q] - d[p]
                    if fabs(h) + g == fabs(h):
                        t = a[p, q] / h
                    else:
                        theta = 0.5 * h / a[p, q]
                        t = 1.0 / (fabs(theta) + sqrt(1.0 + theta * theta))
                        if theta < 0.0:
                            t = -t
                    c = 1.0 / sqrt(1.0 + t * t)
                    s = t * c
                    tau = s / (1.0 + c)
                    h = t * a[p, q]
                    zv[p] -= h
                    zv[q] += h
                    d[p] -= h
                    d[q] += h
                    a[p, q] = 0.0
                    for j in range(p):
                        ajp = a[j, p]
                        ajq = a[j, q]
                        a[j, p] = ajp - s * (ajq + ajp * tau)
                        a[j, q] = ajq + s * (ajp - ajq * tau)
                    for j in range(p + 1, q):
                        ajp = a[p, j]
                        ajq = a[j, q]
                        a[p, j] = ajp - s * (ajq + ajp * tau)
                        a[j, q] = ajq + s * (ajp - ajq * tau)
                    for j in range(q + 1, n):
                        ajp = a[p, j]
                        ajq = a[q, j]
                        a[p, j] = ajp - s * (ajq + ajp * tau)
                        a[q, j] = ajq + s * (ajp - ajq * tau)
                    for j in range(n):
                        ajp = v[j, p]
                        ajq = v[j, q]
                        v[j, p] = ajp - s * (ajq + ajp * tau)
                        v[j, q] = ajq + s * (ajp - ajq * tau)

        for p in range(n):
            bv[p] += zv[p]
            d[p] = bv[p]
            zv[p] = 0.0

    off2 = 0.0
    for p in range(n - 1):
        for q in range(p + 1, n):
            off2 += a[p, q] * a[p, q]
    off2 = sqrt(2.0 * off2)
    return max_sweeps, off2
