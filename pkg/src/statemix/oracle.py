"""Independent brute-force validators and random instance generators.

The membership oracle poses "is there a unital completely positive
center-module map carrying one functional to the other" directly as a
blockwise Choi feasibility problem and solves it with Dykstra projections;
it never looks at the closed-form decision procedures it validates.  The
variational ideal norm re-derives the restriction norm by maximizing over
explicit contractions instead of using the trace-norm formula.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algebra import AlgebraSpec, Element, validate_algebra
from .channels import ModuleMapChoi
from .functionals import Functional
from .numerics import (
    EPS_FEAS,
    MAX_ITER,
    FeasibilityProblem,
    FeasibilityResult,
    dykstra_feasibility,
    eigh_hermitian,
)

ORACLE_MAX_BLOCKS = 3
ORACLE_MAX_BLOCK_DIM = 4


def hermitian_basis(n):
    """Orthonormal hermitian basis of the n x n matrices (Hilbert-Schmidt)."""
    basis = []
    for p in range(n):
        e = np.zeros((n, n), dtype=np.complex128)
        e[p, p] = 1.0
        basis.append(e)
    rt2 = np.sqrt(2.0)
    for p in range(n):
        for q in range(p + 1, n):
            e = np.zeros((n, n), dtype=np.complex128)
            e[p, q] = 1.0 / rt2
            e[q, p] = 1.0 / rt2
            basis.append(e)
            f = np.zeros((n, n), dtype=np.complex128)
            f[p, q] = 1j / rt2
            f[q, p] = -1j / rt2
            basis.append(f)
    return basis


@dataclass
class OracleReport:
    verdict: str  # "feasible" | "infeasible" | "indeterminate"
    residual: float
    iterations: int
    choi: Optional[ModuleMapChoi] = None
    message: str = ""


def _membership_problem(omega, rho, eps_feas, max_iter):
    algebra = omega.algebra
    dims = algebra.block_dims
    var_dims = tuple(n * n for n in dims)

    constraints = []

    def zero_blocks():
        return [np.zeros((m, m), dtype=np.complex128) for m in var_dims]

    for i, n in enumerate(dims):
        ident = np.eye(n)
        for h in hermitian_basis(n):
            mats = zero_blocks()
            mats[i] = np.kron(h, ident)
            constraints.append((tuple(mats), float(np.trace(h).real)))

    for i, n in enumerate(dims):
        d_omega = omega.densities[i]
        d_rho = rho.densities[i]
        for h in hermitian_basis(n):
            mats = zero_blocks()
            mats[i] = np.kron(d_omega.T, h)
            constraints.append((tuple(mats), float(np.trace(d_rho @ h).real)))

    # Neutral interior start: the Choi blocks of the normalized-trace
    # replacement map (strictly positive and unital, independent of the
    # decision procedures under validation).
    start = tuple(np.eye(n * n, dtype=np.complex128) / n for n in dims)

    return FeasibilityProblem(
        block_dims=var_dims,
        constraints=constraints,
        initial_point=start,
        eps_feas=eps_feas,
        max_iter=max_iter,
    )


def choi_membership_oracle(omega, rho, eps_feas=EPS_FEAS, max_iter=MAX_ITER):
    """Feasibility oracle for the mixing preorder on hermitian functionals.

    Assembles the Choi-variable problem "a unital completely positive
    center-module map composes the first functional into the second" and
    solves it by alternating projections.  Verdicts are three-valued and
    follow the feasibility thresholds.
    """
    if omega.algebra != rho.algebra:
        raise ValueError("algebra mismatch")
    problem = _membership_problem(omega, rho, eps_feas, max_iter)
    result = dykstra_feasibility(problem)
    choi = None
    if result.status == "feasible":
        dims = omega.algebra.block_dims
        choi = ModuleMapChoi(omega.algebra, result.point)
    return OracleReport(
        verdict=result.status,
        residual=result.residual,
        iterations=result.iterations,
        choi=choi,
        message=result.message,
    )


def variational_ideal_norm(omega, ideal, samples=64, seed=0):
    """Lower bound for the restriction norm by explicit contractions.

    Maximizes ``|omega(x)|`` over hermitian contractions supported in the
    ideal: the blockwise spectral sign elements (which attain the trace
    norm) plus random normalized hermitian elements.
    """
    algebra = omega.algebra
    dims = algebra.block_dims
    support = sorted(ideal.support)
    if not support:
        return 0.0

    def supported(blocks_on_support):
        blocks = [np.zeros((n, n), dtype=np.complex128) for n in dims]
        for i, b in zip(support, blocks_on_support):
            blocks[i] = b
        return Element(algebra, tuple(blocks))

    sign_blocks = []
    for i in support:
        d = omega.densities[i]
        h = (d + d.conj().T) / 2
        w, v = eigh_hermitian(h)
        sign_blocks.append((v * np.sign(w)) @ v.conj().T)
    candidates = [supported(sign_blocks)]

    rng = np.random.default_rng(seed)
    for _ in range(samples):
        blocks = []
        for i in support:
            n = dims[i]
            g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            g = (g + g.conj().T) / 2
            nrm = np.linalg.norm(g, 2)
            blocks.append(g / nrm if nrm > 0 else g)
        candidates.append(supported(blocks))

    best = 0.0
    for x in candidates:
        val = abs(sum((omega.densities[i] @ x.blocks[i]).trace().real
                      for i in support))
        best = max(best, float(val))
    return best


def random_algebra(seed, max_blocks=ORACLE_MAX_BLOCKS, max_dim=ORACLE_MAX_BLOCK_DIM):
    """Random desk-scale algebra (uniform block count and dimensions)."""
    rng = np.random.default_rng(seed)
    b = int(rng.integers(1, max_blocks + 1))
    dims = [int(rng.integers(1, max_dim + 1)) for _ in range(b)]
    return validate_algebra(dims)


def random_state(algebra, seed, center=None, floor=0.0):
    """Random state, optionally with a prescribed center restriction.

    Densities are squares of gaussian hermitian blocks (full rank almost
    surely); with ``center`` given, blocks are scaled so the per-block
    traces equal the prescription exactly.  ``floor`` mixes in the
    normalized block identity, bounding the density condition number (the
    alternating-projection oracle converges at a rate set by the smallest
    density eigenvalue, so oracle-validated suites use a positive floor).
    """
    if not 0.0 <= floor < 1.0:
        raise ValueError("floor must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    dens = []
    for n in algebra.block_dims:
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        h = (g + g.conj().T) / 2
        d = h @ h
        if floor:
            d = (1.0 - floor) * d + floor * (float(d.trace().real) / n) * np.eye(n)
        dens.append(d)
    if center is None:
        total = sum(float(d.trace().real) for d in dens)
        dens = [d / total for d in dens]
    else:
        center = [float(c) for c in center]
        if len(center) != algebra.num_blocks:
            raise ValueError("center restriction length mismatch")
        if any(c < 0 for c in center):
            raise ValueError("center restriction must be nonnegative")
        if abs(sum(center) - 1.0) > 1e-9:
            raise ValueError("center restriction must sum to 1 for a state")
        scaled = []
        for d, c in zip(dens, center):
            tr = float(d.trace().real)
            scaled.append(d * (c / tr) if c > 0 else np.zeros_like(d))
        dens = scaled
    return Functional(algebra, tuple(dens))


def _split_block(rng, n, pos_mass, neg_mass):
    if n == 1:
        if pos_mass > 0 and neg_mass > 0:
            raise ValueError(
                "inconsistent options: a 1-dimensional block cannot carry "
                "both positive and negative mass")
        return np.array([[pos_mass - neg_mass]], dtype=np.complex128)
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    _, v = eigh_hermitian((g + g.conj().T) / 2)
    n_pos = n // 2 + (n % 2)
    weights = np.zeros(n)
    if pos_mass > 0:
        raw = np.abs(rng.standard_normal(n_pos)) + 1e-3
        weights[:n_pos] = raw / raw.sum() * pos_mass
    if neg_mass > 0:
        raw = np.abs(rng.standard_normal(n - n_pos)) + 1e-3
        weights[n_pos:] = -raw / raw.sum() * neg_mass
    return (v * weights) @ v.conj().T


def random_hermitian(algebra, seed, traces=None, trace_norms=None):
    """Random hermitian functional with optional prescribed block data.

    ``traces`` pins the per-block traces, ``trace_norms`` the per-block
    trace norms; prescriptions must satisfy ``trace_norm >= |trace|``.
    Deterministic per seed.
    """
    rng = np.random.default_rng(seed)
    dims = algebra.block_dims
    if traces is not None and len(traces) != len(dims):
        raise ValueError("traces length mismatch")
    if trace_norms is not None and len(trace_norms) != len(dims):
        raise ValueError("trace_norms length mismatch")

    dens = []
    for i, n in enumerate(dims):
        t = None if traces is None else float(traces[i])
        nu = None if trace_norms is None else float(trace_norms[i])
        if t is not None and nu is not None:
            if nu < abs(t) - 1e-12:
                raise ValueError("inconsistent options: trace norm below |trace|")
            nu = max(nu, abs(t))
            pos = (nu + t) / 2
            neg = (nu - t) / 2
            dens.append(_split_block(rng, n, pos, neg))
        elif t is not None:
            g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            h = (g + g.conj().T) / 2
            h = h + ((t - float(h.trace().real)) / n) * np.eye(n)
            dens.append(h)
        elif nu is not None:
            g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            h = (g + g.conj().T) / 2
            w, _ = eigh_hermitian(h)
            current = float(np.abs(w).sum())
            dens.append(h * (nu / current) if current > 0 else h)
        else:
            g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            dens.append((g + g.conj().T) / 2)
    return Functional(algebra, tuple(dens))
