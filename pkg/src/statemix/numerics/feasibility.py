"""Alternating-projection (Dykstra) feasibility over products of PSD cones.

The variable is a tuple of hermitian matrices, one per block.  Constraints
are real-affine, ``sum_i trace(A_k_i X_i) = b_k`` with hermitian ``A_k_i``;
cone membership is blockwise positive semidefiniteness, optionally shifted
(``X_i - S_i`` PSD) for additional cone sets.  Hermitian matrices are packed
into real coordinate vectors through an isometry (diagonal, then sqrt(2) *
real and imaginary upper-triangle parts), so orthogonal projections in the
packed space agree with Hilbert-Schmidt geometry.

The affine projection is closed-form via a pseudo-inverse of the constraint
Gram matrix (eigendecomposed with the Jacobi kernel).  An inconsistent
affine system is detected during that factorization and reported as
infeasible together with an algebraic certificate: a coefficient vector
``y`` with ``G^T y = 0`` but ``y . b != 0``.

Outcomes are three-valued.  A run is ``feasible`` when some iterate meets
every constraint within ``eps_feas`` and is exactly PSD; ``infeasible`` when
the residual plateaus above ``plateau``; ``indeterminate`` when it plateaus
between the two thresholds or the iteration budget runs out first.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .eigh import eigh_hermitian, eigh_symmetric, psd_project

EPS_FEAS = 1e-7
PLATEAU = 1e-5
MAX_ITER = 20000
_RANK_TOL = 1e-12
_CONSISTENCY_TOL = 1e-9
_PLATEAU_WINDOW = 200
_PLATEAU_IMPROVE = 1e-6
_PLATEAU_MIN_ITER = 600


@dataclass
class FeasibilityProblem:
    """Blockwise PSD feasibility problem with affine trace constraints."""

    block_dims: tuple
    constraints: list  # [(tuple of hermitian arrays per block, float target)]
    lower_bounds: list = field(default_factory=list)  # extra cones X >= S
    initial_point: Optional[tuple] = None  # optional warm start per block
    eps_feas: float = EPS_FEAS
    plateau: float = PLATEAU
    max_iter: int = MAX_ITER
    plateau_improve: float = _PLATEAU_IMPROVE  # min relative gain per window

    def __post_init__(self):
        self.block_dims = tuple(int(d) for d in self.block_dims)
        if not self.constraints:
            raise ValueError("constraint list must be nonempty")
        for mats, _ in self.constraints:
            if len(mats) != len(self.block_dims):
                raise ValueError("constraint block count mismatch")
            for mat, dim in zip(mats, self.block_dims):
                mat = np.asarray(mat)
                if mat.shape != (dim, dim):
                    raise ValueError("constraint block shape mismatch")
                scale = max(1.0, np.linalg.norm(mat))
                if np.abs(mat - mat.conj().T).max(initial=0.0) > 1e-8 * scale:
                    raise ValueError("constraint matrices must be hermitian")


@dataclass
class FeasibilityResult:
    status: str  # "feasible" | "infeasible" | "indeterminate"
    point: Optional[tuple]
    residual: float
    iterations: int
    certificate: Optional[dict] = None
    message: str = ""


def _packed_size(dims):
    return sum(d * d for d in dims)


_TRIU_CACHE = {}


def _triu(d):
    if d not in _TRIU_CACHE:
        _TRIU_CACHE[d] = np.triu_indices(d, k=1)
    return _TRIU_CACHE[d]


def pack_hermitian(blocks, dims):
    """Isometric real coordinates of a tuple of hermitian blocks."""
    out = np.empty(_packed_size(dims))
    pos = 0
    rt2 = np.sqrt(2.0)
    for mat, d in zip(blocks, dims):
        mat = np.asarray(mat, dtype=np.complex128)
        iu = _triu(d)
        out[pos:pos + d] = mat.diagonal().real
        pos += d
        m = iu[0].size
        upper = mat[iu]
        out[pos:pos + m] = rt2 * upper.real
        pos += m
        out[pos:pos + m] = rt2 * upper.imag
        pos += m
    return out


def unpack_hermitian(vec, dims):
    """Inverse of :func:`pack_hermitian`."""
    blocks = []
    pos = 0
    rt2 = np.sqrt(2.0)
    for d in dims:
        mat = np.zeros((d, d), dtype=np.complex128)
        iu = _triu(d)
        np.fill_diagonal(mat, vec[pos:pos + d])
        pos += d
        m = iu[0].size
        upper = vec[pos:pos + m] / rt2 + 1j * vec[pos + m:pos + 2 * m] / rt2
        pos += 2 * m
        mat[iu] = upper
        mat[(iu[1], iu[0])] = upper.conjugate()
        blocks.append(mat)
    return tuple(blocks)


class _AffineProjector:
    """Orthogonal projector onto {x : G x = b} with consistency detection."""

    def __init__(self, problem):
        dims = problem.block_dims
        rows = [pack_hermitian(mats, dims) for mats, _ in problem.constraints]
        self.g = np.array(rows)
        self.b = np.array([float(t) for _, t in problem.constraints])
        gram = self.g @ self.g.T
        lam, u = eigh_symmetric(gram)
        lam_max = lam[0] if lam.size else 0.0
        mask = lam > _RANK_TOL * max(lam_max, 1.0)
        inv = np.where(mask, 1.0 / np.where(mask, lam, 1.0), 0.0)
        self.pinv = (u * inv) @ u.T
        resid = self.b - gram @ (self.pinv @ self.b)
        self.inconsistency = float(np.abs(resid).max(initial=0.0))
        bscale = max(1.0, float(np.abs(self.b).max(initial=0.0)))
        if self.inconsistency > _CONSISTENCY_TOL * bscale:
            nrm = np.linalg.norm(resid)
            self.certificate = {
                "kind": "inconsistent_affine_system",
                "coefficients": (resid / nrm).tolist(),
                "violation": float(nrm),
            }
        else:
            self.certificate = None

    def project(self, x):
        return x - self.g.T @ (self.pinv @ (self.g @ x - self.b))

    def residual(self, x):
        return float(np.abs(self.g @ x - self.b).max(initial=0.0))


def dykstra_feasibility(problem):
    """Run cyclic Dykstra projections on a :class:`FeasibilityProblem`."""
    dims = problem.block_dims
    affine = _AffineProjector(problem)
    if affine.certificate is not None:
        return FeasibilityResult(
            status="infeasible",
            point=None,
            residual=affine.inconsistency,
            iterations=0,
            certificate=affine.certificate,
            message="affine constraint system is inconsistent",
        )

    shifts = [None]
    for bound in problem.lower_bounds:
        shifts.append(pack_hermitian(bound, dims))

    def project_cone(x, shift):
        base = x if shift is None else x - shift
        blocks = unpack_hermitian(base, dims)
        neg = 0.0
        proj = []
        for blk in blocks:
            p, lo = psd_project(blk)
            proj.append(p)
            neg = min(neg, lo)
        out = pack_hermitian(proj, dims)
        if shift is not None:
            out = out + shift
        return out, -neg

    def cone_defect(x):
        worst = 0.0
        for shift in shifts:
            base = x if shift is None else x - shift
            for blk in unpack_hermitian(base, dims):
                w, _ = eigh_hermitian(blk)
                worst = max(worst, max(0.0, -float(w[-1])))
        return worst

    if problem.initial_point is not None:
        x = pack_hermitian(problem.initial_point, dims)
    else:
        x = np.zeros(_packed_size(dims))
    corrections = [np.zeros_like(x) for _ in range(1 + len(shifts))]

    best = np.inf
    prev_best = np.inf
    for it in range(1, problem.max_iter + 1):
        y = affine.project(x + corrections[0])
        corrections[0] = x + corrections[0] - y
        x = y
        for j, shift in enumerate(shifts, start=1):
            y, _ = project_cone(x + corrections[j], shift)
            corrections[j] = x + corrections[j] - y
            x = y

        res = affine.residual(x)
        if len(shifts) > 1:
            res = max(res, cone_defect(x))
        best = min(best, res)
        if res <= problem.eps_feas:
            return FeasibilityResult(
                status="feasible",
                point=unpack_hermitian(x, dims),
                residual=res,
                iterations=it,
                message="all constraints met at tolerance",
            )
        if it % _PLATEAU_WINDOW == 0:
            stalled = (it >= _PLATEAU_MIN_ITER and np.isfinite(prev_best)
                       and (prev_best - best) <= problem.plateau_improve * prev_best)
            if stalled:
                status = "infeasible" if best > problem.plateau else "indeterminate"
                return FeasibilityResult(
                    status=status,
                    point=None,
                    residual=best,
                    iterations=it,
                    message=f"residual plateaued near {best:.3e}",
                )
            prev_best = best

    return FeasibilityResult(
        status="indeterminate",
        point=None,
        residual=best,
        iterations=problem.max_iter,
        message="iteration budget exhausted",
    )
