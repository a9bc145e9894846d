"""Completely positive center-module maps in Kraus and Choi form.

Kraus operators are block-diagonal algebra elements, so every map here is
automatically completely positive and commutes with multiplication by
central elements; the Choi description keeps one ``n_i^2 x n_i^2``
hermitian matrix per block.

Conventions (fixed): ``vec`` stacks columns, so ``vec(A)[i + n*j] =
A[i, j]``.  The Choi block of a Kraus family is ``C_i = sum_j
vec(a_j_i) vec(a_j_i)^*``.  With this choice ``trace(D phi(x)) =
trace(C (D^T kron x))`` per block, and the map is unital exactly when the
partial trace of each Choi block over its second tensor factor is the
identity.
"""

from dataclasses import dataclass

import numpy as np

from .algebra import EPS_EIG, AlgebraSpec, Element, _freeze
from .functionals import Functional
from .numerics import eigh_hermitian

EPS_UNITAL = 1e-9


def _vec(a):
    return np.asarray(a).flatten(order="F")


def _unvec(v, n):
    return np.asarray(v).reshape((n, n), order="F")


@dataclass(frozen=True)
class KrausMap:
    """Elementary map ``x -> sum_j a_j^* x a_j`` with ``a_j`` in the algebra."""

    algebra: AlgebraSpec
    operators: tuple

    def __post_init__(self):
        ops = tuple(self.operators)
        for op in ops:
            if op.algebra != self.algebra:
                raise ValueError("Kraus operator algebra mismatch")
        object.__setattr__(self, "operators", ops)

    def kraus_sum(self):
        """The element ``sum_j a_j^* a_j``."""
        blocks = [np.zeros((n, n), dtype=np.complex128)
                  for n in self.algebra.block_dims]
        for op in self.operators:
            for i, b in enumerate(op.blocks):
                blocks[i] = blocks[i] + b.conj().T @ b
        return Element(self.algebra, tuple(blocks))

    def unitality_defect(self):
        s = self.kraus_sum()
        return max(float(np.linalg.norm(b - np.eye(n), 2))
                   for b, n in zip(s.blocks, self.algebra.block_dims))

    def is_unital(self, tol=EPS_UNITAL):
        return self.unitality_defect() <= tol


@dataclass(frozen=True)
class ModuleMapChoi:
    """Blockwise Choi matrices of a completely positive center-module map."""

    algebra: AlgebraSpec
    choi_blocks: tuple

    def __post_init__(self):
        blocks = tuple(_freeze(c) for c in self.choi_blocks)
        for c, n in zip(blocks, self.algebra.block_dims):
            if c.shape != (n * n, n * n):
                raise ValueError("Choi block shape mismatch")
        object.__setattr__(self, "choi_blocks", blocks)

    def is_completely_positive(self, tol=EPS_EIG):
        for c in self.choi_blocks:
            h = (c + c.conj().T) / 2
            w, _ = eigh_hermitian(h)
            if w[-1] < -tol * max(1.0, float(np.abs(w).max(initial=0.0))):
                return False
        return True

    def partial_traces(self):
        """Partial trace of each Choi block over the second tensor factor."""
        out = []
        for c, n in zip(self.choi_blocks, self.algebra.block_dims):
            c4 = c.reshape(n, n, n, n)
            out.append(np.einsum("jrkr->jk", c4))
        return tuple(out)

    def unitality_defect(self):
        return max(float(np.linalg.norm(pt - np.eye(pt.shape[0]), 2))
                   for pt in self.partial_traces())

    def is_unital(self, tol=EPS_UNITAL):
        return self.unitality_defect() <= tol

    def apply(self, x):
        """Evaluate the map on an element through its Choi blocks."""
        if x.algebra != self.algebra:
            raise ValueError("algebra mismatch")
        blocks = []
        for c, b, n in zip(self.choi_blocks, x.blocks, self.algebra.block_dims):
            c4 = c.reshape(n, n, n, n)
            blocks.append(np.einsum("qspr,rs->pq", c4, b))
        return Element(self.algebra, tuple(blocks))


def apply_kraus(phi, x):
    """Heisenberg action ``x -> sum_j a_j^* x a_j``."""
    if phi.algebra != x.algebra:
        raise ValueError("algebra mismatch")
    blocks = [np.zeros((n, n), dtype=np.complex128)
              for n in phi.algebra.block_dims]
    for op in phi.operators:
        for i, (a, b) in enumerate(zip(op.blocks, x.blocks)):
            blocks[i] = blocks[i] + a.conj().T @ b @ a
    return Element(phi.algebra, tuple(blocks))


def predual_apply(phi, omega):
    """Schroedinger action on functionals: ``D_i -> sum_j a_j_i D_i a_j_i^*``."""
    if phi.algebra != omega.algebra:
        raise ValueError("algebra mismatch")
    dens = [np.zeros((n, n), dtype=np.complex128)
            for n in phi.algebra.block_dims]
    for op in phi.operators:
        for i, (a, d) in enumerate(zip(op.blocks, omega.densities)):
            dens[i] = dens[i] + a @ d @ a.conj().T
    return Functional(phi.algebra, tuple(dens))


def choi_of(phi):
    """Choi blocks of a Kraus map (column-stacking convention)."""
    blocks = []
    for i, n in enumerate(phi.algebra.block_dims):
        c = np.zeros((n * n, n * n), dtype=np.complex128)
        for op in phi.operators:
            v = _vec(op.blocks[i])
            c += np.outer(v, v.conj())
        blocks.append(c)
    return ModuleMapChoi(phi.algebra, tuple(blocks))


def kraus_from_choi(choi, tol=EPS_EIG):
    """Spectral Kraus extraction from Choi blocks.

    Every eigenpair above the cutoff contributes the Kraus block
    ``sqrt(lambda) * unvec(v)``; fails when some Choi block has an
    eigenvalue below ``-tol`` (not completely positive).
    """
    dims = choi.algebra.block_dims
    per_block = []
    max_rank = 0
    for c, n in zip(choi.choi_blocks, dims):
        h = (c + c.conj().T) / 2
        w, v = eigh_hermitian(h)
        scale = max(1.0, float(np.abs(w).max(initial=0.0)))
        if w.size and w[-1] < -tol * scale:
            raise ValueError("not completely positive")
        ops = []
        for k in range(w.size):
            if w[k] > tol * scale:
                ops.append(np.sqrt(w[k]) * _unvec(v[:, k], n))
        per_block.append(ops)
        max_rank = max(max_rank, len(ops))

    operators = []
    for j in range(max_rank):
        blocks = []
        for ops, n in zip(per_block, dims):
            blocks.append(ops[j] if j < len(ops) else np.zeros((n, n)))
        operators.append(Element(choi.algebra, tuple(blocks)))
    if not operators:
        operators.append(Element(choi.algebra,
                                 tuple(np.zeros((n, n)) for n in dims)))
    return KrausMap(choi.algebra, tuple(operators))


def _inverse_sqrt_psd(mat, regularizer=0.0):
    h = (mat + mat.conj().T) / 2
    if regularizer:
        h = h + regularizer * np.eye(h.shape[0])
    w, v = eigh_hermitian(h)
    if w[-1] <= 0:
        raise ValueError("matrix is not positive definite")
    return (v * (1.0 / np.sqrt(w))) @ v.conj().T


def _sqrt_psd(mat, tol=EPS_EIG):
    h = (mat + mat.conj().T) / 2
    w, v = eigh_hermitian(h)
    scale = max(1.0, float(np.abs(w).max(initial=0.0)))
    if w[-1] < -tol * scale:
        raise ValueError("matrix is not positive semidefinite")
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def random_elementary(algebra, k, seed):
    """Random unital elementary map with ``k`` Kraus operators.

    Gaussian blocks are normalized twice by the inverse square root of the
    Kraus sum (the first pass regularized, the second exact), which leaves
    the sum within roughly machine precision of the identity.  Deterministic
    per seed.
    """
    if k < 1:
        raise ValueError("need at least one Kraus operator")
    rng = np.random.default_rng(seed)
    dims = algebra.block_dims
    raw = []
    for _ in range(k):
        blocks = tuple(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
                       for n in dims)
        raw.append(blocks)

    for regularizer in (1e-8, 0.0):
        sums = []
        for i, n in enumerate(dims):
            s = np.zeros((n, n), dtype=np.complex128)
            for blocks in raw:
                s += blocks[i].conj().T @ blocks[i]
            sums.append(_inverse_sqrt_psd(s, regularizer))
        raw = [tuple(blocks[i] @ sums[i] for i in range(len(dims)))
               for blocks in raw]

    return KrausMap(algebra, tuple(Element(algebra, blocks) for blocks in raw))


def unitalize(phi, tol=EPS_EIG):
    """Close a subunital Kraus map by appending ``sqrt(1 - sum a_j^* a_j)``.

    Requires the Kraus sum to sit below the identity; returns a unital map
    acting identically on the original operators.
    """
    s = phi.kraus_sum()
    blocks = []
    for b, n in zip(s.blocks, phi.algebra.block_dims):
        gap = np.eye(n) - b
        blocks.append(_sqrt_psd(gap, tol))
    closer = Element(phi.algebra, tuple(blocks))
    return KrausMap(phi.algebra, phi.operators + (closer,))
