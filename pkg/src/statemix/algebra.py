"""Finite-dimensional von Neumann algebras as lists of matrix blocks.

An algebra is ``M_{n_1} + ... + M_{n_B}`` (direct sum); its elements are
tuples of complex square matrices, its center consists of blockwise scalars
and its closed two-sided ideals are exactly the sub-sums over subsets of
block indices.  Block indices are 0-based everywhere, including in
serialized files.
"""

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

EPS_EIG = 1e-9
IDEAL_ENUMERATION_CAP = 20


def _freeze(arr):
    arr = np.array(arr, dtype=np.complex128, order="C")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class AlgebraSpec:
    """Ordered block dimensions of a direct sum of matrix algebras."""

    block_dims: tuple

    @property
    def num_blocks(self):
        return len(self.block_dims)

    @property
    def center_dim(self):
        return len(self.block_dims)

    @property
    def total_dim(self):
        return sum(n * n for n in self.block_dims)

    def __str__(self):
        return "+".join(f"M{n}" for n in self.block_dims)


def validate_algebra(block_dims):
    """Validate a list of block dimensions and return an :class:`AlgebraSpec`."""
    dims = tuple(int(n) for n in block_dims)
    if not dims:
        raise ValueError("algebra needs at least one block")
    for n in dims:
        if n < 1:
            raise ValueError("block dimension must be >= 1")
    return AlgebraSpec(dims)


@dataclass(frozen=True)
class Element:
    """An algebra element: one complex matrix per block."""

    algebra: AlgebraSpec
    blocks: tuple

    def __post_init__(self):
        blocks = tuple(_freeze(b) for b in self.blocks)
        if len(blocks) != self.algebra.num_blocks:
            raise ValueError("wrong number of blocks")
        for mat, n in zip(blocks, self.algebra.block_dims):
            if mat.shape != (n, n):
                raise ValueError(f"block shape {mat.shape} does not match dimension {n}")
        object.__setattr__(self, "blocks", blocks)

    def adjoint(self):
        return Element(self.algebra, tuple(b.conj().T for b in self.blocks))

    def is_hermitian(self, tol=EPS_EIG):
        scale = max(1.0, self.norm())
        return all(np.abs(b - b.conj().T).max(initial=0.0) <= tol * scale
                   for b in self.blocks)

    def is_positive(self, tol=EPS_EIG):
        from .numerics import eigh_hermitian

        if not self.is_hermitian(tol):
            return False
        scale = max(1.0, self.norm())
        for b in self.blocks:
            w, _ = eigh_hermitian((b + b.conj().T) / 2)
            if w[-1] < -tol * scale:
                return False
        return True

    def is_projection(self, tol=EPS_EIG):
        if not self.is_hermitian(tol):
            return False
        sq = self @ self
        return max(np.abs(s - b).max(initial=0.0)
                   for s, b in zip(sq.blocks, self.blocks)) <= tol

    def norm(self):
        """Operator norm (largest singular value across blocks)."""
        return max(float(np.linalg.norm(b, 2)) for b in self.blocks)

    def __add__(self, other):
        self._check_same(other)
        return Element(self.algebra, tuple(a + b for a, b in zip(self.blocks, other.blocks)))

    def __sub__(self, other):
        self._check_same(other)
        return Element(self.algebra, tuple(a - b for a, b in zip(self.blocks, other.blocks)))

    def __mul__(self, scalar):
        return Element(self.algebra, tuple(scalar * b for b in self.blocks))

    __rmul__ = __mul__

    def __matmul__(self, other):
        self._check_same(other)
        return Element(self.algebra, tuple(a @ b for a, b in zip(self.blocks, other.blocks)))

    def _check_same(self, other):
        if self.algebra != other.algebra:
            raise ValueError("algebra mismatch")


def identity_element(algebra):
    return Element(algebra, tuple(np.eye(n) for n in algebra.block_dims))


def zero_element(algebra):
    return Element(algebra, tuple(np.zeros((n, n)) for n in algebra.block_dims))


@dataclass(frozen=True)
class CenterElement:
    """A central element: one scalar per block (``c_i`` times identity)."""

    algebra: AlgebraSpec
    values: tuple

    def __post_init__(self):
        vals = tuple(complex(v) for v in self.values)
        if len(vals) != self.algebra.num_blocks:
            raise ValueError("wrong number of central values")
        object.__setattr__(self, "values", vals)

    def is_positive(self, tol=EPS_EIG):
        return all(abs(v.imag) <= tol and v.real >= -tol for v in self.values)

    def to_element(self):
        return Element(self.algebra,
                       tuple(v * np.eye(n) for v, n in
                             zip(self.values, self.algebra.block_dims)))

    def real_values(self):
        return np.array([v.real for v in self.values])

    def __add__(self, other):
        return CenterElement(self.algebra,
                             tuple(a + b for a, b in zip(self.values, other.values)))

    def __sub__(self, other):
        return CenterElement(self.algebra,
                             tuple(a - b for a, b in zip(self.values, other.values)))

    def __mul__(self, other):
        if isinstance(other, CenterElement):
            return CenterElement(self.algebra,
                                 tuple(a * b for a, b in zip(self.values, other.values)))
        return CenterElement(self.algebra, tuple(other * v for v in self.values))

    __rmul__ = __mul__


@dataclass(frozen=True)
class Ideal:
    """A closed two-sided ideal, given by its supporting block indices."""

    algebra: AlgebraSpec
    support: frozenset

    def __post_init__(self):
        supp = frozenset(int(i) for i in self.support)
        for i in supp:
            if not 0 <= i < self.algebra.num_blocks:
                raise ValueError(f"block index {i} out of range")
        object.__setattr__(self, "support", supp)

    def contains(self, x, tol=1e-12):
        """Membership: x vanishes on every block outside the support."""
        if x.algebra != self.algebra:
            raise ValueError("algebra mismatch")
        return all(np.abs(b).max(initial=0.0) <= tol
                   for i, b in enumerate(x.blocks) if i not in self.support)

    def indicator(self):
        vals = [1.0 if i in self.support else 0.0
                for i in range(self.algebra.num_blocks)]
        return CenterElement(self.algebra, tuple(vals))


@dataclass(frozen=True)
class IdealLattice:
    ideals: tuple
    maximal_ideals: tuple
    strong_radical: Ideal = field(repr=False, default=None)


def enumerate_ideals(algebra, cap=IDEAL_ENUMERATION_CAP):
    """All ideals of the algebra, its maximal ideals and its strong radical.

    There are ``2^B`` ideals (one per subset of blocks); the maximal ideals
    are the complements of singletons and their intersection, the strong
    radical, is the zero ideal.  Raises when the block count exceeds the
    enumeration cap.
    """
    b = algebra.num_blocks
    if b > cap:
        raise ValueError("ideal lattice too large")
    indices = range(b)
    ideals = []
    for size in range(b + 1):
        for subset in combinations(indices, size):
            ideals.append(Ideal(algebra, frozenset(subset)))
    maximal = tuple(Ideal(algebra, frozenset(indices) - {i}) for i in indices)
    radical_support = frozenset(indices)
    for m in maximal:
        radical_support &= m.support
    radical = Ideal(algebra, radical_support)
    return IdealLattice(tuple(ideals), maximal, radical)


def central_carrier(h, tol=EPS_EIG):
    """Smallest central element dominating a positive element.

    Returns ``(carrier, bounds)``: the carrier holds the per-block operator
    norms, ``bounds`` the per-block spectral intervals ``(min, max)``.
    """
    from .numerics import eigh_hermitian

    if not h.is_positive(tol):
        raise ValueError("element is not positive")
    values = []
    bounds = []
    for blk in h.blocks:
        w, _ = eigh_hermitian((blk + blk.conj().T) / 2)
        top = max(float(w[0]), 0.0)
        low = max(float(w[-1]), 0.0)
        values.append(top)
        bounds.append((low, top))
    return CenterElement(h.algebra, tuple(values)), tuple(bounds)
