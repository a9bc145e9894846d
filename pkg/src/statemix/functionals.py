"""Hermitian functionals as tuples of block density matrices.

A functional pairs with algebra elements by ``omega(x) = sum_i
trace(D_i x_i)``.  This module supplies the Jordan decomposition into
positive and negative parts, support projections, restriction to the
center, closed-form ideal and center-weighted norms, and the factorization
of a positive functional through a center-valued module map.
"""

from dataclasses import dataclass

import numpy as np

from .algebra import EPS_EIG, AlgebraSpec, CenterElement, Element, Ideal, _freeze
from .numerics import eigh_hermitian


@dataclass(frozen=True)
class Functional:
    """A hermitian functional: one hermitian density matrix per block."""

    algebra: AlgebraSpec
    densities: tuple

    def __post_init__(self):
        dens = tuple(_freeze(d) for d in self.densities)
        if len(dens) != self.algebra.num_blocks:
            raise ValueError("wrong number of density blocks")
        for mat, n in zip(dens, self.algebra.block_dims):
            if mat.shape != (n, n):
                raise ValueError(f"density shape {mat.shape} does not match dimension {n}")
        object.__setattr__(self, "densities", dens)

    def is_hermitian(self, tol=EPS_EIG):
        scale = max(1.0, self.norm())
        return all(np.abs(d - d.conj().T).max(initial=0.0) <= tol * scale
                   for d in self.densities)

    def is_positive(self, tol=EPS_EIG):
        if not self.is_hermitian(tol):
            return False
        scale = max(1.0, self.norm())
        for d in self.densities:
            w, _ = eigh_hermitian((d + d.conj().T) / 2)
            if w[-1] < -tol * scale:
                return False
        return True

    def is_state(self, tol=EPS_EIG):
        if not self.is_positive(tol):
            return False
        total = sum(float(d.trace().real) for d in self.densities)
        return abs(total - 1.0) <= max(tol, 1e-12)

    def norm(self):
        """Functional norm: the sum of per-block trace norms."""
        total = 0.0
        for d in self.densities:
            h = (d + d.conj().T) / 2
            w, _ = eigh_hermitian(h)
            total += float(np.abs(w).sum())
        return total

    def __add__(self, other):
        self._check_same(other)
        return Functional(self.algebra,
                          tuple(a + b for a, b in zip(self.densities, other.densities)))

    def __sub__(self, other):
        self._check_same(other)
        return Functional(self.algebra,
                          tuple(a - b for a, b in zip(self.densities, other.densities)))

    def __mul__(self, scalar):
        return Functional(self.algebra, tuple(scalar * d for d in self.densities))

    __rmul__ = __mul__

    def _check_same(self, other):
        if self.algebra != other.algebra:
            raise ValueError("algebra mismatch")


def zero_functional(algebra):
    return Functional(algebra, tuple(np.zeros((n, n)) for n in algebra.block_dims))


def evaluate(omega, x):
    """Dual pairing ``sum_i trace(D_i x_i)``; real for hermitian pairs."""
    if omega.algebra != x.algebra:
        raise ValueError("algebra mismatch")
    return complex(sum((d @ b).trace() for d, b in zip(omega.densities, x.blocks)))


@dataclass(frozen=True)
class JordanPair:
    """Positive and negative parts of a hermitian functional."""

    positive_part: Functional
    negative_part: Functional

    @property
    def total_norm(self):
        mass = 0.0
        for part in (self.positive_part, self.negative_part):
            mass += sum(float(d.trace().real) for d in part.densities)
        return mass


def jordan_decompose(omega, tol=EPS_EIG):
    """Split a hermitian functional into orthogonal positive parts.

    Per block the density is eigendecomposed and its spectrum split by
    sign, so the two parts have orthogonal supports and their masses add up
    to the functional norm.
    """
    if not omega.is_hermitian(tol):
        raise ValueError("functional is not hermitian")
    pos = []
    neg = []
    for d in omega.densities:
        h = (d + d.conj().T) / 2
        w, v = eigh_hermitian(h)
        wp = np.clip(w, 0.0, None)
        wm = np.clip(-w, 0.0, None)
        pos.append((v * wp) @ v.conj().T)
        neg.append((v * wm) @ v.conj().T)
    return JordanPair(Functional(omega.algebra, tuple(pos)),
                      Functional(omega.algebra, tuple(neg)))


def support_projection(omega, tol=EPS_EIG):
    """Blockwise orthogonal projection onto the range of each density."""
    if not omega.is_positive(tol):
        raise ValueError("functional is not positive")
    blocks = []
    for d in omega.densities:
        h = (d + d.conj().T) / 2
        w, v = eigh_hermitian(h)
        cutoff = tol * max(float(w[0]), 0.0)
        keep = w > cutoff
        if keep.any():
            vk = v[:, keep]
            blocks.append(vk @ vk.conj().T)
        else:
            blocks.append(np.zeros_like(h))
    return Element(omega.algebra, tuple(blocks))


def restrict_to_center(omega):
    """Central restriction: the per-block traces."""
    return CenterElement(omega.algebra,
                         tuple(complex(d.trace()) for d in omega.densities))


def ideal_norm(omega, ideal):
    """Norm of the restriction to an ideal: sum of trace norms over its support."""
    if omega.algebra != ideal.algebra:
        raise ValueError("algebra mismatch")
    total = 0.0
    for i in ideal.support:
        h = (omega.densities[i] + omega.densities[i].conj().T) / 2
        w, _ = eigh_hermitian(h)
        total += float(np.abs(w).sum())
    return total


def weighted_norm(omega, c, tol=EPS_EIG):
    """Norm of the functional scaled by a positive central element."""
    if omega.algebra != c.algebra:
        raise ValueError("algebra mismatch")
    if not c.is_positive(tol):
        raise ValueError("central weight is not positive")
    total = 0.0
    for ci, d in zip(c.real_values(), omega.densities):
        h = (d + d.conj().T) / 2
        w, _ = eigh_hermitian(h)
        total += float(ci) * float(np.abs(w).sum())
    return total


@dataclass(frozen=True)
class CentralDecomposition:
    """Factorization of a positive functional through the center.

    ``omega = (omega restricted to the center) composed with the module
    map``; the module map sends an element to the central element with
    values ``trace(D_i x_i) / mu_i`` on blocks carrying mass and 0 on the
    rest, so its value at the identity is the central support projection.
    """

    center_restriction: CenterElement
    normalized_densities: tuple
    unit_image: CenterElement

    def apply(self, x):
        algebra = self.center_restriction.algebra
        if x.algebra != algebra:
            raise ValueError("algebra mismatch")
        vals = [complex((e @ b).trace()) for e, b in
                zip(self.normalized_densities, x.blocks)]
        return CenterElement(algebra, tuple(vals))


def central_decompose(omega, tol=EPS_EIG):
    """Central decomposition of a positive functional."""
    if not omega.is_positive(tol):
        raise ValueError("functional is not positive")
    mu = restrict_to_center(omega)
    scale = max(float(v.real) for v in mu.values) if mu.values else 0.0
    cutoff = tol * max(scale, 1.0)
    normalized = []
    unit = []
    for d, m in zip(omega.densities, mu.values):
        mass = m.real
        if mass > cutoff:
            normalized.append(d / mass)
            unit.append(1.0)
        else:
            normalized.append(np.zeros_like(d))
            unit.append(0.0)
    return CentralDecomposition(
        center_restriction=mu,
        normalized_densities=tuple(_freeze(e) for e in normalized),
        unit_image=CenterElement(omega.algebra, tuple(unit)),
    )
