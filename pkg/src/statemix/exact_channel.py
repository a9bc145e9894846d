"""Exact channel construction through the GNS representation.

A state ``rho`` is the composition of ``omega`` with a genuine finite Kraus
channel exactly when ``rho`` kills the blocks where ``omega`` has no mass
and some density matrix on the GNS carrier of ``omega`` restricts to
``rho`` on the represented algebra while agreeing with the cyclic vector
state on the commutant.  The construction purifies such a density with
finite multiplicity, builds the partial isometry intertwining the commutant
action, reads its column components (which land in the represented
algebra), pulls them back and applies a support correction to restore
unitality.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algebra import EPS_EIG, AlgebraSpec, Element, Ideal
from .channels import KrausMap
from .functionals import Functional, support_projection
from .numerics import (
    EPS_FEAS,
    MAX_ITER,
    FeasibilityProblem,
    dykstra_feasibility,
    eigh_hermitian,
)
from .oracle import hermitian_basis

INTERTWINE_TOL = 1e-6
_CONSTRUCT_MAX_ITER = 120000


class PurificationError(RuntimeError):
    """Numerical failure while extracting the channel, not a verdict."""


@dataclass(frozen=True)
class GnsData:
    """GNS representation data of a state on a block algebra."""

    source: AlgebraSpec
    block_ranks: tuple
    carrier_dim: int
    block_offsets: tuple
    eigenvalues: tuple   # per block, the kept spectrum of the density
    eigenvectors: tuple  # per block, matrix of kept eigenvector columns
    cyclic_vector: np.ndarray
    kernel_ideal: Ideal

    def represent(self, x):
        """Embed an algebra element as a block operator on the carrier."""
        if x.algebra != self.source:
            raise ValueError("algebra mismatch")
        out = np.zeros((self.carrier_dim, self.carrier_dim), dtype=np.complex128)
        for i, (n, r) in enumerate(zip(self.source.block_dims, self.block_ranks)):
            if r == 0:
                continue
            o = self.block_offsets[i]
            out[o:o + n * r, o:o + n * r] = np.kron(x.blocks[i], np.eye(r))
        return out

    def commutant_basis(self):
        """Hermitian basis of the commutant of the represented algebra."""
        basis = []
        for i, (n, r) in enumerate(zip(self.source.block_dims, self.block_ranks)):
            if r == 0:
                continue
            o = self.block_offsets[i]
            for h in hermitian_basis(r):
                mat = np.zeros((self.carrier_dim, self.carrier_dim),
                               dtype=np.complex128)
                mat[o:o + n * r, o:o + n * r] = np.kron(np.eye(n), h)
                basis.append(mat)
        return basis


def gns(omega, tol=EPS_EIG):
    """GNS representation of a state.

    Per block the density is eigendecomposed; blocks act with multiplicity
    equal to their density rank, the cyclic vector pairs eigenvectors with
    multiplicity slots weighted by root eigenvalues, and massless blocks
    form the kernel ideal.
    """
    if not omega.is_state():
        raise ValueError("input must be a state")
    algebra = omega.algebra
    ranks = []
    eigvals = []
    eigvecs = []
    for d in omega.densities:
        h = (d + d.conj().T) / 2
        w, v = eigh_hermitian(h)
        cutoff = tol * max(float(w[0]) if w.size else 0.0, 0.0)
        keep = w > cutoff
        ranks.append(int(keep.sum()))
        eigvals.append(w[keep])
        eigvecs.append(v[:, keep])

    offsets = []
    pos = 0
    for n, r in zip(algebra.block_dims, ranks):
        offsets.append(pos)
        pos += n * r
    carrier = pos

    xi = np.zeros(carrier, dtype=np.complex128)
    for i, (n, r) in enumerate(zip(algebra.block_dims, ranks)):
        o = offsets[i]
        for k in range(r):
            f = np.zeros(r)
            f[k] = 1.0
            xi[o:o + n * r] += np.sqrt(eigvals[i][k]) * np.kron(eigvecs[i][:, k], f)

    kernel = Ideal(algebra, frozenset(i for i, r in enumerate(ranks) if r == 0))
    return GnsData(
        source=algebra,
        block_ranks=tuple(ranks),
        carrier_dim=carrier,
        block_offsets=tuple(offsets),
        eigenvalues=tuple(eigvals),
        eigenvectors=tuple(eigvecs),
        cyclic_vector=xi,
        kernel_ideal=kernel,
    )


@dataclass
class ExtensionCertificate:
    """A density on the GNS carrier witnessing exact reachability."""

    density: np.ndarray
    residuals: dict


@dataclass
class ExtensionOutcome:
    status: str  # "feasible" | "infeasible" | "indeterminate"
    certificate: Optional[ExtensionCertificate]
    residual: float
    iterations: int
    message: str = ""
    gns_data: Optional[GnsData] = None


def _extension_problem(gns_data, omega, rho, eps_feas, max_iter,
                       plateau_improve=None):
    algebra = omega.algebra
    n_carrier = gns_data.carrier_dim
    constraints = []

    for i, (n, r) in enumerate(zip(algebra.block_dims, gns_data.block_ranks)):
        if r == 0:
            continue
        o = gns_data.block_offsets[i]
        d_rho = rho.densities[i]
        for h in hermitian_basis(n):
            mat = np.zeros((n_carrier, n_carrier), dtype=np.complex128)
            mat[o:o + n * r, o:o + n * r] = np.kron(h, np.eye(r))
            constraints.append(((mat,), float(np.trace(d_rho @ h).real)))
        lam = gns_data.eigenvalues[i]
        for h in hermitian_basis(r):
            mat = np.zeros((n_carrier, n_carrier), dtype=np.complex128)
            mat[o:o + n * r, o:o + n * r] = np.kron(np.eye(n), h)
            constraints.append(((mat,), float((lam * np.diagonal(h).real).sum())))

    start = (np.eye(n_carrier, dtype=np.complex128) / n_carrier,)
    kwargs = {}
    if plateau_improve is not None:
        kwargs["plateau_improve"] = plateau_improve
    return FeasibilityProblem(
        block_dims=(n_carrier,),
        constraints=constraints,
        initial_point=start,
        eps_feas=eps_feas,
        max_iter=max_iter,
        **kwargs,
    )


def extension_feasible(omega, rho, eps_feas=EPS_FEAS, max_iter=MAX_ITER,
                       tol=EPS_EIG, plateau_improve=None):
    """Search a carrier density restricting to the target over the algebra
    and to the cyclic vector state over the commutant.

    Immediately infeasible when the target carries mass on blocks killed by
    the representation; otherwise a Dykstra run over the carrier decides,
    three-valued.
    """
    if omega.algebra != rho.algebra:
        raise ValueError("algebra mismatch")
    if not omega.is_state() or not rho.is_state():
        raise ValueError("inputs must be states")

    gns_data = gns(omega, tol)
    kernel_mass = sum(float(np.abs(rho.densities[i]).max(initial=0.0))
                      for i in gns_data.kernel_ideal.support)
    if kernel_mass > tol:
        return ExtensionOutcome(
            status="infeasible",
            certificate=None,
            residual=kernel_mass,
            iterations=0,
            message=("the target carries mass on blocks annihilated by the "
                     "source's representation"),
            gns_data=gns_data,
        )

    problem = _extension_problem(gns_data, omega, rho, eps_feas, max_iter,
                                 plateau_improve)
    result = dykstra_feasibility(problem)
    certificate = None
    if result.status == "feasible":
        density = result.point[0]
        certificate = ExtensionCertificate(
            density=density,
            residuals={"constraints": result.residual},
        )
    return ExtensionOutcome(
        status=result.status,
        certificate=certificate,
        residual=result.residual,
        iterations=result.iterations,
        message=result.message,
        gns_data=gns_data,
    )


def _purify(density, rank_tol=1e-12):
    w, v = eigh_hermitian(density)
    top = max(float(w[0]) if w.size else 0.0, 0.0)
    keep = w > rank_tol * max(top, 1.0)
    k = int(keep.sum())
    if k == 0:
        raise PurificationError("certificate density is numerically zero")
    n = density.shape[0]
    eta = np.zeros(n * k, dtype=np.complex128)
    for m in range(k):
        slot = np.zeros(k)
        slot[m] = 1.0
        eta += np.sqrt(w[m]) * np.kron(v[:, m], slot)
    eta = eta / np.linalg.norm(eta)
    return eta, k


def _inverse_sqrt_pd(mat):
    w, v = eigh_hermitian((mat + mat.conj().T) / 2)
    if w[-1] <= 0:
        raise PurificationError("Kraus sum is not positive definite")
    return (v * (1.0 / np.sqrt(w))) @ v.conj().T


def construct_exact_channel(omega, rho, tol=EPS_EIG, with_diagnostics=False):
    """Build a finite Kraus channel composing ``omega`` into ``rho``.

    Runs the extension feasibility search (tightened for construction),
    purifies the certificate density at multiplicity equal to its rank and
    reads the components of the intertwining partial isometry directly off
    the purification: against the weighted eigenvector frame of the source
    the isometry's multiplicity slices determine one algebra element each,
    exactly on the support of the source.  A support correction restores
    unitality and a final inverse-square-root normalization makes the Kraus
    sum the identity to machine precision.  Raises ``ValueError`` without a
    certificate and ``PurificationError`` when the extracted operators fail
    the isometry checks.
    """
    probe = gns(omega, tol)
    lam_min = min((float(l.min()) for l in probe.eigenvalues if l.size),
                  default=1.0)
    eps_target = max(min(1e-11, 1e-10 * lam_min), 3e-14)
    outcome = extension_feasible(omega, rho, eps_feas=eps_target,
                                 max_iter=_CONSTRUCT_MAX_ITER, tol=tol,
                                 plateau_improve=1e-7)
    if outcome.status != "feasible":
        outcome = extension_feasible(omega, rho, tol=tol)
    if outcome.certificate is None:
        raise ValueError("no extension certificate: " + outcome.message)

    gns_data = outcome.gns_data
    algebra = omega.algebra
    eta, k = _purify(outcome.certificate.density)

    # Multiplicity slice m of the purification, paired with the weighted
    # eigenvector frame of each block, yields the m-th Kraus element.
    kraus_elements = []
    for m in range(k):
        blocks = []
        for i, (n, r) in enumerate(zip(algebra.block_dims, gns_data.block_ranks)):
            if r == 0:
                blocks.append(np.zeros((n, n), dtype=np.complex128))
                continue
            o = gns_data.block_offsets[i]
            slab = eta[o * k:(o + n * r) * k].reshape(n, r, k)
            lam = gns_data.eigenvalues[i]
            vecs = gns_data.eigenvectors[i]
            a_m = (slab[:, :, m] / np.sqrt(lam)[np.newaxis, :]) @ vecs.conj().T
            blocks.append(a_m)
        kraus_elements.append(Element(algebra, tuple(blocks)))

    # uxi = eta holds by construction; recompute as an honest residual.
    xi_defect = 0.0
    for m in range(k):
        for i, (n, r) in enumerate(zip(algebra.block_dims, gns_data.block_ranks)):
            if r == 0:
                continue
            o = gns_data.block_offsets[i]
            lam = gns_data.eigenvalues[i]
            vecs = gns_data.eigenvectors[i]
            image = kraus_elements[m].blocks[i] @ (vecs * np.sqrt(lam))
            slab = eta[o * k:(o + n * r) * k].reshape(n, r, k)
            xi_defect = max(xi_defect, float(
                np.abs(image - slab[:, :, m]).max(initial=0.0)))

    # The isometry squares to the support projection of the source; its
    # defect is the accuracy of the commutant constraints divided by the
    # smallest kept eigenvalue.
    support_blocks = tuple(v @ v.conj().T for v in gns_data.eigenvectors)
    p = Element(algebra, support_blocks)
    ksum = [np.zeros((n, n), dtype=np.complex128) for n in algebra.block_dims]
    for a in kraus_elements:
        for i, b in enumerate(a.blocks):
            ksum[i] = ksum[i] + b.conj().T @ b
    iso_defect = max(
        float(np.abs(s - blk).max(initial=0.0))
        for s, blk in zip(ksum, support_blocks))
    residual = max(iso_defect, xi_defect)
    if residual > INTERTWINE_TOL:
        raise PurificationError(
            f"purification inconsistent: intertwining residual {residual:.3e}")

    complement = Element(algebra, tuple(np.eye(n) - b for n, b in
                                        zip(algebra.block_dims, p.blocks)))
    corrected = [a @ p for a in kraus_elements if (a @ p).norm() > 1e-12]
    if complement.norm() > 1e-12:
        corrected.append(complement)
    if not corrected:
        corrected.append(p)

    # Exact unitalization: right-multiply by the inverse square root of the
    # Kraus sum (perturbs the composition by at most the isometry defect).
    total = [np.zeros((n, n), dtype=np.complex128) for n in algebra.block_dims]
    for a in corrected:
        for i, b in enumerate(a.blocks):
            total[i] = total[i] + b.conj().T @ b
    normalizers = tuple(_inverse_sqrt_pd(t) for t in total)
    corrected = [Element(algebra, tuple(b @ s for b, s in
                                        zip(a.blocks, normalizers)))
                 for a in corrected]
    channel = KrausMap(algebra, tuple(corrected))

    if with_diagnostics:
        diagnostics = {
            "multiplicity": k,
            "isometry_defect": iso_defect,
            "cyclic_vector_defect": xi_defect,
            "intertwining_residual": residual,
            "unitality_defect": channel.unitality_defect(),
            "carrier_dim": gns_data.carrier_dim,
            "feasibility_residual": outcome.residual,
        }
        return channel, diagnostics
    return channel
