"""Decision procedures and constructive witnesses for the mixing preorder.

A functional ``rho`` is reachable from ``omega`` when some unital
completely positive center-module map composes ``omega`` into ``rho``.  On
a direct sum of matrix blocks the criteria reduce to per-block scalars:

* positive functionals: equal total mass and restriction-norm monotonicity
  over every ideal (blockwise masses suffice);
* states: equal center restrictions;
* hermitian functionals: equal center restrictions and trace-norm
  monotonicity under every positive central weight (blockwise trace norms
  suffice), equivalently a Jordan-split into positive witnesses with the
  masses of the two parts pinned blockwise.

Margins follow one convention: ``margin = eta - violation`` where
``violation`` is the largest constraint violation of the instance (0 when
all hold) and ``eta`` is the indeterminate band width.  Yes-verdicts have
margin in ``(0, eta]``, clear no-verdicts have margin close to
``-violation``.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algebra import CenterElement, Element, Ideal, enumerate_ideals
from .channels import ModuleMapChoi
from .functionals import (
    Functional,
    ideal_norm,
    jordan_decompose,
    restrict_to_center,
    support_projection,
)
from .numerics import eigh_hermitian

ETA_DEC = 1e-9


@dataclass
class Decision:
    verdict: str  # "yes" | "no" | "indeterminate"
    margin: float
    certificate: Optional[dict]
    explanation: str
    criterion: str

    @property
    def is_yes(self):
        return self.verdict == "yes"


@dataclass
class CentralScalings:
    """Blockwise scalings linking the Jordan parts of the two functionals."""

    c_plus: CenterElement
    c_minus: CenterElement
    p_plus_central: CenterElement
    p_minus_central: CenterElement


def _default_eta(omega, rho, eta):
    if eta is not None:
        return float(eta)
    return ETA_DEC * max(omega.norm(), rho.norm(), 1.0)


def _block_masses(omega):
    return np.array([float(d.trace().real) for d in omega.densities])


def _block_trace_norms(omega):
    out = []
    for d in omega.densities:
        w, _ = eigh_hermitian((d + d.conj().T) / 2)
        out.append(float(np.abs(w).sum()))
    return np.array(out)


def _block_jordan_masses(omega):
    pos = []
    neg = []
    for d in omega.densities:
        w, _ = eigh_hermitian((d + d.conj().T) / 2)
        pos.append(float(np.clip(w, 0.0, None).sum()))
        neg.append(float(np.clip(-w, 0.0, None).sum()))
    return np.array(pos), np.array(neg)


def check_more_mixed(omega, rho, eta=None, method="blockwise"):
    """Mixing comparison for positive functionals.

    Yes exactly when the total masses agree and the restriction norm of
    ``rho`` never exceeds that of ``omega`` on any ideal.  The blockwise
    method checks singleton ideals (exact by additivity); the enumerate
    method walks the full ideal lattice and must agree.
    """
    if omega.algebra != rho.algebra:
        raise ValueError("algebra mismatch")
    if not omega.is_positive() or not rho.is_positive():
        raise ValueError("inputs must be positive functionals")
    eta = _default_eta(omega, rho, eta)

    mw = _block_masses(omega)
    mr = _block_masses(rho)
    viol_total = abs(float(mr.sum() - mw.sum()))

    if method == "blockwise":
        excess = mr - mw
        worst_support = frozenset(int(i) for i in np.flatnonzero(excess > 0))
        viol_ideal = float(np.clip(excess, 0.0, None).sum())
    elif method == "enumerate":
        lattice = enumerate_ideals(omega.algebra)
        viol_ideal = 0.0
        worst_support = frozenset()
        for ideal in lattice.ideals:
            gap = ideal_norm(rho, ideal) - ideal_norm(omega, ideal)
            if gap > viol_ideal:
                viol_ideal = gap
                worst_support = ideal.support
    else:
        raise ValueError("method must be 'blockwise' or 'enumerate'")

    viol = max(viol_total, viol_ideal)
    margin = eta - viol
    if viol <= eta:
        return Decision(
            verdict="yes",
            margin=margin,
            certificate=None,
            explanation=(
                "total masses agree and the restriction norm never grows on "
                "any ideal, so the target lies in the mixing closure of the "
                "source"),
            criterion="ideal-norm-criterion",
        )
    if viol_ideal >= viol_total:
        certificate = {"kind": "violating_ideal",
                       "ideal": Ideal(omega.algebra, worst_support),
                       "excess": viol_ideal}
        reason = "the restriction norm grows on the certified ideal"
    else:
        certificate = {"kind": "mass_mismatch",
                       "source_mass": float(mw.sum()),
                       "target_mass": float(mr.sum())}
        reason = "total masses differ"
    return Decision(
        verdict="no",
        margin=margin,
        certificate=certificate,
        explanation=reason,
        criterion="ideal-norm-criterion",
    )


def check_state_reachable(omega, rho, eta=None):
    """Mixing comparison for states: equal center restrictions decide."""
    if omega.algebra != rho.algebra:
        raise ValueError("algebra mismatch")
    if not omega.is_state() or not rho.is_state():
        raise ValueError("inputs must be states")
    eta = _default_eta(omega, rho, eta)
    mw = restrict_to_center(omega).real_values()
    mr = restrict_to_center(rho).real_values()
    gaps = np.abs(mr - mw)
    viol = float(gaps.max(initial=0.0))
    margin = eta - viol
    if viol <= eta:
        return Decision(
            verdict="yes",
            margin=margin,
            certificate=None,
            explanation=(
                "the center restrictions coincide blockwise, which decides "
                "reachability between states in both directions"),
            criterion="center-restriction-criterion",
        )
    worst = int(np.argmax(gaps))
    return Decision(
        verdict="no",
        margin=margin,
        certificate={"kind": "center_mismatch", "block": worst,
                     "source_mass": float(mw[worst]),
                     "target_mass": float(mr[worst])},
        explanation="the center restrictions differ on the certified block",
        criterion="center-restriction-criterion",
    )


def check_hermitian_reachable(omega, rho, eta=None):
    """Reachability for hermitian functionals via center and weighted norms.

    Yes exactly when the per-block traces agree and the per-block trace
    norms of the target never exceed those of the source (the blockwise
    form of norm monotonicity under every positive central weight).
    """
    if omega.algebra != rho.algebra:
        raise ValueError("algebra mismatch")
    if not omega.is_hermitian() or not rho.is_hermitian():
        raise ValueError("inputs must be hermitian functionals")
    eta = _default_eta(omega, rho, eta)

    tw = _block_masses(omega)
    tr = _block_masses(rho)
    nw = _block_trace_norms(omega)
    nr = _block_trace_norms(rho)

    center_gap = np.abs(tr - tw)
    norm_excess = nr - nw
    viol = max(float(center_gap.max(initial=0.0)),
               float(np.clip(norm_excess, 0.0, None).max(initial=0.0)))
    margin = eta - viol
    if viol <= eta:
        return Decision(
            verdict="yes",
            margin=margin,
            certificate=None,
            explanation=(
                "center restrictions agree and every center-weighted norm "
                "of the target is dominated by that of the source"),
            criterion="center-norm-criterion",
        )
    if float(center_gap.max(initial=0.0)) >= float(norm_excess.max(initial=0.0)):
        worst = int(np.argmax(center_gap))
        certificate = {"kind": "center_mismatch", "block": worst,
                       "source_trace": float(tw[worst]),
                       "target_trace": float(tr[worst])}
        reason = "the center restrictions differ on the certified block"
    else:
        worst = int(np.argmax(norm_excess))
        weight = [0.0] * omega.algebra.num_blocks
        weight[worst] = 1.0
        certificate = {"kind": "violating_center_weight",
                       "weight": CenterElement(omega.algebra, tuple(weight)),
                       "block": worst,
                       "source_trace_norm": float(nw[worst]),
                       "target_trace_norm": float(nr[worst])}
        reason = ("the trace norm of the target exceeds that of the source "
                  "under the certified center weight")
    return Decision(
        verdict="no",
        margin=margin,
        certificate=certificate,
        explanation=reason,
        criterion="center-norm-criterion",
    )


def check_hermitian_reachable_general(omega, rho, eta=None):
    """Reachability via a Jordan split into positive witnesses.

    Yes exactly when positive functionals ``rho1, rho2`` exist with
    ``rho = rho1 - rho2``, masses pinned to the Jordan parts of the source,
    and restriction norms dominated by them on every ideal.  Blockwise this
    is: positive-part mass, negative-part mass and trace of the target
    dominated by / equal to those of the source on each block.  The returned
    witnesses are the spectral parts of the target plus a positive filler
    supported on the positive part of the source.
    """
    if omega.algebra != rho.algebra:
        raise ValueError("algebra mismatch")
    if not omega.is_hermitian() or not rho.is_hermitian():
        raise ValueError("inputs must be hermitian functionals")
    eta = _default_eta(omega, rho, eta)

    aw, bw = _block_jordan_masses(omega)
    ar, br = _block_jordan_masses(rho)
    tw = aw - bw
    tr = ar - br

    viol = max(
        float(np.clip(ar - aw, 0.0, None).max(initial=0.0)),
        float(np.clip(br - bw, 0.0, None).max(initial=0.0)),
        float(np.abs(tr - tw).max(initial=0.0)),
    )
    margin = eta - viol
    if viol > eta:
        return Decision(
            verdict="no",
            margin=margin,
            certificate={"kind": "jordan_mass_violation",
                         "positive_excess": (ar - aw).tolist(),
                         "negative_excess": (br - bw).tolist(),
                         "trace_gap": (tr - tw).tolist()},
            explanation=(
                "no positive split of the target can match the blockwise "
                "masses of the source's Jordan parts"),
            criterion="jordan-split-criterion",
        )

    pair = jordan_decompose(rho)
    p_plus = support_projection(jordan_decompose(omega).positive_part)
    filler = []
    for i, blk in enumerate(p_plus.blocks):
        rank = float(blk.trace().real)
        s = max(float(aw[i] - ar[i]), 0.0)
        if s > 0 and rank > 0.5:
            filler.append(blk * (s / rank))
        else:
            filler.append(np.zeros_like(blk))
    filler = Functional(omega.algebra, tuple(filler))
    rho1 = pair.positive_part + filler
    rho2 = pair.negative_part + filler
    return Decision(
        verdict="yes",
        margin=margin,
        certificate={"kind": "jordan_witnesses", "rho1": rho1, "rho2": rho2},
        explanation=(
            "the target splits into positive witnesses whose blockwise "
            "masses match the source's Jordan parts exactly"),
        criterion="jordan-split-criterion",
    )


def derive_central_scalings(omega, rho, eta=None):
    """Blockwise scalings between the Jordan parts of two reachable functionals.

    Requires the hermitian reachability criterion to hold; returns central
    elements ``c_plus, c_minus`` and the central supports ``p_plus,
    p_minus`` of the source's parts with ``rho_+|Z = c_+ omega_+|Z``,
    ``rho_-|Z = c_- omega_-|Z`` and ``(p_+ - c_+) omega_+|Z =
    (p_- - c_-) omega_-|Z``.  Off the supports the scalings are set to 0.
    """
    decision = check_hermitian_reachable(omega, rho, eta)
    if not decision.is_yes:
        raise ValueError("central scalings need the reachability criterion "
                         "to hold: " + decision.explanation)
    eta = _default_eta(omega, rho, eta)
    aw, bw = _block_jordan_masses(omega)
    ar, br = _block_jordan_masses(rho)

    def ratios(numer, denom):
        vals = []
        supp = []
        for x, y in zip(numer, denom):
            if y > eta:
                vals.append(min(float(x / y), 1.0))
                supp.append(1.0)
            else:
                vals.append(0.0)
                supp.append(0.0)
        return vals, supp

    c_plus, p_plus = ratios(ar, aw)
    c_minus, p_minus = ratios(br, bw)
    algebra = omega.algebra
    return CentralScalings(
        c_plus=CenterElement(algebra, tuple(c_plus)),
        c_minus=CenterElement(algebra, tuple(c_minus)),
        p_plus_central=CenterElement(algebra, tuple(p_plus)),
        p_minus_central=CenterElement(algebra, tuple(p_minus)),
    )


def build_transport_map(omega, rho, eta=None):
    """Explicit unital completely positive module map composing one
    hermitian functional into another.

    The map mixes the central decompositions of the target's Jordan parts:
    on the support of the source's positive part (scaled by ``c_plus``) it
    reads off the target's positive part, elsewhere the negative part plus
    a normalized block trace filling the blocks missed by the source's
    negative part.  Its range lies in the commutative algebra generated by
    the center and one projection, so positivity of the ingredients makes
    it completely positive.  Raises when the reachability criterion fails.
    """
    decision = check_hermitian_reachable(omega, rho, eta)
    if not decision.is_yes:
        raise ValueError("transport construction needs the center and "
                         "weighted-norm conditions: " + decision.explanation)

    algebra = omega.algebra
    omega_parts = jordan_decompose(omega)
    rho_parts = jordan_decompose(rho)
    scalings = derive_central_scalings(omega, rho, eta)

    p_plus = support_projection(omega_parts.positive_part)
    c_plus = scalings.c_plus.real_values()
    p_minus_central = scalings.p_minus_central.real_values()

    mu_plus = restrict_to_center(rho_parts.positive_part).real_values()
    mu_minus = restrict_to_center(rho_parts.negative_part).real_values()
    eta_val = _default_eta(omega, rho, eta)

    choi_blocks = []
    for i, n in enumerate(algebra.block_dims):
        dplus = rho_parts.positive_part.densities[i]
        dminus = rho_parts.negative_part.densities[i]
        f = dplus / mu_plus[i] if mu_plus[i] > eta_val else np.zeros((n, n))
        g = dminus / mu_minus[i] if mu_minus[i] > eta_val else np.zeros((n, n))
        g = g + ((1.0 - p_minus_central[i]) / n) * np.eye(n)
        a = c_plus[i] * p_plus.blocks[i]
        b = np.eye(n) - a
        choi_blocks.append(np.kron(a.T, f) + np.kron(b.T, g))
    return ModuleMapChoi(algebra, tuple(choi_blocks))


def is_maximally_mixed(omega, annihilated_ideal=None, eta=None, tol=1e-9):
    """Maximal mixedness of a state, optionally relative to a quotient.

    On a finite-dimensional algebra the strong radical (the intersection of
    the maximal ideals, one per block) is zero, every state annihilates it,
    and the symmetric center criterion for states makes every state
    maximally mixed; when an annihilated ideal is supplied the same
    argument runs on the quotient algebra obtained by dropping its blocks.
    """
    if not omega.is_state():
        raise ValueError("input must be a state")
    algebra = omega.algebra
    if annihilated_ideal is not None:
        if annihilated_ideal.algebra != algebra:
            raise ValueError("algebra mismatch")
        for i in annihilated_ideal.support:
            if np.abs(omega.densities[i]).max(initial=0.0) > tol:
                raise ValueError("state does not annihilate the given ideal")
        surviving = [i for i in range(algebra.num_blocks)
                     if i not in annihilated_ideal.support]
        quotient_note = (f" after passing to the quotient over blocks "
                         f"{sorted(annihilated_ideal.support)} the algebra "
                         f"keeps blocks {surviving};")
    else:
        quotient_note = ""

    lattice = enumerate_ideals(algebra) if algebra.num_blocks <= 20 else None
    if lattice is not None:
        radical = lattice.strong_radical
        radical_mass = ideal_norm(omega, radical)
    else:
        radical = Ideal(algebra, frozenset())
        radical_mass = 0.0

    eta = eta if eta is not None else ETA_DEC * max(omega.norm(), 1.0)
    explanation = (
        "the strong radical (intersection of the maximal ideals, one per "
        "block) is zero, the state annihilates it, and the block index "
        "space is Hausdorff so the center criterion is symmetric between "
        "any two states;" + quotient_note +
        " hence the state is maximally mixed")
    return Decision(
        verdict="yes",
        margin=eta - radical_mass,
        certificate={"kind": "strong_radical",
                     "support": sorted(radical.support),
                     "mass_on_radical": radical_mass},
        explanation=explanation,
        criterion="strong-radical-criterion",
    )
