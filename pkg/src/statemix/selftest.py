"""Seeded acceptance suites exercising the package end to end.

Each suite generates its own instances from a per-suite seed stream,
evaluates one acceptance criterion at its stated tolerance and reports a
single pass/fail line.  Decision calls inside the suites run with a
widened indeterminate band (``ETA_ACC``) so that exactly-constructed yes
instances clear the margin filters of the criteria; the generators place
no-instances far outside every band (violations of at least 1e-2).
"""

import time
from dataclasses import dataclass

import numpy as np

from .algebra import Element, Ideal, identity_element
from .channels import apply_kraus, choi_of, kraus_from_choi, random_elementary
from .exact_channel import construct_exact_channel, extension_feasible
from .functionals import (
    Functional,
    evaluate,
    ideal_norm,
    jordan_decompose,
    restrict_to_center,
)
from .numerics import eigh_hermitian
from .oracle import (
    choi_membership_oracle,
    random_algebra,
    random_hermitian,
    random_state,
    variational_ideal_norm,
)
from .reachability import (
    build_transport_map,
    check_hermitian_reachable,
    check_hermitian_reachable_general,
    check_more_mixed,
    check_state_reachable,
    derive_central_scalings,
    is_maximally_mixed,
)

ETA_ACC = 1e-7


@dataclass
class CriterionResult:
    index: int
    name: str
    passed: bool
    details: str
    elapsed: float

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] criterion {self.index} ({self.name}): "
                f"{self.details} [{self.elapsed:.1f}s]")


def _seq(seed, *key):
    return np.random.SeedSequence(entropy=seed, spawn_key=key)


def _rng(seed, *key):
    return np.random.default_rng(_seq(seed, *key))


def _random_element(algebra, rng):
    blocks = tuple(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
                   for n in algebra.block_dims)
    return Element(algebra, blocks)


def _block_trace_data(omega):
    pair = jordan_decompose(omega)
    pos = restrict_to_center(pair.positive_part).real_values()
    neg = restrict_to_center(pair.negative_part).real_values()
    return pos - neg, pos + neg


def _reachable_hermitian_pair(seed, *key):
    """A hermitian pair satisfying the center and weighted-norm conditions."""
    rng = _rng(seed, *key, 0)
    algebra = random_algebra(_seq(seed, *key, 1))
    omega = random_hermitian(algebra, _seq(seed, *key, 2))
    traces, norms = _block_trace_data(omega)
    target_norms = []
    for n, t, nu in zip(algebra.block_dims, traces, norms):
        if n == 1:
            target_norms.append(abs(t))
        else:
            slack = max(nu - abs(t), 0.0)
            target_norms.append(abs(t) + float(rng.uniform(0.0, 1.0)) * slack)
    rho = random_hermitian(algebra, _seq(seed, *key, 3),
                           traces=traces.tolist(), trace_norms=target_norms)
    return algebra, omega, rho


def _state_pair(seed, j, floor=0.25):
    """State pair: even j share the center restriction, odd j are detuned.

    Detuning moves at least 0.01 of mass between two blocks, far outside
    every decision band and the oracle's blind zone.  The conditioning
    floor keeps the oracle's convergence radius healthy.
    """
    algebra = random_algebra(_seq(seed, 2, j, 0))
    omega = random_state(algebra, _seq(seed, 2, j, 2), floor=floor)
    centers = restrict_to_center(omega).real_values()
    want_no = (j % 2 == 1) and algebra.num_blocks >= 2
    if not want_no:
        rho = random_state(algebra, _seq(seed, 2, j, 3), center=centers.tolist(),
                           floor=floor)
        return algebra, omega, rho, "yes"
    rng = _rng(seed, 2, j, 1)
    k = int(np.argmax(centers))
    others = [i for i in range(algebra.num_blocks) if i != k]
    l = others[int(rng.integers(0, len(others)))]
    delta = float(rng.uniform(0.01, min(0.3, centers[k])))
    shifted = centers.copy()
    shifted[k] -= delta
    shifted[l] += delta
    rho = random_state(algebra, _seq(seed, 2, j, 3), center=shifted.tolist(),
                       floor=floor)
    return algebra, omega, rho, "no"


def criterion_1(seed):
    """Transport construction on 200 reachable hermitian pairs."""
    start = time.time()
    worst_unital = 0.0
    worst_psd = 0.0
    worst_comp = 0.0
    count = 200
    for j in range(count):
        algebra, omega, rho = _reachable_hermitian_pair(seed, 1, j)
        psi = build_transport_map(omega, rho, eta=ETA_ACC)
        unit = psi.apply(identity_element(algebra))
        worst_unital = max(worst_unital, max(
            float(np.abs(b - np.eye(n)).max(initial=0.0))
            for b, n in zip(unit.blocks, algebra.block_dims)))
        for c in psi.choi_blocks:
            w, _ = eigh_hermitian((c + c.conj().T) / 2)
            worst_psd = max(worst_psd, max(0.0, -float(w[-1])))
        rng = _rng(seed, 1, j, 9)
        for _ in range(50):
            x = _random_element(algebra, rng)
            err = abs(evaluate(omega, psi.apply(x)) - evaluate(rho, x))
            worst_comp = max(worst_comp, err / max(x.norm(), 1e-12))
    elapsed = time.time() - start
    passed = (worst_unital <= 1e-9 and worst_psd <= 1e-9
              and worst_comp <= 1e-8 and elapsed < 10.0)
    details = (f"{count} pairs, unitality {worst_unital:.1e}, "
               f"min-eig defect {worst_psd:.1e}, composition {worst_comp:.1e}")
    return CriterionResult(1, "transport construction", passed, details, elapsed)


def criterion_2(seed):
    """States: closed forms and the membership oracle agree on 100 pairs."""
    start = time.time()
    disagreements = 0
    low_margin = 0
    count = 100
    for j in range(count):
        algebra, omega, rho, _ = _state_pair(seed, j)
        d1 = check_more_mixed(omega, rho, eta=ETA_ACC)
        d2 = check_state_reachable(omega, rho, eta=ETA_ACC)
        if abs(d2.margin) < 1e-8:
            low_margin += 1
            continue
        rep = choi_membership_oracle(omega, rho)
        oracle_verdict = {"feasible": "yes", "infeasible": "no"}.get(
            rep.verdict, "indeterminate")
        if not (d1.verdict == d2.verdict == oracle_verdict):
            disagreements += 1
    elapsed = time.time() - start
    passed = disagreements == 0 and low_margin == 0 and elapsed < 60.0
    details = (f"{count} pairs, {disagreements} disagreements, "
               f"{low_margin} below margin filter")
    return CriterionResult(2, "state reachability biconditional", passed,
                           details, elapsed)


def _hermitian_pair_mixed(seed, j):
    kind = j % 4
    if kind in (0, 1):
        return _reachable_hermitian_pair(seed, 3, j)
    algebra = random_algebra(_seq(seed, 3, j, 1))
    omega = random_hermitian(algebra, _seq(seed, 3, j, 2))
    if kind == 2:
        rho = random_hermitian(algebra, _seq(seed, 3, j, 3))
        return algebra, omega, rho
    traces, norms = _block_trace_data(omega)
    rng = _rng(seed, 3, j, 4)
    bumpable = [i for i, n in enumerate(algebra.block_dims) if n >= 2]
    if bumpable:
        # matched traces, trace norm pushed above the source on one block
        bumped = [abs(t) if n == 1 else nu for t, nu, n in
                  zip(traces, norms, algebra.block_dims)]
        i = bumpable[int(rng.integers(0, len(bumpable)))]
        bumped[i] = norms[i] + float(rng.uniform(1e-2, 0.5))
        rho = random_hermitian(algebra, _seq(seed, 3, j, 3),
                               traces=traces.tolist(), trace_norms=bumped)
    else:
        # abelian algebra: detune the traces instead
        shifted = traces + rng.uniform(0.01, 0.5, traces.size)
        rho = random_hermitian(algebra, _seq(seed, 3, j, 3),
                               traces=shifted.tolist(),
                               trace_norms=np.abs(shifted).tolist())
    return algebra, omega, rho


def criterion_3(seed):
    """Hermitian reachability: weighted-norm and Jordan-split forms agree."""
    start = time.time()
    mismatches = 0
    witness_fail = 0
    yes_count = 0
    count = 200
    for j in range(count):
        algebra, omega, rho = _hermitian_pair_mixed(seed, j)
        da = check_hermitian_reachable(omega, rho, eta=ETA_ACC)
        db = check_hermitian_reachable_general(omega, rho, eta=ETA_ACC)
        if min(abs(da.margin), abs(db.margin)) < 1e-9:
            continue
        if da.verdict != db.verdict:
            mismatches += 1
            continue
        if db.verdict == "yes":
            yes_count += 1
            rho1 = db.certificate["rho1"]
            rho2 = db.certificate["rho2"]
            diff = rho1 - rho2 - rho
            recon = max(float(np.abs(d).max(initial=0.0)) for d in diff.densities)
            omega_parts = jordan_decompose(omega)
            aw = restrict_to_center(omega_parts.positive_part).real_values()
            bw = restrict_to_center(omega_parts.negative_part).real_values()
            m1 = restrict_to_center(rho1).real_values()
            m2 = restrict_to_center(rho2).real_values()
            mass_gap = max(abs(float(m1.sum() - aw.sum())),
                           abs(float(m2.sum() - bw.sum())))
            ideal_gap = max(float(np.clip(m1 - aw, 0.0, None).max(initial=0.0)),
                            float(np.clip(m2 - bw, 0.0, None).max(initial=0.0)))
            ok = (recon <= 1e-9 and mass_gap <= 1e-9 and ideal_gap <= 1e-9
                  and rho1.is_positive(1e-9) and rho2.is_positive(1e-9))
            if not ok:
                witness_fail += 1
    elapsed = time.time() - start
    passed = mismatches == 0 and witness_fail == 0 and yes_count >= 40
    details = (f"{count} pairs, {mismatches} verdict mismatches, "
               f"{yes_count} yes instances, {witness_fail} witness failures")
    return CriterionResult(3, "hermitian criteria equivalence", passed,
                           details, elapsed)


def criterion_4(seed):
    """Exact channel pipeline on 50 feasible pairs plus verdict coincidence."""
    start = time.time()
    worst_unital = 0.0
    worst_comp = 0.0
    coincide_fail = 0
    built = 0
    for j in range(50):
        algebra = random_algebra(_seq(seed, 4, j, 0))
        omega = random_state(algebra, _seq(seed, 4, j, 1), floor=0.25)
        centers = restrict_to_center(omega).real_values()
        rho = random_state(algebra, _seq(seed, 4, j, 2), center=centers.tolist(),
                           floor=0.25)
        channel = construct_exact_channel(omega, rho)
        built += 1
        worst_unital = max(worst_unital, channel.unitality_defect())
        rng = _rng(seed, 4, j, 3)
        for _ in range(20):
            x = _random_element(algebra, rng)
            err = abs(evaluate(omega, apply_kraus(channel, x)) - evaluate(rho, x))
            worst_comp = max(worst_comp, err / max(x.norm(), 1e-12))
    for j in range(25):
        algebra, omega, rho, _ = _state_pair(seed * 7 + 13, j)
        dec = check_state_reachable(omega, rho, eta=ETA_ACC)
        if abs(dec.margin) < 1e-7:
            continue
        out = extension_feasible(omega, rho)
        verdict = {"feasible": "yes", "infeasible": "no"}.get(
            out.status, "indeterminate")
        if verdict != dec.verdict:
            coincide_fail += 1
    elapsed = time.time() - start
    passed = (built == 50 and worst_unital <= 1e-8 and worst_comp <= 1e-7
              and coincide_fail == 0)
    details = (f"{built} channels, unitality {worst_unital:.1e}, "
               f"composition {worst_comp:.1e}, "
               f"{coincide_fail} coincidence failures")
    return CriterionResult(4, "exact channel pipeline", passed, details, elapsed)


def criterion_5(seed):
    """Jordan norm additivity and the central-scaling identities."""
    start = time.time()
    worst_norm = 0.0
    worst_identity = 0.0
    scaling_checked = 0
    for j in range(200):
        algebra = random_algebra(_seq(seed, 5, j, 0))
        omega = random_hermitian(algebra, _seq(seed, 5, j, 1))
        pair = jordan_decompose(omega)
        mass = (restrict_to_center(pair.positive_part).real_values().sum()
                + restrict_to_center(pair.negative_part).real_values().sum())
        worst_norm = max(worst_norm, abs(omega.norm() - float(mass)))
    for j in range(100):
        algebra, omega, rho = _reachable_hermitian_pair(seed, 5, 1000 + j)
        scalings = derive_central_scalings(omega, rho, eta=ETA_ACC)
        omega_parts = jordan_decompose(omega)
        rho_parts = jordan_decompose(rho)
        aw = restrict_to_center(omega_parts.positive_part).real_values()
        bw = restrict_to_center(omega_parts.negative_part).real_values()
        ar = restrict_to_center(rho_parts.positive_part).real_values()
        br = restrict_to_center(rho_parts.negative_part).real_values()
        cp = scalings.c_plus.real_values()
        cm = scalings.c_minus.real_values()
        pp = scalings.p_plus_central.real_values()
        pm = scalings.p_minus_central.real_values()
        worst_identity = max(
            worst_identity,
            float(np.abs(ar - cp * aw).max(initial=0.0)),
            float(np.abs(br - cm * bw).max(initial=0.0)),
            float(np.abs((pp - cp) * aw - (pm - cm) * bw).max(initial=0.0)),
        )
        scaling_checked += 1
    elapsed = time.time() - start
    passed = worst_norm <= 1e-10 and worst_identity <= 1e-10
    details = (f"norm additivity {worst_norm:.1e} on 200 draws, scaling "
               f"identities {worst_identity:.1e} on {scaling_checked} pairs")
    return CriterionResult(5, "Jordan and central-scaling identities", passed,
                           details, elapsed)


def criterion_6(seed):
    """Maximal mixedness and reachability symmetry for states."""
    start = time.time()
    failures = 0
    asym = 0
    for j in range(100):
        algebra = random_algebra(_seq(seed, 6, j, 0))
        if j % 5 == 0:
            rng = _rng(seed, 6, j, 1)
            weights = rng.uniform(0.2, 1.0, algebra.num_blocks)
            weights = weights / weights.sum()
            dens = tuple(w * np.eye(n) / n for w, n in
                         zip(weights, algebra.block_dims))
            omega = Functional(algebra, dens)
        else:
            omega = random_state(algebra, _seq(seed, 6, j, 1))
        if not is_maximally_mixed(omega).is_yes:
            failures += 1
    for j in range(100):
        algebra, omega, rho, _ = _state_pair(seed * 31 + 7, j)
        fwd = check_state_reachable(omega, rho, eta=ETA_ACC).verdict
        bwd = check_state_reachable(rho, omega, eta=ETA_ACC).verdict
        if fwd != bwd:
            asym += 1
    elapsed = time.time() - start
    passed = failures == 0 and asym == 0
    details = (f"100 states all maximally mixed ({failures} failures), "
               f"symmetry violated {asym} times on 100 pairs")
    return CriterionResult(6, "maximal mixedness and symmetry", passed,
                           details, elapsed)


def criterion_7(seed):
    """Oracle integrity: variational norms and Kraus/Choi roundtrips."""
    start = time.time()
    worst_gap = 0.0
    for j in range(500):
        algebra = random_algebra(_seq(seed, 7, j, 0))
        omega = random_hermitian(algebra, _seq(seed, 7, j, 1))
        rng = _rng(seed, 7, j, 2)
        size = int(rng.integers(0, algebra.num_blocks + 1))
        support = frozenset(int(i) for i in
                            rng.choice(algebra.num_blocks, size=size,
                                       replace=False))
        ideal = Ideal(algebra, support)
        closed = ideal_norm(omega, ideal)
        lower = variational_ideal_norm(omega, ideal, samples=16,
                                       seed=_seq(seed, 7, j, 3))
        worst_gap = max(worst_gap, abs(closed - lower))
    worst_round = 0.0
    for j in range(100):
        algebra = random_algebra(_seq(seed, 7, 1000 + j, 0))
        rng = _rng(seed, 7, 1000 + j, 1)
        k = int(rng.integers(1, 4))
        phi = random_elementary(algebra, k, _seq(seed, 7, 1000 + j, 2))
        choi = choi_of(phi)
        back = choi_of(kraus_from_choi(choi))
        worst_round = max(worst_round, max(
            float(np.abs(a - b).max(initial=0.0))
            for a, b in zip(choi.choi_blocks, back.choi_blocks)))
    elapsed = time.time() - start
    passed = worst_gap <= 1e-9 and worst_round <= 1e-9
    details = (f"variational gap {worst_gap:.1e} on 500 ideals, roundtrip "
               f"residual {worst_round:.1e} on 100 maps")
    return CriterionResult(7, "oracle integrity", passed, details, elapsed)


SUITES = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
}


def run_selftest(seed=42, criteria=None, echo=print):
    """Run the acceptance suites; returns the list of results."""
    chosen = sorted(criteria) if criteria else sorted(SUITES)
    results = []
    for idx in chosen:
        result = SUITES[idx](seed)
        results.append(result)
        if echo:
            echo(result.line())
    if echo:
        failed = [r.index for r in results if not r.passed]
        total = sum(r.elapsed for r in results)
        if failed:
            echo(f"selftest: FAILED criteria {failed} ({total:.1f}s)")
        else:
            echo(f"selftest: all {len(results)} criteria passed ({total:.1f}s)")
    return results
