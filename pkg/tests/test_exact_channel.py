import numpy as np
import pytest

from statemix import (
    Functional,
    apply_kraus,
    check_state_reachable,
    construct_exact_channel,
    evaluate,
    extension_feasible,
    gns,
    restrict_to_center,
    validate_algebra,
)
from statemix.algebra import Element
from statemix.numerics import FeasibilityProblem, dykstra_feasibility
from statemix.oracle import hermitian_basis, random_algebra, random_state
from statemix.selftest import _seq


def random_element(algebra, rng):
    return Element(algebra, tuple(
        rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        for n in algebra.block_dims))


def test_gns_full_rank_doubling():
    algebra = validate_algebra([2])
    omega = Functional(algebra, (np.diag([0.5, 0.5]),))
    data = gns(omega)
    assert data.carrier_dim == 4
    assert data.block_ranks == (2,)
    assert len(data.commutant_basis()) == 4


def test_gns_pure_state():
    algebra = validate_algebra([2])
    omega = Functional(algebra, (np.diag([1.0, 0.0]),))
    data = gns(omega)
    assert data.carrier_dim == 2
    assert data.block_ranks == (1,)
    assert len(data.commutant_basis()) == 1


def test_gns_kernel_block():
    algebra = validate_algebra([2, 1])
    omega = Functional(algebra, (np.diag([0.6, 0.4]), np.array([[0.0]])))
    data = gns(omega)
    assert data.kernel_ideal.support == frozenset({1})
    assert data.carrier_dim == 4


def test_gns_invariants_random():
    rng = np.random.default_rng(0)
    for j in range(100):
        algebra = random_algebra(_seq(1234, j))
        omega = random_state(algebra, _seq(1234, j, 1))
        data = gns(omega)
        xi = data.cyclic_vector
        for _ in range(3):
            x = random_element(algebra, rng)
            pairing = np.vdot(xi, data.represent(x) @ xi)
            assert abs(pairing - evaluate(omega, x)) < 1e-10
        # commutant basis commutes with the representation
        y_list = data.commutant_basis()
        x = random_element(algebra, rng)
        rep = data.represent(x)
        for y in y_list[:4]:
            assert np.abs(rep @ y - y @ rep).max() < 1e-12
        # cyclicity: translates of the cyclic vector span the carrier
        vectors = [data.represent(random_element(algebra, rng)) @ xi
                   for _ in range(2 * data.carrier_dim)]
        rank = np.linalg.matrix_rank(np.array(vectors).T, tol=1e-10)
        assert rank == data.carrier_dim


def test_gns_rejects_non_state():
    algebra = validate_algebra([2])
    with pytest.raises(ValueError):
        gns(Functional(algebra, (np.diag([0.5, 0.4]),)))


def test_extension_factor_pure_source():
    # on a factor with a pure source the commutant is trivial and any
    # target is reachable
    algebra = validate_algebra([2])
    omega = Functional(algebra, (np.diag([1.0, 0.0]),))
    rho = random_state(algebra, 5)
    outcome = extension_feasible(omega, rho)
    assert outcome.status == "feasible"
    cert = outcome.certificate
    assert cert.density.shape == (2, 2)
    assert abs(float(cert.density.trace().real) - 1.0) < 1e-6


def test_extension_abelian_forces_equality():
    algebra = validate_algebra([1, 1])
    omega = Functional(algebra, (np.array([[0.5]]), np.array([[0.5]])))
    rho = Functional(algebra, (np.array([[0.7]]), np.array([[0.3]])))
    outcome = extension_feasible(omega, rho)
    assert outcome.status == "infeasible"
    same = extension_feasible(omega, omega)
    assert same.status == "feasible"


def test_extension_blockwise_faithful_equal_centers():
    algebra = validate_algebra([2, 2])
    omega = random_state(algebra, 1, floor=0.2)
    centers = restrict_to_center(omega).real_values()
    rho = random_state(algebra, 2, center=centers.tolist(), floor=0.2)
    assert extension_feasible(omega, rho).status == "feasible"


def test_extension_kernel_condition():
    algebra = validate_algebra([2, 2])
    omega = Functional(algebra, (np.diag([0.5, 0.5]), np.zeros((2, 2))))
    rho = Functional(algebra, (np.diag([0.25, 0.25]), np.diag([0.25, 0.25])))
    outcome = extension_feasible(omega, rho)
    assert outcome.status == "infeasible"
    assert "annihilated" in outcome.message
    with pytest.raises(ValueError, match="no extension certificate"):
        construct_exact_channel(omega, rho)


def test_extension_matches_state_reachability():
    for j in range(20):
        algebra = random_algebra(_seq(777, j))
        omega = random_state(algebra, _seq(777, j, 1), floor=0.25)
        if j % 2:
            centers = restrict_to_center(omega).real_values()
            rho = random_state(algebra, _seq(777, j, 2),
                               center=centers.tolist(), floor=0.25)
        else:
            rho = random_state(algebra, _seq(777, j, 2), floor=0.25)
        decision = check_state_reachable(omega, rho, eta=1e-7)
        if abs(decision.margin) < 1e-7:
            continue
        outcome = extension_feasible(omega, rho)
        expected = {"yes": "feasible", "no": "infeasible"}[decision.verdict]
        assert outcome.status == expected


def test_explicit_product_density_is_feasible():
    # the blockwise product of the target density with the source's GNS
    # commutant density satisfies the extension constraints; checking it
    # validates the constraint assembly independently of Dykstra
    algebra = validate_algebra([2, 2])
    omega = random_state(algebra, 41, floor=0.2)
    centers = restrict_to_center(omega).real_values()
    rho = random_state(algebra, 42, center=centers.tolist(), floor=0.2)
    data = gns(omega)
    t = np.zeros((data.carrier_dim, data.carrier_dim), dtype=complex)
    for i, (n, r) in enumerate(zip(algebra.block_dims, data.block_ranks)):
        o = data.block_offsets[i]
        lam = np.diag(data.eigenvalues[i])
        basis = data.eigenvectors[i]
        rho_block = basis.conj().T @ rho.densities[i] @ basis
        t[o:o + n * r, o:o + n * r] = np.kron(
            basis @ rho_block @ basis.conj().T, lam) / centers[i]
    xi = data.cyclic_vector
    for x_h in hermitian_basis(2):
        x = Element(algebra, (x_h, np.zeros((2, 2))))
        assert abs(np.trace(t @ data.represent(x)) - evaluate(rho, x)) < 1e-9
    for y in data.commutant_basis():
        assert abs(np.trace(t @ y) - np.vdot(xi, y @ xi)) < 1e-9
    w = np.linalg.eigvalsh(t)
    assert w.min() > -1e-12 and abs(w.sum() - 1.0) < 1e-9


def test_construct_pure_to_mixed():
    algebra = validate_algebra([2])
    omega = Functional(algebra, (np.diag([1.0, 0.0]),))
    rho = Functional(algebra, (np.diag([0.5, 0.5]),))
    channel, diagnostics = construct_exact_channel(omega, rho,
                                                   with_diagnostics=True)
    assert channel.unitality_defect() < 1e-8
    assert diagnostics["multiplicity"] >= 2
    rng = np.random.default_rng(3)
    for _ in range(20):
        x = random_element(algebra, rng)
        err = abs(evaluate(omega, apply_kraus(channel, x)) - evaluate(rho, x))
        assert err <= 1e-7 * max(x.norm(), 1.0)


def test_construct_identity_pair():
    algebra = validate_algebra([2, 2])
    omega = random_state(algebra, 13, floor=0.2)
    channel = construct_exact_channel(omega, omega)
    rng = np.random.default_rng(4)
    for _ in range(10):
        x = random_element(algebra, rng)
        err = abs(evaluate(omega, apply_kraus(channel, x)) - evaluate(omega, x))
        assert err <= 1e-7 * max(x.norm(), 1.0)


def test_construct_isometry_diagnostics():
    algebra = validate_algebra([2, 3])
    omega = random_state(algebra, 23, floor=0.25)
    centers = restrict_to_center(omega).real_values()
    rho = random_state(algebra, 24, center=centers.tolist(), floor=0.25)
    channel, diagnostics = construct_exact_channel(omega, rho,
                                                   with_diagnostics=True)
    assert diagnostics["isometry_defect"] <= 1e-9
    assert diagnostics["cyclic_vector_defect"] <= 1e-9
    assert diagnostics["unitality_defect"] <= 1e-8
    # Kraus operators are genuine block-diagonal algebra elements
    for op in channel.operators:
        assert len(op.blocks) == algebra.num_blocks
        for blk, n in zip(op.blocks, algebra.block_dims):
            assert blk.shape == (n, n)
