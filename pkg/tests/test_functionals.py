import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from statemix import (
    CenterElement,
    Functional,
    Ideal,
    central_decompose,
    evaluate,
    identity_element,
    ideal_norm,
    jordan_decompose,
    restrict_to_center,
    support_projection,
    validate_algebra,
    weighted_norm,
)
from statemix.algebra import Element
from statemix.oracle import random_hermitian, random_state


def hermitian_block(rng, n):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (g + g.conj().T) / 2


def test_evaluate_examples():
    algebra = validate_algebra([2])
    omega = Functional(algebra, (np.diag([0.5, 0.5]),))
    assert evaluate(omega, identity_element(algebra)) == pytest.approx(1.0)
    signed = Functional(algebra, (np.diag([0.5, -0.5]),))
    sign = Element(algebra, (np.diag([1.0, -1.0]),))
    assert evaluate(signed, sign) == pytest.approx(1.0)
    zero = Element(algebra, (np.zeros((2, 2)),))
    assert evaluate(signed, zero) == 0.0
    with pytest.raises(ValueError, match="mismatch"):
        evaluate(omega, identity_element(validate_algebra([3])))


def test_jordan_diagonal_split():
    algebra = validate_algebra([2])
    omega = Functional(algebra, (np.diag([0.75, -0.25]),))
    pair = jordan_decompose(omega)
    assert np.allclose(pair.positive_part.densities[0], np.diag([0.75, 0.0]))
    assert np.allclose(pair.negative_part.densities[0], np.diag([0.0, 0.25]))
    assert omega.norm() == pytest.approx(1.0)


def test_jordan_offdiagonal():
    algebra = validate_algebra([2])
    omega = Functional(algebra, (np.array([[0.0, 0.5], [0.5, 0.0]]),))
    pair = jordan_decompose(omega)
    assert float(pair.positive_part.densities[0].trace().real) == pytest.approx(0.5)
    assert float(pair.negative_part.densities[0].trace().real) == pytest.approx(0.5)


def test_jordan_positive_input():
    algebra = validate_algebra([2])
    omega = Functional(algebra, (np.diag([0.3, 0.7]),))
    pair = jordan_decompose(omega)
    assert np.abs(pair.negative_part.densities[0]).max() < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_jordan_invariants_random(seed):
    algebra = validate_algebra([2, 3])
    omega = random_hermitian(algebra, seed)
    pair = jordan_decompose(omega)
    diff = pair.positive_part - pair.negative_part - omega
    assert max(np.abs(d).max() for d in diff.densities) < 1e-10
    # orthogonal supports blockwise
    for dp, dm in zip(pair.positive_part.densities, pair.negative_part.densities):
        assert np.abs(dp @ dm).max() < 1e-10
    assert abs(omega.norm() - pair.total_norm) < 1e-10


def test_support_projection_examples():
    algebra = validate_algebra([2])
    omega = Functional(algebra, (np.diag([1.0, 0.0]),))
    p = support_projection(omega)
    assert np.allclose(p.blocks[0], np.diag([1.0, 0.0]))
    full = Functional(algebra, (np.diag([0.4, 0.6]),))
    assert np.allclose(support_projection(full).blocks[0], np.eye(2))
    two = validate_algebra([2, 2])
    partial = Functional(two, (np.diag([0.5, 0.5]), np.zeros((2, 2))))
    p = support_projection(partial)
    assert np.allclose(p.blocks[1], 0.0)
    ev = evaluate(partial, identity_element(two) - p)
    assert abs(ev) < 1e-10


def test_restrict_to_center_examples():
    algebra = validate_algebra([2, 1])
    omega = Functional(algebra, (np.diag([0.3, 0.3]), np.array([[0.4]])))
    assert np.allclose(restrict_to_center(omega).real_values(), [0.6, 0.4])
    signed = Functional(validate_algebra([2]), (np.diag([0.5, -0.5]),))
    assert np.allclose(restrict_to_center(signed).real_values(), [0.0])


def test_ideal_norm_examples():
    algebra = validate_algebra([2, 1])
    omega = Functional(algebra, (np.diag([0.3, 0.3]), np.array([[0.4]])))
    assert ideal_norm(omega, Ideal(algebra, frozenset({0}))) == pytest.approx(0.6)
    assert ideal_norm(omega, Ideal(algebra, frozenset())) == 0.0
    signed = Functional(validate_algebra([2]), (np.diag([0.5, -0.5]),))
    full = Ideal(signed.algebra, frozenset({0}))
    assert ideal_norm(signed, full) == pytest.approx(1.0)


def test_ideal_norm_monotone_and_additive():
    rng = np.random.default_rng(5)
    algebra = validate_algebra([2, 3, 2])
    omega = Functional(algebra, tuple(hermitian_block(rng, n)
                                      for n in algebra.block_dims))
    n01 = ideal_norm(omega, Ideal(algebra, frozenset({0, 1})))
    n0 = ideal_norm(omega, Ideal(algebra, frozenset({0})))
    n1 = ideal_norm(omega, Ideal(algebra, frozenset({1})))
    assert n0 <= n01 + 1e-12 and n1 <= n01 + 1e-12
    assert abs(n01 - n0 - n1) < 1e-12


def test_weighted_norm_examples():
    algebra = validate_algebra([2, 2])
    rng = np.random.default_rng(7)
    omega = Functional(algebra, (np.diag([0.5, -0.5]), hermitian_block(rng, 2)))
    ones = CenterElement(algebra, (1.0, 1.0))
    assert weighted_norm(omega, ones) == pytest.approx(omega.norm())
    indicator = CenterElement(algebra, (1.0, 0.0))
    assert weighted_norm(omega, indicator) == pytest.approx(
        ideal_norm(omega, Ideal(algebra, frozenset({0}))))
    doubled = CenterElement(algebra, (2.0, 0.0))
    assert weighted_norm(omega, doubled) == pytest.approx(2.0)
    with pytest.raises(ValueError, match="positive"):
        weighted_norm(omega, CenterElement(algebra, (-1.0, 0.0)))


def test_weighted_norm_homogeneous_monotone():
    rng = np.random.default_rng(11)
    algebra = validate_algebra([3, 2])
    omega = Functional(algebra, tuple(hermitian_block(rng, n)
                                      for n in algebra.block_dims))
    c = CenterElement(algebra, (0.7, 1.3))
    assert weighted_norm(omega, 2.5 * c) == pytest.approx(
        2.5 * weighted_norm(omega, c))
    larger = CenterElement(algebra, (0.9, 1.4))
    assert weighted_norm(omega, c) <= weighted_norm(omega, larger) + 1e-12


def test_central_decompose_example():
    algebra = validate_algebra([2, 1])
    omega = Functional(algebra, (np.diag([0.25, 0.25]), np.array([[0.5]])))
    dec = central_decompose(omega)
    assert np.allclose(dec.center_restriction.real_values(), [0.5, 0.5])
    rng = np.random.default_rng(13)
    x = Element(algebra, (hermitian_block(rng, 2), hermitian_block(rng, 1)))
    image = dec.apply(x)
    assert image.values[0] == pytest.approx(0.5 * float(x.blocks[0].trace().real))
    # reconstruction: omega = (omega on center) after the module map
    recon = sum(m.real * v.real for m, v in
                zip(dec.center_restriction.values, image.values))
    assert abs(recon - evaluate(omega, x).real) < 1e-10


def test_central_decompose_tracial_is_normalized_trace():
    algebra = validate_algebra([2, 3])
    omega = Functional(algebra, (0.5 * np.eye(2) / 2, 0.5 * np.eye(3) / 3))
    dec = central_decompose(omega)
    rng = np.random.default_rng(17)
    x = Element(algebra, tuple(hermitian_block(rng, n)
                               for n in algebra.block_dims))
    image = dec.apply(x)
    for v, blk, n in zip(image.values, x.blocks, algebra.block_dims):
        assert v.real == pytest.approx(float(blk.trace().real) / n)


def test_central_decompose_zero_block_support():
    algebra = validate_algebra([2, 2])
    omega = Functional(algebra, (np.diag([0.5, 0.5]), np.zeros((2, 2))))
    dec = central_decompose(omega)
    assert np.allclose(dec.unit_image.real_values(), [1.0, 0.0])


def test_central_decompose_properties_random():
    rng = np.random.default_rng(19)
    for seed in range(10):
        algebra = validate_algebra([2, 3])
        omega = random_state(algebra, seed)
        dec = central_decompose(omega)
        x = Element(algebra, tuple(hermitian_block(rng, n)
                                   for n in algebra.block_dims))
        # positivity of the module map
        sq = Element(algebra, tuple(b @ b.conj().T for b in x.blocks))
        assert dec.apply(sq).is_positive(1e-10)
        # center linearity
        z = CenterElement(algebra, (0.3, 1.7))
        zx = Element(algebra, tuple(v * b for v, b in zip(z.values, x.blocks)))
        lhs = dec.apply(zx)
        rhs = z * dec.apply(x)
        assert max(abs(a - b) for a, b in zip(lhs.values, rhs.values)) < 1e-10
        # unital onto the support projection
        ones = dec.apply(identity_element(algebra))
        assert np.allclose(
            [v.real for v in ones.values],
            dec.unit_image.real_values(), atol=1e-10)


def test_central_decompose_rejects_non_positive():
    algebra = validate_algebra([2])
    with pytest.raises(ValueError):
        central_decompose(Functional(algebra, (np.diag([0.5, -0.5]),)))


def test_state_predicates():
    algebra = validate_algebra([2])
    state = Functional(algebra, (np.diag([0.5, 0.5]),))
    assert state.is_state()
    assert not Functional(algebra, (np.diag([0.5, 0.4]),)).is_state()
    assert not Functional(algebra, (np.diag([1.5, -0.5]),)).is_state()
