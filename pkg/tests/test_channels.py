import numpy as np
import pytest

from statemix import (
    Functional,
    KrausMap,
    ModuleMapChoi,
    apply_kraus,
    choi_of,
    evaluate,
    identity_element,
    kraus_from_choi,
    predual_apply,
    random_elementary,
    restrict_to_center,
    unitalize,
    validate_algebra,
)
from statemix.algebra import Element
from statemix.oracle import random_state


def matrix_unit(n, i, j):
    e = np.zeros((n, n), dtype=complex)
    e[i, j] = 1.0
    return e


def random_element(algebra, rng):
    return Element(algebra, tuple(
        rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        for n in algebra.block_dims))


def test_apply_unitary_conjugation():
    algebra = validate_algebra([2])
    theta = 0.7
    u = np.array([[np.cos(theta), -np.sin(theta)],
                  [np.sin(theta), np.cos(theta)]], dtype=complex)
    phi = KrausMap(algebra, (Element(algebra, (u,)),))
    assert phi.is_unital()
    one = identity_element(algebra)
    assert np.abs(apply_kraus(phi, one).blocks[0] - np.eye(2)).max() < 1e-12
    rng = np.random.default_rng(0)
    x = random_element(algebra, rng)
    expected = u.conj().T @ x.blocks[0] @ u
    assert np.abs(apply_kraus(phi, x).blocks[0] - expected).max() < 1e-12


def test_apply_split_identity():
    algebra = validate_algebra([2])
    half = Element(algebra, (np.eye(2) / np.sqrt(2),))
    phi = KrausMap(algebra, (half, half))
    assert phi.is_unital()
    rng = np.random.default_rng(1)
    x = random_element(algebra, rng)
    assert np.abs(apply_kraus(phi, x).blocks[0] - x.blocks[0]).max() < 1e-12


def test_apply_matrix_unit_replacement():
    # Kraus {e00, e01} is unital and sends x to x00 * identity
    algebra = validate_algebra([2])
    phi = KrausMap(algebra, (Element(algebra, (matrix_unit(2, 0, 0),)),
                             Element(algebra, (matrix_unit(2, 0, 1),))))
    assert phi.is_unital()
    rng = np.random.default_rng(2)
    x = random_element(algebra, rng)
    out = apply_kraus(phi, x)
    assert np.abs(out.blocks[0] - x.blocks[0][0, 0] * np.eye(2)).max() < 1e-12


def test_predual_unitary():
    algebra = validate_algebra([2])
    u = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    phi = KrausMap(algebra, (Element(algebra, (u,)),))
    omega = Functional(algebra, (np.diag([0.9, 0.1]),))
    pushed = predual_apply(phi, omega)
    assert np.abs(pushed.densities[0] - np.diag([0.1, 0.9])).max() < 1e-12


def test_predual_identity():
    algebra = validate_algebra([2, 2])
    phi = KrausMap(algebra, (identity_element(algebra),))
    omega = random_state(algebra, seed=3)
    pushed = predual_apply(phi, omega)
    for a, b in zip(pushed.densities, omega.densities):
        assert np.abs(a - b).max() < 1e-14


def test_predual_replacement_map_duality():
    # Heisenberg replacement onto a fixed state via rank factors
    algebra = validate_algebra([2])
    sigma = np.diag([0.25, 0.75]).astype(complex)
    root = np.sqrt(sigma)
    ops = tuple(Element(algebra, (np.outer(root[:, k], e),))
                for k in range(2)
                for e in np.eye(2))
    phi = KrausMap(algebra, ops)
    assert phi.is_unital()
    omega = random_state(algebra, seed=4)
    pushed = predual_apply(phi, omega)
    assert np.abs(pushed.densities[0] - sigma).max() < 1e-12
    rng = np.random.default_rng(5)
    for _ in range(10):
        x = random_element(algebra, rng)
        lhs = evaluate(pushed, x)
        rhs = evaluate(omega, apply_kraus(phi, x))
        assert abs(lhs - rhs) < 1e-10


def test_duality_identity_random():
    algebra = validate_algebra([2, 3])
    rng = np.random.default_rng(6)
    for seed in range(5):
        phi = random_elementary(algebra, 3, seed)
        omega = random_state(algebra, seed + 100)
        pushed = predual_apply(phi, omega)
        for _ in range(5):
            x = random_element(algebra, rng)
            assert abs(evaluate(pushed, x)
                       - evaluate(omega, apply_kraus(phi, x))) < 1e-10


def test_unital_predual_preserves_center_restriction():
    algebra = validate_algebra([2, 3, 2])
    for seed in range(5):
        phi = random_elementary(algebra, 2, seed)
        omega = random_state(algebra, seed + 50)
        pushed = predual_apply(phi, omega)
        before = restrict_to_center(omega).real_values()
        after = restrict_to_center(pushed).real_values()
        assert np.abs(before - after).max() < 1e-10


def test_choi_of_identity():
    algebra = validate_algebra([3])
    choi = choi_of(KrausMap(algebra, (identity_element(algebra),)))
    c = choi.choi_blocks[0]
    w = np.linalg.eigvalsh(c)
    assert abs(float(c.trace().real) - 3.0) < 1e-12
    assert (w > 1e-12).sum() == 1
    assert choi.is_unital() and choi.is_completely_positive()


def test_choi_of_trace_map():
    # x -> trace(x)/n at n=2 has Choi I/2
    algebra = validate_algebra([2])
    ops = tuple(Element(algebra, (matrix_unit(2, i, j) / np.sqrt(2),))
                for i in range(2) for j in range(2))
    phi = KrausMap(algebra, ops)
    assert phi.is_unital()
    choi = choi_of(phi)
    assert np.abs(choi.choi_blocks[0] - np.eye(4) / 2).max() < 1e-12


def test_choi_of_zero():
    algebra = validate_algebra([2])
    zero = Element(algebra, (np.zeros((2, 2)),))
    choi = choi_of(KrausMap(algebra, (zero,)))
    assert np.abs(choi.choi_blocks[0]).max() == 0.0


def test_choi_apply_matches_kraus():
    algebra = validate_algebra([2, 3])
    rng = np.random.default_rng(7)
    phi = random_elementary(algebra, 3, 11)
    choi = choi_of(phi)
    for _ in range(5):
        x = random_element(algebra, rng)
        a = apply_kraus(phi, x)
        b = choi.apply(x)
        assert max(np.abs(p - q).max() for p, q in zip(a.blocks, b.blocks)) < 1e-10


def test_kraus_from_choi_identity():
    algebra = validate_algebra([3])
    choi = choi_of(KrausMap(algebra, (identity_element(algebra),)))
    back = kraus_from_choi(choi)
    assert len(back.operators) == 1
    again = choi_of(back)
    assert np.abs(again.choi_blocks[0] - choi.choi_blocks[0]).max() < 1e-10


def test_kraus_from_choi_roundtrip_random():
    for seed in range(10):
        algebra = validate_algebra([2, 3])
        phi = random_elementary(algebra, 3, seed)
        choi = choi_of(phi)
        back = choi_of(kraus_from_choi(choi))
        assert max(np.abs(a - b).max() for a, b in
                   zip(choi.choi_blocks, back.choi_blocks)) < 1e-9


def test_kraus_from_choi_rejects_negative():
    algebra = validate_algebra([2])
    bad = np.eye(4, dtype=complex)
    bad[3, 3] = -0.1
    with pytest.raises(ValueError, match="not completely positive"):
        kraus_from_choi(ModuleMapChoi(algebra, (bad,)))


def test_cp_unital_choi_characterization():
    algebra = validate_algebra([2])
    good = choi_of(random_elementary(algebra, 2, 0))
    assert good.is_completely_positive() and good.is_unital()
    # non-unital CP map: single non-unitary Kraus
    sub = choi_of(KrausMap(algebra, (Element(algebra, (np.diag([0.5, 0.5]),)),)))
    assert sub.is_completely_positive() and not sub.is_unital()
    # non-CP: negative eigenvalue in the Choi block
    bad = np.eye(4, dtype=complex) / 2
    bad[0, 3] = bad[3, 0] = 0.9
    non_cp = ModuleMapChoi(algebra, (bad,))
    assert not non_cp.is_completely_positive()


def test_random_elementary_determinism_and_unitality():
    algebra = validate_algebra([2, 3])
    a = random_elementary(algebra, 3, seed=7)
    b = random_elementary(algebra, 3, seed=7)
    for x, y in zip(a.operators, b.operators):
        assert all(np.array_equal(p, q) for p, q in zip(x.blocks, y.blocks))
    assert a.unitality_defect() <= 1e-9
    with pytest.raises(ValueError):
        random_elementary(algebra, 0, seed=1)


def test_random_elementary_single_kraus_is_unitary():
    algebra = validate_algebra([3])
    phi = random_elementary(algebra, 1, seed=2)
    a = phi.operators[0].blocks[0]
    assert np.abs(a.conj().T @ a - np.eye(3)).max() < 1e-9
    assert np.abs(a @ a.conj().T - np.eye(3)).max() < 1e-9


def test_unitalize_subunital():
    algebra = validate_algebra([2, 2])
    for seed in range(5):
        base = random_elementary(algebra, 2, seed)
        rng = np.random.default_rng(seed)
        t = float(rng.uniform(0.3, 0.9))
        sub = KrausMap(algebra, tuple(np.sqrt(t) * op for op in base.operators))
        closed = unitalize(sub)
        assert closed.unitality_defect() < 1e-9
        assert len(closed.operators) == len(sub.operators) + 1
