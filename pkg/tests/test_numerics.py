import numpy as np
import pytest

from statemix.numerics import (
    FeasibilityProblem,
    available_backends,
    dykstra_feasibility,
    eigh_hermitian,
    eigh_symmetric,
    get_backend,
    pack_hermitian,
    psd_project,
    set_backend,
    unpack_hermitian,
)
from statemix.numerics import _cyclic_jacobi_py


def random_hermitian_matrix(rng, n):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (g + g.conj().T) / 2


def test_eigh_identity():
    w, v = eigh_hermitian(np.eye(3, dtype=complex))
    assert np.allclose(w, 1.0)
    assert np.abs(v.conj().T @ v - np.eye(3)).max() < 1e-12


def test_eigh_diagonal_descending():
    w, _ = eigh_hermitian(np.diag([3.0, 1.0, 2.0]).astype(complex))
    assert np.allclose(w, [3.0, 2.0, 1.0])


def test_eigh_involution():
    m = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    w, v = eigh_hermitian(m)
    assert np.allclose(w, [1.0, -1.0])
    expected = np.array([1.0, 1.0]) / np.sqrt(2)
    assert np.abs(np.abs(v[:, 0]) - expected).max() < 1e-12
    assert np.abs(np.abs(v[:, 1]) - expected).max() < 1e-12


def test_eigh_rejects_non_hermitian():
    with pytest.raises(ValueError):
        eigh_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        eigh_symmetric(np.array([[0.0, 1.0], [0.0, 0.0]]))


@pytest.mark.parametrize("n", [1, 2, 5, 16, 33, 64])
def test_eigh_reconstruction_bounds(n):
    rng = np.random.default_rng(n)
    m = random_hermitian_matrix(rng, n)
    w, v = eigh_hermitian(m)
    scale = max(1.0, np.linalg.norm(m))
    assert np.linalg.norm((v * w) @ v.conj().T - m) <= 1e-10 * scale
    assert np.abs(v.conj().T @ v - np.eye(n)).max() <= 1e-10


def test_eigh_degenerate_spectrum():
    # repeated eigenvalues exercise the doubling extraction
    rng = np.random.default_rng(3)
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    q, _ = np.linalg.qr(g)
    m = q @ np.diag([2.0, 2.0, 2.0, -1.0]) @ q.conj().T
    w, v = eigh_hermitian(m)
    assert np.allclose(np.sort(w), [-1.0, 2.0, 2.0, 2.0], atol=1e-10)
    assert np.linalg.norm((v * w) @ v.conj().T - m) < 1e-10


def test_eigh_deterministic():
    rng = np.random.default_rng(9)
    m = random_hermitian_matrix(rng, 6)
    w1, v1 = eigh_hermitian(m)
    w2, v2 = eigh_hermitian(m.copy())
    assert np.array_equal(w1, w2)
    assert np.array_equal(v1, v2)


def test_backends_agree():
    active = get_backend()
    try:
        rng = np.random.default_rng(11)
        m = random_hermitian_matrix(rng, 8)
        results = {}
        for name in available_backends():
            set_backend(name)
            results[name] = eigh_hermitian(m)
        names = list(results)
        w0, v0 = results[names[0]]
        for name in names[1:]:
            w1, v1 = results[name]
            assert np.abs(w0 - w1).max() < 1e-12
            assert np.abs(v0 - v1).max() < 1e-10
    finally:
        set_backend(active)


def test_python_kernel_direct():
    rng = np.random.default_rng(13)
    s = rng.standard_normal((7, 7))
    s = (s + s.T) / 2
    a = s.copy()
    d = np.empty(7)
    v = np.empty((7, 7))
    _cyclic_jacobi_py.jacobi_sweeps(a, d, v, 1e-12 * np.linalg.norm(s), 100)
    assert np.linalg.norm((v * d) @ v.T - s) < 1e-10


def test_psd_project_properties():
    rng = np.random.default_rng(17)
    m = random_hermitian_matrix(rng, 6)
    p, lo = psd_project(m)
    assert lo < 0
    w, _ = eigh_hermitian(p)
    assert w[-1] >= -1e-12
    p2, lo2 = psd_project(p)
    assert np.abs(p2 - p).max() < 1e-12
    assert lo2 >= -1e-12
    # 1-Lipschitz in Frobenius norm
    for _ in range(5):
        a = random_hermitian_matrix(rng, 6)
        b = random_hermitian_matrix(rng, 6)
        pa, _ = psd_project(a)
        pb, _ = psd_project(b)
        assert np.linalg.norm(pa - pb) <= np.linalg.norm(a - b) + 1e-12


def test_pack_unpack_isometry():
    rng = np.random.default_rng(23)
    dims = (2, 3)
    blocks = tuple(random_hermitian_matrix(rng, n) for n in dims)
    vec = pack_hermitian(blocks, dims)
    back = unpack_hermitian(vec, dims)
    for b, c in zip(blocks, back):
        assert np.abs(b - c).max() < 1e-14
    hs = sum(float(np.vdot(b, b).real) for b in blocks)
    assert abs(float(vec @ vec) - hs) < 1e-12


def test_dykstra_simple_feasible():
    problem = FeasibilityProblem(
        block_dims=(2,),
        constraints=[((np.eye(2),), 1.0), ((np.diag([1.0, -1.0]),), 0.0)],
    )
    result = dykstra_feasibility(problem)
    assert result.status == "feasible"
    x = result.point[0]
    assert abs(x.trace().real - 1.0) < 1e-7
    assert abs((x[0, 0] - x[1, 1]).real) < 1e-7


def test_dykstra_algebraic_infeasible():
    problem = FeasibilityProblem(
        block_dims=(2,),
        constraints=[((np.eye(2),), 1.0), ((np.eye(2),), 2.0)],
    )
    result = dykstra_feasibility(problem)
    assert result.status == "infeasible"
    assert result.certificate["kind"] == "inconsistent_affine_system"
    # Farkas-style certificate: combination annihilates rows, not targets
    assert result.certificate["violation"] > 0.1


def test_dykstra_cone_infeasible_by_plateau():
    # trace 1 with a fixed off-diagonal 0.7 needs X11*X22 >= 0.49 > 1/4
    e_re = np.array([[0.0, 0.5], [0.5, 0.0]], dtype=complex)
    e_im = np.array([[0.0, 0.5j], [-0.5j, 0.0]])
    problem = FeasibilityProblem(
        block_dims=(2,),
        constraints=[((np.eye(2),), 1.0), ((e_re,), 0.7), ((e_im,), 0.0)],
    )
    result = dykstra_feasibility(problem)
    assert result.status == "infeasible"
    assert result.residual > 1e-5


def test_dykstra_strictly_feasible_always_found():
    rng = np.random.default_rng(31)
    for trial in range(5):
        dims = (int(rng.integers(2, 5)),)
        g = rng.standard_normal((dims[0], dims[0])) \
            + 1j * rng.standard_normal((dims[0], dims[0]))
        x0 = g @ g.conj().T + 0.1 * np.eye(dims[0])
        constraints = []
        for _ in range(3):
            a = random_hermitian_matrix(rng, dims[0])
            constraints.append(((a,), float(np.trace(a @ x0).real)))
        result = dykstra_feasibility(
            FeasibilityProblem(block_dims=dims, constraints=constraints))
        assert result.status == "feasible"


def test_dykstra_lower_bound_cone():
    # require X >= S and trace X = trace(S) + 1
    s = np.diag([1.0, -1.0]).astype(complex)
    problem = FeasibilityProblem(
        block_dims=(2,),
        constraints=[((np.eye(2),), float(s.trace().real) + 1.0)],
        lower_bounds=[(s,)],
    )
    result = dykstra_feasibility(problem)
    assert result.status == "feasible"
    x = result.point[0]
    w, _ = eigh_hermitian(x - s)
    assert w[-1] >= -1e-6


def test_dykstra_rejects_empty_constraints():
    with pytest.raises(ValueError):
        FeasibilityProblem(block_dims=(2,), constraints=[])
