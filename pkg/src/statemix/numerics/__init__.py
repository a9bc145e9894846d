"""Self-contained numerical kernels: Jacobi eigendecomposition, PSD
projection and Dykstra convex feasibility.

The Jacobi sweep kernel exists twice, as a compiled extension
(``_cyclic_jacobi``) and as a pure-Python twin (``_cyclic_jacobi_py``); the
compiled one is selected at import when available.  ``get_backend`` reports
the active kernel and ``set_backend`` switches it, mainly for tests and
``benchmarks/eigh_backends.py``.
"""

from .eigh import (
    EighConvergenceError,
    available_backends,
    eigh_hermitian,
    eigh_symmetric,
    get_backend,
    psd_project,
    set_backend,
)
from .feasibility import (
    EPS_FEAS,
    MAX_ITER,
    PLATEAU,
    FeasibilityProblem,
    FeasibilityResult,
    dykstra_feasibility,
    pack_hermitian,
    unpack_hermitian,
)

__all__ = [
    "EPS_FEAS",
    "MAX_ITER",
    "PLATEAU",
    "EighConvergenceError",
    "FeasibilityProblem",
    "FeasibilityResult",
    "available_backends",
    "dykstra_feasibility",
    "eigh_hermitian",
    "eigh_symmetric",
    "get_backend",
    "pack_hermitian",
    "psd_project",
    "set_backend",
    "unpack_hermitian",
]
