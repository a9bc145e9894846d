"""statemix: transformations between states of finite-dimensional von
Neumann algebras under unital completely positive maps.

An algebra is a direct sum of full complex matrix blocks; hermitian
functionals are tuples of hermitian density matrices paired by traces.  The
package decides when one functional can be carried to another by a unital
completely positive map over the center, constructs explicit transport maps
and exact finite Kraus channels, and cross-validates every decision with an
independent convex-feasibility oracle.
"""

__version__ = "0.1.0"

from .algebra import (
    AlgebraSpec,
    CenterElement,
    Element,
    Ideal,
    IdealLattice,
    central_carrier,
    enumerate_ideals,
    identity_element,
    validate_algebra,
    zero_element,
)
from .functionals import (
    CentralDecomposition,
    Functional,
    JordanPair,
    central_decompose,
    evaluate,
    ideal_norm,
    jordan_decompose,
    restrict_to_center,
    support_projection,
    weighted_norm,
)
from .channels import (
    KrausMap,
    ModuleMapChoi,
    apply_kraus,
    choi_of,
    kraus_from_choi,
    predual_apply,
    random_elementary,
    unitalize,
)
from .reachability import (
    CentralScalings,
    Decision,
    build_transport_map,
    check_hermitian_reachable,
    check_hermitian_reachable_general,
    check_more_mixed,
    check_state_reachable,
    derive_central_scalings,
    is_maximally_mixed,
)
from .exact_channel import (
    ExtensionCertificate,
    ExtensionOutcome,
    GnsData,
    construct_exact_channel,
    extension_feasible,
    gns,
)
from .oracle import (
    OracleReport,
    choi_membership_oracle,
    random_hermitian,
    random_state,
    variational_ideal_norm,
)

__all__ = [
    "AlgebraSpec",
    "CenterElement",
    "CentralDecomposition",
    "CentralScalings",
    "Decision",
    "Element",
    "ExtensionCertificate",
    "ExtensionOutcome",
    "Functional",
    "GnsData",
    "Ideal",
    "IdealLattice",
    "JordanPair",
    "KrausMap",
    "ModuleMapChoi",
    "OracleReport",
    "apply_kraus",
    "build_transport_map",
    "central_carrier",
    "central_decompose",
    "check_hermitian_reachable",
    "check_hermitian_reachable_general",
    "check_more_mixed",
    "check_state_reachable",
    "choi_membership_oracle",
    "choi_of",
    "construct_exact_channel",
    "derive_central_scalings",
    "enumerate_ideals",
    "evaluate",
    "extension_feasible",
    "gns",
    "ideal_norm",
    "identity_element",
    "is_maximally_mixed",
    "jordan_decompose",
    "kraus_from_choi",
    "predual_apply",
    "random_elementary",
    "random_hermitian",
    "random_state",
    "restrict_to_center",
    "support_projection",
    "unitalize",
    "validate_algebra",
    "variational_ideal_norm",
    "weighted_norm",
    "zero_element",
]
