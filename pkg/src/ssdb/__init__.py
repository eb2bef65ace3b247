"""Finite-dimensional SSDB spaces, q-positive subspaces and linear relations."""

from .core import (
    DEFAULT_TOL,
    SsdbSpace,
    Tolerance,
    anti_hilbert,
    bracket,
    g0,
    hilbert,
    in_null_set,
    iota,
    negate,
    product,
    q,
    r3_swap,
    subdiff_g0_check,
    validate_space,
)
from .errors import *  # noqa: F401,F403
from .functionals import (
    QuadraticFunctional,
    check_contact_complement,
    conjugate,
    conjugate_eval,
    euclidean_conjugate_eval,
    evaluate,
    make_qA,
    translate,
    verify_translation_identities,
)
from .relations import (
    LinearRelation,
    adjoint,
    embed,
    is_maximal_monotone,
    is_monotone,
    relation_from_graph,
    relation_from_pairs,
    rho1,
    rho1_vector,
    split,
)
from .subspaces import (
    MaximalityVerdict,
    PointSet,
    Subspace,
    contains,
    inf_q_over_translate,
    is_maximal_q_negative,
    is_maximal_q_positive,
    is_q_negative,
    is_q_positive,
    is_q_positive_pointset,
    make_subspace,
    maximality_oracle,
    q_complement,
    subspace_intersection,
    subspace_sum,
)
from .transversality import (
    DecompositionResult,
    check_in_subdiff_domain,
    decompose,
    resolvent_crosscheck,
)

__version__ = "0.1.0"
