"""Closed-form splitting ``c = a - n`` with ``a`` in ``A`` and ``n`` in the null set.

For a q-positive subspace ``A`` whose complement ``A^0`` is q-negative, the
translated functional ``(q_A)_c + g0`` is a strictly convex quadratic on
``A - c``.  Its minimizer ``b`` lies in ``{g0 + q = 0}``, and ``a = b + c``
lies in ``A``.  In basis coordinates ``a = B z`` the minimizer solves

    B^T (P + I) B z = B^T (P + I) c,

whose matrix is at least the identity because ``q >= 0`` on ``A``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np

from .core import DEFAULT_TOL, SsdbSpace, Tolerance, as_vector, bracket, g0, product, q
from .errors import (
    ComplementNotQNegative,
    NotMonotoneMatrix,
    NotQPositive,
    SingularSystem,
    SpaceMismatch,
)
from .functionals import conjugate_eval, evaluate, make_qA, translate
from .relations import relation_from_graph
from .subspaces import Subspace, contains, is_q_negative, is_q_positive, q_complement

RESIDUAL_LIMIT = 1e-8


@dataclass
class DecompositionResult:
    """``c = a - nvec`` with the dual point ``d = -P nvec``.

    ``residuals`` holds absolute defects:

    * ``domain``: distance of ``a`` from ``A``
    * ``null_set``: ``g0(nvec) + q(nvec)``
    * ``recomposition``: ``|c - (a - nvec)|``
    * ``dual_pairing``: ``|g0(nvec) + g0(d) + [nvec, d]|``
    * ``fenchel_equality``: the larger of the two Fenchel-Young gaps, for
      ``f_c`` at ``(nvec, d)`` and for ``f = q_A`` at ``(nvec + c, d + c)``
    * ``contact_condition``: positive part of ``q(nvec) + q(d) - [nvec, d]``
    """

    a: np.ndarray
    nvec: np.ndarray
    d: np.ndarray
    residuals: Dict[str, float]
    failed: List[str] = field(default_factory=list)
    forced: bool = False

    @property
    def ok(self) -> bool:
        return not self.failed


def decompose(
    S: SsdbSpace,
    A: Subspace,
    c,
    tol: Tolerance = DEFAULT_TOL,
    force: bool = False,
) -> DecompositionResult:
    """Split ``c`` as ``a - nvec`` with ``a`` in ``A`` and ``g0(nvec) + q(nvec) = 0``.

    Raises
    ------
    NotQPositive
        ``A`` is not q-positive (even with ``force``).
    ComplementNotQNegative
        ``A^0`` is not q-negative; pass ``force=True`` to solve anyway and see
        which conclusions fail in ``result.failed``.
    SingularSystem
        The reduced system is singular (only reachable when forced).
    """
    if not S.same_as(A.space, tol):
        raise SpaceMismatch("subspace does not belong to the given space")
    c = as_vector(S, c)
    if not is_q_positive(A, tol):
        raise NotQPositive("decomposition needs a q-positive subspace")
    if not force and not is_q_negative(q_complement(A, tol), tol):
        raise ComplementNotQNegative("the complement of A is not q-negative")

    B, P = A.basis, S.P
    if A.k == 0:
        z = np.zeros(0)
    else:
        K = B.T @ (P + np.eye(S.n)) @ B
        K = 0.5 * (K + K.T)
        if np.linalg.eigvalsh(K)[0] <= tol.rank * max(1.0, float(np.abs(K).max())):
            raise SingularSystem("reduced system B^T (P + I) B is singular")
        z = np.linalg.solve(K, B.T @ (P @ c + c))
    a = B @ z
    nvec = a - c
    d = -(P @ nvec)

    residuals = _residuals(S, A, c, a, nvec, d, tol)
    scale = 1.0 + float(c @ c)
    failed = [name for name, value in residuals.items() if not value <= RESIDUAL_LIMIT * scale]
    return DecompositionResult(a, nvec, d, residuals, failed, forced=force)


def _residuals(S, A, c, a, nvec, d, tol) -> Dict[str, float]:
    fA = make_qA(A)
    fc = translate(fA, c)
    gap_c = evaluate(fc, nvec, tol) + conjugate_eval(fc, d, tol) - bracket(S, nvec, d)
    gap = evaluate(fA, nvec + c, tol) + conjugate_eval(fA, d + c, tol) - bracket(S, nvec + c, d + c)
    fenchel = max(abs(gap_c), abs(gap))
    return {
        "domain": float(np.linalg.norm(a - A.basis @ (A.basis.T @ a))),
        "null_set": g0(nvec) + q(S, nvec),
        "recomposition": float(np.linalg.norm(c - (a - nvec))),
        "dual_pairing": abs(g0(nvec) + g0(d) + bracket(S, nvec, d)),
        "fenchel_equality": fenchel if math.isfinite(fenchel) else math.inf,
        "contact_condition": max(0.0, q(S, nvec) + q(S, d) - bracket(S, nvec, d)),
    }


def check_in_subdiff_domain(S: SsdbSpace, A: Subspace, c, tol: Tolerance = DEFAULT_TOL, force: bool = False) -> bool:
    """The decomposition's ``a`` lies where ``q_A`` has subgradients.

    For the restricted quadratic that set is ``A`` itself, so this is a
    membership test on the solver's output.
    """
    result = decompose(S, A, c, tol, force=force)
    return contains(A, result.a, tol)


@dataclass
class ResolventReport:
    x: np.ndarray
    a_direct: np.ndarray
    a_decompose: np.ndarray
    max_abs_diff: float

    def agrees(self, limit: float = 1e-10) -> bool:
        return self.max_abs_diff <= limit


def resolvent_crosscheck(n: int, S_matrix, c, tol: Tolerance = DEFAULT_TOL) -> ResolventReport:
    """Compare :func:`decompose` on ``graph(S)`` with the direct resolvent solve.

    In ``E x E*`` the null set is ``{(y, -y)}``, so ``c = a - nvec`` with
    ``a = (x, S x)`` reduces to ``(I + S) x = c1 + c2``.

    Raises
    ------
    NotMonotoneMatrix
        The symmetric part of ``S`` has a negative eigenvalue.
    """
    S_matrix = np.asarray(S_matrix, dtype=float).reshape(n, n)
    c = np.asarray(c, dtype=float).reshape(2 * n)
    sym = 0.5 * (S_matrix + S_matrix.T)
    if np.linalg.eigvalsh(sym)[0] < -tol.atol * (1.0 + np.linalg.norm(S_matrix, 2)):
        raise NotMonotoneMatrix("matrix is not monotone: <x, S x> < 0 for some x")

    x = np.linalg.solve(np.eye(n) + S_matrix, c[:n] + c[n:])
    a_direct = np.concatenate([x, S_matrix @ x])
    R = relation_from_graph(S_matrix, tol)
    result = decompose(product(n), R.sub, c, tol)
    diff = float(np.max(np.abs(a_direct - result.a)))
    return ResolventReport(x, a_direct, result.a, diff)
