"""Linear relations in ``E x E*`` with ``E = R^n``.

A relation is a linear subspace of the product space ``product(n)``, whose
pairing ``[(x, x*), (y, y*)] = <x, y*> + <y, x*>`` turns monotonicity into
q-positivity.  Relations are stored as subspaces, so multivalued relations
such as ``{0} x R^n`` need no special casing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .core import DEFAULT_TOL, SsdbSpace, Tolerance, product
from .errors import DimensionMismatch, NotMonotone, SpaceMismatch, SsdbError
from .subspaces import (
    MaximalityVerdict,
    Subspace,
    is_maximal_q_negative,
    is_maximal_q_positive,
    is_q_negative,
    is_q_positive,
    make_subspace,
    nullspace,
    orth,
)

METHODS = ("via_complement", "via_adjoint_monotone", "via_adjoint_maximal")


@dataclass(frozen=True, eq=False)
class LinearRelation:
    n: int
    sub: Subspace

    def __post_init__(self):
        if self.sub.n != 2 * self.n or not self.sub.space.same_as(product(self.n)):
            raise SpaceMismatch(f"a relation on R^{self.n} must live in product({self.n})")

    @property
    def space(self) -> SsdbSpace:
        return self.sub.space

    def __repr__(self):
        return f"LinearRelation(n={self.n}, dim={self.sub.k})"


def embed(x, xstar) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    xstar = np.asarray(xstar, dtype=float).ravel()
    if x.shape != xstar.shape:
        raise DimensionMismatch(f"x has length {x.size} but x* has length {xstar.size}")
    return np.concatenate([x, xstar])


def split(v) -> Tuple[np.ndarray, np.ndarray]:
    v = np.asarray(v, dtype=float).ravel()
    if v.size % 2:
        raise DimensionMismatch(f"cannot split a vector of odd length {v.size}")
    n = v.size // 2
    return v[:n].copy(), v[n:].copy()


def relation_from_graph(S_matrix, tol: Tolerance = DEFAULT_TOL) -> LinearRelation:
    """The graph ``{(x, S x)}`` of a square matrix."""
    S_matrix = np.atleast_2d(np.asarray(S_matrix, dtype=float))
    n = S_matrix.shape[0]
    if S_matrix.shape != (n, n):
        raise DimensionMismatch(f"graph matrix must be square, got shape {S_matrix.shape}")
    gens = np.vstack([np.eye(n), S_matrix])
    return LinearRelation(n, Subspace(product(n), orth(gens, tol)))


def relation_from_pairs(n: int, pairs: Sequence, tol: Tolerance = DEFAULT_TOL) -> LinearRelation:
    """Span of the given ``(x, x*)`` points, each written as one vector of length ``2n``."""
    return LinearRelation(n, make_subspace(product(n), pairs, tol))


def rho1_vector(v) -> np.ndarray:
    """``(x, x*) -> (-x, x*)``."""
    x, xstar = split(v)
    return np.concatenate([-x, xstar])


def rho1(R: LinearRelation) -> LinearRelation:
    B = R.sub.basis.copy()
    B[: R.n] *= -1.0
    return LinearRelation(R.n, Subspace(R.space, B))


def adjoint(R: LinearRelation, tol: Tolerance = DEFAULT_TOL) -> LinearRelation:
    """``A* = {(x, x*) : <x, a*> = <a, x*> for every (a, a*) in A}``.

    Built from the defining constraints, one row ``[a*^T, -a^T]`` per basis
    vector, and not from the q-complement.
    """
    n = R.n
    basis = R.sub.basis
    if basis.shape[1] == 0:
        return LinearRelation(n, Subspace(R.space, np.eye(2 * n)))
    a, astar = basis[:n], basis[n:]
    constraints = np.hstack([astar.T, -a.T])
    return LinearRelation(n, Subspace(R.space, nullspace(constraints, tol)))


def is_monotone(R: LinearRelation, tol: Tolerance = DEFAULT_TOL, cross_check: bool = False,
                samples: int = 256, seed: int = 0) -> bool:
    """Monotonicity as q-positivity of the relation's subspace.

    With ``cross_check`` the pairwise definition ``<x - y, x* - y*> >= 0`` is
    also evaluated on random pairs of relation points and must agree.
    """
    verdict = is_q_positive(R.sub, tol)
    if cross_check:
        direct = direct_monotone_check(R, samples=samples, seed=seed, tol=tol)
        if direct != verdict:
            raise SsdbError(f"monotonicity checks disagree: subspace={verdict}, pairwise={direct}")
    return verdict


def direct_monotone_check(R: LinearRelation, samples: int = 256, seed: int = 0,
                          tol: Tolerance = DEFAULT_TOL) -> bool:
    """Sampled pairwise test of ``<x - y, x* - y*> >= 0``.

    Basis vectors, their pairwise sums and differences, and ``samples`` random
    pairs of combinations are tried.  One-sided: only a violation is conclusive.
    """
    n, B = R.n, R.sub.basis
    k = B.shape[1]
    if k == 0:
        return True
    rng = np.random.default_rng(seed)
    pts = [B.T]
    for i in range(k):
        pts.append(B[:, i] + B[:, i + 1:].T)
        pts.append(B[:, i] - B[:, i + 1:].T)
    left = np.vstack(pts + [rng.standard_normal((samples, k)) @ B.T])
    right = np.vstack([np.zeros((left.shape[0] - samples, 2 * n)), rng.standard_normal((samples, k)) @ B.T])
    diff = left - right
    pairing = np.einsum("ij,ij->i", diff[:, :n], diff[:, n:])
    limit = -tol.atol * (1.0 + np.einsum("ij,ij->i", diff, diff))
    return bool(np.all(pairing >= limit))


def is_maximal_monotone(R: LinearRelation, tol: Tolerance = DEFAULT_TOL,
                        method: str = "via_complement") -> MaximalityVerdict:
    """Maximal monotonicity of a monotone linear relation.

    ``via_complement`` tests the relation directly with the complement
    criterion.  ``via_adjoint_monotone`` asks whether ``A*`` is monotone, and
    ``via_adjoint_maximal`` whether ``A*`` is maximal monotone; both work on
    ``rho1(A*)``, which is ``A^0``, with q-negativity in place of monotonicity.

    Raises
    ------
    NotMonotone
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    if not is_monotone(R, tol):
        raise NotMonotone("relation is not monotone")
    if method == "via_complement":
        return is_maximal_q_positive(R.sub, tol)
    reflected = rho1(adjoint(R, tol)).sub
    if not is_q_negative(reflected, tol):
        return MaximalityVerdict(False, method=method, label="adjoint not monotone")
    if method == "via_adjoint_monotone":
        return MaximalityVerdict(True, method=method, label="adjoint monotone")
    verdict = is_maximal_q_negative(reflected, tol)
    label = "adjoint maximal monotone" if verdict else "adjoint not maximal"
    return MaximalityVerdict(verdict.maximal, method=method, label=label)
