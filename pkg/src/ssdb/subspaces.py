"""Linear subspaces of an SSDB space.

Subspaces are stored as orthonormal bases.  q-positivity of a linear subspace
reduces to positive semidefiniteness of the reduced form ``B^T P B`` because
differences of subspace elements fill the subspace.  Maximality is decided
with the complement criterion (``A`` is maximal iff ``A^0`` is q-negative) and,
independently, by a seeded randomized extension search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import DEFAULT_TOL, SsdbSpace, Tolerance, as_vector, negate, q
from .errors import DimensionMismatch, NotQNegative, NotQPositive, SpaceMismatch


def orth(M, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the column space of ``M`` (shape ``(n, rank)``).

    Singular values at or below ``tol.rank * sigma_max`` are dropped.
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    if M.size == 0:
        return np.zeros((n, 0))
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    if s[0] == 0.0:
        return np.zeros((n, 0))
    r = int(np.sum(s > tol.rank * s[0]))
    return U[:, :r].copy()


def nullspace(M, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the null space of ``M`` (shape ``(M.shape[1], nullity)``)."""
    M = np.asarray(M, dtype=float)
    n = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(n)
    _, s, Vh = np.linalg.svd(M, full_matrices=True)
    if s.size == 0 or s[0] == 0.0:
        return np.eye(n)
    r = int(np.sum(s > tol.rank * s[0]))
    return Vh[r:].T.copy()


@dataclass(frozen=True, eq=False)
class Subspace:
    """A linear subspace held as an orthonormal ``n x k`` basis (``k = 0`` is ``{0}``)."""

    space: SsdbSpace
    basis: np.ndarray

    def __post_init__(self):
        B = np.array(self.basis, dtype=float).reshape(self.space.n, -1)
        B.setflags(write=False)
        object.__setattr__(self, "basis", B)

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def k(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def reduced_form(self) -> np.ndarray:
        """``B^T P B``: the matrix of ``2 q`` in basis coordinates."""
        M = self.basis.T @ self.space.P @ self.basis
        return 0.5 * (M + M.T)

    def on(self, S: SsdbSpace) -> "Subspace":
        """The same subspace, attached to another pairing on ``R^n``."""
        if S.n != self.n:
            raise SpaceMismatch(f"cannot move a subspace of R^{self.n} to R^{S.n}")
        return Subspace(S, self.basis)

    def distance(self, other: "Subspace") -> float:
        """Max-norm distance between orthogonal projectors."""
        if other.n != self.n:
            raise SpaceMismatch("subspaces live in different dimensions")
        return float(np.max(np.abs(self.projector() - other.projector())))

    def equals(self, other: "Subspace", tol: Tolerance = DEFAULT_TOL) -> bool:
        return self.distance(other) <= tol.atol

    def __repr__(self):
        return f"Subspace(n={self.n}, k={self.k}, space={self.space.name!r})"


@dataclass(frozen=True, eq=False)
class PointSet:
    space: SsdbSpace
    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ValueError("a point set needs at least one point")
        if pts.shape[1] != self.space.n:
            raise DimensionMismatch(f"points must have length {self.space.n}, got {pts.shape[1]}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)


def make_subspace(S: SsdbSpace, generators: Sequence, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """Orthonormal basis of the span of ``generators`` (rows or a list of vectors)."""
    gens = [as_vector(S, g) for g in generators]
    if not gens:
        return Subspace(S, np.zeros((S.n, 0)))
    return Subspace(S, orth(np.column_stack(gens), tol))


def whole_space(S: SsdbSpace) -> Subspace:
    return Subspace(S, np.eye(S.n))


def zero_subspace(S: SsdbSpace) -> Subspace:
    return Subspace(S, np.zeros((S.n, 0)))


def contains(A: Subspace, b, tol: Tolerance = DEFAULT_TOL) -> bool:
    b = as_vector(A.space, b)
    return _residual(A, b) <= tol.atol * (1.0 + float(np.linalg.norm(b)))


def _residual(A: Subspace, b: np.ndarray) -> float:
    return float(np.linalg.norm(b - A.basis @ (A.basis.T @ b)))


def q_complement(A: Subspace, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """``A^0 = {b : [a, b] = 0 for all a in A}``, the null space of ``B^T P``."""
    if A.k == 0:
        return whole_space(A.space)
    return Subspace(A.space, nullspace(A.basis.T @ A.space.P, tol))


def _form_scale(S: SsdbSpace, tol: Tolerance) -> float:
    return tol.atol * (1.0 + float(np.linalg.norm(S.P, 2)))


def spectral_cutoff(lam: np.ndarray, S: SsdbSpace, tol: Tolerance) -> float:
    """Eigenvalues at or below this are treated as zero in pseudoinverses.

    Relative to the largest eigenvalue, floored at the positivity tolerance so
    rounding noise in a numerically zero form never counts as curvature.
    """
    top = float(lam[-1]) if lam.size else 0.0
    return max(tol.rank * top, _form_scale(S, tol))


def is_q_positive(A: Subspace, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff ``q >= 0`` on ``A`` (smallest reduced eigenvalue above ``-atol``)."""
    if A.k == 0:
        return True
    lam = np.linalg.eigvalsh(A.reduced_form())
    return bool(lam[0] >= -_form_scale(A.space, tol))


def is_q_negative(A: Subspace, tol: Tolerance = DEFAULT_TOL) -> bool:
    return is_q_positive(A.on(negate(A.space)), tol)


@dataclass(frozen=True)
class PairWitness:
    """A pair of points ``(points[i], points[j])`` with ``q(b - c) < 0``."""

    i: int
    j: int
    value: float


def is_q_positive_pointset(PS: PointSet, tol: Tolerance = DEFAULT_TOL):
    """Pairwise check ``q(b - c) >= 0`` over a finite point set.

    Returns
    -------
    ok : bool
    witness : PairWitness or None
        The first violating pair in ``(i, j)`` lexicographic order, ``i < j``.
    """
    pts = PS.points
    P = PS.space.P
    for i in range(len(pts) - 1):
        diffs = pts[i] - pts[i + 1:]
        vals = 0.5 * np.einsum("ij,jk,ik->i", diffs, P, diffs)
        limits = -tol.atol * (1.0 + np.einsum("ij,ij->i", diffs, diffs))
        bad = np.nonzero(vals < limits)[0]
        if bad.size:
            j = i + 1 + int(bad[0])
            return False, PairWitness(i, j, q(PS.space, pts[i] - pts[j]))
    return True, None


class _TranslateInfimum:
    """Precomputed reduced problem for ``b -> inf_{a in A} q(a - b)``.

    With ``M = B^T P B`` and ``r = B^T P b``, ``q(Bz - b) = z^T M z / 2 - r^T z + q(b)``.
    """

    def __init__(self, A: Subspace, tol: Tolerance):
        self.A = A
        self.tol = tol
        S = A.space
        if A.k == 0:
            self.unbounded = False
            self.V = np.zeros((0, 0))
            self.lam = np.zeros(0)
            return
        lam, V = np.linalg.eigh(A.reduced_form())
        self.unbounded = bool(lam[0] < -_form_scale(S, tol))
        keep = lam > spectral_cutoff(lam, S, tol)
        self.V = V[:, keep]
        self.lam = lam[keep]

    def __call__(self, bs: np.ndarray) -> np.ndarray:
        """Infimum for each row of ``bs``; ``-inf`` where the problem is unbounded."""
        A, P = self.A, self.A.space.P
        bs = np.atleast_2d(bs)
        qb = 0.5 * np.einsum("ij,jk,ik->i", bs, P, bs)
        if A.k == 0:
            return qb
        if self.unbounded:
            return np.full(len(bs), -math.inf)
        r = bs @ P @ A.basis
        coef = r @ self.V
        in_range = r - coef @ self.V.T
        resid = np.linalg.norm(in_range, axis=1)
        ok = resid <= self.tol.atol * (1.0 + np.linalg.norm(r, axis=1))
        vals = qb - 0.5 * np.sum(coef**2 / self.lam, axis=1)
        return np.where(ok, vals, -math.inf)


def inf_q_over_translate(A: Subspace, b, tol: Tolerance = DEFAULT_TOL) -> float:
    """Exact ``inf { q(a - b) : a in A }``; ``-inf`` when unbounded below."""
    b = as_vector(A.space, b)
    return float(_TranslateInfimum(A, tol)(b[None, :])[0])


@dataclass(frozen=True)
class MaximalityVerdict:
    """Outcome of a maximality test.

    ``witness`` (when not maximal) is a unit vector ``c`` outside ``A`` such that
    ``A`` plus ``c`` is still q-positive.  Truthiness is the verdict.
    """

    maximal: bool
    witness: Optional[np.ndarray] = None
    method: str = "theorem"
    label: str = ""

    def __bool__(self):
        return self.maximal


def is_maximal_q_positive(A: Subspace, tol: Tolerance = DEFAULT_TOL) -> MaximalityVerdict:
    """Decide maximality of a q-positive linear subspace via its complement.

    ``A`` is maximal iff ``A^0`` is q-negative.  When it is not, the witness is
    the unit top eigenvector of ``q`` restricted to ``A^0``: it satisfies
    ``q(c) > 0`` and ``[a, c] = 0`` on ``A``, so ``A + span{c}`` stays q-positive.

    Raises
    ------
    NotQPositive
    """
    if not is_q_positive(A, tol):
        raise NotQPositive("subspace is not q-positive")
    C = q_complement(A, tol)
    if C.k == 0:
        return MaximalityVerdict(True, method="theorem", label="maximal")
    lam, V = np.linalg.eigh(C.reduced_form())
    if lam[-1] <= _form_scale(A.space, tol):
        return MaximalityVerdict(True, method="theorem", label="maximal")
    c = C.basis @ V[:, -1]
    c = c / np.linalg.norm(c)
    return MaximalityVerdict(False, witness=c, method="theorem", label="non-maximal")


def is_maximal_q_negative(A: Subspace, tol: Tolerance = DEFAULT_TOL) -> MaximalityVerdict:
    """Maximal q-negativity is maximal (-q)-positivity.

    Raises
    ------
    NotQNegative
    """
    if not is_q_negative(A, tol):
        raise NotQNegative("subspace is not q-negative")
    return is_maximal_q_positive(A.on(negate(A.space)), tol)


def maximality_oracle(
    A: Subspace,
    trials: int = 2000,
    seed: int = 42,
    tol: Tolerance = DEFAULT_TOL,
) -> MaximalityVerdict:
    """Randomized, one-sided search for a q-positive extension of ``A``.

    Draws ``trials`` Gaussian points scaled by ``1 + |P|``.  Each draw is
    reduced to its unit component orthogonal to ``A`` (which spans the same
    extension and makes the ``>= -atol`` test scale-free), and the first one
    with ``inf q(A - c) >= -atol`` is returned as a witness.  Never certifies
    maximality; the positive label is ``"maximal-probable"``.

    Raises
    ------
    NotQPositive
    """
    if not is_q_positive(A, tol):
        raise NotQPositive("subspace is not q-positive")
    S = A.space
    rng = np.random.default_rng(seed)
    scale = 1.0 + float(np.linalg.norm(S.P, 2))
    cs = scale * rng.standard_normal((int(trials), S.n))
    perp = cs - (cs @ A.basis) @ A.basis.T
    norms = np.linalg.norm(perp, axis=1)
    outside = norms > tol.atol * (1.0 + np.linalg.norm(cs, axis=1))
    if not np.any(outside):
        return MaximalityVerdict(True, method="oracle", label="maximal-probable")
    units = perp[outside] / norms[outside, None]
    vals = _TranslateInfimum(A, tol)(units)
    hits = np.nonzero(vals >= -tol.atol)[0]
    if hits.size == 0:
        return MaximalityVerdict(True, method="oracle", label="maximal-probable")
    return MaximalityVerdict(False, witness=units[hits[0]].copy(), method="oracle", label="non-maximal")


def _check_same_space(A1: Subspace, A2: Subspace, tol: Tolerance):
    if not A1.space.same_as(A2.space, tol):
        raise SpaceMismatch("subspaces belong to different spaces")


def subspace_sum(A1: Subspace, A2: Subspace, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    _check_same_space(A1, A2, tol)
    return Subspace(A1.space, orth(np.hstack([A1.basis, A2.basis]), tol))


def subspace_intersection(A1: Subspace, A2: Subspace, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """Common null space of ``I - P1`` and ``I - P2`` (projector form)."""
    _check_same_space(A1, A2, tol)
    I = np.eye(A1.n)
    stacked = np.vstack([I - A1.projector(), I - A2.projector()])
    return Subspace(A1.space, nullspace(stacked, tol))
