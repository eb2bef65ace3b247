"""Convex quadratics restricted to affine subspaces.

A :class:`QuadraticFunctional` is ``f(x) = x^T H x / 2 + l^T x + kappa`` on
``offset + span(dom_basis)`` and ``+inf`` elsewhere.  The family contains the
restricted forms ``q_A``, is closed under the pairing translation
``f_c = f(. + c) - [., c] - q(c)``, and its conjugates with respect to the
pairing are computed exactly.

Extended reals are plain floats: ``math.inf`` marks an infinite value and is
only ever produced as a result, never fed into linear algebra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

import numpy as np
import scipy.linalg

from .core import DEFAULT_TOL, SsdbSpace, Tolerance, as_vector, bracket, q
from .errors import IndefiniteDomain, NotQPositive
from .subspaces import (
    Subspace,
    _form_scale,
    contains,
    is_q_positive,
    q_complement,
    spectral_cutoff,
)


@dataclass(frozen=True, eq=False)
class QuadraticFunctional:
    space: SsdbSpace
    dom_basis: np.ndarray
    dom_offset: np.ndarray
    H: np.ndarray
    l: np.ndarray
    kappa: float = 0.0

    def __post_init__(self):
        n = self.space.n
        fields = {
            "dom_basis": np.array(self.dom_basis, dtype=float).reshape(n, -1),
            "dom_offset": as_vector(self.space, self.dom_offset).copy(),
            "H": np.array(self.H, dtype=float).reshape(n, n),
            "l": as_vector(self.space, self.l).copy(),
        }
        for name, value in fields.items():
            value.setflags(write=False)
            object.__setattr__(self, name, value)
        object.__setattr__(self, "kappa", float(self.kappa))

    @property
    def domain(self) -> Subspace:
        """The linear part of the domain."""
        return Subspace(self.space, self.dom_basis)

    def reduced(self) -> Tuple[np.ndarray, np.ndarray, float]:
        """Coefficients of ``z -> f(offset + B z)``: ``(M, g, f(offset))``."""
        B, o = self.dom_basis, self.dom_offset
        M = B.T @ self.H @ B
        M = 0.5 * (M + M.T)
        g = B.T @ (self.H @ o + self.l)
        return M, g, self._value(o)

    def is_psd_reduced(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        M, _, _ = self.reduced()
        return M.size == 0 or bool(np.linalg.eigvalsh(M)[0] >= -_form_scale(self.space, tol))

    def _value(self, x: np.ndarray) -> float:
        return float(0.5 * x @ self.H @ x + self.l @ x + self.kappa)


def make_qA(A: Subspace) -> QuadraticFunctional:
    """``q`` on ``A`` and ``+inf`` off ``A``."""
    n = A.n
    return QuadraticFunctional(A.space, A.basis, np.zeros(n), A.space.P, np.zeros(n), 0.0)


def in_domain(f: QuadraticFunctional, x, tol: Tolerance = DEFAULT_TOL) -> bool:
    return _offset_ok(f, as_vector(f.space, x), tol)


def _offset_ok(f: QuadraticFunctional, x: np.ndarray, tol: Tolerance) -> bool:
    B = f.dom_basis
    y = x - f.dom_offset
    resid = float(np.linalg.norm(y - B @ (B.T @ y)))
    return resid <= tol.atol * (1.0 + float(np.linalg.norm(x)) + float(np.linalg.norm(f.dom_offset)))


def evaluate(f: QuadraticFunctional, x, tol: Tolerance = DEFAULT_TOL) -> float:
    """``f(x)``, or ``math.inf`` off the domain."""
    x = as_vector(f.space, x)
    if not _offset_ok(f, x, tol):
        return math.inf
    return f._value(x)


def translate(f: QuadraticFunctional, c) -> QuadraticFunctional:
    """``f_c(x) = f(x + c) - [x, c] - q(c)`` in closed form."""
    S = f.space
    c = as_vector(S, c)
    H, l = f.H, f.l
    return QuadraticFunctional(
        S,
        f.dom_basis,
        f.dom_offset - c,
        H,
        l + H @ c - S.P @ c,
        f.kappa + 0.5 * float(c @ H @ c) + float(l @ c) - q(S, c),
    )


@dataclass(frozen=True)
class ConjugateValue:
    value: float
    maximizer: Optional[np.ndarray] = None


def conjugate(f: QuadraticFunctional, d, tol: Tolerance = DEFAULT_TOL) -> ConjugateValue:
    """``f^@(d) = sup_x [x, d] - f(x)`` with its least-norm maximizer when finite.

    Works in domain coordinates ``x = offset + B z``: the objective is
    ``const + w^T z - z^T M z / 2``.  The sup is ``+inf`` when ``M`` has a
    negative eigenvalue or ``w`` leaves the range of ``M``.
    """
    S = f.space
    d = as_vector(S, d)
    B, o = f.dom_basis, f.dom_offset
    M, g, f_o = f.reduced()
    Pd = S.P @ d
    const = float(o @ Pd) - f_o
    if B.shape[1] == 0:
        return ConjugateValue(const, o.copy())
    w = B.T @ Pd - g
    lam, V = np.linalg.eigh(M)
    if lam[0] < -_form_scale(S, tol):
        return ConjugateValue(math.inf)
    keep = lam > spectral_cutoff(lam, S, tol)
    Vk, lk = V[:, keep], lam[keep]
    coef = Vk.T @ w
    if np.linalg.norm(w - Vk @ coef) > tol.atol * (1.0 + np.linalg.norm(w)):
        return ConjugateValue(math.inf)
    z = Vk @ (coef / lk)
    return ConjugateValue(const + 0.5 * float(coef @ (coef / lk)), o + B @ z)


def conjugate_eval(f: QuadraticFunctional, d, tol: Tolerance = DEFAULT_TOL) -> float:
    return conjugate(f, d, tol).value


def euclidean_conjugate_eval(f: QuadraticFunctional, y, tol: Tolerance = DEFAULT_TOL) -> float:
    """Classical conjugate ``f*(y) = sup_x <x, y> - f(x)`` via the KKT system.

    Independent of :func:`conjugate`: the affine domain is written as
    ``N^T (x - offset) = 0`` with ``N`` spanning its orthogonal complement, and
    the stationarity system is solved in the ambient space by least squares.
    The pairing conjugate satisfies ``f^@(d) = f*(P d)``.
    """
    S = f.space
    y = as_vector(S, y)
    n = S.n
    B = f.dom_basis
    N = scipy.linalg.null_space(B.T, rcond=tol.rank) if B.shape[1] else np.eye(n)
    m = N.shape[1]
    H = 0.5 * (f.H + f.H.T)
    # curvature along the domain must be >= 0 for a finite sup
    if B.shape[1] and np.linalg.eigvalsh(B.T @ H @ B)[0] < -_form_scale(S, tol):
        return math.inf
    K = np.block([[H, N], [N.T, np.zeros((m, m))]])
    rhs = np.concatenate([y - f.l, N.T @ f.dom_offset])
    sol, *_ = np.linalg.lstsq(K, rhs, rcond=None)
    if np.linalg.norm(K @ sol - rhs) > tol.atol * (1.0 + np.linalg.norm(rhs)) * (1.0 + np.linalg.norm(K, 2)):
        return math.inf
    x = sol[:n]
    return float(x @ y) - f._value(x)


@dataclass
class TranslationReport:
    """Max residuals of the translation identities over sampled points.

    ``conj_shift``: ``(f_c)^@(b)`` against ``f^@(b + c) - [c, b] - q(c)``.
    ``young_shift``: ``f_c(b) + f_c^@(d) - [b, d]`` against the same
    expression for ``f`` at ``(b + c, d + c)``.  Residuals are relative to
    ``1 + max |term|``.  ``inf_mismatches`` counts points where one side is
    infinite and the other is not.
    """

    conj_shift: float = 0.0
    young_shift: float = 0.0
    inf_mismatches: int = 0
    finite_points: int = 0

    def ok(self, tol: float) -> bool:
        return self.inf_mismatches == 0 and max(self.conj_shift, self.young_shift) <= tol


def _rel_gap(lhs: float, rhs: float, *terms: float) -> Optional[float]:
    if math.isinf(lhs) or math.isinf(rhs):
        return None if (math.isinf(lhs) and math.isinf(rhs)) else math.nan
    scale = 1.0 + max([abs(lhs), abs(rhs)] + [abs(t) for t in terms])
    return abs(lhs - rhs) / scale


def verify_translation_identities(
    f: QuadraticFunctional,
    c,
    sample_points: Iterable[Tuple[np.ndarray, np.ndarray]],
    tol: Tolerance = DEFAULT_TOL,
) -> TranslationReport:
    """Check both translation identities at each sampled ``(b, d)``.

    Raises
    ------
    IndefiniteDomain
        If ``f`` is not convex on its domain.
    """
    if not f.is_psd_reduced(tol):
        raise IndefiniteDomain("functional is not convex on its domain")
    S = f.space
    c = as_vector(S, c)
    fc = translate(f, c)
    qc = q(S, c)
    report = TranslationReport()

    def record(attr, gap):
        if gap is None:
            return
        if math.isnan(gap):
            report.inf_mismatches += 1
            return
        report.finite_points += 1
        setattr(report, attr, max(getattr(report, attr), gap))

    for b, d in sample_points:
        b = as_vector(S, b)
        d = as_vector(S, d)
        fc_at_b = conjugate_eval(fc, b, tol)
        f_at_bc = conjugate_eval(f, b + c, tol)
        cb = bracket(S, c, b)
        rhs = f_at_bc - cb - qc if math.isfinite(f_at_bc) else math.inf
        record("conj_shift", _rel_gap(fc_at_b, rhs, f_at_bc, cb, qc))

        e1, e2 = evaluate(fc, b, tol), conjugate_eval(fc, d, tol)
        e3, e4 = evaluate(f, b + c, tol), conjugate_eval(f, d + c, tol)
        bd, bcdc = bracket(S, b, d), bracket(S, b + c, d + c)
        lhs = e1 + e2 - bd if math.isfinite(e1 + e2) else math.inf
        rhs = e3 + e4 - bcdc if math.isfinite(e3 + e4) else math.inf
        record("young_shift", _rel_gap(lhs, rhs, e1, e2, e3, e4, bd, bcdc))
    return report


def young_gap(f: QuadraticFunctional, x, d, tol: Tolerance = DEFAULT_TOL) -> float:
    """``f(x) + f^@(d) - [x, d]``; nonnegative up to rounding, ``inf`` off-domain."""
    fx = evaluate(f, x, tol)
    fd = conjugate_eval(f, d, tol)
    if math.isinf(fx) or math.isinf(fd):
        return math.inf
    return fx + fd - bracket(f.space, x, d)


def check_contact_complement(A: Subspace, b, d, tol: Tolerance = DEFAULT_TOL) -> bool:
    """If ``q_A(b) + q_A^@(d) = [b, d]`` then ``b - d`` must lie in ``A^0``.

    Returns the implication's truth value (vacuously true when the
    Fenchel-Young equality fails).

    Raises
    ------
    NotQPositive
    """
    if not is_q_positive(A, tol):
        raise NotQPositive("q_A is only convex on a q-positive subspace")
    S = A.space
    b = as_vector(S, b)
    d = as_vector(S, d)
    fA = make_qA(A)
    gap = young_gap(fA, b, d, tol)
    if math.isinf(gap):
        return True
    scale = tol.atol * (1.0 + float(b @ b) + float(d @ d))
    if abs(gap) > scale:
        return True
    return contains(q_complement(A, tol), b - d, tol)
