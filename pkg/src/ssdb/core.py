"""Finite-dimensional SSDB spaces.

A space is ``R^n`` with the Euclidean norm and a pairing ``[b, c] = b^T P c``
where ``P`` is symmetric and involutive.  Under the Euclidean norm these are
exactly the matrices for which ``c -> P c`` is an isometry of ``R^n`` onto its
dual that reproduces the pairing, so every structure the library handles is
described by one such matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NotInvolutive, NotSymmetric, SsdbError


@dataclass(frozen=True)
class Tolerance:
    """Absolute-plus-relative tolerances used by every boolean check.

    Attributes
    ----------
    atol : float
        Base tolerance; checks compare against ``atol * (1 + magnitude)``.
    rank : float
        Singular-value (or eigenvalue) cutoff as a fraction of the largest one.
    """

    atol: float = 1e-9
    rank: float = 1e-10

    def __post_init__(self):
        for name in ("atol", "rank"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"tolerance {name} must be finite and >= 0, got {value!r}")


DEFAULT_TOL = Tolerance()


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SsdbSpace:
    """An SSDB structure on ``R^n`` given by its pairing matrix.

    Build instances with :func:`validate_space` or one of the builders;
    the constructor itself does not check the invariants.
    """

    P: np.ndarray
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "P", _frozen(self.P))

    @property
    def n(self) -> int:
        return self.P.shape[0]

    def same_as(self, other: "SsdbSpace", tol: Tolerance = DEFAULT_TOL) -> bool:
        if self.n != other.n:
            return False
        return float(np.max(np.abs(self.P - other.P), initial=0.0)) <= tol.atol

    def __repr__(self):
        return f"SsdbSpace(n={self.n}, name={self.name!r})"


def as_vector(S: SsdbSpace, b) -> np.ndarray:
    """Coerce ``b`` to a float vector of the space's dimension."""
    v = np.asarray(b, dtype=float)
    if v.shape != (S.n,):
        raise DimensionMismatch(f"expected a vector of length {S.n}, got shape {v.shape}")
    return v


def validate_space(P, tol: Tolerance = DEFAULT_TOL, name: str = "custom") -> SsdbSpace:
    """Check that ``P`` is a symmetric involution and wrap it as a space.

    Raises
    ------
    NotSymmetric
        If ``max|P - P^T| > atol * (1 + max|P|)``.
    NotInvolutive
        If ``max|P P - I| > atol * (1 + max|P|)^2``.
    """
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise DimensionMismatch(f"pairing matrix must be square, got shape {P.shape}")
    if P.shape[0] == 0:
        raise SsdbError("the space must be nonzero (n >= 1)")
    if not np.all(np.isfinite(P)):
        raise ValueError("pairing matrix has non-finite entries")
    size = 1.0 + float(np.max(np.abs(P)))
    asym = float(np.max(np.abs(P - P.T)))
    if asym > tol.atol * size:
        raise NotSymmetric(f"pairing is not symmetric: max|P - P^T| = {asym:.3e}")
    defect = float(np.max(np.abs(P @ P - np.eye(P.shape[0]))))
    if defect > tol.atol * size**2:
        raise NotInvolutive(f"pairing is not involutive: max|P^2 - I| = {defect:.3e}")
    return SsdbSpace(P, name=name)


def bracket(S: SsdbSpace, b, c) -> float:
    """The symmetric pairing ``b^T P c``."""
    return float(as_vector(S, b) @ S.P @ as_vector(S, c))


def q(S: SsdbSpace, b) -> float:
    """The quadratic form ``q(b) = [b, b] / 2``."""
    return 0.5 * bracket(S, b, b)


def iota(S: SsdbSpace, c) -> np.ndarray:
    """The duality map ``c -> P c`` (dual vectors identified with ``R^n``)."""
    return S.P @ as_vector(S, c)


def g0(b) -> float:
    """Half the squared Euclidean norm."""
    b = np.asarray(b, dtype=float)
    return 0.5 * float(b @ b)


def negate(S: SsdbSpace) -> SsdbSpace:
    """The space with pairing ``-P``; ``q`` becomes ``-q``."""
    return SsdbSpace(-S.P, name=_negated_name(S.name))


def _negated_name(name: str) -> str:
    return name[len("neg:"):] if name.startswith("neg:") else "neg:" + name


def in_null_set(S: SsdbSpace, b, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Membership in the null set ``{b : g0(b) + q(b) = 0}``.

    ``g0 + q`` is never negative, so only the upper side needs a tolerance.
    """
    b = as_vector(S, b)
    return g0(b) + q(S, b) <= tol.atol * (1.0 + float(b @ b))


def subdiff_g0_check(S: SsdbSpace, b, c, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Test ``g0(b) + g0(c) = [b, c]``, i.e. ``iota(c)`` is a subgradient of g0 at b.

    The defect ``g0(b) + g0(c) - [b, c]`` equals ``|b - P c|^2 / 2``, so this
    accepts exactly when ``|iota(c) - b| <= subdiff_radius(b, c, tol)``.
    """
    b = as_vector(S, b)
    c = as_vector(S, c)
    defect = g0(b) + g0(c) - bracket(S, b, c)
    return abs(defect) <= _subdiff_scale(b, c, tol)


def _subdiff_scale(b, c, tol: Tolerance) -> float:
    return tol.atol * (1.0 + float(b @ b) + float(c @ c))


def subdiff_radius(b, c, tol: Tolerance = DEFAULT_TOL) -> float:
    """Distance ``|iota(c) - b|`` below which :func:`subdiff_g0_check` accepts."""
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    return math.sqrt(2.0 * _subdiff_scale(b, c, tol))


def _check_n(n: int) -> int:
    if int(n) != n or n <= 0:
        raise SsdbError(f"dimension must be a positive integer, got {n!r}")
    return int(n)


def hilbert(n: int) -> SsdbSpace:
    """``R^n`` with the Euclidean inner product as pairing."""
    return SsdbSpace(np.eye(_check_n(n)), name=f"hilbert({n})")


def anti_hilbert(n: int) -> SsdbSpace:
    """``R^n`` with the negated inner product; q-positive sets are singletons."""
    return SsdbSpace(-np.eye(_check_n(n)), name=f"anti_hilbert({n})")


def r3_swap() -> SsdbSpace:
    """``R^3`` with ``[b, c] = b1 c2 + b2 c1 + b3 c3``, so ``q(b) = b1 b2 + b3^2 / 2``."""
    P = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
    return SsdbSpace(P, name="r3_swap")


def product(n: int) -> SsdbSpace:
    """``E x E*`` for ``E = R^n``, coordinates ``(x, x*)``, ``q(x, x*) = <x, x*>``."""
    n = _check_n(n)
    Z, I = np.zeros((n, n)), np.eye(n)
    return SsdbSpace(np.block([[Z, I], [I, Z]]), name=f"product({n})")


def _r3_builder(n: int = 3) -> SsdbSpace:
    if n != 3:
        raise SsdbError(f"the r3_swap space has dimension 3, got n={n!r}")
    return r3_swap()


# keys are the "builder" values accepted in space documents
BUILDERS = {
    "hilbert": hilbert,
    "anti_hilbert": anti_hilbert,
    "paper_r3": _r3_builder,
    "product": product,
}
