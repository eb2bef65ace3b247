"""Seeded random instances for property tests and the acceptance suite.

Every q-positive subspace of ``(R^n, P)`` is the graph of a contraction from
a subspace ``W`` of the ``+1`` eigenspace of ``P`` into the ``-1`` eigenspace,
and it is maximal exactly when ``W`` is the whole ``+1`` eigenspace.  The
generators below use that description, so each instance carries a known
ground-truth verdict that does not come from the code under test.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .core import SsdbSpace, anti_hilbert, hilbert, product, r3_swap
from .relations import relation_from_graph
from .subspaces import Subspace, orth


@dataclass
class Instance:
    space: SsdbSpace
    sub: Subspace
    maximal: bool
    kind: str


def random_orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    return Q * np.sign(np.diag(R))


def random_space(rng: np.random.Generator, n: int, plus: Optional[int] = None) -> SsdbSpace:
    """``P = Q diag(+1 x plus, -1 x rest) Q^T`` for a random orthogonal ``Q``."""
    if plus is None:
        plus = int(rng.integers(0, n + 1))
    Q = random_orthogonal(rng, n)
    signs = np.array([1.0] * plus + [-1.0] * (n - plus))
    P = (Q * signs) @ Q.T
    return SsdbSpace(0.5 * (P + P.T), name=f"random({n},+{plus})")


def eigenspaces(S: SsdbSpace):
    lam, V = np.linalg.eigh(S.P)
    return V[:, lam > 0], V[:, lam < 0]


def random_contraction(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    """A matrix of spectral norm at most one; norm exactly one a third of the time."""
    if rows == 0 or cols == 0:
        return np.zeros((rows, cols))
    G = rng.standard_normal((rows, cols))
    G /= np.linalg.norm(G, 2)
    u = rng.random()
    return G if u < 1 / 3 else G * rng.uniform(0.0, 0.95)


def random_q_positive(rng: np.random.Generator, S: SsdbSpace, maximal: bool) -> Subspace:
    Up, Um = eigenspaces(S)
    p, m = Up.shape[1], Um.shape[1]
    w = p if maximal else int(rng.integers(0, p)) if p > 0 else 0
    if not maximal and p == 0:
        raise ValueError("every q-positive subspace is maximal when P = -I")
    W = random_orthogonal(rng, p)[:, :w] if p else np.zeros((0, 0))
    T = random_contraction(rng, m, w)
    gens = Up @ W + Um @ T if w else np.zeros((S.n, 0))
    return Subspace(S, orth(gens) if w else gens)


def random_monotone_matrix(rng: np.random.Generator, n: int) -> np.ndarray:
    """``G G^T`` (possibly rank deficient or zero) plus a skew part."""
    kind = rng.integers(0, 4)
    r = int(rng.integers(0, n + 1))
    G = rng.standard_normal((n, r))
    K = rng.standard_normal((n, n))
    sym = G @ G.T * rng.uniform(0.1, 2.0)
    skew = (K - K.T) * rng.uniform(0.1, 2.0)
    if kind == 0:
        return skew
    if kind == 1:
        return sym
    return sym + skew


def random_nonmonotone_matrix(rng: np.random.Generator, n: int) -> np.ndarray:
    S = random_monotone_matrix(rng, n)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    shift = np.linalg.eigvalsh(0.5 * (S + S.T))[-1] + rng.uniform(0.5, 2.0)
    return S - shift * np.outer(v, v)


def _relation_instance(rng: np.random.Generator, n: int) -> Instance:
    S = product(n)
    kind = rng.integers(0, 4)
    if kind == 0:
        M = random_monotone_matrix(rng, n)
        return Instance(S, relation_from_graph(M).sub, True, "graph")
    if kind == 1:
        # a proper subspace of a monotone graph is monotone but not maximal
        M = random_monotone_matrix(rng, n)
        j = int(rng.integers(0, n))
        X = rng.standard_normal((n, j))
        gens = np.vstack([X, M @ X]) if j else np.zeros((2 * n, 0))
        return Instance(S, Subspace(S, orth(gens) if j else gens), False, "subgraph")
    if kind == 2:
        gens = np.vstack([np.zeros((n, n)), np.eye(n)])
        return Instance(S, Subspace(S, gens), True, "zero_x_dual")
    gens = np.vstack([np.eye(n), np.zeros((n, n))])
    return Instance(S, Subspace(S, gens), True, "primal_x_zero")


def instance_fleet(seed: int, count: int, dims=(2, 3, 4, 5, 6)) -> Iterator[Instance]:
    """Mixed fleet of (space, q-positive subspace) pairs with known maximality."""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.choice(dims))
        roll = rng.random()
        if roll < 0.2 and n % 2 == 0:
            yield _relation_instance(rng, n // 2)
            continue
        if roll < 0.3:
            S = {0: hilbert, 1: anti_hilbert}[int(rng.integers(0, 2))](n)
            if n == 3 and rng.random() < 0.5:
                S = r3_swap()
        else:
            S = random_space(rng, n)
        p = eigenspaces(S)[0].shape[1]
        maximal = True if p == 0 else bool(rng.random() < 0.5)
        yield Instance(S, random_q_positive(rng, S, maximal), maximal, "contraction")


def maximal_fleet(seed: int, count: int, dims=(2, 3, 4, 5, 6)) -> Iterator[Instance]:
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.choice(dims))
        if n % 2 == 0 and rng.random() < 0.25:
            M = random_monotone_matrix(rng, n // 2)
            yield Instance(product(n // 2), relation_from_graph(M).sub, True, "graph")
            continue
        S = random_space(rng, n)
        yield Instance(S, random_q_positive(rng, S, True), True, "contraction")
