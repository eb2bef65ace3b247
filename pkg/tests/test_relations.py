import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ssdb.core import q
from ssdb.errors import DimensionMismatch, NotMonotone
from ssdb.fleet import random_monotone_matrix, random_nonmonotone_matrix
from ssdb.relations import (
    METHODS,
    adjoint,
    direct_monotone_check,
    embed,
    is_maximal_monotone,
    is_monotone,
    relation_from_graph,
    relation_from_pairs,
    rho1,
    rho1_vector,
    split,
)
from ssdb.subspaces import make_subspace, q_complement

ROT = np.array([[0.0, -1.0], [1.0, 0.0]])


def zero_x_dual(n):
    return relation_from_pairs(n, np.hstack([np.zeros((n, n)), np.eye(n)]))


def primal_x_zero(n):
    return relation_from_pairs(n, np.hstack([np.eye(n), np.zeros((n, n))]))


def random_relation(rng, n):
    """Graphs, sub-graphs and multivalued relations, monotone or not."""
    kind = rng.integers(0, 3)
    M = random_monotone_matrix(rng, n) if rng.random() < 0.6 else random_nonmonotone_matrix(rng, n)
    if kind == 0:
        return relation_from_graph(M)
    if kind == 1:
        X = rng.standard_normal((n, int(rng.integers(1, n + 1))))
        return relation_from_pairs(n, np.vstack([X, M @ X]).T)
    # random pairs, usually multivalued and usually not monotone
    k = int(rng.integers(1, 2 * n + 1))
    return relation_from_pairs(n, rng.standard_normal((k, 2 * n)))


class TestConstruction:
    def test_graph_of_identity(self):
        R = relation_from_graph(np.eye(2))
        expected = make_subspace(R.space, [[1, 0, 1, 0], [0, 1, 0, 1]])
        assert R.sub.equals(expected)

    def test_graph_of_zero(self):
        assert relation_from_graph(np.zeros((3, 3))).sub.equals(primal_x_zero(3).sub)

    def test_rotation_graph_dimension(self):
        R = relation_from_graph(ROT)
        assert R.n == 2 and R.sub.k == 2

    def test_embed_split(self):
        v = embed([1, 0], [2, 3])
        np.testing.assert_array_equal(v, [1, 0, 2, 3])
        x, xs = split(v)
        np.testing.assert_array_equal(x, [1, 0])
        np.testing.assert_array_equal(xs, [2, 3])
        with pytest.raises(DimensionMismatch):
            embed([1], [1, 2])
        with pytest.raises(DimensionMismatch):
            split([1, 2, 3])

    def test_q_of_embedding_is_duality(self):
        R = relation_from_graph(np.eye(2))
        assert q(R.space, embed([1, 0], [2, 3])) == 2.0
        assert q(R.space, embed([1, 5], [0, 0])) == 0.0


class TestRho1:
    def test_involution(self):
        rng = np.random.default_rng(0)
        R = relation_from_graph(rng.standard_normal((3, 3)))
        assert rho1(rho1(R)).sub.equals(R.sub)

    def test_graph_image(self):
        # {(-x, M x)} = {(y, -M y)}
        rng = np.random.default_rng(1)
        M = rng.standard_normal((2, 2))
        assert rho1(relation_from_graph(M)).sub.equals(relation_from_graph(-M).sub)

    def test_flips_q(self):
        rng = np.random.default_rng(2)
        R = relation_from_graph(np.eye(3))
        for v in rng.standard_normal((50, 6)):
            assert q(R.space, rho1_vector(v)) == pytest.approx(-q(R.space, v), abs=1e-14)


class TestAdjoint:
    @pytest.mark.parametrize("seed", range(10))
    def test_graph_transpose(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 5))
        M = rng.standard_normal((n, n))
        assert adjoint(relation_from_graph(M)).sub.distance(relation_from_graph(M.T).sub) <= 1e-10

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_multivalued_self_adjoint(self, n):
        assert adjoint(zero_x_dual(n)).sub.equals(zero_x_dual(n).sub)
        assert adjoint(primal_x_zero(n)).sub.equals(primal_x_zero(n).sub)

    def test_empty_relation(self):
        R = relation_from_pairs(2, [])
        assert adjoint(R).sub.k == 4


class TestMonotone:
    def test_rotation(self):
        assert is_monotone(relation_from_graph(ROT), cross_check=True)

    def test_negative_identity(self):
        assert not is_monotone(relation_from_graph(-np.eye(2)), cross_check=True)

    def test_zero_x_dual(self):
        assert is_monotone(zero_x_dual(3), cross_check=True)


class TestMaximalMonotone:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    @pytest.mark.parametrize("method", METHODS)
    def test_skew_graphs(self, n, method):
        rng = np.random.default_rng(n)
        K = rng.standard_normal((n, n))
        assert is_maximal_monotone(relation_from_graph(K - K.T), method=method)

    @pytest.mark.parametrize("method", METHODS)
    def test_multivalued(self, method):
        assert is_maximal_monotone(zero_x_dual(2), method=method)
        assert is_maximal_monotone(primal_x_zero(2), method=method)

    def test_negative_identity_rejected(self):
        with pytest.raises(NotMonotone):
            is_maximal_monotone(relation_from_pairs(1, [[1, -1]]))

    @pytest.mark.parametrize("method", METHODS)
    def test_proper_subrelation_not_maximal(self, method):
        R = relation_from_pairs(2, [[1, 0, 1, 0]])
        assert not is_maximal_monotone(R, method=method)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            is_maximal_monotone(zero_x_dual(1), method="bogus")


seeds = st.integers(0, 2**31 - 1)


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_complement_is_reflected_adjoint(seed):
    rng = np.random.default_rng(seed)
    R = random_relation(rng, int(rng.integers(1, 5)))
    assert q_complement(R.sub).distance(rho1(adjoint(R)).sub) <= 1e-9


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_biduality(seed):
    rng = np.random.default_rng(seed)
    R = random_relation(rng, int(rng.integers(1, 5)))
    assert adjoint(adjoint(R)).sub.distance(R.sub) <= 1e-9


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_methods_agree(seed):
    rng = np.random.default_rng(seed)
    R = random_relation(rng, int(rng.integers(1, 5)))
    if not is_monotone(R):
        return
    verdicts = {m: is_maximal_monotone(R, method=m).maximal for m in METHODS}
    assert len(set(verdicts.values())) == 1, verdicts


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_direct_and_subspace_monotonicity_agree(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    M = random_monotone_matrix(rng, n) if rng.random() < 0.5 else random_nonmonotone_matrix(rng, n)
    R = relation_from_graph(M)
    assert is_monotone(R) == direct_monotone_check(R, seed=seed)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_monotone_set_times_line(seed):
    from ssdb.core import r3_swap
    from ssdb.subspaces import PointSet, is_q_positive_pointset

    rng = np.random.default_rng(seed)
    # a finite monotone subset of R^2: points on an increasing curve
    xs = np.sort(rng.standard_normal(int(rng.integers(1, 6))))
    ys = np.cumsum(rng.random(xs.size)) + xs
    ts = rng.standard_normal(4) * 3
    pts = [[x, y, t] for x, y in zip(xs, ys) for t in ts]
    ok, _ = is_q_positive_pointset(PointSet(r3_swap(), pts))
    assert ok


def test_line_projection_not_monotone():
    from ssdb.core import product
    from ssdb.subspaces import PointSet, is_q_positive_pointset

    ok, w = is_q_positive_pointset(PointSet(product(1), [[t, -t] for t in (0.0, 1.0, 2.5)]))
    assert not ok and w.value == pytest.approx(-1.0)
