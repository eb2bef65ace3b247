import math

import numpy as np
import pytest
import scipy.optimize
from hypothesis import given, settings
from hypothesis import strategies as st

from ssdb.core import bracket, g0, hilbert, iota, product, q, r3_swap
from ssdb.errors import IndefiniteDomain, NotQPositive
from ssdb.fleet import instance_fleet, random_space
from ssdb.functionals import (
    QuadraticFunctional,
    check_contact_complement,
    conjugate,
    conjugate_eval,
    euclidean_conjugate_eval,
    evaluate,
    in_domain,
    make_qA,
    translate,
    verify_translation_identities,
    young_gap,
)
from ssdb.subspaces import make_subspace, whole_space, zero_subspace

U = np.array([1.0, -1.0, 2.0])


def random_functional(rng, n=None):
    """Either q_A for a q-positive A, or a PSD quadratic on a random affine set."""
    if rng.random() < 0.5:
        inst = next(instance_fleet(int(rng.integers(2**31)), 1))
        return make_qA(inst.sub)
    n = n or int(rng.integers(2, 7))
    S = random_space(rng, n)
    k = int(rng.integers(0, n + 1))
    D = make_subspace(S, rng.standard_normal((k, n)))
    G = rng.standard_normal((n, int(rng.integers(0, n + 1))))
    return QuadraticFunctional(S, D.basis, rng.standard_normal(n), G @ G.T,
                               rng.standard_normal(n), rng.standard_normal())


class TestQA:
    def test_whole_hilbert_is_g0(self):
        f = make_qA(whole_space(hilbert(3)))
        x = np.array([0.3, -2.0, 1.5])
        assert evaluate(f, x) == pytest.approx(g0(x), abs=1e-15)

    def test_zero_subspace_indicator(self):
        f = make_qA(zero_subspace(hilbert(2)))
        assert evaluate(f, [0, 0]) == 0.0
        assert evaluate(f, [1e-3, 0]) == math.inf

    @pytest.mark.parametrize("t", [-2.0, 0.5, 3.0])
    def test_r3_line(self, t):
        # q(t, -t, 2t) = -t^2 + 2 t^2 = t^2
        f = make_qA(make_subspace(r3_swap(), [U]))
        assert evaluate(f, t * U) == pytest.approx(t * t, abs=1e-12)


class TestEvaluate:
    def test_on_and_off_domain(self):
        f = make_qA(make_subspace(r3_swap(), [U]))
        assert evaluate(f, U) == pytest.approx(1.0)
        assert evaluate(f, [1, 1, 0]) == math.inf

    def test_constant(self):
        S = hilbert(3)
        f = QuadraticFunctional(S, np.eye(3), np.zeros(3), np.zeros((3, 3)), np.zeros(3), 2.5)
        assert evaluate(f, [7, -1, 3]) == 2.5


class TestTranslate:
    def test_zero_shift_is_identity(self):
        f = random_functional(np.random.default_rng(0))
        g = translate(f, np.zeros(f.space.n))
        for name in ("dom_basis", "dom_offset", "H", "l"):
            np.testing.assert_array_equal(getattr(g, name), getattr(f, name))
        assert g.kappa == f.kappa

    def test_domain_shifts(self):
        A = make_subspace(r3_swap(), [U])
        c = np.array([1.0, 2.0, 3.0])
        fc = translate(make_qA(A), c)
        assert in_domain(fc, 2 * U - c)
        assert not in_domain(fc, 2 * U)

    @pytest.mark.parametrize("seed", range(25))
    def test_two_sided_evaluation(self, seed):
        rng = np.random.default_rng(seed)
        f = random_functional(rng)
        S, n = f.space, f.space.n
        c = rng.standard_normal(n)
        fc = translate(f, c)
        x = fc.dom_offset + fc.dom_basis @ rng.standard_normal(fc.dom_basis.shape[1])
        expected = evaluate(f, x + c) - bracket(S, x, c) - q(S, c)
        assert evaluate(fc, x) == pytest.approx(expected, rel=1e-12, abs=1e-12)

    @pytest.mark.parametrize("seed", range(10))
    def test_group_action(self, seed):
        rng = np.random.default_rng(seed)
        f = random_functional(rng)
        c1, c2 = rng.standard_normal((2, f.space.n))
        g1 = translate(translate(f, c1), c2)
        g2 = translate(f, c1 + c2)
        for name in ("dom_offset", "H", "l"):
            np.testing.assert_allclose(getattr(g1, name), getattr(g2, name), atol=1e-9)
        assert g1.kappa == pytest.approx(g2.kappa, abs=1e-9)


class TestConjugate:
    def test_hilbert_g0(self):
        f = make_qA(whole_space(hilbert(3)))
        d = np.array([1.0, -2.0, 0.5])
        assert conjugate_eval(f, d) == pytest.approx(0.5 * d @ d, abs=1e-12)

    def test_indicator_of_origin(self):
        f = make_qA(zero_subspace(r3_swap()))
        assert conjugate_eval(f, [3, 1, -2]) == 0.0

    def test_r3_line_at_u(self):
        # sup_t [t u, u] - t^2 = 2t - t^2, value 1 at t = 1
        f = make_qA(make_subspace(r3_swap(), [U]))
        cv = conjugate(f, U)
        assert cv.value == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(cv.maximizer, U, atol=1e-12)
        # Fenchel-Young equality at (u, u)
        assert evaluate(f, U) + cv.value == pytest.approx(bracket(r3_swap(), U, U))

    def test_unbounded_direction(self):
        # q vanishes on {0} x R and [(0, s), d] = s d1, so the sup is +inf iff d1 != 0
        f = make_qA(make_subspace(product(1), [[0, 1]]))
        assert conjugate_eval(f, [1, 0]) == math.inf
        assert conjugate_eval(f, [0, 1]) == 0.0

    def test_indefinite_domain_is_inf(self):
        f = make_qA(make_subspace(r3_swap(), [[1, -1, 0]]))
        assert conjugate_eval(f, np.zeros(3)) == math.inf
        assert euclidean_conjugate_eval(f, np.zeros(3)) == math.inf

    @pytest.mark.parametrize("seed", range(40))
    def test_matches_euclidean_route(self, seed):
        rng = np.random.default_rng(seed)
        f = random_functional(rng)
        d = rng.standard_normal(f.space.n)
        a = conjugate_eval(f, d)
        b = euclidean_conjugate_eval(f, iota(f.space, d))
        if math.isinf(a) or math.isinf(b):
            assert a == b
        else:
            assert a == pytest.approx(b, rel=1e-8, abs=1e-8)

    @pytest.mark.parametrize("seed", range(15))
    def test_matches_numerical_sup(self, seed):
        rng = np.random.default_rng(100 + seed)
        f = random_functional(rng)
        d = rng.standard_normal(f.space.n)
        cv = conjugate(f, d)
        if math.isinf(cv.value) or f.dom_basis.shape[1] == 0:
            return
        B, o = f.dom_basis, f.dom_offset

        def neg(z):
            x = o + B @ z
            return -(bracket(f.space, x, d) - evaluate(f, x))

        res = scipy.optimize.minimize(neg, np.zeros(B.shape[1]), method="BFGS", options={"gtol": 1e-10})
        assert cv.value == pytest.approx(-res.fun, rel=1e-6, abs=1e-6)


class TestTranslationIdentities:
    def test_zero_shift(self):
        f = make_qA(make_subspace(r3_swap(), [U]))
        rng = np.random.default_rng(0)
        pts = [(t * U, rng.standard_normal(3)) for t in (-1.0, 0.5, 2.0)]
        rep = verify_translation_identities(f, np.zeros(3), pts)
        assert rep.conj_shift == 0.0 and rep.young_shift == 0.0

    def test_hilbert_g0(self):
        S = hilbert(4)
        f = make_qA(whole_space(S))
        rng = np.random.default_rng(3)
        pts = [tuple(rng.standard_normal((2, 4))) for _ in range(20)]
        rep = verify_translation_identities(f, rng.standard_normal(4), pts)
        assert rep.inf_mismatches == 0 and rep.finite_points == 40
        assert max(rep.conj_shift, rep.young_shift) <= 1e-10

    def test_random_qA_family(self):
        rng = np.random.default_rng(11)
        for inst in instance_fleet(11, 100):
            f = make_qA(inst.sub)
            n = inst.space.n
            c, d = rng.standard_normal((2, n))
            b = inst.sub.basis @ rng.standard_normal(inst.sub.k) - c
            rep = verify_translation_identities(f, c, [(b, d)])
            assert rep.ok(1e-8), rep

    def test_requires_convexity(self):
        f = make_qA(make_subspace(r3_swap(), [[1, -1, 0]]))
        with pytest.raises(IndefiniteDomain):
            verify_translation_identities(f, np.zeros(3), [])


class TestContactComplement:
    def test_origin(self):
        A = make_subspace(r3_swap(), [U])
        assert check_contact_complement(A, np.zeros(3), np.zeros(3))

    def test_line_at_u(self):
        A = make_subspace(r3_swap(), [U])
        assert check_contact_complement(A, U, U)

    def test_requires_positive(self):
        with pytest.raises(NotQPositive):
            check_contact_complement(make_subspace(r3_swap(), [[1, -1, 0]]), np.zeros(3), np.zeros(3))

    def test_attained_pairs(self):
        rng = np.random.default_rng(8)
        for inst in instance_fleet(8, 100):
            A = inst.sub
            d = rng.standard_normal(A.n)
            cv = conjugate(make_qA(A), d)
            if math.isinf(cv.value):
                continue
            assert abs(young_gap(make_qA(A), cv.maximizer, d)) <= 1e-9 * (1 + d @ d)
            assert check_contact_complement(A, cv.maximizer, d)


seeds = st.integers(0, 2**31 - 1)


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_fenchel_young_inequality(seed):
    rng = np.random.default_rng(seed)
    f = random_functional(rng)
    x = f.dom_offset + f.dom_basis @ rng.standard_normal(f.dom_basis.shape[1]) if rng.random() < 0.8 \
        else rng.standard_normal(f.space.n)
    d = rng.standard_normal(f.space.n)
    gap = young_gap(f, x, d)
    assert gap >= -1e-9 * (1 + x @ x + d @ d)


@settings(max_examples=150, deadline=None)
@given(seeds, st.floats(0.01, 0.99))
def test_convexity_identity(seed, lam):
    rng = np.random.default_rng(seed)
    inst = next(instance_fleet(seed, 1))
    S = inst.space
    a, c = rng.standard_normal((2, S.n))
    lhs = lam * q(S, a) + (1 - lam) * q(S, c) - q(S, lam * a + (1 - lam) * c)
    rhs = lam * (1 - lam) * q(S, a - c)
    assert abs(lhs - rhs) <= 1e-12 * (1 + a @ a + c @ c)


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_continuity_on_domain(seed):
    rng = np.random.default_rng(seed)
    f = random_functional(rng)
    k = f.dom_basis.shape[1]
    z = rng.standard_normal(k)
    x = f.dom_offset + f.dom_basis @ z
    dz = rng.standard_normal(k)
    target = evaluate(f, x)
    vals = [evaluate(f, f.dom_offset + f.dom_basis @ (z + 10.0**-j * dz)) for j in range(2, 9)]
    errs = [abs(v - target) for v in vals]
    assert errs[-1] <= 1e-6 * (1 + abs(target))
    assert all(e2 <= e1 + 1e-12 for e1, e2 in zip(errs, errs[1:]))
