import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pgaspin.algebra import algebra, exp_bivector
from pgaspin.decomposition import (
    bivector_split,
    gauge_pair,
    invariant_decompose,
    orthogonalize_factorization,
    polar_decompose,
    rotor_log,
    sqrt_self_reverse,
)
from pgaspin.errors import BranchError, GradeError, NullVersorError, UnsupportedSignatureError
from pgaspin.sampling import random_bivector, random_rotor, random_vector, random_versor


def minimal_count(length: int, d: int) -> int:
    """Fewest reflections that can produce a random product of ``length`` of them."""
    lmin = length if length <= d else d - ((length - d) % 2)
    return math.ceil(lmin / 2)


def assert_split_ok(B, factors, tol=1e-9):
    total = sum((f.bivector for f in factors), B.alg.zero())
    assert total.isclose(B, tol)
    for f in factors:
        assert (f.bivector ^ f.bivector).norm() <= tol
    for i, fi in enumerate(factors):
        for fj in factors[i + 1:]:
            assert fi.bivector.commutator(fj.bivector).norm() <= tol


# ---- bivector_split


def test_split_simple_is_identity():
    a = algebra(3)
    (f,) = bivector_split(a.parse("e12"))
    assert f.bivector == a.parse("e12")
    assert f.lam == -1 and f.kind == "rotation"


def test_split_two_planes_orders_by_magnitude():
    a = algebra(4)
    B = a.parse("e12 + 2e34")
    factors = bivector_split(B)
    assert [f.bivector.isclose(x, 1e-12) for f, x in zip(factors, [a.parse("2e34"), a.parse("e12")])] == [True, True]
    assert [f.lam for f in factors] == pytest.approx([-4, -1])
    assert_split_ok(B, factors)


def test_split_degenerate_flags():
    a = algebra(4)
    B = a.parse("e12 + e34")
    factors = bivector_split(B)
    assert len(factors) == 2
    assert all(f.degenerate for f in factors)
    assert_split_ok(B, factors)


def test_split_kinds():
    a = algebra(1, 1, 1)
    kinds = {f.kind for f in bivector_split(a.parse("e12 + e01"))}
    assert kinds <= {"boost", "translation"}
    assert [f.kind for f in bivector_split(a.parse("e12"))] == ["boost"]
    assert [f.kind for f in bivector_split(a.parse("e01"))] == ["translation"]


def test_split_rejects_non_bivector():
    with pytest.raises(GradeError):
        bivector_split(algebra(3).parse("e1 + e12"))


def test_split_non_real_spectrum():
    a = algebra(2, 2)
    # the squared commutator map of this bivector has eigenvalues +-2i
    B = a.parse("e13 + e24 + e12 - e34")
    with pytest.raises(UnsupportedSignatureError):
        bivector_split(B)


@pytest.mark.parametrize("sig", [(4, 0, 0), (5, 0, 0), (1, 3, 0), (3, 0, 1), (6, 0, 0), (4, 1, 0)])
def test_split_random(sig, gen):
    a = algebra(*sig)
    for _ in range(30):
        B = random_bivector(a, gen)
        factors = bivector_split(B)
        assert_split_ok(B, factors)
        lams = [abs(f.lam) for f in factors]
        assert lams == sorted(lams, reverse=True)


# ---- invariant_decompose


def test_decompose_trivector():
    a = algebra(3)
    dec = invariant_decompose(a.parse("e123"))
    assert dec.residual_reflection == a.e(3)
    assert dec.factors == (a.parse("e12"),)
    assert dec.scale == 1
    assert dec.product() == a.parse("e123")


def test_decompose_two_plane_rotor():
    a = algebra(4)
    R = exp_bivector(a.parse("e12 + 2e34"))
    dec = invariant_decompose(R)
    assert dec.count == 2 and dec.residual_reflection is None
    assert dec.product().isclose(R, 1e-12)
    assert dec.factors[0].commutator(dec.factors[1]).norm() < 1e-12


def test_decompose_keeps_scale_and_sign():
    a = algebra(3)
    dec = invariant_decompose(a.parse("-2e123"))
    assert dec.scale == pytest.approx(2)
    assert dec.product().isclose(a.parse("-2e123"), 1e-12)


def test_decompose_translation_and_screw():
    a = algebra(3, 0, 1)
    T = exp_bivector(a.parse("0.5e01 - 0.3e02"))
    dec = invariant_decompose(T)
    assert dec.count == 1 and dec.product().isclose(T, 1e-12)
    screw = exp_bivector(a.parse("0.7e12 + 0.4e03"))
    dec = invariant_decompose(screw)
    assert dec.count == 2 and dec.product().isclose(screw, 1e-12)


def test_decompose_null_input():
    with pytest.raises((NullVersorError, Exception)):
        invariant_decompose(algebra(2, 0, 1).e(0))


def test_decompose_five_reflections_in_five_d(gen):
    a = algebra(5)
    for _ in range(200):
        U, _ = random_versor(a, gen, 5)
        dec = invariant_decompose(U)
        assert len(dec.factors) == 2 and dec.residual_reflection is not None
        res = dec.residuals()
        assert res["reconstruction"] <= 1e-9 and res["commutation"] <= 1e-9


@settings(max_examples=60, deadline=None)
@given(
    st.sampled_from([(4, 0, 0), (5, 0, 0), (1, 3, 0), (3, 0, 1), (2, 0, 1), (3, 1, 0)]),
    st.integers(1, 6),
    st.integers(0, 2**32 - 1),
)
def test_decompose_properties(sig, length, seed):
    g = np.random.default_rng(seed)
    a = algebra(*sig)
    U, _ = random_versor(a, g, length)
    dec = invariant_decompose(U)
    res = dec.residuals()
    assert res["reconstruction"] <= 1e-9
    assert res["commutation"] <= 1e-9
    assert res["simplicity"] <= 1e-9
    assert dec.count == minimal_count(length, a.d)


# ---- rotor_log


def test_log_examples():
    a = algebra(4)
    assert rotor_log(a.scalar(1)).is_zero()
    assert rotor_log(a.parse("e12")).isclose(a.parse("e12") * (math.pi / 2), 1e-12)
    B = a.parse("0.3e12 + 0.7e34")
    assert rotor_log(exp_bivector(B)).isclose(B, 1e-9)


def test_log_branch_point():
    with pytest.raises(BranchError):
        rotor_log(algebra(3).scalar(-1))


def test_log_rejects_boost_past_light_cone():
    a = algebra(1, 1)
    with pytest.raises(BranchError):
        rotor_log(a.parse("-1.25 + 0.75e12"))


def test_log_absorbs_overall_sign():
    a = algebra(4)
    R = -exp_bivector(a.parse("0.3e12 + 0.2e34"))
    assert exp_bivector(rotor_log(R)).isclose(R, 1e-10)


@pytest.mark.parametrize("sig", [(3, 0, 0), (4, 0, 0), (5, 0, 0), (1, 3, 0), (3, 0, 1)])
def test_exp_log_coherence(sig, gen):
    a = algebra(*sig)
    for _ in range(60):
        R = random_rotor(a, gen, 0.5)
        assert exp_bivector(rotor_log(R)).isclose(R, 1e-9)


# ---- gauges


def test_gauge_examples():
    a = algebra(2)
    zero = gauge_pair(a.e(1), a.e(2), 0.0)
    assert zero.u == a.e(1) and zero.v == a.e(2) and not zero.parallel
    turned = gauge_pair(a.e(1), a.e(2), math.pi / 4)
    assert (turned.v * turned.u).isclose(a.e(2) * a.e(1), 1e-11)
    assert not turned.u.isclose(a.e(1))
    assert gauge_pair(a.e(1), a.e(1), 0.3).parallel


def test_gauge_null_intersection():
    # two parallel lines in the plane meet at an ideal point; gauge slides them
    a = algebra(2, 0, 1)
    u, v = a.parse("e1"), a.parse("e1 + 0.5e0")
    g = gauge_pair(u, v, 0.7)
    assert (g.v * g.u).isclose(v * u, 1e-11)


@settings(max_examples=80, deadline=None)
@given(st.sampled_from([(3, 0, 0), (4, 0, 0), (1, 3, 0), (2, 0, 1)]), st.floats(-6, 6), st.integers(0, 2**32 - 1))
def test_gauge_invariance(sig, alpha, seed):
    g = np.random.default_rng(seed)
    a = algebra(*sig)
    u, v = random_vector(a, g), random_vector(a, g)
    out = gauge_pair(u, v, alpha)
    # hyperbolic gauges stretch both vectors; rounding error scales with their size
    scale = max(1.0, out.u.norm() * out.v.norm())
    assert (out.v * out.u - v * u).norm() <= 1e-11 * scale


def test_orthogonalize_examples():
    a = algebra(3)
    assert orthogonalize_factorization([a.e(1), a.e(2)]) == [a.e(1), a.e(2)]
    v = a.parse("e1 + 2e2")
    assert orthogonalize_factorization([v, v]) == [v, v]


def test_orthogonalize_transflection():
    # three lines in general position compose to a glide reflection
    a = algebra(2, 0, 1)
    lines = [a.parse("e1"), a.parse("0.6e1 + 0.8e2 + 0.3e0"), a.parse("e2 - 0.5e0")]
    U = lines[0] * lines[1] * lines[2]
    out = orthogonalize_factorization(lines)
    assert len(out) == 3
    assert (out[0] * out[1] * out[2]).isclose(U, 1e-12)
    u, v, w = out
    # the first pair is a translation (parallel mirrors), the last mirror is perpendicular to both
    cos = float((u * v + v * u).scalar) / 2 / math.sqrt(float((u * u).scalar) * float((v * v).scalar))
    assert abs(cos) == pytest.approx(1.0, abs=1e-12)
    assert abs(float((w * u + u * w).scalar)) < 1e-12
    assert abs(float((w * v + v * w).scalar)) < 1e-12


@pytest.mark.parametrize("sig,length", [((4, 0, 0), 4), ((5, 0, 0), 5), ((1, 3, 0), 3), ((3, 0, 1), 4)])
def test_orthogonalize_random(sig, length, gen):
    a = algebra(*sig)
    for _ in range(20):
        U, vs = random_versor(a, gen, length)
        out = orthogonalize_factorization(vs)
        P = a.scalar(1.0)
        for x in out:
            P = P * x
        assert P.isclose(U, 1e-9)
        pairs = [out[i:i + 2] for i in range(0, len(out) - 1, 2)]
        for i, p in enumerate(pairs):
            for q in pairs[i + 1:]:
                for x in p:
                    for y in q:
                        assert abs(float((x * y + y * x).scalar)) < 1e-8


# ---- polar / square root


def test_polar_examples():
    a = algebra(4)
    S, R = polar_decompose(exp_bivector(a.parse("e12")) * 3)
    assert S.isclose(a.scalar(3), 1e-12) and R.isclose(exp_bivector(a.parse("e12")), 1e-12)
    S, R = polar_decompose(a.parse("2 + e1234"))
    assert S.isclose(a.parse("2 + e1234"), 1e-12) and R.isclose(a.scalar(1), 1e-12)


def test_polar_round_trip(gen):
    a = algebra(4)
    for _ in range(100):
        rho = gen.uniform(0.2, 3)
        R0 = random_rotor(a, gen)
        S, R = polar_decompose(R0 * rho)
        assert S == ~S
        assert (R * ~R).isclose(a.scalar(1), 1e-9)
        assert (S * R).isclose(R0 * rho, 1e-9)
        assert abs(S.scalar) == pytest.approx(rho, rel=1e-9)
        assert R.isclose(R0, 1e-9) or R.isclose(-R0, 1e-9)


def test_polar_with_study_part(gen):
    a = algebra(4)
    S0 = a.parse("2 + 0.5e1234")
    R0 = random_rotor(a, gen)
    S, R = polar_decompose(S0 * R0)
    assert S.isclose(S0, 1e-10) and R.isclose(R0, 1e-10)


def test_polar_rejects_odd():
    with pytest.raises(GradeError):
        polar_decompose(algebra(4).e(1))


def test_sqrt_examples():
    a = algebra(4)
    assert sqrt_self_reverse(a.scalar(4)) == a.scalar(2)
    assert sqrt_self_reverse(a.parse("1 + 0e1234")) == a.scalar(1)
    X = a.parse("2 + e1234")
    assert sqrt_self_reverse(X * X).isclose(X, 1e-12)
    with pytest.raises(ValueError):
        sqrt_self_reverse(a.scalar(-1))
