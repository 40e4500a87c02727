import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pgaspin.algebra import algebra, exp_bivector
from pgaspin.errors import NotABladeError, NotAVersorError, SubalgebraError
from pgaspin.points import (
    all_labels,
    chiral_split,
    factor_point,
    gauge_frame,
    label_decompose,
    label_project,
)
from pgaspin.pointors import random_frame_rotor
from pgaspin.sampling import random_multivector, random_unit_vector, random_versor


def random_point(alg, gen):
    """Random top-grade blade: product of mutually orthogonal random vectors."""
    vs = []
    while len(vs) < alg.signature.p + alg.signature.q:
        x = random_unit_vector(alg, gen)
        for v in vs:
            x = x - v * (float((x * v).scalar) / float((v * v).scalar))
        if abs(float((x * x).scalar)) > 1e-2 * x.norm() ** 2:
            vs.append(x)
    out = alg.scalar(gen.uniform(0.5, 2.0))
    for v in vs:
        out = out * v
    return out.grade(len(vs))


# ---- factor_point


def test_factor_canonical_axes():
    a = algebra(3)
    f = factor_point(a.parse("e123"))
    assert f.vectors == (a.e(1), a.e(2), a.e(3))
    assert f.cartan == (a.parse("e12"),)
    assert f.extra == a.e(3)
    assert f.point_even == a.parse("e12")


def test_factor_scaled_point():
    a = algebra(2)
    f = factor_point(a.parse("2e12"))
    assert f.is_valid(1e-12)
    assert f.vectors[0] * f.vectors[1] == a.parse("2e12")


def test_factor_rejects_non_points():
    a = algebra(2)
    with pytest.raises(NotABladeError):
        factor_point(a.parse("e1 + e2"))
    with pytest.raises(NotABladeError):
        factor_point(algebra(4).parse("e12 + e34"), allow_subspace=True)


def test_factor_pga_point():
    # a translated Euclidean point in 3D projective algebra
    a = algebra(3, 0, 1)
    T = exp_bivector(a.parse("0.4e01 - 0.7e02 + 0.2e03"))
    O = T * a.parse("e123") * ~T
    f = factor_point(O)
    assert f.is_valid(1e-10)
    assert len(f.vectors) == 3


def test_factor_subspace_blade():
    a = algebra(4)
    f = factor_point(a.parse("e12"), allow_subspace=True)
    assert f.dim == 2 and f.is_valid()


@pytest.mark.parametrize("sig", [(2, 0, 0), (3, 0, 0), (4, 0, 0), (5, 0, 0), (1, 3, 0), (3, 1, 0), (3, 0, 1)])
def test_frame_validity_random(sig, gen):
    a = algebra(*sig)
    for _ in range(40):
        O = random_point(a, gen)
        f = factor_point(O)
        assert f.is_valid(1e-10), f.residuals()


# ---- gauge_frame


def test_gauge_identity():
    a = algebra(3)
    f = factor_point(a.parse("e123"))
    g = gauge_frame(f, a.scalar(1))
    assert g.vectors == f.vectors


def test_gauge_rotates_first_pair():
    a = algebra(3)
    f = factor_point(a.parse("e123"))
    for alpha in np.linspace(-3, 3, 7):
        g = gauge_frame(f, exp_bivector(a.parse("e12") * alpha))
        assert g.is_valid(1e-10)
        assert g.vectors[2].isclose(a.e(3), 1e-12)
        assert (g.vectors[0] * g.vectors[1] * g.vectors[2]).isclose(f.point, 1e-11)


def test_gauge_rejects_bad_elements():
    a = algebra(3)
    f = factor_point(a.parse("e123"))
    with pytest.raises(NotAVersorError):
        gauge_frame(f, a.e(1))
    with pytest.raises(NotAVersorError):
        gauge_frame(f, a.parse("2 + e12"))
    a4 = algebra(4)
    f2 = factor_point(a4.parse("e12"), allow_subspace=True)
    with pytest.raises(NotAVersorError):
        gauge_frame(f2, exp_bivector(a4.parse("0.3e13")))


@pytest.mark.parametrize("sig", [(3, 0, 0), (4, 0, 0), (1, 3, 0), (5, 0, 0)])
def test_gauge_orbit(sig, gen):
    a = algebra(*sig)
    f = factor_point(random_point(a, gen))
    for _ in range(20):
        g = gauge_frame(f, random_frame_rotor(f, gen, 0.5))
        assert g.is_valid(1e-10)


# ---- labels


def test_label_project_examples():
    a = algebra(4)
    f = factor_point(a.parse("e1234"))
    assert label_project(a.parse("e12"), f, (1, 1)) == a.parse("e12")
    assert label_project(a.parse("e13"), f, (-1, -1)) == a.parse("e13")
    assert label_project(a.parse("e13"), f, (1, 1)).is_zero()


def test_label_decompose_examples():
    a = algebra(4)
    f = factor_point(a.parse("e1234"))
    assert label_decompose(a.scalar(1), f) == {(1, 1): a.scalar(1)}
    assert label_decompose(a.parse("e12 + e13"), f) == {(1, 1): a.parse("e12"), (-1, -1): a.parse("e13")}
    assert label_decompose(a.zero(), f) == {}


def test_label_outside_subalgebra():
    a = algebra(4)
    f = factor_point(a.parse("e12"), allow_subspace=True)
    with pytest.raises(SubalgebraError):
        label_project(a.parse("e3"), f, (1,))
    with pytest.warns(UserWarning):
        out = label_project(a.parse("e1 + e3"), f, (-1,), strict=False)
    assert out.isclose(a.e(1))


def test_label_rejects_bad_label():
    a = algebra(4)
    f = factor_point(a.parse("e1234"))
    with pytest.raises(ValueError):
        label_project(a.e(1), f, (1, 0))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([(4, 0, 0), (5, 0, 0), (1, 3, 0)]), st.integers(0, 2**32 - 1))
def test_projector_algebra(sig, seed):
    g = np.random.default_rng(seed)
    a = algebra(*sig)
    f = factor_point(a.pseudoscalar(nondegenerate=True))
    zeta = random_multivector(a, g)
    total = a.zero()
    parts = {}
    for s in all_labels(f.k):
        part = label_project(zeta, f, s)
        parts[s] = part
        total = total + part
        # idempotent
        assert label_project(part, f, s).isclose(part, 1e-11)
        # eigen-equation for every Cartan bivector
        for b, sign in zip(f.cartan, s):
            assert (b * part * b.inverse()).isclose(part * sign, 1e-11)
    for s, part in parts.items():
        for t in parts:
            if t != s:
                assert label_project(part, f, t).norm() <= 1e-11 * max(1.0, zeta.norm())
    assert total.isclose(zeta, 1e-11)


# ---- chirality


def test_chiral_examples():
    a2 = algebra(2)
    f2 = factor_point(a2.parse("e12"))
    assert chiral_split(a2.parse("1 + e1"), f2) == (a2.scalar(1), a2.e(1))
    L, R = chiral_split(a2.parse("e12"), f2)
    assert L == a2.parse("e12") and R.is_zero()
    a3 = algebra(3)
    L, R = chiral_split(a3.parse("1 + e3"), factor_point(a3.parse("e123")))
    assert L == a3.parse("1 + e3") and R.is_zero()


@pytest.mark.parametrize("sig", [(2, 0, 0), (4, 0, 0), (1, 3, 0), (6, 0, 0)])
def test_chiral_is_parity_in_even_dimension(sig, gen):
    a = algebra(*sig)
    f = factor_point(a.pseudoscalar(nondegenerate=True))
    for length in range(1, 5):
        U, _ = random_versor(a, gen, length)
        for zeta in (U, U + a.scalar(0.5)):
            L, R = chiral_split(zeta, f)
            assert L.isclose(zeta.even(), 1e-11)
            assert R.isclose(zeta.odd(), 1e-11)


def test_chiral_odd_dimension_uses_even_point(gen):
    a = algebra(5)
    f = factor_point(a.parse("e12345"))
    zeta = random_multivector(a, gen)
    L, R = chiral_split(zeta, f)
    W = f.point_even
    assert (L + R).isclose(zeta, 1e-12)
    assert (W * L).isclose(L * W, 1e-11)
    assert (W * R).isclose(-(R * W), 1e-11)
    assert math.isclose(float((W * W).scalar), 1.0)
