"""Pointors: elements ``psi`` with ``psi O ~psi == rho O`` for a point ``O``.

A pointor is the sum ``rho_plus R + rho_minus P`` of a scaled rotor and a
scaled odd versor.  This module builds and checks them, splits them by
chirality and by Cartan labels, maps them into the spinor ideal and compares
them with the grade-preserving condition ``phi x ~phi == rho y``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .algebra import (
    DEFAULT_TOL,
    Multivector,
    batch_geometric_product,
    exp_bivector,
    scalar_product,
    versor_inverse,
)
from .decomposition import rotor_log
from .errors import BranchError, DecompositionError, GAError, GradeError, NotAVersorError
from .points import LabelVector, PointFrame, all_labels, chiral_split, label_decompose
from .spinors import NullBasis, master_idempotent


class PointorError(GAError, ValueError):
    """An element fails the pointor condition."""

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(message)
        self.residual = residual


class PointorCheck(NamedTuple):
    ok: bool
    rho: float
    residual: float


def is_pointor(psi: Multivector, O: Multivector, tol: float = DEFAULT_TOL) -> PointorCheck:
    """Test ``psi O ~psi == rho O`` with real ``rho``.

    ``rho`` is the projection of ``psi O ~psi`` onto ``O``; the residual is the
    rest, relative to ``|psi|^2 |O|``.  Membership of ``psi`` in the
    subalgebra of ``O`` is not checked.
    """
    image = psi * O * ~psi
    rho_c = complex(scalar_product(image, ~O) / scalar_product(O, ~O))
    scale = max(psi.norm() ** 2 * O.norm(), 1e-300)
    residual = (image - O * rho_c).norm() / scale + abs(rho_c.imag) * O.norm() / scale
    return PointorCheck(residual <= tol, rho_c.real, float(residual))


@dataclass(frozen=True, eq=False)
class Pointor:
    """``psi = rho_plus R + rho_minus P`` anchored to a point frame."""

    rho_plus: float
    R: Multivector
    rho_minus: float
    P: Multivector | None
    frame: PointFrame

    def assemble(self) -> Multivector:
        out = self.R * self.rho_plus
        if self.P is not None:
            out = out + self.P * self.rho_minus
        return out

    @property
    def rho(self) -> float:
        return is_pointor(self.assemble(), self.frame.point).rho


def _unit_versor(x: Multivector, parity: str, tol: float) -> None:
    wrong = x.odd() if parity == "even" else x.even()
    if wrong.norm() > tol * max(1.0, x.norm()):
        raise GradeError(f"expected an {parity} element")
    n = x * ~x
    if not n.is_scalar(1e-9) or abs(abs(n.scalar) - 1) > 1e-9:
        raise NotAVersorError(f"{parity} part must satisfy x ~x == +-1")


def make_pointor(
    rho_plus: float,
    R: Multivector,
    rho_minus: float,
    P: Multivector | None,
    frame: PointFrame,
    tol: float = DEFAULT_TOL,
) -> Pointor:
    """Validate and bundle a pointor; raises :class:`PointorError` if it moves the point."""
    _unit_versor(R, "even", tol)
    if P is not None:
        _unit_versor(P, "odd", tol)
    elif rho_minus:
        raise ValueError("rho_minus needs an odd versor P")
    p = Pointor(float(rho_plus), R, float(rho_minus), P, frame)
    check = is_pointor(p.assemble(), frame.point, tol)
    if not check.ok:
        raise PointorError("assembled element does not preserve the point", check.residual)
    return p


def assemble(p: Pointor) -> Multivector:
    return p.assemble()


def random_pointor(frame: PointFrame, gen: np.random.Generator, R: Multivector) -> tuple[Pointor, float]:
    """A valid pointor built around the rotor ``R``, plus its expected ``rho``.

    Even dimension: ``P = x R`` with a random unit vector ``x`` of the frame,
    so ``rho = rho_plus^2 R~R - rho_minus^2 P~P``.  Odd dimension:
    ``P = T R`` with ``T`` a unit 3-blade of frame vectors, so
    ``rho = rho_plus^2 R~R + rho_minus^2 P~P``.
    """
    alg = frame.alg
    rp, rm = gen.uniform(0.2, 2.0, size=2)
    units = [v / math.sqrt(abs((v * v).scalar)) for v in frame.vectors]
    if frame.dim % 2 == 0:
        c = gen.standard_normal(len(units))
        x = sum((u * ci for u, ci in zip(units, c)), alg.zero())
        sq = float((x * x).scalar)
        if abs(sq) < 1e-2 * float(c @ c):
            x = units[0]
            sq = float((x * x).scalar)
        x = x / math.sqrt(abs(sq))
        P = x * R
        sign = -1.0
    else:
        idx = sorted(gen.choice(len(units), size=min(3, len(units)), replace=False))
        T = units[idx[0]]
        for i in idx[1:]:
            T = T * units[i]
        P = T * R
        sign = 1.0
    rho = rp**2 * float((R * ~R).scalar) + sign * rm**2 * float((P * ~P).scalar)
    return Pointor(float(rp), R, float(rm), P, frame), rho


# --------------------------------------------------------------------------
# Splits


def pointor_weyl_split(psi: Multivector, frame: PointFrame, tol: float = DEFAULT_TOL):
    return chiral_split(psi, frame, tol)


def reference_state(frame: PointFrame, s: LabelVector) -> Multivector:
    """Product of ``u_j = v_{2j-1}`` (normalized) over the negative labels."""
    out = frame.alg.scalar(1.0)
    for j, sign in enumerate(s):
        if sign == -1:
            u = frame.vectors[2 * j]
            out = out * (u / math.sqrt(abs((u * u).scalar)))
    return out


@dataclass(frozen=True)
class LabeledPointorComponent:
    """``value == rho * exp(sum_j thetas[j] b_j) * ref``."""

    label: LabelVector
    value: Multivector
    rho: float
    thetas: tuple[float, ...]
    ref: Multivector
    residual: float

    def rebuild(self, frame: PointFrame) -> Multivector:
        L = sum((b * t for b, t in zip(frame.cartan, self.thetas)), frame.alg.zero())
        return exp_bivector(L) * self.ref * self.rho


def _fit_component(value: Multivector, ref: Multivector, frame: PointFrame, s: LabelVector, tol: float):
    X = value * versor_inverse(ref)
    nn = X * ~X
    residual = (nn - nn.grade(0)).norm() / max(1.0, nn.norm())
    n0 = float(np.real(nn.scalar))
    if n0 <= 0:
        return LabeledPointorComponent(s, value, 0.0, (0.0,) * frame.k, ref, float("inf"))
    rho = math.sqrt(n0)
    unit = (X / rho).as_real(1e-6).even()
    try:
        L = rotor_log(unit)
    except BranchError:
        rho = -rho
        L = rotor_log(-unit)
    except (GradeError, DecompositionError):
        return LabeledPointorComponent(s, value, rho, (0.0,) * frame.k, ref, max(residual, 1.0))
    thetas = tuple(float(scalar_product(L, versor_inverse(b)).real) for b in frame.cartan)
    comp = LabeledPointorComponent(s, value, rho, thetas, ref, 0.0)
    fit = (comp.rebuild(frame) - value).norm() / max(1.0, value.norm())
    return LabeledPointorComponent(s, value, rho, thetas, ref, max(residual, fit))


def pointor_label_decompose(
    psi: Multivector, frame: PointFrame, tol: float = 1e-9, *, strict: bool = True
) -> list[LabeledPointorComponent]:
    """Split ``psi`` into label components and fit each to ``rho e^{sum theta_j b_j} ref``.

    In odd dimension each label component is further split by parity; the
    odd-parity part (relative to the reference) is fitted against
    ``ref * v_extra``.
    """
    out = []
    for s, part in label_decompose(psi, frame, tol).items():
        ref = reference_state(frame, s)
        pieces = [(part, ref)]
        if frame.dim % 2:
            ref_parity_even = sum(1 for x in s if x == -1) % 2 == 0
            same = part.even() if ref_parity_even else part.odd()
            other = part - same
            extra = frame.extra / math.sqrt(abs((frame.extra * frame.extra).scalar))
            pieces = [(x, r) for x, r in ((same, ref), (other, ref * extra)) if x.norm() > tol * max(1.0, part.norm())]
        for value, r in pieces:
            comp = _fit_component(value, r, frame, s, tol)
            if strict and comp.residual > 1e-8:
                raise DecompositionError(
                    f"component {s} is not a scaled rotor times its reference state", comp.residual
                )
            out.append(comp)
    return out


class ChiralNormVerdict(NamedTuple):
    holds: bool
    psi_L: Multivector
    psi_R: Multivector
    rho_plus: float
    R: Multivector | None
    rho_minus: float
    P: Multivector | None
    residual: float


def _scaled_versor(x: Multivector, tol: float) -> tuple[float, Multivector | None, float]:
    n = x * ~x
    res = (n - n.grade(0)).norm()
    n0 = float(np.real(n.scalar))
    if abs(n0) <= tol:
        return 0.0, None, res
    rho = math.sqrt(abs(n0))
    return rho, x / rho, res


def theorem2_check(psi: Multivector, frame: PointFrame, tol: float = DEFAULT_TOL) -> ChiralNormVerdict:
    """Check that both chiral halves of ``psi`` have real norms ``x ~x``.

    Only defined for ``k = floor(d/2) < 3``; above that, label sums can
    fail and :func:`is_pointor` is the right test.
    """
    if frame.k >= 3:
        raise ValueError("the chiral-norm criterion only covers k < 3; use is_pointor")
    left, right = chiral_split(psi, frame, tol)
    rp, R, res_l = _scaled_versor(left, tol)
    rm, P, res_r = _scaled_versor(right, tol)
    residual = max(res_l, res_r) / max(1.0, psi.norm() ** 2)
    return ChiralNormVerdict(residual <= tol, left, right, rp, R, rm, P, residual)


def chiral_norm_residual(psi: Multivector, frame: PointFrame) -> float:
    """Size of the non-scalar part of ``psi_L ~psi_L`` (any k)."""
    left, _ = chiral_split(psi, frame, strict=False)
    n = left * ~left
    return (n - n.grade(0)).norm() / max(1.0, psi.norm() ** 2)


def random_label_sum(frame: PointFrame, gen: np.random.Generator) -> Multivector:
    """``sum_s rho_s exp(sum_j theta_sj b_j) ref_s`` with random ``rho_s``, ``theta_sj``.

    In odd dimension each reference state is multiplied by the extra vector
    with probability one half.
    """
    alg = frame.alg
    out = alg.zero()
    cartan = [b / math.sqrt(abs((b * b).scalar)) for b in frame.cartan]
    for s in all_labels(frame.k):
        # the Cartan planes commute, so the exponential factors plane by plane
        E = alg.scalar(1.0)
        for b in cartan:
            E = E * exp_bivector(b * gen.uniform(-math.pi, math.pi))
        ref = reference_state(frame, s)
        if frame.extra is not None and gen.random() < 0.5:
            ref = ref * frame.extra
        out = out + E * ref * gen.uniform(0.2, 2.0)
    return out


def label_sum_batch(frame: PointFrame, gen: np.random.Generator, n: int) -> np.ndarray:
    """Coefficients of ``n`` random label sums, vectorized (even dimension only).

    ``prod_j (cos t_j + sin t_j b_j)`` expands over subsets ``A`` of planes, so
    every label sum is a linear combination of the fixed elements
    ``b_A ref_s`` with weights built from the random magnitudes and angles.
    """
    if frame.dim % 2:
        raise ValueError("batched label sums need an even-dimensional frame")
    alg = frame.alg
    k = frame.k
    cartan = [b / math.sqrt(abs((b * b).scalar)) for b in frame.cartan]
    labels = list(all_labels(k))
    subsets = list(itertools.product((0, 1), repeat=k))
    basis = []
    for s in labels:
        ref = reference_state(frame, s)
        for A in subsets:
            bA = alg.scalar(1.0)
            for b, use in zip(cartan, A):
                if use:
                    bA = bA * b
            basis.append((bA * ref).coeffs)
    basis = np.stack(basis)  # (labels * subsets, 2^d)
    theta = gen.uniform(-math.pi, math.pi, size=(n, len(labels), k))
    rho = gen.uniform(0.2, 2.0, size=(n, len(labels)))
    c, sn = np.cos(theta), np.sin(theta)
    weights = np.empty((n, len(labels), len(subsets)))
    for ai, A in enumerate(subsets):
        w = rho.copy()
        for j, use in enumerate(A):
            w = w * (sn[:, :, j] if use else c[:, :, j])
        weights[:, :, ai] = w
    return weights.reshape(n, -1) @ basis


def chiral_norm_residual_batch(frame: PointFrame, coeffs: np.ndarray) -> np.ndarray:
    """Vectorized :func:`chiral_norm_residual` for rows of coefficients."""
    alg = frame.alg
    W = frame.point if frame.dim % 2 == 0 else frame.point_even
    Wi = versor_inverse(W)
    conj = np.stack([(W * e * Wi).coeffs for e in _basis_blades(alg)], axis=1)
    left = 0.5 * (coeffs + coeffs @ conj.T)
    norm = batch_geometric_product(alg, left, left * alg.reverse_signs)
    rest = np.linalg.norm(norm[:, 1:], axis=1)
    return rest / np.maximum(1.0, np.linalg.norm(coeffs, axis=1) ** 2)


def _basis_blades(alg) -> list[Multivector]:
    eye = np.eye(alg.n)
    return [Multivector(alg, eye[i]) for i in range(alg.n)]


# --------------------------------------------------------------------------
# Bridges


def to_algebraic_spinor(psi: Multivector, nb: NullBasis) -> Multivector:
    """``Psi = psi * master``."""
    if psi.alg is not nb.alg:
        raise ValueError("pointor and null basis live in different algebras")
    return psi * master_idempotent(nb)


class HestenesCheck(NamedTuple):
    ok: bool
    rho: float
    y: Multivector | None
    residual: float


def hestenes_check(phi: Multivector, x: Multivector, tol: float = DEFAULT_TOL) -> HestenesCheck:
    """Test ``phi x ~phi == rho y`` with ``y`` a vector and ``y^2 == x^2``."""
    x2 = complex((x * x).scalar)
    if (x - x.grade(1)).norm() > tol * max(1.0, x.norm()) or abs(x2) <= tol:
        raise GradeError("x must be an invertible vector")
    z = phi * x * ~phi
    scale = max(phi.norm() ** 2 * x.norm(), 1e-300)
    residual = (z - z.grade(1)).norm() / scale
    z1 = z.grade(1)
    ratio = complex((z1 * z1).scalar) / x2
    if residual > tol or ratio.real < -tol or abs(ratio.imag) > tol:
        return HestenesCheck(False, float("nan"), None, float(max(residual, abs(ratio.imag))))
    rho = math.sqrt(max(ratio.real, 0.0))
    y = z1 / rho if rho > tol else None
    return HestenesCheck(True, rho, y, float(residual))


def random_frame_rotor(frame: PointFrame, gen: np.random.Generator, scale: float = 1.0) -> Multivector:
    """Random rotor of the frame's subspace, as a product of plane exponentials.

    Multiplying simple exponentials avoids splitting a generic bivector,
    which fails in split signatures where the spectrum can be complex.
    """
    alg = frame.alg
    out = alg.scalar(1.0)
    vs = frame.vectors
    for i in range(len(vs)):
        for j in range(i + 1, len(vs)):
            plane = vs[i] ^ vs[j]
            out = out * exp_bivector(plane * (scale * gen.standard_normal() / plane.norm()))
    return out

