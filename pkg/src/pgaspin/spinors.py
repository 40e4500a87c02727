"""Algebraic spinors in the complexified algebra.

Each Cartan bivector ``b_j`` of a point frame has a pair of null eigenvectors
``w_{+j}, w_{-j}`` under ``x -> b_j x x``.  Their products build the master
idempotent, whose left ideal is spanned by the ``2^k`` basis spinors obtained
by acting with the lowering vectors ``w_{-j}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import DEFAULT_TOL, Multivector
from .decomposition import SimpleFactor, classify
from .errors import GradeError, NotABladeError, SubalgebraError
from .points import LabelVector, PointFrame, all_labels, check_label
from .subspace import factor_blade


@dataclass(frozen=True)
class NullPair:
    """Eigenvectors of a simple bivector under the commutator product.

    For rotations and boosts ``b x w_plus == mu * w_plus`` and
    ``b x w_minus == -mu * w_minus`` with both vectors null.  For a null
    bivector only ``w_plus`` (the null direction ``u``, ``mu == 0``) exists.
    """

    kind: str
    mu: complex
    w_plus: Multivector
    w_minus: Multivector | None
    u: Multivector
    v: Multivector


def null_eigenvectors(b: Multivector | SimpleFactor, tol: float = DEFAULT_TOL) -> NullPair:
    """Null eigenvectors of a simple bivector ``b = u v``.

    Rotations give ``w_+- = (u +- i v)/2`` (with ``v -> -v`` when both
    squares are negative) and ``mu = +i|b|``; boosts give
    ``w_+- = (u -+ v)/2`` with ``u`` the spacelike factor and
    ``mu = +|b|``.  Translations return the null factor with ``mu = 0``.
    """
    if isinstance(b, SimpleFactor):
        b = b.bivector
    if (b - b.grade(2)).norm() > tol * max(1.0, b.norm()):
        raise GradeError("expected a bivector")
    b = b.as_real(tol).grade(2)
    if (b ^ b).norm() > tol * max(1.0, b.norm() ** 2):
        raise NotABladeError("bivector is not simple")
    lam = float((b * b).scalar)
    kind = classify(lam, b.norm() ** 2, tol)
    u, v = factor_blade(b, tol)
    if kind == "translation":
        null = v if abs((v * v).scalar) <= tol else u
        return NullPair(kind, 0.0, null, None, u, v)
    mag = math.sqrt(abs(lam))
    # move magnitude and sign off u so that b == mag * u v with unit u, v
    u = u / math.sqrt(abs((u * u).scalar))
    if not (u * v * mag).isclose(b, 1e-9):
        u = -u
    u2 = float((u * u).scalar)
    v2 = float((v * v).scalar)
    if kind == "rotation":
        w_plus = (u + v * (1j * v2)) * 0.5
        w_minus = (u - v * (1j * v2)) * 0.5
        mu = 1j * mag
    else:
        w_plus = (u - v * u2) * 0.5
        w_minus = (u + v * u2) * 0.5
        mu = complex(mag)
    # scale w_minus so that w_plus w_minus + w_minus w_plus == 1
    anti = (w_plus * w_minus + w_minus * w_plus).scalar
    return NullPair(kind, mu, w_plus, w_minus / anti, u, v)


@dataclass(frozen=True, eq=False)
class NullBasis:
    """Null pairs for every Cartan bivector of a point frame."""

    frame: PointFrame
    pairs: tuple[NullPair, ...]

    @classmethod
    def from_frame(cls, frame: PointFrame, tol: float = DEFAULT_TOL) -> "NullBasis":
        pairs = tuple(null_eigenvectors(b, tol) for b in frame.cartan)
        for p in pairs:
            if p.w_minus is None:
                raise GradeError("null Cartan bivector has no eigenvector pair")
        return cls(frame, pairs)

    @property
    def k(self) -> int:
        return len(self.pairs)

    @property
    def alg(self):
        return self.frame.alg

    @property
    def mus(self) -> tuple[complex, ...]:
        return tuple(p.mu for p in self.pairs)

    @property
    def betas(self) -> tuple[Multivector, ...]:
        return tuple(b / p.mu for b, p in zip(self.frame.cartan, self.pairs))

    @property
    def extra(self) -> Multivector | None:
        return self.frame.extra

    def w_plus(self, j: int) -> Multivector:
        return self.pairs[j].w_plus

    def w_minus(self, j: int) -> Multivector:
        return self.pairs[j].w_minus


@dataclass(frozen=True)
class SpinorState:
    value: Multivector
    label: LabelVector


def master_idempotent(nb: NullBasis) -> Multivector:
    """``prod_j w_{+j} w_{-j}``."""
    out = nb.alg.scalar(1.0 + 0j)
    for p in nb.pairs:
        out = out * p.w_plus * p.w_minus
    return out


def basis_spinor(nb: NullBasis, s) -> SpinorState:
    """``eta_s = [prod_j w_{-j}^{(1-s_j)/2}] * master``, product taken in frame order."""
    s = check_label(s, nb.k)
    out = nb.alg.scalar(1.0 + 0j)
    for p, sign in zip(nb.pairs, s):
        if sign == -1:
            out = out * p.w_minus
    return SpinorState(out * master_idempotent(nb), s)


def basis_spinors(nb: NullBasis) -> list[SpinorState]:
    return [basis_spinor(nb, s) for s in all_labels(nb.k)]


def chiral_operator(nb: NullBasis) -> Multivector:
    """``Gamma = prod_j beta_j``."""
    out = nb.alg.scalar(1.0 + 0j)
    for beta in nb.betas:
        out = out * beta
    return out


def weyl_project(eta: Multivector, nb: NullBasis, side: str) -> Multivector:
    """``(1 + Gamma) eta / 2`` for side ``"L"``, ``(1 - Gamma) eta / 2`` for ``"R"``."""
    if side not in ("L", "R"):
        raise ValueError("side must be 'L' or 'R'")
    gamma = chiral_operator(nb)
    sign = 1 if side == "L" else -1
    return (eta + gamma * eta * sign) * 0.5


def spinor_matrix(nb: NullBasis) -> np.ndarray:
    """Coefficient columns of the basis spinors, in ``all_labels`` order."""
    return np.stack([st.value.coeffs.astype(complex) for st in basis_spinors(nb)], axis=1)


def spinor_expand(eta: Multivector, nb: NullBasis, tol: float = 1e-10) -> dict[LabelVector, complex]:
    """Coefficients ``c_s`` with ``eta == sum_s c_s eta_s``.

    Raises :class:`SubalgebraError` when ``eta`` is not in the left ideal.
    """
    A = spinor_matrix(nb)
    c = eta.coeffs.astype(complex)
    coef, *_ = np.linalg.lstsq(A, c, rcond=None)
    res = float(np.linalg.norm(A @ coef - c))
    if res > tol * max(1.0, float(np.linalg.norm(c))):
        raise SubalgebraError("element is not in the spinor ideal", res)
    return {s: complex(x) for s, x in zip(all_labels(nb.k), coef)}
