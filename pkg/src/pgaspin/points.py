"""Points as top-grade blades: orthogonal frames, gauge action, labels, chirality.

A point ``O`` is factored into mutually orthogonal vectors ``v_1 ... v_d``.
Consecutive pairs give commuting Cartan bivectors ``b_j = v_{2j-1} v_{2j}``;
conjugation by each ``b_j`` splits the tangent algebra into ``+-1``
eigenspaces, indexed by a label vector ``s`` with one sign per bivector.
"""

from __future__ import annotations

import functools
import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .algebra import DEFAULT_TOL, Multivector, versor_inverse
from .errors import NotABladeError, NotAVersorError, NullVersorError, SubalgebraError
from .subspace import factor_blade

LabelVector = tuple[int, ...]


def all_labels(k: int) -> Iterator[LabelVector]:
    """Every label vector of length ``k``; all-plus first."""
    return itertools.product((1, -1), repeat=k)


def check_label(s, k: int) -> LabelVector:
    s = tuple(int(x) for x in s)
    if len(s) != k or any(x not in (1, -1) for x in s):
        raise ValueError(f"label must be {k} entries of +1/-1, got {s}")
    return s


def _product(alg, items) -> Multivector:
    out = alg.scalar(1.0)
    for x in items:
        out = out * x
    return out


@dataclass(frozen=True, eq=False)
class PointFrame:
    """A point together with one orthogonal factorization of it."""

    point: Multivector
    vectors: tuple[Multivector, ...]

    @property
    def alg(self):
        return self.point.alg

    @property
    def dim(self) -> int:
        return len(self.vectors)

    @property
    def k(self) -> int:
        return self.dim // 2

    @property
    def cartan(self) -> tuple[Multivector, ...]:
        v = self.vectors
        return tuple(v[2 * j] * v[2 * j + 1] for j in range(self.k))

    @property
    def extra(self) -> Multivector | None:
        return self.vectors[-1] if self.dim % 2 else None

    @property
    def point_even(self) -> Multivector:
        """``O_{2k}``, the product of the Cartan bivectors."""
        return _product(self.alg, self.cartan)

    @functools.cached_property
    def _basis(self) -> np.ndarray:
        cols = []
        for subset in itertools.product((0, 1), repeat=self.dim):
            cols.append(_product(self.alg, [v for v, use in zip(self.vectors, subset) if use]).coeffs)
        return np.stack(cols, axis=1)

    def subalgebra_residual(self, zeta: Multivector) -> float:
        """Distance from ``zeta`` to the algebra generated by the frame vectors."""
        basis = self._basis
        c = zeta.coeffs
        if np.iscomplexobj(c):
            basis = basis.astype(complex)
        coef, *_ = np.linalg.lstsq(basis, c, rcond=None)
        return float(np.linalg.norm(basis @ coef - c))

    def residuals(self) -> dict[str, float]:
        v = self.vectors
        alg = self.alg
        # every residual is relative to the sizes of the elements involved, so
        # that frames stretched by hyperbolic gauges are judged fairly
        ortho = max(
            (
                abs((v[i] * v[j] + v[j] * v[i]).scalar) / (2 * v[i].norm() * v[j].norm())
                for i in range(len(v))
                for j in range(i + 1, len(v))
            ),
            default=0.0,
        )
        b = self.cartan
        comm = max(
            (
                b[i].commutator(b[j]).norm() / (b[i].norm() * b[j].norm())
                for i in range(len(b))
                for j in range(i + 1, len(b))
            ),
            default=0.0,
        )
        simple = max(((x ^ x).norm() / x.norm() ** 2 for x in b), default=0.0)
        extra = 0.0
        if self.extra is not None:
            extra = max(
                (self.extra.commutator(x).norm() / (self.extra.norm() * x.norm()) for x in b), default=0.0
            )
        scale = max(1.0, self.point.norm(), math.prod(x.norm() for x in v))
        return {
            "product": (_product(alg, v) - self.point).norm() / scale,
            "orthogonality": float(ortho),
            "commutation": comm,
            "simplicity": simple,
            "extra": extra,
        }

    def is_valid(self, tol: float = 1e-10) -> bool:
        return max(self.residuals().values()) <= tol


def factor_point(O: Multivector, tol: float = DEFAULT_TOL, *, allow_subspace: bool = False) -> PointFrame:
    """Factor a point into orthogonal invertible vectors.

    ``O`` must be a blade of the algebra's top non-degenerate grade ``p+q``;
    ``allow_subspace=True`` also accepts invertible blades of lower grade,
    which are then treated as the point of their own subspace.
    The magnitude and sign of ``O`` are carried by the first vector.
    """
    alg = O.alg
    grades = O.grades(tol)
    top = alg.signature.p + alg.signature.q
    if len(grades) != 1:
        raise NotABladeError(f"a point is a single-grade blade, got grades {sorted(grades)}")
    (g,) = grades
    if g != top and not (allow_subspace and 0 < g < top):
        raise NotABladeError(f"expected a {top}-blade, got grade {g}")
    vectors = factor_blade(O, tol)
    for v in vectors:
        if abs((v * v).scalar) <= tol:
            raise NullVersorError("point has a null factor")
    return PointFrame(O.as_real(tol).grade(g), tuple(vectors))


def _require_frame_member(zeta: Multivector, frame: PointFrame, strict: bool, tol: float) -> Multivector:
    res = frame.subalgebra_residual(zeta)
    if res > tol * max(1.0, zeta.norm()):
        if strict:
            raise SubalgebraError("element lies outside the frame's subalgebra", res)
        warnings.warn(f"discarding component outside the frame subalgebra (norm {res:.3g})", stacklevel=3)
        basis = frame._basis.astype(zeta.coeffs.dtype)
        coef, *_ = np.linalg.lstsq(basis, zeta.coeffs, rcond=None)
        zeta = Multivector(zeta.alg, basis @ coef)
    return zeta


def gauge_frame(frame: PointFrame, G: Multivector, tol: float = DEFAULT_TOL) -> PointFrame:
    """Apply a local rotor ``G`` to every frame vector, keeping the point fixed."""
    if G.odd().norm() > tol * max(1.0, G.norm()):
        raise NotAVersorError("gauge element must be even (a rotor)")
    if not (G * ~G).isclose(G.alg.scalar(1.0), 1e-9):
        raise NotAVersorError("gauge element must satisfy G ~G == 1")
    if G.commutator(frame.point).norm() > 1e-9 * max(1.0, frame.point.norm()):
        raise NotAVersorError("gauge element moves the point")
    Gr = ~G
    return PointFrame(frame.point, tuple((G * v * Gr).grade(1) for v in frame.vectors))


def _label_projector(zeta: Multivector, b: Multivector, b_inv: Multivector, sign: int) -> Multivector:
    return (zeta + b * zeta * b_inv * sign) * 0.5


def label_project(
    zeta: Multivector, frame: PointFrame, s, tol: float = DEFAULT_TOL, *, strict: bool = True
) -> Multivector:
    """Component of ``zeta`` with ``b_j zeta b_j^{-1} == s_j zeta`` for every j."""
    s = check_label(s, frame.k)
    return _project(_require_frame_member(zeta, frame, strict, tol), frame, s)


def _project(zeta: Multivector, frame: PointFrame, s: LabelVector) -> Multivector:
    out = zeta
    for b, sign in zip(frame.cartan, s):
        out = _label_projector(out, b, versor_inverse(b), sign)
    return out


def label_decompose(
    zeta: Multivector, frame: PointFrame, tol: float = DEFAULT_TOL, *, strict: bool = True
) -> dict[LabelVector, Multivector]:
    """Nonzero label components of ``zeta``; they sum to ``zeta``."""
    zeta = _require_frame_member(zeta, frame, strict, tol)
    out = {}
    scale = max(1.0, zeta.norm())
    for s in all_labels(frame.k):
        part = _project(zeta, frame, s)
        if part.norm() > tol * scale:
            out[s] = part
    return out


def chiral_split(zeta: Multivector, frame: PointFrame, tol: float = DEFAULT_TOL, *, strict: bool = True):
    """``(zeta_L, zeta_R) = (zeta +- W zeta W^{-1}) / 2``.

    ``W`` is the point itself in even dimension and ``O_{2k}`` in odd
    dimension, where the full point is central and would not split anything.
    """
    zeta = _require_frame_member(zeta, frame, strict, tol)
    W = frame.point if frame.dim % 2 == 0 else frame.point_even
    conj = W * zeta * versor_inverse(W)
    return (zeta + conj) * 0.5, (zeta - conj) * 0.5

