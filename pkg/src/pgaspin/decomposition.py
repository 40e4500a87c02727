"""Invariant decomposition of bivectors and versors into commuting simple parts.

Bivectors are split spectrally: the commutator map ``x -> B x x`` on vectors
is skew with respect to the metric, its square has the factor squares
``lambda_i`` as eigenvalues, and each eigenspace decomposes into invariant
planes ``span{x, Fx}``.  Versors are handled the same way through the
orthogonal map they induce on vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .algebra import (
    DEFAULT_TOL,
    Multivector,
    certify_versor,
    exp_bivector,
    is_simple_bivector,
    scalar_product,
    versor_inverse,
)
from .errors import (
    BranchError,
    DecompositionError,
    GradeError,
    NotABladeError,
    UnsupportedSignatureError,
)
from .subspace import (
    action_matrix,
    adjoint_matrix,
    best_candidate,
    factor_blade,
    metric_complement,
    metric_dot,
    metric_frame,
    null_space,
)

# eigenvalues closer than this (relative to the spectrum scale) are merged
CLUSTER_TOL = 1e-7


@dataclass(frozen=True)
class SimpleFactor:
    """A 2-blade ``b`` with ``b*b = lam``.

    ``degenerate`` marks factors taken from a repeated eigenvalue, where the
    choice of plane is not unique.
    """

    bivector: Multivector
    lam: float
    kind: str
    degenerate: bool = False


def classify(lam: float, scale: float = 1.0, tol: float = DEFAULT_TOL) -> str:
    if lam > tol * scale:
        return "boost"
    if lam < -tol * scale:
        return "rotation"
    return "translation"


def _simple_factor(b: Multivector, degenerate: bool, tol: float) -> SimpleFactor:
    lam = (b * b).scalar
    return SimpleFactor(b, float(np.real(lam)), classify(float(np.real(lam)), b.norm() ** 2, tol), degenerate)


def _clusters(values: np.ndarray, atol: float) -> list[tuple[float, int]]:
    out: list[list[float]] = []
    for v in np.sort(values):
        if out and abs(v - out[-1][-1]) <= atol:
            out[-1].append(v)
        else:
            out.append([v])
    return [(float(np.mean(c)), len(c)) for c in out]


def _real_spectrum(matrix: np.ndarray, scale: float) -> np.ndarray:
    eigs = np.linalg.eigvals(matrix)
    if np.max(np.abs(eigs.imag), initial=0.0) > 1e-6 * max(scale, 1e-300):
        raise UnsupportedSignatureError("non-real eigenvalue structure")
    return eigs.real


def _eigenspace(matrix: np.ndarray, value: float, multiplicity: int) -> np.ndarray:
    shifted = matrix - value * np.eye(matrix.shape[0])
    space = null_space(shifted, 1e-7)
    if space.shape[1] < multiplicity:
        space = null_space(np.linalg.matrix_power(shifted, multiplicity), 1e-10)
    if space.shape[1] != multiplicity:
        raise DecompositionError(
            f"eigenspace of {value:.3g} has dimension {space.shape[1]}, expected {multiplicity}"
        )
    return space


def _invariant_planes(alg, skew: np.ndarray, space: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    planes = []
    q = space
    while q.shape[1] >= 2:
        x = best_candidate(alg, q)
        if x is None:
            raise DecompositionError("eigenspace is totally null")
        y = skew @ x
        planes.append((x, y))
        q = metric_complement(alg, q, x, y)
    if q.shape[1]:
        raise DecompositionError("odd-dimensional invariant subspace")
    return planes


def _check_bivector(B: Multivector, tol: float) -> Multivector:
    if (B - B.grade(2)).norm() > tol * max(1.0, B.norm()):
        raise GradeError(f"expected a bivector, got grades {sorted(B.grades())}")
    if B.is_complex:
        B = B.as_real(tol)
    return B.grade(2)


def bivector_split(B: Multivector, tol: float = DEFAULT_TOL) -> list[SimpleFactor]:
    """Commuting simple bivectors summing to ``B``, by descending ``|lam|``."""
    B = _check_bivector(B, tol)
    alg = B.alg
    if B.norm() <= tol:
        return []
    if is_simple_bivector(B, tol):
        return [_simple_factor(B, False, tol)]
    F = adjoint_matrix(B)
    A = F @ F
    scale = max(float(np.max(np.abs(A))), B.norm() ** 2)
    eigs = _real_spectrum(A, scale)
    factors: list[SimpleFactor] = []
    for lam, mult in _clusters(eigs, CLUSTER_TOL * scale):
        if abs(lam) <= CLUSTER_TOL * scale:
            continue
        planes = _invariant_planes(alg, F, _eigenspace(A, lam, mult))
        for x, y in planes:
            P = alg.vector(x) ^ alg.vector(y)
            c = scalar_product(B, ~P) / scalar_product(P, ~P)
            factors.append(_simple_factor(P * c, len(planes) > 1, tol))
    rest = B - sum((f.bivector for f in factors), alg.zero())
    if rest.norm() > tol * B.norm():
        if not is_simple_bivector(rest, tol * 10):
            raise DecompositionError("null part of the bivector is not simple", rest.norm())
        factors.append(_simple_factor(rest, False, tol))
    factors.sort(key=lambda f: -abs(f.lam))
    _verify_split(B, factors, tol)
    return factors


def _verify_split(B: Multivector, factors: Sequence[SimpleFactor], tol: float) -> None:
    scale = max(1.0, B.norm())
    total = sum((f.bivector for f in factors), B.alg.zero())
    if not total.isclose(B, tol * 10):
        raise DecompositionError("split does not sum to the input", (total - B).norm())
    for i, fi in enumerate(factors):
        for fj in factors[i + 1:]:
            comm = fi.bivector.commutator(fj.bivector).norm()
            if comm > tol * 10 * scale**2:
                raise DecompositionError("split factors do not commute", comm)


# --------------------------------------------------------------------------
# Versors


@dataclass(frozen=True)
class InvariantDecomposition:
    """``source == scale * factors[0] * ... * factors[-1] * residual_reflection``.

    Every factor is a normalized even versor ``c + s b`` with ``b`` simple;
    the residual reflection (odd sources only) is a normalized vector.  All
    parts commute.
    """

    factors: tuple[Multivector, ...]
    residual_reflection: Multivector | None
    scale: float
    source: Multivector

    @property
    def parts(self) -> list[Multivector]:
        out = list(self.factors)
        if self.residual_reflection is not None:
            out.append(self.residual_reflection)
        return out

    @property
    def count(self) -> int:
        return len(self.parts)

    @property
    def bivectors(self) -> list[Multivector]:
        return [f.grade(2) for f in self.factors]

    @property
    def simple_factors(self) -> list[SimpleFactor]:
        return [_simple_factor(b, False, DEFAULT_TOL) for b in self.bivectors]

    def product(self) -> Multivector:
        out = self.source.alg.scalar(self.scale)
        for p in self.parts:
            out = out * p
        return out

    def residuals(self) -> dict[str, float]:
        """Reconstruction, commutation and simplicity residuals."""
        scale = max(1.0, self.source.norm())
        parts = self.parts
        comm = max(
            (parts[i].commutator(parts[j]).norm() for i in range(len(parts)) for j in range(i + 1, len(parts))),
            default=0.0,
        )
        simple = max(((b ^ b).norm() for b in self.bivectors), default=0.0)
        return {
            "reconstruction": (self.product() - self.source).norm() / scale,
            "commutation": comm,
            "simplicity": simple,
        }


def _normalize(u: Multivector) -> Multivector:
    n = (u * ~u).scalar
    return u / math.sqrt(abs(float(np.real(n))))


def _blade_pairs(alg, basis: np.ndarray) -> list[Multivector]:
    non_null, null = metric_frame(alg, basis)
    if null or len(non_null) % 2:
        raise DecompositionError("half-turn subspace cannot be paired into planes")
    return [_normalize(alg.vector(non_null[i]) * alg.vector(non_null[i + 1]))
            for i in range(0, len(non_null), 2)]


def invariant_decompose(U: Multivector, tol: float = DEFAULT_TOL) -> InvariantDecomposition:
    """Split a versor into commuting simple factors plus, if odd, one reflection."""
    cert = certify_versor(U, tol)
    alg = U.alg
    U = U.as_real(tol)
    norm = float(np.real(cert.norm))
    scale = math.sqrt(abs(norm))
    Un = U / scale
    odd = cert.parity == "odd"
    inv = versor_inverse(Un, tol)
    M = action_matrix(Un.involute(), inv)
    Minv = action_matrix(inv.involute(), Un)
    C = 0.5 * (M + Minv)
    F = 0.5 * (M - Minv)
    spectrum_scale = max(1.0, float(np.max(np.abs(C))))
    kappas = _real_spectrum(C, spectrum_scale)
    ctol = CLUSTER_TOL * spectrum_scale

    factors: list[Multivector] = []
    residual = None
    for kappa, mult in _clusters(kappas, ctol):
        if abs(kappa - 1) <= ctol:
            continue  # fixed directions; unipotent parts are recovered below
        space = _eigenspace(C, kappa, mult)
        if abs(kappa + 1) <= ctol:
            if odd and residual is None:
                a = best_candidate(alg, space, prefer_last=True)
                if a is None:
                    raise DecompositionError("no non-null reflection axis")
                residual = _normalize(alg.vector(a))
                space = metric_complement(alg, space, a)
            factors.extend(_blade_pairs(alg, space))
            continue
        for x, _ in _invariant_planes(alg, F, space):
            xv = alg.vector(x)
            image = alg.vector(M @ x)
            factors.append(_normalize(1 + image * versor_inverse(xv, tol)))
    if odd and residual is None:
        raise DecompositionError("odd versor without a reflection axis")

    assembled = alg.scalar(1.0)
    for f in factors:
        assembled = assembled * f
    if residual is not None:
        assembled = assembled * residual
    leftover = versor_inverse(assembled, tol) * Un
    if leftover.is_scalar(1e-7):
        sign = float(np.real(leftover.scalar))
    else:
        # unipotent remainder (translations, null rotations) is a single simple factor
        if (leftover - leftover.grade(0) - leftover.grade(2)).norm() > 1e-7 * leftover.norm():
            raise DecompositionError("remainder is not a bireflection", leftover.norm())
        if not is_simple_bivector(leftover.grade(2), 1e-7):
            raise DecompositionError("remainder bivector is not simple", leftover.norm())
        n = float(np.real((leftover * ~leftover).scalar))
        sign = math.copysign(math.sqrt(abs(n)), float(np.real(leftover.scalar)) or 1.0)
        factors.append(leftover / sign)

    # carry the overall sign on a part rather than the scale
    if sign < 0:
        if residual is not None:
            residual = -residual
        elif factors:
            factors[0] = -factors[0]
        else:
            scale = -scale
    result = InvariantDecomposition(tuple(factors), residual, scale * abs(sign), U)
    res = result.residuals()
    limit = 1e-8
    if res["reconstruction"] > limit or res["commutation"] > limit:
        raise DecompositionError(
            f"decomposition failed to reconstruct (residuals {res})",
            max(res["reconstruction"], res["commutation"]),
        )
    return result


# --------------------------------------------------------------------------
# Logarithm


def rotor_log(R: Multivector, tol: float = DEFAULT_TOL) -> Multivector:
    """Bivector ``L`` with ``exp(L) == R``, principal branch per factor."""
    R = R.as_real(tol)
    if R.odd().norm() > tol * max(1.0, R.norm()):
        raise GradeError("rotor_log needs an even element")
    n = (R * ~R)
    if not n.is_scalar(1e-8) or abs(n.scalar - 1) > 1e-8:
        raise GradeError("rotor_log needs R ~R == 1")
    alg = R.alg
    if R.isclose(alg.scalar(1.0), tol):
        return alg.zero()
    if R.isclose(alg.scalar(-1.0), tol):
        raise BranchError("log(-1) is ambiguous: every unit bivector is a candidate")
    dec = invariant_decompose(R, tol)
    factors = list(dec.factors)
    if dec.scale < 0:
        for i, f in enumerate(factors):
            if float((f.grade(2) * f.grade(2)).scalar) < 0:
                factors[i] = -f
                break
        else:
            raise BranchError("a -1 factor cannot be absorbed by a rotation plane")
    out = alg.zero()
    for f in factors:
        c = float(f.scalar)
        b = f.grade(2)
        lam = float((b * b).scalar)
        mag2 = b.norm() ** 2
        if lam < -tol * mag2:
            s = math.sqrt(-lam)
            out = out + b * (math.atan2(s, c) / s)
        elif lam > tol * mag2:
            s = math.sqrt(lam)
            if c <= s:
                raise BranchError("boost factor outside the principal sheet (|c| <= |s|)")
            out = out + b * (math.atanh(s / c) / s)
        else:
            if c <= 0:
                raise BranchError("null factor with non-positive scalar part")
            out = out + b / c
    return out


# --------------------------------------------------------------------------
# Gauges


class GaugedPair(NamedTuple):
    u: Multivector
    v: Multivector
    parallel: bool


def _check_vector(x: Multivector, tol: float) -> None:
    if (x - x.grade(1)).norm() > tol * max(1.0, x.norm()):
        raise GradeError("expected a vector")


def gauge_pair(u: Multivector, v: Multivector, alpha: float, tol: float = DEFAULT_TOL) -> GaugedPair:
    """Rotate the mirrors ``u, v`` together around their intersection.

    The product ``v * u`` is unchanged.  Parallel inputs have no intersection
    to rotate around and are returned untouched with ``parallel=True``.
    """
    _check_vector(u, tol)
    _check_vector(v, tol)
    versor_inverse(u, tol)
    versor_inverse(v, tol)
    B = (v * u).grade(2)
    if B.norm() <= tol * max(1.0, u.norm() * v.norm()):
        return GaugedPair(u, v, True)
    lam = float(np.real((B * B).scalar))
    if abs(lam) > tol * B.norm() ** 2:
        B = B / math.sqrt(abs(lam))
    else:
        B = B / B.norm()
    G = exp_bivector(B * alpha)
    return GaugedPair(G.sandwich(u).grade(1), G.sandwich(v).grade(1), False)


def _plane_vector(b: Multivector) -> Multivector:
    for x in factor_blade(b):
        if abs((x * x).scalar) > 1e-12:
            return x
    raise NotABladeError("plane has no invertible vector")


def _mutually_orthogonal(vs: Sequence[Multivector], tol: float) -> bool:
    return all(
        abs((vs[i] * vs[j] + vs[j] * vs[i]).scalar) <= tol * vs[i].norm() * vs[j].norm()
        for i in range(len(vs)) for j in range(i + 1, len(vs))
    )


def orthogonalize_factorization(vs: Sequence[Multivector], tol: float = DEFAULT_TOL) -> list[Multivector]:
    """Regauge a product of reflections into mutually orthogonal groups.

    The result multiplies (in list order) to the same versor.  Consecutive
    pairs realise one commuting bireflection each; vectors from different
    pairs, and the trailing reflection of an odd versor, are orthogonal.
    """
    if not vs:
        raise ValueError("empty factorization")
    for x in vs:
        _check_vector(x, tol)
    alg = vs[0].alg
    U = alg.scalar(1.0)
    for x in vs:
        U = U * x
    if U.is_scalar(tol) or _mutually_orthogonal(vs, tol):
        return list(vs)
    dec = invariant_decompose(U, tol)
    out: list[Multivector] = []
    for f in dec.factors:
        x = _plane_vector(f.grade(2))
        out += [x, (versor_inverse(x, tol) * f).grade(1)]
    if dec.residual_reflection is not None:
        out.append(dec.residual_reflection)
    out[0] = out[0] * dec.scale
    return out


# --------------------------------------------------------------------------
# Polar decomposition


def sqrt_self_reverse(X: Multivector, tol: float = DEFAULT_TOL) -> Multivector:
    """Principal square root of ``x0 + x4`` with ``x4 * x4`` a scalar."""
    X = X.as_real(tol)
    if (X - X.grade(0) - (X.grade(4) if X.alg.d >= 4 else X.alg.zero())).norm() > tol * max(1.0, X.norm()):
        raise GradeError("sqrt_self_reverse needs grades {0, 4}")
    x0 = float(X.scalar)
    x4 = X.grade(4) if X.alg.d >= 4 else X.alg.zero()
    if x4.norm() <= tol * max(1.0, abs(x0)):
        if x0 <= 0:
            raise ValueError(f"no real principal square root of {x0}")
        return X.alg.scalar(math.sqrt(x0))
    sq = x4 * x4
    if not sq.is_scalar(tol):
        raise GradeError("grade-4 part does not square to a scalar")
    mu = float(sq.scalar)
    disc = x0 * x0 - mu
    if disc < 0 or x0 + math.sqrt(disc) <= 0:
        raise ValueError("no real principal square root")
    y0 = math.sqrt((x0 + math.sqrt(disc)) / 2)
    return y0 + x4 / (2 * y0)


def polar_decompose(psi: Multivector, tol: float = DEFAULT_TOL) -> tuple[Multivector, Multivector]:
    """``psi == S * R`` with ``S`` self-reverse and ``R ~R == 1``."""
    psi = psi.as_real(tol)
    if psi.odd().norm() > tol * max(1.0, psi.norm()):
        raise GradeError("polar_decompose needs an even element")
    norm = psi * ~psi
    extra = norm - norm.grade(0) - (norm.grade(4) if psi.alg.d >= 4 else psi.alg.zero())
    if extra.norm() > 1e-8 * max(1.0, norm.norm()):
        raise GradeError("psi ~psi has grades beyond {0, 4}")
    S = sqrt_self_reverse(norm, 1e-8)
    s0 = float(S.scalar)
    s4 = S - s0
    denom = (S * (s0 - s4))
    if not denom.is_scalar(1e-8) or abs(denom.scalar) <= tol:
        raise ValueError("psi ~psi is not invertible")
    S_inv = (s0 - s4) / float(denom.scalar)
    return S, S_inv * psi
