"""Dense Clifford algebra Cl(p, q, r) over real or complex scalars.

A multivector is a flat table of ``2**d`` coefficients indexed by a bitmask
over the basis vectors.  Bit ``i`` of the mask selects basis vector ``i``;
blades are stored in ascending index order, so the geometric product of two
basis blades reduces to a swap-count parity and a metric factor.

Basis vectors are laid out as ``r`` null vectors first, then ``p`` vectors
squaring to +1, then ``q`` vectors squaring to -1.  When ``r > 0`` labels are
0-based (``e0`` is the first null vector), otherwise 1-based (``e1 .. ed``).
"""

from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass
from numbers import Number
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    GradeError,
    NotAVersorError,
    NullVersorError,
    SignatureMismatchError,
)

DEFAULT_TOL = 1e-9
MAX_DIM = 12
ORACLE_MAX_DIM = 8


@dataclass(frozen=True)
class Signature:
    """Counts of basis vectors squaring to +1, -1 and 0."""

    p: int
    q: int = 0
    r: int = 0

    def __post_init__(self):
        if min(self.p, self.q, self.r) < 0:
            raise ValueError(f"negative signature entry in {self}")
        if self.d > MAX_DIM:
            raise ValueError(f"dimension {self.d} exceeds the dense limit {MAX_DIM}")

    @property
    def d(self) -> int:
        return self.p + self.q + self.r

    @property
    def metric(self) -> tuple[int, ...]:
        """Squares of the basis vectors in bit order."""
        return (0,) * self.r + (1,) * self.p + (-1,) * self.q

    @classmethod
    def parse(cls, text: str) -> "Signature":
        """Read ``"p,q,r"`` (missing trailing entries default to 0)."""
        parts = [s for s in text.replace(" ", "").split(",") if s]
        if not 1 <= len(parts) <= 3:
            raise ValueError(f"bad signature {text!r}")
        return cls(*(int(s) for s in parts))

    def __str__(self) -> str:
        return f"Cl({self.p},{self.q},{self.r})"


# --------------------------------------------------------------------------
# Cayley tables


def _blade_sign_table(metric: Sequence[int]) -> np.ndarray:
    """sign[i, j] such that e_i e_j = sign[i, j] e_(i^j)."""
    d = len(metric)
    n = 1 << d
    idx = np.arange(n, dtype=np.int32)
    table = np.empty((n, n), dtype=np.int8)
    chunk = max(1, (1 << 22) // n)
    for start in range(0, n, chunk):
        a = idx[start:start + chunk, None]
        b = idx[None, :]
        swaps = np.zeros((a.shape[0], n), dtype=np.int32)
        shifted = a >> 1
        for _ in range(d):
            swaps += np.bitwise_count(shifted & b)
            shifted = shifted >> 1
        sign = 1 - 2 * (swaps & 1)
        common = a & b
        for bit, g in enumerate(metric):
            if g != 1:
                hit = ((common >> bit) & 1).astype(bool)
                sign = np.where(hit, sign * g, sign)
        table[start:start + chunk] = sign
    return table


def _xor_permuted(table: np.ndarray) -> np.ndarray:
    """Re-index so that row i, column k holds the sign of e_i e_(i^k)."""
    n = table.shape[0]
    idx = np.arange(n)
    return np.ascontiguousarray(table[idx[:, None], idx[:, None] ^ idx[None, :]])


def _reference_blade_product(i: int, j: int, metric: Sequence[int]) -> tuple[int, int]:
    """Multiply two basis blades by sorting their index lists.

    Deliberately independent of the popcount-parity tables: the index lists
    are concatenated, bubble-sorted while counting transpositions, and equal
    neighbours are contracted with the metric.
    """
    d = len(metric)
    seq = [k for k in range(d) if i >> k & 1] + [k for k in range(d) if j >> k & 1]
    sign = 1
    changed = True
    while changed:
        changed = False
        for t in range(len(seq) - 1):
            if seq[t] > seq[t + 1]:
                seq[t], seq[t + 1] = seq[t + 1], seq[t]
                sign = -sign
                changed = True
    out = []
    t = 0
    while t < len(seq):
        if t + 1 < len(seq) and seq[t] == seq[t + 1]:
            sign *= metric[seq[t]]
            t += 2
        else:
            out.append(seq[t])
            t += 1
    mask = 0
    for k in out:
        mask |= 1 << k
    return sign, mask


class Algebra:
    """Tables and constructors for one signature.  Use :func:`algebra`."""

    def __init__(self, signature: Signature):
        self.signature = signature
        self.d = signature.d
        self.n = 1 << self.d
        self.metric = np.array(signature.metric, dtype=np.int8)
        masks = np.arange(self.n)
        self.grade_of = np.bitwise_count(masks).astype(np.int64)
        g = self.grade_of
        self.reverse_signs = np.where((g * (g - 1) // 2) % 2 == 0, 1, -1).astype(np.int8)
        self.involution_signs = np.where(g % 2 == 0, 1, -1).astype(np.int8)
        self.conjugate_signs = (self.reverse_signs * self.involution_signs).astype(np.int8)
        self._label_base = 0 if signature.r > 0 else 1

    def __repr__(self) -> str:
        return f"algebra({self.signature.p}, {self.signature.q}, {self.signature.r})"

    def __reduce__(self):
        return (algebra, (self.signature.p, self.signature.q, self.signature.r))

    # tables are built lazily; d = 12 tables take a few hundred MB of int8
    @functools.cached_property
    def _signs(self) -> np.ndarray:
        return _blade_sign_table(self.signature.metric)

    @functools.cached_property
    def gp_table(self) -> np.ndarray:
        return _xor_permuted(self._signs)

    @functools.cached_property
    def op_table(self) -> np.ndarray:
        idx = np.arange(self.n)
        disjoint = (idx[:, None] & idx[None, :]) == 0
        return _xor_permuted(np.where(disjoint, self._signs, 0).astype(np.int8))

    @functools.cached_property
    def lc_table(self) -> np.ndarray:
        idx = np.arange(self.n)
        inside = (idx[:, None] & ~idx[None, :]) == 0
        return _xor_permuted(np.where(inside, self._signs, 0).astype(np.int8))

    @functools.cached_property
    def _reference_table(self) -> tuple[np.ndarray, np.ndarray]:
        if self.d > ORACLE_MAX_DIM:
            raise ValueError(f"matrix oracle limited to d <= {ORACLE_MAX_DIM}")
        metric = self.signature.metric
        signs = np.zeros((self.n, self.n))
        target = np.zeros((self.n, self.n), dtype=np.int64)
        for i in range(self.n):
            for j in range(self.n):
                signs[i, j], target[i, j] = _reference_blade_product(i, j, metric)
        return signs, target

    # ---- labels
    def label(self, bit: int) -> int:
        return bit + self._label_base

    def bit(self, label: int) -> int:
        b = label - self._label_base
        if not 0 <= b < self.d:
            raise IndexError(f"basis index {label} outside {self.signature}")
        return b

    @property
    def labels(self) -> list[int]:
        return [self.label(b) for b in range(self.d)]

    # ---- constructors
    def zero(self, dtype=float) -> "Multivector":
        return Multivector(self, np.zeros(self.n, dtype=dtype))

    def scalar(self, value: complex = 1.0) -> "Multivector":
        c = np.zeros(self.n, dtype=np.result_type(value, float))
        c[0] = value
        return Multivector(self, c)

    def blade(self, *labels: int, coefficient: complex = 1.0) -> "Multivector":
        """Basis blade ``e_{labels}``; unsorted labels pick up the swap sign."""
        bits = [self.bit(lb) for lb in labels]
        if len(set(bits)) != len(bits):
            raise ValueError(f"repeated index in blade {labels}")
        mask = 0
        for b in bits:
            mask |= 1 << b
        parity = sum(1 for s in range(len(bits)) for t in range(s + 1, len(bits)) if bits[s] > bits[t])
        c = np.zeros(self.n, dtype=np.result_type(coefficient, float))
        c[mask] = coefficient * (-1) ** parity
        return Multivector(self, c)

    def e(self, label: int) -> "Multivector":
        return self.blade(label)

    @property
    def basis_vectors(self) -> list["Multivector"]:
        return [self.blade(self.label(b)) for b in range(self.d)]

    def vector(self, components: Iterable[complex]) -> "Multivector":
        comps = np.asarray(list(components))
        if comps.shape != (self.d,):
            raise ValueError(f"expected {self.d} vector components, got {comps.shape}")
        c = np.zeros(self.n, dtype=np.result_type(comps, float))
        c[1 << np.arange(self.d)] = comps
        return Multivector(self, c)

    def pseudoscalar(self, orientation: int = 1, nondegenerate: bool = False) -> "Multivector":
        """Unit pseudoscalar ``orientation * e_{1..d}``.

        The orientation is an explicit caller choice; nothing in the kernel
        prefers one sign.  ``nondegenerate=True`` drops the null vectors.
        """
        if orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        start = self.signature.r if nondegenerate else 0
        mask = 0
        for b in range(start, self.d):
            mask |= 1 << b
        c = np.zeros(self.n)
        c[mask] = orientation
        return Multivector(self, c)

    def parse(self, text: str) -> "Multivector":
        from .textio import parse

        return parse(text, self)


@functools.lru_cache(maxsize=None)
def algebra(p: int, q: int = 0, r: int = 0) -> Algebra:
    """Shared :class:`Algebra` instance for Cl(p, q, r)."""
    return Algebra(Signature(p, q, r))


def algebra_for(signature: Signature) -> Algebra:
    return algebra(signature.p, signature.q, signature.r)


# --------------------------------------------------------------------------
# Multivector


def _as_coeffs(values) -> np.ndarray:
    arr = np.asarray(values)
    if np.iscomplexobj(arr):
        arr = arr.astype(np.complex128, copy=True)
    else:
        arr = arr.astype(np.float64, copy=True)
    arr.flags.writeable = False
    return arr


def _product(table: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    rows = np.flatnonzero(a)
    dtype = np.result_type(a, b)
    if rows.size == 0 or not b.any():
        return np.zeros(a.shape[0], dtype=dtype)
    cols = rows[:, None] ^ np.arange(a.shape[0])[None, :]
    return np.einsum("i,ik->k", a[rows], b[cols] * table[rows])


class Multivector:
    """Immutable dense multivector bound to an :class:`Algebra`."""

    __slots__ = ("alg", "coeffs")
    __array_ufunc__ = None  # make numpy scalars defer to our reflected operators

    def __init__(self, alg: Algebra, coeffs):
        coeffs = _as_coeffs(coeffs)
        if coeffs.shape != (alg.n,):
            raise ValueError(f"expected {alg.n} coefficients, got shape {coeffs.shape}")
        object.__setattr__(self, "alg", alg)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("Multivector is immutable")

    def __reduce__(self):
        return (Multivector, (self.alg, np.array(self.coeffs)))

    # ---- basic properties
    @property
    def signature(self) -> Signature:
        return self.alg.signature

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.coeffs)

    @property
    def scalar(self) -> complex:
        """Grade-0 coefficient."""
        v = self.coeffs[0]
        return complex(v) if self.is_complex else float(v)

    def norm(self) -> float:
        """Euclidean norm of the coefficient table (metric-blind)."""
        return float(np.linalg.norm(self.coeffs))

    def real(self) -> "Multivector":
        return Multivector(self.alg, self.coeffs.real)

    def imag(self) -> "Multivector":
        return Multivector(self.alg, self.coeffs.imag)

    def conj(self) -> "Multivector":
        """Complex conjugate of every coefficient."""
        return Multivector(self.alg, np.conj(self.coeffs))

    def as_real(self, tol: float = DEFAULT_TOL) -> "Multivector":
        """Drop a negligible imaginary part, or raise if it is not negligible."""
        if not self.is_complex:
            return self
        if np.linalg.norm(self.coeffs.imag) > tol * max(1.0, self.norm()):
            raise ValueError("multivector has a non-negligible imaginary part")
        return self.real()

    def coefficient(self, *labels: int) -> complex:
        mask = 0
        for lb in labels:
            mask |= 1 << self.alg.bit(lb)
        sign = self.alg.blade(*labels).coeffs[mask] if labels else 1.0
        v = self.coeffs[mask] * sign
        return complex(v) if self.is_complex else float(v)

    # ---- grades
    def grade(self, k: int) -> "Multivector":
        if not 0 <= k <= self.alg.d:
            raise GradeError(f"grade {k} outside 0..{self.alg.d}")
        return Multivector(self.alg, np.where(self.alg.grade_of == k, self.coeffs, 0))

    def grades(self, tol: float = DEFAULT_TOL) -> set[int]:
        """Grades carrying coefficients above ``tol`` relative to the norm."""
        scale = self.norm()
        if scale == 0:
            return set()
        hit = np.abs(self.coeffs) > tol * scale
        return set(int(g) for g in np.unique(self.alg.grade_of[hit]))

    def even(self) -> "Multivector":
        return Multivector(self.alg, np.where(self.alg.grade_of % 2 == 0, self.coeffs, 0))

    def odd(self) -> "Multivector":
        return Multivector(self.alg, np.where(self.alg.grade_of % 2 == 1, self.coeffs, 0))

    def reverse(self) -> "Multivector":
        return Multivector(self.alg, self.coeffs * self.alg.reverse_signs)

    def involute(self) -> "Multivector":
        return Multivector(self.alg, self.coeffs * self.alg.involution_signs)

    def conjugate(self) -> "Multivector":
        """Clifford conjugate: reverse composed with grade involution."""
        return Multivector(self.alg, self.coeffs * self.alg.conjugate_signs)

    # ---- comparisons
    def isclose(self, other, tol: float = DEFAULT_TOL, *, relative: bool = True) -> bool:
        """Coefficient-wise closeness; ``tol`` scales with the larger norm when relative."""
        other = self._coerce(other)
        diff = np.linalg.norm(self.coeffs - other.coeffs)
        scale = max(1.0, self.norm(), other.norm()) if relative else 1.0
        return bool(diff <= tol * scale)

    def is_scalar(self, tol: float = DEFAULT_TOL) -> bool:
        rest = np.linalg.norm(self.coeffs[1:])
        return bool(rest <= tol * max(1.0, self.norm()))

    def is_zero(self, tol: float = DEFAULT_TOL) -> bool:
        return self.norm() <= tol

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except (TypeError, SignatureMismatchError):
            return NotImplemented
        return bool(np.array_equal(self.coeffs, other.coeffs))

    __hash__ = None

    # ---- arithmetic
    def _coerce(self, other) -> "Multivector":
        if isinstance(other, Multivector):
            if other.alg.signature != self.alg.signature:
                raise SignatureMismatchError(f"{self.alg.signature} vs {other.alg.signature}")
            return other
        if isinstance(other, (Number, np.number)):
            return self.alg.scalar(other)
        raise TypeError(f"cannot combine Multivector with {type(other).__name__}")

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return Multivector(self.alg, self.coeffs + other.coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return Multivector(self.alg, self.coeffs - other.coeffs)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Multivector(self.alg, -self.coeffs)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, (Number, np.number)):
            return Multivector(self.alg, self.coeffs * other)
        if isinstance(other, Multivector):
            return geometric_product(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (Number, np.number)):
            return Multivector(self.alg, self.coeffs * other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (Number, np.number)):
            return Multivector(self.alg, self.coeffs / other)
        if isinstance(other, Multivector):
            return self * versor_inverse(other)
        return NotImplemented

    def __xor__(self, other):
        if isinstance(other, Multivector):
            return outer_product(self, other)
        if isinstance(other, (Number, np.number)):
            return self * other
        return NotImplemented

    def __invert__(self):
        return self.reverse()

    # ---- convenience wrappers
    def commutator(self, other: "Multivector") -> "Multivector":
        return commutator_product(self, other)

    def lc(self, other: "Multivector") -> "Multivector":
        return left_contraction(self, other)

    def inverse(self, tol: float = DEFAULT_TOL) -> "Multivector":
        return versor_inverse(self, tol)

    def sandwich(self, w: "Multivector", tol: float = DEFAULT_TOL) -> "Multivector":
        return sandwich(self, w, tol)

    def exp(self) -> "Multivector":
        return exp_bivector(self)

    def __str__(self) -> str:
        from .textio import format_multivector

        return format_multivector(self)

    def __repr__(self) -> str:
        return f"Multivector({self.alg.signature}, {str(self)!r})"


# --------------------------------------------------------------------------
# Products


def _check_pair(a: Multivector, b: Multivector) -> None:
    if not isinstance(a, Multivector) or not isinstance(b, Multivector):
        raise TypeError("operands must be Multivectors")
    if a.alg.signature != b.alg.signature:
        raise SignatureMismatchError(f"{a.alg.signature} vs {b.alg.signature}")


def geometric_product(a: Multivector, b: Multivector) -> Multivector:
    _check_pair(a, b)
    return Multivector(a.alg, _product(a.alg.gp_table, a.coeffs, b.coeffs))


def batch_geometric_product(alg: Algebra, a: np.ndarray, b: np.ndarray, chunk: int = 512) -> np.ndarray:
    """Row-wise geometric products of two ``(N, 2^d)`` coefficient arrays."""
    a = np.atleast_2d(a)
    b = np.atleast_2d(b)
    idx = np.arange(alg.n)
    cols = idx[:, None] ^ idx[None, :]
    table = alg.gp_table
    out = np.empty((a.shape[0], alg.n), dtype=np.result_type(a, b))
    for start in range(0, a.shape[0], chunk):
        sl = slice(start, start + chunk)
        out[sl] = np.einsum("ni,nik,ik->nk", a[sl], b[sl][:, cols], table, optimize=True)
    return out


def outer_product(a: Multivector, b: Multivector) -> Multivector:
    _check_pair(a, b)
    return Multivector(a.alg, _product(a.alg.op_table, a.coeffs, b.coeffs))


def left_contraction(a: Multivector, b: Multivector) -> Multivector:
    _check_pair(a, b)
    return Multivector(a.alg, _product(a.alg.lc_table, a.coeffs, b.coeffs))


def commutator_product(a: Multivector, b: Multivector) -> Multivector:
    """``a x b = (ab - ba) / 2``."""
    _check_pair(a, b)
    return (a * b - b * a) * 0.5


def scalar_product(a: Multivector, b: Multivector) -> complex:
    """``<a b>_0`` computed without forming the full product."""
    _check_pair(a, b)
    alg = a.alg
    # <e_i e_j>_0 is non-zero only for j == i, with value sign[i, i]
    diag = alg.gp_table[:, 0]
    v = np.sum(a.coeffs * b.coeffs * diag)
    return complex(v) if np.iscomplexobj(v) else float(v)


def metric_dot(x: Multivector, y: Multivector) -> complex:
    """Symmetric inner product of two vectors."""
    return scalar_product(x, y)


def reverse(a: Multivector) -> Multivector:
    return a.reverse()


def grade_involution(a: Multivector) -> Multivector:
    return a.involute()


def clifford_conjugate(a: Multivector) -> Multivector:
    return a.conjugate()


def grade_select(a: Multivector, k: int) -> Multivector:
    return a.grade(k)


# --------------------------------------------------------------------------
# Versors


def versor_norm(u: Multivector) -> Multivector:
    return u * ~u


def versor_inverse(u: Multivector, tol: float = DEFAULT_TOL) -> Multivector:
    """``u~ / (u u~)``; requires ``u u~`` to be a non-zero scalar."""
    n = versor_norm(u)
    scale = max(u.norm() ** 2, np.finfo(float).tiny)
    if not n.is_scalar(tol):
        raise NotAVersorError(f"u u~ is not a scalar: {n}")
    s = n.scalar
    if abs(s) <= tol * scale:
        raise NullVersorError(f"versor norm vanishes for {u}")
    return ~u / s


def sandwich(u: Multivector, w: Multivector, tol: float = DEFAULT_TOL) -> Multivector:
    """``u w u^{-1}``."""
    _check_pair(u, w)
    return u * w * versor_inverse(u, tol)


@dataclass(frozen=True)
class VersorCertificate:
    subject: Multivector
    parity: str
    norm: complex


def certify_versor(u: Multivector, tol: float = DEFAULT_TOL) -> VersorCertificate:
    """Probabilistic versor test.

    Checks pure parity, a non-zero scalar ``u u~`` and that conjugation keeps
    every basis vector inside grade 1.  This is a necessary-condition probe,
    not a factorization proof.
    """
    scale = max(u.norm(), np.finfo(float).tiny)
    even, odd = u.even(), u.odd()
    if odd.norm() <= tol * scale:
        parity = "even"
    elif even.norm() <= tol * scale:
        parity = "odd"
    else:
        raise NotAVersorError("mixed parity")
    inv = versor_inverse(u, tol)
    for e in u.alg.basis_vectors:
        image = u * e * inv
        stray = image - image.grade(1)
        if stray.norm() > tol * max(1.0, image.norm()):
            raise NotAVersorError(f"conjugation of {e} leaves grade 1")
    return VersorCertificate(u, parity, versor_norm(u).scalar)


# --------------------------------------------------------------------------
# Exponential


def _is_pure_grade(a: Multivector, k: int, tol: float) -> bool:
    return (a - a.grade(k)).norm() <= tol * max(1.0, a.norm())


def is_simple_bivector(b: Multivector, tol: float = DEFAULT_TOL) -> bool:
    return (b ^ b).norm() <= tol * max(1.0, b.norm() ** 2)


def _exp_simple(b: Multivector) -> Multivector:
    lam = (b * b).scalar
    if isinstance(lam, complex):
        if abs(lam.imag) > 1e-14 * max(1.0, abs(lam)):
            root = cmath.sqrt(lam)
            if root == 0:
                return 1 + b
            return cmath.cosh(root) + b * (cmath.sinh(root) / root)
        lam = lam.real
    if lam < 0:
        a = math.sqrt(-lam)
        return math.cos(a) + b * float(np.sinc(a / math.pi))
    a = math.sqrt(lam)
    ratio = math.sinh(a) / a if a > 1e-6 else 1.0 + lam / 6.0
    return math.cosh(a) + b * ratio


def exp_bivector(B: Multivector, tol: float = DEFAULT_TOL) -> Multivector:
    """Exponential of a bivector.

    Simple bivectors use the closed form selected by the sign of ``B**2``;
    other bivectors are split into commuting simple parts first.
    """
    if not _is_pure_grade(B, 2, tol):
        raise GradeError(f"exp_bivector needs a pure bivector, got grades {sorted(B.grades())}")
    B = B.grade(2)
    if is_simple_bivector(B, tol):
        return _exp_simple(B)
    from .decomposition import bivector_split

    out = B.alg.scalar(1.0)
    for factor in bivector_split(B, tol):
        out = out * _exp_simple(factor.bivector)
    return out


# --------------------------------------------------------------------------
# Matrix oracle


def matrix_rep(a: Multivector) -> np.ndarray:
    """Left-regular representation: ``matrix_rep(a) @ b.coeffs == (a*b).coeffs``.

    Built from :func:`_reference_blade_product`, independent of the product
    kernel, so agreement between the two is a genuine cross-check.
    """
    alg = a.alg
    signs, target = alg._reference_table
    rows = np.flatnonzero(a.coeffs)
    out = np.zeros((alg.n, alg.n), dtype=a.coeffs.dtype)
    cols = np.arange(alg.n)
    for i in rows:
        out[target[i], cols] += a.coeffs[i] * signs[i]
    return out


def from_matrix_column(alg: Algebra, matrix: np.ndarray) -> Multivector:
    """Recover ``a`` from ``matrix_rep(a)`` (its action on the scalar 1)."""
    return Multivector(alg, matrix[:, 0])
