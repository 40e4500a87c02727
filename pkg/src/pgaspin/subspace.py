"""Vector-subspace helpers shared by the decomposition and point modules.

Vectors are handled here as plain coefficient arrays of length ``d``; the
metric is the diagonal of the algebra (entries +1, -1 or 0).
"""

from __future__ import annotations

import numpy as np

from .algebra import DEFAULT_TOL, Algebra, Multivector
from .errors import GradeError, NotABladeError

_SCORE_TOL = 1e-8


def vector_part(mv: Multivector) -> np.ndarray:
    """Grade-1 coefficients in bit order."""
    return np.array(mv.coeffs[1 << np.arange(mv.alg.d)])


def metric_dot(alg: Algebra, x: np.ndarray, y: np.ndarray) -> float:
    return float(np.sum(alg.metric * x * y))


def null_space(a: np.ndarray, rtol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis (columns) of the null space of ``a``."""
    a = np.atleast_2d(a)
    cols = a.shape[1]
    if a.shape[0] == 0 or not np.any(a):
        return np.eye(cols)
    _, s, vh = np.linalg.svd(a)
    rank = int(np.sum(s > rtol * s[0]))
    return vh[rank:].conj().T


def orthonormal_span(vectors: np.ndarray, rtol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis of the column span of ``vectors``."""
    if vectors.size == 0:
        return vectors.reshape(vectors.shape[0], 0)
    u, s, _ = np.linalg.svd(vectors, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return u[:, :0]
    return u[:, : int(np.sum(s > rtol * s[0]))]


def _score(alg: Algebra, v: np.ndarray) -> float:
    nn = float(v @ v)
    return abs(metric_dot(alg, v, v)) / nn if nn > 0 else 0.0


def best_candidate(alg: Algebra, basis: np.ndarray, prefer_last: bool = False) -> np.ndarray | None:
    """Deterministic non-null vector inside ``span(basis)``.

    Candidates are the orthogonal projections of the coordinate axes onto the
    span, which do not depend on which orthonormal basis represents it.  The
    most non-null candidate wins; ties go to the lowest axis (or the highest
    with ``prefer_last``).  Sums and differences of candidate pairs are tried
    when every single candidate is null.
    """
    if basis.shape[1] == 0:
        return None
    proj = basis @ basis.T
    cands = [proj[:, i] for i in range(alg.d) if np.linalg.norm(proj[:, i]) > 1e-6]
    order = list(reversed(cands)) if prefer_last else cands
    best, best_score = None, _SCORE_TOL
    for c in order:
        sc = _score(alg, c)
        if sc > best_score * (1 + 1e-9):
            best, best_score = c, sc
    if best is not None:
        return best
    for i in range(len(cands)):
        for j in range(i + 1, len(cands)):
            for sign in (1.0, -1.0):
                c = cands[i] + sign * cands[j]
                if np.linalg.norm(c) > 1e-6 and _score(alg, c) > _SCORE_TOL:
                    return c
    return None


def metric_complement(alg: Algebra, basis: np.ndarray, *vectors: np.ndarray) -> np.ndarray:
    """Part of ``span(basis)`` metrically orthogonal to every given vector."""
    if basis.shape[1] == 0:
        return basis
    constraints = np.stack([basis.T @ (alg.metric * v) for v in vectors])
    return basis @ null_space(constraints)


def metric_frame(alg: Algebra, basis: np.ndarray) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Mutually orthogonal vectors spanning ``span(basis)``.

    Returns ``(non_null, null)``; null directions are peeled last and can only
    appear once every non-null direction has been removed.
    """
    chosen: list[np.ndarray] = []
    q = basis
    while q.shape[1] > 0:
        v = best_candidate(alg, q)
        if v is None:
            return chosen, [q[:, i] for i in range(q.shape[1])]
        chosen.append(v)
        q = metric_complement(alg, q, v)
    return chosen, []


def blade_subspace(blade: Multivector, rtol: float = 1e-8) -> np.ndarray:
    """Orthonormal basis of ``{x : x ^ blade == 0}``."""
    alg = blade.alg
    cols = [(e ^ blade).coeffs for e in alg.basis_vectors]
    wedge = np.stack(cols, axis=1)
    if np.iscomplexobj(wedge):
        raise GradeError("blade factorization needs a real multivector")
    return null_space(wedge, rtol)


def factor_blade(blade: Multivector, tol: float = DEFAULT_TOL) -> list[Multivector]:
    """Mutually orthogonal vectors whose geometric product is ``blade``.

    Non-null factors come first, each normalized to ``|v*v| = 1``, with the
    blade's magnitude and sign carried by the first factor.  Null factors
    (degenerate metric) come last.
    """
    alg = blade.alg
    grades = blade.grades(tol)
    if not grades:
        raise NotABladeError("zero has no factorization")
    if len(grades) != 1:
        raise NotABladeError(f"mixed grades {sorted(grades)} are not a blade")
    (k,) = grades
    blade = blade.as_real(tol).grade(k)
    if k == 0:
        return []
    span = blade_subspace(blade)
    if span.shape[1] != k:
        raise NotABladeError(f"grade-{k} element spans {span.shape[1]} dimensions, not a blade")
    non_null, null = metric_frame(alg, span)
    vecs = []
    for v in non_null:
        vecs.append(v / np.sqrt(abs(metric_dot(alg, v, v))))
    for v in null:
        v = v / np.linalg.norm(v)
        vecs.append(v if v[np.argmax(np.abs(v))] > 0 else -v)
    mvs = [alg.vector(v) for v in vecs]
    wedge = alg.scalar(1.0)
    for v in mvs:
        wedge = wedge ^ v
    top = int(np.argmax(np.abs(blade.coeffs)))
    ratio = blade.coeffs[top] / wedge.coeffs[top]
    if not (wedge * ratio).isclose(blade, tol * 10):
        raise NotABladeError("element is not a blade")
    mvs[0] = mvs[0] * float(ratio)
    return mvs


def adjoint_matrix(bivector: Multivector) -> np.ndarray:
    """Matrix of ``x -> bivector x x`` (commutator) on the vector space."""
    alg = bivector.alg
    cols = [vector_part(bivector.commutator(e)) for e in alg.basis_vectors]
    return np.stack(cols, axis=1)


def action_matrix(left: Multivector, right: Multivector) -> np.ndarray:
    """Matrix of ``x -> left x right`` restricted to grade 1."""
    alg = left.alg
    cols = [vector_part(left * e * right) for e in alg.basis_vectors]
    return np.stack(cols, axis=1)
