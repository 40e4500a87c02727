"""Random elements for property tests, acceptance runs and the CLI."""

from __future__ import annotations

import math

import numpy as np

from .algebra import Algebra, Multivector, exp_bivector


def rng(seed: int | None = None) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_multivector(alg: Algebra, gen: np.random.Generator, complex_: bool = False) -> Multivector:
    c = gen.standard_normal(alg.n)
    if complex_:
        c = c + 1j * gen.standard_normal(alg.n)
    return Multivector(alg, c)


def random_vector(alg: Algebra, gen: np.random.Generator, min_square: float = 0.1) -> Multivector:
    """Gaussian vector with ``|x*x| >= min_square * |x|^2`` (kept away from the null cone)."""
    metric = np.asarray(alg.metric, dtype=float)
    while True:
        x = gen.standard_normal(alg.d)
        sq = float(np.sum(metric * x * x))
        if abs(sq) >= min_square * float(x @ x):
            return alg.vector(x)


def random_unit_vector(alg: Algebra, gen: np.random.Generator, min_square: float = 0.1) -> Multivector:
    x = random_vector(alg, gen, min_square)
    return x / math.sqrt(abs(float((x * x).scalar)))


def random_versor(alg: Algebra, gen: np.random.Generator, length: int) -> tuple[Multivector, list[Multivector]]:
    """Product of ``length`` random unit vectors, together with the vectors."""
    vs = [random_unit_vector(alg, gen) for _ in range(length)]
    out = alg.scalar(1.0)
    for v in vs:
        out = out * v
    return out, vs


def random_bivector(alg: Algebra, gen: np.random.Generator, scale: float = 1.0) -> Multivector:
    c = np.zeros(alg.n)
    mask = alg.grade_of == 2
    c[mask] = scale * gen.standard_normal(int(mask.sum()))
    return Multivector(alg, c)


def random_rotor(alg: Algebra, gen: np.random.Generator, scale: float = 1.0) -> Multivector:
    return exp_bivector(random_bivector(alg, gen, scale))


def random_unit_rotation_bivector(alg: Algebra, gen: np.random.Generator) -> Multivector:
    """Random simple bivector with ``b*b == -1`` (spanned by two spacelike or two timelike vectors)."""
    while True:
        x = random_vector(alg, gen)
        y = random_vector(alg, gen)
        b = (x ^ y)
        sq = float((b * b).scalar)
        if sq < -1e-3 * b.norm() ** 2:
            return b / math.sqrt(-sq)
