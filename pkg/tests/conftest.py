import numpy as np
import pytest

from pgaspin.algebra import Multivector


def as_terms(mv: Multivector) -> dict[tuple[int, ...], complex]:
    """Blade -> coefficient map (1-based labels), for the matrix oracle."""
    alg = mv.alg
    out = {}
    for mask in range(alg.n):
        c = mv.coeffs[mask]
        if c != 0:
            out[tuple(alg.label(b) for b in range(alg.d) if mask >> b & 1)] = complex(c)
    return out


def from_terms(alg, terms) -> Multivector:
    out = alg.zero(complex)
    for idx, c in terms.items():
        out = out + alg.blade(*idx, coefficient=c)
    return out


@pytest.fixture
def gen():
    return np.random.default_rng(20241018)
