from fractions import Fraction

import numpy as np

from heisenpde.fields import PolynomialField
from heisenpde.rng import SplitMix64


def random_polynomial(g: SplitMix64, degree: int = 6, n_terms: int = 8) -> PolynomialField:
    """Random polynomial with uniform(-1,1) coefficients and total degree <= degree."""
    terms = {}
    coeffs = g.uniform(n_terms, -1.0, 1.0)
    for k in range(n_terms):
        a = int(g.integers(1, 0, degree + 1)[0])
        b = int(g.integers(1, 0, degree + 1 - a)[0])
        d = int(g.integers(1, 0, max(1, (degree - a - b) // 2 + 1))[0])
        key = (a, b, d)
        terms[key] = terms.get(key, Fraction(0)) + Fraction(float(coeffs[k]))
    return PolynomialField(terms)


def random_points(g: SplitMix64, n: int, lo: float = -2.0, hi: float = 2.0) -> np.ndarray:
    return g.uniform(3 * n, lo, hi).reshape(n, 3)
