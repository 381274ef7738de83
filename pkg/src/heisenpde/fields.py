"""Scalar fields on R^3 with two derivative providers.

PolynomialField keeps coefficients as exact Fractions, so repeated
applications of the horizontal fields (and hence every commutator and lift
identity) are exact; floats only appear at evaluation time.  NumericField
wraps an arbitrary vectorized callable and differentiates it with centered
finite differences of step h_fd (order 2 on smooth inputs).  Every lemma test
can therefore cross-check the exact route against the finite-difference one.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

import numpy as np

from .group import Point


class ScalarField:
    """Evaluation plus first/second partial derivatives at a point."""

    def value(self, p: Point) -> float:
        raise NotImplementedError

    def value_batch(self, pts: np.ndarray) -> np.ndarray:
        return np.array([self.value(Point(*row)) for row in np.asarray(pts, dtype=float)])

    def partial(self, p: Point, i: int) -> float:
        raise NotImplementedError

    def second_partial(self, p: Point, i: int, j: int) -> float:
        raise NotImplementedError


class PolynomialField(ScalarField):
    """Polynomial in (x1, x2, x3) with exact rational coefficients.

    terms maps exponent triples (a, b, d) to Fraction coefficients; float
    inputs are converted exactly (every double is a dyadic rational).
    """

    def __init__(self, terms: dict[tuple[int, int, int], Fraction | float | int]):
        clean: dict[tuple[int, int, int], Fraction] = {}
        for expo, coeff in terms.items():
            frac = coeff if isinstance(coeff, Fraction) else Fraction(coeff)
            if frac != 0:
                clean[tuple(int(e) for e in expo)] = clean.get(tuple(expo), Fraction(0)) + frac
        self.terms = {e: c for e, c in clean.items() if c != 0}
        self._expos = np.array(sorted(self.terms), dtype=np.int64).reshape(-1, 3)
        self._coeffs = np.array([float(self.terms[tuple(e)]) for e in self._expos])

    @staticmethod
    def constant(c) -> "PolynomialField":
        return PolynomialField({(0, 0, 0): c})

    @staticmethod
    def coordinate(i: int) -> "PolynomialField":
        expo = [0, 0, 0]
        expo[i] = 1
        return PolynomialField({tuple(expo): 1})

    def value(self, p: Point) -> float:
        x = (p.x1, p.x2, p.x3)
        total = 0.0
        for (a, b, d), c in zip(self._expos, self._coeffs):
            total += c * x[0] ** a * x[1] ** b * x[2] ** d
        return total

    def value_batch(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        if len(self._coeffs) == 0:
            return np.zeros(pts.shape[0])
        monomials = np.prod(pts[:, None, :] ** self._expos[None, :, :], axis=2)
        return monomials @ self._coeffs

    def partial_field(self, i: int) -> "PolynomialField":
        out: dict[tuple[int, int, int], Fraction] = {}
        for expo, c in self.terms.items():
            if expo[i] == 0:
                continue
            new = list(expo)
            new[i] -= 1
            key = tuple(new)
            out[key] = out.get(key, Fraction(0)) + c * expo[i]
        return PolynomialField(out)

    def partial(self, p: Point, i: int) -> float:
        return self.partial_field(i).value(p)

    def second_partial(self, p: Point, i: int, j: int) -> float:
        return self.partial_field(i).partial_field(j).value(p)

    def shift_monomial(self, expo: tuple[int, int, int], factor) -> "PolynomialField":
        """Multiply by factor * x1^a x2^b x3^d."""
        frac = factor if isinstance(factor, Fraction) else Fraction(factor)
        return PolynomialField(
            {
                (e[0] + expo[0], e[1] + expo[1], e[2] + expo[2]): c * frac
                for e, c in self.terms.items()
            }
        )

    def apply_x(self) -> "PolynomialField":
        """The field X = d/dx1 + 2*x2*d/dx3, applied symbolically."""
        return self.partial_field(0) + self.partial_field(2).shift_monomial((0, 1, 0), 2)

    def apply_y(self) -> "PolynomialField":
        """The field Y = d/dx2 - 2*x1*d/dx3, applied symbolically."""
        return self.partial_field(1) + self.partial_field(2).shift_monomial((1, 0, 0), -2)

    def dilate(self, lam: float) -> "PolynomialField":
        """Compose with the dilation (lam*x1, lam*x2, lam^2*x3), exactly."""
        frac = Fraction(lam)
        return PolynomialField(
            {e: c * frac ** (e[0] + e[1] + 2 * e[2]) for e, c in self.terms.items()}
        )

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def __add__(self, other: "PolynomialField") -> "PolynomialField":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return PolynomialField(out)

    def __sub__(self, other: "PolynomialField") -> "PolynomialField":
        return self + (other * -1)

    def __mul__(self, t) -> "PolynomialField":
        return self.shift_monomial((0, 0, 0), t)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, PolynomialField) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))


class NumericField(ScalarField):
    """Field defined by a vectorized callable, differentiated by centered FD."""

    def __init__(self, fn, h_fd: float = 1e-4):
        if not h_fd > 0:
            raise ValueError("h_fd must be positive")
        self.fn = fn
        self.h_fd = h_fd

    def value(self, p: Point) -> float:
        out = float(np.asarray(self.fn(np.array([[p.x1, p.x2, p.x3]])))[0])
        if not math.isfinite(out):
            raise ValueError(f"field evaluation returned {out} at {p}")
        return out

    def value_batch(self, pts: np.ndarray) -> np.ndarray:
        return np.asarray(self.fn(np.asarray(pts, dtype=float)), dtype=float)

    def partial(self, p: Point, i: int) -> float:
        h = self.h_fd
        e = np.zeros(3)
        e[i] = h
        x = np.array([p.x1, p.x2, p.x3])
        vals = self.value_batch(np.array([x + e, x - e]))
        return float((vals[0] - vals[1]) / (2 * h))

    def second_partial(self, p: Point, i: int, j: int) -> float:
        h = self.h_fd
        x = np.array([p.x1, p.x2, p.x3])
        ei = np.zeros(3)
        ei[i] = h
        if i == j:
            vals = self.value_batch(np.array([x + ei, x, x - ei]))
            return float((vals[0] - 2 * vals[1] + vals[2]) / (h * h))
        ej = np.zeros(3)
        ej[j] = h
        vals = self.value_batch(np.array([x + ei + ej, x + ei - ej, x - ei + ej, x - ei - ej]))
        return float((vals[0] - vals[1] - vals[2] + vals[3]) / (4 * h * h))


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<var>x[123])|(?P<pow>\^)|(?P<mul>\*)|(?P<plus>\+)|(?P<minus>-))"
)


def parse_polynomial(text: str) -> PolynomialField:
    """Parse the text form ``c * x1^a x2^b x3^d + ...`` into a field.

    The coefficient and the ``*`` are optional, factors may be separated by
    spaces, and exponents are nonnegative integers.
    """
    tokens: list[tuple[str, str]] = []
    pos = 0
    text = text.strip()
    if not text:
        raise ValueError("empty polynomial")
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ValueError(f"unexpected character {text[pos]!r} in polynomial {text!r}")
        pos = m.end()
        kind = m.lastgroup
        tokens.append((kind, m.group(kind)))

    terms: dict[tuple[int, int, int], Fraction] = {}
    i = 0
    n = len(tokens)
    while i < n:
        sign = Fraction(1)
        while i < n and tokens[i][0] in ("plus", "minus"):
            if tokens[i][0] == "minus":
                sign = -sign
            i += 1
        if i >= n:
            raise ValueError(f"dangling sign in polynomial {text!r}")
        coeff = sign
        expo = [0, 0, 0]
        saw_factor = False
        pending_mul = False
        while i < n and tokens[i][0] in ("num", "var", "mul"):
            kind, val = tokens[i]
            if kind == "mul":
                if pending_mul or not saw_factor:
                    raise ValueError(f"misplaced '*' in polynomial {text!r}")
                pending_mul = True
                i += 1
                continue
            if kind == "num":
                coeff *= Fraction(float(val))
                i += 1
            else:
                axis = int(val[1]) - 1
                power = 1
                if i + 1 < n and tokens[i + 1][0] == "pow":
                    if i + 2 >= n or tokens[i + 2][0] != "num":
                        raise ValueError(f"missing exponent in polynomial {text!r}")
                    power = int(tokens[i + 2][1])
                    i += 2
                expo[axis] += power
                i += 1
            saw_factor = True
            pending_mul = False
        if not saw_factor or pending_mul:
            raise ValueError(f"empty term in polynomial {text!r}")
        key = tuple(expo)
        terms[key] = terms.get(key, Fraction(0)) + coeff
    return PolynomialField(terms)


def smooth_abs_field(eps: float = 0.1, scale: float = 1.0, offset: float = 0.0) -> NumericField:
    """scale * (sqrt(|x|^2 + eps^2) - eps) + offset: a smooth Lipschitz-`scale` bump."""
    if not eps > 0:
        raise ValueError("eps must be positive")

    def fn(pts: np.ndarray) -> np.ndarray:
        r2 = np.sum(np.asarray(pts, dtype=float) ** 2, axis=1)
        return scale * (np.sqrt(r2 + eps * eps) - eps) + offset

    return NumericField(fn)


BUILTIN_FIELDS = {"smooth_abs": smooth_abs_field}


def field_from_config(cfg: dict) -> ScalarField:
    """Build a field from a CLI config entry: {"poly": ...} or {"builtin": ...}."""
    if not isinstance(cfg, dict):
        raise ValueError(f"field config must be an object, got {cfg!r}")
    if "poly" in cfg:
        extra = set(cfg) - {"poly"}
        if extra:
            raise ValueError(f"unknown field config keys: {sorted(extra)}")
        return parse_polynomial(cfg["poly"])
    if "builtin" in cfg:
        name = cfg["builtin"]
        if name not in BUILTIN_FIELDS:
            raise ValueError(f"unknown builtin field {name!r}")
        kwargs = {k: v for k, v in cfg.items() if k != "builtin"}
        return BUILTIN_FIELDS[name](**kwargs)
    raise ValueError("field config needs a 'poly' or 'builtin' key")
