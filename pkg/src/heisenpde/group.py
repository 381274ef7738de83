"""The Heisenberg group H^1 on R^3: group law, dilations, frame, and P, sqrt(P).

Points are (x1, x2, x3) with the non-commutative product
``x . y = (x1+y1, x2+y2, x3+y3+2*(y1*x2 - y2*x1))``.  The horizontal frame is
X = (1, 0, 2*x2), Y = (0, 1, -2*x1), T = (0, 0, 1), with [X, Y] = -4T.  The
coefficient matrix sigma has rows X, Y; P = sigma^T sigma is positive
semidefinite with a structurally zero eigenvalue, and sqrt_p is its matrix
square root in a closed form that is regular at x' = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .symmetric import Mat2x3, Sym3

Vec3 = np.ndarray
Vec2 = np.ndarray


@dataclass(frozen=True)
class Point:
    """A point of H^1 ~ R^3; x' denotes the horizontal pair (x1, x2)."""

    x1: float
    x2: float
    x3: float

    def __post_init__(self):
        if not (math.isfinite(self.x1) and math.isfinite(self.x2) and math.isfinite(self.x3)):
            raise ValueError("point coordinates must be finite")

    @staticmethod
    def of(x1: float, x2: float, x3: float) -> "Point":
        return Point(float(x1), float(x2), float(x3))

    @property
    def xy(self) -> Vec2:
        return np.array([self.x1, self.x2])

    def as_array(self) -> Vec3:
        return np.array([self.x1, self.x2, self.x3])


ORIGIN = Point(0.0, 0.0, 0.0)


def group_mul(p: Point, q: Point) -> Point:
    return Point(
        p.x1 + q.x1,
        p.x2 + q.x2,
        p.x3 + q.x3 + 2.0 * (q.x1 * p.x2 - q.x2 * p.x1),
    )


def group_inv(p: Point) -> Point:
    return Point(-p.x1, -p.x2, -p.x3)


def dilate(lam: float, p: Point) -> Point:
    """Homogeneous dilation (lam*x1, lam*x2, lam^2*x3); lam must be positive."""
    if not lam > 0.0:
        raise ValueError(f"dilation factor must be positive, got {lam}")
    return Point(lam * p.x1, lam * p.x2, lam * lam * p.x3)


def frame(p: Point) -> tuple[Vec3, Vec3, Vec3]:
    """Horizontal frame (X, Y) and the vertical direction T at p."""
    x = np.array([1.0, 0.0, 2.0 * p.x2])
    y = np.array([0.0, 1.0, -2.0 * p.x1])
    t = np.array([0.0, 0.0, 1.0])
    return x, y, t


def sigma(p: Point) -> Mat2x3:
    """Coefficient matrix with rows X(p), Y(p)."""
    return Mat2x3(((1.0, 0.0, 2.0 * p.x2), (0.0, 1.0, -2.0 * p.x1)))


def p_matrix(p: Point) -> Sym3:
    """P(p) = sigma(p)^T sigma(p); annihilates (-2*x2, 2*x1, 1) exactly."""
    x1, x2 = p.x1, p.x2
    # a33 written as 4*(x1*x1 + x2*x2) so the null-vector product cancels
    # exactly in IEEE arithmetic (powers of two commute with rounding).
    return Sym3(
        1.0,
        0.0,
        2.0 * x2,
        1.0,
        -2.0 * x1,
        4.0 * (x1 * x1 + x2 * x2),
    )


def null_direction(p: Point) -> Vec3:
    """The exact kernel vector (-2*x2, 2*x1, 1) of P(p)."""
    return np.array([-2.0 * p.x2, 2.0 * p.x1, 1.0])


def sqrt_p(p: Point) -> Sym3:
    """Closed-form square root of P(p), regular at x' = 0.

    Writing w = (2*x2, -2*x1) (so P = [[I, w], [w^T, |w|^2]]), the PSD root is
    sigma^T (sigma sigma^T)^{-1/2} sigma = [[I - (1-1/s) ww^T/|w|^2, w/s],
    [w^T/s, |w|^2/s]] with s = sqrt(1 + |w|^2).  In regularized entries, with
    D = (1+s)*s: diagonal 1 - 4*x2^2/D, 1 - 4*x1^2/D, 4*(x1^2+x2^2)/s and
    off-diagonal 4*x1*x2/D, 2*x2/s, -2*x1/s.  (The x2^2/x1^2 placement on the
    diagonal is forced by sqrt_p(p)^2 = p_matrix(p).)
    """
    x1, x2 = p.x1, p.x2
    rho2 = x1 * x1 + x2 * x2
    s = math.sqrt(1.0 + 4.0 * rho2)
    d = (1.0 + s) * s
    return Sym3(
        1.0 - 4.0 * x2 * x2 / d,
        4.0 * x1 * x2 / d,
        2.0 * x2 / s,
        1.0 - 4.0 * x1 * x1 / d,
        -2.0 * x1 / s,
        4.0 * rho2 / s,
    )


def p_matrix_batch(xy: np.ndarray) -> np.ndarray:
    """P at a batch of horizontal parts; xy has shape (n, 2), result (n, 3, 3)."""
    x1, x2 = xy[:, 0], xy[:, 1]
    n = xy.shape[0]
    out = np.zeros((n, 3, 3))
    out[:, 0, 0] = 1.0
    out[:, 1, 1] = 1.0
    out[:, 0, 2] = out[:, 2, 0] = 2.0 * x2
    out[:, 1, 2] = out[:, 2, 1] = -2.0 * x1
    out[:, 2, 2] = 4.0 * (x1 * x1 + x2 * x2)
    return out


def sqrt_p_batch(xy: np.ndarray) -> np.ndarray:
    """sqrt(P) at a batch of horizontal parts; xy is (n, 2), result (n, 3, 3)."""
    x1, x2 = xy[:, 0], xy[:, 1]
    rho2 = x1 * x1 + x2 * x2
    s = np.sqrt(1.0 + 4.0 * rho2)
    d = (1.0 + s) * s
    n = xy.shape[0]
    out = np.empty((n, 3, 3))
    out[:, 0, 0] = 1.0 - 4.0 * x2 * x2 / d
    out[:, 1, 1] = 1.0 - 4.0 * x1 * x1 / d
    out[:, 2, 2] = 4.0 * rho2 / s
    out[:, 0, 1] = out[:, 1, 0] = 4.0 * x1 * x2 / d
    out[:, 0, 2] = out[:, 2, 0] = 2.0 * x2 / s
    out[:, 1, 2] = out[:, 2, 1] = -2.0 * x1 / s
    return out
