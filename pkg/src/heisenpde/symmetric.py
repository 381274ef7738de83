"""Small symmetric matrices stored as upper triangles, plus eigenvalue kernels.

Symmetry is structural: Sym2/Sym3 hold only the independent entries, so no
runtime symmetry checks are ever needed.  Eigenvalues of 2x2 matrices use the
closed quadratic formula; larger ones (3x3 penalty matrices, 6x6 block gaps)
use a cyclic Jacobi sweep so the operator path does not depend on a library
eigensolver (numpy.linalg serves as the independent oracle in the tests).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Sym2:
    """2x2 symmetric matrix [[a11, a12], [a12, a22]]."""

    a11: float
    a12: float
    a22: float

    @staticmethod
    def from_matrix(m) -> "Sym2":
        m = np.asarray(m, dtype=float)
        return Sym2(m[0, 0], 0.5 * (m[0, 1] + m[1, 0]), m[1, 1])

    @staticmethod
    def zero() -> "Sym2":
        return Sym2(0.0, 0.0, 0.0)

    @staticmethod
    def identity() -> "Sym2":
        return Sym2(1.0, 0.0, 1.0)

    @staticmethod
    def diag(d1: float, d2: float) -> "Sym2":
        return Sym2(float(d1), 0.0, float(d2))

    @property
    def mat(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a12, self.a22]])

    def trace(self) -> float:
        return self.a11 + self.a22

    def eigenvalues(self) -> tuple[float, float]:
        """Ascending eigenvalues by the closed quadratic formula."""
        mean = 0.5 * (self.a11 + self.a22)
        r = np.hypot(0.5 * (self.a11 - self.a22), self.a12)
        return (mean - r, mean + r)

    def __add__(self, other: "Sym2") -> "Sym2":
        return Sym2(self.a11 + other.a11, self.a12 + other.a12, self.a22 + other.a22)

    def __sub__(self, other: "Sym2") -> "Sym2":
        return Sym2(self.a11 - other.a11, self.a12 - other.a12, self.a22 - other.a22)

    def __mul__(self, t: float) -> "Sym2":
        return Sym2(self.a11 * t, self.a12 * t, self.a22 * t)

    __rmul__ = __mul__

    def __neg__(self) -> "Sym2":
        return Sym2(-self.a11, -self.a12, -self.a22)


@dataclass(frozen=True)
class Sym3:
    """3x3 symmetric matrix, upper triangle (a11, a12, a13, a22, a23, a33)."""

    a11: float
    a12: float
    a13: float
    a22: float
    a23: float
    a33: float

    @staticmethod
    def from_matrix(m) -> "Sym3":
        m = np.asarray(m, dtype=float)
        return Sym3(
            m[0, 0],
            0.5 * (m[0, 1] + m[1, 0]),
            0.5 * (m[0, 2] + m[2, 0]),
            m[1, 1],
            0.5 * (m[1, 2] + m[2, 1]),
            m[2, 2],
        )

    @staticmethod
    def zero() -> "Sym3":
        return Sym3(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)

    @staticmethod
    def identity() -> "Sym3":
        return Sym3(1.0, 0.0, 0.0, 1.0, 0.0, 1.0)

    @staticmethod
    def diag(d1: float, d2: float, d3: float) -> "Sym3":
        return Sym3(float(d1), 0.0, 0.0, float(d2), 0.0, float(d3))

    @property
    def mat(self) -> np.ndarray:
        return np.array(
            [
                [self.a11, self.a12, self.a13],
                [self.a12, self.a22, self.a23],
                [self.a13, self.a23, self.a33],
            ]
        )

    def trace(self) -> float:
        return self.a11 + self.a22 + self.a33

    def eigenvalues(self) -> np.ndarray:
        return jacobi_eigenvalues(self.mat)

    def __add__(self, other: "Sym3") -> "Sym3":
        return Sym3(*(a + b for a, b in zip(self._tuple(), other._tuple())))

    def __sub__(self, other: "Sym3") -> "Sym3":
        return Sym3(*(a - b for a, b in zip(self._tuple(), other._tuple())))

    def __mul__(self, t: float) -> "Sym3":
        return Sym3(*(a * t for a in self._tuple()))

    __rmul__ = __mul__

    def __neg__(self) -> "Sym3":
        return Sym3(*(-a for a in self._tuple()))

    def _tuple(self):
        return (self.a11, self.a12, self.a13, self.a22, self.a23, self.a33)


@dataclass(frozen=True)
class Mat2x3:
    """Dense 2x3 matrix (the horizontal-frame coefficient matrix)."""

    rows: tuple[tuple[float, float, float], tuple[float, float, float]]

    @property
    def mat(self) -> np.ndarray:
        return np.array(self.rows)


def jacobi_eigenvalues(a: np.ndarray, tol: float = 1e-12, max_sweeps: int = 50) -> np.ndarray:
    """Ascending eigenvalues of a small symmetric matrix by cyclic Jacobi.

    Sweeps rotate away each off-diagonal entry in turn until the off-diagonal
    Frobenius mass falls below tol times the matrix scale.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    scale = np.max(np.abs(a))
    if scale == 0.0:
        return np.zeros(n)
    for _ in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += 2.0 * a[p, q] ** 2
        if np.sqrt(off) <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p, q] == 0.0:
                    continue
                # Rutishauser rotation: tan(2*theta) = 2*a_pq / (a_qq - a_pp)
                theta = 0.5 * (a[q, q] - a[p, p]) / a[p, q]
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                app, aqq, apq = a[p, p], a[q, q], a[p, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    if k != p and k != q:
                        akp, akq = a[k, p], a[k, q]
                        a[k, p] = a[p, k] = c * akp - s * akq
                        a[k, q] = a[q, k] = s * akp + c * akq
    return np.sort(np.diag(a))


def min_eigenvalue(a: np.ndarray) -> float:
    return float(jacobi_eigenvalues(a)[0])


def operator_norm(a: np.ndarray) -> float:
    """Largest absolute eigenvalue of a symmetric matrix."""
    evs = jacobi_eigenvalues(a)
    return float(max(abs(evs[0]), abs(evs[-1])))
