"""Doubling-of-variables laboratory: penalty Hessians, block inequalities,
trace-gap bounds, the sqrt(P) Lipschitz ratio, and the Holder certificate.

The penalty is always Euclidean: phi(x, y) = L|x-y|^alpha, whose Hessian in x
is M = L*alpha*|x-y|^(alpha-2)*((alpha-2) e (x) e + I) along the unit
difference e, with the closed-form square M^2 and N = M + (2/mu) M^2.  A pair
(A, B) is admissible for N when [[A,0],[0,-B]] <= [[N,-N],[-N,N]]; block_gap
measures the margin as the least eigenvalue of the difference.  trace_gap and
lifted_trace_gap instantiate the two trace bounds that drive the regularity
proof, and doubling_certificate maximizes psi(x, y) = u(x) - u(y) -
L|x-y|^alpha - delta*|x|^2 - eps over a tensor product sample of a box: a
nonpositive maximum for all delta, eps certifies the Holder bound at (L,
alpha) at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .calculus import lift
from .group import Point, sqrt_p
from .rng import SplitMix64
from .symmetric import Sym3, min_eigenvalue, operator_norm


@dataclass(frozen=True)
class PenaltyParams:
    """Penalty constants L > 0, alpha in (0, 2], delta, eps >= 0, mu > 0.

    alpha > 1 is admitted only so the matrix algebra can be exercised at the
    rank-one-free exponent alpha = 2; the certificate itself requires
    alpha <= 1.
    """

    L: float
    alpha: float
    delta: float = 0.0
    eps: float = 0.0
    mu: float = 1.0

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError("L must be positive")
        if not (0.0 < self.alpha <= 2.0):
            raise ValueError("alpha must lie in (0, 2]")
        if self.delta < 0 or self.eps < 0:
            raise ValueError("delta and eps must be nonnegative")
        if not self.mu > 0:
            raise ValueError("mu must be positive")


@dataclass(frozen=True)
class TraceGapReport:
    """One trace-gap instance: lhs <= rhs must hold for admissible pairs.

    rhs_stated is the factor-free display form ((x2-y2)^2 + (x1-y1)^2) * n33,
    kept for reference; the provable bound carries the factor 4 from the frame
    differences (0, 0, +-2*dx) and is what `holds` certifies.  rhs_penalty is
    the penalty-parameter form of the lifted bound when requested.
    """

    lhs: float
    rhs: float
    n33: float
    holds: bool
    rhs_stated: float | None = None
    rhs_penalty: float | None = None
    holds_penalty: bool | None = None


@dataclass(frozen=True)
class MaxReport:
    """Result of maximizing psi over the sample set."""

    theta: float
    argmax: tuple[Point, Point]
    gap: float
    certified: bool
    pairs_evaluated: int


def _difference(x: Point, y: Point) -> tuple[np.ndarray, float]:
    d = x.as_array() - y.as_array()
    return d, float(np.linalg.norm(d))


def penalty_value(x: Point, y: Point, pp: PenaltyParams) -> float:
    """L |x-y|^alpha (Euclidean; the psi assembly adds the delta/eps terms)."""
    _, dist = _difference(x, y)
    return pp.L * dist**pp.alpha


def penalty_hessian(x: Point, y: Point, pp: PenaltyParams) -> Sym3:
    """M = L*alpha*|x-y|^(alpha-2) * ((alpha-2) e(x)e + I); requires x != y."""
    d, dist = _difference(x, y)
    if dist == 0.0:
        raise ValueError("penalty Hessian is undefined at x == y")
    e = d / dist
    scale = pp.L * pp.alpha * dist ** (pp.alpha - 2.0)
    m = scale * ((pp.alpha - 2.0) * np.outer(e, e) + np.eye(3))
    return Sym3.from_matrix(m)


def penalty_hessian_sq(x: Point, y: Point, pp: PenaltyParams) -> Sym3:
    """M^2 in closed form: L^2 a^2 |x-y|^(2(a-2)) * (a(a-2) e(x)e + I)."""
    d, dist = _difference(x, y)
    if dist == 0.0:
        raise ValueError("penalty Hessian is undefined at x == y")
    e = d / dist
    a = pp.alpha
    scale = (pp.L * a) ** 2 * dist ** (2.0 * (a - 2.0))
    m = scale * (a * (a - 2.0) * np.outer(e, e) + np.eye(3))
    return Sym3.from_matrix(m)


def n_matrix(x: Point, y: Point, pp: PenaltyParams) -> Sym3:
    """N = M + (2/mu) M^2."""
    return penalty_hessian(x, y, pp) + (2.0 / pp.mu) * penalty_hessian_sq(x, y, pp)


def n_norm_bound(x: Point, y: Point, pp: PenaltyParams) -> float:
    """The operator-norm bound L a d^(a-2) + (2/mu) L^2 a^2 d^(2(a-2))."""
    _, dist = _difference(x, y)
    if dist == 0.0:
        raise ValueError("bound is undefined at x == y")
    a = pp.alpha
    return pp.L * a * dist ** (a - 2.0) + (2.0 / pp.mu) * (pp.L * a) ** 2 * dist ** (
        2.0 * (a - 2.0)
    )


def block_matrix(n: np.ndarray) -> np.ndarray:
    """[[N, -N], [-N, N]] as a 6x6 array."""
    return np.block([[n, -n], [-n, n]])


def block_gap(a: Sym3, b: Sym3, n: Sym3) -> float:
    """Least eigenvalue of [[N,-N],[-N,N]] - [[A,0],[0,-B]].

    Nonnegative (up to 1e-9 times the largest entry) iff the block inequality
    [[A,0],[0,-B]] <= [[N,-N],[-N,N]] holds.
    """
    gap = block_matrix(n.mat)
    gap[:3, :3] -= a.mat
    gap[3:, 3:] += b.mat
    return min_eigenvalue(gap)


def block_gap_holds(a: Sym3, b: Sym3, n: Sym3, tol: float = 1e-9) -> bool:
    gap = block_matrix(n.mat)
    gap[:3, :3] -= a.mat
    gap[3:, 3:] += b.mat
    scale = max(1.0, np.abs(gap).max())
    return min_eigenvalue(gap) >= -tol * scale


def make_admissible_pair(n: Sym3, seed: int = 0) -> tuple[Sym3, Sym3]:
    """Random (A, B) with [[A,0],[0,-B]] <= [[N,-N],[-N,N]], by construction.

    Writing the gap as [[U, -N], [-N, V]] with U = N - A and V = N + B, the
    Schur condition U > 0, V >= N U^-1 N guarantees positivity, so we sample
    U SPD and V = N U^-1 N + E with E PSD (E = 0 with probability ~1/3 to
    produce sharp pairs whose gap has a kernel).
    """
    a, b = _admissible_batch(np.asarray(n.mat)[None, :, :], SplitMix64(seed, "admissible-pair"))
    return Sym3.from_matrix(a[0]), Sym3.from_matrix(b[0])


def make_admissible_batch(ns: np.ndarray, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Batched make_admissible_pair; ns is (k, 3, 3), returns (k,3,3) pairs."""
    return _admissible_batch(ns, SplitMix64(seed, "admissible-batch"))


def _admissible_batch(ns: np.ndarray, g: SplitMix64) -> tuple[np.ndarray, np.ndarray]:
    k = ns.shape[0]
    u = g.spd(k, 3, 1e-2, 1e1)
    slack_a = g.spd(k, 3, 1e-3, 1e0)
    slack_b = g.spd(k, 3, 1e-3, 1e0)
    sharp_a = g.uniform(k) < 0.33
    sharp_b = g.uniform(k) < 0.33
    slack_a[sharp_a] = 0.0
    slack_b[sharp_b] = 0.0
    uinv = np.linalg.inv(u)
    uinv = 0.5 * (uinv + np.swapaxes(uinv, -1, -2))
    nun = np.einsum("kij,kjl,klm->kim", ns, uinv, ns)
    nun = 0.5 * (nun + np.swapaxes(nun, -1, -2))
    a = ns - u - slack_a
    b = nun + slack_b - ns
    return a, b


def trace_gap(a: Sym3, b: Sym3, n: Sym3, x: Point, y: Point) -> TraceGapReport:
    """Intrinsic trace-gap bound tr(lift(A,x)) - tr(lift(B,y)) <= rhs.

    rhs = 4*((x2-y2)^2 + (x1-y1)^2) * n33 with n33 = <N e3, e3>; the frame
    differences X(x)-X(y) = (0,0,2(x2-y2)) and Y(x)-Y(y) = (0,0,2(y1-x1))
    enter the scalar block consequence squared, which is where the factor 4
    comes from.  Requires an admissible (A, B, N).
    """
    if not block_gap_holds(a, b, n):
        raise ValueError("block inequality precondition fails")
    lhs = lift(a, x).trace() - lift(b, y).trace()
    n33 = n.a33
    s = (x.x2 - y.x2) ** 2 + (x.x1 - y.x1) ** 2
    rhs = 4.0 * s * n33
    scale = max(1.0, abs(lhs), abs(rhs))
    return TraceGapReport(
        lhs=lhs,
        rhs=rhs,
        n33=n33,
        holds=lhs <= rhs + 1e-9 * scale,
        rhs_stated=s * n33,
    )


def sqrtp_ratio(x: Point, y: Point) -> float:
    """Frobenius ratio |sqrt(P)(x) - sqrt(P)(y)| / |x'-y'|; needs x' != y'.

    sqrt(P) depends only on the horizontal part, so the difference vanishes
    identically when x' = y' and the ratio is undefined there.
    """
    dxy = np.hypot(x.x1 - y.x1, x.x2 - y.x2)
    if dxy == 0.0:
        raise ValueError("ratio undefined for x' == y' (the difference is exactly 0)")
    diff = sqrt_p(x).mat - sqrt_p(y).mat
    return float(np.linalg.norm(diff) / dxy)


def lifted_trace_gap(
    a: Sym3,
    b: Sym3,
    n: Sym3,
    x: Point,
    y: Point,
    pp: PenaltyParams | None = None,
    c2: float | None = None,
) -> TraceGapReport:
    """Lifted trace-gap bound tr(P(x)A - P(y)B) <= 3 |N| |sqrt(P)x - sqrt(P)y|^2.

    |N| is the operator norm, the sqrt(P) difference is Frobenius (m = 3).
    When pp and an empirical Lipschitz constant c2 are supplied, the report
    also carries the penalty form rhs' = 3 c2^2 (L a d^a + (2/mu) L^2 a^2
    d^(2a-2)), which bounds lhs whenever N = n_matrix(x, y, pp).
    """
    if not block_gap_holds(a, b, n):
        raise ValueError("block inequality precondition fails")
    from .group import p_matrix  # local import keeps module deps one-way

    lhs = float(np.trace(p_matrix(x).mat @ a.mat) - np.trace(p_matrix(y).mat @ b.mat))
    diff = sqrt_p(x).mat - sqrt_p(y).mat
    n_norm = operator_norm(n.mat)
    rhs = 3.0 * n_norm * float(np.sum(diff * diff))
    scale = max(1.0, abs(lhs), abs(rhs))
    rhs_penalty = None
    holds_penalty = None
    if pp is not None and c2 is not None:
        _, dist = _difference(x, y)
        if dist == 0.0:
            raise ValueError("penalty form undefined at x == y")
        aexp = pp.alpha
        rhs_penalty = (
            3.0
            * c2**2
            * (
                pp.L * aexp * dist**aexp
                + (2.0 / pp.mu) * (pp.L * aexp) ** 2 * dist ** (2.0 * aexp - 2.0)
            )
        )
        holds_penalty = lhs <= rhs_penalty + 1e-9 * max(1.0, abs(lhs), abs(rhs_penalty))
    return TraceGapReport(
        lhs=lhs,
        rhs=rhs,
        n33=n.a33,
        holds=lhs <= rhs + 1e-9 * scale,
        rhs_penalty=rhs_penalty,
        holds_penalty=holds_penalty,
    )


def psd_sandwich_check(p: Sym3, s1: Sym3, s2: Sym3, tol: float = 1e-9) -> bool:
    """True iff P S1 P <= P S2 P; requires P >= 0 and S1 <= S2."""
    pm = p.mat
    gap = s2.mat - s1.mat
    if min_eigenvalue(pm) < -tol * max(1.0, np.abs(pm).max()):
        raise ValueError("P must be positive semidefinite")
    if min_eigenvalue(gap) < -tol * max(1.0, np.abs(gap).max()):
        raise ValueError("need S1 <= S2")
    d = pm @ gap @ pm
    d = 0.5 * (d + d.T)
    return min_eigenvalue(d) >= -tol * max(1.0, np.abs(d).max())


def vertical_obstruction_check(
    x3: float,
    y3: float,
    samples: int = 10_000,
    seed: int = 0,
    x_prime: tuple[float, float] = (0.0, 0.0),
    y_prime: tuple[float, float] = (0.0, 0.0),
) -> bool:
    """On the vertical axis, sqrt(P) annihilates e3, so no xi1, xi2 make
    sqrt(P)(x) xi1 - sqrt(P)(y) xi2 equal (0, 0, +-1); returns True.

    Only the remark's hypothesis x' = y' = 0 (and x3 != y3) is accepted.
    """
    if any(x_prime) or any(y_prime):
        raise ValueError("check applies on the vertical axis only (x' = y' = 0)")
    if x3 == y3:
        raise ValueError("need x3 != y3")
    rx = sqrt_p(Point(0.0, 0.0, float(x3))).mat
    ry = sqrt_p(Point(0.0, 0.0, float(y3))).mat
    g = SplitMix64(seed, "vertical-obstruction")
    xi1 = g.normal((samples, 3))
    xi2 = g.normal((samples, 3))
    third = xi1 @ rx[2] - xi2 @ ry[2]
    if np.any(third != 0.0):
        return False
    return True


def _tensor_points(lower: np.ndarray, upper: np.ndarray, per_axis: int) -> np.ndarray:
    axes = [np.linspace(lower[i], upper[i], per_axis) for i in range(3)]
    grid = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grid], axis=1)


def _psi_max(
    u,
    pts_x: np.ndarray,
    pts_y: np.ndarray,
    pp: PenaltyParams,
    chunk: int = 256,
) -> tuple[float, int, int]:
    """Max of psi over the pair product, returning (theta, ix, iy)."""
    ux = np.asarray(u.value_batch(pts_x), dtype=float)
    uy = np.asarray(u.value_batch(pts_y), dtype=float)
    if not (np.all(np.isfinite(ux)) and np.all(np.isfinite(uy))):
        raise ValueError("field evaluation produced non-finite values")
    x_sq = np.sum(pts_x**2, axis=1)
    best = -np.inf
    best_ix = best_iy = 0
    for start in range(0, pts_x.shape[0], chunk):
        stop = min(start + chunk, pts_x.shape[0])
        d = pts_x[start:stop, None, :] - pts_y[None, :, :]
        dist = np.sqrt(np.sum(d * d, axis=2))
        psi = (
            ux[start:stop, None]
            - uy[None, :]
            - pp.L * dist**pp.alpha
            - pp.delta * x_sq[start:stop, None]
            - pp.eps
        )
        k = int(np.argmax(psi))
        val = float(psi.flat[k])
        if val > best:
            best = val
            best_ix = start + k // psi.shape[1]
            best_iy = k % psi.shape[1]
    return best, best_ix, best_iy


def doubling_certificate(
    u,
    pp: PenaltyParams,
    domain: tuple[np.ndarray, np.ndarray],
    per_axis: int = 17,
) -> MaxReport:
    """Maximize psi(x,y) = u(x) - u(y) - L|x-y|^alpha - delta|x|^2 - eps over
    a tensor product sample of the box, refining once (factor 4) around the
    incumbent; theta <= 0 certifies the Holder bound at desk scale.

    u is any object with a value_batch((n,3)) method (ScalarField or a grid
    function).  The sample is deterministic, so the report is reproducible.
    """
    if pp.alpha > 1.0:
        raise ValueError("the certificate requires alpha <= 1")
    lower = np.asarray(domain[0], dtype=float)
    upper = np.asarray(domain[1], dtype=float)
    if lower.shape != (3,) or upper.shape != (3,) or np.any(upper <= lower):
        raise ValueError("domain must be a nondegenerate box (lower, upper)")
    pts = _tensor_points(lower, upper, per_axis)
    theta, ix, iy = _psi_max(u, pts, pts, pp)
    total = pts.shape[0] ** 2

    # one refinement pass: boxes of 1/4 the width around each incumbent point
    width = (upper - lower) / 4.0
    best_pair = (pts[ix], pts[iy])
    centers_x = np.clip(pts[ix], lower + width / 2, upper - width / 2)
    centers_y = np.clip(pts[iy], lower + width / 2, upper - width / 2)
    fine_x = _tensor_points(centers_x - width / 2, centers_x + width / 2, per_axis)
    fine_y = _tensor_points(centers_y - width / 2, centers_y + width / 2, per_axis)
    theta_f, jx, jy = _psi_max(u, fine_x, fine_y, pp)
    total += fine_x.shape[0] * fine_y.shape[0]
    if theta_f > theta:
        theta = theta_f
        best_pair = (fine_x[jx], fine_y[jy])

    x_hat = Point(*best_pair[0])
    y_hat = Point(*best_pair[1])
    return MaxReport(
        theta=theta,
        argmax=(x_hat, y_hat),
        gap=float(np.linalg.norm(best_pair[0] - best_pair[1])),
        certified=theta <= 0.0,
        pairs_evaluated=total,
    )
