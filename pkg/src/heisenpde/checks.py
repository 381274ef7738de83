"""Seeded verification suite: one named check per matrix lemma or operator
property, each returning {lemma_id, trials, worst_gap, pass, ...}.

Every check draws its randomness from a named SplitMix64 substream of the
run seed, so reports are reproducible byte for byte, and each check carries
its own independent oracle (finite differences in extended precision,
brute-force extremization, batched numpy eigensolves against the hand-rolled
operator path, closed-form cross-checks).
"""

from __future__ import annotations

import numpy as np

from .calculus import full_hessian, h_hessian, lift_batch
from .doubling import (
    PenaltyParams,
    block_matrix,
    make_admissible_batch,
    n_norm_bound,
    penalty_hessian,
    penalty_hessian_sq,
    vertical_obstruction_check,
)
from .fields import PolynomialField
from .group import Point, p_matrix_batch, sqrt_p_batch
from .operators import EllipticityBracket, OperatorSpec, pucci_minus, pucci_plus, validate_operator
from .rng import SplitMix64
from .symmetric import Sym2


def _report(lemma_id: str, trials: int, worst: float, passed: bool, **extra) -> dict:
    out = {"lemma_id": lemma_id, "trials": int(trials), "worst_gap": float(worst), "pass": bool(passed)}
    out.update(extra)
    return out


def _random_polynomial(g: SplitMix64, degree: int = 6, n_terms: int = 8) -> PolynomialField:
    from fractions import Fraction

    terms: dict[tuple[int, int, int], Fraction] = {}
    coeffs = g.uniform(n_terms, -1.0, 1.0)
    for k in range(n_terms):
        a = int(g.integers(1, 0, degree + 1)[0])
        b = int(g.integers(1, 0, degree + 1 - a)[0])
        d = int(g.integers(1, 0, max(1, (degree - a - b) // 2 + 1))[0])
        key = (a, b, d)
        terms[key] = terms.get(key, Fraction(0)) + Fraction(float(coeffs[k]))
    return PolynomialField(terms)


def check_group_algebra(seed: int = 0, trials: int = 2000) -> dict:
    """Associativity, inverses, and the dilation semigroup law."""
    g = SplitMix64(seed, "group-algebra")
    pts = g.uniform(9 * trials, -100.0, 100.0).reshape(trials, 3, 3)
    lams = g.uniform(2 * trials, 0.1, 10.0).reshape(trials, 2)
    worst = 0.0
    for k in range(trials):
        a, b, c = pts[k]
        ab = np.array([a[0] + b[0], a[1] + b[1], a[2] + b[2] + 2 * (b[0] * a[1] - b[1] * a[0])])
        bc = np.array([b[0] + c[0], b[1] + c[1], b[2] + c[2] + 2 * (c[0] * b[1] - c[1] * b[0])])
        lhs = np.array(
            [ab[0] + c[0], ab[1] + c[1], ab[2] + c[2] + 2 * (c[0] * ab[1] - c[1] * ab[0])]
        )
        rhs = np.array(
            [a[0] + bc[0], a[1] + bc[1], a[2] + bc[2] + 2 * (bc[0] * a[1] - bc[1] * a[0])]
        )
        scale = max(1.0, np.abs(pts[k]).max() ** 2)
        worst = max(worst, np.abs(lhs - rhs).max() / scale)
        inv = np.array([a[0] - a[0], a[1] - a[1], a[2] - a[2] + 2 * (-a[0] * a[1] + a[1] * a[0])])
        worst = max(worst, np.abs(inv).max() / scale)
        l1, l2 = lams[k]
        d1 = np.array([l1 * l2 * a[0], l1 * l2 * a[1], (l1 * l2) ** 2 * a[2]])
        d2 = np.array([l1 * (l2 * a[0]), l1 * (l2 * a[1]), l1 * l1 * (l2 * l2 * a[2])])
        worst = max(worst, np.abs(d1 - d2).max() / scale)
    return _report("group.algebra", trials, worst, worst <= 1e-12)


def check_sqrtp_squares(seed: int = 0, trials: int = 10_000) -> dict:
    """(sqrt P)^2 = P within 1e-10 relative on points in [-1e3, 1e3]^3."""
    g = SplitMix64(seed, "sqrtp-squares")
    xy = g.uniform(2 * trials, -1000.0, 1000.0).reshape(trials, 2)
    r = sqrt_p_batch(xy)
    p = p_matrix_batch(xy)
    err = np.einsum("nij,njk->nik", r, r) - p
    scale = np.maximum(1.0, np.abs(p).max(axis=(1, 2)))
    worst = float((np.abs(err).max(axis=(1, 2)) / scale).max())
    # PSD of the root itself
    evs = np.linalg.eigvalsh(r)
    psd_gap = float((evs[:, 0] / np.maximum(1.0, evs[:, -1])).min())
    passed = worst <= 1e-10 and psd_gap >= -1e-10
    return _report("group.sqrtp_square", trials, worst, passed, min_eig_rel=psd_gap)


def check_p_kernel(seed: int = 0, trials: int = 10_000) -> dict:
    """P(x) annihilates (-2 x2, 2 x1, 1) exactly (fixed association)."""
    g = SplitMix64(seed, "p-kernel")
    xy = g.uniform(2 * trials, -1000.0, 1000.0).reshape(trials, 2)
    p = p_matrix_batch(xy)
    v = np.stack([-2.0 * xy[:, 1], 2.0 * xy[:, 0], np.ones(trials)], axis=1)
    rows = [
        (p[:, i, 0] * v[:, 0] + p[:, i, 1] * v[:, 1]) + p[:, i, 2] * v[:, 2] for i in range(3)
    ]
    worst = float(max(np.abs(r).max() for r in rows))
    return _report("group.p_kernel", trials, worst, worst == 0.0)


def check_sigma_factorization(seed: int = 0, trials: int = 5000) -> dict:
    """P = sigma^T sigma entrywise (fixed association)."""
    g = SplitMix64(seed, "sigma-fact")
    xy = g.uniform(2 * trials, -100.0, 100.0).reshape(trials, 2)
    p = p_matrix_batch(xy)
    s = np.zeros((trials, 2, 3))
    s[:, 0, 0] = 1.0
    s[:, 0, 2] = 2.0 * xy[:, 1]
    s[:, 1, 1] = 1.0
    s[:, 1, 2] = -2.0 * xy[:, 0]
    worst = 0.0
    for i in range(3):
        for j in range(3):
            sts = s[:, 0, i] * s[:, 0, j] + s[:, 1, i] * s[:, 1, j]
            worst = max(worst, float(np.abs(p[:, i, j] - sts).max()))
    return _report("group.sigma_factorization", trials, worst, worst == 0.0)


def check_commutator(seed: int = 0, trials: int = 100) -> dict:
    """[X, Y]u = -4 du/dx3 exactly for random polynomials (rational path)."""
    g = SplitMix64(seed, "commutator")
    failures = 0
    for _ in range(trials):
        u = _random_polynomial(g, degree=6)
        lhs = u.apply_y().apply_x() - u.apply_x().apply_y()
        if lhs != u.partial_field(2) * -4:
            failures += 1
    return _report("calculus.commutator", trials, float(failures), failures == 0)


def check_quadratic_form(seed: int = 0, trials: int = 1000) -> dict:
    """<D^2u (aX+bY), (aX+bY)> = <D^{2,*}u (a,b), (a,b)> to 1e-12 relative."""
    g = SplitMix64(seed, "quadratic-form")
    worst = 0.0
    for _ in range(trials):
        u = _random_polynomial(g, degree=6)
        p = Point(*g.uniform(3, -2.0, 2.0))
        a, b = g.uniform(2, -2.0, 2.0)
        x = np.array([1.0, 0.0, 2.0 * p.x2])
        y = np.array([0.0, 1.0, -2.0 * p.x1])
        v = a * x + b * y
        d2 = full_hessian(u, p).mat
        lhs = float(v @ d2 @ v)
        h = h_hessian(u, p).mat
        rhs = float(np.array([a, b]) @ h @ np.array([a, b]))
        scale = max(1.0, abs(lhs), abs(rhs), np.abs(d2).max() * float(v @ v))
        worst = max(worst, abs(lhs - rhs) / scale)
    return _report("calculus.quadratic_form", trials, worst, worst <= 1e-12)


def check_trace_identity(seed: int = 0, trials: int = 200) -> dict:
    """tr(lift D^2u) = tr(P D^2u) = X^2u + Y^2u."""
    g = SplitMix64(seed, "trace-identity")
    worst = 0.0
    for _ in range(trials):
        u = _random_polynomial(g, degree=5)
        p = Point(*g.uniform(3, -2.0, 2.0))
        s1 = h_hessian(u, p).trace()
        d2 = full_hessian(u, p).mat
        x = np.array([1.0, 0.0, 2.0 * p.x2])
        y = np.array([0.0, 1.0, -2.0 * p.x1])
        s2 = float(x @ d2 @ x + y @ d2 @ y)
        pm = p_matrix_batch(np.array([[p.x1, p.x2]]))[0]
        s3 = float(np.trace(pm @ d2))
        scale = max(1.0, abs(s1))
        worst = max(worst, abs(s1 - s2) / scale, abs(s1 - s3) / scale)
    return _report("calculus.trace_identity", trials, worst, worst <= 1e-12)


def check_dilation(seed: int = 0, trials: int = 100) -> dict:
    """X(u o dil) = lam (Xu) o dil and the lam^2 sub-Laplacian scaling, exact."""
    from fractions import Fraction

    g = SplitMix64(seed, "dilation")
    failures = 0
    for _ in range(trials):
        u = _random_polynomial(g, degree=5)
        lam = float(g.uniform(1, 0.25, 4.0)[0])
        if u.dilate(lam).apply_x() != u.apply_x().dilate(lam) * lam:
            failures += 1
        if u.dilate(lam).apply_y() != u.apply_y().dilate(lam) * lam:
            failures += 1
        sub = lambda w: w.apply_x().apply_x() + w.apply_y().apply_y()
        # lam^2 must be the exact rational square, not the rounded float
        if sub(u.dilate(lam)) != sub(u).dilate(lam) * (Fraction(lam) ** 2):
            failures += 1
    return _report("calculus.dilation", trials, float(failures), failures == 0)


def pucci_bruteforce(h: np.ndarray, lam: float, Lam: float, n: int, seed: int, plus: bool) -> float:
    """Extremize trace(a h) over n sampled admissible a (random rotations,
    sign-optimal eigenvalue corners)."""
    g = SplitMix64(seed, "pucci-bruteforce")
    t = g.uniform(n, 0.0, np.pi)
    c, s = np.cos(t), np.sin(t)
    q1 = c * c * h[0, 0] + 2 * c * s * h[0, 1] + s * s * h[1, 1]
    q2 = s * s * h[0, 0] - 2 * c * s * h[0, 1] + c * c * h[1, 1]
    if plus:
        return float((np.where(q1 > 0, Lam, lam) * q1 + np.where(q2 > 0, Lam, lam) * q2).max())
    return float((np.where(q1 > 0, lam, Lam) * q1 + np.where(q2 > 0, lam, Lam) * q2).min())


def check_pucci_bruteforce(seed: int = 0, trials: int = 100, samples: int = 100_000) -> dict:
    """Eigenvalue formula vs brute-force extremization within 1e-6."""
    g = SplitMix64(seed, "pucci-check")
    b = EllipticityBracket(1.0, 2.0)
    mats = g.symmetric(trials, 2, scale=1.5)
    worst = 0.0
    for k in range(trials):
        h = Sym2.from_matrix(mats[k])
        worst = max(
            worst,
            abs(pucci_plus(h, b) - pucci_bruteforce(h.mat, 1.0, 2.0, samples, seed + k, True)),
            abs(pucci_minus(h, b) - pucci_bruteforce(h.mat, 1.0, 2.0, samples, seed + k, False)),
        )
    return _report("operators.pucci_bruteforce", trials, worst, worst <= 1e-6)


def check_pucci_duality(seed: int = 0, trials: int = 2000) -> dict:
    """pucci_minus(H) = -pucci_plus(-H), bitwise."""
    g = SplitMix64(seed, "pucci-duality")
    b = EllipticityBracket(0.5, 2.5)
    mats = g.symmetric(trials, 2, scale=2.0)
    worst = 0.0
    for m in mats:
        h = Sym2.from_matrix(m)
        worst = max(worst, abs(pucci_minus(h, b) - (-pucci_plus(-h, b))))
    return _report("operators.pucci_duality", trials, worst, worst == 0.0)


def check_operator_brackets(seed: int = 0, trials: int = 1000) -> dict:
    """Degenerate-ellipticity bracket for every shipped kind."""
    specs = [
        OperatorSpec.sublaplacian(),
        OperatorSpec("pucci_plus", EllipticityBracket(1.0, 2.0)),
        OperatorSpec("pucci_minus", EllipticityBracket(0.5, 1.5)),
        OperatorSpec("trace_linear", EllipticityBracket(1.0, 2.0), coeff=Sym2(1.5, 0.2, 1.2)),
        OperatorSpec("pucci_plus", EllipticityBracket(1.0, 2.0), form="lifted"),
    ]
    worst = 0.0
    violations = 0
    for spec in specs:
        rep = validate_operator(spec, samples=trials, seed=seed)
        worst = max(worst, rep["worst_gap"])
        violations += rep["violations"]
    return _report("operators.bracket", trials * len(specs), worst, violations == 0)


def _random_penalty(g: SplitMix64, n: int):
    alphas = np.concatenate(
        [np.tile([0.3, 0.5, 0.9, 1.0], n // 8 + 1)[: n // 2], g.uniform(n - n // 2, 0.2, 1.0)]
    )
    ls = g.uniform(n, 0.5, 3.0)
    mus = g.log_uniform(n, 0.1, 10.0)
    x = g.uniform(3 * n, -2.0, 2.0).reshape(n, 3)
    d = g.unit_vectors(n)
    dist = g.uniform(n, 0.1, 2.0)
    y = x + dist[:, None] * d
    return alphas, ls, mus, x, y


def _penalty_m_batch(x, y, ls, alphas) -> np.ndarray:
    d = x - y
    dist = np.linalg.norm(d, axis=1)
    e = d / dist[:, None]
    scale = ls * alphas * dist ** (alphas - 2.0)
    ee = np.einsum("ni,nj->nij", e, e)
    return scale[:, None, None] * ((alphas - 2.0)[:, None, None] * ee + np.eye(3))


def _penalty_msq_batch(x, y, ls, alphas) -> np.ndarray:
    d = x - y
    dist = np.linalg.norm(d, axis=1)
    e = d / dist[:, None]
    scale = (ls * alphas) ** 2 * dist ** (2.0 * (alphas - 2.0))
    ee = np.einsum("ni,nj->nij", e, e)
    return scale[:, None, None] * ((alphas * (alphas - 2.0))[:, None, None] * ee + np.eye(3))


def check_penalty_fd(seed: int = 0, trials: int = 10_000) -> dict:
    """Closed-form M vs an extended-precision centered-difference Hessian."""
    g = SplitMix64(seed, "penalty-fd")
    alphas, ls, mus, x, y = _random_penalty(g, trials)
    m = _penalty_m_batch(x, y, ls, alphas)
    xl = x.astype(np.longdouble)
    yl = y.astype(np.longdouble)
    al = alphas.astype(np.longdouble)
    ll = ls.astype(np.longdouble)
    h = np.longdouble(1e-5)

    def phi(z):
        return ll * np.sqrt(np.sum((z - yl) ** 2, axis=1)) ** al

    fd = np.empty((trials, 3, 3), dtype=np.longdouble)
    eye = np.eye(3, dtype=np.longdouble)
    base = phi(xl)
    for i in range(3):
        ei = h * eye[i]
        fd[:, i, i] = (phi(xl + ei) - 2 * base + phi(xl - ei)) / (h * h)
        for j in range(i + 1, 3):
            ej = h * eye[j]
            fd[:, i, j] = fd[:, j, i] = (
                phi(xl + ei + ej) - phi(xl + ei - ej) - phi(xl - ei + ej) + phi(xl - ei - ej)
            ) / (4 * h * h)
    scale = np.maximum(1e-300, np.abs(m).max(axis=(1, 2)))
    worst = float((np.abs(m - fd.astype(np.float64)).max(axis=(1, 2)) / scale).max())
    return _report("sums.penalty_fd", trials, worst, worst <= 1e-6)


def check_penalty_square(seed: int = 0, trials: int = 10_000) -> dict:
    """Closed-form M^2 equals M @ M entrywise to 1e-10."""
    g = SplitMix64(seed, "penalty-square")
    alphas, ls, mus, x, y = _random_penalty(g, trials)
    alphas = np.concatenate([alphas[: trials // 2], g.uniform(trials - trials // 2, 0.2, 2.0)])
    m = _penalty_m_batch(x, y, ls, alphas)
    msq = _penalty_msq_batch(x, y, ls, alphas)
    prod = np.einsum("nij,njk->nik", m, m)
    scale = np.maximum(1.0, np.abs(msq).max(axis=(1, 2)))
    worst = float((np.abs(msq - prod).max(axis=(1, 2)) / scale).max())
    return _report("sums.penalty_square", trials, worst, worst <= 1e-10)


def check_block_square_factor(seed: int = 0, trials: int = 10_000) -> dict:
    """[[M,-M],[-M,M]]^2 = 2 [[M^2,-M^2],[-M^2,M^2]] entrywise to 1e-10."""
    g = SplitMix64(seed, "block-square")
    alphas, ls, mus, x, y = _random_penalty(g, trials)
    m = _penalty_m_batch(x, y, ls, alphas)
    msq = _penalty_msq_batch(x, y, ls, alphas)
    big = np.empty((trials, 6, 6))
    big[:, :3, :3] = big[:, 3:, 3:] = m
    big[:, :3, 3:] = big[:, 3:, :3] = -m
    bigsq = np.empty((trials, 6, 6))
    bigsq[:, :3, :3] = bigsq[:, 3:, 3:] = msq
    bigsq[:, :3, 3:] = bigsq[:, 3:, :3] = -msq
    prod = np.einsum("nij,njk->nik", big, big)
    scale = np.maximum(1.0, np.abs(bigsq).max(axis=(1, 2)))
    worst = float((np.abs(prod - 2.0 * bigsq).max(axis=(1, 2)) / scale).max())
    return _report("sums.block_square_factor", trials, worst, worst <= 1e-10)


def check_n_bound(seed: int = 0, trials: int = 10_000) -> dict:
    """|N| <= L a d^(a-2) + (2/mu) L^2 a^2 d^(2(a-2)), equality or better."""
    g = SplitMix64(seed, "n-bound")
    alphas, ls, mus, x, y = _random_penalty(g, trials)
    m = _penalty_m_batch(x, y, ls, alphas)
    msq = _penalty_msq_batch(x, y, ls, alphas)
    n = m + (2.0 / mus)[:, None, None] * msq
    evs = np.linalg.eigvalsh(n)
    norms = np.maximum(np.abs(evs[:, 0]), np.abs(evs[:, -1]))
    dist = np.linalg.norm(x - y, axis=1)
    bound = ls * alphas * dist ** (alphas - 2.0) + (2.0 / mus) * (ls * alphas) ** 2 * dist ** (
        2.0 * (alphas - 2.0)
    )
    rel = (norms - bound) / np.maximum(1.0, bound)
    worst = float(rel.max())
    return _report("sums.n_bound", trials, worst, worst <= 1e-12)


def _admissible_suite(g: SplitMix64, trials: int):
    alphas, ls, mus, x, y = _random_penalty(g, trials)
    m = _penalty_m_batch(x, y, ls, alphas)
    msq = _penalty_msq_batch(x, y, ls, alphas)
    ns = m + (2.0 / mus)[:, None, None] * msq
    a, b = make_admissible_batch(ns, seed=int(g.seed) & 0x7FFFFFFF)
    return alphas, ls, mus, x, y, ns, a, b


def check_admissible_block(seed: int = 0, trials: int = 10_000) -> dict:
    """Generated pairs satisfy the 6x6 block inequality (min eig >= -1e-10)."""
    g = SplitMix64(seed, "admissible-block")
    _, _, _, _, _, ns, a, b = _admissible_suite(g, trials)
    w = np.empty((trials, 6, 6))
    w[:, :3, :3] = ns - a
    w[:, :3, 3:] = w[:, 3:, :3] = -ns
    w[:, 3:, 3:] = ns + b
    evs = np.linalg.eigvalsh(w)
    scale = np.maximum(1.0, np.abs(w).max(axis=(1, 2)))
    worst = float(-(evs[:, 0] / scale).min())
    return _report("sums.admissible_block", trials, worst, worst <= 1e-10)


def check_block_scalar(seed: int = 0, trials: int = 10_000, vectors: int = 4) -> dict:
    """<A xi, xi> - <B eta, eta> <= <N(xi-eta), xi-eta> on random vectors."""
    g = SplitMix64(seed, "block-scalar")
    _, _, _, _, _, ns, a, b = _admissible_suite(g, trials)
    worst = 0.0
    for _ in range(vectors):
        xi = g.normal((trials, 3))
        eta = g.normal((trials, 3))
        lhs = np.einsum("ni,nij,nj->n", xi, a, xi) - np.einsum("ni,nij,nj->n", eta, b, eta)
        d = xi - eta
        rhs = np.einsum("ni,nij,nj->n", d, ns, d)
        scale = np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
        worst = max(worst, float(((lhs - rhs) / scale).max()))
    return _report("sums.block_scalar", trials * vectors, worst, worst <= 1e-9)


def check_trace_gap(seed: int = 0, trials: int = 10_000) -> dict:
    """tr(lift(A,x)) - tr(lift(B,y)) <= 4 ((x2-y2)^2 + (x1-y1)^2) n33."""
    g = SplitMix64(seed, "trace-gap")
    _, _, _, x, y, ns, a, b = _admissible_suite(g, trials)
    la = lift_batch(a, x[:, :2])
    lb = lift_batch(b, y[:, :2])
    lhs = la[:, 0, 0] + la[:, 1, 1] - lb[:, 0, 0] - lb[:, 1, 1]
    s = (x[:, 1] - y[:, 1]) ** 2 + (x[:, 0] - y[:, 0]) ** 2
    rhs = 4.0 * s * ns[:, 2, 2]
    scale = np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
    worst = float(((lhs - rhs) / scale).max())
    return _report("sums.trace_gap", trials, worst, worst <= 1e-9)


def check_lifted_trace_gap(seed: int = 0, trials: int = 10_000) -> dict:
    """tr(P(x)A - P(y)B) <= 3 |N| |sqrtP(x)-sqrtP(y)|_F^2, and the penalty
    form with the empirical C2 measured on the suite's own samples."""
    g = SplitMix64(seed, "lifted-trace-gap")
    alphas, ls, mus, x, y, ns, a, b = _admissible_suite(g, trials)
    px = p_matrix_batch(x[:, :2])
    py = p_matrix_batch(y[:, :2])
    lhs = np.einsum("nij,nji->n", px, a) - np.einsum("nij,nji->n", py, b)
    diff = sqrt_p_batch(x[:, :2]) - sqrt_p_batch(y[:, :2])
    fro2 = np.einsum("nij,nij->n", diff, diff)
    evs = np.linalg.eigvalsh(ns)
    nnorm = np.maximum(np.abs(evs[:, 0]), np.abs(evs[:, -1]))
    rhs = 3.0 * nnorm * fro2
    scale = np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
    worst = float(((lhs - rhs) / scale).max())

    dxy = np.hypot(x[:, 0] - y[:, 0], x[:, 1] - y[:, 1])
    ok = dxy > 1e-9
    c2 = float((np.sqrt(fro2[ok]) / dxy[ok]).max())
    dist = np.linalg.norm(x - y, axis=1)
    rhs_pen = 3.0 * c2**2 * (
        ls * alphas * dist**alphas
        + (2.0 / mus) * (ls * alphas) ** 2 * dist ** (2.0 * alphas - 2.0)
    )
    scale_pen = np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs_pen)))
    worst_pen = float(((lhs - rhs_pen) / scale_pen).max())
    passed = worst <= 1e-9 and worst_pen <= 1e-9
    return _report(
        "sums.lifted_trace_gap", trials, max(worst, worst_pen), passed, c2=c2, worst_gap_penalty=worst_pen
    )


def check_psd_sandwich(seed: int = 0, trials: int = 10_000) -> dict:
    """P S1 P <= P S2 P whenever S1 <= S2 and P >= 0."""
    g = SplitMix64(seed, "psd-sandwich")
    p = g.spd(trials, 3, 1e-2, 1e2)
    gap = g.spd(trials, 3, 1e-3, 1e1)
    d = np.einsum("nij,njk,nkl->nil", p, gap, p)
    d = 0.5 * (d + np.swapaxes(d, -1, -2))
    evs = np.linalg.eigvalsh(d)
    scale = np.maximum(1.0, np.abs(d).max(axis=(1, 2)))
    worst = float(-(evs[:, 0] / scale).min())
    return _report("sums.psd_sandwich", trials, worst, worst <= 1e-9)


def check_sqrtp_lipschitz(seed: int = 0, trials: int = 100_000) -> dict:
    """|sqrtP(x) - sqrtP(y)|_F / |x'-y'| bounded over the far-field regime
    (0.1 < |x-y| < 10, |x'| up to 1e3); reports the empirical C2."""
    g = SplitMix64(seed, "sqrtp-lipschitz")
    xy = g.uniform(2 * trials, -1000.0, 1000.0).reshape(trials, 2)
    d = g.unit_vectors(trials, 2)
    dist = g.uniform(trials, 0.1, 10.0)
    xy2 = xy + dist[:, None] * d
    diff = sqrt_p_batch(xy) - sqrt_p_batch(xy2)
    ratio = np.sqrt(np.einsum("nij,nij->n", diff, diff)) / np.hypot(
        xy[:, 0] - xy2[:, 0], xy[:, 1] - xy2[:, 1]
    )
    c2 = float(ratio.max())
    return _report("sums.sqrtp_lipschitz", trials, c2, np.isfinite(c2) and c2 <= 8.0, c2=c2)


def check_vertical_obstruction(seed: int = 0, trials: int = 10_000) -> dict:
    ok = vertical_obstruction_check(1.0, -1.0, samples=trials, seed=seed)
    ok2 = vertical_obstruction_check(0.25, 3.0, samples=trials, seed=seed + 1)
    return _report("sums.vertical_obstruction", 2 * trials, 0.0 if (ok and ok2) else 1.0, ok and ok2)


ALL_CHECKS = [
    ("group.algebra", check_group_algebra),
    ("group.sqrtp_square", check_sqrtp_squares),
    ("group.p_kernel", check_p_kernel),
    ("group.sigma_factorization", check_sigma_factorization),
    ("calculus.commutator", check_commutator),
    ("calculus.quadratic_form", check_quadratic_form),
    ("calculus.trace_identity", check_trace_identity),
    ("calculus.dilation", check_dilation),
    ("operators.pucci_bruteforce", check_pucci_bruteforce),
    ("operators.pucci_duality", check_pucci_duality),
    ("operators.bracket", check_operator_brackets),
    ("sums.penalty_fd", check_penalty_fd),
    ("sums.penalty_square", check_penalty_square),
    ("sums.block_square_factor", check_block_square_factor),
    ("sums.n_bound", check_n_bound),
    ("sums.admissible_block", check_admissible_block),
    ("sums.block_scalar", check_block_scalar),
    ("sums.trace_gap", check_trace_gap),
    ("sums.lifted_trace_gap", check_lifted_trace_gap),
    ("sums.psd_sandwich", check_psd_sandwich),
    ("sums.sqrtp_lipschitz", check_sqrtp_lipschitz),
    ("sums.vertical_obstruction", check_vertical_obstruction),
]


def run_checks(name_filter: str | None = None, seed: int = 0) -> list[dict]:
    """Run the (optionally filtered) suite; substring match on lemma ids."""
    results = []
    for name, fn in ALL_CHECKS:
        if name_filter and name_filter not in name:
            continue
        results.append(fn(seed=seed))
    return results
