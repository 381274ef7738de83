"""Degenerate fully nonlinear operators on H^1 and PDE residual evaluation.

An OperatorSpec names a monotone map F on small symmetric matrices together
with its ellipticity bracket (lam, Lam) and the form it acts in: "intrinsic"
applies F to the symmetrized horizontal Hessian (2x2), "lifted" applies it to
sqrt(P) D^2u sqrt(P) (3x3).  Pucci extremal operators are defined as the
max/min of trace(a H) over matrices a with spectrum in [lam, Lam] and computed
by the eigenvalue formula Lam*sum(e>0) + lam*sum(e<0) (resp. swapped), which
is the sign convention the max/min definition forces.  Eigenvalues on this
path use the closed 2x2 formula and the cyclic Jacobi sweep, never a library
eigensolver.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .calculus import full_hessian, h_hessian
from .fields import ScalarField
from .group import Point, sqrt_p
from .rng import SplitMix64
from .symmetric import Sym2, Sym3

INTRINSIC = "intrinsic"
LIFTED = "lifted"

KINDS = ("sublaplacian", "pucci_plus", "pucci_minus", "trace_linear", "custom")


@dataclass(frozen=True)
class EllipticityBracket:
    """Ellipticity constants 0 < lam <= Lam."""

    lam: float
    Lam: float

    def __post_init__(self):
        if not (0.0 < self.lam <= self.Lam):
            raise ValueError(f"need 0 < lam <= Lam, got ({self.lam}, {self.Lam})")


@dataclass(frozen=True)
class HolderData:
    """Holder data of the zero-order coefficient c and right-hand side f."""

    c0: float
    beta: float
    beta_prime: float
    L_c: float
    L_f: float

    def __post_init__(self):
        if not self.c0 > 0:
            raise ValueError("c0 must be positive")
        for name, e in (("beta", self.beta), ("beta_prime", self.beta_prime)):
            if not (0.0 < e <= 1.0):
                raise ValueError(f"{name} must lie in (0, 1]")
        if self.L_c < 0 or self.L_f < 0:
            raise ValueError("Holder constants must be nonnegative")


def _pucci_from_eigs(eigs, bracket: EllipticityBracket, plus: bool) -> float:
    lam, Lam = bracket.lam, bracket.Lam
    hi, lo = (Lam, lam) if plus else (lam, Lam)
    total = 0.0
    # accumulate in |e| order so pucci_minus(h) == -pucci_plus(-h) bitwise
    for e in sorted(eigs, key=abs):
        total += hi * e if e > 0.0 else lo * e
    return total


def pucci_plus(h: Sym2, bracket: EllipticityBracket) -> float:
    """max over admissible a of trace(a h) = Lam*sum(e>0) + lam*sum(e<0)."""
    return _pucci_from_eigs(h.eigenvalues(), bracket, plus=True)


def pucci_minus(h: Sym2, bracket: EllipticityBracket) -> float:
    """min over admissible a of trace(a h); equals -pucci_plus(-h) exactly."""
    return _pucci_from_eigs(h.eigenvalues(), bracket, plus=False)


def pucci_plus_3(s: Sym3, bracket: EllipticityBracket) -> float:
    """3x3 extremal max (the lifted family), via Jacobi eigenvalues."""
    return _pucci_from_eigs(s.eigenvalues(), bracket, plus=True)


def pucci_minus_3(s: Sym3, bracket: EllipticityBracket) -> float:
    return _pucci_from_eigs(s.eigenvalues(), bracket, plus=False)


@dataclass(frozen=True)
class OperatorSpec:
    """A monotone operator kind with its bracket and acting form.

    kind: one of sublaplacian, pucci_plus, pucci_minus, trace_linear, custom.
    coeff: the fixed coefficient matrix of trace_linear (Sym2 for intrinsic
    form, Sym3 for lifted); its spectrum must lie inside the bracket.
    fn: the callable of a custom kind, mapping Sym2/Sym3 to float; its bracket
    claim is checked by validate_operator, not at construction.
    """

    kind: str
    bracket: EllipticityBracket
    form: str = INTRINSIC
    coeff: Sym2 | Sym3 | None = None
    fn: Callable | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}")
        if self.form not in (INTRINSIC, LIFTED):
            raise ValueError(f"unknown form {self.form!r}")
        if self.kind == "sublaplacian" and (self.bracket.lam != 1.0 or self.bracket.Lam != 1.0):
            raise ValueError("the sub-Laplacian has bracket (1, 1); use trace_linear to rescale")
        if self.kind == "trace_linear":
            want = Sym2 if self.form == INTRINSIC else Sym3
            if not isinstance(self.coeff, want):
                raise ValueError(f"trace_linear in {self.form} form needs a {want.__name__} coeff")
            evs = np.asarray(self.coeff.eigenvalues(), dtype=float)
            if evs.min() < self.bracket.lam - 1e-12 or evs.max() > self.bracket.Lam + 1e-12:
                raise ValueError("trace_linear coefficient spectrum escapes the bracket")
        if self.kind == "custom" and self.fn is None:
            raise ValueError("custom kind needs a callable")

    @staticmethod
    def sublaplacian(form: str = INTRINSIC) -> "OperatorSpec":
        return OperatorSpec("sublaplacian", EllipticityBracket(1.0, 1.0), form)

    def apply(self, h: Sym2 | Sym3) -> float:
        """F(h) for the 2x2 (intrinsic) or 3x3 (lifted) argument."""
        if self.kind == "sublaplacian":
            return h.trace()
        if self.kind == "pucci_plus":
            return _pucci_from_eigs(h.eigenvalues(), self.bracket, plus=True)
        if self.kind == "pucci_minus":
            return _pucci_from_eigs(h.eigenvalues(), self.bracket, plus=False)
        if self.kind == "trace_linear":
            a, m = self.coeff.mat, h.mat
            return float(np.trace(a @ m))
        return float(self.fn(h))

    def apply_batch(self, hxx: np.ndarray, hxy: np.ndarray, hyy: np.ndarray) -> np.ndarray:
        """Vectorized intrinsic-form evaluation on 2x2 component arrays."""
        if self.form != INTRINSIC:
            raise ValueError("apply_batch evaluates the intrinsic form")
        if self.kind == "sublaplacian":
            return hxx + hyy
        if self.kind == "trace_linear":
            a = self.coeff
            return a.a11 * hxx + 2.0 * a.a12 * hxy + a.a22 * hyy
        if self.kind in ("pucci_plus", "pucci_minus"):
            mean = 0.5 * (hxx + hyy)
            r = np.hypot(0.5 * (hxx - hyy), hxy)
            lo, hi = mean - r, mean + r
            plus = self.kind == "pucci_plus"
            big, small = (self.bracket.Lam, self.bracket.lam) if plus else (
                self.bracket.lam,
                self.bracket.Lam,
            )
            return np.where(lo > 0, big * lo, small * lo) + np.where(
                hi > 0, big * hi, small * hi
            )
        return np.array([self.fn(Sym2(a, b, c)) for a, b, c in zip(hxx, hxy, hyy)])

    def to_config(self) -> dict:
        if self.kind == "custom":
            raise ValueError("custom operators are not serializable")
        cfg = {
            "kind": self.kind,
            "lambda": self.bracket.lam,
            "Lambda": self.bracket.Lam,
            "form": self.form,
        }
        if self.kind == "trace_linear":
            cfg["a"] = self.coeff.mat.tolist()
        return cfg

    @staticmethod
    def from_config(cfg: dict) -> "OperatorSpec":
        allowed = {"kind", "lambda", "Lambda", "form", "a"}
        extra = set(cfg) - allowed
        if extra:
            raise ValueError(f"unknown operator config keys: {sorted(extra)}")
        for key in ("kind", "lambda", "Lambda"):
            if key not in cfg:
                raise ValueError(f"operator config is missing {key!r}")
        bracket = EllipticityBracket(float(cfg["lambda"]), float(cfg["Lambda"]))
        form = cfg.get("form", INTRINSIC)
        coeff = None
        if cfg["kind"] == "trace_linear":
            if "a" not in cfg:
                raise ValueError("operator config is missing 'a'")
            m = np.asarray(cfg["a"], dtype=float)
            coeff = Sym2.from_matrix(m) if form == INTRINSIC else Sym3.from_matrix(m)
        return OperatorSpec(cfg["kind"], bracket, form, coeff)


def eval_intrinsic(spec: OperatorSpec, u: ScalarField, p: Point) -> float:
    """F applied to the symmetrized horizontal Hessian of u at p."""
    if spec.form != INTRINSIC:
        raise ValueError("operator is not in intrinsic form")
    return spec.apply(h_hessian(u, p))


def eval_lifted(spec: OperatorSpec, u: ScalarField, p: Point) -> float:
    """G applied to sqrt(P) D^2u sqrt(P) at p."""
    if spec.form != LIFTED:
        raise ValueError("operator is not in lifted form")
    r = sqrt_p(p).mat
    s = r @ full_hessian(u, p).mat @ r
    return spec.apply(Sym3.from_matrix(s))


def eval_operator(spec: OperatorSpec, u: ScalarField, p: Point) -> float:
    return eval_intrinsic(spec, u, p) if spec.form == INTRINSIC else eval_lifted(spec, u, p)


def residual(
    spec: OperatorSpec, c: ScalarField, f: ScalarField, u: ScalarField, p: Point
) -> float:
    """F(.) - c(p) u(p) - f(p); the zero-order coefficient must be >= 0."""
    cval = c.value(p)
    if cval < 0:
        raise ValueError(f"zero-order coefficient is negative at {p}: {cval}")
    return eval_operator(spec, u, p) - cval * u.value(p) - f.value(p)


def validate_operator(spec: OperatorSpec, samples: int = 1000, seed: int = 0) -> dict:
    """Sample ordered pairs H2 <= H1 = H2 + PSD and report bracket violations.

    Gaps are drawn with log-uniform eigenvalues in [1e-3, 1e2] so both
    well- and ill-conditioned orderings are exercised.  Violations beyond
    1e-9 * scale are reported, never raised.
    """
    dim = 2 if spec.form == INTRINSIC else 3
    g = SplitMix64(seed, f"validate-{spec.kind}-{spec.form}")
    base = g.symmetric(samples, dim, scale=2.0)
    if dim == 3:
        gaps = g.spd(samples, 3)
    else:
        rot = g.rotations_2d(samples)
        d = g.log_uniform(2 * samples, 1e-3, 1e2).reshape(samples, 2)
        gaps = np.einsum("nij,nj,nkj->nik", rot, d, rot)
    cls = Sym2 if dim == 2 else Sym3
    worst = 0.0
    violations = 0
    lam, Lam = spec.bracket.lam, spec.bracket.Lam
    for k in range(samples):
        h2 = cls.from_matrix(base[k])
        h1 = cls.from_matrix(base[k] + gaps[k])
        diff = spec.apply(h1) - spec.apply(h2)
        tr = float(np.trace(gaps[k]))
        scale = max(1.0, abs(diff), Lam * tr)
        low_gap = (lam * tr - diff) / scale
        high_gap = (diff - Lam * tr) / scale
        margin = max(low_gap, high_gap)
        worst = max(worst, margin)
        if margin > 1e-9:
            violations += 1
    return {
        "kind": spec.kind,
        "form": spec.form,
        "trials": samples,
        "violations": violations,
        "worst_gap": worst,
        "pass": violations == 0,
    }
