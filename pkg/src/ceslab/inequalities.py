"""Quantitative inequalities with their stated constants."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import norms as N
from .core import (Cesaro, Domain, DomainMismatch, Lp, OneMinusX, OneMinusXInv, Power, Product, Sequence,
                   SpecError, StepFunction, partial_integral)
from .duality import unit_weighted_constant, conjugate, hardy_constant
from .operators import cesaro, cesaro_seq, cesaro_twice, substitution_T
from .sampling import pmap, random_halfline_domain, random_step, sample_rng

PASS_RTOL = 1e-9
EQUAL_RTOL = 1e-8
E = math.e


@dataclass
class InequalityCheck:
    """``lhs <= rhs`` (or ``lhs == rhs`` for the equality variant) with provenance."""

    name: str
    lhs: float
    rhs: float
    constant: float = math.nan
    provenance: str = ""
    equality: bool = False
    tolerance: float = PASS_RTOL
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        self.lhs, self.rhs = float(self.lhs), float(self.rhs)

    @property
    def margin(self) -> float:
        if self.equality:
            return -abs(self.lhs - self.rhs)
        if math.isinf(self.lhs) and math.isinf(self.rhs):
            return 0.0
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        if self.equality:
            scale = max(abs(self.lhs), abs(self.rhs))
            return abs(self.lhs - self.rhs) <= self.tolerance * scale or self.lhs == self.rhs
        if math.isinf(self.rhs):
            return True
        return self.lhs <= self.rhs * (1 + self.tolerance)

    @property
    def ratio(self) -> float:
        if self.rhs == 0:
            return 0.0 if self.lhs == 0 else math.inf
        return self.lhs / self.rhs

    def to_dict(self) -> dict:
        return {"name": self.name, "lhs": N._jsonable(self.lhs), "rhs": N._jsonable(self.rhs),
                "constant": N._jsonable(self.constant), "provenance": self.provenance,
                "margin": N._jsonable(self.margin), "pass": self.passed}


def _nonneg(f):
    if isinstance(f, Sequence):
        if np.any(f.arr < 0):
            raise SpecError("inequality stated for nonnegative inputs")
    elif min(f.values) < 0:
        raise SpecError("inequality stated for nonnegative inputs")


# ---------------------------------------------------------------------------
# Hardy-type inequalities
# ---------------------------------------------------------------------------


def check_hardy_classical(f: StepFunction, p: float) -> InequalityCheck:
    """``||Cf||_p <= p' ||f||_p`` on the domain of ``f``."""
    if not p > 1:
        raise SpecError("C is unbounded on L^1; need p > 1")
    _nonneg(f)
    dom = f.domain.kind
    X = Lp(p, Power(0.0), dom)
    K = conjugate(p)
    lhs = N.norm(f, Cesaro(X)).value
    rhs = K * N.norm(f, X).value
    return InequalityCheck("hardy_classical", lhs, rhs, K, "p' = p/(p-1)")


def check_hardy_power(f: StepFunction, p: float, alpha: float) -> InequalityCheck:
    """``||Cf||_{L^p(x^a)} <= K ||f||_{L^p(x^a)}`` with ``K = (1-a-1/p)^{-1}``.

    The variant with exponent ``-p``, ``(1-a-1/p)^{-p}``, is kept in ``details`` for comparison.
    """
    if not alpha < 1 - 1 / p:
        raise SpecError("need alpha < 1 - 1/p")
    _nonneg(f)
    X = Lp(p, Power(alpha), f.domain.kind)
    K = hardy_constant(p, alpha)
    lhs = N.norm(f, Cesaro(X)).value
    rhs = K * N.norm(f, X).value
    chk = InequalityCheck("hardy_power", lhs, rhs, K, "(1-alpha-1/p)^-1")
    chk.details["constant_pow_p"] = (1 - alpha - 1 / p) ** (-p)
    return chk


def check_hardy_unit_weighted(f: StepFunction, p: float, alpha: float) -> InequalityCheck:
    """``int_0^1 (Cf x^a)^p <= C^p int_0^1 ((1-x) f x^a)^p`` with ``C = C_{p,a}``."""
    if not f.domain.is_unit:
        raise DomainMismatch("the weighted Hardy inequality is on [0, 1]")
    if not (1 <= p < math.inf and alpha < 1 - 1 / p):
        raise SpecError("need 1 <= p < inf and alpha < 1 - 1/p")
    _nonneg(f)
    C = unit_weighted_constant(p, alpha)
    lhs = N.norm(f, Cesaro(Lp(p, Power(alpha), "unit"))).value ** p
    rhs = C ** p * N.norm(f, Lp(p, Product((OneMinusX(), Power(alpha))), "unit")).value ** p
    prov = "max(1,-alpha)/(-alpha) (p = 1)" if p == 1 else "p/q max(1,q)^(1/p), q = p - alpha p - 1"
    chk = InequalityCheck("hardy_unit_weighted", lhs, rhs, C, prov)
    q = p - alpha * p - 1
    chk.details["proof_constant"] = (p / q * max(1.0, q)) if p > 1 else C
    return chk


def check_am_weighted(f: StepFunction, p: float) -> InequalityCheck:
    """``||Cf||_p <= D ||(1-x) f||_p`` on [0,1], ``D = min(2(p'+2p), 2(p'+p))``."""
    if not f.domain.is_unit:
        raise DomainMismatch("this inequality is on [0, 1]")
    if not 1 < p < math.inf:
        raise SpecError("need 1 < p < inf")
    _nonneg(f)
    q = conjugate(p)
    D = min(2 * (q + 2 * p), 2 * (q + p))
    lhs = N.norm(f, Cesaro(Lp(p, Power(0.0), "unit"))).value
    rhs = D * N.norm(f, Lp(p, OneMinusX(), "unit")).value
    return InequalityCheck("am_weighted", lhs, rhs, D, "2(||C|| + ||C*||) = 2(p' + p)")


def extremal_hardy_ratio(p: float, eps: float = 0.01, domain: str = "halfline") -> float:
    """Closed-form ``||Cf||_p / ||f||_p`` for ``f = x^(-1/p + eps) chi_[0,1]``."""
    b = -1.0 / p + eps
    inner = 1.0 / ((b + 1) ** p * (b * p + 1))
    tail = 1.0 / ((b + 1) ** p * (p - 1)) if domain == "halfline" else 0.0
    return ((inner + tail) * (b * p + 1)) ** (1.0 / p)


def extremal_step(p: float, eps: float, domain: Domain, cells: int = 400, alpha: float = 0.0) -> StepFunction:
    """Cell averages of ``x^(-1/p-alpha+eps)`` on a geometric grid of ``[0, 1]``."""
    b = -1.0 / p - alpha + eps
    pts = np.concatenate([[0.0], np.geomspace(1e-12, 1.0, cells)])
    vals = (pts[1:] ** (b + 1) - pts[:-1] ** (b + 1)) / ((b + 1) * np.diff(pts))
    if not domain.is_unit and domain.horizon < 1:
        raise SpecError("the extremal family lives on [0, 1]; need horizon >= 1")
    if not domain.is_unit and domain.horizon > 1:
        pts = np.append(pts, domain.horizon)
        vals = np.append(vals, 0.0)
    return StepFunction.from_arrays(domain, pts, vals)


# ---------------------------------------------------------------------------
# pointwise lemmas
# ---------------------------------------------------------------------------


def check_curbera_ricker_cont(f: StepFunction, a: float, grid) -> InequalityCheck:
    """``Cf(x/a) <= (a/ln a) CCf(x)`` at every grid point; reports the worst point."""
    if not a > 1:
        raise SpecError("need a > 1")
    _nonneg(f)
    x = np.asarray(grid, dtype=float)
    K = a / math.log(a)
    lhs = cesaro(f)(x / a)
    rhs = K * cesaro_twice(f)(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(rhs > 0, lhs / rhs, np.where(lhs > 0, np.inf, 0.0))
    k = int(np.argmax(r))
    viol = int(np.sum(lhs > rhs * (1 + PASS_RTOL)))
    chk = InequalityCheck("curbera_ricker_cont", lhs[k], rhs[k], K, "a/ln a")
    chk.details.update(points=len(x), violations=viol, worst_x=float(x[k]))
    return chk


def check_curbera_ricker_seq(x: Sequence, n: int) -> tuple:
    """``sum_{j<=n} x_[(j+2)/3] <= 3 sum_{j<=[(n+1)/2]} x_j <= 12 sum_{j<=n} (Cx)_j``."""
    _nonneg(x)
    v = x.padded(n)
    j = np.arange(1, n + 1)
    left = math.fsum(v[(j + 2) // 3 - 1])
    mid = 3 * math.fsum(v[: (n + 1) // 2])
    right = 12 * math.fsum(cesaro_seq(Sequence(tuple(v[:n])), n)) if n else 0.0
    return (InequalityCheck("majorseq_left", left, mid, 3.0, "index arithmetic"),
            InequalityCheck("majorseq_right", mid, right, 12.0, "sum_{k>=[(n+1)/2]}^n 1/k >= 1/4"))


def d_function(t):
    """``d(t) = t + e - e t``."""
    return t + E - E * np.asarray(t, dtype=float)


def check_d_lemma(f: StepFunction, t: float) -> InequalityCheck:
    """``int_0^{t/d(t)} |f| <= int_0^t C|f|(x)/(1-x) dx`` for ``t`` in (0,1)."""
    if not f.domain.is_unit:
        raise DomainMismatch("the lemma is on [0, 1]")
    if not 0 < t < 1:
        raise SpecError("need 0 < t < 1")
    fa = f.abs()
    F = partial_integral(fa)
    lhs = float(F(t / float(d_function(t))))
    # C|f| = b + a/x per cell; antiderivative of (b + a/x)/(1-x) is -(b+a) ln(1-x) + a ln x
    g = cesaro(fa)
    total = []
    for i in range(g.n_cells):
        lo, hi = g.bp[i], min(g.bp[i + 1], t)
        if hi <= lo:
            break
        b, a = g.c0[i], g.c1[i]
        part = -(b + a) * (math.log1p(-hi) - math.log1p(-lo))
        if a:
            part += a * math.log(hi / lo)
        total.append(part)
    rhs = math.fsum(total)
    chk = InequalityCheck("d_lemma", lhs, rhs, 1.0, "change of variables with 1 < d(t) < e")
    d = float(d_function(t))
    chk.details["d_in_range"] = bool(1 < d < E)
    return chk


def check_T_endpoint_bounds(h: StepFunction) -> tuple:
    """``||Th|| <= e ||h||`` in ``L^oo(1/(1-x))`` and ``L^1(1/(1-x))``."""
    if not h.domain.is_unit:
        raise DomainMismatch("T acts on [0, 1]")
    Th = substitution_T(h)
    out = []
    for p in (math.inf, 1.0):
        X = Lp(p, OneMinusXInv(), "unit")
        lhs = N.norm(Th, X).value
        rhs = E * N.norm(h, X).value
        out.append(InequalityCheck(f"T_bound_L{'inf' if p == math.inf else '1'}", lhs, rhs, E,
                                   "e/(x+e-ex) <= e"))
    return tuple(out)


def bernoulli_check(q: float, n: int = 10001) -> InequalityCheck:
    """``1 - t^q <= max(1, q)(1 - t)`` on a grid of [0, 1] (worst point reported)."""
    if not q > 0:
        raise SpecError("need q > 0")
    t = np.linspace(0.0, 1.0, n)
    lhs = 1 - t ** q
    rhs = max(1.0, q) * (1 - t)
    k = int(np.argmax(lhs - rhs))
    return InequalityCheck("bernoulli", lhs[k], rhs[k], max(1.0, q), "Bernoulli inequality")


# ---------------------------------------------------------------------------
# idempotency of C on L^p
# ---------------------------------------------------------------------------


@dataclass
class IdempotencyReport:
    p: float
    samples: int
    hardy_ratios: list  # ||CCf|| / (p' ||Cf||)
    reverse_ratios: list  # ||Cf|| / ((e/p') ||CCf||)
    grid_minimum: float
    grid_argmin: float
    target: float

    @property
    def grid_ok(self) -> bool:
        return abs(self.grid_minimum - self.target) <= 0.01 * self.target

    @property
    def passed(self) -> bool:
        ok = all(r <= 1 + PASS_RTOL for r in self.hardy_ratios + self.reverse_ratios)
        return ok and self.grid_ok

    def to_dict(self) -> dict:
        return {"p": self.p, "samples": self.samples, "max_hardy_ratio": max(self.hardy_ratios, default=0.0),
                "max_reverse_ratio": max(self.reverse_ratios, default=0.0), "grid_minimum": self.grid_minimum,
                "grid_argmin": self.grid_argmin, "e_over_pprime": self.target, "pass": self.passed}


def grid_min_embedding_constant(p: float, n: int = 20001) -> tuple:
    """``min_a a^{1/p'}/ln a`` over a log grid; the exact value is ``e/p'`` at ``a = e^{p'}``."""
    q = conjugate(p)
    a = np.geomspace(1.01, max(10 * math.exp(q), 100.0), n)
    v = a ** (1 / q) / np.log(a)
    k = int(np.argmin(v))
    return float(v[k]), float(a[k])


def check_idempotency(p: float, samples: int = 100, seed: int = 0) -> IdempotencyReport:
    """``||CCf||_p <= p' ||Cf||_p`` and ``||Cf||_p <= (e/p') ||CCf||_p`` on the half-line."""
    if not 1 < p < math.inf:
        raise SpecError("need 1 < p < inf")
    q = conjugate(p)
    X = Lp(p, Power(0.0), "halfline")

    def one(i):
        rng = sample_rng(seed, i)
        f = random_step(rng, random_halfline_domain(rng), 40)
        c = N.norm(f, Cesaro(X)).value
        cc = N.norm(f, Cesaro(Cesaro(X))).value
        return cc / (q * c), c / (E / q * cc)

    res = pmap(one, range(samples))
    gmin, garg = grid_min_embedding_constant(p)
    return IdempotencyReport(p, samples, [r[0] for r in res], [r[1] for r in res], gmin, garg, E / q)


# f concentrated near 1 found by maximizing the Rayleigh quotient of the
# two quadratic forms for p = 2, alpha = -1/2 on a grid clustered at 1
UNIT_WEIGHTED_PROBE = (
    (0.0, 0.001, 0.01, 0.46388308, 0.7096754, 0.84277987, 0.91486023, 0.95389407, 0.97503215, 0.98647911,
     0.992678, 0.9960349, 0.99785277, 0.99883721, 0.99937031, 0.999659, 0.99981534, 0.9999, 1.0),
    (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0001, 0.0003, 0.0008, 0.002, 0.0051, 0.0126, 0.0306, 0.0726,
     0.168, 0.3776, 1.0),
)


def unit_weighted_probe() -> InequalityCheck:
    """Sharpness probe of the unit-interval constant C_{p,alpha} at ``p = 2``, ``alpha = -1/2``."""
    f = StepFunction.from_arrays(Domain.unit(), *UNIT_WEIGHTED_PROBE)
    return check_hardy_unit_weighted(f, 2.0, -0.5)
