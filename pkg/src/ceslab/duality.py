"""Associate norms, Cesaro dual norms, down norms, Sinnamon's identity and duality reports."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import isotonic_regression, linprog

from . import norms as N
from .core import (Cesaro, Const, Domain, DomainMismatch, Lorentz, Lp, OneMinusXInv, PhiOverT, Power, Product,
                   Reciprocal, SeqCesaro, SeqLp, SeqTilde, Sequence, SpaceSpec, SpecError, StepFunction, Tilde,
                   UnsupportedSpec, Weight, Weighted, merge_points, partial_integral)
from .norms import NormValue
from .operators import PiecewiseFunction, majorant
from .sampling import (family_for, pmap, random_halfline_domain, random_sequence, random_step, sample_rng,
                       vanish_near_one)

SOLVER_TOL = 1e-6
E = math.e


def conjugate(p: float) -> float:
    if p == 1:
        return math.inf
    if p == math.inf:
        return 1.0
    return p / (p - 1)


# ---------------------------------------------------------------------------
# space helpers
# ---------------------------------------------------------------------------


def _lp_parts(X: SpaceSpec):
    """``(p, w, domain)`` for Lp / SeqLp possibly wrapped in Weighted; None otherwise."""
    extra = []
    while isinstance(X, Weighted):
        extra.append(X.weight)
        X = X.inner
    if isinstance(X, Lp):
        dom = X.domain
    elif isinstance(X, SeqLp):
        dom = None
    else:
        return None
    w = Product((X.weight, *extra)) if extra else X.weight
    return X.p, w, dom


def holder_conjugate_space(X: SpaceSpec) -> SpaceSpec:
    """``[L^p(w)]' = L^{p'}(1/w)``, likewise for sequences."""
    parts = _lp_parts(X)
    if parts is None:
        raise UnsupportedSpec(f"no Holder conjugate known for {X.to_sexpr()}")
    p, w, dom = parts
    q = conjugate(p)
    wr = Power(0.0) if w.is_unit() else Reciprocal(w)
    return SeqLp(q, wr) if dom is None else Lp(q, wr, dom)


# ---------------------------------------------------------------------------
# exact cone problem: max c.S / (sum q S^p)^{1/p} over 0 <= S nondecreasing
# ---------------------------------------------------------------------------


def cone_dual(c, q, p: float) -> tuple:
    """Exact sup of ``c.S / (sum q S^p)^(1/p)`` over nondecreasing ``S >= 0``.

    Returns ``(value, S)``. The maximizer is ``S^(p-1)`` = positive part of the
    weighted isotonic regression of ``c/q`` with weights ``q``.
    """
    c = np.asarray(c, dtype=float).copy()
    q = np.asarray(q, dtype=float).copy()
    # free trailing points (q = 0): any positive objective there is unbounded
    while len(q) and q[-1] == 0:
        if c[-1] > 0:
            return math.inf, None
        if len(c) > 1:
            c[-2] += c[-1]
        c, q = c[:-1], q[:-1]
    if not len(c) or np.all(np.cumsum(c[::-1]) <= 0):
        return 0.0, np.zeros(len(c))
    if np.isinf(q[-1]):
        # an infinite tail cost forces S_N = 0, hence S = 0
        return 0.0, np.zeros(len(c))
    if p == 1:
        tail_c = np.cumsum(c[::-1])[::-1]
        tail_q = np.cumsum(q[::-1])[::-1]
        k = int(np.argmax(tail_c / tail_q))
        S = np.zeros(len(c))
        S[k:] = 1.0 / tail_q[k]
        return max(0.0, float(tail_c[k] / tail_q[k])), S
    y = np.maximum(isotonic_regression(c / q, weights=q).x, 0.0)
    S = y ** (1.0 / (p - 1))
    den = math.fsum(q * S ** p) ** (1.0 / p)
    if den == 0:
        return 0.0, S
    return math.fsum(c * S) / den, S / den


def _cone_inf(c, U) -> tuple:
    """``max c.S`` over ``0 <= S_1 <= ... <= S_n``, ``S_k <= U_k`` (the ``L^oo`` case)."""
    n = len(c)
    if n == 0:
        return 0.0, np.zeros(0)
    U = np.minimum.accumulate(np.asarray(U, dtype=float)[::-1])[::-1]
    if np.any(np.isinf(U)) and np.any(c > 0):
        tail_c = np.cumsum(np.asarray(c)[::-1])[::-1]
        if np.any(tail_c[np.isinf(U)] > 0):
            return math.inf, None
    A = np.zeros((max(n - 1, 0), n))
    for k in range(n - 1):
        A[k, k], A[k, k + 1] = 1.0, -1.0
    bounds = [(0.0, None if math.isinf(u) else float(u)) for u in U]
    res = linprog(-np.asarray(c), A_ub=A if n > 1 else None, b_ub=np.zeros(n - 1) if n > 1 else None,
                  bounds=bounds, method="highs-ds")
    if res.status != 0:
        raise RuntimeError(f"LP solver failed: {res.message}")
    return float(-res.fun), res.x


def _suffix_diff(g: np.ndarray) -> np.ndarray:
    return g - np.append(g[1:], 0.0)


# ---------------------------------------------------------------------------
# Cesaro dual norms
# ---------------------------------------------------------------------------


def _seq_cesaro_dual(g: Sequence, p: float, w: Weight) -> NormValue:
    a = np.abs(g.arr)
    n = len(a)
    if n == 0:
        return NormValue(0.0, N.OPT, 0.0)
    c = _suffix_diff(a)
    idx = np.arange(1, n + 1, dtype=float)
    wn = w.seq(idx)
    if p == math.inf:
        U = idx / wn
        tail = N._tail_weight_sum(w, n, math.inf)
        U[-1] = min(U[-1], 1.0 / tail if tail > 0 else math.inf)
        val, S = _cone_inf(c, U)
    else:
        q = (wn / idx) ** p
        q[-1] += N._tail_weight_sum(w, n, p)
        val, S = cone_dual(c, q, p)
    if math.isinf(val):
        return N.INF
    x = np.diff(np.concatenate([[0.0], S])) if S is not None else None
    return NormValue(val, N.OPT, 1e-12 * val, witness=Sequence(tuple(x)) if x is not None else None)


def _segment_cost(w: Weight, p: float, lo: float, hi: float, domain: Domain) -> float:
    """``int_lo^hi (w(x)/x)^p dx`` (``hi`` may be infinite)."""
    if hi <= lo:
        return 0.0
    wx = Product((w, Power(-1.0)))
    if math.isinf(hi):
        H = Domain.halfline(lo)
        tail = PiecewiseFunction(H, np.array([0.0, lo]), np.zeros(1), np.zeros(1), np.zeros(1), np.zeros(1),
                                 1.0, 0.0)
        nv = N.lp_norm(tail, w, p)
    else:
        nv = N.lp_norm(StepFunction.indicator(lo, hi, domain), wx, p)
    return nv.value ** p if p != math.inf else nv.value


def _fn_cesaro_dual(g: StepFunction, p: float, w: Weight, dom: str) -> NormValue:
    """Exact: mass pushed to the right end of each cell of ``g`` minimizes ``||C f||``."""
    if g.domain.kind != dom:
        raise DomainMismatch("function and space on different domains")
    a = np.abs(g.vals)
    t = g.bp[1:]
    n = len(a)
    c = _suffix_diff(a)
    ends = np.append(t[1:], 1.0 if g.domain.is_unit else math.inf)
    if p == math.inf:
        # S_k <= inf over [t_k, t_{k+1}) of x / w(x)
        U = np.empty(n)
        for k in range(n):
            lo, hi = t[k], ends[k]
            xs = np.geomspace(lo, hi if math.isfinite(hi) else lo * 1e12, 2001) if lo < hi else np.array([lo])
            with np.errstate(divide="ignore"):
                U[k] = float(np.min(xs / w(xs)))
        val, S = _cone_inf(c, U)
        method = N.OPT
    else:
        q = np.array([_segment_cost(w, p, t[k], ends[k], g.domain) for k in range(n)])
        val, S = cone_dual(c, q, p)
        method = N.OPT
    if math.isinf(val):
        return N.INF
    return NormValue(val, method, 1e-10 * val, witness=S)


def cesaro_dual_norm(g, X: SpaceSpec) -> NormValue:
    """``||g||_{(CX)'}`` for ``X = l^p(w)`` or ``L^p(w)``: exact cone maximization.

    ``X`` is the inner space (the dual of ``Ces(X)`` is computed). Other specs
    fall back to the pattern-search ascent with a Holder-Rogers bracket.
    """
    parts = _lp_parts(X)
    if parts is None:
        if isinstance(g, Sequence):
            return associate_norm(g, SeqCesaro(X), method="ascent")
        raise UnsupportedSpec(f"Cesaro dual norm for {X.to_sexpr()}")
    p, w, dom = parts
    if isinstance(g, Sequence):
        if dom is not None:
            raise DomainMismatch("sequence given for a function space")
        k = N._pow2_exponent(g.arr) if len(g) else 0
        return N._rescaled(_seq_cesaro_dual(Sequence(tuple(np.ldexp(g.arr, -k))), p, w), k)
    if dom is None:
        raise DomainMismatch("function given for a sequence space")
    k = N._pow2_exponent(g.vals)
    g = StepFunction(g.domain, g.breakpoints, tuple(float(v) for v in np.ldexp(g.vals, -k)))
    return N._rescaled(_fn_cesaro_dual(g, p, w, dom), k)


def ces_inf_dual_norm(g: StepFunction, w: Weight) -> NormValue:
    """``||g||_{(C L^oo(v))'}`` with ``v = x/W(x)``: LP over ``int_0^u |f| <= W(u)``.

    Exact for step (or constant) weights, whose primitive is piecewise linear.
    """
    pts = [s for s in w.breakpoints() if 0 < s < g.horizon]
    gg = g.refine(pts)
    a = np.abs(gg.vals)
    t = gg.bp[1:]
    W = np.array([w.integral(0.0, s) for s in t])
    val, S = _cone_inf(_suffix_diff(a), W)
    return NormValue(val, N.OPT, 1e-9 * max(val, 1.0), witness=S)


# ---------------------------------------------------------------------------
# associate norms
# ---------------------------------------------------------------------------


def _simplex_grid(n: int, k: int) -> np.ndarray:
    rows = []
    for combo in itertools.combinations(range(k + n - 1), n - 1):
        prev, parts = -1, []
        for c in combo:
            parts.append(c - prev - 1)
            prev = c
        parts.append(k + n - 2 - prev)
        rows.append(parts)
    return np.array(rows, dtype=float) / k


def _pattern_search(ratio, starts: np.ndarray, delta0: float = 0.1, delta_min: float = 1e-11,
                    max_iter: int = 20000) -> tuple:
    """Maximize ``ratio`` on the simplex by pairwise mass transfers with shrinking step."""
    best_val, best_x = -math.inf, None
    for x0 in starts:
        x = x0 / x0.sum()
        val = float(ratio(x[None, :])[0])
        delta = delta0
        n = len(x)
        pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
        if not pairs:
            delta = 0.0
        it = 0
        while delta >= delta_min and it < max_iter:
            it += 1
            cand = np.repeat(x[None, :], 2 * len(pairs), axis=0)
            for r, (i, j) in enumerate(pairs):
                d = min(delta, x[i])
                cand[r, i] -= d
                cand[r, j] += d
                cand[len(pairs) + r, j] += x[i]
                cand[len(pairs) + r, i] = 0.0
            vals = ratio(cand)
            k = int(np.argmax(vals))
            if vals[k] > val * (1 + 1e-15) + 1e-300:
                val, x = float(vals[k]), cand[k]
            else:
                delta *= 0.5
        if val > best_val:
            best_val, best_x = val, x
    return best_val, best_x


def _seq_ratio(g: np.ndarray, X: SpaceSpec):
    def ratio(xs):
        den = N.seq_norm_batch(xs, X)
        num = xs @ g
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(den > 0, num / den, 0.0)
    return ratio


def brute_force_associate(g: Sequence, X: SpaceSpec, grid: int = 10) -> NormValue:
    """Dense simplex grid plus pattern-search polishing; sequences of length <= 8."""
    a = np.abs(g.arr)
    n = len(a)
    if n > 8:
        raise SpecError("brute force is limited to sequences of length <= 8")
    if n == 0 or not np.any(a):
        return NormValue(0.0, N.OPT, 0.0)
    ratio = _seq_ratio(a, X)
    pts = _simplex_grid(n, grid)
    vals = ratio(pts)
    top = pts[np.argsort(-vals)[:3]]
    val, x = _pattern_search(ratio, top, delta0=1.0 / grid)
    return NormValue(val, N.OPT, 1e-9 * val, bracket=(val, math.inf), witness=Sequence(tuple(x / N.seq_norm_batch(
        x[None, :], X)[0])))


def _ascent(g: Sequence, X: SpaceSpec) -> NormValue:
    a = np.abs(g.arr)
    n = len(a)
    if n == 0 or not np.any(a):
        return NormValue(0.0, N.OPT, 0.0)
    ratio = _seq_ratio(a, X)
    box = np.zeros(n)
    box[int(np.argmax(a))] = 1.0
    starts = np.array([np.ones(n), a + 1e-12, box])
    val, x = _pattern_search(ratio, starts, delta0=0.25)
    upper = math.inf
    try:
        upper = N.seq_norm(g, holder_conjugate_space(X)).value
    except UnsupportedSpec:
        pass
    return NormValue(val, N.OPT, max(upper - val, 0.0) if math.isfinite(upper) else math.inf,
                     bracket=(val, upper), witness=Sequence(tuple(x)))


def associate_norm(g, X: SpaceSpec, method: str = "exact") -> NormValue:
    """Koethe associate norm ``sup{ int |f g| : ||f||_X <= 1 }``.

    ``exact``: Holder conjugate for ``L^p(w)``/``l^p(w)``, exact cone solver for
    their Cesaro spaces. ``brute``: grid search (sequences of length <= 8).
    ``ascent``: pattern search with a Holder-Rogers upper bound where known.
    """
    method = method.lower()
    if method in ("brute", "bruteforce"):
        if not isinstance(g, Sequence):
            raise SpecError("brute force is for sequences")
        return brute_force_associate(g, X)
    if method == "ascent":
        if not isinstance(g, Sequence):
            raise UnsupportedSpec("ascent is implemented for sequences")
        return _ascent(g, X)
    if method != "exact":
        raise SpecError(f"unknown method {method!r}")
    if isinstance(X, (Cesaro, SeqCesaro)):
        return cesaro_dual_norm(g, X.inner)
    return N.norm(g, holder_conjugate_space(X))


# ---------------------------------------------------------------------------
# down norms
# ---------------------------------------------------------------------------


def _down_cells(a: np.ndarray, ell: np.ndarray, W: np.ndarray, q: float) -> tuple:
    """``max sum a h ell`` over nonincreasing ``h >= 0`` with ``sum W h^q <= 1``."""
    if not np.any(a):
        return 0.0, np.zeros_like(a)
    # the value is linear in a; normalize so powers of tiny or huge inputs stay finite
    s = float(np.max(a))
    if s != 1.0:
        val, h = _down_cells(a / s, ell, W, q)
        return val * s, h
    if q == math.inf:
        h = np.ones_like(a)
        return float(np.sum(a * ell)), h
    r = a * ell / W
    if q == 1:
        # extreme points are boxes h = chi_[0,t] / W([0,t])
        ratios = np.cumsum(a * ell) / np.cumsum(W)
        k = int(np.argmax(ratios))
        h = np.zeros_like(a)
        h[: k + 1] = 1.0 / np.sum(W[: k + 1])
        return float(ratios[k]), h
    y = np.maximum(isotonic_regression(r, weights=W, increasing=False).x, 0.0)
    h = y ** (1.0 / (q - 1))
    den = math.fsum(W * h ** q) ** (1.0 / q)
    return math.fsum(a * ell * h) / den, h / den


def down_norm(f, Xprime: SpaceSpec, refine: int = 16) -> NormValue:
    """``sup{ int |f| h : 0 <= h nonincreasing, ||h||_{X'} <= 1 }``.

    Exact for unweighted ``L^q`` / ``l^q(w)`` (Jensen lets ``h`` be constant on
    the cells of ``f``); weighted function spaces are discretized on refined
    cells and the value is a lower bound.
    """
    parts = _lp_parts(Xprime)
    if parts is None:
        raise UnsupportedSpec(f"down norm for {Xprime.to_sexpr()}")
    q, w, dom = parts
    if isinstance(f, Sequence):
        if dom is not None:
            raise DomainMismatch("sequence given for a function space")
        a = np.abs(f.arr)
        n = np.arange(1, len(a) + 1, dtype=float)
        wn = w.seq(n) if len(a) else np.zeros(0)
        W = wn ** q if q != math.inf else np.ones_like(a)
        if q == math.inf:
            val = float(np.sum(a / wn))
            return NormValue(val, N.CLOSED, 0.0, witness=Sequence(tuple(1 / wn)))
        val, h = _down_cells(a, np.ones_like(a), W, q)
        return NormValue(val, N.OPT if q != 1 else N.CLOSED, 1e-12 * val, witness=Sequence(tuple(h)))
    if dom is None or f.domain.kind != dom:
        raise DomainMismatch("function and space on different domains")
    if isinstance(w, (Power, Const)) and (w.is_unit() or isinstance(w, Const)):
        k = w.c if isinstance(w, Const) else 1.0
        a = np.abs(f.vals)
        ell = f.lengths
        if q == math.inf:
            return NormValue(float(np.sum(a * ell)) / k, N.CLOSED, 0.0)
        if q == 1:
            # sup_t F(t)/t: F(t)/t is monotone on each cell, so breakpoints suffice (plus t -> 0)
            F = partial_integral(f.abs()).heights
            val = max(float(a[0]), float(np.max(F[1:] / f.bp[1:]))) / k
            return NormValue(val, N.CLOSED, 0.0)
        val, h = _down_cells(a, ell, ell * k ** q, q)
        return NormValue(val, N.OPT, 1e-12 * val,
                         witness=StepFunction.from_arrays(f.domain, f.bp, h))
    # weighted: refine each cell geometrically and optimize on the finer grid
    pts = []
    for lo, hi in zip(f.bp[:-1], f.bp[1:]):
        base = lo if lo > 0 else hi * 1e-6
        pts.extend(np.geomspace(base, hi, refine + 1)[:-1] if lo > 0 else np.geomspace(base, hi, refine + 1))
    g = f.refine(pts + list(w.breakpoints()) + list(w.singular_points()))
    a = np.abs(g.vals)
    ell = g.lengths
    if q == math.inf:
        raise UnsupportedSpec("weighted L-infinity down norm")
    Wc = np.array([N._weight_pow_integral(w, q, lo, hi) or
                   N.lp_norm(StepFunction.indicator(lo, hi, g.domain), w, q).value ** q
                   for lo, hi in zip(g.bp[:-1], g.bp[1:])])
    val, h = _down_cells(a, ell, Wc, q)
    return NormValue(val, N.OPT, 1e-9 * val, bracket=(val, math.inf),
                     witness=StepFunction.from_arrays(g.domain, g.bp, h))


# ---------------------------------------------------------------------------
# Sinnamon's identity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MajorizationWitness:
    h: object
    objective: float
    constraint_slack: float


def _majorization_lp(F: np.ndarray, gv: np.ndarray) -> tuple:
    """``max sum m_i g_i`` over ``m >= 0`` with ``cumsum(m) <= F`` (``F`` nondecreasing)."""
    n = len(gv)
    sf = float(F[-1]) if n and F[-1] > 0 else 1.0
    sg = float(np.max(gv)) if n and np.max(gv) > 0 else 1.0
    A = np.tril(np.ones((n, n)))
    res = linprog(-gv / sg, A_ub=A, b_ub=F / sf, bounds=[(0, None)] * n, method="highs-ds",
                  options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10})
    if res.status != 0:
        raise RuntimeError(f"LP solver failed: {res.message}")
    # the solver's feasibility tolerance is absolute; clip back onto the feasible set
    m = np.maximum(res.x * sf, 0.0)
    used = 0.0
    for i in range(n):
        m[i] = max(0.0, min(m[i], F[i] - used))
        used += m[i]
    return math.fsum(m * gv), m


def sinnamon_sup(f, g) -> tuple:
    """``(lp_value, closed_form, witness)`` for ``int f g~ = sup_{h < f} int h g``."""
    if isinstance(f, Sequence):
        fa, ga = f.arr, g.arr
        if np.any(fa < 0) or np.any(ga < 0):
            raise SpecError("Sinnamon's identity is stated for nonnegative f, g")
        n = max(len(fa), len(ga))
        fa, ga = f.padded(n), g.padded(n)
        F = np.cumsum(fa)
        lp, m = _majorization_lp(F, ga) if n else (0.0, np.zeros(0))
        closed = math.fsum(fa * majorant(Sequence(tuple(ga))).padded(n)) if n else 0.0
        slack = float(np.min(F - np.cumsum(m))) if n else 0.0
        return lp, closed, MajorizationWitness(Sequence(tuple(m)), lp, slack)
    if f.domain.kind != g.domain.kind:
        raise DomainMismatch("f and g on different domains")
    if min(f.values) < 0 or min(g.values) < 0:
        raise SpecError("Sinnamon's identity is stated for nonnegative f, g")
    H = max(f.horizon, g.horizon)
    pts = merge_points(f.breakpoints + g.breakpoints + (H,), H)
    pts[-1] = H
    mids = 0.5 * (pts[:-1] + pts[1:])
    ell = np.diff(pts)
    fv, gv = f(mids), g(mids)
    F = np.cumsum(fv * ell)
    lp, m = _majorization_lp(F, gv)
    gt = np.maximum.accumulate(gv[::-1])[::-1]
    closed = math.fsum(fv * gt * ell)
    dom = Domain(f.domain.kind, H)
    h = StepFunction.from_arrays(dom, pts, m / ell)
    slack = float(np.min(F - np.cumsum(m)))
    return lp, closed, MajorizationWitness(h, lp, slack)


# ---------------------------------------------------------------------------
# duality reports
# ---------------------------------------------------------------------------


@dataclass
class DualityReport:
    space: str
    kind: str
    samples: int
    ratios: list
    interval: tuple
    constants: dict
    hypotheses: str
    tolerance: float = SOLVER_TOL
    quantity: str = ""
    passed: bool = field(default=False)

    def __post_init__(self):
        lo, hi = self.interval
        self.passed = all(lo * (1 - self.tolerance) <= r <= hi * (1 + self.tolerance) for r in self.ratios)

    @property
    def min_ratio(self) -> float:
        return min(self.ratios) if self.ratios else math.nan

    @property
    def max_ratio(self) -> float:
        return max(self.ratios) if self.ratios else math.nan

    def to_dict(self) -> dict:
        return {
            "space": self.space, "kind": self.kind, "quantity": self.quantity, "samples": self.samples,
            "interval": [N._jsonable(self.interval[0]), N._jsonable(self.interval[1])],
            "constants": self.constants, "hypotheses": self.hypotheses, "tolerance": self.tolerance,
            "min_ratio": self.min_ratio, "max_ratio": self.max_ratio, "pass": self.passed,
            "ratios": [float(r) for r in self.ratios],
        }


def _const(value: float, provenance: str) -> dict:
    return {"value": N._jsonable(value), "provenance": provenance}


def dilation_norm(X: SpaceSpec, tau: float) -> tuple:
    """``(||sigma_tau||_X, provenance)`` where a formula is known."""
    parts = _lp_parts(X)
    if parts is not None and parts[2] is not None:
        p, w, _ = parts
        pf = N._power_form(w, 1.0, 2.0) if isinstance(w, (Power, Const, Product)) else None
        if pf is not None:
            return tau ** (1.0 / p + pf[1]), "formula tau^(1/p+alpha)"
    if isinstance(X, Lorentz):
        return X.gauge.dilation_norm(tau), "sup phi(tau t)/phi(t) on the gauge"
    raise UnsupportedSpec(f"no dilation norm formula for {X.to_sexpr()}")


def dilation_constant_A(X: SpaceSpec, grid: int = 4001) -> tuple:
    """``min_a (a/ln a) ||sigma_{1/a}||`` over a log grid of ``a`` in [1.1, 100]."""
    a = np.geomspace(1.1, 100.0, grid)
    vals = np.array([ai / math.log(ai) * dilation_norm(X, 1.0 / ai)[0] for ai in a])
    k = int(np.argmin(vals))
    return float(vals[k]), float(a[k])


def hardy_constant(p: float, alpha: float = 0.0) -> float:
    """``||C||`` on ``L^p(x^alpha)``: ``(1 - alpha - 1/p)^{-1}``."""
    if p == math.inf:
        return 1.0 / (1 - alpha) if alpha < 1 else math.inf
    s = 1 - alpha - 1 / p
    return 1.0 / s if s > 0 else math.inf


def _power_alpha(w: Weight) -> float | None:
    pf = N._power_form(w, 1.0, 2.0) if isinstance(w, (Power, Const, Product, Reciprocal)) else None
    if pf is None or (isinstance(w, Product) and not all(isinstance(x, (Power, Const)) for x in w.factors)):
        return None
    return pf[1]


def unit_weighted_constant(p: float, alpha: float) -> float:
    """``C_{p,alpha} = p/q * max(1, q)^{1/p}`` with ``q = p - alpha p - 1``."""
    q = p - alpha * p - 1
    if p == 1:
        return max(1.0, -alpha) / (-alpha)
    return p / q * max(1.0, q) ** (1.0 / p)


def _function_sample(rng, kind: str, index: int, unit_vanish: bool = False) -> StepFunction:
    dom = Domain.unit() if kind == "unit" else random_halfline_domain(rng)
    f = random_step(rng, dom, max_cells=40, family=family_for(index))
    if unit_vanish:
        f = vanish_near_one(f, rng)
    return f


REPORT_KINDS = ("down", "halfline", "unit", "sequence", "ces-inf", "lorentz")


def default_kind(X: SpaceSpec) -> str:
    """The report a space gets when none is named."""
    if isinstance(X, Lorentz):
        return "lorentz"
    parts = _lp_parts(X)
    if parts is None:
        raise SpecError(f"no duality report for {X.to_sexpr()}")
    return {None: "sequence", "unit": "unit", "halfline": "halfline"}[parts[2]]


def duality_report(X: SpaceSpec, n_samples: int = 50, seed: int = 0, kind: str | None = None) -> DualityReport:
    """Sample inputs and check every ratio against the proven interval for ``kind``.

    down: ``||f||_{X down} / ||f||_{CX}`` in ``[1/B, A]``.
    halfline: ``||g||_{(CX)'} / ||g~||_{X'}`` in ``[1/B, A]``.
    unit: ``||g||_{(CX)'} / ||g~||_{X'(1/(1-x))}`` in ``[1/D, M]``.
    sequence: ``[1/B, D]`` with ``D = 4 ||sigma_3||_{X'}``.
    ces-inf: ``||g||_{(C L^oo(v))'} / ||g~||_{L^1(w)}`` equal to 1 (``X = L^1(w)`` names ``w``).
    lorentz: ``||f||_{C Lambda_phi} / ||f||_{L^1(phi/t)}`` in ``[1/(e c1), c2]``.
    """
    kind = kind or default_kind(X)
    fn = {"down": _report_down, "halfline": _report_halfline, "unit": _report_unit, "sequence": _report_sequence,
          "ces-inf": _report_ces_inf, "lorentz": _report_lorentz}.get(kind)
    if fn is None:
        raise SpecError(f"unknown report kind {kind!r}; expected one of {', '.join(REPORT_KINDS)}")
    return fn(X, kind, n_samples, seed)


def _require_lp(X: SpaceSpec, domain: str | None, kind: str):
    parts = _lp_parts(X)
    if parts is None or parts[2] != domain:
        where = "a sequence l^p(w)" if domain is None else f"L^p(w) on {domain}"
        raise SpecError(f"the {kind} report needs {where}")
    return parts


def _report_down(X, kind, n, seed):
    p, w, dom = _require_lp(X, "halfline", kind)
    alpha = _power_alpha(w)
    Xp = holder_conjugate_space(X)
    A, a_star = dilation_constant_A(X)
    B = hardy_constant(p, alpha if alpha is not None else math.nan)
    hyp = "verified: C and dilations bounded (power weight)" if alpha is not None else "hypotheses unverified"

    def one(i):
        rng = sample_rng(seed, i)
        f = _function_sample(rng, "halfline", i)
        return down_norm(f, Xp).value / N.norm(f, Cesaro(X)).value

    ratios = pmap(one, range(n))
    return DualityReport(X.to_sexpr(), kind, n, ratios, (1 / B, A),
                         {"A": _const(A, f"min over a in [1.1,100] of (a/ln a)||sigma_1/a||, a*={a_star:.6g}"),
                          "B": _const(B, "||C|| = (1-alpha-1/p)^-1")},
                         hyp, quantity="down_norm(f, X')/||f||_CX")


def _report_halfline(X, kind, n, seed):
    p, w, dom = _require_lp(X, "halfline", kind)
    alpha = _power_alpha(w)
    Xp = holder_conjugate_space(X)
    A, a_star = dilation_constant_A(X)
    B = hardy_constant(p, alpha if alpha is not None else math.nan)
    hyp = "verified: C and dilations bounded (power weight)" if alpha is not None else "hypotheses unverified"

    def one(i):
        rng = sample_rng(seed, i)
        g = _function_sample(rng, "halfline", i)
        return cesaro_dual_norm(g, X).value / N.norm(g, Tilde(Xp)).value

    ratios = pmap(one, range(n))
    return DualityReport(X.to_sexpr(), kind, n, ratios, (1 / B, A),
                         {"A": _const(A, f"min over a in [1.1,100] of (a/ln a)||sigma_1/a||, a*={a_star:.6g}"),
                          "B": _const(B, "||C|| = (1-alpha-1/p)^-1")},
                         hyp, quantity="||g||_(CX)'/||g~||_X'")


def _report_unit(X, kind, n, seed):
    p, w, dom = _require_lp(X, "unit", kind)
    alpha = _power_alpha(w)
    if alpha is None:
        raise SpecError("the unit report supports power weights only")
    Xp = holder_conjugate_space(X)
    Xpw = Weighted(Xp, OneMinusXInv())
    if alpha == 0:
        D = 2 * (conjugate(p) + p) if p > 1 else math.inf
        dprov = "2(||C|| + ||C*||) = 2(p' + p)"
        hyp = "verified: symmetric space with the Fatou property"
    else:
        D = unit_weighted_constant(p, alpha)
        dprov = "C_{p,alpha} for power-weighted spaces"
        hyp = "power weight (extension beyond symmetric spaces)"
    M = E
    constants = {"D": _const(D, dprov),
                 "M": _const(M, "derived from proof: ||T|| <= e on both endpoints, interpolation constant 1")}
    # C: X(1-x) -> X gives the lower end, the T-interpolation bound the upper
    lo, hi = 1 / D, M

    def one(i):
        rng = sample_rng(seed, i)
        g = _function_sample(rng, "unit", i, unit_vanish=True)
        return cesaro_dual_norm(g, X).value / N.norm(g, Tilde(Xpw)).value

    ratios = pmap(one, range(n))
    return DualityReport(X.to_sexpr(), kind, n, ratios, (lo, hi), constants, hyp,
                         quantity="||g||_(CX)'/||g~||_X'(1/(1-x))")


def _report_sequence(X, kind, n, seed):
    p, w, dom = _require_lp(X, None, kind)
    alpha = _power_alpha(w)
    if alpha is None:
        raise SpecError("the sequence report supports power weights")
    q = conjugate(p)
    if alpha == 0:
        B, bprov = conjugate(p), "||C|| = p' (discrete Hardy)"
    else:
        B = p * (1 - alpha) * p / ((1 - alpha) * p - 1)
        bprov = "||C|| <= p(1-alpha)p/((1-alpha)p-1)"
    # sigma_3 on X' = l^{p'}(n^{-alpha})
    beta = -alpha
    s3 = (3 ** (1 / q) if q != math.inf else 1.0) * max(1.0, 3 ** beta)
    D = 4 * s3
    Xp = holder_conjugate_space(X)

    def one(i):
        rng = sample_rng(seed, i)
        g = random_sequence(rng, 64, family_for(i))
        return cesaro_dual_norm(g, X).value / N.seq_norm(g, SeqTilde(Xp)).value

    ratios = pmap(one, range(n))
    return DualityReport(X.to_sexpr(), kind, n, ratios, (1 / B, D),
                         {"B": _const(B, bprov),
                          "D": _const(D, "4 * 3^{1/p'} max(1, 3^{-alpha}) bound on ||sigma_3||_{X'}")},
                         "verified: C bounded on X, sigma_3 bounded on X'", quantity="||g||_(CX)'/||g~||_X'")


def _report_ces_inf(X, kind, n, seed):
    parts = _lp_parts(X)
    if parts is None or parts[0] != 1 or parts[2] is None:
        raise SpecError("the ces-inf report takes X = L^1(w) (naming w); v = x/W(x)")
    _, w, dom = parts

    def one(i):
        rng = sample_rng(seed, i)
        g = _function_sample(rng, dom, i)
        return ces_inf_dual_norm(g, w).value / N.norm(g, Tilde(X)).value

    ratios = pmap(one, range(n))
    return DualityReport(X.to_sexpr(), kind, n, ratios, (1.0, 1.0),
                         {"isometry": _const(1.0, "isometric identification")},
                         "verified: W(x) finite for step weights", quantity="||g||_(Ces_inf,v)'/||g~||_L1(w)")


def lorentz_constants(phi) -> dict:
    c1, c2 = phi.c1(), phi.c2()
    return {"c1": c1, "c2": c2, "A": E, "lower": 1 / (E * c1), "upper": c2}


def _report_lorentz(X, kind, n, seed):
    if not isinstance(X, Lorentz):
        raise SpecError("the lorentz report takes a Lorentz space")
    phi = X.gauge
    k = lorentz_constants(phi)
    hyp = ("verified: c1, c2 finite" if math.isfinite(k["c1"]) and math.isfinite(k["c2"])
           else "hypotheses unverified: c1 or c2 infinite")
    Y = Lp(1.0, PhiOverT(phi), "halfline")

    def one(i):
        rng = sample_rng(seed, i)
        f = _function_sample(rng, "halfline", i)
        return N.norm(f, Cesaro(X)).value / N.norm(f, Y).value

    ratios = pmap(one, range(n))
    return DualityReport(X.to_sexpr(), kind, n, ratios, (k["lower"], k["upper"]),
                         {"c1": _const(k["c1"], "measured sup of int_0^t phi/s / phi(t)"),
                          "c2": _const(k["c2"], "measured sup of t int_t^oo phi/s^2 / phi(t)"),
                          "A": _const(E, "(a/ln a)||sigma_1/a|| at a=e with ||sigma|| <= 1")},
                         hyp, quantity="||f||_C(Lambda_phi)/||f||_L1(phi/t)")
