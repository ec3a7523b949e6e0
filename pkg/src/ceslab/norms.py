"""Norm evaluation for every space in the algebra.

Step functions and closed-form operator images are integrated cell by cell:
closed forms where the integrand is a power times a rational function,
adaptive Gauss-Legendre otherwise, and QUADPACK's algebraic-weight rule at
singular endpoints. Divergence is decided from endpoint exponents before any
integration is attempted.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special
from scipy.optimize import minimize_scalar

from .core import (Const, DomainMismatch, Explicit, Lorentz, Lp, Marcinkiewicz, OneMinusX,
                   OneMinusXInv, PhiOverT, Power, Product, Reciprocal, SeqCesaro, SeqLp, SeqTilde,
                   Sequence, SeqWeight, SpaceSpec, StepFunction, Tilde, UnsupportedSpec, Weight, Weighted,
                   Cesaro, ConcaveGauge, merge_points, space_domain)
from .operators import (PiecewiseFunction, as_piecewise, cesaro, decreasing_rearrangement, majorant)

CLOSED = "closed_form"
QUAD = "quadrature"
OPT = "optimization"

RTOL = 1e-11
MAX_DEPTH = 60

_GL20 = np.polynomial.legendre.leggauss(20)
_GL40 = np.polynomial.legendre.leggauss(40)


@dataclass(frozen=True)
class NormValue:
    value: float
    method: str = CLOSED
    error_bound: float = 0.0
    bracket: tuple | None = None
    witness: object = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "error_bound", float(self.error_bound))

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)

    def to_dict(self) -> dict:
        d = {"value": _jsonable(self.value), "method": self.method, "error_bound": _jsonable(self.error_bound)}
        if self.bracket is not None:
            d["bracket"] = [_jsonable(b) for b in self.bracket]
        return d


def _jsonable(x: float):
    if math.isinf(x):
        return "inf"
    return float(x)


INF = NormValue(math.inf, CLOSED, 0.0)


# ---------------------------------------------------------------------------
# integration primitives
# ---------------------------------------------------------------------------


def _gl(fn, a, b, rule):
    x, w = rule
    h = 0.5 * (b - a)
    return h * float(np.dot(w, fn(a + h * (x + 1.0))))


def adaptive_gl(fn, a: float, b: float, rtol: float = RTOL, max_depth: int = MAX_DEPTH,
                max_intervals: int = 20000) -> tuple:
    """Gauss-Legendre 20 vs 40 with bisection; geometric splits on wide ranges.

    A subinterval is accepted when its error estimate is below ``rtol`` times
    its own value or times its share of the whole-range estimate.
    """
    total, err = 0.0, 0.0
    whole = abs(_gl(fn, a, b, _GL40))
    span = b - a
    stack = [(a, b, 0)]
    count = 0
    while stack:
        lo, hi, depth = stack.pop()
        count += 1
        i20, i40 = _gl(fn, lo, hi, _GL20), _gl(fn, lo, hi, _GL40)
        e = abs(i40 - i20)
        floor = rtol * whole * (hi - lo) / span
        if e <= rtol * abs(i40) or e <= floor or depth >= max_depth or count > max_intervals:
            total += i40
            err += e
            continue
        mid = math.sqrt(lo * hi) if lo > 0 and hi / lo > 4 else 0.5 * (lo + hi)
        stack.append((lo, mid, depth + 1))
        stack.append((mid, hi, depth + 1))
    return total, err


def _quad_alg(fn, a, b, ea, eb) -> tuple:
    """``int_a^b fn`` where ``fn ~ (x-a)^ea (b-x)^eb`` at the ends."""
    def smooth(x):
        with np.errstate(all="ignore"):
            return float(fn(np.array([x]))[0]) / ((x - a) ** ea * (b - x) ** eb)

    return _quiet_quad(smooth, a, b, 1e-12, weight="alg", wvar=(ea, eb))


def _quiet_quad(fn, a, b, rtol, **kw) -> tuple:
    """``integrate.quad`` that folds roundoff warnings into the error bound."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        val, err = integrate.quad(fn, a, b, epsabs=0.0, epsrel=rtol, limit=400, **kw)
    if caught:
        err = max(err, 1e-10 * abs(val))
    return val, err


def _int_pow(e: float, lo: float, hi: float) -> float:
    """``int_lo^hi x^e dx`` (``lo`` may be 0 when ``e > -1``)."""
    if e == -1:
        return math.log(hi / lo)
    return (hi ** (e + 1) - lo ** (e + 1)) / (e + 1)


def _power_form(w: Weight, lo: float, hi: float):
    """``(K, alpha)`` with ``w = K x^alpha`` on ``(lo, hi)``, or None."""
    if isinstance(w, Power):
        return 1.0, w.alpha
    if isinstance(w, Const):
        return w.c, 0.0
    if isinstance(w, (Explicit, SeqWeight)):
        return float(w(np.array(0.5 * (lo + hi)) if not math.isinf(hi) else np.array(lo + 1.0))), 0.0
    if isinstance(w, Product):
        K, a = 1.0, 0.0
        for f in w.factors:
            pf = _power_form(f, lo, hi)
            if pf is None:
                return None
            K, a = K * pf[0], a + pf[1]
        return K, a
    if isinstance(w, Reciprocal):
        pf = _power_form(w.inner, lo, hi)
        return None if pf is None else (1.0 / pf[0], -pf[1])
    return None


def _one_minus_x_power(w: Weight):
    """``alpha`` when ``w = (1-x) x^alpha``, else None."""
    if not isinstance(w, Product) or len(w.factors) != 2:
        return None
    kinds = {type(f): f for f in w.factors}
    if set(kinds) == {OneMinusX, Power}:
        return kinds[Power].alpha
    return None


def _weight_pow_integral(w: Weight, p: float, lo: float, hi: float):
    """``int_lo^hi w^p`` in closed form, or None."""
    pf = _power_form(w, lo, hi)
    if pf is not None:
        K, a = pf
        return K ** p * _int_pow(a * p, lo, hi)
    if isinstance(w, OneMinusXInv):
        if hi >= 1:
            return math.inf
        if p == 1:
            return math.log((1 - lo) / (1 - hi))
        return ((1 - hi) ** (1 - p) - (1 - lo) ** (1 - p)) / (p - 1)
    if isinstance(w, OneMinusX):
        return ((1 - lo) ** (p + 1) - (1 - hi) ** (p + 1)) / (p + 1)
    beta_form = _one_minus_x_power(w)
    if beta_form is not None and beta_form * p > -1 and hi <= 1:
        a, b = beta_form * p + 1, p + 1
        return special.beta(a, b) * (special.betainc(a, b, hi) - special.betainc(a, b, lo))
    if isinstance(w, PhiOverT) and p == 1:
        return w.gauge.int_phi_over_t(lo, hi)
    return None


# ---------------------------------------------------------------------------
# Lp(w) norms of step functions and closed-form images
# ---------------------------------------------------------------------------


def _as_pw(g) -> PiecewiseFunction:
    return as_piecewise(g) if isinstance(g, StepFunction) else g


def _g_exponent_at(g: PiecewiseFunction, i: int, s: float) -> float:
    """Local exponent of cell ``i`` of ``g`` at its left end ``s`` (only 0 is special)."""
    if s == 0.0 and (g.c1[i] != 0 or g.c2[i] != 0):
        return -1.0
    return 0.0


def _log_singular(g: PiecewiseFunction, i: int, s: float) -> bool:
    return s == 0.0 and g.c3[i] != 0


def _merged_cells(g: PiecewiseFunction, w: Weight) -> list:
    H = g.horizon
    extra = [s for s in tuple(w.singular_points()) + tuple(w.breakpoints()) if 0 < s < H]
    pts = merge_points(list(g.bp) + extra, H)
    pts[-1] = H
    out = []
    for lo, hi in zip(pts[:-1], pts[1:]):
        i = int(np.clip(np.searchsorted(g.bp, 0.5 * (lo + hi), side="right") - 1, 0, g.n_cells - 1))
        out.append((lo, hi, i))
    return out


def _cell_integral(g: PiecewiseFunction, i: int, w: Weight, p: float, lo: float, hi: float) -> tuple:
    """``(value, error, closed)`` of ``int_lo^hi |g_i w|^p``."""
    sing = set(w.singular_points())
    e_lo = p * ((w.local_exponent(lo, +1) if lo in sing else 0.0) + _g_exponent_at(g, i, lo))
    e_hi = p * (w.local_exponent(hi, -1) if hi in sing else 0.0)
    if e_lo <= -1 or e_hi <= -1:
        return math.inf, 0.0, True
    b, a = g.c0[i], g.c1[i]
    rational = g.c2[i] == 0 and g.c3[i] == 0
    if rational and a == 0:
        wi = _weight_pow_integral(w, p, lo, hi)
        if wi is not None:
            return abs(b) ** p * wi, 0.0, True
    if rational and float(p).is_integer():
        pf = _power_form(w, lo, hi)
        if pf is not None:
            K, al = pf
            n = int(p)
            terms = [math.comb(n, k) * b ** (n - k) * a ** k * _int_pow(al * p - k, lo, hi) for k in range(n + 1)]
            val = math.fsum(terms) * K ** p
            scale = math.fsum(abs(t) for t in terms) * K ** p
            same_sign = (b + a / lo if lo > 0 else b) * (b + a / hi) >= 0
            if same_sign and val >= 0 and scale <= 1e4 * max(val, 1e-300):
                return val, 0.0, True

    def fn(x):
        with np.errstate(all="ignore"):
            return np.abs(g.cell_eval(i, x) * w(x)) ** p

    # vanishing ends need no special weight
    ea, eb = min(e_lo, 0.0), min(e_hi, 0.0)
    if ea != 0 or eb != 0 or _log_singular(g, i, lo):
        val, err = _quad_alg(fn, lo, hi, ea, eb)
    else:
        val, err = adaptive_gl(fn, lo, hi)
    return val, err, False


def _tail_integral(g: PiecewiseFunction, w: Weight, p: float) -> tuple:
    """``int_H^oo |g w|^p`` for the analytic ``(t1 + t2 ln(x/H))/x`` tail."""
    H = g.horizon
    t1, t2 = g.t1, g.t2
    pts = sorted(s for s in set(w.breakpoints()) | set(w.singular_points()) if s > H)
    starts = [H] + pts
    total, err, closed = 0.0, 0.0, True

    def fn(x):
        with np.errstate(all="ignore"):
            return np.abs(g.tail_eval(x) * w(x)) ** p

    sing = set(w.singular_points())
    for lo, hi in zip(starts[:-1], starts[1:]):
        e_lo = p * (w.local_exponent(lo, +1) if lo in sing else 0.0)
        e_hi = p * (w.local_exponent(hi, -1) if hi in sing else 0.0)
        if e_lo <= -1 or e_hi <= -1:
            return math.inf, 0.0, True
        v, e = (_quad_alg(fn, lo, hi, e_lo, e_hi) if (e_lo or e_hi) else adaptive_gl(fn, lo, hi))
        total, err, closed = total + v, err + e, False
    L = starts[-1]
    beta = p * (w.exponent_at_infinity() - 1.0)
    if beta >= -1:
        return math.inf, 0.0, True
    pf = _power_form(w, L, math.inf)
    if pf is not None and (t2 == 0 or float(p).is_integer()):
        K, al = pf
        s = -(p * (al - 1.0) + 1.0)  # int_L^oo x^{-s-1} dx = L^{-s}/s
        if t2 == 0:
            return total + (t1 * K) ** p * L ** (-s) / s, err, closed
        # x = H e^u, integrand (t1 + t2 u)^p H^{-s} e^{-s u} on u >= ln(L/H)
        u0 = math.log(L / H)
        n = int(p)
        acc = 0.0
        for k in range(n + 1):
            # int_{u0}^oo u^k e^{-s u} du = Gamma(k+1, s u0) / s^{k+1}
            inc = special.gammaincc(k + 1, s * u0) * math.gamma(k + 1) / s ** (k + 1) if u0 > 0 else \
                math.gamma(k + 1) / s ** (k + 1)
            acc += math.comb(n, k) * t1 ** (n - k) * t2 ** k * inc
        return total + K ** p * H ** (-s) * acc, err, closed
    v, e = _quiet_quad(lambda x: float(fn(np.array([x]))[0]), L, math.inf, 1e-11)
    return total + v, err + e, False


def _sup_cell(g: PiecewiseFunction, i: int, w: Weight, lo: float, hi: float) -> tuple:
    """``(sup |g_i w| on (lo, hi), exact?)``."""
    sing = set(w.singular_points())
    for s, side in ((lo, +1), (hi, -1)):
        e = (w.local_exponent(s, side) if s in sing else 0.0) + (_g_exponent_at(g, i, s) if side > 0 else 0.0)
        if e < 0 or (side > 0 and _log_singular(g, i, s)):
            return math.inf, True

    def fn(x):
        with np.errstate(all="ignore"):
            return np.abs(g.cell_eval(i, x) * w(x))

    # one-sided limits at singular points and at jumps of the weight
    eps = 1e-12 * max(hi, 1.0)
    jumps = sing | set(w.breakpoints())
    ends = np.array([lo if lo not in jumps else lo + min(eps, 0.5 * (hi - lo)),
                     hi if hi not in jumps else hi - min(eps, 0.5 * (hi - lo))])
    vals = np.nan_to_num(fn(ends), nan=0.0, posinf=math.inf)
    rational_step = g.c1[i] == 0 and g.c2[i] == 0 and g.c3[i] == 0
    if rational_step and w.is_monotone():
        return float(np.max(vals)), True
    grid = np.linspace(lo, hi, 257)[1:-1]
    gv = fn(grid)
    best = max(float(np.max(vals)), float(np.max(gv)))
    k = int(np.argmax(gv))
    a, b = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    r = minimize_scalar(lambda x: -float(fn(np.array([x]))[0]), bounds=(a, b), method="bounded",
                        options={"xatol": 1e-14 * max(1.0, b)})
    return max(best, -float(r.fun)), False


def _sup_tail(g: PiecewiseFunction, w: Weight) -> tuple:
    H = g.horizon
    e = w.exponent_at_infinity() - 1.0
    if e > 0 or (e == 0 and g.t2 > 0):
        return math.inf, True

    def fn(x):
        with np.errstate(all="ignore"):
            return np.abs(g.tail_eval(x) * w(x))

    grid = np.geomspace(H, H * 1e12, 4001)
    gv = np.nan_to_num(fn(grid), nan=0.0)
    k = int(np.argmax(gv))
    best = float(gv[k])
    if 0 < k < len(grid) - 1:
        r = minimize_scalar(lambda u: -float(fn(np.array([math.exp(u)]))[0]),
                            bounds=(math.log(grid[k - 1]), math.log(grid[k + 1])), method="bounded")
        best = max(best, -float(r.fun))
    lim = float(fn(np.array([H * 1e300]))[0]) if e == 0 else 0.0
    return max(best, lim), False


def lp_norm(g, w: Weight, p: float) -> NormValue:
    """``||g w||_p`` for a step function or closed-form image ``g``."""
    g = _as_pw(g)
    cells = [c for c in _merged_cells(g, w) if not g.is_cell_zero(c[2])]
    if p == math.inf:
        best, exact = 0.0, True
        for lo, hi, i in cells:
            v, ex = _sup_cell(g, i, w, lo, hi)
            best, exact = max(best, v), exact and ex
        if g.has_tail:
            v, ex = _sup_tail(g, w)
            best, exact = max(best, v), exact and ex
        if math.isinf(best):
            return INF
        return NormValue(best, CLOSED if exact else OPT, 0.0 if exact else 1e-12 * best)
    total, err, closed = 0.0, 0.0, True
    for lo, hi, i in cells:
        v, e, c = _cell_integral(g, i, w, p, lo, hi)
        if math.isinf(v):
            return INF
        total, err, closed = total + v, err + e, closed and c
    if g.has_tail:
        v, e, c = _tail_integral(g, w, p)
        if math.isinf(v):
            return INF
        total, err, closed = total + v, err + e, closed and c
    value = total ** (1.0 / p)
    rel = err / total if total > 0 else 0.0
    if not closed:
        rel = max(rel, 1e-12)
    return NormValue(value, CLOSED if closed else QUAD, value * rel / p)


# ---------------------------------------------------------------------------
# Lorentz and Marcinkiewicz
# ---------------------------------------------------------------------------


def _check_halfline(f):
    if f.domain.is_unit:
        raise DomainMismatch("Lorentz and Marcinkiewicz spaces live on the half-line")


def lorentz_norm(f, phi: ConcaveGauge) -> NormValue:
    """``int f* dphi``; exact for step functions, layer-cake quadrature for Cesaro images."""
    _check_halfline(f)
    if isinstance(f, PiecewiseFunction):
        return _lorentz_layer_cake(f, phi)
    prof = decreasing_rearrangement(f)
    s = prof.fstar
    jumps = np.diff(phi(s.bp))
    return NormValue(float(math.fsum(s.vals * jumps)), CLOSED, 0.0)


def _distribution(g: PiecewiseFunction, lam):
    """``|{g > lam}|`` for ``g = b + a/x`` cells and ``t1/x`` tail."""
    lam = np.asarray(lam, dtype=float)
    d = np.zeros_like(lam)
    for i in range(g.n_cells):
        lo, hi = g.bp[i], g.bp[i + 1]
        b, a = g.c0[i], g.c1[i]
        if a == 0:
            d += np.where(b > lam, hi - lo, 0.0)
        elif a > 0:
            with np.errstate(divide="ignore"):
                cut = np.where(lam > b, a / (lam - b), np.inf)
            d += np.clip(cut, lo, hi) - lo
        else:
            with np.errstate(divide="ignore"):
                cut = np.where(lam < b, -a / (b - lam), np.inf)
            d += hi - np.clip(cut, lo, hi)
    if g.t1 > 0:
        with np.errstate(divide="ignore"):
            d += np.maximum(0.0, g.t1 / lam - g.horizon)
    return d


def _lorentz_layer_cake(g: PiecewiseFunction, phi: ConcaveGauge) -> NormValue:
    if not g.is_rational():
        raise UnsupportedSpec("Lorentz norms of images beyond C of a step function")
    if g.t1 > 0 and phi.exponent_at_infinity() >= 1:
        return INF
    kinks = []
    for i in range(g.n_cells):
        lo, hi = g.bp[i], g.bp[i + 1]
        for x in (lo, hi):
            if x > 0:
                kinks.append(float(g.cell_eval(i, x)))
        kinks.append(float(g.c0[i]))
    if g.t1 > 0:
        kinks.append(g.t1 / g.horizon)
    kinks = [k for k in kinks if k > 0 and math.isfinite(k)]
    if not kinks:
        return NormValue(0.0, CLOSED, 0.0)
    top = max(kinks)
    # levels where d(lam) crosses a knot of phi (d is nonincreasing)
    for tj in phi.ts[1:]:
        lo, hi = 0.0, top
        if _distribution(g, np.array([hi]))[0] > tj:
            continue
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if _distribution(g, np.array([max(mid, 1e-300)]))[0] > tj:
                lo = mid
            else:
                hi = mid
        if 0 < hi < top:
            kinks.append(hi)
    kinks = np.unique(kinks)

    def fn(lam):
        return phi(_distribution(g, np.maximum(lam, 1e-300)))

    total, err = 0.0, 0.0
    lo = 0.0
    for hi in kinks:
        if lo == 0.0 and g.t1 > 0:
            # phi(d(lam)) ~ lam^-th near 0; lam = hi s^m with m = 1/(1-th) removes it
            th = phi.exponent_at_infinity()
            m = 1.0 / (1.0 - th)
            v, e = adaptive_gl(lambda s_: fn(hi * s_ ** m) * hi * m * s_ ** (m - 1), 0.0, 1.0)
        else:
            v, e = adaptive_gl(fn, lo, hi)
        total, err, lo = total + v, err + e, hi
    return NormValue(total, QUAD, max(err, 1e-12 * total))


def marcinkiewicz_norm(f: StepFunction, phi: ConcaveGauge, starred: bool = False) -> NormValue:
    """``sup_t int_0^t f*/phi(t)``, or ``sup_t t f*(t)/phi(t)`` when starred; exact candidate enumeration."""
    _check_halfline(f)
    prof = decreasing_rearrangement(f)
    s = prof.fstar
    if not np.any(s.vals):
        return NormValue(0.0, CLOSED, 0.0)
    segs = phi.segments()
    if starred:
        # t/phi(t) is nondecreasing, so each cell's sup is its right-end limit
        ends = s.bp[1:]
        best = float(np.max(s.vals * ends / phi(ends)))
        return NormValue(best, CLOSED, 0.0)
    cands = set(s.bp[1:]) | set(phi.ts[1:])
    F = lambda t: prof.integral_to(t)
    for lo, hi, kind, k, th in segs:
        if kind != "pow":
            continue
        # on a cell of F* (slope v, intercept c) the ratio (c + v t)/(k t^th) peaks at th c/(v (1-th))
        for j in range(s.n_cells):
            a, b = max(lo, s.bp[j]), min(hi, s.bp[j + 1])
            if b <= a or s.vals[j] == 0:
                continue
            v = s.vals[j]
            c = F(s.bp[j]) - v * s.bp[j]
            den = v * (1 - th)
            # test a < t < b without dividing, since den can underflow
            if c > 0 and a * den < th * c < b * den:
                cands.add(th * c / den)
    cands = np.array(sorted(c for c in cands if c > 0))
    ratios = np.array([F(t) for t in cands]) / phi(cands)
    best = float(np.max(ratios))
    if phi.head is None:
        best = max(best, float(s.vals[0]) / segs[0][3])
    return NormValue(best, CLOSED, 0.0)


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


def _check_domain(f, X: SpaceSpec):
    kind = space_domain(X)
    if kind is None:
        raise DomainMismatch("function given for a sequence space")
    if f.domain.kind != kind:
        raise DomainMismatch(f"function on {f.domain.kind}, space on {kind}")


def _step_weight(w: Weight) -> bool:
    return isinstance(w, (Const, Explicit)) or (isinstance(w, Product) and all(_step_weight(x) for x in w.factors))


def _times_weight(f: StepFunction, w: Weight) -> StepFunction:
    pts = [t for t in w.breakpoints() if 0 < t < f.horizon]
    g = f.refine(pts)
    mids = 0.5 * (g.bp[:-1] + g.bp[1:])
    return StepFunction.from_arrays(g.domain, g.bp, g.vals * w(mids))


def _fnorm(g, X: SpaceSpec) -> NormValue:
    if isinstance(X, Lp):
        return lp_norm(g, X.weight, X.p)
    if isinstance(X, Weighted):
        if isinstance(X.inner, Lp):
            return lp_norm(g, Product((X.inner.weight, X.weight)), X.inner.p)
        if isinstance(g, StepFunction) and _step_weight(X.weight):
            return _fnorm(_times_weight(g, X.weight), X.inner)
        raise UnsupportedSpec(f"cannot weight {X.inner.to_sexpr()} by {X.weight.to_sexpr()}")
    if isinstance(X, Cesaro):
        src = g.abs() if isinstance(g, StepFunction) else g
        return _fnorm(cesaro(src), X.inner)
    if isinstance(X, Tilde):
        if not isinstance(g, StepFunction):
            raise UnsupportedSpec("majorant of a non-step function")
        return _fnorm(majorant(g), X.inner)
    if isinstance(X, Lorentz):
        return lorentz_norm(g, X.gauge)
    if isinstance(X, Marcinkiewicz):
        if not isinstance(g, StepFunction):
            raise UnsupportedSpec("Marcinkiewicz norm of a non-step function")
        return marcinkiewicz_norm(g, X.gauge, X.starred)
    raise UnsupportedSpec(f"no norm route for {X.to_sexpr()}")


def _pow2_exponent(vals) -> int:
    """Binary exponent of ``max |vals|`` when it is far from 1, else 0."""
    top = float(np.max(np.abs(vals), initial=0.0))
    if top == 0 or not math.isfinite(top):
        return 0
    k = math.frexp(top)[1]
    return k if abs(k) > 64 else 0


def _rescaled(nv: NormValue, k: int) -> NormValue:
    br = None if nv.bracket is None else tuple(math.ldexp(x, k) for x in nv.bracket)
    return NormValue(math.ldexp(nv.value, k), nv.method, math.ldexp(nv.error_bound, k), br, nv.witness)


def norm(f, X: SpaceSpec) -> NormValue:
    """``||f||_X`` for a StepFunction (or closed-form image) or a Sequence.

    Inputs with very large or very small entries are rescaled by a power of two
    first, so that ``|f|^p`` neither overflows nor underflows.
    """
    if isinstance(f, Sequence):
        return seq_norm(f, X)
    _check_domain(f, X)
    k = _pow2_exponent(f.vals) if isinstance(f, StepFunction) else 0
    if k:
        g = StepFunction(f.domain, f.breakpoints, tuple(float(v) for v in np.ldexp(f.vals, -k)))
        return _rescaled(_fnorm(g, X), k)
    return _fnorm(f, X)


# ---------------------------------------------------------------------------
# sequences
# ---------------------------------------------------------------------------


def _tail_weight_sum(w: Weight, N: int, p: float) -> float:
    """``sum_{n>N} (w_n/n)^p`` (``sup`` when ``p`` is infinite); Hurwitz zeta past the explicit part."""
    M, K, beta = w.seq_tail()
    M2 = max(M, N)
    idx = np.arange(N + 1, M2 + 1, dtype=float)
    mid = w.seq(idx) / idx if idx.size else np.zeros(0)
    if p == math.inf:
        if beta > 1:
            return math.inf
        return float(max(mid.max() if mid.size else 0.0, K * (M2 + 1) ** (beta - 1)))
    s = p * (1 - beta)
    if s <= 1:
        return math.inf
    return math.fsum(mid ** p) + K ** p * float(special.zeta(s, M2 + 1))


def _batch_lp(head: np.ndarray, S: np.ndarray, p: float, w: Weight) -> np.ndarray:
    N = head.shape[1]
    idx = np.arange(1, N + 1, dtype=float)
    body = np.abs(head) * (w.seq(idx) if N else np.zeros(0))
    has_tail = bool(np.any(S))
    tail = _tail_weight_sum(w, N, p) if has_tail else 0.0
    if p == math.inf:
        out = body.max(axis=1) if N else np.zeros(len(S))
        if has_tail:
            with np.errstate(invalid="ignore"):
                out = np.maximum(out, np.where(S > 0, S * tail, 0.0))
        return out
    tot = np.sum(body ** p, axis=1)
    if has_tail:
        with np.errstate(invalid="ignore"):
            tot = tot + np.where(S > 0, S ** p * tail, 0.0)
    return tot ** (1.0 / p)


def _bnorm(head: np.ndarray, S: np.ndarray, X: SpaceSpec) -> np.ndarray:
    if isinstance(X, SeqLp):
        return _batch_lp(head, S, X.p, X.weight)
    if isinstance(X, Weighted):
        if isinstance(X.inner, SeqLp):
            return _batch_lp(head, S, X.inner.p, Product((X.inner.weight, X.weight)))
        if np.any(S):
            raise UnsupportedSpec("weighting a sequence with a 1/n tail")
        n = np.arange(1, head.shape[1] + 1, dtype=float)
        return _bnorm(head * X.weight.seq(n), S, X.inner)
    if isinstance(X, SeqCesaro):
        if np.any(S):
            raise UnsupportedSpec("Cesaro image of a sequence with a 1/n tail")
        a = np.abs(head)
        n = np.arange(1, head.shape[1] + 1, dtype=float)
        return _bnorm(np.cumsum(a, axis=1) / n, a.sum(axis=1), X.inner)
    if isinstance(X, SeqTilde):
        a = np.abs(head)
        top = (S / (head.shape[1] + 1))[:, None]
        m = np.maximum(np.maximum.accumulate(a[:, ::-1], axis=1)[:, ::-1], top)
        return _bnorm(m, S, X.inner)
    raise UnsupportedSpec(f"no sequence norm route for {X.to_sexpr()}")


def seq_norm_batch(xs, X: SpaceSpec) -> np.ndarray:
    """Norms of the rows of ``xs`` (each row a finitely supported sequence)."""
    if not X.is_sequence:
        raise DomainMismatch("sequences given for a function space")
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    # rows are rescaled by powers of two so |x|^p stays in range
    k = np.array([_pow2_exponent(r) for r in xs], dtype=int)
    return np.ldexp(_bnorm(np.ldexp(xs, -k[:, None]), np.zeros(xs.shape[0]), X), k)


def seq_norm(x: Sequence, X: SpaceSpec) -> NormValue:
    """Exact; tails of Cesaro images are summed with the Hurwitz zeta function."""
    if not X.is_sequence:
        raise DomainMismatch("sequence given for a function space")
    v = float(seq_norm_batch(x.arr[None, :] if len(x) else np.zeros((1, 0)), X)[0])
    if math.isinf(v):
        return INF
    return NormValue(v, CLOSED, 4e-16 * v * max(len(x), 1))
