"""Exact data types: domains, step functions, sequences, weights, gauges and spaces.

Everything here is immutable. Step functions are the only "functions" the
library accepts as input; operator images that leave the class of step
functions live in :mod:`ceslab.operators`.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy.optimize import brentq, minimize_scalar

UNIT = "unit"
HALFLINE = "halfline"

MERGE_RTOL = 1e-14


class SpecError(ValueError):
    """Malformed space/weight description or invalid parameters."""


class DomainMismatch(ValueError):
    """Function and space live on different domains."""


class UnsupportedSpec(NotImplementedError):
    """The norm engine has no evaluation route for this combination."""


class Undecidable(RuntimeError):
    """No integrability analysis is available for the given space."""


# ---------------------------------------------------------------------------
# Domain
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Domain:
    kind: str
    horizon: float = 1.0

    def __post_init__(self):
        if self.kind not in (UNIT, HALFLINE):
            raise SpecError(f"unknown domain kind {self.kind!r}")
        if not (self.horizon > 0 and math.isfinite(self.horizon)):
            raise SpecError("horizon must be positive and finite")
        if self.kind == UNIT and self.horizon != 1.0:
            raise SpecError("unit interval has horizon 1")

    @classmethod
    def unit(cls) -> "Domain":
        return cls(UNIT, 1.0)

    @classmethod
    def halfline(cls, horizon: float = 1.0) -> "Domain":
        return cls(HALFLINE, float(horizon))

    @property
    def is_unit(self) -> bool:
        return self.kind == UNIT

    def to_dict(self) -> dict:
        return {"kind": self.kind, "horizon": self.horizon}

    @classmethod
    def from_dict(cls, d: dict) -> "Domain":
        return cls(d["kind"], float(d.get("horizon", 1.0)))


# ---------------------------------------------------------------------------
# Step functions and their partial integrals
# ---------------------------------------------------------------------------


def merge_points(points: Iterable[float], scale: float) -> np.ndarray:
    """Sorted unique points with near-duplicates (closer than 1e-14*scale) merged."""
    pts = np.unique(np.asarray(list(points), dtype=float))
    if pts.size < 2:
        return pts
    keep = np.concatenate([[True], np.diff(pts) > MERGE_RTOL * scale])
    return pts[keep]


@dataclass(frozen=True, eq=True)
class StepFunction:
    """Piecewise constant function on ``[0, horizon]``, zero beyond it.

    ``values[i]`` holds on the cell ``[breakpoints[i], breakpoints[i+1])``.
    """

    domain: Domain
    breakpoints: tuple
    values: tuple

    def __post_init__(self):
        bp = tuple(float(b) for b in self.breakpoints)
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)
        if len(bp) < 2 or len(vals) != len(bp) - 1:
            raise SpecError("need len(values) == len(breakpoints) - 1 >= 1")
        if bp[0] != 0.0 or bp[-1] != self.domain.horizon:
            raise SpecError("breakpoints must run from 0 to the domain horizon")
        if any(b <= a for a, b in zip(bp, bp[1:])):
            raise SpecError("breakpoints must be strictly increasing")
        if not all(math.isfinite(v) for v in vals):
            raise SpecError("values must be finite")

    # constructors -----------------------------------------------------

    @classmethod
    def from_arrays(cls, domain: Domain, breakpoints, values) -> "StepFunction":
        return cls(domain, tuple(np.asarray(breakpoints, float)), tuple(np.asarray(values, float)))

    @classmethod
    def constant(cls, c: float, domain: Domain) -> "StepFunction":
        return cls(domain, (0.0, domain.horizon), (float(c),))

    @classmethod
    def indicator(cls, a: float, b: float, domain: Domain, height: float = 1.0) -> "StepFunction":
        """``height * chi_[a, b)``; ``b`` is clipped to the horizon."""
        H = domain.horizon
        b = min(b, H)
        if not 0 <= a < b:
            raise SpecError("indicator needs 0 <= a < b")
        pts = merge_points([0.0, a, b, H], H)
        mids = 0.5 * (pts[:-1] + pts[1:])
        vals = np.where((mids >= a) & (mids < b), height, 0.0)
        return cls.from_arrays(domain, pts, vals)

    # array views ------------------------------------------------------

    @property
    def bp(self) -> np.ndarray:
        return np.asarray(self.breakpoints)

    @property
    def vals(self) -> np.ndarray:
        return np.asarray(self.values)

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.bp)

    @property
    def horizon(self) -> float:
        return self.domain.horizon

    @property
    def n_cells(self) -> int:
        return len(self.values)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.bp, x, side="right") - 1
        idx = np.clip(idx, 0, self.n_cells - 1)
        out = self.vals[idx]
        return np.where((x < 0) | (x > self.horizon), 0.0, out)

    # algebra ----------------------------------------------------------

    def abs(self) -> "StepFunction":
        return StepFunction(self.domain, self.breakpoints, tuple(abs(v) for v in self.values))

    def scale(self, c: float) -> "StepFunction":
        return StepFunction(self.domain, self.breakpoints, tuple(c * v for v in self.values))

    def refine(self, points: Iterable[float]) -> "StepFunction":
        pts = merge_points(list(self.breakpoints) + [p for p in points if 0 < p < self.horizon], self.horizon)
        pts[-1] = self.horizon
        mids = 0.5 * (pts[:-1] + pts[1:])
        return StepFunction.from_arrays(self.domain, pts, self(mids))

    def _binary(self, other: "StepFunction", op) -> "StepFunction":
        if other.domain.kind != self.domain.kind:
            raise DomainMismatch("step functions on different domains")
        H = max(self.horizon, other.horizon)
        dom = Domain(self.domain.kind, H)
        pts = merge_points(self.breakpoints + other.breakpoints + (H,), H)
        mids = 0.5 * (pts[:-1] + pts[1:])
        return StepFunction.from_arrays(dom, pts, op(self(mids), other(mids)))

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __mul__(self, other):
        if isinstance(other, StepFunction):
            return self._binary(other, np.multiply)
        return self.scale(float(other))

    __rmul__ = __mul__

    def integral(self) -> float:
        return float(math.fsum(v * l for v, l in zip(self.values, self.lengths)))

    def simplify(self) -> "StepFunction":
        """Merge adjacent cells with equal values."""
        v = self.vals
        keep = np.concatenate([[True], v[1:] != v[:-1]])
        bp = np.concatenate([self.bp[:-1][keep], [self.horizon]])
        return StepFunction.from_arrays(self.domain, bp, v[keep])

    # serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        return {"domain": self.domain.to_dict(), "breakpoints": list(self.breakpoints),
                "values": list(self.values)}

    @classmethod
    def from_dict(cls, d: dict) -> "StepFunction":
        return cls(Domain.from_dict(d["domain"]), tuple(d["breakpoints"]), tuple(d["values"]))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, s: str) -> "StepFunction":
        return cls.from_dict(json.loads(s))


@dataclass(frozen=True)
class PiecewiseLinear:
    """Continuous piecewise linear function given by its knots; constant past the last knot."""

    knots: np.ndarray
    heights: np.ndarray

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.interp(x, self.knots, self.heights, left=0.0, right=self.heights[-1])


def partial_integral(f: StepFunction) -> PiecewiseLinear:
    """``F(x) = int_0^x f``, exact on the breakpoints (compensated summation)."""
    areas = f.vals * f.lengths
    heights = np.empty(f.n_cells + 1)
    heights[0] = 0.0
    acc = 0.0
    comp = 0.0
    for i, a in enumerate(areas):
        # Kahan summation keeps drift below an ulp per cell
        y = a - comp
        t = acc + y
        comp = (t - acc) - y
        acc = t
        heights[i + 1] = acc
    return PiecewiseLinear(f.bp.copy(), heights)


# ---------------------------------------------------------------------------
# Sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Sequence:
    """Finitely supported sequence ``(x_1, ..., x_n, 0, 0, ...)``."""

    entries: tuple = ()

    def __post_init__(self):
        e = [float(v) for v in self.entries]
        if not all(math.isfinite(v) for v in e):
            raise SpecError("sequence entries must be finite")
        while e and e[-1] == 0.0:
            e.pop()
        object.__setattr__(self, "entries", tuple(e))

    @property
    def arr(self) -> np.ndarray:
        return np.asarray(self.entries, dtype=float)

    def __len__(self):
        return len(self.entries)

    def padded(self, n: int) -> np.ndarray:
        out = np.zeros(max(n, len(self)))
        out[: len(self)] = self.entries
        return out

    def abs(self) -> "Sequence":
        return Sequence(tuple(abs(v) for v in self.entries))

    @classmethod
    def unit_vector(cls, k: int) -> "Sequence":
        return cls((0.0,) * (k - 1) + (1.0,))

    def to_dict(self) -> dict:
        return {"entries": list(self.entries)}

    @classmethod
    def from_dict(cls, d: dict) -> "Sequence":
        return cls(tuple(d["entries"]))


def load_input(obj) -> StepFunction | Sequence:
    """Decode a JSON document (str or dict) into a StepFunction or Sequence."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if "entries" in obj:
        return Sequence.from_dict(obj)
    return StepFunction.from_dict(obj)


# ---------------------------------------------------------------------------
# Concave gauges
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConcaveGauge:
    """Concave increasing ``phi`` with ``phi(0) = 0``.

    Piecewise linear through ``knots``; optionally the first segment is
    replaced by ``phi_1 (t/t_1)^head`` and the extension past the last knot by
    ``phi_n (t/t_n)^tail``. Without a tail exponent the last slope continues.
    """

    knots: tuple
    head: float | None = None
    tail: float | None = None

    def __post_init__(self):
        k = tuple((float(t), float(p)) for t, p in self.knots)
        object.__setattr__(self, "knots", k)
        if len(k) < 2 or k[0] != (0.0, 0.0):
            raise SpecError("gauge knots must start at (0, 0) and have at least two knots")
        ts = [t for t, _ in k]
        ps = [p for _, p in k]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise SpecError("gauge knots must be strictly increasing in t")
        if ps[1] <= 0 or any(b < a for a, b in zip(ps, ps[1:])):
            raise SpecError("gauge must be positive and nondecreasing")
        for th in (self.head, self.tail):
            if th is not None and not 0 < th < 1:
                raise SpecError("power exponents of a gauge must lie in (0, 1)")
        slopes = [(p1 - p0) / (t1 - t0) for (t0, p0), (t1, p1) in zip(k, k[1:])]
        if self.head is not None:
            slopes[0] = self.head * ps[1] / ts[1]  # left derivative at t_1
            if len(slopes) > 1 and slopes[1] > slopes[0] * (1 + 1e-12):
                raise SpecError("head power is not concave against the next segment")
        else:
            if any(b > a * (1 + 1e-12) + 1e-300 for a, b in zip(slopes, slopes[1:])):
                raise SpecError("gauge slopes must be nonincreasing")
        if self.head is not None and len(slopes) > 2:
            if any(b > a * (1 + 1e-12) for a, b in zip(slopes[1:], slopes[2:])):
                raise SpecError("gauge slopes must be nonincreasing")
        if self.tail is not None:
            tn, pn = k[-1]
            if self.tail * pn / tn > slopes[-1] * (1 + 1e-12):
                raise SpecError("tail power is not concave against the last segment")

    @property
    def ts(self) -> np.ndarray:
        return np.array([t for t, _ in self.knots])

    @property
    def phis(self) -> np.ndarray:
        return np.array([p for _, p in self.knots])

    def segments(self) -> list:
        """``(lo, hi, kind, a, b)``: kind 'lin' means a*t + b, 'pow' means a*t**b."""
        ts, ps = self.ts, self.phis
        segs = []
        for i in range(len(ts) - 1):
            if i == 0 and self.head is not None:
                segs.append((0.0, ts[1], "pow", ps[1] / ts[1] ** self.head, self.head))
            else:
                m = (ps[i + 1] - ps[i]) / (ts[i + 1] - ts[i])
                segs.append((ts[i], ts[i + 1], "lin", m, ps[i] - m * ts[i]))
        if self.tail is not None:
            segs.append((ts[-1], math.inf, "pow", ps[-1] / ts[-1] ** self.tail, self.tail))
        else:
            _, _, kind, a, b = segs[-1]
            if kind == "lin":
                segs.append((ts[-1], math.inf, "lin", a, b))
            else:
                m = b * ps[-1] / ts[-1]
                segs.append((ts[-1], math.inf, "lin", m, ps[-1] - m * ts[-1]))
        return segs

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for lo, hi, kind, a, b in self.segments():
            m = (t >= lo) & (t <= hi) if hi == math.inf else (t >= lo) & (t < hi)
            if kind == "lin":
                out = np.where(m, a * t + b, out)
            else:
                out = np.where(m, a * np.power(np.maximum(t, 0.0), b), out)
        return out

    def value(self, t: float) -> float:
        return float(self(np.array(t)))

    @property
    def final_slope(self) -> float:
        _, _, kind, a, _ = self.segments()[-1]
        return a if kind == "lin" else 0.0

    def exponent_at_zero(self) -> float:
        return self.head if self.head is not None else 1.0

    def exponent_at_infinity(self) -> float:
        if self.tail is not None:
            return self.tail
        return 1.0 if self.final_slope > 0 else 0.0

    # integrals of phi(s)/s and phi(s)/s^2 ----------------------------

    def _seg_int(self, seg, a, b, power):
        lo, hi, kind, p0, p1 = seg
        if b <= a:
            return 0.0
        if kind == "lin":
            m, c = p0, p1
            if power == 1:
                log_term = 0.0 if c == 0 else c * math.log(b / a)
                return m * (b - a) + log_term
            if b == math.inf:
                return math.inf if m > 0 else c / a
            if a == 0:
                return math.inf if m > 0 else (math.inf if c > 0 else 0.0)
            return m * math.log(b / a) + c * (1 / a - 1 / b)
        k, th = p0, p1
        if power == 1:
            if b == math.inf:
                return math.inf
            return k * (b ** th - a ** th) / th
        if a == 0:
            return math.inf
        tail = 0.0 if b == math.inf else b ** (th - 1)
        return k * (a ** (th - 1) - tail) / (1 - th)

    def int_phi_over_t(self, a: float, b: float) -> float:
        """``int_a^b phi(s)/s ds``."""
        return math.fsum(self._seg_int(s, max(a, s[0]), min(b, s[1]), 1)
                         for s in self.segments() if s[1] > a and s[0] < b)

    def int_phi_over_t2(self, a: float, b: float = math.inf) -> float:
        """``int_a^b phi(s)/s^2 ds`` (``b`` may be infinite)."""
        return math.fsum(self._seg_int(s, max(a, s[0]), min(b, s[1]), 2)
                         for s in self.segments() if s[1] > a and s[0] < b)

    def _sup_ratio(self, ratio, limit0, limitinf) -> float:
        ts = self.ts[1:]
        grid = np.unique(np.concatenate([np.geomspace(ts[0] * 1e-9, ts[-1] * 1e9, 400), ts]))
        vals = np.array([ratio(t) for t in grid])
        best = float(np.max(vals))
        i = int(np.argmax(vals))
        lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
        if hi > lo:
            r = minimize_scalar(lambda u: -ratio(math.exp(u)), bounds=(math.log(lo), math.log(hi)),
                                method="bounded", options={"xatol": 1e-12})
            best = max(best, -float(r.fun))
        return max(best, limit0, limitinf)

    def c1(self) -> float:
        """Smallest ``c`` with ``int_0^t phi(s)/s ds <= c phi(t)`` for all ``t``."""
        if self.exponent_at_infinity() == 0.0:
            return math.inf
        lim0 = 1 / self.head if self.head is not None else 1.0
        liminf = 1 / self.tail if self.tail is not None else 1.0
        return self._sup_ratio(lambda t: self.int_phi_over_t(0.0, t) / self.value(t), lim0, liminf)

    def c2(self) -> float:
        """Smallest ``c`` with ``int_t^oo phi(s)/s^2 ds <= c phi(t)/t`` for all ``t``."""
        if self.head is None or (self.tail is None and self.final_slope > 0):
            return math.inf
        lim0 = 1 / (1 - self.head)
        liminf = 1 / (1 - self.tail) if self.tail is not None else 1.0
        return self._sup_ratio(lambda t: t * self.int_phi_over_t2(t) / self.value(t), lim0, liminf)

    def dilation_norm(self, tau: float) -> float:
        """``sup_t phi(tau t)/phi(t)``: the norm of the dilation on the Lorentz space."""
        if tau >= 1:
            return tau  # concavity gives phi(tau t) <= tau phi(t), attained near 0 or infinity
        e0, einf = self.exponent_at_zero(), self.exponent_at_infinity()
        ts = self.ts[1:]
        grid = np.unique(np.concatenate([np.geomspace(ts[0] * 1e-9, ts[-1] * 1e9, 2000), ts, ts / tau]))
        r = self(tau * grid) / self(grid)
        return float(max(np.max(r), tau ** e0, tau ** einf))

    def to_sexpr(self) -> str:
        parts = " ".join(f"({_num(t)} {_num(p)})" for t, p in self.knots)
        if self.head is not None:
            parts += f" (head {_num(self.head)})"
        if self.tail is not None:
            parts += f" (tail {_num(self.tail)})"
        return f"(gauge {parts})"


# ---------------------------------------------------------------------------
# Weights
# ---------------------------------------------------------------------------


def _num(x: float) -> str:
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


class Weight:
    """A positive a.e. function on the domain, vectorized via ``__call__``."""

    def __call__(self, x):
        raise NotImplementedError

    def singular_points(self) -> tuple:
        return ()

    def breakpoints(self) -> tuple:
        return ()

    def local_exponent(self, s: float, side: int) -> float:
        """``e`` with ``w(x) ~ c |x - s|^e`` as ``x -> s`` from ``side`` (+1 right, -1 left)."""
        return 0.0

    def exponent_at_infinity(self) -> float:
        return 0.0

    def is_monotone(self) -> bool:
        return True

    def check_domain(self, domain_kind: str) -> None:
        pass

    def seq_tail(self) -> tuple:
        """``(M, K, beta)``: for ``n > M`` the weight equals ``K n^beta``."""
        raise UnsupportedSpec(f"{self.to_sexpr()} has no sequence form")

    def seq(self, n) -> np.ndarray:
        return np.asarray(self(np.asarray(n, dtype=float)), dtype=float)

    def integral(self, a: float, b: float) -> float:
        """``int_a^b w`` (used by the K-functional)."""
        raise UnsupportedSpec(f"no antiderivative for {self.to_sexpr()}")

    def to_sexpr(self) -> str:
        raise NotImplementedError

    def __mul__(self, other: "Weight") -> "Weight":
        return Product((self, other))

    def is_unit(self) -> bool:
        return False


@dataclass(frozen=True)
class Power(Weight):
    alpha: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.alpha == 0:
            return np.ones_like(x)
        with np.errstate(divide="ignore"):
            return np.power(x, self.alpha)

    def singular_points(self):
        return (0.0,) if self.alpha != 0 else ()

    def local_exponent(self, s, side):
        return self.alpha if s == 0.0 else 0.0

    def exponent_at_infinity(self):
        return self.alpha

    def seq_tail(self):
        return (0, 1.0, self.alpha)

    def integral(self, a, b):
        if self.alpha == -1:
            return math.log(b / a)
        e = self.alpha + 1
        return (b ** e - a ** e) / e

    def is_unit(self):
        return self.alpha == 0

    def to_sexpr(self):
        return f"(pow {_num(self.alpha)})"


@dataclass(frozen=True)
class Const(Weight):
    c: float

    def __post_init__(self):
        if not self.c > 0:
            raise SpecError("constant weight must be positive")

    def __call__(self, x):
        return np.full_like(np.asarray(x, dtype=float), self.c)

    def seq_tail(self):
        return (0, self.c, 0.0)

    def integral(self, a, b):
        return self.c * (b - a)

    def is_unit(self):
        return self.c == 1

    def to_sexpr(self):
        return f"(const {_num(self.c)})"


@dataclass(frozen=True)
class OneMinusXInv(Weight):
    """``1/(1-x)``; negative past 1, so on the half-line only usable inside ``Max``."""

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return 1.0 / (1.0 - x)

    def singular_points(self):
        return (1.0,)

    def local_exponent(self, s, side):
        return -1.0 if s == 1.0 else 0.0

    def exponent_at_infinity(self):
        return -1.0

    def check_domain(self, domain_kind):
        if domain_kind != UNIT:
            raise SpecError("1/(1-x) is a weight on [0,1] only (wrap it in max on the half-line)")

    def integral(self, a, b):
        return math.log((1 - a) / (1 - b)) if b < 1 else math.inf

    def to_sexpr(self):
        return "(onemx-inv)"


@dataclass(frozen=True)
class OneMinusX(Weight):
    def __call__(self, x):
        return 1.0 - np.asarray(x, dtype=float)

    def singular_points(self):
        return (1.0,)

    def local_exponent(self, s, side):
        return 1.0 if s == 1.0 else 0.0

    def check_domain(self, domain_kind):
        if domain_kind != UNIT:
            raise SpecError("1-x is a weight on [0,1] only")

    def integral(self, a, b):
        return (b - a) - (b * b - a * a) / 2

    def to_sexpr(self):
        return "(onemx)"


@dataclass(frozen=True)
class PhiOverT(Weight):
    gauge: ConcaveGauge

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self.gauge(x) / x
        if self.gauge.head is None:
            out = np.where(x == 0, self.gauge.segments()[0][3], out)
        else:
            out = np.where(x == 0, np.inf, out)
        return out

    def singular_points(self):
        return (0.0,) if self.gauge.head is not None else ()

    def breakpoints(self):
        return tuple(self.gauge.ts[1:])

    def local_exponent(self, s, side):
        return self.gauge.exponent_at_zero() - 1.0 if s == 0.0 else 0.0

    def exponent_at_infinity(self):
        return self.gauge.exponent_at_infinity() - 1.0

    def integral(self, a, b):
        return self.gauge.int_phi_over_t(a, b)

    def to_sexpr(self):
        return f"(phi/t {self.gauge.to_sexpr()})"


@dataclass(frozen=True)
class Explicit(Weight):
    """Step-function weight, extended past its horizon by its last value."""

    step: StepFunction

    def __post_init__(self):
        if min(self.step.values) <= 0:
            raise SpecError("explicit weights must be positive")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x >= self.step.horizon, self.step.values[-1], self.step(x))

    def breakpoints(self):
        return self.step.breakpoints[1:-1] + (self.step.horizon,)

    def integral(self, a, b):
        pts = merge_points([a, b] + [t for t in self.step.breakpoints if a < t < b], max(b, 1.0))
        if b > self.step.horizon:
            pts = merge_points(list(pts) + [self.step.horizon], b)
        mids = 0.5 * (pts[:-1] + pts[1:])
        return float(np.sum(self(mids) * np.diff(pts)))

    def seq_tail(self):
        raise UnsupportedSpec("step weights are for functions; use (seqw ...) for sequences")

    def to_sexpr(self):
        bps = " ".join(_num(b) for b in self.step.breakpoints)
        vals = " ".join(_num(v) for v in self.step.values)
        dom = self.step.domain
        d = UNIT if dom.is_unit else f"halfline {_num(dom.horizon)}"
        return f"(step ({d}) ({bps}) ({vals}))"


@dataclass(frozen=True)
class SeqWeight(Weight):
    """Explicit sequence weight ``(w_1, ..., w_m)``, extended by ``w_m``."""

    entries: tuple

    def __post_init__(self):
        e = tuple(float(v) for v in self.entries)
        object.__setattr__(self, "entries", e)
        if not e or min(e) <= 0:
            raise SpecError("sequence weights must be nonempty and positive")

    def __call__(self, n):
        n = np.asarray(n, dtype=float)
        idx = np.clip(n.astype(int) - 1, 0, len(self.entries) - 1)
        return np.asarray(self.entries)[idx]

    def seq_tail(self):
        return (len(self.entries), self.entries[-1], 0.0)

    def to_sexpr(self):
        return "(seqw " + " ".join(_num(v) for v in self.entries) + ")"


@dataclass(frozen=True)
class Product(Weight):
    factors: tuple

    def __post_init__(self):
        flat = []
        for w in self.factors:
            flat.extend(w.factors if isinstance(w, Product) else (w,))
        object.__setattr__(self, "factors", tuple(flat))

    def __call__(self, x):
        out = np.ones_like(np.asarray(x, dtype=float))
        for w in self.factors:
            out = out * w(x)
        return out

    def seq(self, n):
        out = np.ones(np.shape(n))
        for w in self.factors:
            out = out * w.seq(n)
        return out

    def singular_points(self):
        return tuple(sorted({s for w in self.factors for s in w.singular_points()}))

    def breakpoints(self):
        return tuple(sorted({s for w in self.factors for s in w.breakpoints()}))

    def local_exponent(self, s, side):
        return sum(w.local_exponent(s, side) for w in self.factors)

    def exponent_at_infinity(self):
        return sum(w.exponent_at_infinity() for w in self.factors)

    def is_monotone(self):
        return len([w for w in self.factors if not w.is_unit()]) <= 1 and all(
            w.is_monotone() for w in self.factors)

    def check_domain(self, domain_kind):
        for w in self.factors:
            w.check_domain(domain_kind)

    def seq_tail(self):
        M, K, beta = 0, 1.0, 0.0
        for w in self.factors:
            m, k, b = w.seq_tail()
            M, K, beta = max(M, m), K * k, beta + b
        return (M, K, beta)

    def integral(self, a, b):
        active = [w for w in self.factors if not w.is_unit()]
        consts = math.prod(w.c for w in active if isinstance(w, Const))
        rest = [w for w in active if not isinstance(w, Const)]
        if not rest:
            return consts * (b - a)
        if len(rest) == 1:
            return consts * rest[0].integral(a, b)
        raise UnsupportedSpec("no antiderivative for a product of weights")

    def is_unit(self):
        return all(w.is_unit() for w in self.factors)

    def to_sexpr(self):
        return "(prod " + " ".join(w.to_sexpr() for w in self.factors) + ")"


@dataclass(frozen=True)
class Reciprocal(Weight):
    inner: Weight

    def __call__(self, x):
        with np.errstate(divide="ignore"):
            return 1.0 / self.inner(x)

    def seq(self, n):
        return 1.0 / self.inner.seq(n)

    def singular_points(self):
        return self.inner.singular_points()

    def breakpoints(self):
        return self.inner.breakpoints()

    def local_exponent(self, s, side):
        return -self.inner.local_exponent(s, side)

    def exponent_at_infinity(self):
        return -self.inner.exponent_at_infinity()

    def is_monotone(self):
        return self.inner.is_monotone()

    def check_domain(self, domain_kind):
        self.inner.check_domain(domain_kind)

    def seq_tail(self):
        M, K, b = self.inner.seq_tail()
        return (M, 1.0 / K, -b)

    def is_unit(self):
        return self.inner.is_unit()

    def to_sexpr(self):
        return f"(recip {self.inner.to_sexpr()})"


@dataclass(frozen=True)
class Max(Weight):
    """Pointwise maximum; lets ``max(1/(1-x), 1)`` live on the half-line."""

    parts: tuple

    def __call__(self, x):
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = [np.asarray(w(x), dtype=float) for w in self.parts]
        out = vals[0]
        for v in vals[1:]:
            out = np.maximum(out, v)
        x = np.asarray(x, dtype=float)
        for s in self.singular_points():
            out = np.where(x == s, np.inf, out)
        return out

    def _dominant(self, s, side):
        d = side * 1e-9 * max(1.0, abs(s))
        vals = [float(w(np.array(s + d))) for w in self.parts]
        return self.parts[int(np.argmax(vals))]

    def singular_points(self):
        return tuple(sorted({s for w in self.parts for s in w.singular_points()}))

    def breakpoints(self):
        pts = {s for w in self.parts for s in w.breakpoints()}
        pts |= set(self.singular_points())
        pts |= set(self._crossings())
        return tuple(sorted(p for p in pts if p >= 0))

    def _crossings(self, hi: float = 1e6) -> list:
        sing = sorted(set(self.singular_points()) | {0.0, hi})
        out = []
        for i, a in enumerate(self.parts):
            for b in self.parts[i + 1:]:
                for lo, up in zip(sing, sing[1:]):
                    xs = np.linspace(lo, up, 2001)[1:-1]
                    with np.errstate(divide="ignore", invalid="ignore"):
                        d = a(xs) - b(xs)
                    sgn = np.sign(d)
                    for j in np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]:
                        out.append(brentq(lambda x: float(a(np.array(x)) - b(np.array(x))), xs[j], xs[j + 1],
                                          xtol=1e-15))
                    if lo in (0.0,) and abs(float(a(np.array(lo))) - float(b(np.array(lo)))) < 1e-15:
                        out.append(lo)
        return out

    def local_exponent(self, s, side):
        return self._dominant(s, side).local_exponent(s, side)

    def exponent_at_infinity(self):
        vals = []
        for w in self.parts:
            v = float(w(np.array(1e12)))
            vals.append(v if v > 0 else -math.inf)
        return self.parts[int(np.argmax(vals))].exponent_at_infinity()

    def is_monotone(self):
        return False

    def to_sexpr(self):
        return "(max " + " ".join(w.to_sexpr() for w in self.parts) + ")"


# ---------------------------------------------------------------------------
# Space algebra
# ---------------------------------------------------------------------------


class SpaceSpec:
    """Base of the recursive Banach ideal space description."""

    is_sequence = False

    def to_sexpr(self) -> str:
        raise NotImplementedError

    def __str__(self):
        return self.to_sexpr()


def _check_p(p: float) -> float:
    p = float(p)
    if not p >= 1:
        raise SpecError("exponent p must satisfy 1 <= p <= inf")
    return p


@dataclass(frozen=True)
class Lp(SpaceSpec):
    p: float
    weight: Weight = field(default_factory=lambda: Power(0.0))
    domain: str = UNIT

    def __post_init__(self):
        object.__setattr__(self, "p", _check_p(self.p))
        if self.domain not in (UNIT, HALFLINE):
            raise SpecError(f"unknown domain {self.domain!r}")
        self.weight.check_domain(self.domain)

    def to_sexpr(self):
        return f"Lp {_num(self.p)} {self.weight.to_sexpr()} {self.domain}"


@dataclass(frozen=True)
class Lorentz(SpaceSpec):
    gauge: ConcaveGauge
    domain = HALFLINE

    def to_sexpr(self):
        return f"Lorentz {self.gauge.to_sexpr()}"


@dataclass(frozen=True)
class Marcinkiewicz(SpaceSpec):
    gauge: ConcaveGauge
    starred: bool = False
    domain = HALFLINE

    def to_sexpr(self):
        return f"{'Marc*' if self.starred else 'Marc'} {self.gauge.to_sexpr()}"


@dataclass(frozen=True)
class Cesaro(SpaceSpec):
    inner: SpaceSpec

    def __post_init__(self):
        if self.inner.is_sequence:
            raise SpecError("Ces takes a function space; use SeqCes for sequences")

    def to_sexpr(self):
        return f"Ces({self.inner.to_sexpr()})"


@dataclass(frozen=True)
class Tilde(SpaceSpec):
    inner: SpaceSpec

    def __post_init__(self):
        if self.inner.is_sequence:
            raise SpecError("Tilde takes a function space; use SeqTilde for sequences")

    def to_sexpr(self):
        return f"Tilde({self.inner.to_sexpr()})"


@dataclass(frozen=True)
class Weighted(SpaceSpec):
    """``X(w)`` with ``||f||_{X(w)} = ||f w||_X``; nested weights collapse into a product."""

    inner: SpaceSpec
    weight: Weight

    def __post_init__(self):
        if isinstance(self.inner, Weighted):
            object.__setattr__(self, "weight", Product((self.inner.weight, self.weight)))
            object.__setattr__(self, "inner", self.inner.inner)

    @property
    def is_sequence(self):
        return self.inner.is_sequence

    def to_sexpr(self):
        return f"Weighted(({self.inner.to_sexpr()}) {self.weight.to_sexpr()})"


@dataclass(frozen=True)
class SeqLp(SpaceSpec):
    p: float
    weight: Weight = field(default_factory=lambda: Power(0.0))
    is_sequence = True

    def __post_init__(self):
        object.__setattr__(self, "p", _check_p(self.p))

    def to_sexpr(self):
        return f"SeqLp {_num(self.p)} {self.weight.to_sexpr()}"


@dataclass(frozen=True)
class SeqCesaro(SpaceSpec):
    inner: SpaceSpec
    is_sequence = True

    def __post_init__(self):
        if not self.inner.is_sequence:
            raise SpecError("SeqCes takes a sequence space")

    def to_sexpr(self):
        return f"SeqCes({self.inner.to_sexpr()})"


@dataclass(frozen=True)
class SeqTilde(SpaceSpec):
    inner: SpaceSpec
    is_sequence = True

    def __post_init__(self):
        if not self.inner.is_sequence:
            raise SpecError("SeqTilde takes a sequence space")

    def to_sexpr(self):
        return f"SeqTilde({self.inner.to_sexpr()})"


def space_domain(X: SpaceSpec) -> str | None:
    """Domain kind of a function space (None for sequence spaces)."""
    if X.is_sequence:
        return None
    if isinstance(X, Lp):
        return X.domain
    if isinstance(X, (Lorentz, Marcinkiewicz)):
        return HALFLINE
    return space_domain(X.inner)


# ---------------------------------------------------------------------------
# s-expression codec
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\()|(\))|([^\s()]+)(\()?)")


def _tokenize(s: str) -> list:
    pos, out = 0, []
    s = s.strip()
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m or m.end() == pos:
            raise SpecError(f"cannot tokenize at {s[pos:]!r}")
        pos = m.end()
        if m.group(1):
            out.append(("open", None))
        elif m.group(2):
            out.append(("close", None))
        elif m.group(4):
            out.append(("call", m.group(3)))
        else:
            out.append(("atom", m.group(3)))
    return out


def _parse_tree(tokens: list) -> list:
    stack: list = [[]]
    for kind, val in tokens:
        if kind == "open":
            stack.append([])
        elif kind == "call":
            stack.append([val])
        elif kind == "close":
            if len(stack) == 1:
                raise SpecError("unbalanced ')'")
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(val)
    if len(stack) != 1:
        raise SpecError("unbalanced '('")
    return stack[0]


def _float(tok) -> float:
    if isinstance(tok, list):
        raise SpecError(f"expected a number, got {tok!r}")
    try:
        return float(tok)
    except ValueError:
        raise SpecError(f"expected a number, got {tok!r}") from None


def _unwrap(items: list):
    while isinstance(items, list) and len(items) == 1 and isinstance(items[0], list):
        items = items[0]
    return items


def _parse_gauge(node) -> ConcaveGauge:
    if not (isinstance(node, list) and node and node[0] == "gauge"):
        raise SpecError(f"expected (gauge ...), got {node!r}")
    knots, head, tail = [], None, None
    for item in node[1:]:
        if not isinstance(item, list) or len(item) != 2:
            raise SpecError(f"bad gauge entry {item!r}")
        if item[0] == "head":
            head = _float(item[1])
        elif item[0] == "tail":
            tail = _float(item[1])
        else:
            knots.append((_float(item[0]), _float(item[1])))
    return ConcaveGauge(tuple(knots), head, tail)


def _parse_weight(node) -> Weight:
    if not isinstance(node, list) or not node:
        raise SpecError(f"expected a weight form, got {node!r}")
    head, args = node[0], node[1:]
    if head == "pow":
        return Power(_float(args[0]))
    if head == "const":
        return Const(_float(args[0]))
    if head == "onemx-inv":
        return OneMinusXInv()
    if head == "onemx":
        return OneMinusX()
    if head == "phi/t":
        return PhiOverT(_parse_gauge(args[0]))
    if head == "prod":
        return Product(tuple(_parse_weight(a) for a in args))
    if head == "recip":
        return Reciprocal(_parse_weight(args[0]))
    if head == "max":
        return Max(tuple(_parse_weight(a) for a in args))
    if head == "seqw":
        return SeqWeight(tuple(_float(a) for a in args))
    if head == "step":
        d = args[0]
        dom = Domain.unit() if d[0] == UNIT else Domain.halfline(_float(d[1]))
        return Explicit(StepFunction(dom, tuple(_float(b) for b in args[1]), tuple(_float(v) for v in args[2])))
    raise SpecError(f"unknown weight {head!r}")


def _parse_space(node) -> SpaceSpec:
    node = _unwrap(node)
    if not isinstance(node, list) or not node:
        raise SpecError(f"expected a space form, got {node!r}")
    head, args = node[0], node[1:]
    if not isinstance(head, str):
        raise SpecError(f"expected a space name, got {head!r}")
    h = head.lower()
    try:
        if h == "lp":
            if len(args) != 3:
                raise SpecError("Lp takes: p weight domain")
            return Lp(_float(args[0]), _parse_weight(args[1]), args[2])
        if h == "ces":
            return Cesaro(_parse_space(args))
        if h == "tilde":
            return Tilde(_parse_space(args))
        if h == "weighted":
            if len(args) != 2:
                raise SpecError("Weighted takes: (space) weight")
            return Weighted(_parse_space(args[0]), _parse_weight(args[1]))
        if h == "lorentz":
            return Lorentz(_parse_gauge(args[0]))
        if h in ("marc", "marc*"):
            return Marcinkiewicz(_parse_gauge(args[0]), starred=h == "marc*")
        if h == "seqlp":
            if len(args) != 2:
                raise SpecError("SeqLp takes: p weight")
            return SeqLp(_float(args[0]), _parse_weight(args[1]))
        if h == "seqces":
            return SeqCesaro(_parse_space(args))
        if h == "seqtilde":
            return SeqTilde(_parse_space(args))
    except (IndexError, TypeError) as exc:
        raise SpecError(f"malformed {head} form: {exc}") from None
    raise SpecError(f"unknown space {head!r}")


def parse_space(s: str) -> SpaceSpec:
    """Parse e.g. ``"Ces(Lp 2 (pow -0.25) halfline)"``."""
    return _parse_space(_parse_tree(_tokenize(s)))


def parse_weight(s: str) -> Weight:
    return _parse_weight(_unwrap(_parse_tree(_tokenize(s))))


def parse_gauge(s: str) -> ConcaveGauge:
    return _parse_gauge(_unwrap(_parse_tree(_tokenize(s))))


# ---------------------------------------------------------------------------
# Nontriviality of Cesaro and majorant spaces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Nontriviality:
    nontrivial: bool
    witness: float | None
    reason: str
    support_start: float = 0.0


def _flatten_lp(X: SpaceSpec) -> tuple:
    """(p, weight, domain) of Lp or Weighted(Lp); raises Undecidable otherwise."""
    w_extra: list = []
    while isinstance(X, Weighted):
        w_extra.append(X.weight)
        X = X.inner
    if not isinstance(X, Lp):
        raise Undecidable(f"no integrability analysis for {X.to_sexpr()}")
    w = Product((X.weight, *w_extra)) if w_extra else X.weight
    return X.p, w, X.domain


def _local_integrable(p: float, exponent: float) -> bool:
    """Is ``|x - s|^exponent`` in L^p near s?"""
    if p == math.inf:
        return exponent >= 0
    return exponent * p > -1


def nontriviality(X: SpaceSpec) -> Nontriviality:
    """Decide whether ``Ces(Y)`` (or ``Tilde(Y)``) is nonzero by endpoint-exponent analysis."""
    if isinstance(X, Tilde):
        return _tilde_nontrivial(X.inner)
    if not isinstance(X, Cesaro):
        raise SpecError("nontriviality expects a Ces(...) or Tilde(...) space")
    Y = X.inner
    if isinstance(Y, (Lorentz, Marcinkiewicz)):
        g = Y.gauge
        if isinstance(Y, Lorentz):
            ok = g.exponent_at_infinity() < 1
            why = "int phi'(t)/(t+a) dt converges" if ok else "gauge grows linearly: 1/x tail not in Lambda_phi"
        else:
            ok = g.exponent_at_infinity() > 0
            why = "log(1+t/a)/phi(t) bounded" if ok else "bounded gauge: log growth unbounded"
        return Nontriviality(ok, 1.0 if ok else None, why)
    p, w, dom = _flatten_lp(Y)
    sing = sorted(s for s in w.singular_points())
    # support of CX: everything left of a non-integrable singularity is lost
    bad = [s for s in sing if s > 0 and not (
        _local_integrable(p, w.local_exponent(s, -1)) and _local_integrable(p, w.local_exponent(s, +1)))]
    support_start = max(bad) if bad else 0.0
    if dom == UNIT:
        a = max([0.5] + [s for s in sing if s < 1])
        a = 0.5 * (a + 1) if a >= 0.5 else a
        if 1.0 in sing and not _local_integrable(p, w.local_exponent(1.0, -1)):
            return Nontriviality(False, None, "chi_[a,1] not in X for any a: weight not integrable at 1", 1.0)
        return Nontriviality(True, a, "chi_[a,1] has finite norm", support_start)
    a = max([1.0] + [2 * s for s in sing])
    e_inf = w.exponent_at_infinity() - 1.0
    ok = (e_inf <= 0) if p == math.inf else (e_inf * p < -1)
    why = (f"(1/x) chi_[{a:g},oo) has finite norm" if ok
           else "(1/x) chi_[a,oo) has infinite norm for every a")
    return Nontriviality(ok, a if ok else None, why, support_start)


def _tilde_nontrivial(Y: SpaceSpec) -> Nontriviality:
    if isinstance(Y, (Lorentz, Marcinkiewicz)):
        return Nontriviality(True, 1.0, "chi_[0,a] lies in every symmetric space")
    p, w, dom = _flatten_lp(Y)
    if not _local_integrable(p, w.local_exponent(0.0, +1)):
        return Nontriviality(False, None, "no nonzero nonincreasing function: weight not integrable at 0")
    a = 0.5 * min([1.0] + [s for s in w.singular_points() if s > 0])
    return Nontriviality(True, a, f"chi_[0,{a:g}] has finite norm")
