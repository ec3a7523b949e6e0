"""Operators on step functions and sequences: C, C*, majorant, dilations, T, rearrangement."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (DomainMismatch, Domain, Sequence, SpecError, StepFunction, UnsupportedSpec,
                   partial_integral)

E = math.e


@dataclass(frozen=True)
class PiecewiseFunction:
    """Closed-form function on the cells of a step grid.

    On ``[bp[i], bp[i+1])`` the value is
    ``c0 + c1/x + c2*ln(x)/x + c3*ln(x)``; on the half-line the tail past the
    horizon ``H`` is ``(t1 + t2*ln(x/H))/x``. Images of step functions under C,
    C twice and C* all have this form.

    Cesaro images also carry ``anchor[i] = x g(x)`` at ``bp[i]``; cells without
    ``ln(x)`` are then evaluated as
    ``(anchor + c0 (x - lo) + c2 ln(x/lo))/x``, which avoids cancellation
    when neighbouring cells differ by many orders of magnitude.
    """

    domain: Domain
    bp: np.ndarray
    c0: np.ndarray
    c1: np.ndarray
    c2: np.ndarray
    c3: np.ndarray
    t1: float = 0.0
    t2: float = 0.0
    anchor: np.ndarray | None = field(default=None, compare=False)

    @property
    def horizon(self) -> float:
        return self.domain.horizon

    @property
    def n_cells(self) -> int:
        return len(self.c0)

    def cell_eval(self, i: int, x):
        x = np.asarray(x, dtype=float)
        lo = self.bp[i]
        if self.anchor is not None and lo > 0 and not self.c3[i]:
            with np.errstate(divide="ignore", invalid="ignore"):
                out = self.anchor[i] + self.c0[i] * (x - lo)
                if self.c2[i]:
                    out = out + self.c2[i] * np.log1p((x - lo) / lo)
                return out / x
        out = self.c0[i] + 0.0 * x
        if self.c1[i] or self.c2[i] or self.c3[i]:
            with np.errstate(divide="ignore", invalid="ignore"):
                lx = np.log(x)
                if self.c1[i]:
                    out = out + self.c1[i] / x
                if self.c2[i]:
                    out = out + self.c2[i] * lx / x
                if self.c3[i]:
                    out = out + self.c3[i] * lx
        return out

    def tail_eval(self, x):
        x = np.asarray(x, dtype=float)
        if self.domain.is_unit:
            return np.zeros_like(x)
        return (self.t1 + self.t2 * np.log(x / self.horizon)) / x

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.clip(np.searchsorted(self.bp, x, side="right") - 1, 0, self.n_cells - 1)
        out = np.zeros_like(x)
        for i in np.unique(idx):
            m = idx == i
            out = np.where(m, self.cell_eval(int(i), x), out)
        beyond = x > self.horizon
        if beyond.any():
            out = np.where(beyond, self.tail_eval(np.where(beyond, x, self.horizon)), out)
        return out

    def is_cell_zero(self, i: int) -> bool:
        return self.c0[i] == 0 and self.c1[i] == 0 and self.c2[i] == 0 and self.c3[i] == 0

    @property
    def has_tail(self) -> bool:
        return not self.domain.is_unit and (self.t1 != 0 or self.t2 != 0)

    def is_rational(self) -> bool:
        """Only ``c0 + c1/x`` terms (the image of a step function under C)."""
        return not (np.any(self.c2) or np.any(self.c3) or self.t2)

    def abs_is_self(self) -> bool:
        grid = np.linspace(0, 1, 9)[1:]
        xs = (self.bp[:-1, None] + grid[None, :] * np.diff(self.bp)[:, None]).ravel()
        return bool(np.all(self(xs) >= 0)) and self.t1 >= 0 and self.t2 >= 0


CesaroImage = PiecewiseFunction


def _zeros(n):
    return np.zeros(n)


def as_piecewise(f: StepFunction) -> PiecewiseFunction:
    n = f.n_cells
    return PiecewiseFunction(f.domain, f.bp.copy(), f.vals.copy(), _zeros(n), _zeros(n), _zeros(n))


def cesaro(f) -> PiecewiseFunction:
    """``Cf(x) = F(x)/x`` in closed form. Accepts a StepFunction or a rational image ``b + a/x``."""
    if isinstance(f, PiecewiseFunction):
        return _cesaro_of_rational(f)
    F = partial_integral(f)
    bp, v = f.bp, f.vals
    c1 = F.heights[:-1] - v * bp[:-1]
    c1[0] = 0.0
    tail = float(F.heights[-1]) if not f.domain.is_unit else 0.0
    n = f.n_cells
    return PiecewiseFunction(f.domain, bp.copy(), v.copy(), c1, _zeros(n), _zeros(n), tail, 0.0,
                             anchor=F.heights[:-1].copy())


def _cesaro_of_rational(g: PiecewiseFunction) -> PiecewiseFunction:
    if not g.is_rational() or g.c1[0] != 0:
        raise UnsupportedSpec("C is implemented for step functions and their Cesaro images only")
    n = g.n_cells
    bp = g.bp
    c0 = g.c0.copy()
    c1 = np.zeros(n)
    c2 = g.c1.copy()
    anchor = np.zeros(n)
    G = 0.0
    for i in range(n):
        lo, hi = bp[i], bp[i + 1]
        b, a = g.c0[i], g.c1[i]
        anchor[i] = G
        c1[i] = G - b * lo - (a * math.log(lo) if a else 0.0)
        G += b * (hi - lo) + (a * math.log(hi / lo) if a else 0.0)
    if g.domain.is_unit:
        return PiecewiseFunction(g.domain, bp.copy(), c0, c1, c2, np.zeros(n), anchor=anchor)
    return PiecewiseFunction(g.domain, bp.copy(), c0, c1, c2, np.zeros(n), G, g.t1, anchor=anchor)


def cesaro_twice(f: StepFunction) -> PiecewiseFunction:
    """``C(Cf)`` with its logarithmic closed form."""
    return cesaro(cesaro(f))


def copson(f: StepFunction) -> PiecewiseFunction:
    """``C*f(x) = int_x^1 f(t)/t dt`` on the unit interval."""
    if not f.domain.is_unit:
        raise DomainMismatch("the Copson operator is defined on [0, 1]")
    bp, v = f.bp, f.vals
    n = f.n_cells
    R = np.zeros(n + 1)  # R[i] = int_{bp[i]}^1 f/t
    for i in range(n - 1, 0, -1):
        R[i] = R[i + 1] + (v[i] * math.log(bp[i + 1] / bp[i]) if v[i] else 0.0)
    c0 = R[1:] + v * np.log(bp[1:])
    return PiecewiseFunction(f.domain, bp.copy(), c0, _zeros(n), _zeros(n), -v.copy())


def majorant(f):
    """Nonincreasing majorant: suffix sup of ``|f|``."""
    if isinstance(f, Sequence):
        a = np.abs(f.arr)
        return Sequence(tuple(np.maximum.accumulate(a[::-1])[::-1]))
    a = np.abs(f.vals)
    return StepFunction.from_arrays(f.domain, f.bp, np.maximum.accumulate(a[::-1])[::-1])


def dilation(f: StepFunction, tau: float) -> StepFunction:
    """``sigma_tau f(x) = f(x/tau)``, truncated to the unit interval when needed."""
    if not tau > 0:
        raise SpecError("dilation parameter must be positive")
    if not f.domain.is_unit:
        return StepFunction.from_arrays(Domain.halfline(f.horizon * tau), f.bp * tau, f.vals)
    if tau == 1:
        return f
    if tau < 1:
        bp = np.append(f.bp * tau, 1.0)
        return StepFunction.from_arrays(f.domain, bp, np.append(f.vals, 0.0))
    bp = f.bp * tau
    k = int(np.searchsorted(bp, 1.0, side="left"))
    return StepFunction.from_arrays(f.domain, np.append(bp[:k], 1.0), f.vals[:k])


def dilation_seq(x: Sequence, m: int) -> Sequence:
    """``sigma_m``: each entry repeated ``m`` times."""
    if m < 1 or int(m) != m:
        raise SpecError("sequence dilation needs an integer m >= 1")
    return Sequence(tuple(np.repeat(x.arr, int(m))))


def cesaro_seq(x: Sequence, length: int | None = None) -> np.ndarray:
    """``(Cx)_n = S_n / n`` for ``n = 1..length``."""
    n = len(x) if length is None else length
    if n < len(x):
        raise SpecError("requested length shorter than the sequence")
    S = np.cumsum(x.padded(n))
    return S / np.arange(1, n + 1)


def sigma(t):
    """``sigma(t) = t / (t + e - e t)``."""
    t = np.asarray(t, dtype=float)
    return t / (t + E - E * t)


def sigma_inv(b):
    """``sigma^{-1}(b) = e b / (1 - b + e b)``."""
    b = np.asarray(b, dtype=float)
    return E * b / (1 - b + E * b)


def _substitute(h: StepFunction, fn) -> StepFunction:
    if not h.domain.is_unit:
        raise DomainMismatch("the substitution operator acts on [0, 1]")
    bp = fn(h.bp)
    bp[0], bp[-1] = 0.0, 1.0
    return StepFunction.from_arrays(h.domain, bp, h.vals)


def substitution_T(h: StepFunction) -> StepFunction:
    """``Th = h o sigma``: breakpoint ``b`` of ``h`` moves to ``sigma^{-1}(b)``."""
    return _substitute(h, sigma_inv)


def substitution_T_inv(h: StepFunction) -> StepFunction:
    return _substitute(h, sigma)


@dataclass(frozen=True)
class RearrangementProfile:
    fstar: StepFunction
    levels: np.ndarray  # distinct positive values of |f|, descending
    measures: np.ndarray  # measures[k] = |{|f| >= levels[k]}|

    def distribution(self, lam: float) -> float:
        """``d_f(lam) = |{|f| > lam}|``."""
        return float(np.sum(np.where(self.levels > lam, np.diff(np.concatenate([[0.0], self.measures])), 0.0)))

    def integral_to(self, t: float) -> float:
        """``int_0^t f*``."""
        s = self.fstar
        cut = np.clip(t - s.bp[:-1], 0.0, s.lengths)
        return float(np.sum(s.vals * cut))


def decreasing_rearrangement(f: StepFunction) -> RearrangementProfile:
    a = np.abs(f.vals)
    order = np.argsort(-a, kind="stable")
    vals = a[order]
    lens = f.lengths[order]
    bp = np.concatenate([[0.0], np.cumsum(lens)])
    bp[-1] = f.horizon
    fstar = StepFunction.from_arrays(f.domain, bp, vals)
    pos = vals > 0
    levels, measures = [], []
    acc = 0.0
    for v, l in zip(vals[pos], lens[pos]):
        acc += l
        if levels and levels[-1] == v:
            measures[-1] = acc
        else:
            levels.append(v)
            measures.append(acc)
    return RearrangementProfile(fstar, np.array(levels), np.array(measures))
