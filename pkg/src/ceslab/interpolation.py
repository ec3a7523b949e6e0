"""K-functionals for the (L^1, L^oo) couple and weighted interpolation bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import norms as N
from .core import (Domain, Explicit, Lp, OneMinusXInv, PiecewiseLinear, SpecError, StepFunction,
                   UnsupportedSpec, Weight, merge_points, space_domain)
from .inequalities import E, EQUAL_RTOL, InequalityCheck
from .operators import decreasing_rearrangement, substitution_T
from .sampling import family_for, pmap, random_step, sample_rng, vanish_near_one


@dataclass(frozen=True)
class KProfile:
    """``t -> K(t, f; L^1, L^oo) = int_0^t f*`` as a concave piecewise-linear function."""

    knots: np.ndarray
    heights: np.ndarray

    def __call__(self, t):
        return PiecewiseLinear(self.knots, self.heights)(t)

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.heights) / np.diff(self.knots)

    def is_concave(self, rtol: float = 1e-12) -> bool:
        s = self.slopes
        return bool(np.all(np.diff(s) <= rtol * max(1.0, float(np.max(np.abs(s), initial=0.0)))))


def k_profile(f: StepFunction) -> KProfile:
    prof = decreasing_rearrangement(f)
    s = prof.fstar
    heights = np.concatenate([[0.0], np.cumsum(s.vals * s.lengths)])
    return KProfile(s.bp.copy(), heights)


def k_functional(f: StepFunction, t: float) -> float:
    """``K(t, f; L^1, L^oo) = int_0^t f*(s) ds``."""
    if not t > 0:
        raise SpecError("need t > 0")
    return decreasing_rearrangement(f).integral_to(t)


def cellwise_weight(w: Weight, f: StepFunction) -> Explicit:
    """Step weight on the grid of ``f`` (plus the breakpoints of ``w``), valued at cell midpoints."""
    if isinstance(w, Explicit):
        return w
    H = f.horizon
    pts = merge_points(list(f.breakpoints) + [b for b in w.breakpoints() if 0 < b < H], H)
    pts[-1] = H
    mids = 0.5 * (pts[:-1] + pts[1:])
    vals = np.asarray(w(mids), dtype=float)
    if np.any(~np.isfinite(vals)) or np.any(vals <= 0):
        raise SpecError("weight must be positive and finite on every cell")
    return Explicit(StepFunction.from_arrays(f.domain, pts, vals))


@dataclass
class KDecomposition:
    value: float
    level: float
    g: StepFunction
    h: StepFunction
    g_norm: float  # ||g||_{L^1(w)}
    h_norm: float  # ||h||_{L^oo(w)}
    weight: Explicit

    def to_dict(self) -> dict:
        return {"value": self.value, "level": self.level, "g_L1w": self.g_norm, "h_Linfw": self.h_norm,
                "g": self.g.to_dict(), "h": self.h.to_dict()}


def k_functional_weighted(f: StepFunction, t: float, w: Weight) -> KDecomposition:
    """``K(t, f; L^1(w), L^oo(w))`` by scanning the clipping level of ``|f| w``.

    The optimal ``h`` clips ``|f| w`` at a level ``lam``; the objective is
    convex piecewise linear in ``lam`` with kinks at the cell values, so
    evaluating those (and 0) is exact.
    """
    if not t > 0:
        raise SpecError("need t > 0")
    ws = cellwise_weight(w, f)
    pts = merge_points(list(f.breakpoints) + list(ws.step.breakpoints), f.horizon)
    pts[-1] = f.horizon
    mids = 0.5 * (pts[:-1] + pts[1:])
    fv, wv, ln = f(mids), ws(mids), np.diff(pts)
    u = np.abs(fv) * wv
    cands = np.unique(np.concatenate([[0.0], u]))
    obj = [math.fsum(np.maximum(u - lam, 0.0) * ln) + t * min(lam, float(u.max(initial=0.0))) for lam in cands]
    k = int(np.argmin(obj))
    lam = float(cands[k])
    hv = np.sign(fv) * np.minimum(u, lam) / wv
    h = StepFunction.from_arrays(f.domain, pts, hv)
    g = StepFunction.from_arrays(f.domain, pts, fv - hv)
    gn = N.norm(g, Lp(1, ws, f.domain.kind)).value
    hn = N.norm(h, Lp(math.inf, ws, f.domain.kind)).value
    return KDecomposition(float(obj[k]), lam, g, h, gn, hn, ws)


def check_k_identity(f: StepFunction, t: float, w: Weight) -> InequalityCheck:
    """``K(t, f; L^1(w), L^oo(w)) = K(t, fw; L^1, L^oo)`` via two independent oracles."""
    dec = k_functional_weighted(f, t, w)
    ws = dec.weight
    fw = f * ws.step
    rhs = k_functional(fw, t)
    chk = InequalityCheck("k_identity", dec.value, rhs, 1.0, "K(t,f;L1(w),Loo(w)) = K(t,fw;L1,Loo)",
                          equality=True, tolerance=EQUAL_RTOL)
    chk.details.update(level=dec.level, witness_sum=dec.g_norm + t * dec.h_norm)
    return chk


def check_weighted_interp_bound(X, w: Weight | None = None, samples: int = 100, seed: int = 0) -> InequalityCheck:
    """Sampled ``sup ||Th||_{X(w)}/||h||_{X(w)}`` against ``max`` of the endpoint bounds (``e``).

    Only ``X = L^p`` on [0, 1] is supported (interpolation constant 1).
    """
    if not isinstance(X, Lp) or not X.weight.is_unit():
        raise UnsupportedSpec("interpolation bound is checked for unweighted Lp only")
    if space_domain(X) != "unit":
        raise UnsupportedSpec("the substitution T acts on [0, 1]")
    w = w or OneMinusXInv()
    Xw = Lp(X.p, w, "unit")
    U = Domain.unit()

    def one(i):
        rng = sample_rng(seed, i)
        h = vanish_near_one(random_step(rng, U, 40, family_for(i)), rng)
        den = N.norm(h, Xw).value
        return N.norm(substitution_T(h), Xw).value / den if den > 0 else 0.0

    ratios = pmap(one, range(samples))
    chk = InequalityCheck("weighted_interp_bound", max(ratios, default=0.0), E, E,
                          "C max(||T||_L1(w), ||T||_Loo(w)) with C = 1 and both endpoint norms <= e")
    chk.details.update(samples=samples, p=X.p)
    return chk
