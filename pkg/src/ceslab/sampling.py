"""Seeded random inputs and an order-preserving parallel map."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .core import Domain, Sequence, StepFunction

FAMILIES = ("random", "decreasing", "block", "heavy")


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream per (seed, sample index)."""
    return np.random.default_rng([int(seed), int(index)])


def random_breakpoints(rng, horizon: float, n_cells: int) -> np.ndarray:
    inner = np.sort(rng.uniform(0.0, horizon, size=n_cells - 1))
    bp = np.concatenate([[0.0], inner, [horizon]])
    # drop accidental near-duplicates
    keep = np.concatenate([[True], np.diff(bp) > 1e-9 * horizon])
    bp = bp[keep]
    bp[-1] = horizon
    return bp


def random_step(rng, domain: Domain, max_cells: int = 40, family: str = "random",
                zero_prob: float = 0.15, lo: float = 1e-2, hi: float = 1e2) -> StepFunction:
    """Nonnegative step function with log-uniform values on random breakpoints."""
    n = int(rng.integers(1, max_cells + 1))
    H = domain.horizon
    if family == "block":
        a = rng.uniform(0.0, 0.9 * H)
        return StepFunction.indicator(a, H, domain, float(np.exp(rng.uniform(np.log(lo), np.log(hi)))))
    bp = random_breakpoints(rng, H, n)
    k = len(bp) - 1
    if family == "heavy":
        mids = 0.5 * (bp[:-1] + bp[1:])
        vals = mids ** (-rng.uniform(0.1, 0.45))
        return StepFunction.from_arrays(domain, bp, vals)
    vals = np.exp(rng.uniform(np.log(lo), np.log(hi), size=k))
    vals[rng.random(k) < zero_prob] = 0.0
    if family == "decreasing":
        vals = np.sort(vals)[::-1]
    if not np.any(vals):
        vals[int(rng.integers(0, k))] = 1.0
    return StepFunction.from_arrays(domain, bp, vals)


def random_halfline_domain(rng, lo: float = 0.5, hi: float = 8.0) -> Domain:
    return Domain.halfline(float(np.exp(rng.uniform(np.log(lo), np.log(hi)))))


def vanish_near_one(f: StepFunction, rng) -> StepFunction:
    """Zero ``f`` on ``[b, 1]`` for a random ``b``; keeps weights singular at 1 integrable."""
    b = float(rng.uniform(0.5, 0.95))
    g = f.refine([b])
    mids = 0.5 * (g.bp[:-1] + g.bp[1:])
    return StepFunction.from_arrays(g.domain, g.bp, np.where(mids < b, g.vals, 0.0))


def random_sequence(rng, max_len: int = 64, family: str = "random", zero_prob: float = 0.15) -> Sequence:
    n = int(rng.integers(1, max_len + 1))
    if family == "block":
        a = int(rng.integers(0, n))
        v = np.zeros(n)
        v[a:] = 1.0
        return Sequence(tuple(v))
    if family == "heavy":
        return Sequence(tuple(np.arange(1, n + 1) ** (-rng.uniform(0.1, 0.45))))
    v = np.exp(rng.uniform(np.log(1e-2), np.log(1e2), size=n))
    v[rng.random(n) < zero_prob] = 0.0
    if family == "decreasing":
        v = np.sort(v)[::-1]
    if not np.any(v):
        v[-1] = 1.0
    return Sequence(tuple(v))


def family_for(index: int) -> str:
    """Mostly random inputs with every fifth sample from an adversarial family."""
    return FAMILIES[1 + (index // 5) % 3] if index % 5 == 4 else "random"


def thread_count() -> int:
    env = os.environ.get("CESLAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(8, os.cpu_count() or 1)


def pmap(fn, items) -> list:
    """``[fn(x) for x in items]`` on a thread pool capped by ``CESLAB_THREADS``; order preserved."""
    items = list(items)
    n = thread_count()
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))
