"""Monte Carlo estimation of survival and escape probabilities.

Sampling is split over a fixed set of counter-based substreams (Philox keyed
by (seed, stream index)), so the estimate is bit-identical regardless of how
many workers process the streams.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DriftNotInterior
from .exact_dp import EscapeBounds, escape_probability_bounds
from .laplace import DriftClass, LaplaceAnalysis, classify_drift
from .model import WalkModel

N_STREAMS = 16


@dataclass(frozen=True)
class McEstimate:
    target: str                    # "survival(n)" or "escape"
    mean: float
    std_error: float
    samples: int
    method: str                    # "plain" | "tilted"
    seed: int
    horizon: int


class AliasTable:
    """Walker alias method: O(1) discrete sampling from two uniforms."""

    def __init__(self, weights):
        w = np.asarray(weights, dtype=float)
        k = len(w)
        prob = w * k / w.sum()
        alias = np.zeros(k, dtype=np.int64)
        accept = np.ones(k)
        small = [i for i in range(k) if prob[i] < 1.0]
        large = [i for i in range(k) if prob[i] >= 1.0]
        while small and large:
            s, l = small.pop(), large.pop()
            accept[s] = prob[s]
            alias[s] = l
            prob[l] = prob[l] - (1.0 - prob[s])
            (small if prob[l] < 1.0 else large).append(l)
        for rest in (small, large):
            for i in rest:
                accept[i] = 1.0
        self.accept = accept
        self.alias = alias

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        k = len(self.accept)
        u = rng.random(count)
        v = rng.random(count)
        idx = np.minimum((u * k).astype(np.int64), k - 1)
        return np.where(v < self.accept[idx], idx, self.alias[idx])


def _stream_rng(seed: int, stream: int) -> np.random.Generator:
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, stream], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _membership_mask(model: WalkModel, pos: np.ndarray) -> np.ndarray:
    if model.cone.is_orthant:
        return (pos >= 0).all(axis=1)
    a = np.asarray(model.cone.normals, dtype=float)
    prods = pos @ a.T
    integer_normals = np.allclose(a, np.round(a))
    if integer_normals:
        return (prods >= 0).all(axis=1)
    norms = np.linalg.norm(a, axis=1)
    tol = 1e-12 * norms[None, :] * (np.linalg.norm(pos, axis=1)[:, None] + 1.0)
    return (prods >= -tol).all(axis=1)


def _stream_counts(samples: int) -> list[int]:
    base, extra = divmod(samples, N_STREAMS)
    return [base + (1 if s < extra else 0) for s in range(N_STREAMS)]


def _run_streams(worker, samples: int, workers: int):
    counts = _stream_counts(samples)
    jobs = [(s, c) for s, c in enumerate(counts) if c > 0]
    if workers <= 1:
        results = [worker(s, c) for s, c in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda sc: worker(*sc), jobs))
    return results


def simulate_survival(model: WalkModel, n: int, samples: int, seed: int,
                      workers: int = 1) -> McEstimate:
    """Plain Monte Carlo estimate of the survival probability a_n."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    steps = np.asarray([v for v, _ in model.dist.steps], dtype=np.int64)
    table = AliasTable([float(w) for _, w in model.dist.steps])
    start = np.asarray(model.start, dtype=np.int64)

    def worker(stream: int, count: int) -> int:
        rng = _stream_rng(seed, stream)
        pos = np.tile(start, (count, 1))
        alive = np.ones(count, dtype=bool)
        for _ in range(n):
            idx = table.sample(rng, count)
            pos += steps[idx]
            alive &= _membership_mask(model, pos)
        return int(alive.sum())

    hits = sum(_run_streams(worker, samples, workers))
    p = hits / samples
    return McEstimate(
        target=f"survival({n})", mean=p,
        std_error=math.sqrt(p * (1.0 - p) / samples),
        samples=samples, method="plain", seed=seed, horizon=n,
    )


def simulate_tilted(model: WalkModel, analysis: LaplaceAnalysis, n: int,
                    samples: int, seed: int, workers: int = 1,
                    t_override=None) -> McEstimate:
    """Importance-sampling estimate of a_n under the exponentially tilted law.

    Each confined path contributes rho^n e^{<t0,x>} e^{-<t0,S_n>}; the
    estimator is unbiased for a_n and collapses to plain sampling at t0 = 0.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if t_override is not None:
        from .laplace import tilt_distribution, laplace_eval
        t0 = np.asarray(t_override, dtype=float)
        rho = laplace_eval(model.dist, t0)[0]
        tilted, _ = tilt_distribution(model.dist, t0)
    else:
        t0 = np.asarray(analysis.t0, dtype=float)
        rho = analysis.rho
        tilted = analysis.tilted_steps
    steps = np.asarray([v for v, _ in tilted], dtype=np.int64)
    table = AliasTable([w for _, w in tilted])
    start = np.asarray(model.start, dtype=np.int64)
    prefactor = rho ** n * math.exp(float(t0 @ start))

    def worker(stream: int, count: int):
        rng = _stream_rng(seed, stream)
        pos = np.tile(start, (count, 1))
        alive = np.ones(count, dtype=bool)
        for _ in range(n):
            idx = table.sample(rng, count)
            pos += steps[idx]
            alive &= _membership_mask(model, pos)
        vals = np.where(alive, np.exp(-(pos @ t0)), 0.0) * prefactor
        return float(vals.sum()), float((vals ** 2).sum())

    parts = _run_streams(worker, samples, workers)
    total = math.fsum(p[0] for p in parts)
    total_sq = math.fsum(p[1] for p in parts)
    mean = total / samples
    var = max(total_sq / samples - mean ** 2, 0.0)
    return McEstimate(
        target=f"survival({n})", mean=mean,
        std_error=math.sqrt(var / samples),
        samples=samples, method="tilted", seed=seed, horizon=n,
    )


@dataclass(frozen=True)
class EscapeEstimate:
    estimate: McEstimate
    bounds: EscapeBounds | None


def estimate_escape(model: WalkModel, n: int, samples: int, seed: int,
                    workers: int = 1, bounds_horizon: int | None = None) -> EscapeEstimate:
    """Finite-horizon proxy for P^x(tau = infinity).

    The plain estimate of a_n is upper-biased by the (exponentially small)
    tail; the exact two-sided bounds are attached when available.
    """
    if classify_drift(model.dist.drift, model.cone) is not DriftClass.INTERIOR:
        raise DriftNotInterior("the escape probability vanishes without interior drift")
    est = simulate_survival(model, n, samples, seed, workers=workers)
    est = McEstimate(target="escape", mean=est.mean, std_error=est.std_error,
                     samples=est.samples, method="plain", seed=seed, horizon=n)
    bounds = None
    if model.small_step and not model.trapped and model.cone.is_orthant:
        bounds = escape_probability_bounds(model, bounds_horizon or min(n, 100))
    return EscapeEstimate(estimate=est, bounds=bounds)
