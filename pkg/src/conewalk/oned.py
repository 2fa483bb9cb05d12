"""Closed-form reference results for the one-dimensional nearest-neighbour walk.

Everything here is independent of the DP machinery and serves as ground truth
in tests: exact series coefficients of the survival generating function, the
exact escape probability, and the leading-order asymptotics per drift regime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DriftNotPositive, MalformedFile, UnsupportedLazyStep
from .model import ConeSpec, StepDistribution, WalkModel, build_model


@dataclass(frozen=True)
class OneDimModel:
    """Walk on Z with steps +1 (prob p), 0 (prob r), -1 (prob q)."""

    p: Fraction
    q: Fraction
    r: Fraction = Fraction(0)
    x: int = 0

    def __post_init__(self):
        if self.p < 0 or self.q < 0 or self.r < 0:
            raise MalformedFile("step probabilities must be non-negative")
        if self.p + self.q + self.r != 1:
            raise MalformedFile("step probabilities must sum to 1")
        if self.x < 0:
            raise MalformedFile("start point must be non-negative")

    @property
    def drift(self) -> Fraction:
        return self.p - self.q

    def to_walk_model(self) -> WalkModel:
        steps = []
        if self.p > 0:
            steps.append(((1,), self.p))
        if self.r > 0:
            steps.append(((0,), self.r))
        if self.q > 0:
            steps.append(((-1,), self.q))
        dist = StepDistribution(dimension=1, steps=tuple(steps))
        return build_model(dist, ConeSpec.orthant(1), (self.x,))


def _half_binomials(count: int) -> list[Fraction]:
    """Binomial coefficients C(1/2, k) for k = 0..count-1, exact."""
    out = [Fraction(1)]
    for k in range(1, count):
        out.append(out[-1] * (Fraction(1, 2) - (k - 1)) / k)
    return out


def _poly_mul(a: list[Fraction], b: list[Fraction], n: int) -> list[Fraction]:
    out = [Fraction(0)] * (n + 1)
    for i, ai in enumerate(a):
        if ai == 0 or i > n:
            continue
        for j, bj in enumerate(b):
            if i + j > n:
                break
            if bj != 0:
                out[i + j] += ai * bj
    return out


def first_passage_series(model: OneDimModel, n: int) -> list[Fraction]:
    """Taylor coefficients of phi(t) = (1 - sqrt(1 - 4pq t^2)) / (2pt).

    phi is the generating function of the first hitting time of -1.
    """
    if model.r != 0:
        raise UnsupportedLazyStep("the closed form requires r = 0")
    p, q = model.p, model.q
    phi = [Fraction(0)] * (n + 1)
    if p == 0:
        # deterministic left walk: the first step hits -1
        if n >= 1:
            phi[1] = Fraction(1)
        return phi
    binoms = _half_binomials(n // 2 + 2)
    c = -4 * p * q
    ck = Fraction(1)
    for k in range(1, n // 2 + 2):
        ck *= c
        deg = 2 * k - 1
        if deg > n:
            break
        # coefficient of t^{2k} in -sqrt(1-4pq t^2), shifted down by 2pt
        phi[deg] = -binoms[k] * ck / (2 * p)
    return phi


def closed_form_coefficients(model: OneDimModel, n: int) -> list[Fraction]:
    """Exact survival probabilities a_0..a_n from the generating function
    (1 - phi^{x+1}) / (1 - t), by truncated series arithmetic."""
    phi = first_passage_series(model, n)
    power = [Fraction(1)] + [Fraction(0)] * n
    for _ in range(model.x + 1):
        power = _poly_mul(power, phi, n)
    out = []
    acc = Fraction(0)
    for k in range(n + 1):
        acc += (Fraction(1) if k == 0 else Fraction(0)) - power[k]
        out.append(acc)
    return out


def escape_prob_1d(model: OneDimModel) -> Fraction:
    """Exact probability of never exiting, for positive drift."""
    if model.drift <= 0:
        raise DriftNotPositive("escape probability is positive only for p > q")
    return 1 - (model.q / model.p) ** (model.x + 1)


@dataclass(frozen=True)
class AsymptoticReference:
    regime: str  # "zero-drift" | "negative-drift" | "positive-drift"
    rho: float
    predicted: float
    secondary_rate: float | None = None
    note: str = ""


def _oscillatory_correction(p: float, q: float, x: int, n: int) -> float:
    inv = 1.0 / (2.0 * math.sqrt(p * q))
    pref = (x + 1) * (q / p) ** ((x + 1) / 2.0)
    bracket = 1.0 / (inv - 1.0) + ((-1.0) ** (x + n)) / (inv + 1.0)
    return pref * bracket * (2.0 * math.sqrt(p * q)) ** n / (
        math.sqrt(2.0 * math.pi) * n ** 1.5
    )


def asymptotic_reference(model: OneDimModel, n: int) -> AsymptoticReference:
    """Leading-order prediction for a_n in the regime of the drift sign."""
    if model.r != 0:
        raise UnsupportedLazyStep("asymptotics are stated for r = 0")
    p, q, x = float(model.p), float(model.q), model.x
    if model.drift == 0:
        predicted = (x + 1) * math.sqrt(2.0 / (math.pi * n))
        return AsymptoticReference(
            regime="zero-drift", rho=1.0, predicted=predicted,
            note="n^(-1/2) scale taken from the exact binomial values "
                 "C(n, n//2)/2^n",
        )
    rate = 2.0 * math.sqrt(p * q)
    if model.drift < 0:
        return AsymptoticReference(
            regime="negative-drift", rho=rate,
            predicted=_oscillatory_correction(p, q, x, n),
        )
    constant = 1.0 - (q / p) ** (x + 1)
    return AsymptoticReference(
        regime="positive-drift", rho=1.0, secondary_rate=rate,
        predicted=constant + _oscillatory_correction(p, q, x, n),
    )
