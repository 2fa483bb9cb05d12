"""Walk/cone data model, model-file ingestion and a path-enumeration oracle.

The model file is a JSON document with fields ``dimension``, ``steps``
(list of ``{"v": [...], "w": "p/q"}``), ``cone`` (``{"type": "orthant"}`` or
``{"type": "halfspaces", "normals": [[...], ...]}``) and ``start``.
"""

from __future__ import annotations

import hashlib
import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from .errors import (
    EmptyConeInterior,
    HorizonTooLarge,
    MalformedFile,
    PointOutsideCone,
    WeightsNotNormalized,
)

BRUTE_FORCE_MAX_HORIZON = 14
BRUTE_FORCE_MAX_PATHS = 10 ** 8


class DegenerateDistributionWarning(UserWarning):
    """The step set does not span the full ambient dimension."""


def _rational_rank(vectors: list[tuple[int, ...]], d: int) -> int:
    """Rank of integer vectors via fraction-free Gaussian elimination."""
    rows = [list(map(Fraction, v)) for v in vectors]
    rank = 0
    for col in range(d):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        prow = rows[rank]
        for r in range(rank + 1, len(rows)):
            if rows[r][col] != 0:
                f = rows[r][col] / prow[col]
                rows[r] = [a - f * b for a, b in zip(rows[r], prow)]
        rank += 1
        if rank == d:
            break
    return rank


@dataclass(frozen=True)
class StepDistribution:
    """Finite lattice increment distribution with exact rational weights."""

    dimension: int
    steps: tuple[tuple[tuple[int, ...], Fraction], ...]

    def __post_init__(self):
        d = self.dimension
        if d < 1:
            raise MalformedFile(f"dimension must be positive, got {d}")
        if not self.steps:
            raise MalformedFile("empty step set")
        seen = set()
        for v, w in self.steps:
            if len(v) != d:
                raise MalformedFile(f"step {v} has wrong dimension")
            if v in seen:
                raise MalformedFile(f"duplicate step vector {v}")
            seen.add(v)
            if w <= 0:
                raise MalformedFile(f"non-positive weight {w} on step {v}")
        total = sum(w for _, w in self.steps)
        if total != 1:
            raise WeightsNotNormalized(f"weights sum to {total}, expected 1")
        if all(all(c == 0 for c in v) for v, _ in self.steps):
            raise MalformedFile("all step vectors are zero")
        if not self.truly_d_dimensional:
            warnings.warn(
                "step vectors do not span the ambient space",
                DegenerateDistributionWarning,
                stacklevel=2,
            )

    @property
    def truly_d_dimensional(self) -> bool:
        return _rational_rank([v for v, _ in self.steps], self.dimension) == self.dimension

    @property
    def drift(self) -> tuple[Fraction, ...]:
        """Mean increment, computed exactly."""
        m = [Fraction(0)] * self.dimension
        for v, w in self.steps:
            for i, c in enumerate(v):
                m[i] += w * c
        return tuple(m)

    @property
    def common_denominator(self) -> int:
        den = 1
        for _, w in self.steps:
            den = den * w.denominator // math.gcd(den, w.denominator)
        return den

    def integer_weights(self) -> tuple[list[tuple[tuple[int, ...], int]], int]:
        """Steps with integer numerators over the common denominator."""
        den = self.common_denominator
        return [(v, int(w * den)) for v, w in self.steps], den

    def marginal(self, i: int) -> tuple[Fraction, Fraction, Fraction]:
        """(P(X_i = 1), P(X_i = 0-or-other), P(X_i = -1)) for coordinate i."""
        p = sum((w for v, w in self.steps if v[i] == 1), Fraction(0))
        q = sum((w for v, w in self.steps if v[i] == -1), Fraction(0))
        return p, 1 - p - q, q


@dataclass(frozen=True)
class ConeSpec:
    """Orthant or halfspace-represented polyhedral cone."""

    dimension: int
    normals: tuple[tuple[float, ...], ...] | None = None  # None means orthant

    def __post_init__(self):
        if self.normals is not None:
            for a in self.normals:
                if len(a) != self.dimension:
                    raise MalformedFile(f"normal {a} has wrong dimension")
            if not self._has_interior_point():
                raise EmptyConeInterior("halfspace system has no strictly feasible point")

    @classmethod
    def orthant(cls, dimension: int) -> "ConeSpec":
        return cls(dimension=dimension)

    @classmethod
    def polyhedral(cls, normals) -> "ConeSpec":
        normals = tuple(tuple(float(c) for c in a) for a in normals)
        if not normals:
            raise MalformedFile("polyhedral cone needs at least one normal")
        return cls(dimension=len(normals[0]), normals=normals)

    @property
    def is_orthant(self) -> bool:
        return self.normals is None

    @property
    def halfspace_normals(self) -> tuple[tuple[float, ...], ...]:
        if self.is_orthant:
            eye = np.eye(self.dimension)
            return tuple(tuple(row) for row in eye)
        return self.normals

    @property
    def dual_generators(self) -> tuple[tuple[float, ...], ...]:
        """Generators of the dual cone: the halfspace normals."""
        return self.halfspace_normals

    def _has_interior_point(self) -> bool:
        # max delta s.t. <a_j, x> >= delta, |x_i| <= 1; interior iff delta > 0
        a = np.asarray(self.normals, dtype=float)
        m, d = a.shape
        # variables (x, delta); maximize delta
        c = np.zeros(d + 1)
        c[-1] = -1.0
        a_ub = np.hstack([-a, np.ones((m, 1))])
        b_ub = np.zeros(m)
        res = linprog(c, A_ub=a_ub, b_ub=b_ub,
                      bounds=[(-1, 1)] * d + [(None, 1)], method="highs")
        return res.success and res.x is not None and res.x[-1] > 1e-9

    def contains(self, point) -> bool:
        if self.is_orthant:
            return all(c >= 0 for c in point)
        y = np.asarray(point, dtype=float)
        for a in self.normals:
            an = np.asarray(a)
            s = float(an @ y)
            if all(float(c).is_integer() for c in a) and all(
                float(c).is_integer() for c in point
            ):
                tol = 0.0
            else:
                tol = 1e-12 * float(np.linalg.norm(an) * (np.linalg.norm(y) + 1))
            if s < -tol:
                return False
        return True

    def strictly_contains(self, point) -> bool:
        if self.is_orthant:
            return all(c > 0 for c in point)
        y = np.asarray(point, dtype=float)
        return all(float(np.asarray(a) @ y) > 0 for a in self.normals)


@dataclass(frozen=True)
class ReachabilityWitness:
    """Path certifying that the walk can reach the cone interior."""

    length: int
    path: tuple[tuple[int, ...], ...]
    target: tuple[int, ...]


@dataclass(frozen=True)
class WalkModel:
    dist: StepDistribution
    cone: ConeSpec
    start: tuple[int, ...]
    interior_witness: ReachabilityWitness | None = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.start) != self.dist.dimension:
            raise MalformedFile("start point has wrong dimension")
        if self.cone.dimension != self.dist.dimension:
            raise MalformedFile("cone dimension does not match step dimension")
        if not self.cone.contains(self.start):
            raise PointOutsideCone(f"start {self.start} is outside the cone")

    @property
    def dimension(self) -> int:
        return self.dist.dimension

    @property
    def small_step(self) -> bool:
        return all(all(c in (-1, 0, 1) for c in v) for v, _ in self.dist.steps)

    @property
    def trapped(self) -> bool:
        return all(self.cone.contains(v) for v, _ in self.dist.steps)

    @property
    def can_reach_interior(self) -> bool:
        return self.interior_witness is not None

    def model_hash(self) -> str:
        payload = {
            "dimension": self.dimension,
            "steps": sorted(
                (list(v), f"{w.numerator}/{w.denominator}") for v, w in self.dist.steps
            ),
            "cone": "orthant" if self.cone.is_orthant else list(self.cone.normals),
            "start": list(self.start),
        }
        blob = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def to_dict(self) -> dict:
        cone = (
            {"type": "orthant"}
            if self.cone.is_orthant
            else {"type": "halfspaces", "normals": [list(a) for a in self.cone.normals]}
        )
        return {
            "dimension": self.dimension,
            "steps": [
                {"v": list(v), "w": f"{w.numerator}/{w.denominator}"}
                for v, w in self.dist.steps
            ],
            "cone": cone,
            "start": list(self.start),
        }


def _find_interior_witness(dist: StepDistribution, cone: ConeSpec) -> ReachabilityWitness | None:
    """BFS over confined states from 0, looking for an interior point.

    Depth is capped at 2d + 2; absence of a witness is generically a sign of a
    degenerate model, so callers treat it as a warning.
    """
    d = dist.dimension
    max_depth = 2 * d + 2
    origin = (0,) * d
    frontier: dict[tuple[int, ...], tuple[tuple[int, ...], ...]] = {origin: ()}
    for depth in range(1, max_depth + 1):
        nxt: dict[tuple[int, ...], tuple[tuple[int, ...], ...]] = {}
        for pos, path in frontier.items():
            for v, _ in dist.steps:
                q = tuple(a + b for a, b in zip(pos, v))
                if not cone.contains(q) or q in nxt:
                    continue
                nxt[q] = path + (v,)
                if cone.strictly_contains(q):
                    return ReachabilityWitness(length=depth, path=nxt[q], target=q)
        frontier = nxt
        if not frontier:
            break
    return None


def build_model(dist: StepDistribution, cone: ConeSpec, start) -> WalkModel:
    witness = _find_interior_witness(dist, cone)
    if witness is None:
        warnings.warn(
            "no confined path into the cone interior found (searched depth "
            f"{2 * dist.dimension + 2})",
            UserWarning,
            stacklevel=2,
        )
    return WalkModel(dist=dist, cone=cone, start=tuple(int(c) for c in start),
                     interior_witness=witness)


def _parse_rational(s) -> Fraction:
    if isinstance(s, int):
        return Fraction(s)
    if not isinstance(s, str):
        raise MalformedFile(f"weight {s!r} must be a 'p/q' string or integer")
    try:
        frac = Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise MalformedFile(f"bad rational {s!r}") from exc
    if frac.denominator <= 0:
        raise MalformedFile(f"bad rational {s!r}")
    return frac


def parse_model(text: str, normalize: bool = False) -> WalkModel:
    """Parse and validate a model file."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedFile(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedFile("top-level document must be an object")
    for key in ("dimension", "steps", "cone", "start"):
        if key not in doc:
            raise MalformedFile(f"missing field {key!r}")
    try:
        d = int(doc["dimension"])
    except (TypeError, ValueError) as exc:
        raise MalformedFile("dimension must be an integer") from exc

    raw_steps = doc["steps"]
    if not isinstance(raw_steps, list) or not raw_steps:
        raise MalformedFile("steps must be a non-empty list")
    steps = []
    for entry in raw_steps:
        if not isinstance(entry, dict) or "v" not in entry or "w" not in entry:
            raise MalformedFile(f"bad step entry {entry!r}")
        try:
            v = tuple(int(c) for c in entry["v"])
        except (TypeError, ValueError) as exc:
            raise MalformedFile(f"step vector {entry['v']!r} must be integers") from exc
        steps.append((v, _parse_rational(entry["w"])))

    total = sum(w for _, w in steps)
    if total != 1:
        if not normalize:
            raise WeightsNotNormalized(
                f"weights sum to {total}; pass normalize=True (--normalize) to rescale"
            )
        steps = [(v, w / total) for v, w in steps]

    cone_doc = doc["cone"]
    if not isinstance(cone_doc, dict) or "type" not in cone_doc:
        raise MalformedFile("cone must be an object with a 'type' field")
    if cone_doc["type"] == "orthant":
        cone = ConeSpec.orthant(d)
    elif cone_doc["type"] == "halfspaces":
        if "normals" not in cone_doc:
            raise MalformedFile("halfspace cone needs 'normals'")
        cone = ConeSpec.polyhedral(cone_doc["normals"])
        if cone.dimension != d:
            raise MalformedFile("cone normals have wrong dimension")
    else:
        raise MalformedFile(f"unknown cone type {cone_doc['type']!r}")

    dist = StepDistribution(dimension=d, steps=tuple(steps))
    try:
        start = tuple(int(c) for c in doc["start"])
    except (TypeError, ValueError) as exc:
        raise MalformedFile("start must be an integer vector") from exc
    return build_model(dist, cone, start)


def load_model(path, normalize: bool = False) -> WalkModel:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read(), normalize=normalize)


def _enumerate_layers(model: WalkModel, n: int):
    """Yield (k, positions, weight numerators) for every confined path prefix.

    Explicit path expansion without state merging: this is the test oracle
    the dynamic programming implementation is checked against.
    """
    if n > BRUTE_FORCE_MAX_HORIZON:
        raise HorizonTooLarge(f"horizon {n} exceeds {BRUTE_FORCE_MAX_HORIZON}")
    if len(model.dist.steps) ** n > BRUTE_FORCE_MAX_PATHS:
        raise HorizonTooLarge(f"{len(model.dist.steps)}^{n} paths exceed the guard")
    int_steps, _den = model.dist.integer_weights()
    vecs = np.asarray([v for v, _ in int_steps], dtype=np.int64)
    nums = np.asarray([c for _, c in int_steps], dtype=object)

    pos = np.asarray([model.start], dtype=np.int64)
    wts = np.asarray([1], dtype=object)
    yield 0, pos, wts
    for k in range(1, n + 1):
        pos = (pos[:, None, :] + vecs[None, :, :]).reshape(-1, model.dimension)
        wts = (wts[:, None] * nums[None, :]).reshape(-1)
        if model.cone.is_orthant:
            keep = (pos >= 0).all(axis=1)
        else:
            keep = np.fromiter(
                (model.cone.contains(tuple(int(c) for c in p)) for p in pos),
                dtype=bool, count=len(pos),
            )
        pos, wts = pos[keep], wts[keep]
        yield k, pos, wts


def brute_force_survival(model: WalkModel, n: int) -> list[Fraction]:
    """Survival probabilities a_0..a_n by exhaustive path enumeration."""
    den = model.dist.common_denominator
    out = []
    for k, _pos, wts in _enumerate_layers(model, n):
        out.append(Fraction(int(wts.sum()) if len(wts) else 0, den ** k))
    return out


def brute_force_excursion(model: WalkModel, y, n: int) -> list[Fraction]:
    """Probabilities of confined paths ending at y, by exhaustive enumeration."""
    y = tuple(int(c) for c in y)
    if not model.cone.contains(y):
        raise PointOutsideCone(f"target {y} is outside the cone")
    den = model.dist.common_denominator
    target = np.asarray(y, dtype=np.int64)
    out = []
    for k, pos, wts in _enumerate_layers(model, n):
        at = (pos == target).all(axis=1) if len(pos) else np.zeros(0, dtype=bool)
        out.append(Fraction(int(wts[at].sum()) if at.any() else 0, den ** k))
    return out
