"""Dynamic distance estimation from sign-matrix sketches.

Each of m independent groups holds a k x d projection with iid +-1/sqrt(k)
entries.  A vector's sketch is its image under all groups; the distance from
a query q to stored point x_i is estimated per group as the norm of the
sketch difference and then reduced by the median across groups:

    d~_i = median_g ||sketch_g(q) - sketch_g(x_i)||_2.

Within a group the squared norm is preserved up to (1 +- eps) with failure
probability exp(-Theta(k eps^2)); the median then drives the failure
probability of the whole estimate down to delta / n_points per query.  Group
count and width default to

    k = ceil(C_k / eps^2),    m = ceil(C_m * ln(n / delta)) rounded up to odd,

with generous constants C_k = 16, C_m = 9 that callers may tighten.

Every vector (stored, updated, or queried) is sketched by the same
matrix-vector product, so bit-identical inputs produce bit-identical
sketches; a query equal to a stored point reports distance exactly 0.
Updating a point and rebuilding from scratch with the same seed therefore
agree bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DimensionMismatch, ParameterError, PointSet, SeededRng, as_vector

DEFAULT_C_K = 16.0
DEFAULT_C_M = 9.0


@dataclass(frozen=True)
class SketchPlan:
    """Sketch geometry: m groups of k rows over dimension d."""

    m: int
    k: int
    d: int
    epsilon: float
    delta: float

    @classmethod
    def derive(
        cls,
        n_points: int,
        d: int,
        epsilon: float,
        delta: float,
        c_k: float = DEFAULT_C_K,
        c_m: float = DEFAULT_C_M,
    ) -> "SketchPlan":
        if not 0.0 < epsilon < 0.1:
            raise ParameterError("epsilon must lie in (0, 0.1)")
        if not 0.0 < delta < 1.0:
            raise ParameterError("delta must lie in (0, 1)")
        if c_k <= 0 or c_m <= 0:
            raise ParameterError("sketch constants must be positive")
        k = math.ceil(c_k / epsilon**2)
        m = math.ceil(c_m * math.log(n_points / delta))
        m = max(1, m)
        if m % 2 == 0:
            m += 1  # odd group count keeps the median a single group's value
        return cls(m=m, k=k, d=d, epsilon=epsilon, delta=delta)


class SketchBank:
    """Sketches of a point set plus the projections that made them."""

    def __init__(self, points: PointSet, plan: SketchPlan, seed) -> None:
        self.plan = plan
        self.originals = points.points.copy()
        self.rng = SeededRng(seed)
        m, k, d = plan.m, plan.k, plan.d
        if points.dim != d:
            raise DimensionMismatch("plan dimension does not match the point set")
        # One stacked (m*k, d) sign matrix; groups are row blocks.
        signs = self.rng.gen.integers(0, 2, size=(m * k, d), dtype=np.int8)
        self.proj = (signs.astype(np.float64) * 2.0 - 1.0) / math.sqrt(k)
        n = points.n
        self.sketches = np.empty((n, m, k), dtype=np.float64)
        for i in range(n):
            self.sketches[i] = self._sketch(self.originals[i])

    def _sketch(self, v: np.ndarray) -> np.ndarray:
        # Single canonical path for every vector: identical inputs yield
        # identical sketches, which the zero-distance guarantee relies on.
        return (self.proj @ v).reshape(self.plan.m, self.plan.k)

    @property
    def n(self) -> int:
        return self.sketches.shape[0]


def ade_init(
    points: PointSet,
    epsilon: float,
    delta: float,
    seed,
    c_k: float = DEFAULT_C_K,
    c_m: float = DEFAULT_C_M,
) -> SketchBank:
    """Sketch a point set for (1 +- epsilon) distance estimates."""
    plan = SketchPlan.derive(points.n, points.dim, epsilon, delta, c_k=c_k, c_m=c_m)
    return SketchBank(points, plan, seed)


def ade_update(bank: SketchBank, i: int, z) -> None:
    """Replace stored point i by z and re-sketch that row only."""
    if not 0 <= i < bank.n:
        raise IndexError(f"index {i} out of range")
    z = as_vector(z, dim=bank.plan.d)
    bank.originals[i] = z
    bank.sketches[i] = bank._sketch(z)


def ade_query(bank: SketchBank, q) -> np.ndarray:
    """Estimated distances from q to every stored point.

    Returns an (n,) array; entry i is the median over groups of the sketch
    difference norm.  Cost is O(m k (n + d)) independent of estimate count.
    """
    q = as_vector(q, dim=bank.plan.d)
    q_sk = bank._sketch(q)  # (m, k)
    diff = bank.sketches - q_sk[np.newaxis, :, :]  # (n, m, k)
    per_group = np.sqrt(np.einsum("nmk,nmk->nm", diff, diff))
    return np.median(per_group, axis=1)
