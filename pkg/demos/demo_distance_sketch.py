"""Sketching a point set for fast multiplicative distance estimates.

A bank of m independent k x d sign sketches compresses n points so that the
distance from a query to every stored point can be read off in O(m k (d + n))
time.  Each group estimates ||q - x_i|| by the length of the sketched
difference; the median over groups concentrates inside (1 +- eps) of the
truth with failure probability delta shared across all n points.
"""

import numpy as np

from sketchmatch import PointSet, ade_init, ade_query, ade_update


def unit_ball(rng, count, dim):
    x = rng.standard_normal((count, dim))
    return x / np.maximum(1.0, np.linalg.norm(x, axis=1, keepdims=True))


def main():
    rng = np.random.default_rng(0)
    n, d, eps, delta = 200, 48, 0.08, 0.05
    points = PointSet(unit_ball(rng, n, d), norm_bound=1.0)
    bank = ade_init(points, epsilon=eps, delta=delta, seed=1)
    plan = bank.plan
    print(f"{n} points in dimension {d}: {plan.m} groups of {plan.k} x {d} "
          f"sign sketches ({plan.m * plan.k} rows total)")

    q = unit_ball(rng, 1, d)[0]
    est = ade_query(bank, q)
    exact = np.linalg.norm(points.points - q, axis=1)
    rel = np.abs(est - exact) / exact
    print(f"query vs exact distances: max relative error {rel.max():.4f} "
          f"(budget eps = {eps})")

    # A stored point queries to distance exactly zero: both sketch and
    # stored vector cancel term by term, no floating slack needed.
    self_est = ade_query(bank, points.points[7])
    print(f"querying stored point 7: estimate {self_est[7]:.1f} (exact zero)")

    # Replacing a point re-sketches only that column of the bank.
    z = unit_ball(rng, 1, d)[0]
    ade_update(bank, 7, z)
    moved = ade_query(bank, q)[7]
    print(f"after replacing point 7: estimate {moved:.4f}, "
          f"exact {np.linalg.norm(z - q):.4f}")


if __name__ == "__main__":
    main()
