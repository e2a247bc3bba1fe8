"""Additive inner-product estimates through the distance sketch.

Inner products reduce to distances by an asymmetric padding: stored points
are scaled into the unit ball and padded to unit length with one slack
coordinate, queries with the other.  In the padded space
||Q(q) - P(x)||^2 = 2 - (2 / D) <q, x>, so a multiplicative distance
estimate decodes to an additive inner-product estimate.  Budgeting the
distance precision at eps0 = 2 eps / (3 D) makes the decoded error at most
eps in both directions.
"""

import numpy as np

from sketchmatch import PointSet, ipe_init, ipe_query, ipe_update


def ball(rng, count, dim, radius):
    x = rng.standard_normal((count, dim))
    return x / np.maximum(1.0, np.linalg.norm(x, axis=1, keepdims=True) / radius)


def main():
    rng = np.random.default_rng(0)
    n, d, D, eps, delta = 150, 32, 2.0, 0.1, 0.05
    points = PointSet(ball(rng, n, d, D), norm_bound=D)
    state = ipe_init(points, epsilon=eps, delta=delta, seed=1)
    print(f"{n} points with norms up to {D}: distance precision budget "
          f"eps0 = 2*{eps}/(3*{D}) = {2 * eps / (3 * D):.4f}")

    q = ball(rng, 1, d, 1.0)[0]
    est = ipe_query(state, q)
    exact = points.points @ q
    err = np.abs(est - exact)
    print(f"estimates within {err.max():.4f} of the exact inner products "
          f"(budget eps = {eps})")

    # The padding stores points at norm exactly 1; the decode inverts the
    # quadratic relation, so updates go through the same path as init.
    z = ball(rng, 1, d, D)[0]
    ipe_update(state, 3, z)
    print(f"after replacing point 3: estimate {ipe_query(state, q)[3]:.4f}, "
          f"exact {float(z @ q):.4f}")

    # Norm bounds are enforced, not assumed.
    try:
        ipe_update(state, 0, 1.5 * D * q / np.linalg.norm(q))
    except Exception as exc:
        print(f"oversized update rejected: {type(exc).__name__}: {exc}")


if __name__ == "__main__":
    main()
