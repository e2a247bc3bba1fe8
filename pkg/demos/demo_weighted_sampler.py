"""Weighted index sampling by walking a prefix tree of partial sums.

A balanced binary tree stores each internal node's subtree weight; a draw
walks from the root, branching left with probability proportional to the
left subtree's weight.  Each draw costs one root-to-leaf path, O(log n)
coin flips, and the leaf probabilities telescope to w_i / sum(w) exactly.
"""

import numpy as np

from sketchmatch import SeededRng, sampler_init, sampler_query


def main():
    rng = np.random.default_rng(0)
    n = 12
    weights = rng.uniform(0.1, 1.0, n)
    tree = sampler_init(weights)
    print(f"{n} weights packed into {tree.n_nodes} nodes, depth {tree.depth()}")

    draws = 200_000
    srng = SeededRng(1)
    counts = np.bincount(
        [sampler_query(tree, srng) for _ in range(draws)], minlength=n
    )
    target = weights / weights.sum()
    empirical = counts / draws
    print("index   weight   target   empirical")
    for i in range(n):
        print(f"  {i:3d}   {weights[i]:.4f}   {target[i]:.4f}   {empirical[i]:.4f}")
    print(f"max deviation {np.abs(empirical - target).max():.5f} over "
          f"{draws} draws")

    # Zero-weight indices are never drawn.
    spiked = sampler_init([0.0, 2.0, 0.0, 1.0])
    hits = {sampler_query(spiked, SeededRng(2)) for _ in range(5000)}
    print(f"weights (0, 2, 0, 1) only ever draw indices {sorted(hits)}")


if __name__ == "__main__":
    main()
