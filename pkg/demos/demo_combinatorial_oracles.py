"""Reference oracles: optimal matchings, submodularity, welfare greedy.

The assignment solver and a permutation brute force provide two independent
routes to the offline optimum.  The welfare encoding of a matching instance
(each offline point contributes its best selected edge) is monotone and
submodular, which an exhaustive diminishing-returns check certifies on
small ground sets; partitioned greedy on such functions earns at least half
the best single-choice-per-part welfare.
"""

import itertools

import numpy as np

from sketchmatch import (
    check_submodular,
    exhaustive_opt,
    matching_set_function,
    optimal_matching,
    welfare_greedy,
)


def main():
    rng = np.random.default_rng(0)
    w = rng.uniform(0.0, 1.0, (5, 4))

    solved = optimal_matching(w)
    brute = exhaustive_opt(w)
    print(f"5 x 4 instance: solver optimum {solved.value:.4f}, "
          f"brute force {brute.value:.4f}, assignment {solved.assignment}")

    f = matching_set_function(w)
    ground = [(u, i) for u in range(5) for i in range(2)]
    ok, witness = check_submodular(f, ground)
    print(f"welfare encoding submodular on a {len(ground)}-element ground "
          f"set: {ok} (witness: {witness})")

    # Against it: a supermodular set function is caught with a witness.
    bad, witness = check_submodular(lambda s: float(len(s) ** 2), [0, 1, 2])
    S, T, u = witness
    print(f"len(S)^2 rejected: adding {u} to {T} gains more than adding it "
          f"to its subset {S}")

    # One arrival per part; greedy picks the best marginal edge each time.
    parts = [[(u, i) for u in range(5)] for i in range(4)]
    chosen, val = welfare_greedy(f, parts)
    best = 0.0
    for combo in itertools.product(*[[None] + list(p) for p in parts]):
        best = max(best, f([e for e in combo if e is not None]))
    print(f"welfare greedy {val:.4f} vs exhaustive {best:.4f} "
          f"(ratio {val / best:.3f}, guarantee 0.5)")


if __name__ == "__main__":
    main()
