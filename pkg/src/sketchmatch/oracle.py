"""Exact baselines: offline-optimal matching and submodular-welfare checks.

The online matchers are judged against the offline optimum of the same
weight matrix.  Two independent routes compute it: a rectangular assignment
solver for real sizes, and brute-force enumeration for tiny instances.  The
enumeration route exists so the solver itself has something to be checked
against.

The greedy matcher is an instance of greedy submodular-welfare maximization:
ground set N = U x [m] with parts P_i = U x {i} (one part per arrival), and

    f(S) = sum_u max({w(u, v_i) : (u, i) in S} or {0}),

a monotone nonneg submodular function whose welfare optimum upper-bounds the
optimal matching value.  welfare_greedy and check_submodular operate on that
abstraction directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import ParameterError


class SizeCapError(ValueError):
    """Instance too large for exhaustive enumeration."""


@dataclass
class OptimalMatching:
    """Offline optimum: total value plus a partial injective online->offline map."""

    value: float
    assignment: dict[int, int]


def _check_weights(weights) -> np.ndarray:
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 2 or w.size == 0:
        raise ParameterError("weights must be a nonempty (n_offline, m_online) matrix")
    if not np.all(np.isfinite(w)):
        raise ValueError("weight matrix has non-finite entries")
    if np.any(w < 0):
        raise ValueError("weight matrix has negative entries")
    return w


def optimal_matching(weights) -> OptimalMatching:
    """Maximum-value partial matching of a nonnegative weight matrix.

    Rows are offline points, columns online arrivals.  With nonnegative
    weights a maximum full assignment of the smaller side is also a maximum
    partial matching, so the rectangular assignment solver applies directly.
    """
    w = _check_weights(weights)
    rows, cols = linear_sum_assignment(w, maximize=True)
    value = float(w[rows, cols].sum())
    return OptimalMatching(value=value, assignment={int(c): int(r) for r, c in zip(rows, cols)})


_PERM_CACHE: dict[tuple[int, int], np.ndarray] = {}


def _perm_table(m: int, r: int) -> np.ndarray:
    key = (m, r)
    if key not in _PERM_CACHE:
        _PERM_CACHE[key] = np.array(list(permutations(range(m), r)), dtype=np.intp)
    return _PERM_CACHE[key]


def exhaustive_opt(weights) -> OptimalMatching:
    """Brute-force optimum by enumerating all injective assignments.

    Enumerates arrangements of the larger side over the smaller, so it is
    only usable for toy sizes; guarded by min(n,m)! <= 1e6 and a cap on the
    arrangement count itself.
    """
    w = _check_weights(weights)
    n, m = w.shape
    small = min(n, m)
    if math.factorial(small) > 10**6:
        raise SizeCapError(f"min(n, m)! = {small}! exceeds the enumeration cap")
    big = max(n, m)
    n_arr = math.perm(big, small)
    if n_arr > 4 * 10**6:
        raise SizeCapError(f"{n_arr} arrangements exceed the enumeration cap")

    transposed = n > m
    mat = w.T if transposed else w  # (small, big): rows are the smaller side
    perms = _perm_table(big, small)  # (n_arr, small) columns chosen per row
    vals = mat[np.arange(small), perms].sum(axis=1)
    best = int(np.argmax(vals))
    choice = perms[best]
    if transposed:
        # rows of mat are online points; choice[j] is the offline partner
        assignment = {int(j): int(choice[j]) for j in range(small)}
    else:
        assignment = {int(choice[i]): int(i) for i in range(small)}
    return OptimalMatching(value=float(vals[best]), assignment=assignment)


def matching_set_function(weights):
    """The welfare encoding of a matching instance.

    Returns f over subsets of N = {(u, i)}: each offline u contributes the
    best weight among its selected edges, or 0 when it has none.  Monotone,
    nonnegative, and submodular for any nonnegative weight matrix.
    """
    w = _check_weights(weights)

    def f(selected) -> float:
        best: dict[int, float] = {}
        for (u, i) in selected:
            val = float(w[u, i])
            if val > best.get(u, -math.inf):
                best[u] = val
        return float(sum(max(0.0, v) for v in best.values()))

    return f


def welfare_greedy(f, parts) -> tuple[list, float]:
    """Greedy welfare maximization: one marginal-max element per part, in order.

    Ties go to the earliest element of the part.  For monotone submodular f
    this is a 1/2-approximation to the best single-choice-per-part welfare.
    """
    chosen: list = []
    base = f(chosen)
    for part in parts:
        if not part:
            continue
        best_gain = -math.inf
        best_elem = None
        for elem in part:
            gain = f(chosen + [elem]) - base
            if gain > best_gain:
                best_gain = gain
                best_elem = elem
        chosen.append(best_elem)
        base = base + best_gain
    return chosen, float(base)


def check_submodular(f, ground, tol: float = 1e-9):
    """Exhaustively test diminishing returns of f over subsets of `ground`.

    Uses the pairwise characterization: f is submodular on the full lattice
    iff f(S+u) + f(S+v) >= f(S+u+v) + f(S) for all S and u != v outside S.
    Returns (True, None) or (False, (S, T, u)) where the witness violates
    f(S+u) - f(S) >= f(T+u) - f(T) with S subset of T.

    Requires f to be defined on every subset; ground size is capped at 12.
    """
    elems = list(ground)
    g = len(elems)
    if g > 12:
        raise SizeCapError("exhaustive submodularity check capped at 12 elements")

    # Tabulate f over the subset lattice once; masks index into elems.
    table = np.empty(1 << g, dtype=np.float64)
    for mask in range(1 << g):
        table[mask] = f([elems[j] for j in range(g) if mask >> j & 1])

    for a in range(g):
        for b in range(a + 1, g):
            both = (1 << a) | (1 << b)
            rest = [m for m in range(1 << g) if not m & both]
            s = np.array(rest, dtype=np.intp)
            lhs = table[s | (1 << a)] + table[s | (1 << b)]
            rhs = table[s | both] + table[s]
            bad = np.nonzero(lhs < rhs - tol)[0]
            if bad.size:
                mask = rest[int(bad[0])]
                S = [elems[j] for j in range(g) if mask >> j & 1]
                return False, (S, S + [elems[b]], elems[a])
    return True, None
