"""Tests for the exact offline baselines.

Two independent routes to the offline optimum (assignment solver and
brute-force enumeration) are cross-checked against each other, and the
welfare abstraction is verified: the matching set-function is monotone
nonnegative submodular, greedy welfare is a 1/2-approximation, and the
submodularity checker both accepts known submodular families and produces
a genuine counterexample witness on a non-submodular function.
"""

import numpy as np
import pytest

from sketchmatch.core import ParameterError
from sketchmatch.oracle import (
    OptimalMatching,
    SizeCapError,
    check_submodular,
    exhaustive_opt,
    matching_set_function,
    optimal_matching,
    welfare_greedy,
)


def _assignment_value(w, match: OptimalMatching) -> float:
    return float(sum(w[r, c] for c, r in match.assignment.items()))


class TestOptimalMatching:
    def test_two_by_two_diagonal(self):
        """[[2,1],[1,2]]: the diagonal matching wins, 4 vs 2."""
        m = optimal_matching([[2.0, 1.0], [1.0, 2.0]])
        assert m.value == 4.0
        assert m.assignment == {0: 0, 1: 1}

    def test_single_row_takes_max(self):
        m = optimal_matching([[0.2, 0.9, 0.4, 0.1]])
        assert m.value == 0.9

    def test_assignment_is_injective_and_sums_to_value(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            n, mcols = rng.integers(1, 9, size=2)
            w = rng.random((n, mcols))
            m = optimal_matching(w)
            offline_used = list(m.assignment.values())
            assert len(offline_used) == len(set(offline_used))
            assert all(0 <= c < mcols for c in m.assignment)
            assert all(0 <= r < n for r in offline_used)
            assert abs(_assignment_value(w, m) - m.value) < 1e-9

    def test_rejects_negative_entries(self):
        with pytest.raises(ValueError):
            optimal_matching([[1.0, -0.1]])

    def test_rejects_empty(self):
        with pytest.raises(ParameterError):
            optimal_matching(np.zeros((0, 3)))


class TestExhaustiveAgreement:
    def test_solver_equals_enumeration(self):
        """Both optimum routes agree on random rectangular instances."""
        rng = np.random.default_rng(4)
        for _ in range(400):
            n, mcols = rng.integers(1, 7, size=2)
            w = rng.random((n, mcols)) * rng.choice([0.1, 1.0, 10.0])
            a = optimal_matching(w)
            b = exhaustive_opt(w)
            assert abs(a.value - b.value) < 1e-9
            assert abs(_assignment_value(w, b) - b.value) < 1e-9

    def test_zero_matrix(self):
        assert exhaustive_opt(np.zeros((3, 4))).value == 0.0

    def test_one_by_one(self):
        assert exhaustive_opt([[5.0]]).value == 5.0

    def test_size_cap(self):
        with pytest.raises(SizeCapError):
            exhaustive_opt(np.ones((12, 12)))


class TestMatchingSetFunction:
    def test_empty_set_is_zero(self):
        f = matching_set_function(np.ones((3, 3)))
        assert f([]) == 0.0

    def test_value_is_sum_of_per_row_maxima(self):
        w = np.array([[1.0, 5.0], [2.0, 3.0]])
        f = matching_set_function(w)
        # offline 0 gets edges to both arrivals, offline 1 only arrival 0
        assert f([(0, 0), (0, 1), (1, 0)]) == 5.0 + 2.0

    def test_monotone(self):
        rng = np.random.default_rng(5)
        w = rng.random((4, 4))
        f = matching_set_function(w)
        ground = [(u, i) for u in range(4) for i in range(4)]
        sel: list = []
        prev = f(sel)
        order = rng.permutation(len(ground))
        for j in order:
            sel.append(ground[j])
            cur = f(sel)
            assert cur >= prev - 1e-12
            prev = cur


class TestWelfareGreedy:
    def test_single_part_takes_marginal_max(self):
        f = matching_set_function(np.array([[0.3], [0.8], [0.5]]))
        chosen, val = welfare_greedy(f, [[(0, 0), (1, 0), (2, 0)]])
        assert chosen == [(1, 0)]
        assert val == 0.8

    def test_ties_go_to_earliest_element(self):
        f = matching_set_function(np.array([[1.0, 1.0]]))
        chosen, _ = welfare_greedy(f, [[(0, 0)], [(0, 1)]])
        assert chosen == [(0, 0), (0, 1)]
        f2 = matching_set_function(np.ones((2, 1)))
        chosen2, _ = welfare_greedy(f2, [[(0, 0), (1, 0)]])
        assert chosen2 == [(0, 0)]

    def test_modular_objective_is_solved_exactly(self):
        """With an additive objective the greedy choice per part is optimal."""
        rng = np.random.default_rng(6)
        weights = {(p, e): float(rng.random()) for p in range(4) for e in range(3)}

        def f(sel):
            return sum(weights[x] for x in sel)

        parts = [[(p, e) for e in range(3)] for p in range(4)]
        _, val = welfare_greedy(f, parts)
        best = sum(max(weights[(p, e)] for e in range(3)) for p in range(4))
        assert abs(val - best) < 1e-12

    def test_half_approximation_on_matching_instances(self):
        """Greedy welfare is at least half of the exhaustive welfare optimum."""
        rng = np.random.default_rng(7)
        for _ in range(200):
            n, mcols = rng.integers(1, 4, size=2)
            w = rng.random((n, mcols))
            f = matching_set_function(w)
            parts = [[(u, i) for u in range(n)] for i in range(mcols)]
            _, greedy_val = welfare_greedy(f, parts)
            opt = _exhaustive_welfare(f, parts)
            assert greedy_val >= 0.5 * opt - 1e-9


def _exhaustive_welfare(f, parts) -> float:
    """Best value over all one-element-per-part selections (parts may opt out)."""
    best = f([])
    stack = [([], 0)]
    while stack:
        sel, i = stack.pop()
        if i == len(parts):
            best = max(best, f(sel))
            continue
        stack.append((sel, i + 1))
        for elem in parts[i]:
            stack.append((sel + [elem], i + 1))
    return best


class TestCheckSubmodular:
    def test_matching_function_is_submodular(self):
        rng = np.random.default_rng(8)
        for _ in range(30):
            w = rng.random((3, 3))
            f = matching_set_function(w)
            ground = [(u, i) for u in range(3) for i in range(3)]
            ok, witness = check_submodular(f, ground)
            assert ok and witness is None

    def test_coverage_function_is_submodular(self):
        sets = {0: {1, 2}, 1: {2, 3}, 2: {3, 4, 5}, 3: {1}}

        def cover(sel):
            out: set = set()
            for s in sel:
                out |= sets[s]
            return float(len(out))

        ok, witness = check_submodular(cover, list(sets))
        assert ok and witness is None

    def test_supermodular_function_yields_valid_witness(self):
        """f(S)=|S|^2 has increasing returns; the witness must certify it."""

        def f(sel):
            return float(len(sel) ** 2)

        ok, witness = check_submodular(f, ["a", "b", "c"])
        assert not ok
        S, T, u = witness
        assert set(S) <= set(T)
        assert u not in T
        gain_small = f(list(S) + [u]) - f(list(S))
        gain_large = f(list(T) + [u]) - f(list(T))
        assert gain_small < gain_large - 1e-9

    def test_ground_size_cap(self):
        with pytest.raises(SizeCapError):
            check_submodular(lambda s: 0.0, list(range(13)))

    def test_random_instances_pass(self):
        """Random small matching instances always pass the checker."""
        rng = np.random.default_rng(9)
        for _ in range(100):
            n, mcols = rng.integers(1, 4, size=2)
            w = rng.random((n, mcols)) * 3.0
            f = matching_set_function(w)
            ground = [(u, i) for u in range(n) for i in range(mcols)]
            ok, _ = check_submodular(f, ground)
            assert ok
