import itertools

import numpy as np
import pytest

from sparseloglin import LinearProgram, binarize, build_design, parse_generators, solve, sufficient_statistic

from conftest import make_table


def brute_force_max(c, a_mat, b, tol=1e-9):
    """Enumerate every basis; return the best feasible vertex objective.

    Independent oracle for equality-form LPs whose feasible region is
    bounded: tries all column subsets of size m, solves the square
    system, and keeps the best nonnegative solution.
    """
    m, n = a_mat.shape
    best = None
    for cols in itertools.combinations(range(n), m):
        sub = a_mat[:, cols]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        x_b = np.linalg.solve(sub, b)
        if (x_b < -tol).any():
            continue
        x = np.zeros(n)
        x[list(cols)] = x_b
        val = float(c @ x)
        if best is None or val > best:
            best = val
    return best


def facial_lp(table, model, active):
    design = build_design(table, model)
    t_prime = sufficient_statistic(design, binarize(table).counts).t.astype(float)
    c = np.zeros(table.n_cells)
    c[list(active)] = 1.0
    return LinearProgram(c, design.matrix.T, t_prime), t_prime


class TestFacialLps:
    def test_haberman_zero_objective(self, haberman_table):
        model = parse_generators("[ab][ac][bc]")
        lp, t_prime = facial_lp(haberman_table, model, [0, 7])
        sol = solve(lp)
        assert sol.status == "optimal"
        assert abs(sol.objective_value) <= 1e-8
        assert sol.objective_value <= t_prime[0] + 1e-8

    def test_3x3x3_first_round_rescues_131(self, table3x3x3):
        model = parse_generators("[ab][bc][ac]")
        zero_cells = table3x3x3.zero_cells()
        lp, t_prime = facial_lp(table3x3x3, model, zero_cells)
        sol = solve(lp)
        assert sol.status == "optimal"
        assert sol.objective_value > 1e-8
        cell_131 = table3x3x3.flat_index((0, 2, 0))
        assert sol.point[cell_131] > 1e-8
        # every other zero cell receives no mass in the optimal vertex
        others = [i for i in zero_cells if i != cell_131]
        assert (sol.point[others] <= 1e-8).all()

    def test_zero_objective_feasible_system(self, haberman_table):
        model = parse_generators("[ab][ac][bc]")
        lp, _ = facial_lp(haberman_table, model, [])
        sol = solve(lp)
        assert sol.status == "optimal"
        assert sol.objective_value == 0.0
        assert sol.residual <= 1e-9


class TestEdgeCases:
    def test_infeasible(self):
        # x1 + x2 = -1 has no nonnegative solution
        lp = LinearProgram([1.0, 1.0], [[1.0, 1.0]], [-1.0])
        assert solve(lp).status == "infeasible"

    def test_infeasible_two_rows(self):
        lp = LinearProgram([0.0, 0.0], [[1.0, 1.0], [1.0, 1.0]], [1.0, 2.0])
        assert solve(lp).status == "infeasible"

    def test_unbounded(self):
        # max x1 with only 0*x1 = 0
        lp = LinearProgram([1.0], [[0.0]], [0.0])
        assert solve(lp).status == "unbounded"

    def test_redundant_row_handled(self):
        lp = LinearProgram([1.0, 0.0], [[1.0, 1.0], [2.0, 2.0]], [1.0, 2.0])
        sol = solve(lp)
        assert sol.status == "optimal"
        assert sol.objective_value == pytest.approx(1.0, abs=1e-9)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            LinearProgram([1.0], [[1.0, 2.0]], [1.0])

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            LinearProgram([np.inf, 1.0], [[1.0, 2.0]], [1.0])

    def test_negative_rhs_feasible(self):
        # x1 - x2 = -3, x1 + x2 = 5 -> x = (1, 4)
        lp = LinearProgram([1.0, 0.0], [[1.0, -1.0], [1.0, 1.0]], [-3.0, 5.0])
        sol = solve(lp)
        assert sol.status == "optimal"
        assert np.allclose(sol.point, [1.0, 4.0], atol=1e-9)


class TestDeterminism:
    def test_same_support_across_solves(self, table3x3x3):
        model = parse_generators("[ab][bc][ac]")
        lp, _ = facial_lp(table3x3x3, model, table3x3x3.zero_cells())
        s1 = solve(lp)
        s2 = solve(lp)
        assert np.array_equal(s1.support, s2.support)
        assert np.array_equal(s1.point, s2.point)


class TestAgainstBruteForce:
    def test_random_small_lps(self):
        rng = np.random.default_rng(42)
        checked = 0
        while checked < 120:
            m = int(rng.integers(1, 4))
            n = int(rng.integers(m, 7))
            a_mat = np.vstack([np.ones(n), rng.normal(size=(m - 1, n))]) if m > 1 else np.ones((1, n))
            x_feas = np.where(rng.random(n) < 0.5, 0.0, rng.random(n) * 3)
            if x_feas.sum() == 0:
                x_feas[int(rng.integers(n))] = 1.0
            b = a_mat @ x_feas
            c = rng.normal(size=n)
            # row of ones makes the feasible set bounded, so the brute
            # force enumeration is a complete oracle
            expect = brute_force_max(c, a_mat, b)
            assert expect is not None
            sol = solve(LinearProgram(c, a_mat, b))
            assert sol.status == "optimal"
            assert sol.objective_value == pytest.approx(expect, abs=1e-8)
            checked += 1
