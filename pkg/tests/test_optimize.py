import itertools
import io

import numpy as np
import pytest

from polycontain.config import override_settings
from polycontain.errors import InvalidInputError, ResourceLimitError, SolverError
from polycontain.optimize import (FEASIBILITY, INFEASIBLE, MAXIMIZE, MINIMIZE, OPTIMAL, UNBOUNDED, LinearModel,
                                  get_solver, solve, solve_lp, solve_milp)

SOLVERS = ["simplex", "highs"]


def _small_lp():
    # max x + y  s.t.  x + 2y <= 4, 3x + y <= 6, x, y >= 0
    model = LinearModel("small")
    x = model.add_matrix_var(2, 1, nonneg=True, name="x")
    model.add_matrix_inequality(np.array([[1.0, 2.0], [3.0, 1.0]]) @ x, [4.0, 6.0])
    model.set_objective(np.ones((1, 2)) @ x, MAXIMIZE)
    return model, x


@pytest.mark.parametrize("solver", SOLVERS)
def test_small_lp(solver):
    model, x = _small_lp()
    with override_settings(solver=solver):
        sol = solve(model)
    assert sol.status == OPTIMAL
    assert sol.optimal
    assert np.allclose(sol.value(x).reshape(-1), [1.6, 1.2])
    assert np.isclose(sol.objective_value, 2.8)


@pytest.mark.parametrize("solver", SOLVERS)
def test_infeasible_and_unbounded(solver):
    model = LinearModel("infeasible")
    x = model.add_scalar_var(nonneg=True, name="x")
    model.add_matrix_inequality(x, -1.0)
    with override_settings(solver=solver):
        assert solve(model).status == INFEASIBLE

    model = LinearModel("unbounded")
    x = model.add_scalar_var(nonneg=True, name="x")
    model.add_matrix_inequality(-x, 1.0)
    model.set_objective(x, MAXIMIZE)
    with override_settings(solver=solver):
        sol = solve(model)
    assert sol.status == UNBOUNDED
    with pytest.raises(SolverError):
        sol.value(x)


@pytest.mark.parametrize("solver", SOLVERS)
def test_equalities_and_free_variables(solver):
    # min |a| + |b| with a - b = 3 and a + b = 1 gives a = 2, b = -1
    model = LinearModel("free")
    v = model.add_signed_var(2, 1, name="v")
    model.add_matrix_equality(np.array([[1.0, -1.0], [1.0, 1.0]]) @ v.expr, [3.0, 1.0])
    model.set_objective(np.ones((1, 2)) @ v.abs_bound, MINIMIZE)
    with override_settings(solver=solver):
        sol = solve(model)
    assert np.allclose(sol.value(v).reshape(-1), [2.0, -1.0])
    assert np.isclose(sol.objective_value, 3.0)


def test_beale_cycling_example():
    # degenerate LP on which textbook Dantzig pivoting cycles
    c = np.array([[-0.75, 20.0, -0.5, 6.0]])
    A = np.array([[0.25, -8.0, -1.0, 9.0], [0.5, -12.0, -0.5, 3.0], [0.0, 0.0, 1.0, 0.0]])
    b = np.array([0.0, 0.0, 1.0])
    model = LinearModel("beale")
    x = model.add_matrix_var(4, 1, nonneg=True, name="x")
    model.add_matrix_inequality(A @ x, b)
    model.set_objective(c @ x, MINIMIZE)
    with override_settings(solver="simplex", stalled_pivots_before_lexicographic=1):
        sol = solve(model)
    assert sol.status == OPTIMAL
    assert np.isclose(sol.objective_value, -1.25)
    values = sol.value(x).reshape(-1)
    assert np.all(A @ values <= b + 1e-9)


@pytest.mark.parametrize("threshold", [1, 50])
def test_highly_degenerate_vertex_terminates(threshold, rng):
    # sixty facets through the optimal vertex (1, 1, 1, 1)
    A = rng.uniform(0.1, 1.0, size=(60, 4))
    b = A.sum(axis=1)
    c = A[:3].sum(axis=0).reshape(1, -1)
    model = LinearModel("degenerate")
    x = model.add_matrix_var(4, 1, nonneg=True, name="x")
    model.add_matrix_inequality(A @ x, b)
    model.set_objective(c @ x, MAXIMIZE)
    with override_settings(solver="simplex", max_pivots=2000, stalled_pivots_before_lexicographic=threshold):
        sol = solve(model)
    assert sol.status == OPTIMAL
    assert np.isclose(sol.objective_value, c.sum())
    assert sol.pivots < 2000


@pytest.mark.parametrize("solver", SOLVERS)
def test_strong_duality_on_random_lps(solver, rng):
    # max c'x, Ax <= b, x >= 0 against min b'y, A'y >= c, y >= 0 with positive data
    with override_settings(solver=solver):
        for _ in range(100):
            m, n = rng.integers(2, 6, size=2)
            A = rng.uniform(0.1, 1.0, size=(m, n))
            b = rng.uniform(1.0, 2.0, size=m)
            c = rng.uniform(0.1, 1.0, size=n)
            primal = LinearModel("primal")
            x = primal.add_matrix_var(n, 1, nonneg=True, name="x")
            primal.add_matrix_inequality(A @ x, b)
            primal.set_objective(c.reshape(1, -1) @ x, MAXIMIZE)
            dual = LinearModel("dual")
            y = dual.add_matrix_var(m, 1, nonneg=True, name="y")
            dual.add_matrix_inequality(-(A.T @ y), -c)
            dual.set_objective(b.reshape(1, -1) @ y, MINIMIZE)
            p, d = solve(primal), solve(dual)
            assert p.status == OPTIMAL and d.status == OPTIMAL
            assert np.isclose(p.objective_value, d.objective_value, rtol=1e-7, atol=1e-8)


@pytest.mark.parametrize("solver", SOLVERS)
def test_knapsack_matches_brute_force(solver, rng):
    for _ in range(5):
        weights = rng.integers(1, 10, size=6).astype(float)
        values = rng.integers(1, 10, size=6).astype(float)
        capacity = float(weights.sum() // 2)
        model = LinearModel("knapsack")
        pick = model.add_matrix_var(6, 1, binary=True, name="pick")
        model.add_matrix_inequality(weights.reshape(1, -1) @ pick, capacity)
        model.set_objective(values.reshape(1, -1) @ pick, MAXIMIZE)
        with override_settings(solver=solver):
            sol = solve_milp(model)
        best = max(values @ np.array(s) for s in itertools.product([0, 1], repeat=6)
                   if weights @ np.array(s) <= capacity)
        assert sol.status == OPTIMAL
        assert np.isclose(sol.objective_value, best)
        chosen = sol.value(pick).reshape(-1)
        assert np.allclose(chosen, np.round(chosen))
        assert weights @ chosen <= capacity + 1e-9


def test_infeasible_milp():
    model = LinearModel("parity")
    d = model.add_matrix_var(2, 1, binary=True, name="d")
    model.add_matrix_equality(np.ones((1, 2)) @ d, 0.5)
    assert solve(model).status == INFEASIBLE


def test_inf_norm_bound():
    # min t with |a - 1| + |b + 2| <= t written through envelopes
    model = LinearModel("norm")
    v = model.add_matrix_var(1, 2, name="v")
    t = model.add_scalar_var(nonneg=True, name="t")
    model.add_inf_norm_bound([v - np.array([[1.0, -2.0]])], t, name="norm")
    model.add_matrix_inequality(v[0, 0], 0.0)
    model.set_objective(t, MINIMIZE)
    sol = solve(model)
    assert np.isclose(sol.value(t), 1.0)

    # row-wise bound on a signed variable
    model = LinearModel("rows")
    S = model.add_signed_var(2, 2, name="S")
    model.add_matrix_equality(S.expr, np.array([[1.0, -1.0], [0.5, 0.0]]))
    bound = model.add_matrix_var(2, 1, nonneg=True, name="bound")
    model.add_inf_norm_bound([S], bound)
    model.set_objective(np.ones((1, 2)) @ bound, MINIMIZE)
    sol = solve(model)
    assert np.allclose(sol.value(bound).reshape(-1), [2.0, 0.5])


def test_feasibility_problem_has_no_objective():
    model = LinearModel("feasibility")
    x = model.add_matrix_var(2, 1, lb=1.0, ub=2.0, name="x")
    model.set_objective(None, FEASIBILITY)
    sol = solve(model)
    assert sol.optimal
    assert np.all((sol.value(x) >= 1.0 - 1e-9) & (sol.value(x) <= 2.0 + 1e-9))


def test_ndarray_matmul_builds_expressions():
    model = LinearModel()
    x = model.add_matrix_var(2, 3)
    e = np.ones((4, 2)) @ x
    assert e.shape == (4, 3)
    assert (x @ np.ones((3, 1))).shape == (2, 1)
    with pytest.raises(InvalidInputError):
        x + model.add_matrix_var(3, 2)


def test_dump_lists_rows_and_bounds():
    model, _ = _small_lp()
    buffer = io.StringIO()
    text = model.dump(buffer)
    assert buffer.getvalue() == text
    assert "maximize" in text
    assert "subject to" in text
    assert text.count(" <= ") >= 4
    assert text.rstrip().endswith("end")

    model = LinearModel("bin")
    model.add_matrix_var(1, 2, binary=True, name="d")
    assert "binary\nd[0,0]\nd[0,1]" in model.dump()


def test_model_errors():
    model = LinearModel()
    x = model.add_matrix_var(2, 1)
    with pytest.raises(InvalidInputError):
        model.set_objective(x, MINIMIZE)
    with pytest.raises(InvalidInputError):
        model.set_objective(x[0, 0], "sideways")
    with pytest.raises(InvalidInputError):
        model.add_matrix_equality(x, np.zeros((3, 1)))
    with pytest.raises(InvalidInputError):
        model.add_matrix_var(-1, 2)
    with pytest.raises(InvalidInputError):
        get_solver("cplex")

    model.add_matrix_var(1, 1, binary=True)
    with pytest.raises(InvalidInputError):
        solve_lp(model)


def test_resource_limits():
    model, _ = _small_lp()
    with override_settings(solver="simplex", max_pivots=1):
        with pytest.raises(ResourceLimitError):
            solve(model)

    model = LinearModel("knapsack")
    pick = model.add_matrix_var(3, 1, binary=True)
    model.add_matrix_inequality(np.array([[2.0, 2.0, 2.0]]) @ pick, 3.0)
    model.set_objective(np.ones((1, 3)) @ pick, MAXIMIZE)
    with override_settings(solver="simplex", node_limit=1):
        with pytest.raises(ResourceLimitError):
            solve(model)
