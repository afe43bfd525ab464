"""
Test the embedded CDCL solver and the external-solver bridge.
"""

import itertools
import sys

import pytest

from errors import ConfigError, SolverError
from satcore import (
    CdclSolver,
    ExternalSolver,
    SolveStatus,
    luby,
    make_solver,
    parse_solver_output,
    verify_model,
)


def pigeonhole(holes):
    """holes+1 pigeons into holes holes: always UNSAT."""
    pigeons = holes + 1

    def var(p, h):
        return p * holes + h + 1

    clauses = [[var(p, h) for h in range(holes)] for p in range(pigeons)]
    for h in range(holes):
        for p, q in itertools.combinations(range(pigeons), 2):
            clauses.append([-var(p, h), -var(q, h)])
    return pigeons * holes, clauses


def random_3sat(rng, num_vars, num_clauses):
    clauses = []
    for _ in range(num_clauses):
        chosen = rng.choice(num_vars, size=3, replace=False) + 1
        signs = rng.choice([-1, 1], size=3)
        clauses.append([int(v * s) for v, s in zip(chosen, signs)])
    return clauses


def brute_force_sat(num_vars, clauses):
    for bits in itertools.product([False, True], repeat=num_vars):
        model = [False] + list(bits)
        if verify_model(clauses, model):
            return True
    return False


class TestCdclSolver:
    """Test the embedded CDCL solver."""

    def test_small_sat(self):
        """Test a satisfiable formula and its model."""
        clauses = [[1, 2], [-1, 3], [-2, -3], [-3, 1]]
        result = CdclSolver(3, clauses).solve()
        assert result.status is SolveStatus.SAT
        assert verify_model(clauses, result.model)

    def test_small_unsat(self):
        """Test x and not x."""
        result = CdclSolver(1, [[1], [-1]]).solve()
        assert result.status is SolveStatus.UNSAT
        assert result.model is None

    def test_pigeonhole_unsat(self):
        """Test that 5 pigeons do not fit into 4 holes."""
        num_vars, clauses = pigeonhole(4)
        assert CdclSolver(num_vars, clauses).solve().status is SolveStatus.UNSAT

    def test_random_against_brute_force(self, rng):
        """Test random 3-SAT instances near the threshold against enumeration."""
        for _ in range(40):
            clauses = random_3sat(rng, 10, 43)
            result = CdclSolver(10, clauses, seed=1).solve()
            assert result.satisfiable == brute_force_sat(10, clauses)
            if result.satisfiable:
                assert verify_model(clauses, result.model)

    def test_incremental(self):
        """Test that clauses added between solves are conjoined."""
        solver = CdclSolver(2, [[1, 2]])
        assert solver.solve().satisfiable
        solver.add_clauses([[-1]])
        result = solver.solve()
        assert result.satisfiable
        assert result.value(2) and not result.value(1)
        solver.add_clauses([[-2]])
        assert solver.solve().status is SolveStatus.UNSAT

    def test_new_variables_grow(self):
        """Test that clauses over unseen variables extend the solver."""
        solver = CdclSolver()
        solver.add_clauses([[5, -7]])
        assert solver.num_vars == 7
        assert solver.solve().satisfiable

    def test_assumptions(self):
        """Test that UNSAT under assumptions is not permanent."""
        solver = CdclSolver(2, [[1, 2], [-1, 2]])
        assert solver.solve([-2]).status is SolveStatus.UNSAT
        result = solver.solve([1])
        assert result.satisfiable
        assert result.value(1) and result.value(2)

    def test_conflict_cap(self):
        """Test that a conflict cap turns a hard instance into UNKNOWN."""
        num_vars, clauses = pigeonhole(7)
        result = CdclSolver(num_vars, clauses, conflict_cap=5).solve()
        assert result.status is SolveStatus.UNKNOWN
        assert not result.satisfiable

    def test_seeded_runs_are_reproducible(self, rng):
        """Test that the same seed yields the same model."""
        clauses = random_3sat(rng, 30, 100)
        first = CdclSolver(30, clauses, seed=11).solve()
        second = CdclSolver(30, clauses, seed=11).solve()
        assert first.status == second.status
        assert first.model == second.model

    def test_value_without_model(self):
        """Test that reading a value from an UNSAT result raises a solver error."""
        result = CdclSolver(1, [[1], [-1]]).solve()
        with pytest.raises(SolverError):
            result.value(1)


class TestLuby:
    """Test the restart sequence."""

    def test_prefix(self):
        """Test the first fifteen Luby values."""
        assert [luby(i) for i in range(15)] == [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]


class TestExternalSolver:
    """Test the external solver bridge."""

    def test_parse_sat_output(self):
        """Test competition-format SAT output."""
        result = parse_solver_output("c hello\ns SATISFIABLE\nv 1 -2\nv 3 0\n", 3)
        assert result.status is SolveStatus.SAT
        assert result.model == [False, True, False, True]

    def test_parse_unsat_output(self):
        """Test competition-format UNSAT output."""
        result = parse_solver_output("s UNSATISFIABLE\n", 3)
        assert result.status is SolveStatus.UNSAT

    def test_parse_missing_status(self):
        """Test that output without a status line raises a solver error."""
        with pytest.raises(SolverError):
            parse_solver_output("c nothing\n", 2)

    def test_factory(self):
        """Test solver selection and its configuration errors."""
        assert isinstance(make_solver("embedded", seed=3), CdclSolver)
        assert isinstance(make_solver("external", command="kissat -q"), ExternalSolver)
        with pytest.raises(ConfigError):
            make_solver("external")
        with pytest.raises(ConfigError):
            make_solver("minisat-ish")

    def test_missing_binary(self):
        """Test that an unrunnable command raises a solver error."""
        solver = ExternalSolver("/nonexistent/solver-binary", 1, [[1]])
        with pytest.raises(SolverError):
            solver.solve()

    @pytest.mark.integration
    def test_scripted_solver(self, tmp_path):
        """Test a stand-in solver script that always answers SAT with x1 true."""
        script = tmp_path / "fake_solver.py"
        script.write_text("print('s SATISFIABLE')\nprint('v 1 0')\n", encoding="utf-8")
        solver = ExternalSolver([sys.executable, str(script)], 1, [[1]])
        result = solver.solve()
        assert result.satisfiable
        assert result.value(1)
