"""
Test Tseitin encoding, miter construction and DIMACS I/O.
"""

import pytest

from cnf_encoding import (
    CnfFormula,
    add_io_constraint,
    build_miter,
    encode_netlist,
    equivalence_formula,
    parse_dimacs,
    tseitin,
)
from errors import DomainError, SolverError
from netlist import Gate, Netlist, key_assignment, parse_bench, simulate
from satcore import CdclSolver


def solve(formula, assumptions=()):
    return CdclSolver(formula.num_vars, formula.clauses).solve(assumptions)


class TestTseitin:
    """Test per-gate encodings and the projection property."""

    def test_and_gate_clauses(self):
        """Test the three AND clauses {(~a|~b|y), (a|~y), (b|~y)}."""
        net = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)\n")
        formula = tseitin(net)
        a, b, y = formula.var_map["a"], formula.var_map["b"], formula.var_map["y"]
        assert sorted(map(sorted, formula.clauses)) == sorted(map(sorted, [[-a, -b, y], [a, -y], [b, -y]]))

    def test_xor_gate_clauses(self):
        """Test that a 2-input XOR takes four clauses."""
        net = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = XOR(a, b)\n")
        assert len(tseitin(net).clauses) == 4

    def test_variable_count(self, sample_host):
        """Test one variable per wire when no XOR chains are needed."""
        formula = tseitin(sample_host)
        assert formula.num_vars == len(sample_host.wires)
        assert set(formula.var_map) == set(sample_host.wires)

    def test_random_differential(self, c17_locked, rng):
        """Test 1000 random full assignments: forced values satisfy the CNF iff simulation agrees."""
        net = c17_locked.locked
        formula = tseitin(net)
        wires = net.wires
        for _ in range(1000):
            assignment = {w: int(rng.integers(0, 2)) for w in net.inputs}
            values = simulate(net, assignment, all_wires=True)
            model = [False] * (formula.num_vars + 1)
            for wire in wires:
                model[formula.var_map[wire]] = bool(values[wire])
            assert formula.is_satisfied_by(model)
            flipped = list(model)
            victim = net.outputs[int(rng.integers(0, len(net.outputs)))]
            flipped[formula.var_map[victim]] = not flipped[formula.var_map[victim]]
            assert not formula.is_satisfied_by(flipped)

    def test_multi_input_xor(self):
        """Test that a 3-input XNOR encodes its parity."""
        net = Netlist(["a", "b", "c"], ["y"], [Gate("XNOR", ("a", "b", "c"), "y")])
        formula = tseitin(net)
        y = formula.var_map["y"]
        for pattern in range(8):
            assumptions = [formula.var_map[w] if (pattern >> i) & 1 else -formula.var_map[w]
                           for i, w in enumerate("abc")]
            result = solve(formula, assumptions)
            assert result.satisfiable
            assert result.value(y) == (bin(pattern).count("1") % 2 == 0)

    def test_empty_clause_rejected(self):
        """Test that adding an empty clause raises a domain error."""
        with pytest.raises(DomainError):
            CnfFormula(num_vars=2).add_clause([])


class TestFolding:
    """Test constant-folded encodings."""

    def test_fold_constants(self):
        """Test that folding a fully bound AND produces no clauses."""
        net = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)\n")
        formula = CnfFormula()
        values = encode_netlist(formula, net, {"a": True, "b": False}, fold=True)
        assert values["y"] is False
        assert formula.clauses == []

    def test_io_constraint_contradiction(self):
        """Test that an impossible response raises a domain error."""
        net = parse_bench("INPUT(a)\nINPUT(keyinput0)\nOUTPUT(y)\ny = AND(a, a)\nz = XOR(a, keyinput0)\n")
        formula = CnfFormula()
        key_var = formula.new_var("keyinput0")
        with pytest.raises(DomainError):
            add_io_constraint(formula, net, {"a": 0}, {"keyinput0": key_var}, [1])


class TestMiter:
    """Test miter construction."""

    def test_antisat_miter_satisfiable(self, antisat_locked_n2):
        """Test that wrong keys make the Anti-SAT n=2 miter satisfiable."""
        miter = build_miter(antisat_locked_n2.locked)
        assert len(miter.k1_vars) == 4
        assert set(miter.k1_vars.values()).isdisjoint(miter.k2_vars.values())
        result = solve(miter.formula)
        assert result.satisfiable
        assert any(result.value(a) != result.value(b) for a, b in zip(miter.y1_vars, miter.y2_vars))

    def test_unlocked_rejected(self, sample_host):
        """Test that a circuit without key inputs has no miter."""
        with pytest.raises(DomainError):
            build_miter(sample_host)

    def test_all_patterns_close_the_miter(self, antisat_locked_n2):
        """Test that constraining both copies on all 2^n patterns makes the miter UNSAT."""
        locked, oracle = antisat_locked_n2.locked, antisat_locked_n2.oracle
        miter = build_miter(locked)
        for pattern in range(4):
            bits = {w: (pattern >> i) & 1 for i, w in enumerate(locked.primary_inputs)}
            response = oracle.query(pattern)
            for key_vars in (miter.k1_vars, miter.k2_vars):
                add_io_constraint(miter.formula, locked, bits, key_vars, response)
        assert not solve(miter.formula).satisfiable


class TestEquivalence:
    """Test keyed equivalence formulas."""

    def test_right_key_equivalent(self, antisat_locked_n4):
        """Test that the right key yields an UNSAT difference formula."""
        fixture = antisat_locked_n4
        formula = equivalence_formula(fixture.locked, fixture.key, fixture.oracle.net, fixture.oracle.key)
        assert not solve(formula).satisfiable

    def test_wrong_key_differs(self, antisat_locked_n4):
        """Test that a wrong key yields a satisfiable difference formula."""
        fixture = antisat_locked_n4
        formula = equivalence_formula(fixture.locked, key_assignment(4, 0, 1),
                                      fixture.oracle.net, fixture.oracle.key)
        assert solve(formula).satisfiable


class TestDimacs:
    """Test DIMACS text."""

    def test_export_and_parse(self, sample_host):
        """Test that exported DIMACS parses back to the same clauses."""
        formula = tseitin(sample_host)
        text = formula.to_dimacs(["c17"])
        assert text.splitlines()[1] == f"p cnf {formula.num_vars} {len(formula.clauses)}"
        parsed = parse_dimacs(text)
        assert parsed.num_vars == formula.num_vars
        assert parsed.clauses == formula.clauses

    def test_export_byte_stable(self, sample_host):
        """Test that two encodings of the same netlist emit identical text."""
        assert tseitin(sample_host).to_dimacs() == tseitin(sample_host).to_dimacs()
        assert tseitin(sample_host).variable_map_json() == tseitin(sample_host).variable_map_json()

    def test_missing_header(self):
        """Test that clauses before the header are rejected."""
        with pytest.raises(SolverError):
            parse_dimacs("1 -2 0\n")

    def test_malformed_header(self):
        """Test that a non-CNF header is rejected."""
        with pytest.raises(SolverError):
            parse_dimacs("p dnf 2 1\n1 2 0\n")

    def test_multiline_clause(self):
        """Test that a clause may span lines."""
        parsed = parse_dimacs("p cnf 3 1\n1 -2\n3 0\n")
        assert parsed.clauses == [[1, -2, 3]]
