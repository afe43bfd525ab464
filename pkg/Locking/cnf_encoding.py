"""
CNF Encoding Module
Tseitin encoding of netlists, miter construction for distinguishing-input
search, constant-folded oracle-consistency copies and DIMACS I/O.

Literals are signed DIMACS integers; while folding, a wire may also be a
Python bool constant.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Union

from errors import DomainError, SolverError
from netlist import Netlist

logger = logging.getLogger(__name__)

Literal = Union[int, bool]


@dataclass
class CnfFormula:
    """Clause list with a wire-to-variable map."""

    num_vars: int = 0
    clauses: List[List[int]] = field(default_factory=list)
    var_map: Dict[str, int] = field(default_factory=dict)

    def new_var(self, name: Optional[str] = None) -> int:
        self.num_vars += 1
        if name is not None:
            self.var_map[name] = self.num_vars
        return self.num_vars

    def add_clause(self, clause: Sequence[int]) -> None:
        clause = [int(lit) for lit in clause]
        if not clause:
            raise DomainError("Refusing to add an empty clause")
        for lit in clause:
            if lit == 0 or abs(lit) > self.num_vars:
                raise DomainError(f"Literal {lit} outside variables 1..{self.num_vars}")
        self.clauses.append(clause)

    def extend(self, clauses) -> None:
        for clause in clauses:
            self.add_clause(clause)

    def is_satisfied_by(self, model: Sequence[bool]) -> bool:
        """model[v] is the value of variable v (index 0 unused)."""
        return all(any(model[abs(l)] == (l > 0) for l in clause) for clause in self.clauses)

    def to_dimacs(self, comments: Sequence[str] = ()) -> str:
        lines = [f"c {c}" for c in comments]
        lines.append(f"p cnf {self.num_vars} {len(self.clauses)}")
        lines += [" ".join(str(l) for l in clause) + " 0" for clause in self.clauses]
        return "\n".join(lines) + "\n"

    def variable_map_json(self) -> str:
        ordered = dict(sorted(self.var_map.items(), key=lambda item: (item[1], item[0])))
        return json.dumps(ordered, indent=2) + "\n"


def parse_dimacs(text: str) -> CnfFormula:
    """
    Parse DIMACS CNF; clauses may span lines.

    Raises:
        SolverError: on a missing or malformed header
    """
    formula = CnfFormula()
    declared = None
    pending: List[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise SolverError(f"Malformed DIMACS header: {line!r}")
            formula.num_vars = int(parts[2])
            declared = int(parts[3])
            continue
        if declared is None:
            raise SolverError("Clause before the DIMACS header")
        for token in line.split():
            lit = int(token)
            if lit == 0:
                if pending:
                    formula.add_clause(pending)
                pending = []
            else:
                pending.append(lit)
    if pending:
        formula.add_clause(pending)
    if declared is None:
        raise SolverError("Missing DIMACS header")
    if declared != len(formula.clauses):
        logger.warning("DIMACS header declares %d clauses, found %d", declared, len(formula.clauses))
    return formula


def _negate(value: Literal) -> Literal:
    if isinstance(value, bool):
        return not value
    return -value


def _and_clauses(out: int, lits: Sequence[int]) -> List[List[int]]:
    return [[-a for a in lits] + [out]] + [[a, -out] for a in lits]


def _or_clauses(out: int, lits: Sequence[int]) -> List[List[int]]:
    return [list(lits) + [-out]] + [[-a, out] for a in lits]


def _xor2_clauses(out: int, a: int, b: int) -> List[List[int]]:
    return [[-a, -b, -out], [a, b, -out], [a, -b, out], [-a, b, out]]


class _GateEncoder:
    """Writes gate clauses into a formula, optionally folding constants."""

    def __init__(self, formula: CnfFormula, fold: bool, prefix: str = ""):
        self.formula = formula
        self.fold = fold
        self.prefix = prefix

    def _xor_chain(self, out: int, lits: Sequence[int]) -> None:
        acc = lits[0]
        for i, lit in enumerate(lits[1:], start=1):
            target = out if i == len(lits) - 1 else self.formula.new_var()
            self.formula.extend(_xor2_clauses(target, acc, lit))
            acc = target

    def full(self, kind: str, out: int, lits: Sequence[int]) -> None:
        """Standard encoding of one gate onto an existing output variable."""
        if kind in ("AND", "NAND"):
            self.formula.extend(_and_clauses(out if kind == "AND" else -out, lits))
        elif kind in ("OR", "NOR"):
            self.formula.extend(_or_clauses(out if kind == "OR" else -out, lits))
        elif kind in ("XOR", "XNOR"):
            target = out if kind == "XOR" else -out
            if len(lits) == 1:
                self.formula.extend([[-lits[0], target], [lits[0], -target]])
            else:
                self._xor_chain(target, lits)
        elif kind == "NOT":
            self.formula.extend([[lits[0], out], [-lits[0], -out]])
        else:
            self.formula.extend([[-lits[0], out], [lits[0], -out]])

    def folded(self, kind: str, values: Sequence[Literal]) -> Literal:
        if kind in ("NOT", "BUF"):
            return _negate(values[0]) if kind == "NOT" else values[0]
        if kind in ("XOR", "XNOR"):
            return self._fold_xor(values, kind == "XNOR")
        is_and = kind in ("AND", "NAND")
        inverted = kind in ("NAND", "NOR")
        # AND is dominated by False, OR by True
        dominant = not is_and
        lits: List[int] = []
        seen = set()
        result: Optional[Literal] = None
        for value in values:
            if isinstance(value, bool):
                if value == dominant:
                    result = dominant
                    break
                continue
            if -value in seen:
                result = dominant
                break
            if value not in seen:
                seen.add(value)
                lits.append(value)
        if result is None:
            if not lits:
                result = not dominant
            elif len(lits) == 1:
                result = lits[0]
            else:
                out = self.formula.new_var()
                self.formula.extend(_and_clauses(out, lits) if is_and else _or_clauses(out, lits))
                result = out
        return _negate(result) if inverted else result

    def _fold_xor(self, values: Sequence[Literal], parity: bool) -> Literal:
        active: Dict[int, int] = {}
        for value in values:
            if isinstance(value, bool):
                parity ^= value
                continue
            var = abs(value)
            if value < 0:
                parity = not parity
            if var in active:
                del active[var]
            else:
                active[var] = var
        lits = list(active)
        if not lits:
            return parity
        if len(lits) == 1:
            return -lits[0] if parity else lits[0]
        out = self.formula.new_var()
        self._xor_chain(out, lits)
        return -out if parity else out


def encode_netlist(formula: CnfFormula, net: Netlist, bindings: Optional[Mapping[str, Literal]] = None,
                   fold: bool = False, prefix: str = "") -> Dict[str, Literal]:
    """
    Encode ``net`` into ``formula`` and return the literal of every wire.

    Unbound inputs get fresh variables named ``prefix + wire``. Without
    folding every gate output gets its own variable; with folding, constant
    and aliased wires produce no clauses.
    """
    bindings = dict(bindings or {})
    encoder = _GateEncoder(formula, fold, prefix)
    values: Dict[str, Literal] = {}
    for wire in net.inputs:
        if wire in bindings:
            value = bindings[wire]
            if not fold and isinstance(value, bool):
                var = formula.new_var(prefix + wire)
                formula.add_clause([var if value else -var])
                value = var
            values[wire] = value
        else:
            values[wire] = formula.new_var(prefix + wire)
    for gate in net.topological_gates():
        ins = [values[w] for w in gate.inputs]
        if fold:
            values[gate.output] = encoder.folded(gate.kind, ins)
        else:
            out = formula.new_var(prefix + gate.output)
            encoder.full(gate.kind, out, ins)
            values[gate.output] = out
    return values


def tseitin(net: Netlist) -> CnfFormula:
    """One variable per wire plus XOR-chain auxiliaries."""
    formula = CnfFormula()
    encode_netlist(formula, net)
    return formula


@dataclass
class Miter:
    """Two locked-circuit copies sharing X, with an output-difference constraint."""

    formula: CnfFormula
    x_vars: Dict[str, int]
    k1_vars: Dict[str, int]
    k2_vars: Dict[str, int]
    y1_vars: List[int]
    y2_vars: List[int]


def build_miter(locked: Netlist) -> Miter:
    """
    Raises:
        DomainError: when the netlist has no key inputs
    """
    if not locked.key_inputs:
        raise DomainError("Miter needs a netlist with key inputs")
    formula = CnfFormula()
    x_vars = {w: formula.new_var(w) for w in locked.primary_inputs}
    first = encode_netlist(formula, locked, x_vars, prefix="c1_")
    second = encode_netlist(formula, locked, x_vars, prefix="c2_")
    y1 = [first[w] for w in locked.outputs]
    y2 = [second[w] for w in locked.outputs]
    diffs = []
    for index, (a, b) in enumerate(zip(y1, y2)):
        diff = formula.new_var(f"diff_{locked.outputs[index]}")
        formula.extend(_xor2_clauses(diff, a, b))
        diffs.append(diff)
    formula.add_clause(diffs)
    return Miter(
        formula=formula,
        x_vars=x_vars,
        k1_vars={k: first[k] for k in locked.key_inputs},
        k2_vars={k: second[k] for k in locked.key_inputs},
        y1_vars=y1,
        y2_vars=y2,
    )


def add_io_constraint(formula: CnfFormula, locked: Netlist, pattern: Mapping[str, int],
                      key_vars: Mapping[str, int], response: Sequence[int]) -> int:
    """
    Constrain key variables so the locked circuit maps ``pattern`` to
    ``response``. Inputs are folded to constants; returns clauses added.

    Raises:
        DomainError: when the response contradicts the circuit for every key
    """
    before = len(formula.clauses)
    bindings: Dict[str, Literal] = {w: bool(pattern[w]) for w in locked.primary_inputs}
    bindings.update(key_vars)
    values = encode_netlist(formula, locked, bindings, fold=True)
    for wire, expected in zip(locked.outputs, response):
        value = values[wire]
        if isinstance(value, bool):
            if value != bool(expected):
                raise DomainError(f"Oracle output {wire}={expected} cannot be produced by any key")
            continue
        formula.add_clause([value if expected else -value])
    return len(formula.clauses) - before


def equivalence_formula(left: Netlist, left_key: Mapping[str, int],
                        right: Netlist, right_key: Mapping[str, int]) -> CnfFormula:
    """Satisfiable iff the two keyed circuits differ on some input pattern."""
    if len(left.primary_inputs) != len(right.primary_inputs) or len(left.outputs) != len(right.outputs):
        raise DomainError("Circuits differ in input or output arity")
    formula = CnfFormula()
    x_vars = [formula.new_var(w) for w in left.primary_inputs]
    left_bind: Dict[str, Literal] = dict(zip(left.primary_inputs, x_vars))
    left_bind.update({k: bool(v) for k, v in left_key.items()})
    right_bind: Dict[str, Literal] = dict(zip(right.primary_inputs, x_vars))
    right_bind.update({k: bool(v) for k, v in right_key.items()})
    lv = encode_netlist(formula, left, left_bind, fold=True)
    rv = encode_netlist(formula, right, right_bind, fold=True)
    encoder = _GateEncoder(formula, fold=True)
    diffs: List[int] = []
    for a, b in zip(left.outputs, right.outputs):
        diff = encoder.folded("XOR", [lv[a], rv[b]])
        if diff is True:
            diffs = [formula.new_var()]
            formula.add_clause([diffs[0]])
            break
        if diff is not False:
            diffs.append(diff)
    if not diffs:
        # outputs agree structurally: force UNSAT with a contradictory pair
        var = formula.new_var()
        formula.add_clause([var])
        formula.add_clause([-var])
    else:
        formula.add_clause(diffs)
    return formula
