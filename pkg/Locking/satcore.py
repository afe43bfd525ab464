"""
SAT Core Module
Incremental CDCL solver (two watched literals, first-UIP learning, VSIDS,
phase saving, Luby restarts, assumptions) plus an external-solver bridge
speaking DIMACS on disk.

Internal literal codes: variable v maps to 2v (positive) and 2v+1 (negative).
"""

import heapq
import logging
import random
import shlex
import subprocess
import tempfile
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

from errors import ConfigError, SolverError

logger = logging.getLogger(__name__)

ACTIVITY_LIMIT = 1e100


class SolveStatus(Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    UNKNOWN = "UNKNOWN"


@dataclass
class SolverStats:
    solves: int = 0
    decisions: int = 0
    propagations: int = 0
    conflicts: int = 0
    restarts: int = 0
    learned: int = 0

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class SolveResult:
    status: SolveStatus
    model: Optional[List[bool]] = None
    conflicts: int = 0
    stats: dict = field(default_factory=dict)

    @property
    def satisfiable(self) -> bool:
        return self.status is SolveStatus.SAT

    def value(self, literal: int) -> bool:
        """Truth value of a DIMACS literal under the model."""
        if self.model is None:
            raise SolverError(f"No model available for a {self.status.value} result")
        return self.model[abs(literal)] == (literal > 0)


def luby(index: int) -> int:
    """Luby sequence 1, 1, 2, 1, 1, 2, 4, ... (0-based)."""
    size, power = 1, 0
    while size < index + 1:
        power += 1
        size = 2 * size + 1
    while size - 1 != index:
        size = (size - 1) >> 1
        power -= 1
        index %= size
    return 2 ** power


def verify_model(clauses: Iterable[Sequence[int]], model: Sequence[bool]) -> bool:
    return all(any(model[abs(l)] == (l > 0) for l in clause) for clause in clauses)


class CdclSolver:
    """
    Incremental CDCL solver over DIMACS-style integer clauses.

    The variable range grows with the clauses added. ``conflict_cap`` bounds
    the conflicts of one ``solve`` call; hitting it yields UNKNOWN.
    """

    def __init__(self, num_vars: int = 0, clauses: Iterable[Sequence[int]] = (), *,
                 seed: Optional[int] = None, conflict_cap: Optional[int] = None,
                 restart_base: int = 100):
        self.num_vars = 0
        self.conflict_cap = conflict_cap
        self.restart_base = restart_base
        self.stats = SolverStats()
        self._rng = random.Random(seed) if seed is not None else None
        self._values = [0, 0]
        self._level = [0]
        self._reason: list = [None]
        self._activity = [0.0]
        self._phase = [False]
        self._seen = [False]
        self._watches: List[list] = [[], []]
        self._clauses: List[list] = []
        self._learnts: List[list] = []
        self._trail: List[int] = []
        self._trail_lim: List[int] = []
        self._qhead = 0
        self._heap: list = []
        self._var_inc = 1.0
        self._var_decay = 0.95
        self._max_learnts = 2000.0
        self._ok = True
        self.ensure_vars(num_vars)
        self.add_clauses(clauses)

    # variables and clauses

    def ensure_vars(self, count: int) -> None:
        for var in range(self.num_vars + 1, count + 1):
            self._values += [0, 0]
            self._level.append(0)
            self._reason.append(None)
            activity = self._rng.random() * 1e-5 if self._rng else 0.0
            self._activity.append(activity)
            self._phase.append(bool(self._rng.getrandbits(1)) if self._rng else False)
            self._seen.append(False)
            self._watches += [[], []]
            heapq.heappush(self._heap, (-activity, var))
        self.num_vars = max(self.num_vars, count)

    @property
    def num_clauses(self) -> int:
        return len(self._clauses)

    def add_clauses(self, clauses: Iterable[Sequence[int]]) -> None:
        """Conjoin clauses; may be called between solves."""
        self._cancel_until(0)
        for clause in clauses:
            self._add_clause(clause)

    def _add_clause(self, clause: Sequence[int]) -> None:
        if clause:
            self.ensure_vars(max(abs(int(l)) for l in clause))
        if not self._ok:
            return
        codes = []
        seen = set()
        for lit in clause:
            lit = int(lit)
            code = 2 * abs(lit) + (lit < 0)
            if code ^ 1 in seen:
                return
            if code in seen:
                continue
            value = self._values[code]
            if value == 1:
                return
            seen.add(code)
            if value == 0:
                codes.append(code)
        if not codes:
            self._ok = False
            return
        if len(codes) == 1:
            self._assign(codes[0], None)
            if self._propagate() is not None:
                self._ok = False
            return
        self._clauses.append(codes)
        self._watches[codes[0]].append(codes)
        self._watches[codes[1]].append(codes)

    # assignment

    def _assign(self, code: int, reason) -> None:
        var = code >> 1
        self._values[code] = 1
        self._values[code ^ 1] = -1
        self._level[var] = len(self._trail_lim)
        self._reason[var] = reason
        self._trail.append(code)

    def _cancel_until(self, level: int) -> None:
        if len(self._trail_lim) <= level:
            return
        values, reason, phase, activity = self._values, self._reason, self._phase, self._activity
        start = self._trail_lim[level]
        for code in reversed(self._trail[start:]):
            var = code >> 1
            phase[var] = not (code & 1)
            values[code] = 0
            values[code ^ 1] = 0
            reason[var] = None
            heapq.heappush(self._heap, (-activity[var], var))
        del self._trail[start:]
        del self._trail_lim[level:]
        self._qhead = len(self._trail)

    def _propagate(self):
        """Unit propagation; returns a conflicting clause or None."""
        values, trail, watches = self._values, self._trail, self._watches
        while self._qhead < len(trail):
            false_lit = trail[self._qhead] ^ 1
            self._qhead += 1
            watching = watches[false_lit]
            kept = []
            watches[false_lit] = kept
            index, total = 0, len(watching)
            while index < total:
                clause = watching[index]
                index += 1
                if clause[0] == false_lit:
                    clause[0], clause[1] = clause[1], false_lit
                first = clause[0]
                if values[first] == 1:
                    kept.append(clause)
                    continue
                for k in range(2, len(clause)):
                    candidate = clause[k]
                    if values[candidate] != -1:
                        clause[1] = candidate
                        clause[k] = false_lit
                        watches[candidate].append(clause)
                        break
                else:
                    kept.append(clause)
                    if values[first] == -1:
                        kept.extend(watching[index:])
                        self._qhead = len(trail)
                        return clause
                    self._assign(first, clause)
                    self.stats.propagations += 1
        return None

    # heuristics

    def _bump(self, var: int) -> None:
        activity = self._activity
        activity[var] += self._var_inc
        if activity[var] > ACTIVITY_LIMIT:
            for v in range(1, self.num_vars + 1):
                activity[v] *= 1e-100
            self._var_inc *= 1e-100
            self._rebuild_heap()
        elif self._values[2 * var] == 0:
            heapq.heappush(self._heap, (-activity[var], var))

    def _rebuild_heap(self) -> None:
        self._heap = [(-self._activity[v], v) for v in range(1, self.num_vars + 1)
                      if self._values[2 * v] == 0]
        heapq.heapify(self._heap)

    def _pick_branch(self) -> Optional[int]:
        heap, values, activity = self._heap, self._values, self._activity
        if len(heap) > 8 * self.num_vars + 1024:
            self._rebuild_heap()
            heap = self._heap
        while heap:
            neg_activity, var = heapq.heappop(heap)
            if values[2 * var] == 0 and -neg_activity == activity[var]:
                return 2 * var + (0 if self._phase[var] else 1)
        return None

    # conflict analysis

    def _analyze(self, conflict):
        seen, level, reason, trail = self._seen, self._level, self._reason, self._trail
        current = len(self._trail_lim)
        learnt = [0]
        pending = 0
        code = None
        index = len(trail) - 1
        clause = conflict
        while True:
            for lit in (clause if code is None else clause[1:]):
                var = lit >> 1
                if not seen[var] and level[var] > 0:
                    seen[var] = True
                    self._bump(var)
                    if level[var] >= current:
                        pending += 1
                    else:
                        learnt.append(lit)
            while not seen[trail[index] >> 1]:
                index -= 1
            code = trail[index]
            index -= 1
            var = code >> 1
            clause = reason[var]
            seen[var] = False
            pending -= 1
            if pending == 0:
                break
        learnt[0] = code ^ 1
        for lit in learnt[1:]:
            seen[lit >> 1] = False
        if len(learnt) == 1:
            return learnt, 0
        best = max(range(1, len(learnt)), key=lambda i: level[learnt[i] >> 1])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, level[learnt[1] >> 1]

    def _reduce_db(self) -> None:
        """Drop the longer half of learned clauses and simplify at level 0."""
        self._learnts.sort(key=len)
        keep = len(self._learnts) // 2
        self._learnts = [c for i, c in enumerate(self._learnts) if i < keep or len(c) <= 2]
        self._simplify()

    def _simplify(self) -> None:
        values = self._values
        self._watches = [[] for _ in range(2 * self.num_vars + 2)]
        survivors = {"original": [], "learnt": []}
        for kind, clauses in (("original", self._clauses), ("learnt", self._learnts)):
            for clause in clauses:
                if any(values[lit] == 1 for lit in clause):
                    continue
                reduced = [lit for lit in clause if values[lit] == 0]
                if not reduced:
                    self._ok = False
                    return
                if len(reduced) == 1:
                    self._assign(reduced[0], None)
                    if self._propagate() is not None:
                        self._ok = False
                        return
                    continue
                survivors[kind].append(reduced)
        self._clauses = survivors["original"]
        self._learnts = survivors["learnt"]
        for clause in self._clauses + self._learnts:
            self._watches[clause[0]].append(clause)
            self._watches[clause[1]].append(clause)
        # units found above may have satisfied or shortened other clauses
        if self._propagate() is not None:
            self._ok = False

    # search

    def solve(self, assumptions: Sequence[int] = ()) -> SolveResult:
        """
        Decide the conjunction of all clauses under ``assumptions``.
        UNSAT under assumptions does not make the solver permanently UNSAT.
        """
        self.stats.solves += 1
        if assumptions:
            self.ensure_vars(max(abs(int(l)) for l in assumptions))
        codes = [2 * abs(int(l)) + (int(l) < 0) for l in assumptions]
        self._cancel_until(0)
        if not self._ok or self._propagate() is not None:
            self._ok = False
            return SolveResult(SolveStatus.UNSAT, stats=self.stats.to_dict())

        conflicts = 0
        restart = 0
        while True:
            budget = self.restart_base * luby(restart)
            restart += 1
            status, used = self._search(budget, codes, conflicts)
            conflicts += used
            if status is not None:
                break
            self.stats.restarts += 1
            if len(self._learnts) > self._max_learnts:
                self._reduce_db()
                self._max_learnts *= 1.1
                if not self._ok:
                    status = SolveStatus.UNSAT
                    break

        model = None
        if status is SolveStatus.SAT:
            values = self._values
            model = [False] + [values[2 * v] == 1 for v in range(1, self.num_vars + 1)]
        self._cancel_until(0)
        return SolveResult(status, model, conflicts, self.stats.to_dict())

    def _search(self, budget: int, assumptions: List[int], spent: int):
        values = self._values
        conflicts = 0
        while True:
            conflict = self._propagate()
            if conflict is not None:
                conflicts += 1
                self.stats.conflicts += 1
                if not self._trail_lim:
                    self._ok = False
                    return SolveStatus.UNSAT, conflicts
                learnt, back_level = self._analyze(conflict)
                self._cancel_until(back_level)
                if len(learnt) == 1:
                    self._assign(learnt[0], None)
                else:
                    self._learnts.append(learnt)
                    self._watches[learnt[0]].append(learnt)
                    self._watches[learnt[1]].append(learnt)
                    self._assign(learnt[0], learnt)
                self.stats.learned += 1
                self._var_inc /= self._var_decay
                continue

            if self.conflict_cap is not None and spent + conflicts >= self.conflict_cap:
                self._cancel_until(0)
                return SolveStatus.UNKNOWN, conflicts
            if conflicts >= budget:
                self._cancel_until(0)
                return None, conflicts

            decision = None
            while len(self._trail_lim) < len(assumptions):
                code = assumptions[len(self._trail_lim)]
                if values[code] == 1:
                    self._trail_lim.append(len(self._trail))
                elif values[code] == -1:
                    self._cancel_until(0)
                    return SolveStatus.UNSAT, conflicts
                else:
                    decision = code
                    break
            if decision is None:
                decision = self._pick_branch()
                if decision is None:
                    return SolveStatus.SAT, conflicts
                self.stats.decisions += 1
            self._trail_lim.append(len(self._trail))
            self._assign(decision, None)


class ExternalSolver:
    """
    Runs a DIMACS solver binary as a subprocess and parses its
    ``s SATISFIABLE`` / ``v ...`` answer. Assumptions become unit clauses.
    """

    def __init__(self, command, num_vars: int = 0, clauses: Iterable[Sequence[int]] = (),
                 timeout: Optional[float] = None):
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        if not self.command:
            raise ConfigError("External solver command is empty")
        self.timeout = timeout
        self.num_vars = num_vars
        self.stats = SolverStats()
        self._clauses: List[List[int]] = []
        self.add_clauses(clauses)

    @property
    def num_clauses(self) -> int:
        return len(self._clauses)

    def ensure_vars(self, count: int) -> None:
        self.num_vars = max(self.num_vars, count)

    def add_clauses(self, clauses: Iterable[Sequence[int]]) -> None:
        for clause in clauses:
            clause = [int(l) for l in clause]
            if clause:
                self.ensure_vars(max(abs(l) for l in clause))
            self._clauses.append(clause)

    def _dimacs(self, assumptions: Sequence[int]) -> str:
        clauses = self._clauses + [[int(l)] for l in assumptions]
        lines = [f"p cnf {self.num_vars} {len(clauses)}"]
        lines += [" ".join(str(l) for l in clause) + " 0" for clause in clauses]
        return "\n".join(lines) + "\n"

    def solve(self, assumptions: Sequence[int] = ()) -> SolveResult:
        self.stats.solves += 1
        with tempfile.TemporaryDirectory() as workdir:
            path = Path(workdir) / "problem.cnf"
            path.write_text(self._dimacs(assumptions), encoding="utf-8")
            try:
                completed = subprocess.run(self.command + [str(path)], capture_output=True,
                                           text=True, timeout=self.timeout)
            except subprocess.TimeoutExpired:
                logger.warning("External solver timed out after %ss", self.timeout)
                return SolveResult(SolveStatus.UNKNOWN, stats=self.stats.to_dict())
            except OSError as exc:
                raise SolverError(f"Cannot run external solver {self.command[0]!r}: {exc}") from exc
        return parse_solver_output(completed.stdout, self.num_vars, self.stats.to_dict())


def parse_solver_output(text: str, num_vars: int, stats: Optional[dict] = None) -> SolveResult:
    """
    Parse competition-format solver output.

    Raises:
        SolverError: when no ``s`` status line is present
    """
    status = None
    model = [False] * (num_vars + 1)
    for line in text.splitlines():
        if line.startswith("s "):
            answer = line[2:].strip().upper()
            status = {"SATISFIABLE": SolveStatus.SAT, "UNSATISFIABLE": SolveStatus.UNSAT}.get(
                answer, SolveStatus.UNKNOWN)
        elif line.startswith("v "):
            for token in line[2:].split():
                lit = int(token)
                if lit != 0 and abs(lit) <= num_vars:
                    model[abs(lit)] = lit > 0
    if status is None:
        raise SolverError("External solver printed no 's' status line")
    return SolveResult(status, model if status is SolveStatus.SAT else None, 0, stats or {})


def make_solver(kind: str = "embedded", *, seed: Optional[int] = None,
                conflict_cap: Optional[int] = None, command=None, timeout: Optional[float] = None):
    """Solver factory for the embedded CDCL engine or an external binary."""
    if kind == "embedded":
        return CdclSolver(seed=seed, conflict_cap=conflict_cap)
    if kind == "external":
        if not command:
            raise ConfigError("External solver selected without a solver command")
        return ExternalSolver(command, timeout=timeout)
    raise ConfigError(f"Unknown solver kind {kind!r}; expected 'embedded' or 'external'")
