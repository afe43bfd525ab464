"""
Attacks Module
Oracle-guided SAT attack on locked netlists, budgeted approximate-key
extraction and corruptibility profiles of the keys returned along the way.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import pandas as pd

from analysis import corruptibility
from cnf_encoding import CnfFormula, add_io_constraint, build_miter
from errors import DomainError
from netlist import Netlist, Oracle, simulate
from satcore import SolveStatus, make_solver

logger = logging.getLogger(__name__)


@dataclass
class AttackTrace:
    """Outcome of one SAT attack run."""

    dips: List[Tuple[int, Tuple[int, ...]]] = field(default_factory=list)
    iterations: int = 0
    recovered_key: Optional[Dict[str, int]] = None
    elapsed: float = 0.0
    iteration_stats: List[dict] = field(default_factory=list)
    timed_out: bool = False
    exact: bool = False

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "timed_out": self.timed_out,
            "exact": self.exact,
            "elapsed": round(self.elapsed, 6),
            "recovered_key": self.recovered_key,
            "dips": [{"pattern": x, "response": list(y)} for x, y in self.dips],
        }

    def to_frame(self) -> pd.DataFrame:
        """One row per DIP iteration."""
        columns = ["iteration", "pattern", "response", "clauses", "variables", "conflicts", "seconds"]
        return pd.DataFrame(self.iteration_stats, columns=columns)


@dataclass
class ApproxKey:
    key: Dict[str, int]
    iterations: int
    exact: bool


class SatAttack:
    """
    Stepwise SAT attack.

    The miter solver holds two locked-circuit copies that share X and must
    disagree; every DIP adds an oracle-consistency copy for each key
    variable set. A separate key solver accumulates the same constraints on
    one key and answers ``current_key`` at any point.
    """

    def __init__(self, locked: Netlist, oracle: Oracle, *, seed: Optional[int] = None,
                 conflict_cap: Optional[int] = None, solver: str = "embedded",
                 solver_cmd=None, solver_timeout: Optional[float] = None):
        if len(oracle.primary_inputs) != len(locked.primary_inputs):
            raise DomainError(f"Oracle has {len(oracle.primary_inputs)} inputs, locked circuit has "
                              f"{len(locked.primary_inputs)}")
        if len(oracle.outputs) != len(locked.outputs):
            raise DomainError(f"Oracle has {len(oracle.outputs)} outputs, locked circuit has "
                              f"{len(locked.outputs)}")
        self.locked = locked
        self.oracle = oracle
        self.miter = build_miter(locked)
        self._miter_solver = make_solver(solver, seed=seed, conflict_cap=conflict_cap,
                                         command=solver_cmd, timeout=solver_timeout)
        self._miter_pushed = 0
        self._sync(self._miter_solver, self.miter.formula, "_miter_pushed")

        self.key_formula = CnfFormula()
        self.key_vars = {k: self.key_formula.new_var(k) for k in locked.key_inputs}
        self._key_solver = make_solver(solver, seed=seed, command=solver_cmd, timeout=solver_timeout)
        self._key_pushed = 0
        self._sync(self._key_solver, self.key_formula, "_key_pushed")

        self.dips: List[Tuple[int, Tuple[int, ...]]] = []
        self.iteration_stats: List[dict] = []
        self.done = False
        self.timed_out = False
        self._started = time.perf_counter()

    def _sync(self, solver, formula: CnfFormula, marker: str) -> None:
        pushed = getattr(self, marker)
        solver.ensure_vars(formula.num_vars)
        solver.add_clauses(formula.clauses[pushed:])
        setattr(self, marker, len(formula.clauses))

    @property
    def iterations(self) -> int:
        return len(self.dips)

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self._started

    def step(self) -> bool:
        """Find one DIP and learn from it; False once no DIP is found."""
        if self.done or self.timed_out:
            return False
        began = time.perf_counter()
        result = self._miter_solver.solve()
        if result.status is SolveStatus.UNKNOWN:
            self.timed_out = True
            logger.warning("Miter solve hit its conflict cap after %d iterations", self.iterations)
            return False
        if result.status is SolveStatus.UNSAT:
            self.done = True
            logger.info("Miter unsatisfiable after %d iterations", self.iterations)
            return False

        pattern = sum(int(result.value(self.miter.x_vars[w])) << i
                      for i, w in enumerate(self.locked.primary_inputs))
        response = tuple(int(v) for v in self.oracle.query(pattern))
        bits = {w: (pattern >> i) & 1 for i, w in enumerate(self.locked.primary_inputs)}
        for key_vars in (self.miter.k1_vars, self.miter.k2_vars):
            add_io_constraint(self.miter.formula, self.locked, bits, key_vars, response)
        self._sync(self._miter_solver, self.miter.formula, "_miter_pushed")
        add_io_constraint(self.key_formula, self.locked, bits, self.key_vars, response)
        self._sync(self._key_solver, self.key_formula, "_key_pushed")

        self.dips.append((pattern, response))
        stats = {
            "iteration": self.iterations,
            "pattern": pattern,
            "response": "".join(str(v) for v in response),
            "clauses": len(self.miter.formula.clauses),
            "variables": self.miter.formula.num_vars,
            "conflicts": result.conflicts,
            "seconds": time.perf_counter() - began,
        }
        self.iteration_stats.append(stats)
        logger.debug("iteration %d: DIP %d -> %s, %d clauses, %d vars",
                     stats["iteration"], pattern, stats["response"], stats["clauses"], stats["variables"])
        return True

    def run(self, budget: Optional[int] = None) -> None:
        """Step until the miter is UNSAT, a cap is hit or ``budget`` DIPs exist."""
        while budget is None or self.iterations < budget:
            if not self.step():
                break

    def current_key(self) -> Dict[str, int]:
        """Any key consistent with every DIP learned so far."""
        result = self._key_solver.solve()
        if result.status is not SolveStatus.SAT:
            raise DomainError(f"No key is consistent with the oracle responses ({result.status.value})")
        return {k: int(result.value(var)) for k, var in self.key_vars.items()}

    def trace(self, recovered_key: Optional[Dict[str, int]] = None) -> AttackTrace:
        return AttackTrace(
            dips=list(self.dips),
            iterations=self.iterations,
            recovered_key=recovered_key,
            elapsed=self.elapsed,
            iteration_stats=list(self.iteration_stats),
            timed_out=self.timed_out,
            exact=self.done,
        )


def check_key_consistency(locked: Netlist, key: Mapping[str, int],
                          dips: Iterable[Tuple[int, Sequence[int]]]) -> bool:
    """Replay every recorded query under ``key``."""
    for pattern, response in dips:
        assignment = {w: (pattern >> i) & 1 for i, w in enumerate(locked.primary_inputs)}
        assignment.update(key)
        outputs = simulate(locked, assignment)
        if tuple(outputs[w] for w in locked.outputs) != tuple(int(v) for v in response):
            return False
    return True


def sat_attack(locked: Netlist, oracle: Oracle, *, iteration_cap: Optional[int] = None,
               conflict_cap: Optional[int] = None, seed: Optional[int] = None,
               solver: str = "embedded", solver_cmd=None,
               solver_timeout: Optional[float] = None) -> AttackTrace:
    """
    Full oracle-guided SAT attack.

    Args:
        locked: Locked netlist with key inputs
        oracle: Activated circuit with the same input and output arity
        iteration_cap: Maximum DIP iterations before giving up
        conflict_cap: Conflict limit for each miter solve

    Returns:
        AttackTrace; on a cap the trace is flagged ``timed_out`` and carries no key
    """
    attack = SatAttack(locked, oracle, seed=seed, conflict_cap=conflict_cap, solver=solver,
                       solver_cmd=solver_cmd, solver_timeout=solver_timeout)
    attack.run(iteration_cap)
    if not attack.done:
        attack.timed_out = True
        trace = attack.trace()
        logger.info("Attack stopped without a key after %d iterations", trace.iterations)
        return trace

    key = attack.current_key()
    if not check_key_consistency(locked, key, attack.dips):
        raise DomainError("Recovered key contradicts a recorded oracle response")
    trace = attack.trace(key)
    logger.info("Recovered key after %d iterations in %.2fs", trace.iterations, trace.elapsed)
    return trace


def approx_key_after(locked: Netlist, oracle: Oracle, iter_budget: int, *, seed: Optional[int] = None,
                     conflict_cap: Optional[int] = None, solver: str = "embedded",
                     solver_cmd=None) -> ApproxKey:
    """
    Run ``iter_budget`` DIP iterations, then return a key satisfying every
    constraint gathered so far. ``exact`` is set when the miter went UNSAT
    within the budget.
    """
    if iter_budget < 0:
        raise DomainError(f"Iteration budget must be non-negative, got {iter_budget}")
    attack = SatAttack(locked, oracle, seed=seed, conflict_cap=conflict_cap, solver=solver,
                       solver_cmd=solver_cmd)
    attack.run(iter_budget)
    return ApproxKey(attack.current_key(), attack.iterations, attack.done)


def _profile_one(locked: Netlist, oracle: Oracle, step: int, max_iters: int, seed,
                 conflict_cap: Optional[int]) -> List[dict]:
    attack = SatAttack(locked, oracle, seed=seed, conflict_cap=conflict_cap)
    rows = []
    # a step past the budget still samples once, at max_iters
    checkpoint = min(step, max_iters)
    while checkpoint <= max_iters:
        attack.run(checkpoint)
        key = attack.current_key()
        rows.append({
            "seed": seed,
            "iteration": attack.iterations,
            "corruptibility": corruptibility(locked, key, oracle),
            "exact": attack.done,
        })
        if attack.done or attack.timed_out:
            break
        checkpoint += step
    return rows


def corruptibility_profile(locked: Netlist, oracle: Oracle, step: int, max_iters: int,
                           seeds: Sequence[Optional[int]] = (0,), *, threads: int = 1,
                           conflict_cap: Optional[int] = None) -> pd.DataFrame:
    """
    Corruptibility of the approximate key at every ``step`` iterations, one
    attack per seed. Each seed's series is one attack sampled at checkpoints.

    Returns:
        DataFrame with columns seed, iteration, corruptibility, exact
    """
    if step < 1:
        raise DomainError(f"Profile step must be at least 1, got {step}")
    if threads > 1 and len(seeds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            series = list(pool.map(
                lambda s: _profile_one(locked, oracle, step, max_iters, s, conflict_cap), seeds))
    else:
        series = [_profile_one(locked, oracle, step, max_iters, s, conflict_cap) for s in seeds]
    rows = [row for rows in series for row in rows]
    return pd.DataFrame(rows, columns=["seed", "iteration", "corruptibility", "exact"])
