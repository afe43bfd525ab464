"""
Attack Data Provider Module
Provides the AttackDataProvider class for SAT attack runs on a locked netlist.
"""

import logging
from typing import Optional, Sequence

import pandas as pd

from analysis import corruptibility, netlist_census, verify_key
from attacks import approx_key_after, corruptibility_profile, sat_attack
from cnf_encoding import build_miter
from data_providers.report_data_provider import ReportDataProvider
from errors import LockingError
from netlist import Netlist, Oracle

logger = logging.getLogger(__name__)


class AttackDataProvider(ReportDataProvider):
    """
    Data access class for attacks on one locked netlist against one oracle.
    Keeps the latest trace and profile for CSV export.
    """

    def __init__(self, locked: Netlist, oracle: Oracle, solver: str = "embedded",
                 solver_cmd: Optional[str] = None, provenance: Optional[dict] = None):
        super().__init__(provenance)
        self.locked = locked
        self.oracle = oracle
        self.solver = solver
        self.solver_cmd = solver_cmd
        self.last_trace = None
        self.last_profile: Optional[pd.DataFrame] = None

    def run_attack(self, iteration_cap: Optional[int] = None, conflict_cap: Optional[int] = None,
                   seed: Optional[int] = None) -> dict:
        """
        Run the full SAT attack and verify any recovered key.

        Args:
            iteration_cap: DIP iteration limit
            conflict_cap: Conflict limit per miter solve
            seed: Solver seed

        Returns:
            Trace dictionary with ``verified`` set when a key was recovered
        """
        try:
            trace = sat_attack(self.locked, self.oracle, iteration_cap=iteration_cap,
                               conflict_cap=conflict_cap, seed=seed, solver=self.solver,
                               solver_cmd=self.solver_cmd)
            self.last_trace = trace
            result = trace.to_dict()
            result["verified"] = (verify_key(self.locked, self.oracle, trace.recovered_key,
                                             solver=self.solver, solver_cmd=self.solver_cmd)
                                  if trace.recovered_key is not None else False)
            return result
        except LockingError as e:
            return self._error("SAT attack", e)

    def get_trace_frame(self) -> pd.DataFrame:
        if self.last_trace is None:
            return pd.DataFrame()
        return self.last_trace.to_frame()

    def run_approx(self, budget: int, seed: Optional[int] = None) -> dict:
        """Approximate key after ``budget`` iterations and its corruptibility."""
        try:
            approx = approx_key_after(self.locked, self.oracle, budget, seed=seed,
                                      solver=self.solver, solver_cmd=self.solver_cmd)
            return {
                "budget": budget,
                "iterations": approx.iterations,
                "exact": approx.exact,
                "key": approx.key,
                "corruptibility": corruptibility(self.locked, approx.key, self.oracle),
            }
        except LockingError as e:
            return self._error("Approximate key extraction", e)

    def run_profile(self, step: int, max_iters: int, seeds: Sequence[int] = (0,),
                    threads: int = 1) -> dict:
        try:
            self.last_profile = corruptibility_profile(self.locked, self.oracle, step, max_iters,
                                                       seeds, threads=threads)
            levels = sorted(set(self.last_profile["corruptibility"].tolist()))
            return {
                "step": step,
                "max_iters": max_iters,
                "seeds": list(seeds),
                "levels": levels,
                "checkpoints": self.last_profile.to_dict(orient="records"),
            }
        except LockingError as e:
            return self._error("Corruptibility profile", e)

    def export_miter(self, output_dir) -> dict:
        """
        Write the attack's initial miter as ``miter.cnf`` with its
        ``variable_map.json`` sidecar.
        """
        try:
            miter = build_miter(self.locked)
            formula = miter.formula
            cnf_path = self.write_text(output_dir, "miter.cnf", formula.to_dimacs(
                [f"miter of {self.locked.name}: two copies sharing primary inputs, outputs must differ"]))
            map_path = self.write_text(output_dir, "variable_map.json", formula.variable_map_json())
            return {
                "cnf": str(cnf_path),
                "variable_map": str(map_path),
                "variables": formula.num_vars,
                "clauses": len(formula.clauses),
            }
        except LockingError as e:
            return self._error("Miter export", e)
        except OSError as e:
            return self._error("Writing miter", e)

    def get_profile_frame(self) -> pd.DataFrame:
        return self.last_profile if self.last_profile is not None else pd.DataFrame()

    def get_netlist_census(self, sample_count: int = 100, seed: int = 2023, threads: int = 1) -> dict:
        try:
            report = netlist_census(self.locked, self.oracle, sample_count, seed, threads)
            return report.to_dict()
        except LockingError as e:
            return self._error("Netlist census", e)
