"""
Attack Command Provider
Runs the SAT attack, a budgeted approximate-key extraction or a
corruptibility profile against a locked bench.
"""

import logging

from rich import box
from rich.table import Table

from command_providers.command_provider import EXIT_OK, EXIT_TIMEOUT, CommandProvider
from data_providers.attack_data_provider import AttackDataProvider
from data_providers.report_data_provider import ReportDataProvider
from errors import LockingError
from netlist import load_bench

logger = logging.getLogger(__name__)


class AttackCommandProvider(CommandProvider):
    """Command provider for attacks on a locked netlist."""

    def __init__(self, config, console=None):
        super().__init__(config, console)
        self.provider = None

    @property
    def commands(self) -> dict:
        return {
            "sat": self.run_sat_attack,
            "approx": self.run_approx,
            "profile": self.run_profile,
            "export": self.export_cnf,
        }

    def _setup(self) -> AttackDataProvider:
        c = self.config
        locked = load_bench(c.locked_file)
        oracle = self.load_oracle(locked)
        self.provider = AttackDataProvider(locked, oracle, c.solver, c.solver_cmd, c.provenance())
        return self.provider

    def run_sat_attack(self) -> int:
        c = self.config
        result = self.provider.run_attack(c.iteration_cap, c.conflict_cap, c.seed)
        if "error" in result:
            return self.fail(result)
        self.record(self.provider.write_report(self.output_dir, "trace", result))
        self.record(self.provider.write_report(self.output_dir, "trace", {},
                                               self.provider.get_trace_frame(), "csv"))
        if result["timed_out"]:
            self.status(f"Attack stopped after {result['iterations']} iterations without a key", ok=False)
            return EXIT_TIMEOUT
        self.status(f"Key recovered after {result['iterations']} iterations "
                    f"({result['elapsed']:.2f}s), verified: {result['verified']}")
        return EXIT_OK

    def export_cnf(self) -> int:
        result = self.provider.export_miter(self.output_dir)
        if "error" in result:
            return self.fail(result)
        self.record(result["cnf"])
        self.record(result["variable_map"])
        self.status(f"Miter: {result['variables']:,} variables, {result['clauses']:,} clauses")
        return EXIT_OK

    def run_approx(self) -> int:
        c = self.config
        result = self.provider.run_approx(c.budget, c.seed)
        if "error" in result:
            return self.fail(result)
        self.record(self.provider.write_report(self.output_dir, "approx_key", result))
        self.status(f"Approximate key after {result['iterations']} iterations: "
                    f"corruptibility {result['corruptibility']}" + (" (exact)" if result["exact"] else ""))
        return EXIT_OK

    def run_profile(self) -> int:
        c = self.config
        result = self.provider.run_profile(c.profile_step, c.max_iters if c.max_iters is not None else c.budget,
                                           c.seeds, c.threads)
        if "error" in result:
            return self.fail(result)
        frame = self.provider.get_profile_frame()
        self.record(self.provider.write_report(self.output_dir, "profile", result))
        self.record(self.provider.write_report(self.output_dir, "profile", {}, frame, "csv"))
        table = Table(title="📈 Corruptibility profile", box=box.ROUNDED, border_style="blue")
        for column in ("seed", "iteration", "corruptibility", "exact"):
            table.add_column(column, justify="right")
        for row in frame.itertuples(index=False):
            table.add_row(str(row.seed), str(row.iteration), str(row.corruptibility), str(row.exact))
        self.console.print(table)
        return EXIT_OK

    def run(self) -> int:
        try:
            self._setup()
            if self.config.export_cnf:
                code = self.export_cnf()
                if code != EXIT_OK:
                    return code
            if self.config.profile_step is not None:
                return self.run_profile()
            if self.config.budget is not None:
                return self.run_approx()
            return self.run_sat_attack()
        except LockingError as e:
            return self.fail(ReportDataProvider._error("Attack setup", e))
        except OSError as e:
            return self.fail(ReportDataProvider._error("Attack I/O", e))
